"""Measures on the unit circle, their Fourier coefficients and the stagewise construction."""

from .comb import CombLevel, CombMeasure, load_measure
from .construction import (ConstructionFailed, ConstructionState, cantor_pairs, enumerate_h, eps_schedule,
                           lemma44_construct, theorem12_driver, theorem12_functions, weak_convergence_check)
from .discretize import (IndependentPoint, discretize_ac, discretize_atomic, independence_certificate,
                         independent_points, refine, uniform_partition)
from .kronecker import KroneckerResult, SearchExhausted, kronecker_search
from .lemma43 import Check, RefinementResult, RefinementTooLarge, lemma43_step
from .measure import CircleMeasure, fourier, pair, restrict
from .trigpoly import TrigPoly
