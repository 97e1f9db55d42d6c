"""Weighted shifts, weak closures and measures on the circle.

Submodules: ``lattice`` (weights and sparse vectors on Z), ``families``,
``criteria`` (Salas-type statistics), ``closure`` (weak-closure and
p-sequence certificates), ``wcert`` (W-conditions and the block vector),
``circle`` (measures, Fourier coefficients and the stagewise construction)
and ``cli``.
"""

__version__ = "0.1.0"
