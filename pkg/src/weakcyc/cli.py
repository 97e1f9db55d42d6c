"""Command line front end: criteria, certificates and measure constructions.

Every flag can also come from a JSON config file (``--config``) whose keys
are the flag names with dashes or underscores; flags given on the command
line win.  The thread count is read from WEAKCYC_THREADS only.

Exit codes: 0 success, 1 certificate failed (the run itself is valid),
2 usage or config error, 3 an internal check was violated.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        return {f.name: _jsonable(getattr(x, f.name)) for f in dataclasses.fields(x)}
    if x is None or isinstance(x, (str, int)):
        return x
    return repr(x)


def write_report(path: Path, payload: dict) -> None:
    payload = {"timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"), **payload}
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def threads() -> int:
    raw = os.environ.get("WEAKCYC_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"WEAKCYC_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("WEAKCYC_THREADS must be >= 1")
    return n


# criteria


def cmd_criteria(args) -> int:
    from .criteria import evaluate_criterion
    from .families import make_family
    from .lattice import LogMag

    try:
        w = make_family(args.family, args.p)
    except ValueError as e:
        raise UsageError(str(e)) from None
    v = evaluate_criterion(w, args.stat, args.kmax, args.horizon, LogMag(args.tol_log2), threads=threads())
    out = Path(args.out)
    write_report(out / "criteria.json", {
        "command": "criteria", "params": v.params, "stat": v.stat, "verdict": v.verdict,
        "per_k_min_log2": {k: {"log2_min": m, "argmin": n} for k, (m, n) in v.per_k_min.items()},
        "running_min_log2": v.running_min.value, "evidence": v.evidence,
    })
    rows = [(k, n, float(x)) for k, s in v.statistic_series.items() for n, x in enumerate(s, 1)]
    write_csv(out / "criteria_series.csv", ["k", "n", "log2_stat"], rows)
    print(f"{args.family} {args.stat}: {v.verdict}")
    return EXIT_OK


# certificates


def cmd_certify(args) -> int:
    from .closure import SequenceRule, closedness_certificate, power_log_rule
    from .families import make_family, unweighted
    from .wcert import check_w_conditions, prop18_params, prop19_params, theorem15_params

    out = Path(args.out)
    if args.cert == "closedness":
        base, s = args.growth
        if base <= 0:
            raise UsageError("--growth needs a positive base")
        # ||x_n|| = base^(n+1), or (n+1)^s when base == 1
        if base == 1:
            rule = power_log_rule(s)
        else:
            b = float(base)

            def values(ns):
                return b ** (np.asarray(ns, dtype=float) + 1)

            def tail(q, n):
                return b ** (-q * (n + 2)) / (1 - b ** (-q)) if b > 1 else math.inf

            rule = SequenceRule(values, tail, lambda q: b <= 1, f"{b}^(n+1)")
        v = closedness_certificate(rule, args.space, args.horizon or 100_000, args.p)
        write_report(out / "certify.json", {
            "command": "certify", "cert": "closedness", "space": v.space, "exponent": v.a,
            "certificate": v.certificate, "trend": v.series.trend, "certified_tail": v.series.certified,
            "tail_bound": v.series.tail_bound, "note": v.note})
        write_csv(out / "certify_series.csv", ["N", "partial_sum"], v.series.partial_sums)
        print(f"closedness ({args.space}): {'certificate' if v.certificate else 'no certificate'}")
        return EXIT_OK if v.certificate else EXIT_FAIL

    if args.cert == "theorem15":
        w, cert = unweighted(), theorem15_params(args.p)
    elif args.cert in ("prop18", "prop18-inverse"):
        inv = args.cert == "prop18-inverse"
        w, cert = make_family("prop18_inverse" if inv else "prop18"), prop18_params(inv)
    elif args.cert == "prop19":
        w, cert = make_family("prop19", args.p), prop19_params(args.p)
    else:
        raise UsageError(f"unknown certificate {args.cert!r}")
    horizon = args.horizon or (100_000 if args.cert == "theorem15" else 500)
    try:
        rep = check_w_conditions(w, cert, horizon, args.space)
    except ValueError as e:
        raise UsageError(str(e)) from None
    conds = {name: {"status": c.status, "ok": c.ok, "detail": c.detail} for name, c in rep.conditions.items()}
    write_report(out / "certify.json", {
        "command": "certify", "cert": rep.cert, "family": rep.family, "p": rep.p, "space": rep.space,
        "horizon": rep.horizon, "offset": rep.offset, "overall": rep.overall, "conditions": conds})
    rows = []
    if rep.w3_terms is not None:
        s = np.cumsum(rep.w3_terms)
        rows += [("W3", n + 1, float(x)) for n, x in enumerate(s) if _checkpoint(n + 1)]
    if rep.theta is not None:
        s = np.cumsum(np.asarray(rep.theta, dtype=float) ** (-1 / (rep.p - 1))) if rep.space == "lp" else None
        if s is not None:
            rows += [("W4", n + 1, float(x)) for n, x in enumerate(s) if _checkpoint(n + 1)]
    write_csv(out / "certify_series.csv", ["series", "N", "partial_sum"], rows)
    print(f"{rep.cert}: {'pass' if rep.overall else 'fail'}")
    return EXIT_OK if rep.overall else EXIT_FAIL


def _checkpoint(n: int) -> bool:
    """1, 2, 5, 10, 20, 50, ... for plot-ready series of moderate size."""
    e = 10 ** int(math.log10(n))
    return n in (e, 2 * e, 5 * e)


# measures


def cmd_measure(args) -> int:
    from .circle.construction import ConstructionFailed, theorem12_driver
    from .circle.measure import pair
    from .circle.trigpoly import TrigPoly

    if args.stages < 1 or args.h_count < 1:
        raise UsageError("--stages and --h-count must be >= 1")
    if not 0 < args.delta < 1:
        raise UsageError("--delta must lie in (0, 1): delta_n = delta^n")
    out = Path(args.out)
    t0 = time.perf_counter()
    try:
        mu, ks, rep = theorem12_driver(args.h_count, args.stages, lambda n: args.delta**n,
                                       time_budget=args.time_budget, samples=args.samples,
                                       log=lambda s: print(s, file=sys.stderr))
    except ConstructionFailed as e:
        write_report(out / "measure.json", {"command": "measure", "error": str(e), "diagnostics": e.diagnostics})
        print(f"construction failed: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    (out / "measure.txt").write_text(mu.dumps())
    table = [row for st in rep["states"] for row in st.check_table()]
    stages = [{"n": st.n, "k": st.k, "j": st.j, "m": st.m, "eps": st.eps, "Q": st.Q, "w": st.w,
               "checks": {k: c.as_dict() for k, c in st.checks.items()},
               "lemma_step": {k: v.as_dict() for k, v in st.diagnostics.items() if k in ("B1", "B2", "B3", "B4")}}
              for st in rep["states"]]
    cert = rep["certificate"]
    write_report(out / "measure.json", {
        "command": "measure", "h_count": args.h_count, "stages": stages, "delta": args.delta, "G": rep["G"],
        "k": ks, "pairs": rep["pairs"], "a": rep["a"], "checks_ok": rep["checks_ok"],
        "gram_sum": rep["gram_sum"], "gram_bound": rep["gram_bound"], "gram_ok": rep["gram_ok"],
        "pairings": rep["pairings"], "final_pairings_ok": rep["final_pairings_ok"],
        "families": rep["families"], "decay": rep["decay"],
        "certificate": {"verdict": cert.verdict, "rows": [{"name": r["name"], "status": r["status"]}
                                                           for r in cert.per_target]},
        "two_sequence_bound": rep["two_sequence"].bound,
    })
    write_csv(out / "measure_checks.csv", ["stage", "check", "ok", "slack", "kind", "detail"],
              [(r["stage"], r["check"], r["ok"], r["slack"], r["kind"], r["detail"]) for r in table])
    ls = list(range(-100, 101)) + [st.j for st in rep["states"]] + [k for k in ks if k]
    write_csv(out / "measure_fourier.csv", ["l", "re", "im", "abs"],
              [(l, v.real, v.imag, abs(v)) for l, v in zip(ls, mu.fourier_many(ls))])
    one = pair(mu, TrigPoly.const(1))
    print(f"measure: {args.stages} stages, total mass {one.real:.12f}, checks {'pass' if rep['checks_ok'] else 'FAIL'}, "
          f"{time.perf_counter() - t0:.1f}s", file=sys.stderr)
    ok = rep["checks_ok"] and rep["gram_ok"] and rep["final_pairings_ok"]
    return EXIT_OK if ok else EXIT_INTERNAL


# argument handling


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="weakcyc", description=__doc__.split("\n\n")[0])
    ap.add_argument("--config", help="JSON file whose keys mirror the flags")
    ap.add_argument("--out", default=".", help="output directory (created if missing)")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("criteria", help="Salas-type criteria for a weight family")
    c.add_argument("--family", default="unweighted",
                   help="unweighted | chan-sanders | prop18 | prop18-inverse | prop19")
    c.add_argument("--p", type=float, default=None, help="exponent for prop19")
    c.add_argument("--stat", choices=["hyper", "super"], default="super")
    c.add_argument("--kmax", type=int, default=3)
    c.add_argument("--horizon", type=int, default=1000)
    c.add_argument("--tol-log2", type=float, default=-20.0)
    c.set_defaults(func=cmd_criteria)

    c = sub.add_parser("certify", help="W-condition or weak-closedness certificates")
    c.add_argument("--cert", default="theorem15",
                   choices=["theorem15", "prop18", "prop18-inverse", "prop19", "closedness"])
    c.add_argument("--p", type=float, default=3.0)
    c.add_argument("--horizon", type=int, default=None,
                   help="terms to evaluate (default 100000 for unit weights, 500 otherwise)")
    c.add_argument("--space", default="lp", help="lp | c0 for W-conditions; hilbert | banach | lp for closedness")
    c.add_argument("--growth", type=float, nargs=2, default=[2.0, 0.0], metavar=("BASE", "S"),
                   help="closedness norms: BASE^(n+1), or (n+1)^S when BASE is 1")
    c.set_defaults(func=cmd_certify)

    c = sub.add_parser("measure", help="stagewise measure construction")
    c.add_argument("--stages", type=int, default=6)
    c.add_argument("--h-count", type=int, default=4)
    c.add_argument("--delta", type=float, default=0.5, help="delta_n = DELTA^n")
    c.add_argument("--time-budget", type=float, default=300.0)
    c.add_argument("--samples", type=int, default=16)
    c.set_defaults(func=cmd_measure)
    return ap


def _apply_config(ap: argparse.ArgumentParser, argv) -> argparse.Namespace:
    args = ap.parse_args(argv)
    if not args.config:
        return args
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read config {args.config}: {e}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    cfg.pop("config", None)
    if cfg.pop("command", args.command) != args.command:
        raise UsageError("config command does not match the subcommand")
    # flags typed on the command line win over the config
    given = {a.split("=")[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    known = set(vars(args))
    for k, v in cfg.items():
        if k not in known:
            raise UsageError(f"unknown config key {k!r}")
        if k not in given:
            setattr(args, k, v)
    return args


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = _apply_config(ap, argv)
        Path(args.out).mkdir(parents=True, exist_ok=True)
        return args.func(args)
    except UsageError as e:
        print(f"weakcyc: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # argparse
        return int(e.code or 0) if isinstance(e.code, int) else EXIT_USAGE
    except (AssertionError, ArithmeticError) as e:
        print(f"weakcyc: internal check violated: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
