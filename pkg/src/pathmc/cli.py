"""``pathmc`` command line: sample, cftp, enumerate, verify, mix, stats, render.

Exit codes: 0 ok, 2 validation error, 3 size guard / step cap, 4 internal invariant failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import oracle
from .cftp import DEFAULT_CAP, cftp_sample, longest_chain_bound
from .chain import (FUNCTIONALS, NotCoalesced, coupling_times, dumps, estimate_functional,
                    mcmc_run, bound_steps, trajectory, worker_count)
from .paths import (EmptyFamilyError, FamilySpec, InvariantError, SizeGuardError, extremal_paths,
                    load_path, path_record)
from .render import render_ascii, render_svg
from .weights import QUADRATIC, UNIFORM, build_weight_table, effective_kappa

EXIT_OK, EXIT_VALIDATION, EXIT_GUARD, EXIT_INVARIANT = 0, 2, 3, 4
MIX_COLUMNS = ["n", "family", "a", "b", "mode", "metric", "value", "seed"]


def _family_args(p: argparse.ArgumentParser, n_required: bool = True) -> None:
    p.add_argument("--family", required=True,
                   choices=["meander", "wall", "excursion", "culminating", "unconstrained"])
    p.add_argument("--n", type=int, required=n_required)
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--h", type=int, help="wall height")
    p.add_argument("--r", type=int, help="first index of the wall")
    p.add_argument("--s", type=int, help="last index of the wall")
    p.add_argument("--weights", choices=[QUADRATIC, UNIFORM], default=QUADRATIC)
    p.add_argument("--seed", type=int, default=0)


def _spec(args, n: int | None = None) -> FamilySpec:
    return FamilySpec.build(args.family, n if n is not None else args.n, args.a, args.b,
                            h=args.h, r=args.r, s=args.s)


def _emit(out, record: dict) -> None:
    out.write(dumps(record) + "\n")


def _map_seeds(fn, seeds):
    workers = min(worker_count(), len(seeds))
    if workers <= 1:
        return [fn(s) for s in seeds]
    with ThreadPoolExecutor(workers) as ex:
        return list(ex.map(fn, seeds))  # ordered by k whatever the completion order


def cmd_sample(args, out) -> int:
    spec = _spec(args)
    table = build_weight_table(spec.n, args.weights)
    steps = args.steps if args.steps is not None else bound_steps(spec.n, args.tv_target)
    if steps < 0:
        raise ValueError("--steps must be >= 0")
    if args.trajectory:
        for rec in trajectory(spec, table, steps, args.seed, every=args.every):
            _emit(out, rec)
        return EXIT_OK
    seeds = [args.seed + k for k in range(args.samples)]
    paths = _map_seeds(lambda s: mcmc_run(spec, table, steps, s), seeds)
    for s, p in zip(seeds, paths):
        _emit(out, {**path_record(p, spec), "seed": s, "steps": steps})
    return EXIT_OK


def cmd_cftp(args, out) -> int:
    spec = _spec(args)
    table = build_weight_table(spec.n, args.weights)
    ext = extremal_paths(spec)
    seeds = [args.seed + k for k in range(args.samples)]
    results = _map_seeds(lambda s: cftp_sample(spec, table, s, args.tau0, args.cap, extremes=ext),
                         seeds)
    for s, r in zip(seeds, results):
        _emit(out, {**path_record(r.path, spec), "seed": s, "tau_final": r.tau_final,
                    "tuples_consumed": r.tuples_consumed, "final": int(r.path.heights[-1])})
    return EXIT_OK


def cmd_enumerate(args, out) -> int:
    spec = _spec(args)
    enum = oracle.enumerate_family(spec)
    if args.count:
        _emit(out, {"family": spec.family, "n": spec.n, "a": spec.a, "b": spec.b,
                    "count": len(enum)})
        return EXIT_OK
    for p in enum.members:
        _emit(out, path_record(p, spec))
    return EXIT_OK


def _instance(spec: FamilySpec, mode: str) -> dict:
    rec = path_record(extremal_paths(spec)[0], spec)
    rec.pop("word")
    rec["weights"] = mode
    return rec


def _finite(x: float):
    return x if np.isfinite(x) else None  # JSON has no Infinity


def _words(*paths) -> list[str]:
    return [p.word for p in paths]


def cmd_verify(args, out) -> int:
    spec = _spec(args)
    table = build_weight_table(spec.n, args.weights)
    enum = oracle.enumerate_family(spec)
    report: dict = {"check": args.check, "instance": _instance(spec, args.weights),
                    "members": len(enum)}
    if args.check == "matrix":
        P = oracle.build_transition_matrix(spec, table, enum).P
        m = len(enum)
        sym = float(np.abs(P - P.T).max())
        rows = float(np.abs(P.sum(axis=1) - 1).max())
        stat = float(np.abs(np.full(m, 1 / m) @ P - 1 / m).max())
        report.update(symmetry_error=sym, row_sum_error=rows, stationarity_error=stat,
                      tmix=oracle.exact_tmix(oracle.TransitionMatrix(P, enum)),
                      witnesses=[])
        report["pass"] = max(sym, rows, stat) <= 1e-12
    elif args.check == "geodesic":
        g = oracle.geodesic_check(spec, enum)
        report.update(connected=g.connected, irreducible=g.irreducible,
                      max_graph_distance=_finite(g.max_graph_distance),
                      witnesses=[] if g.ok else [{"pair": _words(*g.counterexample[:2]),
                                                  "graph_distance": _finite(g.counterexample[2]),
                                                  "d1": g.counterexample[3]}])
        report["pass"] = g.ok
    elif args.check == "curvature":
        c = oracle.curvature_scan(spec, table, enum)
        report["min_contraction"] = c.min_contraction
        report["witnesses"] = [_words(s, t) for s, t in c.witnesses[:10]]
        if args.weights == QUADRATIC and not spec.is_culminating:
            kappa = effective_kappa(table)
            report["effective_kappa"] = kappa
            report["pass"] = c.min_contraction >= kappa - 1e-12
        else:
            report["pass"] = None  # exploratory: no positivity claim here
    elif args.check == "monotone":
        r = oracle.monotone_check(spec, enum)
        report["witnesses"] = [] if r.ok else [{"pair": _words(*r.witness[:2]),
                                                "tuple": str(r.witness[2])}]
        report["pass"] = r.ok
    elif args.check == "sandwich":
        r = oracle.sandwich_closure_check(spec, enum)
        report["witnesses"] = [] if r.ok else [_words(*r.witness)]
        report["pass"] = r.ok
    _emit(out, report)
    return EXIT_OK


def cmd_mix(args, out) -> int:
    ns = args.ns or [args.n]
    if None in ns:
        raise ValueError("mix needs --n or --ns")
    specs = [_spec(args, n) for n in ns]
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(MIX_COLUMNS)
    for spec in specs:
        table = build_weight_table(spec.n, args.weights)
        base = [spec.n, spec.family, spec.a, spec.b, args.weights]
        if args.exact:
            P = oracle.build_transition_matrix(spec, table)
            writer.writerow(base + ["tmix", oracle.exact_tmix(P), ""])
        else:
            seeds = [args.seed + k for k in range(args.samples)]
            times = coupling_times(spec, table, seeds, args.cap)
            if np.any(times < 0):
                raise NotCoalesced(args.cap)
            value = times.mean() if args.metric == "mean" else np.median(times)
            writer.writerow(base + [f"{args.metric}_coupling_time", float(value), args.seed])
    return EXIT_OK


def cmd_stats(args, out) -> int:
    spec = _spec(args)
    table = build_weight_table(spec.n, args.weights)
    steps = args.steps if args.steps is not None else bound_steps(spec.n, args.tv_target)
    rec = {"functional": args.functional, "family": spec.family, "n": spec.n, "a": spec.a,
           "b": spec.b, "steps": steps, "seed": args.seed,
           "estimate": estimate_functional(spec, table, steps, args.seed, args.functional),
           "longest_chain": longest_chain_bound(spec)}
    if args.exact:
        enum = oracle.enumerate_family(spec)
        f = FUNCTIONALS[args.functional]
        rec["exact"] = float(np.mean([f(p) for p in enum.members]))
    _emit(out, rec)
    return EXIT_OK


def cmd_render(args, out) -> int:
    text = open(args.input).read() if args.input != "-" else sys.stdin.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty input")
    try:
        path, spec = load_path(lines[args.record])
    except (KeyError, json.JSONDecodeError, IndexError) as exc:
        raise ValueError(f"malformed path record: {exc}") from None
    if args.format == "svg":
        doc = render_svg(path, spec, args.width, args.height)
    else:
        doc = render_ascii(path, spec)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(doc)
    else:
        out.write(doc)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathmc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="approximate sample by running the chain forward")
    _family_args(p)
    p.add_argument("--steps", type=int, help="chain steps (default: contraction-bound count)")
    p.add_argument("--tv-target", type=float, default=0.01)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--trajectory", action="store_true", help="emit JSONL trajectory records")
    p.add_argument("--every", type=int, default=1)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("cftp", help="exact samples by coupling from the past")
    _family_args(p)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--tau0", type=int, default=1)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_cftp)

    p = sub.add_parser("enumerate", help="list every member of a small family")
    _family_args(p)
    p.add_argument("--count", action="store_true")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", help="exhaustive checks on a small instance")
    p.add_argument("check", choices=["matrix", "geodesic", "curvature", "monotone", "sandwich"])
    _family_args(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mix", help="exact mixing time or empirical coupling times (CSV)")
    _family_args(p, n_required=False)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--exact", action="store_true")
    g.add_argument("--coupling", action="store_true")
    p.add_argument("--ns", type=int, nargs="+", help="several lengths (overrides --n)")
    p.add_argument("--samples", type=int, default=100, help="seeds per length (--coupling)")
    p.add_argument("--metric", choices=["mean", "median"], default="mean")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("stats", help="time-average estimate of a path functional")
    _family_args(p)
    p.add_argument("--functional", choices=sorted(FUNCTIONALS), default="max_height")
    p.add_argument("--steps", type=int)
    p.add_argument("--tv-target", type=float, default=0.01)
    p.add_argument("--exact", action="store_true", help="also report the enumerated mean")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("render", help="draw a serialized path as SVG or ASCII")
    p.add_argument("--input", default="-", help="JSON/JSONL path record file ('-' = stdin)")
    p.add_argument("--record", type=int, default=0, help="line of a JSONL input to draw")
    p.add_argument("--format", choices=["svg", "ascii"], default="svg")
    p.add_argument("--output")
    p.add_argument("--width", type=int, default=800)
    p.add_argument("--height", type=int, default=300)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    buf = io.StringIO()  # nothing reaches ``out`` unless the command succeeds
    try:
        code = args.func(args, buf)
        out.write(buf.getvalue())
        return code
    except (SizeGuardError, NotCoalesced) as exc:
        print(f"pathmc: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except InvariantError as exc:
        print(f"pathmc: internal invariant failed: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (EmptyFamilyError, ValueError, OSError) as exc:
        print(f"pathmc: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
