"""Command-line front end: ``cspoly {construct,verify,estimate,recover,export}``.

Every command prints one JSON report. Exit codes: 0 all checks pass, 1 a
claimed property failed (the report names a witness), 2 invalid
parameters, 3 inconclusive because of solver failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

from . import __version__, faces, lp, recovery
from .linalg import DEFAULT_REL_TOL
from .polytopes import (ClusterSpec, DirectSumSpec, ManyFacesSpec, NeighborlySpec, construct,
                        dimension_is_exact)
from .vertex_io import SCHEMA_VERSION, export, fmt, vertices_csv

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_INCONCLUSIVE = 0, 1, 2, 3
STATUS_EXIT = {"PASS": EXIT_OK, "DEGENERATE": EXIT_OK, "FAIL": EXIT_FAIL,
               "INCONCLUSIVE": EXIT_INCONCLUSIVE}
WORKERS_ENV = "CSPOLY_WORKERS"
FAMILIES = ("neighborly", "cluster", "many-faces", "direct-sum")
_FAMILY_PARAMS = {
    "neighborly": ("m",),
    "cluster": ("m", "s"),
    "many-faces": ("k", "m", "n"),
    "direct-sum": ("k", "m", "n", "r"),
}


class InvalidSpec(ValueError):
    pass


def spec_from_args(args):
    if args.family is None:
        raise InvalidSpec("--family is required")
    missing = [p for p in _FAMILY_PARAMS[args.family] if getattr(args, p) is None]
    if missing:
        raise InvalidSpec(f"family {args.family} needs " + ", ".join(f"--{p}" for p in missing))
    try:
        if args.family == "neighborly":
            return NeighborlySpec(args.m)
        if args.family == "cluster":
            if args.spread is None:
                return ClusterSpec(args.m, args.s)
            return ClusterSpec(args.m, args.s, Fraction(args.spread))
        if args.family == "many-faces":
            return ManyFacesSpec(args.k, args.m, args.n)
        return DirectSumSpec(args.k, args.m, args.n, args.r)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidSpec(str(exc)) from None


def build_instance(args):
    try:
        return construct(spec_from_args(args), rel_tol=args.rank_tol)
    except InvalidSpec:
        raise
    except ValueError as exc:
        raise InvalidSpec(str(exc)) from None


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@contextmanager
def worker_pool(workers: int):
    """A ``map``-like callable; ordered results regardless of worker count."""
    if workers <= 1:
        yield map
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield lambda fn, items: pool.map(fn, list(items), chunksize=16)


def tolerances(args) -> dict:
    return {
        "lp_feasibility": lp.FEAS_TOL,
        "lp_pivot": lp.PIVOT_TOL,
        "certificate": faces.CERT_TOL,
        "not_face_witness": faces.WITNESS_TOL,
        "rank_relative": args.rank_tol,
        "recovery_inf_norm": recovery.RECOVERY_TOL,
    }


def config_echo(args) -> dict:
    out = {}
    for key, val in sorted(vars(args).items()):
        if key in ("func", "workers", "no_timings"):
            continue
        out[key] = list(val) if isinstance(val, tuple) else val
    return out


def _trials(args, default: int) -> int:
    return default if args.trials is None else args.trials


def _dim_check(inst) -> dict:
    exact = dimension_is_exact(inst.spec)
    ok = (inst.observed_dim == inst.predicted_dim) if exact else inst.observed_dim <= inst.predicted_dim
    summary = inst.summary()
    return {"predicted_dim": inst.predicted_dim, "observed_dim": inst.observed_dim,
            "relation": "equal" if exact else "at-most", "dimension_ok": ok,
            "vertex_count_ok": summary["vertex_count_ok"],
            "status": "PASS" if ok and summary["vertex_count_ok"] else "FAIL"}


# ----------------------------------------------------------------- commands

def cmd_construct(args, mapper):
    inst = build_instance(args)
    result = _dim_check(inst)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "vertices.csv").write_text(vertices_csv(inst))
        (out / "summary.json").write_text(json.dumps(inst.summary(), sort_keys=True, indent=2) + "\n")
        result["files"] = [str(out / "vertices.csv"), str(out / "summary.json")]
    result["status"] = "PASS"
    return inst, result


def cmd_verify(args, mapper):
    if args.check == "arc":
        return None, _verify_arc(args, mapper)
    inst = build_instance(args)
    if args.check == "dim":
        return inst, _dim_check(inst)
    if args.check == "edges":
        try:
            rep = faces.enumerate_edges(inst, args.cap, mapper)
        except ValueError as exc:
            raise InvalidSpec(str(exc)) from None
        status, checks = faces.edge_report_status(inst, rep)
        return inst, {**rep.to_dict(), **checks, "status": status}
    if args.check == "neighborly":
        if not isinstance(inst.spec, (NeighborlySpec, ClusterSpec)):
            raise InvalidSpec("the neighborly check applies to the neighborly and cluster families")
        try:
            rep = faces.verify_two_neighborly(inst, args.cap, mapper)
        except ValueError as exc:
            raise InvalidSpec(str(exc)) from None
        return inst, rep.to_dict()
    if args.check == "sum-law":
        if not isinstance(inst.spec, DirectSumSpec):
            raise InvalidSpec("the sum-law check needs --family direct-sum")
        try:
            rep = faces.verify_direct_sum_law(inst, _trials(args, 500), args.seed, mapper=mapper)
        except ValueError as exc:
            raise InvalidSpec(str(exc)) from None
        return inst, rep.to_dict()
    raise InvalidSpec(f"unknown check {args.check}")


def _verify_arc(args, mapper) -> dict:
    k = args.k if args.k is not None else 2
    grid = args.grid
    if args.arc_length is None:
        arc = faces.arc_length_limit(k) - (0.05 if k == 2 else 0.0)
    else:
        arc = args.arc_length
    size = args.subset_size or k
    try:
        rep = faces.arc_face_property(k, grid, arc, size, _trials(args, 200), args.seed, mapper)
    except ValueError as exc:
        raise InvalidSpec(str(exc)) from None
    return rep.to_dict()


def cmd_estimate(args, mapper):
    inst = build_instance(args)
    size = args.tuple_size
    if size is None:
        size = inst.spec.k if isinstance(inst.spec, (ManyFacesSpec, DirectSumSpec)) else 2
    try:
        rep = faces.estimate_face_fraction(inst, size, _trials(args, 1000), args.seed,
                                           args.mode, mapper, args.cap)
    except ValueError as exc:
        raise InvalidSpec(str(exc)) from None
    return inst, rep.to_dict()


def cmd_recover(args, mapper):
    inst = build_instance(args)
    code = recovery.build_code(inst, args.rank_tol)
    try:
        model = recovery.CorruptionModel(args.k_errors, args.signs, 1.0,
                                         tuple(args.magnitude_range) if args.magnitude_range else None,
                                         args.seed)
    except ValueError as exc:
        raise InvalidSpec(str(exc)) from None
    if model.k > code.length:
        raise InvalidSpec(f"--k-errors {model.k} exceeds the code length {code.length}")
    trials = 100 if args.trials is None else args.trials
    campaign = recovery.run_campaign(code, model, inst, trials, mapper)
    result = campaign.to_dict()
    if code.degenerate:
        print("warning: code has kernel dimension 0; trials skipped", file=sys.stderr)
        result["warning"] = "degenerate code: kernel dimension 0"
    if args.baseline and not code.degenerate:
        base = recovery.random_gaussian_code(code.length, code.redundancy, args.seed)
        result["baseline"] = recovery.run_campaign(base, model, None, trials, mapper).to_dict()
    if args.csv:
        write_trials_csv(args.csv, campaign.results)
    return inst, result


def write_trials_csv(path, results):
    fields = ["trial", "status", "support", "signs", "recovered", "face_condition",
              "consistent", "error_inf", "decoded_l1", "codeword_l1"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fields)
        for r in results:
            d = r.to_dict()
            row = []
            for f in fields:
                v = d[f]
                if isinstance(v, list):
                    v = " ".join(str(x) for x in v)
                elif isinstance(v, float):
                    v = fmt(v)
                row.append("" if v is None else v)
            w.writerow(row)


def cmd_export(args, mapper):
    inst = build_instance(args)
    text = export(inst, args.format, args.redundant)
    if args.out:
        Path(args.out).write_text(text)
        return inst, {"status": "PASS", "format": args.format, "file": args.out}
    sys.stdout.write(text)
    return inst, None


# ------------------------------------------------------------------ parsing

def _seed(text: str) -> int:
    val = int(text)
    if not 0 <= val < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return val


def _positive(text: str) -> int:
    val = int(text)
    if val <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return val


def _non_negative(text: str) -> int:
    val = int(text)
    if val < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return val


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("construction")
    g.add_argument("--family", choices=FAMILIES)
    g.add_argument("--m", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--r", type=int)
    g.add_argument("--s", type=int)
    g.add_argument("--spread", help="within-cluster step as a fraction of a turn, e.g. 1/4000")
    r = common.add_argument_group("run")
    r.add_argument("--seed", type=_seed, default=0)
    r.add_argument("--trials", type=_non_negative)
    r.add_argument("--workers", type=_positive, default=None,
                   help=f"worker processes (default ${WORKERS_ENV} or 1)")
    r.add_argument("--cap", type=_positive, default=faces.DEFAULT_PAIR_CAP,
                   help="maximum oracle calls for exhaustive checks")
    r.add_argument("--rank-tol", type=float, default=DEFAULT_REL_TOL)
    r.add_argument("--no-timings", action="store_true", help="omit the runtime section (timings, worker count) for byte-stable reports")
    r.add_argument("--report", help="also write the JSON report to this path")

    parser = argparse.ArgumentParser(prog="cspoly", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common], help="build an instance")
    p.add_argument("--out", help="directory for vertices.csv and summary.json")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[common], help="run a verification check")
    p.add_argument("--check", required=True, choices=["edges", "neighborly", "dim", "sum-law", "arc"])
    p.add_argument("--grid", type=int, default=100, help="arc check: grid size")
    p.add_argument("--arc-length", type=float, help="arc check: arc length in radians")
    p.add_argument("--subset-size", type=int, help="arc check: points per subset (default k)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("estimate", parents=[common], help="estimate the not-a-face fraction")
    p.add_argument("--tuple-size", type=int, help="vertices per sampled tuple (default: family k, else 2)")
    p.add_argument("--mode", choices=faces.MODES, default="with-replacement")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("recover", parents=[common], help="l1 decoding campaign")
    p.add_argument("--k-errors", type=_non_negative, default=2)
    p.add_argument("--signs", choices=["random", "fixed"], default="random")
    p.add_argument("--magnitude-range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--baseline", action="store_true", help="also run a Gaussian random code")
    p.add_argument("--csv", help="per-trial CSV output path")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("export", parents=[common], help="export vertices")
    p.add_argument("--format", choices=["csv", "vrep", "json"], required=True)
    p.add_argument("--redundant", action="store_true", help="stacked embedding with repeated coordinates")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers is None:
        args.workers = default_workers()
    start = time.perf_counter()
    try:
        with worker_pool(args.workers) as mapper:
            inst, result = args.func(args, mapper)
    except InvalidSpec as exc:
        print(f"cspoly: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if result is None:
        return EXIT_OK
    status = result.get("status", "PASS")
    report = {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "command": args.command,
        "config": config_echo(args),
        "tolerances": tolerances(args),
        "instance": None if inst is None else inst.summary(),
        "result": result,
        "status": status,
    }
    if not args.no_timings:
        report["runtime"] = {"seconds": time.perf_counter() - start, "workers": args.workers}
    text = json.dumps(report, sort_keys=True, indent=2, default=_json_default) + "\n"
    sys.stdout.write(text)
    if args.report:
        Path(args.report).write_text(text)
    return STATUS_EXIT.get(status, EXIT_FAIL)


def _json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


if __name__ == "__main__":
    sys.exit(main())
