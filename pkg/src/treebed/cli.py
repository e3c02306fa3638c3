"""Command-line surface: embedding, tree queries, exact checks, verification.

Exit codes: 0 success, 1 check failed, 2 usage error, 3 resource/scan limit.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from .core import InvalidParams, validate_params
from .cubes import (
    CubeId,
    ResourceLimit,
    SeparationKind,
    separation_verdict,
    verify_covering_level0,
)
from .embedding import NORMS, embed
from .hyperbolic import DistanceOverflow, HoroPoint, hyp_distance
from .tree import ScanExhausted, export_subtree, tree_distance
from .verifier import (
    Region,
    SamplePlan,
    count_violations,
    evaluate_pairs,
    fit_qi_constants,
    sample_pairs,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_LIMIT = 3


class _UsageError(ValueError):
    pass


def _parse_cube(text: str) -> CubeId:
    try:
        parts = [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise _UsageError(f"bad cube id {text!r}: {exc}") from exc
    if len(parts) < 3:
        raise _UsageError(f"cube id needs c,k,g1[,g2,...], got {text!r}")
    return CubeId(parts[0], parts[1], tuple(parts[2:]))


def _parse_point(text: str, n: int) -> HoroPoint:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise _UsageError(f"bad point {text!r}: {exc}") from exc
    if len(vals) != n + 1:
        raise _UsageError(f"point needs t,x1..x{n}, got {text!r}")
    return HoroPoint(vals[0], tuple(vals[1:]))


def _parse_region(text: str) -> Region:
    try:
        t_min, t_max, x_radius = (float(v) for v in text.split(","))
        return Region(t_min, t_max, x_radius)
    except ValueError as exc:
        raise _UsageError(f"bad region {text!r}: {exc}") from exc


def _emit(args, payload: dict, plain: str) -> None:
    text = (
        json.dumps(payload, indent=2, sort_keys=True) + "\n"
        if args.json
        else plain + "\n"
    )
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_embed(args) -> int:
    P = validate_params(args.n, args.p)
    point = _parse_point(args.point, P.n)
    doc = embed(P, point).to_json_dict()
    _emit(args, doc, json.dumps(doc, sort_keys=True))
    return EXIT_OK


def _cmd_distance(args) -> int:
    P = validate_params(args.n, args.p)
    z = _parse_point(args.z, P.n)
    w = _parse_point(args.w, P.n)
    d = hyp_distance(P, z, w)
    _emit(args, {"d_hyp": d}, repr(d))
    return EXIT_OK


def _cmd_tree_dist(args) -> int:
    P = validate_params(args.n, args.p)
    u = _parse_cube(args.u)
    v = _parse_cube(args.v)
    d = tree_distance(P, u, v, args.scan_cap)
    _emit(args, {"tree_distance": d}, str(d))
    return EXIT_OK


def _cmd_check_covering(args) -> int:
    P = validate_params(args.n, args.p)
    report = verify_covering_level0(P, cell_budget=args.cell_budget)
    plain = (
        f"covered: {report.covered} "
        f"({report.cells_uncovered}/{report.cells_total} cells uncovered)"
    )
    _emit(args, report.to_json_dict(), plain)
    return EXIT_OK if report.covered else EXIT_CHECK_FAILED


def _cmd_check_separation(args) -> int:
    P = validate_params(args.n, args.p)
    rng = random.Random(args.seed)
    gamma_bound = args.gamma_bound if args.gamma_bound is not None else P.p**3
    counts = {kind: 0 for kind in SeparationKind}
    witness = None
    for _ in range(args.samples):
        k1 = k2 = args.level_min
        while k1 == k2:
            k1 = rng.randint(args.level_min, args.level_max)
            k2 = rng.randint(args.level_min, args.level_max)
        lo_k, hi_k = min(k1, k2), max(k1, k2)
        c = rng.randint(0, P.n)
        low = CubeId(c, lo_k, tuple(rng.randint(-gamma_bound, gamma_bound) for _ in range(P.n)))
        high = CubeId(c, hi_k, tuple(rng.randint(-gamma_bound, gamma_bound) for _ in range(P.n)))
        verdict = separation_verdict(P, low, high)
        counts[verdict.kind] += 1
        if verdict.kind is SeparationKind.VIOLATION and witness is None:
            witness = {"low": low.key(), "high": high.key(), "witness": str(verdict.witness)}
    violations = counts[SeparationKind.VIOLATION]
    doc = {
        "samples": args.samples,
        "disjoint_far": counts[SeparationKind.DISJOINT_FAR],
        "nested_deep": counts[SeparationKind.NESTED_DEEP],
        "violations": violations,
        "witness": witness,
    }
    _emit(args, doc, f"violations: {violations}/{args.samples}")
    return EXIT_OK if violations == 0 else EXIT_CHECK_FAILED


def _cmd_verify(args) -> int:
    P = validate_params(args.n, args.p)
    region = _parse_region(args.region) if args.region else None
    plan = SamplePlan(
        region=region
        or Region(-4.0, 4.0, float(P.p**4)),
        count=args.samples,
        strategy=args.strategy,
        seed=args.seed,
    )
    report = evaluate_pairs(
        P,
        sample_pairs(P, plan),
        norm=args.norm,
        scan_cap=args.scan_cap,
        threads=args.threads,
        plan=plan,
    )
    fitted = fit_qi_constants(report)
    text = fitted.to_json()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(fitted.to_csv())
    print(
        f"fitted l={fitted.l} m={fitted.m} violations={fitted.violations} "
        f"runtime_ms={fitted.runtime_ms:.1f}",
        file=sys.stderr,
    )
    return EXIT_OK if fitted.violations == 0 else EXIT_CHECK_FAILED


def _cmd_export_subtree(args) -> int:
    P = validate_params(args.n, args.p)
    ids = [_parse_cube(t) for t in args.id or []]
    if args.ids_file:
        with open(args.ids_file) as fh:
            ids.extend(
                _parse_cube(line.strip())
                for line in fh
                if line.strip() and not line.startswith("#")
            )
    if not ids:
        raise _UsageError("no cube ids given (use --id or --ids-file)")
    doc = export_subtree(P, ids, fmt=args.format, scan_cap=args.scan_cap)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(doc)
    else:
        sys.stdout.write(doc)
    return EXIT_OK


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--n", type=int, required=True, help="horosphere dimension")
    sp.add_argument("--p", type=int, required=True, help="subdivision factor")
    sp.add_argument("--json", action="store_true", help="emit JSON")
    sp.add_argument("--output", help="write the primary output to a file")
    sp.add_argument("--scan-cap", type=int, default=64, dest="scan_cap")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="treebed",
        description="Tree-product embedding of rescaled hyperbolic space: "
        "queries, exact checks and distortion verification.",
    )
    ap.add_argument("--config", help="JSON file with flag defaults; flags win")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("embed", help="embed a point (t,x1,..)")
    _add_common(sp)
    sp.add_argument("--point", required=True, help="t,x1[,x2,...]")
    sp.set_defaults(fn=_cmd_embed)

    sp = sub.add_parser("distance", help="hyperbolic distance of two points")
    _add_common(sp)
    sp.add_argument("--z", required=True, help="t,x1[,x2,...]")
    sp.add_argument("--w", required=True, help="t,x1[,x2,...]")
    sp.set_defaults(fn=_cmd_distance)

    sp = sub.add_parser("tree-dist", help="hop distance of two cubes")
    _add_common(sp)
    sp.add_argument("--u", required=True, help="c,k,g1[,g2,...]")
    sp.add_argument("--v", required=True, help="c,k,g1[,g2,...]")
    sp.set_defaults(fn=_cmd_tree_dist)

    sp = sub.add_parser("check-covering", help="exact level-0 covering check")
    _add_common(sp)
    sp.add_argument("--cell-budget", type=int, default=1_000_000)
    sp.set_defaults(fn=_cmd_check_covering)

    sp = sub.add_parser("check-separation", help="randomized exact separation check")
    _add_common(sp)
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--level-min", type=int, default=-3)
    sp.add_argument("--level-max", type=int, default=4)
    sp.add_argument("--gamma-bound", type=int, default=None)
    sp.set_defaults(fn=_cmd_check_separation)

    sp = sub.add_parser("verify", help="distortion pipeline, JSON report")
    _add_common(sp)
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--region", help="t_min,t_max,x_radius")
    sp.add_argument("--strategy", default="uniform")
    sp.add_argument("--norm", default="l1", choices=NORMS)
    sp.add_argument("--csv", help="also write per-pair rows to this CSV file")
    sp.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("TREEBED_THREADS", "1")),
    )
    sp.set_defaults(fn=_cmd_verify)

    sp = sub.add_parser("export-subtree", help="DOT/JSON subtree spanning ids")
    _add_common(sp)
    sp.add_argument("--id", action="append", help="c,k,g1[,g2,...]; repeatable")
    sp.add_argument("--ids-file", help="file with one cube id per line")
    sp.add_argument("--format", default="dot", choices=("dot", "json"))
    sp.set_defaults(fn=_cmd_export_subtree)
    return ap


def _apply_config(argv: list[str]) -> list[str]:
    # Flags win over config values: config entries are prepended as defaults
    # right after the subcommand token.
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise _UsageError("--config needs a file path")
    path = argv[i + 1]
    with open(path) as fh:
        conf = json.load(fh)
    extra: list[str] = []
    for key, value in conf.items():
        flag = "--" + key.replace("_", "-")
        if flag in argv:
            continue
        if isinstance(value, bool):
            if value:
                extra.append(flag)
        else:
            extra.extend([flag, str(value)])
    rest = argv[:i] + argv[i + 2 :]
    if not rest:
        return rest
    return [rest[0]] + extra + rest[1:]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        if "--config" in argv:
            argv = _apply_config(argv)
        args = ap.parse_args(argv)
        return args.fn(args)
    except (_UsageError, InvalidParams, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceLimit, ScanExhausted, DistanceOverflow) as exc:
        print(f"limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
