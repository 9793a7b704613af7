"""Command-line front end.

Every subcommand that writes a result file also writes a ``.manifest.json``
next to it recording the exact argv, configuration, seed, timestamps and
output digests; re-running the recorded argv reproduces the results bitwise.

Exit codes: 0 success, 2 usage error (including malformed input files),
3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from dataclasses import asdict

import numpy as np

from . import __version__
from .constructions import (
    amin_table,
    critical_a_search,
    n5_symmetric_set,
    sphere_points_general_position,
    star_states,
    tetra_states,
)
from .core import (
    Partition,
    StateSet,
    load_state_set,
    save_state_set,
    state_set_to_dict,
)
from .criterion import SubsetReport, scan_permutations, scan_subsets
from .errors import AesetError
from .optimizer import OptimizerConfig, minimize_total_entropy
from .rng import RunSeed
from .separability import disentangling_unitary, is_fully_product, unitary_to_dict
from .volume import estimate_volume, estimate_volume_lower

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

_STAR_ALIASES = {"star", "theorem4", "eq1"}
_TETRA_ALIASES = {"tetra", "theorem2"}


def _parse_partition(text: str) -> Partition:
    try:
        return Partition(tuple(int(tok) for tok in text.lower().split("x")))
    except (ValueError, AesetError) as exc:
        raise argparse.ArgumentTypeError(f"bad partition {text!r}: {exc}")


def _seed_arg(args) -> RunSeed:
    if args.seed is None:
        seed = RunSeed(int(time.time_ns()) & ((1 << 64) - 1))
        print(f"generated seed: {seed.seed}", file=sys.stderr)
        return seed
    return RunSeed(args.seed)


def _digest(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _write_manifest(out_path, argv, config: dict, seed, started: float) -> None:
    manifest = {
        "argv": list(argv),
        "config": config,
        "seed": None if seed is None else {"seed": seed.seed, "stream": seed.stream},
        "started_unix": started,
        "finished_unix": time.time(),
        "version": __version__,
        "outputs": {str(out_path): _digest(out_path)},
    }
    with open(str(out_path) + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)


def _emit(payload: dict, args, argv, seed=None, started=None, config=None) -> None:
    text = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        _write_manifest(args.out, argv, config or {}, seed, started or time.time())
    if args.json or not args.out:
        print(text)


def _verdict_payload(verdict) -> dict:
    return {
        "detected": bool(verdict.detected),
        "permutation": list(verdict.permutation),
        "c": verdict.c,
        "L": "inf" if math.isinf(verdict.L) else verdict.L,
        "threshold": verdict.threshold,
    }


def _load_states(path) -> StateSet:
    try:
        return load_state_set(path)
    except json.JSONDecodeError as exc:
        raise _UsageError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")
    except (OSError, KeyError, TypeError, AesetError) as exc:
        raise _UsageError(f"{path}: {exc}")


class _UsageError(Exception):
    pass


def _cmd_check(args, argv) -> int:
    started = time.time()
    states = _load_states(args.states)
    if states.n_states > 4:
        reports = scan_subsets(states)
    else:
        reports = [SubsetReport((0, 1, 2, 3), scan_permutations(states))]
    payload = {
        "n_states": states.n_states,
        "subsets": [
            {"indices": list(r.subset_indices), "verdict": _verdict_payload(r.verdict)}
            for r in reports
        ],
        "any_detected": any(r.verdict.detected for r in reports),
        "all_subsets_certified": all(r.verdict.detected for r in reports),
    }
    if args.optimize:
        seed = _seed_arg(args)
        p = args.partition or Partition((2, 2))
        result = minimize_total_entropy(states, p, OptimizerConfig(seed=seed))
        payload["optimizer"] = {
            "min_total_entropy": result.min_total_entropy,
            "classified_aes": result.classified_aes,
            "entropy_band_warning": result.entropy_band_warning,
        }
    _emit(payload, args, argv, started=started)
    return EXIT_OK


def _cmd_construct(args, argv) -> int:
    started = time.time()
    family = args.family.lower()
    seed = None
    if family in _STAR_ALIASES:
        if args.partition is None or args.a is None:
            raise _UsageError("star needs --partition and --a")
        states = star_states(args.partition, args.a)
        config = {"family": "star", "partition": str(args.partition), "a": args.a}
    elif family in _TETRA_ALIASES:
        if args.a is None:
            raise _UsageError("tetra needs --a (and optionally --n, --seed, --tol)")
        seed = _seed_arg(args)
        pts = sphere_points_general_position(args.n or 4, seed, args.tol)
        states = tetra_states(pts, args.a)
        config = {"family": "tetra", "n": pts.n_points, "a": args.a, "tol": args.tol}
    elif family == "n5":
        if args.b is None:
            raise _UsageError("n5 needs --b")
        states = n5_symmetric_set(args.b)
        config = {"family": "n5", "b": args.b}
    else:
        raise _UsageError(f"unknown family {args.family!r}")
    if args.out:
        save_state_set(states, args.out)
        _write_manifest(args.out, argv, config, seed, started)
    if args.json or not args.out:
        print(json.dumps(state_set_to_dict(states)))
    return EXIT_OK


def _cmd_amin_table(args, argv) -> int:
    started = time.time()
    table = amin_table(args.d)
    rows = []
    for r in table.rows:
        rows.append({
            "partition": str(r.partition),
            "N": r.n_states,
            "D": list(r.D),
            "terms": list(r.terms),
            "amin_max": r.amin_max,
            "amin_min": r.amin_min,
        })
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["partition", "N", "D", "terms", "amin_max", "amin_min"])
            for row in rows:
                writer.writerow([
                    row["partition"], row["N"],
                    ";".join(f"{x:.12g}" for x in row["D"]),
                    ";".join(f"{x:.12g}" for x in row["terms"]),
                    f"{row['amin_max']:.12g}", f"{row['amin_min']:.12g}",
                ])
            writer.writerow(["all", table.all_n_states, "", "",
                             f"{table.all_amin_max:.12g}", f"{table.all_amin_min:.12g}"])
        _write_manifest(args.out, argv, {"d": args.d}, None, started)
    payload = {"d": args.d, "rows": rows,
               "all": {"N": table.all_n_states,
                       "amin_max": table.all_amin_max,
                       "amin_min": table.all_amin_min}}
    if args.json or not args.out:
        print(json.dumps(payload, indent=2))
    return EXIT_OK


def _cmd_volume(args, argv) -> int:
    started = time.time()
    seed = _seed_arg(args)
    if args.method == "lower":
        est = estimate_volume_lower(args.partition, args.n, args.samples, seed,
                                    workers=args.workers)
    else:
        cfg = OptimizerConfig(restarts=args.restarts, seed=seed)
        est = estimate_volume(args.partition, args.n, args.samples, seed,
                              cfg=cfg, workers=args.workers)
    payload = {
        "partition": str(est.partition),
        "n": est.n_states,
        "samples": est.samples,
        "detected": est.detected,
        "fraction": est.fraction,
        "stddev_counts": est.stddev_counts,
        "method": est.method,
        "seed": {"seed": seed.seed, "stream": seed.stream},
    }
    if args.csv:
        new = not _exists_nonempty(args.csv)
        with open(args.csv, "a", newline="") as fh:
            writer = csv.writer(fh)
            if new:
                writer.writerow(["partition", "n", "samples", "detected",
                                 "fraction", "stddev_counts", "method", "seed"])
            writer.writerow([payload["partition"], est.n_states, est.samples,
                             est.detected, est.fraction, est.stddev_counts,
                             est.method, seed.seed])
    _emit(payload, args, argv, seed=seed, started=started,
          config={"method": args.method, "samples": args.samples, "workers": args.workers})
    return EXIT_OK


def _exists_nonempty(path) -> bool:
    try:
        with open(path) as fh:
            return bool(fh.read(1))
    except OSError:
        return False


def _cmd_minimize(args, argv) -> int:
    started = time.time()
    states = _load_states(args.states)
    seed = _seed_arg(args)
    cfg = OptimizerConfig(restarts=args.restarts, max_iterations=args.max_iterations,
                          seed=seed)
    result = minimize_total_entropy(states, args.partition, cfg)
    payload = {
        "min_total_entropy": result.min_total_entropy,
        "classified_aes": result.classified_aes,
        "entropy_band_warning": result.entropy_band_warning,
        "restarts_used": result.restarts_used,
        "iterations_used": result.iterations_used,
        "converged": result.converged,
        "best_params": [float(x) for x in result.best_params],
    }
    _emit(payload, args, argv, seed=seed, started=started, config=_cfg_dict(cfg))
    return EXIT_OK


def _cfg_dict(cfg: OptimizerConfig) -> dict:
    data = asdict(cfg)
    data["seed"] = {"seed": cfg.seed.seed, "stream": cfg.seed.stream}
    return data


def _cmd_disentangle(args, argv) -> int:
    started = time.time()
    states = _load_states(args.states)
    u = disentangling_unitary(states, args.partition)
    img = u.apply_set(states)
    residuals = [float(is_fully_product(img.state(i), args.partition).residual)
                 for i in range(states.n_states)]
    payload = {"unitary": unitary_to_dict(u), "residuals": residuals}
    _emit(payload, args, argv, started=started,
          config={"partition": str(args.partition)})
    return EXIT_OK


def _cmd_critical_a(args, argv) -> int:
    started = time.time()
    family_name = args.family.lower()
    seed = None
    if family_name == "n5":
        family = n5_symmetric_set
        config = {"family": "n5"}
    elif family_name in _STAR_ALIASES:
        p = args.partition or Partition((2, 2))
        if p.product != 4:
            raise _UsageError("the criterion search needs a dimension-4 family")
        family = lambda a: star_states(p, a)
        config = {"family": "star", "partition": str(p)}
    elif family_name in _TETRA_ALIASES:
        seed = _seed_arg(args)
        pts = sphere_points_general_position(args.n or 4, seed, args.tol)
        family = lambda a: tetra_states(pts, a)
        config = {"family": "tetra", "n": pts.n_points, "tol": args.tol}
    else:
        raise _UsageError(f"unknown family {args.family!r}")
    subsets = None
    if args.subset:
        subsets = [tuple(int(tok) for tok in args.subset.split(","))]
    report = critical_a_search(family, subsets=subsets, resolution=args.resolution)
    payload = {
        "resolution": report.resolution,
        "per_subset": {",".join(map(str, k)): v for k, v in report.per_subset.items()},
        "overall": report.overall,
    }
    _emit(payload, args, argv, seed=seed, started=started, config=config)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aeset",
        description="Construct, detect and measure absolutely entangled sets of pure states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common_out(sp):
        sp.add_argument("--out", help="write the result to this file (plus a manifest)")
        sp.add_argument("--json", action="store_true",
                        help="always print machine-readable JSON to stdout")

    sp = sub.add_parser("check", help="run the criterion scan on a state-set file")
    sp.add_argument("--states", required=True)
    sp.add_argument("--partition", type=_parse_partition, default=None)
    sp.add_argument("--optimize", action="store_true",
                    help="also run the entropy minimizer")
    sp.add_argument("--seed", type=int, default=None)
    common_out(sp)
    sp.set_defaults(func=_cmd_check)

    sp = sub.add_parser("construct", help="emit a state-set JSON for a known family")
    sp.add_argument("family", help="star (theorem4/eq1) | tetra (theorem2) | n5")
    sp.add_argument("--partition", type=_parse_partition, default=None)
    sp.add_argument("--a", type=float, default=None)
    sp.add_argument("--b", type=float, default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--tol", type=float, default=1e-3)
    sp.add_argument("--seed", type=int, default=None)
    common_out(sp)
    sp.set_defaults(func=_cmd_construct)

    sp = sub.add_parser("amin-table", help="threshold table over all partitions of d")
    sp.add_argument("--d", type=int, required=True)
    common_out(sp)
    sp.set_defaults(func=_cmd_amin_table)

    sp = sub.add_parser("volume", help="Monte-Carlo relative-volume estimate")
    sp.add_argument("--partition", type=_parse_partition, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, required=True)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--method", choices=["lower", "full"], default="full")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--restarts", type=int, default=5)
    sp.add_argument("--csv", help="append a summary row to this CSV")
    common_out(sp)
    sp.set_defaults(func=_cmd_volume)

    sp = sub.add_parser("minimize", help="minimize total entanglement entropy")
    sp.add_argument("--states", required=True)
    sp.add_argument("--partition", type=_parse_partition, required=True)
    sp.add_argument("--restarts", type=int, default=5)
    sp.add_argument("--max-iterations", type=int, default=500)
    sp.add_argument("--seed", type=int, default=None)
    common_out(sp)
    sp.set_defaults(func=_cmd_minimize)

    sp = sub.add_parser("disentangle", help="construct a unitary making a small set product")
    sp.add_argument("--states", required=True)
    sp.add_argument("--partition", type=_parse_partition, required=True)
    common_out(sp)
    sp.set_defaults(func=_cmd_disentangle)

    sp = sub.add_parser("critical-a", help="bisect for the detection threshold of a family")
    sp.add_argument("--family", required=True)
    sp.add_argument("--partition", type=_parse_partition, default=None)
    sp.add_argument("--subset", default=None, help="comma-separated 0-based indices")
    sp.add_argument("--resolution", type=float, default=1e-3)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--tol", type=float, default=1e-3)
    sp.add_argument("--seed", type=int, default=None)
    common_out(sp)
    sp.set_defaults(func=_cmd_critical_a)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0,) else 0
    try:
        return args.func(args, ["aeset"] + argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AesetError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except np.linalg.LinAlgError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
