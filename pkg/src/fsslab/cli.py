"""Command line entry point.

Exit status: 0 when every check passes, 1 on a property failure or runtime
error, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import metadata

from .errors import FSSError
from .lab import (
    Sampler,
    SearchConfig,
    bound_table,
    bounds_csv,
    estimate_lipschitz,
)
from .metric import Space
from .retractions import (
    CANDIDATES,
    candidate,
    identity_map,
    induced,
    radial_map,
    scaling_map,
)
from .subsets import FiniteSubset, circle_k_cover, exact_kcenter, hausdorff
from .verify import SUITES, run_suite

MAPS = ("identity", "scale2", "radial", *CANDIDATES)


class UsageError(Exception):
    pass


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write(path: str, text: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _read_subset(path: str) -> FiniteSubset:
    with open(path, encoding="utf-8") as fh:
        return FiniteSubset.from_json(json.load(fh))


def cmd_verify(args) -> int:
    checks = run_suite(args.suite, args.seed, args.tol, args.trials)
    failed = [c for c in checks if not c.passed]
    for c in checks:
        vals = ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                         for k, v in c.measured.items())
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  [{vals}]")
    print(f"{args.suite}: {len(checks) - len(failed)}/{len(checks)} checks passed (seed={args.seed})")
    for c in failed:
        if c.witness is not None:
            print(f"witness for {c.name!r}: {json.dumps(c.witness, sort_keys=True)}")
    if args.out:
        _write(args.out, _dump({
            "command": ["verify", args.suite],
            "seed": args.seed,
            "tol": args.tol,
            "trials": args.trials,
            "version": _version(),
            "passed": not failed,
            "checks": [c.to_json() for c in checks],
        }))
    return 1 if failed else 0


def cmd_bounds(args) -> int:
    if not (2 <= args.n_min <= args.n_max):
        raise UsageError(f"need 2 <= n-min <= n-max, got {args.n_min} and {args.n_max}")
    rows = bound_table(args.n_min, args.n_max, args.all_k)
    if args.out:
        if args.format == "json":
            text = _dump([r.to_json() for r in rows])
        else:
            text = bounds_csv(rows)
        _write(args.out, text)
    print(f"{len(rows)} rows for n in [{args.n_min}, {args.n_max}]"
          + (" and all k < n" if args.all_k else " with k = n - 1"))
    last = rows[-1]
    print(f"n={last.n} k={last.k}: lb_normed={last.lb_normed:.6f} lb_hilbert={last.lb_hilbert:.6f}")
    return 0


def build_estimate(name: str, space: Space, n: int, rho: float, mode: str):
    """Subset map and matching domain sampler for ``fsslab estimate``."""
    if name == "identity":
        return induced(identity_map(space)), Sampler(space, n, mode=mode)
    if name == "scale2":
        return induced(scaling_map(space, 2.0)), Sampler(space, n, mode=mode)
    if name == "radial":
        if space.kind != "euclidean":
            raise UsageError("radial needs a euclidean space")
        g = radial_map(space.d, rho)
        accept = lambda x: math.sqrt(sum(v * v for v in x)) >= rho  # noqa: E731
        return induced(g), Sampler(space, n, mode=mode, accept=accept)
    r = candidate(name, space, n)
    if name in ("normalized", "truncated"):
        return r, Sampler(r.space, r.n, min_size=2, mode=mode, pins=(0.0, 1.0))
    return r, Sampler(r.space, r.n, mode=mode)


def cmd_estimate(args) -> int:
    try:
        space = Space.parse(args.space)
    except FSSError as exc:
        raise UsageError(f"bad --space {args.space!r}: {exc}") from exc
    n = args.n if args.n is not None else (1 if args.map == "radial" else 4)
    subset_map, sampler = build_estimate(args.map, space, n, args.rho, args.sampler)
    config = SearchConfig(seed=args.seed, trials=args.trials, steps=args.steps)
    cert = estimate_lipschitz(subset_map, sampler, config, workers=args.workers)
    print(f"{cert.map_name} on {sampler.space} (n={n}, {args.sampler}): "
          f"Lip >= {cert.ratio:.9g}  [d_in={cert.input_distance:.6g}, d_out={cert.output_distance:.6g}]")
    if args.out:
        _write(args.out, _dump(cert.to_json()))
    return 0


def cmd_cover(args) -> int:
    A = _read_subset(args.input)
    B = circle_k_cover(A, args.k)
    n = len(A)
    bound = math.pi * (n - 1) / (args.k * n) if n > args.k else 0.0
    dist = hausdorff(A, B)
    print(f"{len(B)} arc midpoints; d_H = {dist:.9g} (bound {bound:.9g})")
    if args.out:
        out = B.to_json()
        out["hausdorff"] = dist
        out["bound"] = bound
        _write(args.out, _dump(out))
    return 0


def cmd_kcenter(args) -> int:
    A = _read_subset(args.input)
    res = exact_kcenter(A, args.k)
    print(f"{len(res.centers)} centers; radius = {res.radius:.9g}")
    if args.out:
        _write(args.out, _dump(res.to_json()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fsslab",
        description="Finite subset spaces, Hausdorff distance and Lipschitz retraction experiments.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = ap.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("verify", help="run a named property suite", formatter_class=fmt)
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--trials", type=int, default=1000, help="random samples per check")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", help="tabulate theoretical bounds", formatter_class=fmt)
    p.add_argument("--n-min", type=int, default=4)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--all-k", action="store_true", help="emit every k < n, not just k = n - 1")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="write the table here")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("estimate", help="search for a Lipschitz certificate", formatter_class=fmt)
    p.add_argument("--map", choices=MAPS, default="merge")
    p.add_argument("--space", default="interval:0:1", help="e.g. euclidean:2, pnorm:2:inf, circle, tripod:1:1:1")
    p.add_argument("--n", type=int, help="domain cardinality cap (default 4, or 1 for radial)")
    p.add_argument("--sampler", choices=("uniform", "clustered"), default="clustered")
    p.add_argument("--rho", type=float, default=0.5, help="inner radius for the radial map")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--steps", type=int, default=200, help="hill-climbing steps per scale")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="write the certificate JSON here")
    p.set_defaults(func=cmd_estimate)

    for name, func, helptext in (
        ("cover", cmd_cover, "circle k-cover of a JSON point set"),
        ("kcenter", cmd_kcenter, "exact k-center of a JSON point set"),
    ):
        p = sub.add_parser(name, help=helptext, formatter_class=fmt)
        p.add_argument("--input", required=True, help="FiniteSubset JSON file")
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--out", help="write the result JSON here")
        p.set_defaults(func=func)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"fsslab: error: {exc}", file=sys.stderr)
        return 2
    except (FSSError, OSError, ValueError, KeyError) as exc:
        print(f"fsslab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
