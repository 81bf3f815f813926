"""Empirical Lipschitz lower bounds, displacement checks and theoretical bound tables."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DegenerateInput,
    DegeneratePair,
    DomainError,
    InvalidConfiguration,
    InvalidInput,
    SearchFailure,
)
from .metric import Space
from .subsets import FiniteSubset, exact_kcenter, hausdorff, iterated_reduction

# errors that mean "this proposal left the map's domain", not a bug
_REJECT = (DomainError, InvalidConfiguration, DegenerateInput, DegeneratePair)


@dataclass(frozen=True)
class LipschitzCertificate:
    """A pair (A, B) witnessing Lip(map) >= ratio."""

    map_name: str
    A: FiniteSubset
    B: FiniteSubset
    input_distance: float
    output_distance: float
    ratio: float
    seed: int | None = None
    config: dict | None = None

    def pair_key(self) -> str:
        return json.dumps([self.A.to_json(), self.B.to_json()], sort_keys=True)

    def replay(self, subset_map) -> LipschitzCertificate:
        return lipschitz_ratio(subset_map, self.A, self.B)

    def to_json(self) -> dict:
        return {
            "map": self.map_name,
            "A": self.A.to_json(),
            "B": self.B.to_json(),
            "input_distance": self.input_distance,
            "output_distance": self.output_distance,
            "ratio": self.ratio,
            "seed": self.seed,
            "config": self.config,
        }

    @classmethod
    def from_json(cls, obj: dict) -> LipschitzCertificate:
        return cls(
            obj["map"],
            FiniteSubset.from_json(obj["A"]),
            FiniteSubset.from_json(obj["B"]),
            obj["input_distance"],
            obj["output_distance"],
            obj["ratio"],
            obj.get("seed"),
            obj.get("config"),
        )


def lipschitz_ratio(subset_map, A: FiniteSubset, B: FiniteSubset) -> LipschitzCertificate:
    d_in = hausdorff(A, B)
    if d_in == 0:
        raise DegeneratePair("A and B coincide")
    d_out = hausdorff(subset_map(A), subset_map(B))
    return LipschitzCertificate(subset_map.name, A, B, d_in, d_out, d_out / d_in)


def _better(a: LipschitzCertificate | None, b: LipschitzCertificate | None):
    """Deterministic incumbent merge: larger ratio, then smaller serialized pair."""
    if a is None:
        return b
    if b is None:
        return a
    if b.ratio != a.ratio:
        return b if b.ratio > a.ratio else a
    return b if b.pair_key() < a.pair_key() else a


@dataclass(frozen=True)
class SearchConfig:
    seed: int = 0
    trials: int = 1000
    steps: int = 200
    scales: tuple = (0.1, 0.03, 0.01, 0.003, 0.001)

    def __post_init__(self):
        if not (0 <= self.seed < 2**64):
            raise InvalidInput("seed must be a 64-bit unsigned integer")
        if self.trials < 1 or self.steps < 0:
            raise InvalidInput("trials must be positive and steps nonnegative")
        if any(s <= 0 for s in self.scales):
            raise InvalidInput("perturbation scales must be positive")

    def to_json(self) -> dict:
        d = asdict(self)
        d["scales"] = list(self.scales)
        return d


@dataclass(frozen=True)
class Sampler:
    """Seeded generator of subsets (and pairs of subsets) of ``space``.

    ``mode="clustered"`` plants a near-coincident pair in A and pairs it with a
    small perturbation of itself.  ``pins`` are always present and never moved;
    ``accept`` restricts individual points (e.g. to an annulus).
    """

    space: Space
    max_size: int
    min_size: int = 1
    mode: str = "uniform"
    pins: tuple = ()
    accept: Callable | None = field(default=None, repr=False)
    near: float = 1e-3
    max_tries: int = 10_000

    def __post_init__(self):
        if self.mode not in ("uniform", "clustered"):
            raise InvalidInput(f"unknown sampler mode {self.mode!r}")
        if not (1 <= self.min_size <= self.max_size) or len(self.pins) > self.max_size:
            raise InvalidInput("inconsistent sampler sizes")

    @property
    def diameter(self) -> float:
        return self.space.sample_diameter

    def _ok(self, x) -> bool:
        return self.accept is None or bool(self.accept(x))

    def point(self, rng):
        for _ in range(self.max_tries):
            x = self.space.sample_point(rng)
            if self._ok(x):
                return x
        raise SearchFailure("sampler could not produce an admissible point")

    def subset(self, rng, size: int | None = None) -> FiniteSubset:
        lo = max(self.min_size, len(self.pins))
        m = int(rng.integers(lo, self.max_size + 1)) if size is None else size
        pts = [self.space.point(x) for x in self.pins]
        pts += [self.point(rng) for _ in range(m - len(pts))]
        if self.mode == "clustered" and m - len(self.pins) >= 2:
            # replace the last free point by a near-copy of another free point
            base = pts[int(rng.integers(len(self.pins), m - 1))]
            twin = self.nudge(base, self.near * self.diameter, rng)
            if twin is not None:
                pts[-1] = twin
        return FiniteSubset.of(self.space, pts)

    def nudge(self, x, scale: float, rng):
        coord = int(rng.integers(self.space.n_coords))
        y = self.space.perturb(x, coord, float(rng.uniform(-scale, scale)))
        return y if self._ok(y) else None

    def pair(self, rng) -> tuple[FiniteSubset, FiniteSubset]:
        A = self.subset(rng)
        if self.mode == "uniform":
            return A, self.subset(rng)
        return A, self.perturb(A, self.near * self.diameter, rng) or A

    def perturb(self, A: FiniteSubset, scale: float, rng) -> FiniteSubset | None:
        """Move one coordinate of one free point of A; None if the move is inadmissible."""
        pinned = {self.space.point(x) for x in self.pins}
        free = [i for i, x in enumerate(A.points) if x not in pinned]
        if not free:
            return None
        i = free[int(rng.integers(len(free)))]
        y = self.nudge(A.points[i], scale, rng)
        if y is None:
            return None
        return FiniteSubset.of(self.space, [*A.points[:i], y, *A.points[i + 1 :]])


def _trial(subset_map, sampler: Sampler, seed: int) -> LipschitzCertificate | None:
    rng = np.random.default_rng(seed)
    A, B = sampler.pair(rng)
    try:
        return lipschitz_ratio(subset_map, A, B)
    except _REJECT:
        return None


def estimate_lipschitz(
    subset_map,
    sampler: Sampler,
    config: SearchConfig = SearchConfig(),
    workers: int = 1,
    trace: list | None = None,
) -> LipschitzCertificate:
    """Best certificate from random pairs followed by one-coordinate hill climbing.

    Trial i draws from its own generator seeded with ``seed ^ i``, so the result
    does not depend on ``workers``.
    """
    seeds = [config.seed ^ i for i in range(config.trials)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            found = list(pool.map(lambda s: _trial(subset_map, sampler, s), seeds))
    else:
        found = [_trial(subset_map, sampler, s) for s in seeds]
    best = None
    for cert in found:
        best = _better(best, cert)
    if best is None:
        raise SearchFailure("no admissible pair with positive distance was sampled")

    rng = np.random.default_rng([config.seed, config.trials])
    for scale in config.scales:
        step_size = scale * sampler.diameter
        for _ in range(config.steps):
            A, B = best.A, best.B
            if rng.integers(2):
                B = sampler.perturb(B, step_size, rng)
            else:
                A = sampler.perturb(A, step_size, rng)
            cand = None
            if A is not None and B is not None:
                try:
                    cand = lipschitz_ratio(subset_map, A, B)
                except _REJECT:
                    pass
            if cand is not None and cand.ratio > best.ratio:
                best = cand
            if trace is not None:
                trace.append(best.ratio)

    return LipschitzCertificate(
        best.map_name, best.A, best.B, best.input_distance, best.output_distance,
        best.ratio, config.seed, config.to_json(),
    )


def distance_to_level(A: FiniteSubset, k: int) -> float:
    """dist_H(A, X(k)): exact on lines and the arclength circle, an upper bound elsewhere."""
    space = A.space
    if space.is_line or (space.kind == "circle" and space.metric == "arclength"):
        return exact_kcenter(A, k).radius
    return hausdorff(A, iterated_reduction(A, k))


def displacement_residual(r, A: FiniteSubset, L: float) -> float:
    """(L + 1) dist_H(A, X(k)) - d_H(r(A), A); negative means L cannot bound Lip(r)."""
    if L < 0:
        raise InvalidInput("claimed Lipschitz bound must be nonnegative")
    return (L + 1.0) * distance_to_level(A, r.k) - hausdorff(r(A), A)


# -- theoretical bounds ------------------------------------------------------

CSV_HEADER = (
    "n", "k", "lb_normed", "lb_hilbert", "lb_hadamard",
    "lb_interval_even", "lb_interval_odd", "ub_hilbert", "ub_hadamard",
)


@dataclass(frozen=True)
class BoundTableRow:
    n: int
    k: int
    lb_normed: float
    lb_hilbert: float
    lb_hadamard: float | None = None
    lb_interval_even: float | None = None
    lb_interval_odd: float | None = None
    ub_hilbert: float | None = None
    ub_hadamard: float | None = None

    def lower_bounds(self) -> list[float]:
        vals = (self.lb_normed, self.lb_hilbert, self.lb_hadamard,
                self.lb_interval_even, self.lb_interval_odd)
        return [v for v in vals if v is not None]

    def upper_bounds(self) -> list[float]:
        return [v for v in (self.ub_hilbert, self.ub_hadamard) if v is not None]

    def csv_fields(self) -> list[str]:
        out = [str(self.n), str(self.k)]
        for name in CSV_HEADER[2:]:
            v = getattr(self, name)
            out.append("" if v is None else f"{v:.6f}")
        return out

    def to_json(self) -> dict:
        return asdict(self)


def theoretical_bounds(n: int, k: int) -> BoundTableRow:
    if n < 2 or not (1 <= k <= n - 1):
        raise InvalidInput(f"need n >= 2 and 1 <= k <= n - 1, got n={n}, k={k}")
    lb_hilbert = k * n / (math.pi * (n - 1)) - 1.0
    lb_normed = k * n / (2.0 * math.pi * (n - 1)) - 0.5
    if k != n - 1:
        return BoundTableRow(n, k, lb_normed, lb_hilbert)
    return BoundTableRow(
        n, k, lb_normed, lb_hilbert,
        lb_hadamard=float(n - 3),
        lb_interval_even=float(n - 2) if n % 2 == 0 else None,
        lb_interval_odd=float(n - 3) if n % 2 == 1 else None,
        ub_hilbert=max(n**1.5, 2.0 * n - 1.0),
        ub_hadamard=max(2.0 * n**2 + math.sqrt(n), 4.0 * n**1.5 + 1.0),
    )


def bound_table(n_min: int, n_max: int, all_k: bool = False) -> list[BoundTableRow]:
    if not (2 <= n_min <= n_max):
        raise InvalidInput(f"need 2 <= n_min <= n_max, got {n_min}, {n_max}")
    rows = []
    for n in range(n_min, n_max + 1):
        ks = range(1, n) if all_k else (n - 1,)
        rows.extend(theoretical_bounds(n, k) for k in ks)
    return rows


def bounds_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow(row.csv_fields())
    return buf.getvalue()


def corollary_bound(n: int, lip_f: float, lip_g: float) -> float:
    """Lower bound (n - 3) / (Lip f * Lip g) transferred from an interval retract."""
    if lip_f <= 0 or lip_g <= 0:
        raise InvalidInput("Lipschitz constants of f and g must be positive")
    if n < 2:
        raise InvalidInput("n must be >= 2")
    return (n - 3) / (lip_f * lip_g)
