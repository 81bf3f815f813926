"""Point maps, induced subset maps, retraction candidates and the interval pipelines."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    DegenerateInput,
    DomainError,
    InvalidComposition,
    InvalidConfiguration,
    InvalidInput,
)
from .metric import DEFAULT_TOL, Space, dual_exponent, pnorm_rows
from .subsets import FiniteSubset, PinnedSpec, pinned_member, reduce_by_one


@dataclass(frozen=True)
class PointMap:
    """A map between the points of two spaces.

    ``lipschitz`` is an analytic upper bound on the Lipschitz constant when one
    is known.
    """

    name: str
    source: Space
    target: Space
    fn: Callable = field(repr=False)
    lipschitz: float | None = None

    def __call__(self, x):
        return self.target.point(self.fn(self.source.point(x)))


def identity_map(space: Space) -> PointMap:
    return PointMap("identity", space, space, lambda x: x, 1.0)


def scaling_map(space: Space, factor: float) -> PointMap:
    """x -> factor * x on a vector space."""
    if not space.is_vector:
        raise InvalidInput("scaling needs a vector space")
    return PointMap(
        f"scale{factor:g}", space, space,
        lambda x: tuple(factor * v for v in x), abs(factor),
    )


def linear_map(space: Space, matrix, name: str = "linear") -> PointMap:
    """x -> M x on Euclidean space; the analytic constant is the spectral norm."""
    M = np.atleast_2d(np.asarray(matrix, dtype=float))
    if not space.is_hilbert or M.shape != (space.d, space.d):
        raise InvalidInput("linear_map needs a square matrix on a Euclidean space")
    op_norm = float(np.linalg.norm(M, 2))
    return PointMap(name, space, space, lambda x: tuple(M @ np.asarray(x)), op_norm)


@dataclass(frozen=True)
class SubsetMap:
    """A map X(n) -> Y(m) evaluated on finite subsets."""

    name: str
    source: Space
    target: Space
    fn: Callable = field(repr=False)

    def __call__(self, A: FiniteSubset) -> FiniteSubset:
        if A.space != self.source:
            raise InvalidInput(f"{self.name} expects subsets of {self.source}")
        return self.fn(A)


@dataclass(frozen=True)
class RetractionCandidate:
    """A map X(n) -> X(k) that is expected to fix every set with at most k points."""

    name: str
    space: Space
    n: int
    k: int
    fn: Callable = field(repr=False)

    def __post_init__(self):
        if not (1 <= self.k < self.n):
            raise InvalidInput(f"need 1 <= k < n, got n={self.n}, k={self.k}")

    @property
    def source(self) -> Space:
        return self.space

    @property
    def target(self) -> Space:
        return self.space

    def __call__(self, A: FiniteSubset) -> FiniteSubset:
        if A.space != self.space:
            raise InvalidInput(f"{self.name} expects subsets of {self.space}")
        if len(A) > self.n:
            raise InvalidInput(f"{self.name} is defined on at most {self.n} points")
        return self.fn(A)


def check_retraction_contract(r: RetractionCandidate, A: FiniteSubset) -> bool:
    out = r(A)
    if len(out) > r.k:
        return False
    return len(A) > r.k or out == A


def induced_map(g: PointMap, A: FiniteSubset) -> FiniteSubset:
    if A.space != g.source:
        raise InvalidInput(f"{g.name} expects points of {g.source}")
    return FiniteSubset.of(g.target, [g(x) for x in A.points])


def induced(g: PointMap) -> SubsetMap:
    return SubsetMap(f"induced:{g.name}", g.source, g.target, lambda A: induced_map(g, A))


def transfer_retraction(
    f: PointMap,
    r: RetractionCandidate,
    g: PointMap,
    samples: int = 64,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> RetractionCandidate:
    """Move a retraction of X(n) onto Y(n) through f: X -> Y and g: Y -> X with f o g = id."""
    if g.target != r.space or f.source != r.space or f.target != g.source:
        raise InvalidComposition("spaces of f, r and g do not compose")
    Y = g.source
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        y = Y.sample_point(rng)
        back = f(g(y))
        if Y.distance(back, y) > tol:
            raise InvalidComposition(f"f(g({y!r})) = {back!r}, not the identity")

    def s(A: FiniteSubset) -> FiniteSubset:
        return induced_map(f, r(induced_map(g, A)))

    return RetractionCandidate(f"transfer:{r.name}", Y, r.n, r.k, s)


def merge_retraction(space: Space, n: int) -> RetractionCandidate:
    """Heuristic X(n) -> X(n-1): merge the closest pair of a full set to its midpoint."""
    return RetractionCandidate(
        "merge", space, n, n - 1, lambda A: reduce_by_one(A, n, "merge")
    )


def radial_projection(x, rho: float = 1.0) -> tuple:
    if not (0 < rho <= 1):
        raise InvalidInput("inner radius must lie in (0, 1]")
    v = np.asarray(x, dtype=float)
    norm = float(np.sqrt(v @ v))
    if norm < rho:
        raise DomainError(f"|x| = {norm} is inside the excluded ball of radius {rho}")
    if norm == 1.0:
        return tuple(float(t) for t in v)
    return tuple(float(t) for t in v / norm)


def radial_map(d: int, rho: float) -> PointMap:
    E = Space.euclidean(d)
    return PointMap(f"radial{rho:g}", E, E, lambda x: radial_projection(x, rho), 1.0 / rho)


def clamp_map(line: Space, interval: Space) -> PointMap:
    """Nearest-point retraction of the real line (as euclidean:1) onto an interval."""
    a, b = interval.a, interval.b
    return PointMap("clamp", line, interval, lambda x: min(max(x[0], a), b), 1.0)


def inclusion_map(interval: Space, line: Space) -> PointMap:
    return PointMap("inclusion", interval, line, lambda t: (t,), 1.0)


# -- interval normalization pipelines ---------------------------------------


def normalize_unit(S: FiniteSubset) -> FiniteSubset:
    """Affine rescaling t -> (t - min S) / (max S - min S), landing in [0, 1]."""
    if S.space.kind != "interval":
        raise InvalidInput("normalize_unit expects a subset of an interval")
    lo, hi = S.points[0], S.points[-1]
    if not hi > lo:
        raise DegenerateInput("cannot normalize a set with max S = min S")
    width = hi - lo
    inner = [(t - lo) / width for t in S.points[1:-1]]
    return FiniteSubset.of(Space.interval(0.0, 1.0), [0.0, *inner, 1.0])


def pinned_truncate(S: FiniteSubset, c: float) -> FiniteSubset:
    """S intersected with [0, 1 + c/2] for S in the configuration around {0, 1, 2}."""
    if S.space != Space.interval(0.0, 2.0):
        raise InvalidInput("pinned_truncate expects a subset of interval:0:2")
    if not (0 < c < 1):
        raise InvalidConfiguration(f"c = {c} is outside (0, 1)")
    h = c / 2.0
    pts = S.points

    def meets(lo, hi):
        return any(lo <= x <= hi for x in pts)

    if not (meets(0.0, h) and meets(1.0 - h, 1.0 + h) and meets(2.0 - h, 2.0)):
        raise InvalidConfiguration(f"{pts} misses one of the pin windows for c = {c}")
    if any(1.0 + h < x < 2.0 - h for x in pts):
        raise InvalidConfiguration(f"{pts} has points in ({1 + h}, {2 - h})")
    return FiniteSubset.of(S.space, [x for x in pts if x <= 1.0 + h])


def adjoin_two(A: FiniteSubset) -> FiniteSubset:
    if A.space.kind != "interval" or A.points[0] < 0.0 or A.points[-1] > 1.0:
        raise InvalidInput("adjoin_two expects a subset of [0, 1]")
    return FiniteSubset.of(Space.interval(0.0, 2.0), [*A.points, 2.0])


def normalized_retraction(r: RetractionCandidate) -> RetractionCandidate:
    """A -> normalize_unit(r(A)), taking D^(n-2) to D^(n-3) when r displaces little."""
    if r.space != Space.interval(0.0, 1.0) or r.k != r.n - 1 or r.n < 3:
        raise InvalidInput("need a retraction I(n) -> I(n-1) on interval:0:1 with n >= 3")
    hat = PinnedSpec.dunce_hat(r.n - 2)

    def s(A: FiniteSubset) -> FiniteSubset:
        if not pinned_member(A, hat):
            raise DomainError(f"{A.points} is not in the dunce hat D^{r.n - 2}")
        return normalize_unit(r(A))

    return RetractionCandidate(f"normalized:{r.name}", r.space, r.n, r.k, s)


def truncated_retraction(r: RetractionCandidate, c: float) -> RetractionCandidate:
    """A -> sigma(A u {2}), taking D^(n-3) to D^(n-4) for a retraction r of [0, 2]."""
    if r.space != Space.interval(0.0, 2.0) or r.k != r.n - 1 or r.n < 4:
        raise InvalidInput("need a retraction I(n) -> I(n-1) on interval:0:2 with n >= 4")
    unit = Space.interval(0.0, 1.0)
    hat = PinnedSpec.dunce_hat(r.n - 3)

    def sigma_iota(A: FiniteSubset) -> FiniteSubset:
        if not pinned_member(A, hat):
            raise DomainError(f"{A.points} is not in the dunce hat D^{r.n - 3}")
        return normalize_unit(pinned_truncate(r(adjoin_two(A)), c))

    return RetractionCandidate(f"truncated:{r.name}", unit, r.n - 1, r.n - 2, sigma_iota)


# -- norming functionals ------------------------------------------------------


class NormingClamp(NamedTuple):
    phi: tuple
    f: PointMap
    g: PointMap


def dual_norm(phi, p: float) -> float:
    return float(pnorm_rows(np.asarray(phi, dtype=float), dual_exponent(p)))


def norming_functional(u, p: float) -> tuple:
    v = np.asarray(u, dtype=float)
    if math.isinf(p):
        i = int(np.argmax(np.abs(v)))  # first index on ties
        phi = np.zeros_like(v)
        phi[i] = np.sign(v[i])
    elif p == 1:
        phi = np.sign(v)
    else:
        phi = np.sign(v) * np.abs(v) ** (p - 1.0)
    return tuple(float(t) for t in phi)


def norming_clamp(space: Space, u, tol: float = DEFAULT_TOL) -> NormingClamp:
    """phi with dual norm 1 and phi(u) = 1, the clamp f = min(max(phi, 0), 1), and g(t) = t u."""
    if not space.is_vector:
        raise InvalidInput("norming functionals need a normed space")
    p = space.norm_p
    u = space.point(u)
    if abs(float(pnorm_rows(np.asarray(u), p)) - 1.0) > tol:
        raise InvalidInput(f"{u} is not a unit vector in the {p:g}-norm")
    phi = norming_functional(u, p)
    coeff = np.asarray(phi)
    unit = Space.interval(0.0, 1.0)
    f = PointMap(
        "clamp-functional", space, unit,
        lambda x: min(max(float(coeff @ np.asarray(x)), 0.0), 1.0), 1.0,
    )
    g = PointMap("ray", unit, space, lambda t: tuple(t * c for c in u), 1.0)
    return NormingClamp(phi, f, g)


# -- registry ----------------------------------------------------------------

CANDIDATES = ("merge", "transfer:clamp", "normalized", "truncated")


def candidate(name: str, space: Space, n: int) -> RetractionCandidate:
    """Look up a shipped retraction candidate by name.

    ``normalized`` and ``truncated`` ignore ``space``: they live on the dunce
    hats over the unit interval (domains D^(n-2) and D^(n-3) respectively).
    """
    if name == "merge":
        return merge_retraction(space, n)
    if name == "transfer:clamp":
        if space.kind != "interval":
            raise InvalidInput("transfer:clamp retracts subsets of an interval")
        line = Space.euclidean(1)
        return transfer_retraction(
            clamp_map(line, space), merge_retraction(line, n), inclusion_map(space, line)
        )
    if name == "normalized":
        return normalized_retraction(merge_retraction(Space.interval(0.0, 1.0), n))
    if name == "truncated":
        if n < 5:
            raise InvalidInput("truncated needs n >= 5 so that c = 1/(n-2) < 1")
        return truncated_retraction(merge_retraction(Space.interval(0.0, 2.0), n), 1.0 / (n - 2))
    raise InvalidInput(f"unknown retraction candidate {name!r}; known: {', '.join(CANDIDATES)}")
