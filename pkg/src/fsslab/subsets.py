"""Finite subsets under the Hausdorff metric, one-point reductions, k-center oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .errors import InvalidInput, UnsupportedOperation
from .metric import TWO_PI, Space, _wrap_angle, geodesic_point


@dataclass(frozen=True)
class FiniteSubset:
    """A nonempty finite set of points of ``space`` in canonical sorted order.

    Use :meth:`of` to build one from arbitrary input; repeats collapse.
    """

    space: Space
    points: tuple

    @classmethod
    def of(cls, space: Space, points: Iterable) -> FiniteSubset:
        canon = {space.point(x) for x in points}
        if not canon:
            raise InvalidInput("a finite subset must be nonempty")
        return cls(space, tuple(sorted(canon, key=space.sort_key)))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, x):
        return self.space.point(x) in self._lookup

    @cached_property
    def _lookup(self) -> frozenset:
        return frozenset(self.points)

    @cached_property
    def array(self) -> np.ndarray:
        return self.space.to_array(self.points)

    def issubset(self, other: FiniteSubset) -> bool:
        return self._lookup <= other._lookup

    def union(self, other: Iterable) -> FiniteSubset:
        return FiniteSubset.of(self.space, [*self.points, *other])

    def without(self, *drop) -> FiniteSubset:
        gone = {self.space.point(x) for x in drop}
        return FiniteSubset.of(self.space, [x for x in self.points if x not in gone])

    def to_json(self) -> dict:
        return {
            "space": self.space.to_json(),
            "points": [self.space.point_to_json(x) for x in self.points],
        }

    @classmethod
    def from_json(cls, obj: dict) -> FiniteSubset:
        space = Space.from_json(obj["space"])
        return cls.of(space, [space.point_from_json(x) for x in obj["points"]])


def _check_same_space(A: FiniteSubset, B: FiniteSubset):
    if A.space != B.space:
        raise InvalidInput(f"subsets live in different spaces: {A.space} vs {B.space}")


def hausdorff(A: FiniteSubset, B: FiniteSubset) -> float:
    _check_same_space(A, B)
    D = A.space.pairwise(A.array, B.array)
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def closest_pair(A: FiniteSubset) -> tuple[int, int, float]:
    """Indices (i < j) of the first closest pair in canonical order, and its distance."""
    m = len(A)
    if m < 2:
        raise InvalidInput("closest pair needs at least two points")
    D = A.space.pairwise(A.array, A.array)
    iu, ju = np.triu_indices(m, k=1)
    vals = D[iu, ju]
    best = int(np.argmin(vals))
    return int(iu[best]), int(ju[best]), float(vals[best])


def min_separation(A: FiniteSubset, n: int) -> float:
    if n < 2:
        raise InvalidInput("minimum separation is defined for n >= 2")
    if len(A) > n:
        raise InvalidInput(f"|A| = {len(A)} exceeds n = {n}")
    if len(A) < n:
        return 0.0
    return closest_pair(A)[2]


def reduce_by_one(A: FiniteSubset, n: int, mode: str = "drop") -> FiniteSubset:
    """A set with at most n - 1 points near A (drop a point, or merge the closest pair)."""
    if mode not in ("drop", "merge"):
        raise InvalidInput(f"unknown reduction mode {mode!r}")
    if len(A) > n:
        raise InvalidInput(f"|A| = {len(A)} exceeds n = {n}")
    if mode == "merge" and not A.space.is_geodesic:
        raise UnsupportedOperation(f"merge needs a geodesic space, {A.space} is not")
    if len(A) < n:
        return A
    i, j, _ = closest_pair(A)
    p, q = A.points[i], A.points[j]
    if mode == "merge":
        mid = geodesic_point(A.space, p, q, 0.5)
        return FiniteSubset.of(A.space, [x for x in A.points if x not in (p, q)] + [mid])
    drop_p, drop_q = A.without(p), A.without(q)
    # ties drop the later point in canonical order
    if hausdorff(A, drop_p) < hausdorff(A, drop_q):
        return drop_p
    return drop_q


@dataclass(frozen=True)
class PinnedSpec:
    """Membership rule of X(n, U): at most ``n`` points, all of ``pins`` present."""

    pins: FiniteSubset
    n: int

    def __post_init__(self):
        if self.n < len(self.pins):
            raise InvalidInput("pinned cap must be at least the number of pins")

    @classmethod
    def dunce_hat(cls, n: int) -> PinnedSpec:
        """I(n + 2, {0, 1}) over the unit interval."""
        if n < 0:
            raise InvalidInput("dunce hat index must be >= 0")
        return cls(FiniteSubset.of(Space.interval(0.0, 1.0), [0.0, 1.0]), n + 2)


def pinned_member(A: FiniteSubset, spec: PinnedSpec) -> bool:
    _check_same_space(A, spec.pins)
    return len(A) <= spec.n and spec.pins.issubset(A)


@dataclass(frozen=True)
class KCenterResult:
    centers: FiniteSubset
    radius: float

    def to_json(self) -> dict:
        out = self.centers.to_json()
        out["centers"] = out.pop("points")
        out["radius"] = self.radius
        return out


def _line_dp_radius(x: np.ndarray, k: int) -> float:
    """Optimal max half-diameter over partitions of sorted x into <= k contiguous blocks."""
    m = len(x)
    cost = (x[None, :] - x[:, None]) / 2.0
    cost[np.tril_indices(m, k=-1)] = np.inf
    best = cost[0].copy()  # one block covering x[0..j]
    for _ in range(1, min(k, m)):
        before = np.concatenate(([0.0], best[:-1]))
        best = np.minimum(best, np.maximum(before[:, None], cost).min(axis=0))
    return float(best[-1])


def _greedy_blocks(x: np.ndarray, radius: float) -> list[tuple[int, int]]:
    # leftmost-greedy blocks at the optimal radius; deterministic center choice
    blocks, start = [], 0
    for j in range(1, len(x) + 1):
        if j == len(x) or x[j] - x[start] > 2.0 * radius:
            blocks.append((start, j - 1))
            start = j
    return blocks


def exact_kcenter(A: FiniteSubset, k: int) -> KCenterResult:
    """Minimum of d_H(A, B) over |B| <= k, for subsets of a line or the arclength circle."""
    space = A.space
    if k < 1:
        raise InvalidInput("k must be >= 1")
    is_circle = space.kind == "circle" and space.metric == "arclength"
    if not (space.is_line or is_circle):
        raise UnsupportedOperation(f"exact k-center is implemented for lines and circles, not {space}")
    if len(A) <= k:
        return KCenterResult(A, 0.0)

    if not is_circle:
        x = A.array if A.array.ndim == 1 else A.array[:, 0]
        r = _line_dp_radius(x, k)
        centers = [(x[i] + x[j]) / 2.0 for i, j in _greedy_blocks(x, r)]
        if space.is_vector:
            centers = [(c,) for c in centers]
    else:
        theta = A.array
        m = len(theta)
        best = None
        for cut in range(m):
            # unroll so the gap before theta[cut] is never crossed
            x = np.concatenate((theta[cut:], theta[:cut] + TWO_PI))
            r = _line_dp_radius(x, k)
            if best is None or r < best[0]:
                best = (r, x)
        r, x = best
        centers = [_wrap_angle((x[i] + x[j]) / 2.0) for i, j in _greedy_blocks(x, r)]
    B = FiniteSubset.of(space, centers)
    return KCenterResult(B, hausdorff(A, B))


def rotate(A: FiniteSubset, angle: float) -> FiniteSubset:
    if A.space.kind != "circle":
        raise UnsupportedOperation("rotation is defined on the circle only")
    return FiniteSubset.of(A.space, [x + angle for x in A.points])


def circle_k_cover(A: FiniteSubset, k: int, tol: float = 1e-12) -> FiniteSubset:
    """At most k points within pi(n-1)/(kn) of A, via k uniformly spaced arcs."""
    if A.space.kind != "circle" or A.space.metric != "arclength":
        raise UnsupportedOperation("circle k-cover needs the arclength circle")
    if k < 1:
        raise InvalidInput("k must be >= 1")
    n = len(A)
    if n <= k:
        return A
    period = TWO_PI / k
    arc_len = TWO_PI * (n - 1) / (k * n)

    R = np.unique(np.mod(A.array[None, :] + period * np.arange(1, k + 1)[:, None], TWO_PI))
    R = R[R < TWO_PI]
    # gap i runs from R[i-1] to R[i] (wrapping), so it ends at R[i]
    gaps = np.diff(np.concatenate(([R[-1] - TWO_PI], R)))
    widest = gaps.max()
    if widest < TWO_PI / (k * n) - tol:
        raise AssertionError("counting bound violated; no sufficient gap")  # unreachable
    # among the widest gaps, lay the arcs from the smallest end angle
    start = float(R[np.flatnonzero(gaps >= widest - tol)].min())

    used = set()
    for theta in A.array:
        u = math.fmod(theta - start, TWO_PI)
        if u < 0:
            u += TWO_PI
        j = int(u // period)
        if u - j * period > arc_len + tol:
            j += 1  # rounding put it just short of the next arc's start
        used.add(j % k)
    mids = [start + j * period + arc_len / 2.0 for j in sorted(used)]
    return FiniteSubset.of(A.space, mids)


def iterated_reduction(A: FiniteSubset, k: int) -> FiniteSubset:
    """Merge (or drop, off geodesic spaces) closest pairs until at most k points remain."""
    mode = "merge" if A.space.is_geodesic else "drop"
    B = A
    while len(B) > k:
        B = reduce_by_one(B, len(B), mode)
    return B
