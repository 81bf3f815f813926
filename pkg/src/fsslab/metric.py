"""Concrete metric spaces: distances, geodesics, CAT(0) residuals, segment projections.

Points are plain hashable Python values whose shape depends on the space:

* ``euclidean`` / ``pnorm``: tuple of ``d`` floats
* ``circle``: float angle in ``[0, 2*pi)``
* ``interval``: float in ``[a, b]``
* ``tripod``: ``(leg, offset)`` with ``leg`` in ``{0, 1, 2}``; the center is ``(0, 0.0)``

Always pass raw values through :meth:`Space.point` to get the canonical form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import InvalidInput, UnsupportedOperation

TWO_PI = 2.0 * math.pi
DEFAULT_TOL = 1e-9

KINDS = ("euclidean", "pnorm", "circle", "interval", "tripod")


def dual_exponent(p: float) -> float:
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _wrap_angle(theta: float) -> float:
    theta = math.fmod(float(theta), TWO_PI)
    if theta < 0:
        theta += TWO_PI
    # fmod of a tiny negative can round up to exactly 2*pi
    if theta >= TWO_PI:
        theta = 0.0
    return theta


def pnorm_rows(diff: np.ndarray, p: float) -> np.ndarray:
    """p-norm along the last axis."""
    if p == 2:
        return np.sqrt((diff * diff).sum(axis=-1))
    a = np.abs(diff)
    if p == 1:
        return a.sum(axis=-1)
    if math.isinf(p):
        return a.max(axis=-1)
    return (a**p).sum(axis=-1) ** (1.0 / p)


@dataclass(frozen=True)
class Space:
    """Descriptor of one concrete metric space.

    Build instances with the classmethod constructors rather than directly.
    """

    kind: str
    d: int | None = None
    p: float | None = None
    metric: str | None = None
    a: float | None = None
    b: float | None = None
    legs: tuple[float, float, float] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInput(f"unknown space kind {self.kind!r}")
        if self.kind in ("euclidean", "pnorm"):
            if not isinstance(self.d, int) or self.d < 1:
                raise InvalidInput("dimension must be a positive integer")
        if self.kind == "pnorm":
            if self.p is None or not (self.p >= 1):
                raise InvalidInput("p must satisfy p >= 1 (or be inf)")
        if self.kind == "circle" and self.metric not in ("arclength", "chordal"):
            raise InvalidInput("circle metric must be 'arclength' or 'chordal'")
        if self.kind == "interval":
            if self.a is None or self.b is None or not (self.a < self.b):
                raise InvalidInput("interval requires a < b")
        if self.kind == "tripod":
            if self.legs is None or len(self.legs) != 3 or min(self.legs) <= 0:
                raise InvalidInput("tripod requires three positive leg lengths")

    @classmethod
    def euclidean(cls, d: int) -> Space:
        return cls("euclidean", d=d)

    @classmethod
    def pnorm(cls, d: int, p: float) -> Space:
        return cls("pnorm", d=d, p=float(p))

    @classmethod
    def circle(cls, metric: str = "arclength") -> Space:
        return cls("circle", metric=metric)

    @classmethod
    def interval(cls, a: float = 0.0, b: float = 1.0) -> Space:
        return cls("interval", a=float(a), b=float(b))

    @classmethod
    def tripod(cls, l0: float = 1.0, l1: float = 1.0, l2: float = 1.0) -> Space:
        return cls("tripod", legs=(float(l0), float(l1), float(l2)))

    @classmethod
    def parse(cls, text: str) -> Space:
        """Parse a compact descriptor such as ``interval:0:1`` or ``pnorm:2:inf``."""
        kind, *args = text.strip().lower().split(":")
        try:
            if kind == "euclidean":
                return cls.euclidean(int(args[0]) if args else 2)
            if kind == "pnorm":
                return cls.pnorm(int(args[0]), float(args[1]))
            if kind == "circle":
                return cls.circle(args[0] if args else "arclength")
            if kind == "interval":
                return cls.interval(*(float(x) for x in args)) if args else cls.interval()
            if kind == "tripod":
                return cls.tripod(*(float(x) for x in args)) if args else cls.tripod()
        except (IndexError, ValueError, TypeError) as exc:
            raise InvalidInput(f"cannot parse space {text!r}") from exc
        raise InvalidInput(f"unknown space kind in {text!r}")

    def __str__(self):
        if self.kind == "euclidean":
            return f"euclidean:{self.d}"
        if self.kind == "pnorm":
            return f"pnorm:{self.d}:{self.p:g}"
        if self.kind == "circle":
            return f"circle:{self.metric}"
        if self.kind == "interval":
            return f"interval:{self.a:g}:{self.b:g}"
        return "tripod:" + ":".join(f"{x:g}" for x in self.legs)

    # -- structure ---------------------------------------------------------

    @property
    def is_vector(self) -> bool:
        return self.kind in ("euclidean", "pnorm")

    @property
    def norm_p(self) -> float:
        """Exponent of the ambient norm for vector spaces."""
        if self.kind == "euclidean":
            return 2.0
        if self.kind == "pnorm":
            return self.p
        raise UnsupportedOperation(f"{self} is not a normed space")

    @property
    def is_hilbert(self) -> bool:
        return self.is_vector and self.norm_p == 2.0

    @property
    def is_geodesic(self) -> bool:
        return not (self.kind == "circle" and self.metric == "chordal")

    @property
    def is_line(self) -> bool:
        """True for isometric copies of a subset of the real line."""
        return self.kind == "interval" or (self.is_vector and self.d == 1)

    @property
    def n_coords(self) -> int:
        return self.d if self.is_vector else 1

    # -- points ------------------------------------------------------------

    def point(self, value: Any):
        """Validate ``value`` and return its canonical form."""
        try:
            if self.is_vector:
                coords = tuple(float(x) for x in value)
                if len(coords) != self.d or not all(math.isfinite(x) for x in coords):
                    raise InvalidInput(f"expected {self.d} finite coordinates, got {value!r}")
                return coords
            if self.kind == "circle":
                theta = float(value)
                if not math.isfinite(theta):
                    raise InvalidInput("angle must be finite")
                return _wrap_angle(theta)
            if self.kind == "interval":
                x = float(value)
                if not (self.a <= x <= self.b):
                    raise InvalidInput(f"{x} lies outside [{self.a}, {self.b}]")
                return x
            leg, offset = value
            leg, offset = int(leg), float(offset)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidInput):
                raise
            raise InvalidInput(f"{value!r} is not a point of {self}") from exc
        if leg not in (0, 1, 2) or not (0.0 <= offset <= self.legs[leg]):
            raise InvalidInput(f"{value!r} is not a point of {self}")
        if offset == 0.0:
            return (0, 0.0)
        return (leg, offset)

    def sort_key(self, x):
        return x

    def to_array(self, points) -> np.ndarray:
        if self.is_vector:
            return np.asarray(points, dtype=float).reshape(len(points), self.d)
        if self.kind == "tripod":
            return np.asarray(points, dtype=float).reshape(len(points), 2)
        return np.asarray(points, dtype=float).reshape(len(points))

    def pairwise(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """Distance matrix between two arrays from :meth:`to_array`."""
        if self.is_vector:
            return pnorm_rows(X[:, None, :] - Y[None, :, :], self.norm_p)
        if self.kind == "interval":
            return np.abs(np.subtract.outer(X, Y))
        if self.kind == "circle":
            gap = np.abs(np.subtract.outer(X, Y))
            arc = np.minimum(gap, TWO_PI - gap)
            if self.metric == "chordal":
                return 2.0 * np.sin(arc / 2.0)
            return arc
        # a tripod embeds isometrically in l1(R^3): (leg, t) -> t * e_leg
        same = np.equal.outer(X[:, 0], Y[:, 0])
        return np.where(
            same,
            np.abs(np.subtract.outer(X[:, 1], Y[:, 1])),
            np.add.outer(X[:, 1], Y[:, 1]),
        )

    def distance(self, x, y) -> float:
        return float(self.pairwise(self.to_array([x]), self.to_array([y]))[0, 0])

    def equal(self, x, y) -> bool:
        return self.point(x) == self.point(y)

    # -- sampling ----------------------------------------------------------

    def sample_point(self, rng: np.random.Generator):
        if self.is_vector:
            return tuple(float(v) for v in rng.uniform(-1.0, 1.0, self.d))
        if self.kind == "circle":
            return _wrap_angle(rng.uniform(0.0, TWO_PI))
        if self.kind == "interval":
            return float(rng.uniform(self.a, self.b))
        total = sum(self.legs)
        leg = int(rng.choice(3, p=[x / total for x in self.legs]))
        return self.point((leg, rng.uniform(0.0, self.legs[leg])))

    def sample_points(self, rng: np.random.Generator, m: int) -> list:
        """``m`` canonical points drawn like :meth:`sample_point`, in one batch."""
        if self.is_vector:
            return [tuple(row) for row in rng.uniform(-1.0, 1.0, (m, self.d)).tolist()]
        if self.kind == "circle":
            return [_wrap_angle(t) for t in rng.uniform(0.0, TWO_PI, m).tolist()]
        if self.kind == "interval":
            return rng.uniform(self.a, self.b, m).tolist()
        # uniform arclength position along the three legs laid end to end
        ends = np.cumsum(self.legs)
        u = rng.uniform(0.0, ends[-1], m)
        which = np.minimum(np.searchsorted(ends, u, side="right"), 2)
        offsets = u - np.concatenate(([0.0], ends[:-1]))[which]
        return [self.point(x) for x in zip(which.tolist(), offsets.tolist())]

    @property
    def sample_diameter(self) -> float:
        """Diameter of the region :meth:`sample_point` draws from."""
        if self.is_vector:
            return float(pnorm_rows(np.full(self.d, 2.0), self.norm_p))
        if self.kind == "circle":
            return math.pi if self.metric == "arclength" else 2.0
        if self.kind == "interval":
            return self.b - self.a
        return sum(sorted(self.legs)[1:])

    def perturb(self, x, coord: int, delta: float):
        """Move one coordinate of ``x`` by ``delta``, staying inside the space."""
        if self.is_vector:
            v = list(x)
            v[coord] += delta
            return tuple(v)
        if self.kind == "circle":
            return _wrap_angle(x + delta)
        if self.kind == "interval":
            return min(max(x + delta, self.a), self.b)
        leg, offset = x
        offset += delta
        if offset < 0:
            leg, offset = (leg + 1) % 3, -offset
        return self.point((leg, min(offset, self.legs[leg])))

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        if self.kind == "euclidean":
            return {"kind": "euclidean", "d": self.d}
        if self.kind == "pnorm":
            return {"kind": "pnorm", "d": self.d, "p": "inf" if math.isinf(self.p) else self.p}
        if self.kind == "circle":
            return {"kind": "circle", "metric": self.metric}
        if self.kind == "interval":
            return {"kind": "interval", "a": self.a, "b": self.b}
        return {"kind": "tripod", "legs": list(self.legs)}

    @classmethod
    def from_json(cls, obj: dict) -> Space:
        try:
            kind = obj["kind"]
            if kind == "euclidean":
                return cls.euclidean(int(obj["d"]))
            if kind == "pnorm":
                return cls.pnorm(int(obj["d"]), float(obj["p"]))
            if kind == "circle":
                return cls.circle(obj.get("metric", "arclength"))
            if kind == "interval":
                return cls.interval(obj["a"], obj["b"])
            if kind == "tripod":
                return cls.tripod(*obj["legs"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed space object {obj!r}") from exc
        raise InvalidInput(f"unknown space kind {obj.get('kind')!r}")

    def point_to_json(self, x):
        x = self.point(x)
        if self.is_vector:
            return list(x)
        if self.kind == "circle":
            return {"angle": x}
        if self.kind == "interval":
            return x
        return {"leg": x[0], "offset": x[1]}

    def point_from_json(self, obj):
        if self.kind == "circle":
            return self.point(obj["angle"] if isinstance(obj, dict) else obj)
        if self.kind == "tripod":
            if isinstance(obj, dict):
                return self.point((obj["leg"], obj["offset"]))
            return self.point(obj)
        return self.point(obj)


def point_to_json(space: Space, x) -> dict:
    return {"space": space.to_json(), "point": space.point_to_json(x)}


def point_from_json(obj: dict):
    space = Space.from_json(obj["space"])
    return space, space.point_from_json(obj["point"])


def distance(space: Space, x, y) -> float:
    return space.distance(space.point(x), space.point(y))


def _signed_arc(p: float, q: float) -> float:
    """Shortest signed arc from p to q; antipodal pairs go counterclockwise."""
    delta = _wrap_angle(q - p)
    if delta > math.pi:
        delta -= TWO_PI
    return delta


def geodesic_point(space: Space, p, q, t: float):
    """The point gamma(t) on the geodesic from p to q."""
    if not space.is_geodesic:
        raise UnsupportedOperation("the chordal circle has no geodesics inside the circle")
    if not (0.0 <= t <= 1.0):
        raise InvalidInput(f"t={t} outside [0, 1]")
    p, q = space.point(p), space.point(q)
    if t == 0:
        return p
    if t == 1:
        return q
    if space.is_vector:
        return tuple(a + t * (b - a) for a, b in zip(p, q))
    if space.kind == "interval":
        return min(max(p + t * (q - p), space.a), space.b)
    if space.kind == "circle":
        return _wrap_angle(p + t * _signed_arc(p, q))
    (lp, op), (lq, oq) = p, q
    if lp == lq or op == 0.0 or oq == 0.0:
        leg = lq if op == 0.0 else lp
        return space.point((leg, op + t * (oq - op)))
    s = t * (op + oq)
    if s <= op:
        return space.point((lp, op - s))
    return space.point((lq, s - op))


@dataclass(frozen=True)
class Geodesic:
    space: Space
    p: Any
    q: Any

    @property
    def length(self) -> float:
        return self.space.distance(self.p, self.q)

    def __call__(self, t: float):
        return geodesic_point(self.space, self.p, self.q, t)


def hadamard_residual(space: Space, p, q, z, t: float) -> float:
    """RHS minus LHS of the CAT(0) comparison inequality; >= 0 means it holds here."""
    d = space.distance
    g = geodesic_point(space, p, q, t)
    return (
        (1 - t) * d(p, z) ** 2
        + t * d(q, z) ** 2
        - t * (1 - t) * d(p, q) ** 2
        - d(g, z) ** 2
    )


def project_to_segment(space: Space, p, q, z):
    """Nearest point to ``z`` on the geodesic segment from ``p`` to ``q``."""
    p, q, z = space.point(p), space.point(q), space.point(z)
    if space.is_hilbert:
        pv, qv, zv = (np.asarray(v) for v in (p, q, z))
        seg = qv - pv
        denom = float(seg @ seg)
        if denom == 0.0:
            return p
        t = min(max(float((zv - pv) @ seg) / denom, 0.0), 1.0)
        return geodesic_point(space, p, q, t)
    if space.kind == "interval":
        return min(max(z, min(p, q)), max(p, q))
    if space.kind == "tripod":
        length = space.distance(p, q)
        if length == 0.0:
            return p
        # in a tree the gate of z on [p, q] sits at the Gromov product (z|q)_p from p
        along = 0.5 * (space.distance(p, z) + length - space.distance(q, z))
        return geodesic_point(space, p, q, min(max(along / length, 0.0), 1.0))
    raise UnsupportedOperation(f"nearest-point projection is not unique in {space}")
