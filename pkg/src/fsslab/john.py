"""John transforms of two-dimensional norms and the plane maps built from them.

For a symmetric convex body B in the plane with maximum-area inscribed ellipse E,
``B`` is contained in ``sqrt(2) * E``.  The transform T maps the Euclidean unit
disk onto ``sqrt(2) * E``, so ``||T|| <= sqrt(2)`` (Euclidean -> norm) and
``||T^-1|| <= 1`` (norm -> Euclidean).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NumericalFailure, UnsupportedOperation
from .metric import Space, pnorm_rows
from .retractions import PointMap

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class PolygonGauge:
    """Norm whose unit ball is a centrally symmetric convex polygon."""

    vertices: tuple

    def __post_init__(self):
        V = np.asarray(self.vertices, dtype=float)
        m = len(V)
        if V.ndim != 2 or V.shape[1] != 2 or m < 6 or m % 2:
            raise InvalidInput("need an even number (>= 6) of planar vertices")
        if np.max(np.abs(V[: m // 2] + V[m // 2 :])) > 1e-9 * max(1.0, np.abs(V).max()):
            raise InvalidInput("polygon is not centrally symmetric about the origin")
        E = np.roll(V, -1, axis=0) - V
        turn = E[:, 0] * np.roll(E, -1, axis=0)[:, 1] - E[:, 1] * np.roll(E, -1, axis=0)[:, 0]
        if not (np.all(turn > 0) or np.all(turn < 0)):
            raise InvalidInput("polygon is not strictly convex")

    @classmethod
    def regular(cls, m: int, phase: float = 0.0) -> PolygonGauge:
        """Regular m-gon with circumradius 1."""
        ang = phase + 2 * math.pi * np.arange(m) / m
        return cls(tuple(map(tuple, np.column_stack((np.cos(ang), np.sin(ang))))))

    @property
    def facets(self) -> np.ndarray:
        """Rows a_i with ``norm(x) = max_i a_i . x``."""
        V = np.asarray(self.vertices, dtype=float)
        E = np.roll(V, -1, axis=0) - V
        normals = np.column_stack((E[:, 1], -E[:, 0]))
        h = np.sum(normals * V, axis=1)
        normals[h < 0] *= -1
        return normals / np.abs(h)[:, None]

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.max(X @ self.facets.T, axis=1)


def _gauge_for(norm):
    if isinstance(norm, PolygonGauge):
        return norm
    if isinstance(norm, Space) and norm.is_vector and norm.d == 2:
        p = norm.norm_p
        return lambda X: pnorm_rows(np.atleast_2d(np.asarray(X, dtype=float)), p)
    raise InvalidInput("john_transform needs a planar p-norm space or a PolygonGauge")


def inscribed_ellipse(gauge: PolygonGauge, tol: float = 1e-12) -> np.ndarray:
    """Shape matrix Q of the max-area centered ellipse {x : x^T Q^-1 x <= 1} inside the polygon.

    Containment in the facet a.x <= 1 reads a^T Q a <= 1, linear in Q, so this is
    log-det maximization under linear constraints.  Solved with a log-barrier
    Newton method from a shrunken inscribed circle.
    """
    a = gauge.facets
    C = np.column_stack((a[:, 0] ** 2, 2 * a[:, 0] * a[:, 1], a[:, 1] ** 2))
    r0 = 1.0 / np.max(np.linalg.norm(a, axis=1))
    q = np.array([0.25 * r0**2, 0.0, 0.25 * r0**2])
    H_det = np.array([[0.0, 0.0, 1.0], [0.0, -2.0, 0.0], [1.0, 0.0, 0.0]])

    def objective(q, t):
        det = q[0] * q[2] - q[1] ** 2
        s = 1.0 - C @ q
        # det > 0 alone also admits negative definite Q
        if q[0] <= 0 or det <= 0 or np.any(s <= 0):
            return math.inf
        return -t * math.log(det) - np.sum(np.log(s))

    t = 1.0
    m = len(C)
    while True:
        for _ in range(100):
            det = q[0] * q[2] - q[1] ** 2
            s = 1.0 - C @ q
            dD = np.array([q[2], -2 * q[1], q[0]])
            grad = -t * dD / det + C.T @ (1.0 / s)
            hess = -t * (H_det / det - np.outer(dD, dD) / det**2) + (C.T / s**2) @ C
            step = -np.linalg.solve(hess, grad)
            decrement = float(-grad @ step)
            if decrement / 2 < 1e-14:
                break
            f0, lam = objective(q, t), 1.0
            while objective(q + lam * step, t) > f0 - 0.25 * lam * decrement:
                lam *= 0.5
                if lam < 1e-16:
                    break
            q = q + lam * step
        if m / t < tol:
            break
        t *= 10.0
    return np.array([[q[0], q[1]], [q[1], q[2]]])


@dataclass(frozen=True)
class JohnTransform:
    T: np.ndarray
    norm_T: float
    norm_Tinv: float
    directions: int

    def to_json(self) -> dict:
        return {
            "T": self.T.tolist(),
            "norm_T": self.norm_T,
            "norm_Tinv": self.norm_Tinv,
            "directions": self.directions,
        }


def _analytic_T(space: Space) -> np.ndarray:
    p = space.norm_p
    if p in (1.0, 2.0):
        return np.eye(2)
    if math.isinf(p):
        return SQRT2 * np.eye(2)
    # the l_p ball has the symmetries of the square, so its John ellipse is the
    # inscribed disk: radius 1 for p >= 2, 2^(1/2 - 1/p) (diagonal) for p < 2
    inradius = 1.0 if p >= 2 else 2.0 ** (0.5 - 1.0 / p)
    return SQRT2 * inradius * np.eye(2)


def certify(T: np.ndarray, gauge, directions: int = 360) -> tuple[float, float]:
    """Sampled operator norms (Euclidean -> gauge of T, gauge -> Euclidean of T^-1)."""
    ang = 2 * math.pi * np.arange(directions) / directions
    D = np.column_stack((np.cos(ang), np.sin(ang)))
    norm_T = gauge(D @ T.T)
    Tinv = np.linalg.inv(T)
    norm_Tinv = np.linalg.norm(D @ Tinv.T, axis=1) / gauge(D)
    return norm_T, norm_Tinv


def john_transform(norm, directions: int = 360, slack: float = 1e-6) -> JohnTransform:
    if directions < 360:
        raise InvalidInput("certification samples at least 360 directions")
    gauge = _gauge_for(norm)
    if isinstance(norm, PolygonGauge):
        w, U = np.linalg.eigh(inscribed_ellipse(norm))
        T = SQRT2 * (U * np.sqrt(w)) @ U.T
    else:
        T = _analytic_T(norm)
    norm_T, norm_Tinv = certify(T, gauge, directions)
    ang = 2 * math.pi / directions
    if norm_T.max() > SQRT2 + slack:
        i = int(np.argmax(norm_T))
        raise NumericalFailure(f"||T|| = {norm_T[i]} exceeds sqrt(2)", direction=i * ang)
    if norm_Tinv.max() > 1.0 + slack:
        i = int(np.argmax(norm_Tinv))
        raise NumericalFailure(f"||T^-1|| = {norm_Tinv[i]} exceeds 1", direction=i * ang)
    return JohnTransform(T, float(norm_T.max()), float(norm_Tinv.max()), directions)


def plane_projection(space: Space, basis=None) -> np.ndarray:
    """2 x d matrix of a projection onto a plane Z, in orthonormal coordinates of Z.

    Only the cases that need no duality machinery: identity in dimension 2 and
    orthogonal projection in Euclidean space.
    """
    if not space.is_vector or space.d < 2:
        raise InvalidInput("need a normed space of dimension >= 2")
    if space.d == 2 and basis is None:
        return np.eye(2)
    if not space.is_hilbert:
        raise UnsupportedOperation("projections onto planes of non-Euclidean norms are not constructed")
    B = np.eye(space.d)[:, :2] if basis is None else np.asarray(basis, dtype=float)
    if B.shape != (space.d, 2):
        raise InvalidInput("basis must be a d x 2 matrix")
    Q, R = np.linalg.qr(B)
    if min(abs(R[0, 0]), abs(R[1, 1])) < 1e-12:
        raise InvalidInput("basis vectors are linearly dependent")
    return Q.T


def plane_maps(space: Space, basis=None) -> tuple[PointMap, PointMap]:
    """Maps f: X -> R^2 and g: R^2 -> X with f o g = id, built from T and P."""
    plane = Space.euclidean(2)
    P = plane_projection(space, basis)
    if space.is_hilbert:
        G = P.T
        f = PointMap("project", space, plane, lambda x: tuple(P @ np.asarray(x)), 1.0)
        g = PointMap("embed", plane, space, lambda y: tuple(G @ np.asarray(y)), 1.0)
        return f, g
    jt = john_transform(space)
    T, Tinv = jt.T, np.linalg.inv(jt.T)
    f = PointMap("john-inverse", space, plane, lambda x: tuple(Tinv @ np.asarray(x)), jt.norm_Tinv)
    g = PointMap("john", plane, space, lambda y: tuple(T @ np.asarray(y)), jt.norm_T)
    return f, g
