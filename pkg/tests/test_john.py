import math

import numpy as np
import pytest

from fsslab.errors import InvalidInput, NumericalFailure, UnsupportedOperation
from fsslab.john import (
    PolygonGauge,
    certify,
    inscribed_ellipse,
    john_transform,
    plane_maps,
    plane_projection,
)
from fsslab.metric import Space

SQRT2 = math.sqrt(2.0)
PS = [1.0, 1.5, 2.0, 3.0, math.inf]


def lp_polygon(p, m=720):
    """Polygon through m points of the unit l_p circle (inscribed in the ball)."""
    ang = 2 * math.pi * (np.arange(m) + 0.5) / m
    D = np.column_stack((np.cos(ang), np.sin(ang)))
    D /= np.linalg.norm(D, p, axis=1)[:, None]
    return PolygonGauge(tuple(map(tuple, D)))


@pytest.mark.parametrize(
    "p,expected",
    [(1.0, np.eye(2)), (2.0, np.eye(2)), (math.inf, SQRT2 * np.eye(2))],
)
def test_analytic_cases(p, expected):
    jt = john_transform(Space.pnorm(2, p))
    assert np.max(np.abs(jt.T - expected)) <= 1e-9


@pytest.mark.parametrize("p", PS)
def test_pnorm_certificates(p):
    jt = john_transform(Space.pnorm(2, p))
    assert jt.norm_T <= SQRT2 + 1e-6
    assert jt.norm_Tinv <= 1 + 1e-6
    assert jt.directions == 360


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_analytic_matches_polygonal_approximation(p):
    # independent route: numerical John ellipse of a fine inscribed polygon
    Q = inscribed_ellipse(lp_polygon(p))
    w, U = np.linalg.eigh(Q)
    T_poly = SQRT2 * (U * np.sqrt(w)) @ U.T
    assert np.max(np.abs(T_poly - john_transform(Space.pnorm(2, p)).T)) < 1e-3


def test_regular_twelve_gon():
    jt = john_transform(PolygonGauge.regular(12))
    # inscribed disk of the 12-gon has radius cos(pi/12)
    assert np.max(np.abs(jt.T - SQRT2 * math.cos(math.pi / 12) * np.eye(2))) < 1e-7
    assert jt.norm_T <= SQRT2 + 1e-6
    assert jt.norm_Tinv <= 1 + 1e-6


@pytest.mark.parametrize("seed", range(5))
def test_inscribed_ellipse_is_affine_equivariant(seed):
    # the John ellipse of M(P) is M applied to the John ellipse of P
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(2, 2)) + 2 * np.eye(2)
    m = 2 * int(rng.integers(3, 9))
    base = PolygonGauge.regular(m, phase=float(rng.uniform(0, 1)))
    image = PolygonGauge(tuple(map(tuple, np.asarray(base.vertices) @ M.T)))
    r = math.cos(math.pi / m)
    expected = r**2 * M @ M.T
    assert np.allclose(inscribed_ellipse(image), expected, rtol=1e-7, atol=1e-9)
    jt = john_transform(image)
    assert jt.norm_T <= SQRT2 + 1e-6 and jt.norm_Tinv <= 1 + 1e-6


def test_polygon_gauge():
    sq = PolygonGauge(((1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)))
    assert sq((0.5, 0.5)) == pytest.approx([0.5])
    assert sq([(1, 0), (0, -1)]) == pytest.approx([1.0, 1.0])
    g12 = PolygonGauge.regular(12)
    assert g12(np.asarray(g12.vertices)) == pytest.approx(np.ones(12))


def test_polygon_validation():
    with pytest.raises(InvalidInput):
        PolygonGauge(((1, 0), (0, 1), (-1, 0), (0, -1)))  # fewer than 6
    with pytest.raises(InvalidInput):
        PolygonGauge(((1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -2)))  # asymmetric
    with pytest.raises(InvalidInput):
        # vertex pulled inward: symmetric but not convex
        PolygonGauge(((1, 0), (0.2, 0.2), (0, 1), (-1, 0), (-0.2, -0.2), (0, -1)))
    with pytest.raises(InvalidInput):
        john_transform(Space.circle())
    with pytest.raises(InvalidInput):
        john_transform(Space.pnorm(3, 2.0))
    with pytest.raises(InvalidInput):
        john_transform(Space.euclidean(2), directions=100)


def test_certification_failure_reports_direction(monkeypatch):
    from fsslab import john

    # an oversized transform must be caught by the sampled certificate
    monkeypatch.setattr(john, "_analytic_T", lambda space: 2 * np.eye(2))
    with pytest.raises(NumericalFailure) as info:
        john_transform(Space.euclidean(2))
    assert info.value.direction == 0.0


def test_certify_measures_both_norms():
    norm_T, norm_Tinv = certify(SQRT2 * np.eye(2), PolygonGauge.regular(12), directions=360)
    assert norm_T.shape == norm_Tinv.shape == (360,)
    # the gauge peaks at facet midpoints (15 degrees, on the sampling grid)
    assert norm_T.max() == pytest.approx(SQRT2 / math.cos(math.pi / 12), rel=1e-12)
    assert norm_Tinv.max() == pytest.approx(1 / SQRT2, rel=1e-12)  # at the vertices


def test_plane_projection():
    assert np.array_equal(plane_projection(Space.pnorm(2, 1.0)), np.eye(2))
    P = plane_projection(Space.euclidean(4), [[1, 1], [1, 0], [0, 0], [0, 0]])
    assert np.allclose(P @ P.T, np.eye(2))
    with pytest.raises(UnsupportedOperation):
        plane_projection(Space.pnorm(3, 1.0))
    with pytest.raises(InvalidInput):
        plane_projection(Space.euclidean(3), [[1, 2], [1, 2], [1, 2]])


@pytest.mark.parametrize("space", [Space.euclidean(3), Space.pnorm(2, 1.0), Space.pnorm(2, math.inf)], ids=str)
def test_plane_maps_compose_to_identity(space):
    f, g = plane_maps(space)
    rng = np.random.default_rng(0)
    plane = Space.euclidean(2)
    for _ in range(200):
        y = plane.sample_point(rng)
        assert f(g(y)) == pytest.approx(y, abs=1e-12)
    assert f.lipschitz * g.lipschitz <= SQRT2 + 1e-6
