import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fsslab.errors import InvalidInput, UnsupportedOperation
from fsslab.metric import Space
from fsslab.subsets import (
    FiniteSubset,
    KCenterResult,
    PinnedSpec,
    circle_k_cover,
    closest_pair,
    exact_kcenter,
    hausdorff,
    iterated_reduction,
    min_separation,
    pinned_member,
    reduce_by_one,
    rotate,
)

PI = math.pi
I01 = Space.interval(0.0, 1.0)
CIRCLE = Space.circle()


def S(space, *pts):
    return FiniteSubset.of(space, pts)


def brute_hausdorff(A, B):
    d = A.space.distance
    fwd = max(min(d(a, b) for b in B) for a in A)
    bwd = max(min(d(a, b) for a in A) for b in B)
    return max(fwd, bwd)


def brute_kcenter_radius(A, k):
    """min over |B| = k of d_H(A, B), with B drawn from a finite candidate set.

    On a line an optimal center is the midpoint of a cluster's extremes; on the
    circle it is one of the two arc midpoints of such a pair. Points of A are
    included as candidates so that any k >= 1 is feasible.
    """
    space = A.space
    cands = list(A.points)
    for p, q in itertools.combinations(A.points, 2):
        if space.kind == "circle":
            lo, hi = min(p, q), max(p, q)
            m = (lo + hi) / 2.0
            cands += [m, (m + PI) % (2 * PI)]
        else:
            cands.append((p + q) / 2.0)
    D = np.array([[space.distance(c, a) for a in A.points] for c in cands])
    to_A = D.min(axis=1)
    idx = np.array(list(itertools.combinations(range(len(cands)), min(k, len(cands)))))
    fwd = D[idx].min(axis=1).max(axis=1)
    bwd = to_A[idx].max(axis=1)
    return float(np.maximum(fwd, bwd).min())


def equally_spaced(n, phase=0.0):
    return FiniteSubset.of(CIRCLE, [phase + 2 * PI * j / n for j in range(n)])


# --- construction -----------------------------------------------------------


def test_canonical_form_and_membership():
    A = S(I01, 1.0, 0.2, 0.2, 0.5)
    assert A.points == (0.2, 0.5, 1.0)
    assert len(A) == 3 and 0.5 in A and 0.3 not in A
    T = Space.tripod()
    B = S(T, (1, 0.0), (2, 0.0), (0, 0.5))
    assert B.points == ((0, 0.0), (0, 0.5))
    with pytest.raises(InvalidInput):
        FiniteSubset.of(I01, [])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=1, max_size=8), st.randoms())
def test_dedup_is_permutation_invariant(pts, rnd):
    shuffled = pts * 2
    rnd.shuffle(shuffled)
    assert FiniteSubset.of(I01, pts) == FiniteSubset.of(I01, shuffled)


def test_json_round_trip():
    for space in (I01, CIRCLE, Space.tripod(1, 2, 3), Space.pnorm(2, math.inf)):
        rng = np.random.default_rng(4)
        A = FiniteSubset.of(space, space.sample_points(rng, 5))
        back = FiniteSubset.from_json(json.loads(json.dumps(A.to_json())))
        assert back == A


def test_set_operations():
    A = S(I01, 0.0, 0.5, 1.0)
    assert A.without(0.5) == S(I01, 0.0, 1.0)
    assert A.union([0.25]) == S(I01, 0.0, 0.25, 0.5, 1.0)
    assert S(I01, 0.0, 1.0).issubset(A)
    assert not A.issubset(S(I01, 0.0, 1.0))


# --- Hausdorff --------------------------------------------------------------


def test_hausdorff_examples():
    assert hausdorff(S(I01, 0, 0.4, 1), S(I01, 0.2, 0.9)) == pytest.approx(0.2, abs=1e-15)
    A = S(I01, 0.1, 0.7)
    assert hausdorff(A, A) == 0.0
    assert hausdorff(S(CIRCLE, 0.0), S(CIRCLE, PI)) == PI
    with pytest.raises(InvalidInput):
        hausdorff(S(I01, 0.5), S(CIRCLE, 0.5))


@pytest.mark.parametrize(
    "space",
    [I01, CIRCLE, Space.circle("chordal"), Space.euclidean(2), Space.pnorm(3, 1.0),
     Space.pnorm(2, math.inf), Space.tripod(1, 2, 0.5)],
    ids=str,
)
def test_hausdorff_matches_double_loop(space):
    rng = np.random.default_rng(8)
    for _ in range(150):
        A = FiniteSubset.of(space, space.sample_points(rng, int(rng.integers(1, 6))))
        B = FiniteSubset.of(space, space.sample_points(rng, int(rng.integers(1, 6))))
        assert hausdorff(A, B) == pytest.approx(brute_hausdorff(A, B), abs=1e-12)
        assert hausdorff(A, B) == hausdorff(B, A)


def test_extremes_are_one_lipschitz():
    rng = np.random.default_rng(9)
    for _ in range(2000):
        A = FiniteSubset.of(I01, rng.uniform(0, 1, rng.integers(1, 6)))
        B = FiniteSubset.of(I01, rng.uniform(0, 1, rng.integers(1, 6)))
        h = hausdorff(A, B)
        assert abs(max(A) - max(B)) <= h + 1e-12
        assert abs(min(A) - min(B)) <= h + 1e-12


# --- separation and reductions ----------------------------------------------


def test_min_separation_examples():
    assert min_separation(S(I01, 0, 0.3, 1), 3) == pytest.approx(0.3)
    assert min_separation(S(I01, 0, 1), 3) == 0.0
    assert min_separation(S(I01, 0, 1 / 3, 2 / 3, 1), 4) == pytest.approx(1 / 3)
    with pytest.raises(InvalidInput):
        min_separation(S(I01, 0, 0.5, 1), 2)


def test_closest_pair_prefers_first():
    i, j, d = closest_pair(S(I01, 0.0, 0.25, 0.5, 0.75))
    assert (i, j) == (0, 1) and d == 0.25


def test_reduce_examples():
    line = Space.euclidean(1)
    A = S(line, (0,), (1,), (1.2,))
    dropped = reduce_by_one(A, 3, "drop")
    assert dropped == S(line, (0,), (1,))
    assert hausdorff(A, dropped) == pytest.approx(0.2)
    merged = reduce_by_one(A, 3, "merge")
    assert merged == S(line, (0,), (1.1,))
    assert hausdorff(A, merged) == pytest.approx(0.1)
    single = S(line, (0.5,))
    assert reduce_by_one(single, 3, "merge") is single


def test_reduce_errors():
    with pytest.raises(UnsupportedOperation):
        reduce_by_one(S(Space.circle("chordal"), 0.0, 0.1), 2, "merge")
    with pytest.raises(InvalidInput):
        reduce_by_one(S(I01, 0.0, 0.1), 2, "squash")
    with pytest.raises(InvalidInput):
        reduce_by_one(S(I01, 0.0, 0.1, 0.2), 2)
    # drop still works off geodesic spaces
    assert len(reduce_by_one(S(Space.circle("chordal"), 0.0, 0.1), 2, "drop")) == 1


@pytest.mark.parametrize(
    "space",
    [I01, CIRCLE, Space.euclidean(2), Space.pnorm(2, 1.0), Space.pnorm(2, math.inf),
     Space.tripod(1, 2, 0.5)],
    ids=str,
)
def test_reduction_bounds(space):
    rng = np.random.default_rng(13)
    for _ in range(300):
        n = int(rng.integers(2, 9))
        A = FiniteSubset.of(space, space.sample_points(rng, n))
        n = len(A)
        if n < 2:
            continue
        delta = min_separation(A, n)
        drop = reduce_by_one(A, n, "drop")
        merge = reduce_by_one(A, n, "merge")
        assert len(drop) == n - 1 and len(merge) <= n - 1
        assert drop.issubset(A)
        assert hausdorff(A, drop) <= delta + 1e-12
        assert hausdorff(A, merge) <= delta / 2 + 1e-12


def test_iterated_reduction_reaches_k():
    rng = np.random.default_rng(2)
    A = FiniteSubset.of(I01, rng.uniform(0, 1, 9))
    for k in range(1, 9):
        assert len(iterated_reduction(A, k)) <= k
        assert hausdorff(A, iterated_reduction(A, k)) >= exact_kcenter(A, k).radius - 1e-12


# --- pinned spaces ----------------------------------------------------------


def test_pinned_membership_examples():
    hat1, hat2 = PinnedSpec.dunce_hat(1), PinnedSpec.dunce_hat(2)
    assert hat1.n == 3 and hat2.n == 4
    assert pinned_member(S(I01, 0, 0.5, 1), hat1)
    assert not pinned_member(S(I01, 0, 0.5), hat1)
    assert pinned_member(S(I01, 0, 1), hat2)
    assert not pinned_member(S(I01, 0, 0.2, 0.4, 1), hat1)
    with pytest.raises(InvalidInput):
        PinnedSpec(S(I01, 0, 0.5, 1), 2)


# --- k-center ---------------------------------------------------------------


def test_kcenter_examples():
    A = S(I01, 0, 0.1, 0.5, 0.9, 1)
    res = exact_kcenter(A, 2)
    assert res.radius == pytest.approx(0.25, abs=1e-15)
    assert res.centers == S(I01, 0.25, 0.95)
    assert exact_kcenter(A, 5) == KCenterResult(A, 0.0)
    assert exact_kcenter(equally_spaced(4), 3).radius == pytest.approx(PI / 4, abs=1e-12)
    with pytest.raises(UnsupportedOperation):
        exact_kcenter(S(Space.euclidean(2), (0, 0), (1, 1)), 1)
    with pytest.raises(InvalidInput):
        exact_kcenter(A, 0)


def test_kcenter_json():
    out = exact_kcenter(S(I01, 0, 0.1, 0.5, 0.9, 1), 2).to_json()
    assert out["centers"] == [0.25, 0.95] and out["radius"] == pytest.approx(0.25)
    assert "points" not in out


def test_kcenter_accepts_one_dimensional_vectors():
    res = exact_kcenter(S(Space.euclidean(1), (0,), (0.1,), (0.5,), (0.9,), (1,)), 2)
    assert res.radius == pytest.approx(0.25)
    assert res.centers.points == ((0.25,), (0.95,))


@pytest.mark.parametrize("space", [Space.interval(-1.0, 2.0), CIRCLE], ids=str)
def test_kcenter_matches_enumeration(space):
    rng = np.random.default_rng(31)
    for _ in range(60):
        A = FiniteSubset.of(space, space.sample_points(rng, int(rng.integers(2, 7))))
        for k in range(1, len(A)):
            res = exact_kcenter(A, k)
            assert len(res.centers) <= k
            assert res.radius == hausdorff(A, res.centers)
            assert res.radius == pytest.approx(brute_kcenter_radius(A, k), abs=1e-9)


def test_kcenter_n_minus_one_is_half_separation():
    rng = np.random.default_rng(37)
    for _ in range(500):
        A = FiniteSubset.of(I01, rng.uniform(0, 1, rng.integers(2, 9)))
        n = len(A)
        assert exact_kcenter(A, n - 1).radius == pytest.approx(min_separation(A, n) / 2, abs=1e-9)


# --- circle cover -----------------------------------------------------------


def test_rotate():
    assert rotate(S(CIRCLE, 0.0, PI), PI / 2) == S(CIRCLE, PI / 2, 1.5 * PI)
    with pytest.raises(UnsupportedOperation):
        rotate(S(I01, 0.5), 1.0)


def test_circle_cover_examples():
    B = circle_k_cover(S(CIRCLE, 0.0, PI), 1)
    assert B.points == pytest.approx((PI / 2,))
    A = equally_spaced(4)
    B = circle_k_cover(A, 3)
    assert len(B) <= 3
    assert hausdorff(A, B) == pytest.approx(PI / 4, abs=1e-12)
    A = S(CIRCLE, 1.0, 2.0)
    assert circle_k_cover(A, 2) is A
    with pytest.raises(UnsupportedOperation):
        circle_k_cover(S(Space.circle("chordal"), 0.0, 1.0), 1)


def test_circle_cover_bound_sweep():
    rng = np.random.default_rng(41)
    for n in range(2, 13):
        for k in range(1, n):
            bound = PI * (n - 1) / (k * n)
            for _ in range(40):
                A = FiniteSubset.of(CIRCLE, rng.uniform(0, 2 * PI, n))
                B = circle_k_cover(A, k)
                h = hausdorff(A, B)
                assert len(B) <= k
                assert h <= bound + 1e-9
                assert h >= exact_kcenter(A, k).radius - 1e-12


@pytest.mark.parametrize("n", range(2, 13))
def test_equally_spaced_is_tight(n):
    A = equally_spaced(n, phase=0.3)
    assert exact_kcenter(A, n - 1).radius == pytest.approx(PI / n, abs=1e-9)
    assert hausdorff(A, circle_k_cover(A, n - 1)) == pytest.approx(PI / n, abs=1e-9)


def test_circle_cover_planted_clusters():
    # near-coincident points on either side of 0 stress the wraparound
    A = S(CIRCLE, 2 * PI - 1e-13, 0.0, 1e-13, PI)
    B = circle_k_cover(A, 2)
    assert len(B) <= 2
    assert hausdorff(A, B) <= PI * 3 / 8 + 1e-9
