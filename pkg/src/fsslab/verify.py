"""Named property suites run by ``fsslab verify``.

Each suite takes ``(seed, tol, trials)`` and returns a list of :class:`Check`.
A failing check carries a serialized witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .john import PolygonGauge, john_transform
from .lab import Sampler, SearchConfig, displacement_residual, estimate_lipschitz
from .metric import Space, geodesic_point, hadamard_residual, project_to_segment
from .retractions import (
    RetractionCandidate,
    adjoin_two,
    check_retraction_contract,
    clamp_map,
    inclusion_map,
    induced,
    induced_map,
    linear_map,
    merge_retraction,
    normalize_unit,
    normalized_retraction,
    pinned_truncate,
    transfer_retraction,
    truncated_retraction,
)
from .subsets import (
    FiniteSubset,
    circle_k_cover,
    exact_kcenter,
    hausdorff,
    min_separation,
    reduce_by_one,
)

SQRT2 = math.sqrt(2.0)

SHIPPED_SPACES = (
    Space.euclidean(2),
    Space.pnorm(3, 1.0),
    Space.pnorm(2, math.inf),
    Space.pnorm(2, 1.5),
    Space.circle("arclength"),
    Space.circle("chordal"),
    Space.interval(0.0, 1.0),
    Space.tripod(1.0, 2.0, 0.5),
)


@dataclass
class Check:
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    witness: object = None

    def to_json(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "measured": self.measured}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def random_subset(space: Space, rng, size: int) -> FiniteSubset:
    """Uniform random subset with exactly ``size`` points."""
    A = FiniteSubset.of(space, space.sample_points(rng, size))
    while len(A) < size:
        A = A.union([space.sample_point(rng)])
    return A


def _sets_json(*sets):
    return [S.to_json() for S in sets]


def suite_metric(seed: int, tol: float, trials: int) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks = []
    for space in SHIPPED_SPACES:
        worst, witness = 0.0, None
        for _ in range(trials):
            x, y, z = (space.sample_point(rng) for _ in range(3))
            d = space.distance
            excess = max(
                d(x, z) - d(x, y) - d(y, z),
                abs(d(x, y) - d(y, x)),
                d(x, x),
            )
            if excess > worst:
                worst, witness = excess, [space.point_to_json(v) for v in (x, y, z)]
        checks.append(Check(f"metric axioms on {space}", worst <= tol,
                            {"max_violation": worst}, None if worst <= tol else witness))
        if not space.is_geodesic:
            continue
        worst = 0.0
        for _ in range(max(1, trials // 16)):
            p, q = space.sample_point(rng), space.sample_point(rng)
            L = space.distance(p, q)
            ts = np.linspace(0.0, 1.0, 16)
            pts = [geodesic_point(space, p, q, t) for t in ts]
            for i in range(16):
                for j in range(16):
                    err = abs(space.distance(pts[i], pts[j]) - abs(ts[i] - ts[j]) * L)
                    worst = max(worst, err / max(L, 1.0))
        checks.append(Check(f"geodesic identity on {space}", worst <= tol, {"max_rel_error": worst}))
    for space in (Space.euclidean(3), Space.interval(0, 1), Space.tripod(1, 2, 0.5)):
        worst = 0.0
        for _ in range(trials):
            p, q, z, w = (space.sample_point(rng) for _ in range(4))
            a, b = project_to_segment(space, p, q, z), project_to_segment(space, p, q, w)
            worst = max(worst, space.distance(a, b) - space.distance(z, w))
        checks.append(Check(f"segment projection is 1-Lipschitz on {space}", worst <= tol,
                            {"max_expansion": worst}))
    return checks


def suite_hausdorff(seed: int, tol: float, trials: int) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks = []
    for space in SHIPPED_SPACES:
        worst, asym, witness = 0.0, 0.0, None
        for _ in range(trials):
            A, B, C = (random_subset(space, rng, int(rng.integers(1, 6))) for _ in range(3))
            ab, bc, ac = hausdorff(A, B), hausdorff(B, C), hausdorff(A, C)
            asym = max(asym, abs(ab - hausdorff(B, A)))
            if ac - ab - bc > worst:
                worst, witness = ac - ab - bc, _sets_json(A, B, C)
        ok = worst <= tol and asym == 0.0
        checks.append(Check(f"Hausdorff metric axioms on {space}", ok,
                            {"max_triangle_violation": worst, "max_asymmetry": asym},
                            None if ok else witness))
    space = Space.interval(0.0, 1.0)
    worst = 0.0
    for _ in range(trials):
        A, B = (random_subset(space, rng, int(rng.integers(1, 8))) for _ in range(2))
        d = hausdorff(A, B)
        worst = max(worst, abs(A.points[-1] - B.points[-1]) - d, abs(A.points[0] - B.points[0]) - d)
    checks.append(Check("max/min are 1-Lipschitz in the Hausdorff metric", worst <= 1e-12,
                        {"max_excess": worst}))
    return checks


def suite_reduction(seed: int, tol: float, trials: int) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks = []
    for space in SHIPPED_SPACES:
        worst_drop = worst_merge = 0.0
        for _ in range(trials):
            n = int(rng.integers(2, 9))
            A = random_subset(space, rng, n)
            delta = min_separation(A, n)
            worst_drop = max(worst_drop, hausdorff(A, reduce_by_one(A, n, "drop")) - delta)
            if space.is_geodesic:
                worst_merge = max(worst_merge, hausdorff(A, reduce_by_one(A, n, "merge")) - delta / 2)
        ok = worst_drop <= 1e-12 and worst_merge <= 1e-12
        checks.append(Check(f"one-point reductions on {space}", ok,
                            {"drop_excess": worst_drop, "merge_excess": worst_merge}))
    space = Space.interval(0.0, 1.0)
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(2, 9))
        A = random_subset(space, rng, n)
        worst = max(worst, abs(exact_kcenter(A, n - 1).radius - min_separation(A, n) / 2))
    checks.append(Check("k-center radius at k = n - 1 is half the separation", worst <= tol,
                        {"max_error": worst}))
    return checks


def suite_displacement(seed: int, tol: float, trials: int) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks = []
    for n in (3, 4, 6):
        space = Space.interval(0.0, 1.0)
        r = merge_retraction(space, n)
        cfg = SearchConfig(seed=seed, trials=max(50, trials // 4), steps=50)
        cert = estimate_lipschitz(r, Sampler(space, n, mode="clustered"), cfg)
        L = 10.0 * cert.ratio
        worst, witness = math.inf, None
        for _ in range(trials):
            A = random_subset(space, rng, int(rng.integers(1, n + 1)))
            res = displacement_residual(r, A, L)
            if res < worst:
                worst, witness = res, A.to_json()
        ok = worst >= -tol
        checks.append(Check(f"displacement inequality for merge, n={n}", ok,
                            {"measured_ratio": cert.ratio, "L": L, "min_residual": worst},
                            None if ok else witness))
    line = Space.euclidean(1)
    base = merge_retraction(line, 3)
    shifted = RetractionCandidate(
        "shift", line, 3, 2,
        lambda A: FiniteSubset.of(line, [(x[0] + 1.0,) for x in base(A).points]),
    )
    res = displacement_residual(shifted, FiniteSubset.of(line, [(0.0,), (1.0,), (1.2,)]), 0.0)
    checks.append(Check("shifted map is flagged", res < 0, {"residual": res}))
    return checks


def suite_transfer(seed: int, tol: float, trials: int) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks = []
    for d in (1, 2):
        space = Space.euclidean(d)
        for L in (0.5, 1.0, 2.0):
            Q = np.linalg.qr(rng.normal(size=(d, d)))[0]
            g = linear_map(space, L * Q, name=f"linear{L:g}")
            gn = induced(g)
            worst = 0.0
            for _ in range(trials):
                A, B = (random_subset(space, rng, int(rng.integers(1, 6))) for _ in range(2))
                din = hausdorff(A, B)
                if din > 0:
                    worst = max(worst, hausdorff(gn(A), gn(B)) / din)
            ok = worst <= L + tol and worst >= 0.999 * L
            checks.append(Check(f"induced map ratio on {space}, L={L:g}", ok, {"sup_ratio": worst}))
    line, unit = Space.euclidean(1), Space.interval(0.0, 1.0)
    s = transfer_retraction(clamp_map(line, unit), merge_retraction(line, 4), inclusion_map(unit, line))
    bad = 0
    for _ in range(trials):
        A = random_subset(unit, rng, int(rng.integers(1, 5)))
        bad += not check_retraction_contract(s, A)
    checks.append(Check("transferred retraction fixes X(k)", bad == 0, {"violations": bad}))
    return checks


def suite_circle_cover(seed: int, tol: float, trials: int) -> list[Check]:
    rng = np.random.default_rng(seed)
    circle = Space.circle("arclength")
    worst, witness, too_many = 0.0, None, 0
    per = max(1, trials // 10)
    for n in range(2, 13):
        for k in range(1, n):
            bound = math.pi * (n - 1) / (k * n)
            for _ in range(per):
                A = random_subset(circle, rng, n)
                B = circle_k_cover(A, k)
                too_many += len(B) > k
                ratio = hausdorff(A, B) / bound
                if ratio > worst:
                    worst, witness = ratio, {"A": A.to_json(), "k": k}
    ok = worst <= 1.0 + tol and too_many == 0
    checks = [Check("circle k-cover stays within pi(n-1)/(kn)", ok,
                    {"max_ratio_to_bound": worst, "oversized": too_many}, None if ok else witness)]
    worst = 0.0
    for n in range(2, 13):
        A = FiniteSubset.of(circle, [2 * math.pi * j / n for j in range(n)])
        worst = max(worst, abs(exact_kcenter(A, n - 1).radius - math.pi / n))
    checks.append(Check("equally spaced sets attain the bound at k = n - 1", worst <= tol,
                        {"max_error": worst}))
    return checks


def suite_john(seed: int, tol: float, trials: int) -> list[Check]:
    checks = []
    norms = [(f"p={p:g}", Space.pnorm(2, p)) for p in (1.0, 1.5, 2.0, 3.0, math.inf)]
    norms.append(("regular 12-gon", PolygonGauge.regular(12)))
    for label, norm in norms:
        jt = john_transform(norm)
        ok = jt.norm_T <= SQRT2 + 1e-6 and jt.norm_Tinv <= 1 + 1e-6
        checks.append(Check(f"John transform certificate, {label}", ok,
                            {"norm_T": jt.norm_T, "norm_Tinv": jt.norm_Tinv}))
    return checks


def suite_pipeline(seed: int, tol: float, trials: int) -> list[Check]:
    rng = np.random.default_rng(seed)
    unit, two = Space.interval(0.0, 1.0), Space.interval(0.0, 2.0)
    checks = []

    bad = 0
    for _ in range(trials):
        S = random_subset(unit, rng, int(rng.integers(2, 8)))
        N = normalize_unit(S)
        bad += N.points[0] != 0.0 or N.points[-1] != 1.0
    checks.append(Check("normalization hits 0 and 1 exactly", bad == 0, {"violations": bad}))

    worst, count = 0.0, 0
    while count < trials:
        c = float(rng.uniform(0.05, 0.6))
        S, T = (_pinned_configuration(rng, c) for _ in range(2))
        d = hausdorff(S, T)
        if d >= 1 - c:
            continue
        count += 1
        worst = max(worst, hausdorff(pinned_truncate(S, c), pinned_truncate(T, c)) - d)
    checks.append(Check("truncation does not expand distances below 1 - c", worst <= tol,
                        {"max_expansion": worst}))

    worst = 0.0
    for _ in range(trials):
        A, B = (random_subset(unit, rng, int(rng.integers(1, 6))) for _ in range(2))
        worst = max(worst, abs(hausdorff(adjoin_two(A), adjoin_two(B)) - hausdorff(A, B)))
    checks.append(Check("adjoining 2 is an isometry", worst <= 1e-12, {"max_error": worst}))

    bad = 0
    for n in (4, 6, 8):
        s = normalized_retraction(merge_retraction(unit, n))
        sampler = Sampler(unit, n, min_size=2, pins=(0.0, 1.0))
        for _ in range(max(1, trials // 10)):
            bad += not check_retraction_contract(s, sampler.subset(rng))
    for n in (5, 7, 9):
        s = truncated_retraction(merge_retraction(two, n), 1.0 / (n - 2))
        sampler = Sampler(unit, n - 1, min_size=2, pins=(0.0, 1.0))
        for _ in range(max(1, trials // 10)):
            bad += not check_retraction_contract(s, sampler.subset(rng))
    checks.append(Check("normalized and truncated pipelines are retractions", bad == 0,
                        {"violations": bad}))
    return checks


def _pinned_configuration(rng, c: float) -> FiniteSubset:
    """Random subset of [0, 2] meeting the three pin windows and avoiding the middle gap."""
    h = c / 2
    pts = [rng.uniform(0, h), rng.uniform(1 - h, 1 + h), rng.uniform(2 - h, 2)]
    for _ in range(int(rng.integers(0, 5))):
        pts.append(rng.uniform(0, 1 + h) if rng.random() < 0.8 else rng.uniform(2 - h, 2))
    return FiniteSubset.of(Space.interval(0.0, 2.0), pts)


def suite_hadamard(seed: int, tol: float, trials: int) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks = []
    for space in (Space.euclidean(2), Space.euclidean(4), Space.interval(-1, 3), Space.tripod(1, 2, 0.5)):
        worst, witness = math.inf, None
        for _ in range(trials):
            p, q, z = (space.sample_point(rng) for _ in range(3))
            t = float(rng.uniform())
            res = hadamard_residual(space, p, q, z, t)
            if res < worst:
                worst, witness = res, [space.point_to_json(v) for v in (p, q, z)] + [t]
        ok = worst >= -tol
        checks.append(Check(f"CAT(0) inequality on {space}", ok, {"min_residual": worst},
                            None if ok else witness))
    res = hadamard_residual(Space.circle(), 0.0, math.pi, 1.5 * math.pi, 0.5)
    checks.append(Check("circle violates the CAT(0) inequality", abs(res + math.pi**2) <= tol,
                        {"residual": res}))
    return checks


SUITES = {
    "metric": suite_metric,
    "hausdorff": suite_hausdorff,
    "lemma31": suite_reduction,
    "lemma32": suite_displacement,
    "lemma33": suite_transfer,
    "lemma42": suite_circle_cover,
    "john": suite_john,
    "pipeline": suite_pipeline,
    "hadamard": suite_hadamard,
}


def run_suite(name: str, seed: int = 0, tol: float = 1e-9, trials: int = 1000) -> list[Check]:
    return SUITES[name](seed, tol, trials)
