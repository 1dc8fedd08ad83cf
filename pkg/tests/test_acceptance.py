"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import time

import numpy as np
import pytest

from grushin import (
    ClosedFormCurve,
    ConjugatedMap,
    EntireAffineMap,
    HorizontalJet,
    Joukovski,
    RealAffine,
    RectilinearDomain,
    Shift,
    admissibility_check,
    analytic_jet,
    axis_components,
    cc_distance_upper,
    classify_entire,
    entire_map,
    ext_boundary,
    finite_diff_jet,
    graph,
    grushin_length,
    identity_map,
    incidence_graph,
    length_distortion,
    obstruction_check,
    verify_conformal,
    wirtinger,
    wirtinger_identity_residual,
)
from grushin._powers import apow
from grushin.core import dilation
from grushin.verify import sample_grid

ALPHAS = (0.5, 1.0, 2.0)

OMEGA = [(-2, -1, -3, 2), (-2, 1, 1, 2), (-2, 1, -1, 0), (-2, 1, -3, -2)]
OMEGA_PRIME = [(-2, 2, 1, 2), (-2, -1, -1, 2), (-2, 2, -1, 0), (1, 2, -3, 0), (-2, 2, -3, -2)]

SYMMETRIC = RectilinearDomain.from_rects([(-2, 2, -1, 1)])
RIGHT_STRIP = RectilinearDomain.from_rects([(1.2, 3, 0.5, 2.5)])


def criterion_cases():
    for a in ALPHAS:
        yield a, "identity", identity_map(a), SYMMETRIC
        yield a, "real_affine", ConjugatedMap(a, RealAffine(3.0, -1.0)), SYMMETRIC
        yield a, "joukovski", ConjugatedMap(a, Joukovski()), RIGHT_STRIP


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return emit


def _relative_identity_residual(alpha, jet, x):
    w, wbar = wirtinger(alpha, jet, x)
    res = wirtinger_identity_residual(alpha, jet, x)
    scale = np.abs(w) ** 2 + np.abs(wbar) ** 2
    return np.abs(res) / np.maximum(scale, 1e-300)


def test_criterion_01_conjugation_soundness(report):
    worst_wbar, worst_time, failures = 0.0, 0.0, []
    for a, name, gmap, dom in criterion_cases():
        t0 = time.perf_counter()
        rep = verify_conformal(a, gmap, dom, grid=100)
        dt = time.perf_counter() - t0
        worst_wbar = max(worst_wbar, rep.max_wbar_residual)
        worst_time = max(worst_time, dt)
        if not rep.passed or rep.max_wbar_residual > 1e-10 or dt > 5.0:
            failures.append((a, name, rep.reasons, dt))
    report(1, not failures, f"max|Wbar|={worst_wbar:.2e} slowest={worst_time:.2f}s failures={failures}")


def test_criterion_02_algebraic_identity(report):
    rng = np.random.default_rng(20240602)
    n = 100_000
    alpha = rng.uniform(0.1, 3.0, n)
    x = rng.uniform(-3, 3, n)
    vals = rng.uniform(-3, 3, (6, n))
    worst = 0.0
    for a in np.unique(np.round(alpha, 1)):
        sel = np.round(alpha, 1) == a
        jet = HorizontalJet(*vals[:, sel])
        worst = max(worst, float(_relative_identity_residual(a, jet, x[sel]).max()))
    grid_worst = 0.0
    for a, _, gmap, dom in criterion_cases():
        g = sample_grid(dom, 100)
        xx, yy = np.meshgrid(g.xs, g.ys)
        xs, ys = xx[g.inside], yy[g.inside]
        jet = analytic_jet(gmap, xs, ys)
        grid_worst = max(grid_worst, float(_relative_identity_residual(a, jet, xs).max()))
    ok = worst <= 1e-10 and grid_worst <= 1e-10
    report(2, ok, f"random jets {worst:.2e}, criterion-1 grids {grid_worst:.2e}")


def test_criterion_03_entire_classification(report):
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(100):
        a_ = rng.uniform(0.2, 3.0)
        a = rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 5.0)
        b = rng.uniform(-3.0, 3.0)
        c = classify_entire(entire_map(a_, a, b))
        worst = max(worst, abs(c.a - a), abs(c.b - b))
    xs, ys = np.meshgrid(np.linspace(-2, 2, 41), np.linspace(-2, 2, 41))
    formula = 0.0
    for a_ in ALPHAS:
        for a, b in ((3.0, -1.0), (-0.5, 2.0), (1.0, 0.0)):
            conj = ConjugatedMap(a_, RealAffine(a, b)).evaluate(xs, ys)
            direct = EntireAffineMap(a_, a, b).evaluate(xs, ys)
            formula = max(formula, max(float(np.max(np.abs(u - v))) for u, v in zip(conj, direct)))
    ok = worst <= 1e-12 and formula <= 1e-12
    report(3, ok, f"round trip {worst:.2e}, conjugate vs formula {formula:.2e}")


def test_criterion_04_counterexample(report):
    om = RectilinearDomain.from_rects(OMEGA)
    omp = RectilinearDomain.from_rects(OMEGA_PRIME)
    t0 = time.perf_counter()
    res = obstruction_check(om, omp)
    same = obstruction_check(om, om)
    dt = time.perf_counter() - t0
    g, gp = incidence_graph(om), incidence_graph(omp)
    degs = sorted(g.side_degrees(), reverse=True), sorted(gp.side_degrees(), reverse=True)
    counts = len(axis_components(om)), len(axis_components(omp))
    ok = (
        res.obstructed
        and not same.obstructed
        and counts == (3, 3)
        and degs == ([3, 1, 1, 1], [2, 2, 1, 1])
        and dt <= 1.0
    )
    report(4, ok, f"axis counts {counts}, side degrees {degs}, {res.certificate['kind']}, {dt:.3f}s")


def _dilated(alpha, curve, lam):
    def pos(t):
        return dilation(alpha, lam, *curve.position(t))

    def der(t):
        dx, dy = curve.derivative(t)
        return lam * dx, lam ** (alpha + 1) * dy

    return ClosedFormCurve(pos, der, curve.t0, curve.t1)


def test_criterion_05_metric_exactness(report):
    dists = {}
    for a in ALPHAS:
        dists[a] = cc_distance_upper(a, (1.0, 0.0), (3.0, 0.0), knots=33, iterations=2000).distance_upper
    curves = [graph([0, 0, 0, 1], -1, 1), graph([0.2, 1.0, -0.5], 0, 1, x_coeffs=[0.5, 1.0])]
    scaling = 0.0
    for a in ALPHAS:
        for c in curves:
            base = grushin_length(a, c).value
            for lam in (0.5, 2.0, 10.0):
                scaled = grushin_length(a, _dilated(a, c, lam)).value
                scaling = max(scaling, abs(scaled / (lam * base) - 1.0))
    ok = all(2.0 <= d <= 2.02 for d in dists.values()) and scaling <= 1e-9
    report(5, ok, f"distances {dists}, dilation scaling {scaling:.2e}")


def random_off_axis_curve(rng):
    knots = np.array([0.0, 0.5, 1.0])
    xc = np.polynomial.polynomial.polyfit(knots, rng.uniform(0.4, 2.0, 3), 2)
    yc = np.polynomial.polynomial.polyfit(knots, rng.uniform(-1.5, 1.5, 3), 2)
    return graph(yc, 0.0, 1.0, x_coeffs=xc)


def test_criterion_06_length_distortion(report):
    rng = np.random.default_rng(6)
    worst = {"joukovski": 0.0, "entire": 0.0}
    for k in range(50):
        a = ALPHAS[k % 3]
        curve = random_off_axis_curve(rng)
        maps = {
            "joukovski": ConjugatedMap(a, Joukovski()),
            "entire": EntireAffineMap(a, rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 3.0), rng.uniform(-2, 2)),
        }
        for name, gmap in maps.items():
            r = length_distortion(a, gmap, curve)
            worst[name] = max(worst[name], abs(r.pushed_length - r.weighted_length) / r.weighted_length)
    ok = max(worst.values()) <= 1e-6
    report(6, ok, f"worst relative gap {worst}")


def test_criterion_07_admissibility(report):
    cubic = admissibility_check(1.0, graph([0, 0, 0, 1], -1, 1), levels=3)
    diag = admissibility_check(1.0, graph([0, 1], -1, 1), levels=3)
    ok = cubic.verdict == "admissible" and diag.verdict == "not-admissible" and diag.levels_used <= 3
    report(7, ok, f"(t,t^3) {cubic.verdict} ({cubic.integral_of_dy_over_x_alpha:.12f}), (t,t) {diag.verdict} at level {diag.levels_used}")


def test_criterion_08_zero_set_necessity(report):
    dom = RectilinearDomain.from_rects([(-2, 1, -1, 1)])
    reasons = {a: verify_conformal(a, ConjugatedMap(a, Shift(1.0)), dom, grid=100).reasons for a in ALPHAS}
    ok = all(r == ["zero_set_discrepancy"] for r in reasons.values())
    report(8, ok, f"failure reasons {reasons}")


def test_criterion_09_differentiation_consistency(report):
    hs = 10.0 ** -np.arange(2, 6)
    slopes = []
    for a in ALPHAS:
        gmap = ConjugatedMap(a, Joukovski())
        x, y = 1.7, 0.9
        exact = analytic_jet(gmap, x, y).as_array()[2:]
        errs = [np.max(np.abs(finite_diff_jet(gmap.evaluate, x, y, h=h).as_array()[2:] - exact)) for h in hs]
        slopes.append(float(np.polyfit(np.log(hs), np.log(errs), 1)[0]))
    ok = min(slopes) >= 1.9
    report(9, ok, f"log-log slopes {np.round(slopes, 3).tolist()}")


def test_criterion_10_ext_continuity(report):
    alpha, y = 1.0, 2.0
    gmap = ConjugatedMap(alpha, Joukovski())
    target = float(ext_boundary(alpha, gmap, y))
    xs = 10.0 ** -np.arange(2, 7)
    g1, _ = gmap.evaluate(xs, np.full_like(xs, y))
    ratio = apow(xs, alpha) / apow(g1, alpha)
    errs = np.abs(ratio - target)
    floor = 1e-14
    monotone = bool(np.all((np.diff(errs) < 0) | (errs[1:] <= floor)))
    ok = abs(target - 2 / np.sqrt(5)) <= 1e-12 and monotone
    report(10, ok, f"Ext(2)={target:.6f} errors {np.array2string(errs, precision=2)}")
