"""Numerical verification that a candidate map is Grushin-conformal on a domain.

A map passes when, on a cell-centred sample grid of the domain:

* the Grushin Cauchy-Riemann operator Wbar vanishes at regular points,
* D_alpha g is a positive multiple of a rotation there,
* g1 vanishes exactly on the part of the domain lying on the axis,
* the zero set of g1 has as many components as the domain's axis part,
* D_alpha g has a finite nonzero limit on approach to the axis,
* no two samples collide under the map.
"""
import csv
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from ._powers import check_alpha
from .core import HorizontalJet, d_alpha_matrix, wirtinger, zero_threshold
from .errors import DegenerateDerivative, EvaluationOutsideDomain, GridTooCoarse, GrushinError, SingularPoint
from .maps import ConjugatedMap, EntireAffineMap, analytic_jet, axis_derivative, ext_boundary
from .holo import holo_eval
from .topology import axis_components

ANALYTIC_TOL = 1e-10
FD_TOL = 1e-5
ROTATION_TOL = 1e-8
FD_ROTATION_TOL = 1e-4
LIMIT_NORM_MIN = 1e-8
LIMIT_KS = (2, 3, 4, 5, 6)
INJECTIVITY_TOL = 1e-9
MIN_SAMPLES_PER_RECT = 4


@dataclass
class SampleGrid:
    xs: np.ndarray
    ys: np.ndarray
    inside: np.ndarray  # inside[j, i] for the point (xs[i], ys[j])
    axis_inside: np.ndarray = None

    @property
    def step(self):
        return float(self.xs[1] - self.xs[0]) if len(self.xs) > 1 else 0.0, (
            float(self.ys[1] - self.ys[0]) if len(self.ys) > 1 else 0.0
        )


def sample_grid(domain, n):
    """Cell-centred n x n grid over the bounding box, masked to the domain."""
    n = int(n)
    if n < 1:
        raise ValueError("grid resolution must be a positive integer")
    x0, x1, y0, y1 = (float(v) for v in domain.bbox())
    xs = x0 + (np.arange(n) + 0.5) * (x1 - x0) / n
    ys = y0 + (np.arange(n) + 0.5) * (y1 - y0) / n
    xx, yy = np.meshgrid(xs, ys)
    return SampleGrid(xs, ys, np.asarray(domain.contains(xx, yy), dtype=bool))


def _check_coverage(domain, grid):
    xx, yy = np.meshgrid(grid.xs, grid.ys)
    for k, (a, b, c, d) in enumerate(domain.rects):
        inside = (xx > float(a)) & (xx < float(b)) & (yy > float(c)) & (yy < float(d))
        if np.count_nonzero(inside) < MIN_SAMPLES_PER_RECT:
            raise GridTooCoarse(f"rectangle {k} holds fewer than {MIN_SAMPLES_PER_RECT} samples")


def _jets(gmap, x, y):
    """Jets at the points; returns (jet, usable mask, analytic flag)."""
    if gmap.has_analytic_jet:
        off = x != 0
        out = np.full((6,) + x.shape, np.nan)
        if np.any(off):
            out[:, off] = _safe_jet(gmap, x[off], y[off]).as_array()
        jet = HorizontalJet(*out)
        return jet, np.isfinite(jet.g1), True
    usable = np.ones(x.shape, dtype=bool)
    jets = []
    for k in range(x.size):
        try:
            jets.append(gmap.jet(x.flat[k], y.flat[k]).as_array())
        except EvaluationOutsideDomain:
            usable.flat[k] = False
            jets.append(np.full(6, np.nan))
    arr = np.array(jets).T.reshape((6,) + x.shape)
    return HorizontalJet(*arr), usable, False


def _safe_jet(gmap, x, y):
    """Analytic jet with g1 = 0 points set to nan instead of raising."""
    try:
        return analytic_jet(gmap, x, y)
    except SingularPoint:
        pass
    out = np.full((6,) + x.shape, np.nan)
    for k in range(x.size):
        try:
            out[(slice(None),) + np.unravel_index(k, x.shape)] = analytic_jet(gmap, x.flat[k], y.flat[k]).as_array()
        except SingularPoint:
            continue
    return HorizontalJet(*out)


@dataclass
class ConformalityReport:
    max_wbar_residual: float
    min_det_dalpha: float
    max_rotation_defect: float
    zero_set_discrepancy: float
    axis_component_count_source: int
    axis_component_count_image: int
    limit_condition: List[str]
    half_plane_swap: bool
    injective: bool
    samples: int
    reasons: List[str] = field(default_factory=list)

    @property
    def passed(self):
        return not self.reasons

    @property
    def verdict(self):
        return "pass" if self.passed else "fail"

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "reasons": list(self.reasons),
            "max_wbar_residual": self.max_wbar_residual,
            "min_det_dalpha": self.min_det_dalpha,
            "max_rotation_defect": self.max_rotation_defect,
            "zero_set_discrepancy": self.zero_set_discrepancy,
            "axis_component_count_source": self.axis_component_count_source,
            "axis_component_count_image": self.axis_component_count_image,
            "limit_condition": list(self.limit_condition),
            "half_plane_swap": self.half_plane_swap,
            "injective": self.injective,
            "samples": self.samples,
        }


def _hausdorff(a, b, empty_gap):
    if len(a) == 0 and len(b) == 0:
        return 0.0
    if len(a) == 0 or len(b) == 0:
        return empty_gap
    da, _ = cKDTree(b).query(a)
    db, _ = cKDTree(a).query(b)
    return float(max(da.max(), db.max()))


def _zero_points(grid, g1, eps_z, gmap):
    """Zeros of g1 found by sign changes along rows, plus direct axis evaluation."""
    pts = []
    xs, ys, inside = grid.xs, grid.ys, grid.inside
    for j, y in enumerate(ys):
        row = g1[j]
        ok = inside[j]
        for i in np.flatnonzero(ok & (np.abs(row) <= eps_z)):
            pts.append((xs[i], y))
        pair = ok[:-1] & ok[1:] & (row[:-1] * row[1:] < 0)
        for i in np.flatnonzero(pair):
            t = row[i] / (row[i] - row[i + 1])
            pts.append((xs[i] + t * (xs[i + 1] - xs[i]), y))
    axis_rows = _axis_rows(grid, gmap)
    for y, v in axis_rows:
        if abs(v) <= eps_z:
            pts.append((0.0, y))
    return np.array(pts).reshape(-1, 2), np.array([(0.0, y) for y, _ in axis_rows]).reshape(-1, 2)


def _axis_rows(grid, gmap):
    """(y, g1(0, y)) for sample rows whose axis point lies in the domain."""
    rows = []
    for j, y in enumerate(grid.ys):
        if grid.axis_inside[j]:
            try:
                g1, _ = gmap.evaluate(0.0, y)
                rows.append((float(y), float(g1)))
            except (GrushinError, ZeroDivisionError):
                rows.append((float(y), np.nan))
    return rows


def _zero_components(grid, g1, eps_z):
    """Components of the zero set: cells with a sign change, 8-connected."""
    s = np.sign(np.where(np.abs(g1) <= eps_z, 0.0, g1))
    inside = grid.inside
    full = inside[:-1, :-1] & inside[1:, :-1] & inside[:-1, 1:] & inside[1:, 1:]
    corners = np.stack([s[:-1, :-1], s[1:, :-1], s[:-1, 1:], s[1:, 1:]])
    mixed = (corners.max(axis=0) > 0) & (corners.min(axis=0) < 0)
    mixed |= np.any(corners == 0, axis=0)
    _, count = ndimage.label(full & mixed, structure=np.ones((3, 3), dtype=int))
    return int(count)


def _limit_status(alpha, gmap, domain, comps, eps_z):
    statuses = []
    for lo, hi in comps:
        y = 0.5 * (float(lo) + float(hi))
        if not isinstance(gmap, (ConjugatedMap, EntireAffineMap)):
            statuses.append("untested")
            continue
        g1_axis, _ = gmap.evaluate(0.0, y)
        if abs(float(g1_axis)) > eps_z:
            # the map does not fix the axis here; the zero-set check owns this failure
            statuses.append("untested")
            continue
        try:
            ext = float(ext_boundary(alpha, gmap, y))
        except DegenerateDerivative:
            statuses.append("divergent")
            continue
        if isinstance(gmap, EntireAffineMap):
            fp = complex(gmap.a)
        else:
            _, der = holo_eval(gmap.expr, 0.0, y)
            fp = complex(der)
        ref = ext * np.array([[fp.real, -fp.imag], [fp.imag, fp.real]])
        ref_norm = float(np.linalg.norm(ref))
        if not np.isfinite(ref_norm):
            statuses.append("divergent")
            continue
        if ref_norm < LIMIT_NORM_MIN:
            statuses.append("vanishing")
            continue
        errs = []
        for sgn in (1.0, -1.0):
            for k in LIMIT_KS:
                x = sgn * 10.0**-k
                if not domain.contains(x, y):
                    continue
                jet = analytic_jet(gmap, x, y)
                m = d_alpha_matrix(alpha, jet, x, zero_tol=0.0).as_array()
                errs.append(float(np.linalg.norm(m - ref)))
        if not errs:
            statuses.append("untested")
        elif max(errs[-2:]) <= 1e-3 * ref_norm and np.all(np.isfinite(errs)):
            statuses.append("finite-nonzero")
        else:
            statuses.append("divergent")
    return statuses


def verify_conformal(alpha, gmap, domain, grid=100):
    """Check a candidate map for Grushin conformality on ``domain``.

    Returns a ConformalityReport whose ``reasons`` list names every failed
    check: ``wbar_residual``, ``orientation``, ``rotation_form``,
    ``zero_set_discrepancy``, ``axis_component_count``, ``limit_condition``
    and ``injectivity``.
    """
    alpha = check_alpha(alpha)
    if gmap.alpha != alpha:
        raise ValueError("alpha of the map differs from the requested alpha")
    g = sample_grid(domain, grid)
    _check_coverage(domain, g)
    g.axis_inside = np.asarray(domain.contains(np.zeros_like(g.ys), g.ys), dtype=bool)
    xx, yy = np.meshgrid(g.xs, g.ys)
    mask = g.inside
    x, y = xx[mask], yy[mask]
    g1_all = np.full(xx.shape, np.nan)
    g2_all = np.full(xx.shape, np.nan)
    g1_all[mask], g2_all[mask] = gmap.evaluate(x, y)
    eps_z = zero_threshold(g1_all[mask])

    jet, usable, analytic = _jets(gmap, x, y)
    regular = usable & (x != 0) & (np.abs(jet.g1) > eps_z)
    tol = ANALYTIC_TOL if analytic else FD_TOL
    rot_tol = ROTATION_TOL if analytic else FD_ROTATION_TOL
    reasons = []

    w, wbar = wirtinger(alpha, jet, x)
    wr = np.abs(wbar[regular])
    max_wbar = float(wr.max()) if wr.size else 0.0
    if wr.size and np.any(wr > tol * np.maximum(1.0, np.abs(w[regular]))):
        reasons.append("wbar_residual")

    if np.any(regular):
        dm = d_alpha_matrix(alpha, _subjet(jet, regular), x[regular], zero_tol=0.0)
        det = dm.det
        min_det = float(det.min())
        defect = dm.rotation_defect()
        max_defect = float(np.max(defect / np.maximum(dm.norm, 1e-300)))
        if min_det <= 0:
            reasons.append("orientation")
        if np.any(defect > rot_tol * dm.norm):
            reasons.append("rotation_form")
        sx = np.sign(x[regular])
        sg = np.sign(jet.g1[regular])
        swap = bool(np.all(sx != sg))
    else:
        min_det, max_defect, swap = float("nan"), float("nan"), False

    zeros, axis_pts = _zero_points(g, g1_all, eps_z, gmap)
    gap = _hausdorff(zeros, axis_pts, float(domain.diameter()))
    dx, dy = g.step
    if gap > max(dx, dy):
        reasons.append("zero_set_discrepancy")

    comps = axis_components(domain)
    n_source = len(comps)
    n_image = _zero_components(g, g1_all, eps_z)
    if n_source != n_image:
        reasons.append("axis_component_count")

    statuses = _limit_status(alpha, gmap, domain, comps, eps_z)
    if any(s in ("vanishing", "divergent") for s in statuses):
        reasons.append("limit_condition")

    images = np.column_stack([g1_all[mask], g2_all[mask]])
    sources = np.column_stack([x, y])
    injective = True
    for i, j in cKDTree(images).query_pairs(INJECTIVITY_TOL):
        if np.hypot(*(sources[i] - sources[j])) > INJECTIVITY_TOL:
            injective = False
            break
    if not injective:
        reasons.append("injectivity")

    return ConformalityReport(
        max_wbar_residual=max_wbar,
        min_det_dalpha=min_det,
        max_rotation_defect=max_defect,
        zero_set_discrepancy=gap,
        axis_component_count_source=n_source,
        axis_component_count_image=n_image,
        limit_condition=statuses,
        half_plane_swap=swap,
        injective=injective,
        samples=int(mask.sum()),
        reasons=reasons,
    )


def _subjet(jet, sel):
    return HorizontalJet(*(np.asarray(v)[sel] for v in (jet.g1, jet.g2, jet.g1x, jet.g1y, jet.g2x, jet.g2y)))


def grid_rows(alpha, gmap, domain, resolution):
    """Rows (x, y, g1, g2, |Wbar|, det D_alpha) over the sample grid, y-major.

    Points on the axis or on the zero set of g1 get nan for the derivative
    columns.
    """
    alpha = check_alpha(alpha)
    g = sample_grid(domain, resolution)
    xx, yy = np.meshgrid(g.xs, g.ys)
    x, y = xx[g.inside], yy[g.inside]
    g1, g2 = gmap.evaluate(x, y)
    jet, usable, _ = _jets(gmap, x, y)
    eps_z = zero_threshold(g1) if g1.size else 0.0
    regular = usable & (x != 0) & (np.abs(jet.g1) > eps_z)
    wbar_abs = np.full(x.shape, np.nan)
    det = np.full(x.shape, np.nan)
    if np.any(regular):
        _, wbar = wirtinger(alpha, _subjet(jet, regular), x[regular])
        wbar_abs[regular] = np.abs(wbar)
        det[regular] = d_alpha_matrix(alpha, _subjet(jet, regular), x[regular], zero_tol=0.0).det
    return np.column_stack([x, y, g1, g2, wbar_abs, det])


GRID_HEADER = ("x", "y", "g1", "g2", "wbar_abs", "det_dalpha")


def emit_grid(alpha, gmap, domain, resolution, path):
    """Write ``grid_rows`` as CSV with 17 significant digits."""
    rows = grid_rows(alpha, gmap, domain, resolution)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(GRID_HEADER)
        for r in rows:
            out.writerow(["%.17g" % v for v in r])
    return len(rows)
