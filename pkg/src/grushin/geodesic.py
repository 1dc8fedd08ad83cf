"""Upper bounds on the Carnot-Caratheodory distance by polyline length minimisation.

A polyline joining p to q is shortened by pattern-search coordinate descent.
The knot count roughly doubles from level to level; each level starts from
the converged curve of the previous one with knots inserted in its longest
segments, which leaves the curve (and its length) unchanged. The final curve
is measured with ``grushin_length``; any joining curve bounds the distance
from above.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import hyp2f1, roots_legendre

from ._powers import check_alpha
from .curves import PolylineCurve, grushin_length

_GL_X, _GL_W = roots_legendre(16)
NARROW = 1.5  # segments with max|x| <= NARROW * min|x| are integrated directly
MIN_STEP = 1e-8  # relative to the step scale
MAX_SWEEPS = 20_000  # cap for levels before the last; exceeds any sensible iteration budget
STALL_WINDOW = 10  # sweeps over which progress is measured
STALL_RTOL = 1e-7  # a level stops once a window improves the length by less than this


def _from_axis(alpha, m, b):
    """Integral of sqrt(1 + m^2 u^(-2 alpha)) over u in [0, b] for alpha < 1, m > 0."""
    f = np.minimum(b, 0.5 * m ** (1.0 / alpha))
    c = (1.0 - alpha) / (2.0 * alpha)
    head = m * f ** (1.0 - alpha) / (1.0 - alpha) * hyp2f1(-0.5, c, 1.0 + c, -(f ** (2 * alpha)) / m**2)
    return head + _between(alpha, m, f, b)


def _between(alpha, m, a, b):
    """Integral of sqrt(1 + m^2 u^(-2 alpha)) over u in [a, b], 0 < a <= b, in log space."""
    a, b, m = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float), np.asarray(m, float))
    out = np.zeros(a.shape)
    live = b > a
    if not np.any(live):
        return out
    wa, wb = np.log(a[live]), np.log(b[live])
    mm = m[live]
    width = min(1.0, np.pi / (4.0 * alpha))
    panels = np.maximum(1, np.ceil((wb - wa) / width)).astype(int)
    seg = np.repeat(np.arange(len(wa)), panels)
    k = np.arange(len(seg)) - np.repeat(np.cumsum(panels) - panels, panels)
    h = (wb - wa)[seg] / panels[seg]
    lo = wa[seg] + k * h
    w = lo[:, None] + 0.5 * h[:, None] * (_GL_X[None, :] + 1.0)
    mw = mm[seg][:, None]
    vals = np.sqrt(np.exp(2 * w) + mw**2 * np.exp((2 - 2 * alpha) * w))
    panel_sums = 0.5 * h * (vals @ _GL_W)
    out[live] = np.bincount(seg, weights=panel_sums, minlength=len(wa))
    return out


def _direct(alpha, x0, dx, dy):
    """Gauss-Legendre in the segment parameter; accurate when |x| varies little."""
    s = 0.5 * (_GL_X + 1.0)
    x = x0[:, None] + dx[:, None] * s[None, :]
    vals = np.sqrt(dx[:, None] ** 2 + dy[:, None] ** 2 / np.abs(x) ** (2 * alpha))
    return 0.5 * (vals @ _GL_W)


def segment_lengths(alpha, x0, y0, x1, y1):
    """Grushin length of the straight segments (x0, y0) -> (x1, y1), vectorised."""
    x0, y0, x1, y1 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x0, y0, x1, y1)))
    dx, dy = x1 - x0, y1 - y0
    out = np.zeros(x0.shape)
    flat = dy == 0
    out[flat] = np.abs(dx[flat])
    vert = (dx == 0) & ~flat
    with np.errstate(divide="ignore"):
        out[vert] = np.abs(dy[vert]) / np.abs(x0[vert]) ** alpha
    rest = ~flat & ~vert
    if not np.any(rest):
        return out
    a0, a1 = np.abs(x0[rest]), np.abs(x1[rest])
    m = np.abs(dy[rest] / dx[rest])
    cross = x0[rest] * x1[rest] < 0
    touch = (np.minimum(a0, a1) == 0) | cross
    val = np.zeros(a0.shape)
    lo, hi = np.minimum(a0, a1), np.maximum(a0, a1)
    narrow = ~touch & (hi <= NARROW * lo)
    wide = ~touch & ~narrow
    val[wide] = _between(alpha, m[wide], lo[wide], hi[wide])
    if np.any(narrow):
        val[narrow] = _direct(alpha, x0[rest][narrow], dx[rest][narrow], dy[rest][narrow])
    if np.any(touch):
        if alpha >= 1:
            val[touch] = np.inf
        else:
            t0 = _from_axis(alpha, m[touch], a0[touch])
            t1 = _from_axis(alpha, m[touch], a1[touch])
            # a touching (not crossing) segment has one zero end contributing nothing
            val[touch] = np.where(cross[touch], t0 + t1, np.maximum(t0, t1))
    out[rest] = val
    return out


def polyline_length(alpha, pts):
    return float(np.sum(segment_lengths(alpha, pts[:-1, 0], pts[:-1, 1], pts[1:, 0], pts[1:, 1])))


@dataclass
class DistanceResult:
    distance_upper: float
    lower_bound: float
    curve: PolylineCurve
    objective: float
    sweeps: int

    def to_dict(self):
        return {
            "distance_upper": self.distance_upper if np.isfinite(self.distance_upper) else "inf",
            "lower_bound": self.lower_bound,
            "knots": [list(map(float, p)) for p in self.curve.points],
            "sweeps": self.sweeps,
        }


def _base_paths(alpha, p, q):
    """Starting polylines that avoid crossing the axis with vertical motion."""
    px, py = p
    qx, qy = q
    paths = []
    if qx != 0:
        paths.append(np.array([p, (qx, py), q]))
    if px != 0:
        paths.append(np.array([p, (px, qy), q]))
    if px * qx >= 0:
        # go out to a column where vertical travel is cheap
        s = 1.0 if (px + qx) >= 0 else -1.0
        col = s * max(abs(px), abs(qx), abs(qy - py) ** (1.0 / (alpha + 1.0)))
        paths.append(np.array([p, (col, py), (col, qy), q]))
    return paths


def _insert_knot(alpha, pts):
    lens = segment_lengths(alpha, pts[:-1, 0], pts[:-1, 1], pts[1:, 0], pts[1:, 1])
    finite = np.where(np.isfinite(lens), lens, np.inf)
    k = int(np.argmax(finite))
    mid = 0.5 * (pts[k] + pts[k + 1])
    return np.insert(pts, k + 1, mid, axis=0)


def _descend(alpha, pts, scale, sweeps, rng):
    """Derivative-free coordinate descent on interior knots. Returns (points, sweeps_used).

    Each interior knot carries its own step per coordinate. A coordinate
    move tries +-step and the vertex of the parabola through the three
    values (clipped to 4 steps); the best improving trial is taken and the
    step doubles, otherwise the step halves. Even and odd knots move in
    alternating phases (knots of one parity share no segment), x before y.
    The run stops once every step is below ``MIN_STEP``, once
    ``STALL_WINDOW`` sweeps gain less than ``STALL_RTOL`` relative length,
    or when the sweep budget is spent.
    """
    pts = pts.copy()
    n = len(pts)
    if n <= 2:
        return pts, 0
    steps = np.full((n, 2), 0.25)
    used = 0
    interior = np.arange(1, n - 1)
    parities = [interior[interior % 2 == 0], interior[interior % 2 == 1]]
    history = [polyline_length(alpha, pts)]
    while used < sweeps and np.max(steps[1:-1]) >= MIN_STEP:
        if len(history) > STALL_WINDOW and history[-STALL_WINDOW - 1] - history[-1] <= STALL_RTOL * history[-1]:
            break
        used += 1
        for ph in rng.permutation(2):
            idx = parities[ph]
            if len(idx) == 0:
                continue
            for axis in (0, 1):
                _coordinate_move(alpha, pts, steps, idx, axis, scale[axis])
        history.append(polyline_length(alpha, pts))
    return pts, used


def _coordinate_move(alpha, pts, steps, idx, axis, unit):
    prev, here, nxt = pts[idx - 1], pts[idx], pts[idx + 1]
    m = len(idx)
    h = steps[idx, axis] * unit
    trial = np.concatenate([here, here, here])
    trial[m : 2 * m, axis] += h
    trial[2 * m :, axis] -= h
    vals = _local(alpha, np.tile(prev, (3, 1)), trial, np.tile(nxt, (3, 1)))
    f0, fp, fm = vals[:m], vals[m : 2 * m], vals[2 * m :]
    with np.errstate(invalid="ignore"):
        curv = fp - 2.0 * f0 + fm
        ok = np.isfinite(curv) & (curv > 0)
        vertex = np.where(ok, 0.5 * h * (fm - fp) / np.where(ok, curv, 1.0), 0.0)
    vertex = np.clip(vertex, -4.0 * h, 4.0 * h)
    cv = here.copy()
    cv[:, axis] += vertex
    fv = _local(alpha, prev, cv, nxt)
    best, best_pos = f0, here
    for cand, val in ((trial[m : 2 * m], fp), (trial[2 * m :], fm), (cv, fv)):
        better = (val < best * (1 - 1e-15)) & np.isfinite(val)
        best = np.where(better, val, best)
        best_pos = np.where(better[:, None], cand, best_pos)
    moved = np.any(best_pos != here, axis=1)
    pts[idx] = best_pos
    steps[idx, axis] = np.where(moved, np.minimum(steps[idx, axis] * 2.0, 1.0), steps[idx, axis] * 0.5)


def _local(alpha, prev, here, nxt):
    return segment_lengths(alpha, prev[:, 0], prev[:, 1], here[:, 0], here[:, 1]) + segment_lengths(
        alpha, here[:, 0], here[:, 1], nxt[:, 0], nxt[:, 1]
    )


def _pad(alpha, pts, k):
    while len(pts) < k:
        pts = _insert_knot(alpha, pts)
    return pts


def knot_schedule(knots):
    """Knot counts visited on the way to ``knots``: 2, 3, 5, 9, 17, ... then ``knots``."""
    levels = [2]
    k = 3
    while k < knots:
        levels.append(k)
        k = 2 * k - 1
    if knots > 2:
        levels.append(int(knots))
    return levels


def cc_distance_upper(alpha, p, q, knots=33, iterations=2000, seed=0):
    """Upper bound on d_alpha(p, q) from an optimised polyline with ``knots`` vertices.

    The knot count doubles along ``knot_schedule``; every level but the last
    runs until its descent stops, and ``iterations`` caps the sweeps of the
    last level. The reported curve is the shortest of the last level and the
    converged earlier levels (padded with midpoints), so the bound is
    non-increasing in ``iterations`` and never worse than at any earlier
    count of the schedule. The lower bound |p.x - q.x| is reported alongside.
    """
    alpha = check_alpha(alpha)
    if int(knots) != knots or knots < 2:
        raise ValueError("cc_distance_upper needs knots >= 2")
    if iterations < 0:
        raise ValueError("iterations must be nonnegative")
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
        raise ValueError("points must be finite")
    knots = int(knots)
    lower = abs(float(p[0] - q[0]))
    if np.array_equal(p, q):
        return DistanceResult(0.0, 0.0, PolylineCurve([0.0, 1.0], [p, q]), 0.0, 0)
    # anisotropic step scale, covariant under dilations
    sx = max(abs(p[0]), abs(q[0]), abs(q[0] - p[0]), abs(q[1] - p[1]) ** (1.0 / (alpha + 1.0)))
    scale = np.array([sx, sx ** (alpha + 1.0)])
    rng = np.random.default_rng(seed)
    bases = _base_paths(alpha, p, q)
    pts = np.array([p, q])
    best_len, best_pts = polyline_length(alpha, pts), pts
    used = 0
    for k in knot_schedule(knots)[1:]:
        cand = _pad(alpha, pts, k)
        for base in bases:
            if len(base) <= k:
                padded = _pad(alpha, base, k)
                if polyline_length(alpha, padded) < polyline_length(alpha, cand):
                    cand = padded
        budget = iterations if k == knots else MAX_SWEEPS
        pts, used = _descend(alpha, cand, scale, budget, rng)
        length = polyline_length(alpha, pts)
        if k == knots and length <= best_len:
            best_len, best_pts = length, pts
        elif length < best_len:
            best_len, best_pts = length, pts
    best_pts = _pad(alpha, best_pts, knots)
    curve = PolylineCurve(np.linspace(0.0, 1.0, len(best_pts)), best_pts)
    certified = grushin_length(alpha, curve)
    return DistanceResult(
        distance_upper=certified.value,
        lower_bound=lower,
        curve=curve,
        objective=best_len,
        sweeps=used,
    )
