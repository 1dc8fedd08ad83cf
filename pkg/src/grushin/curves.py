"""Carnot-Caratheodory lengths, admissibility, and pushforward of curves.

The length element of the Grushin plane is sqrt(x'^2 + y'^2 / |x|^(2 alpha)) dt.
It blows up where the curve meets the singular line, so the parameter
interval is cut at axis points and each cut is approached by a refinement
ladder (see ``quadrature.ladder``).
"""
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import brentq, minimize_scalar

from ._powers import apow, check_alpha
from .core import horizontal_gradient
from .errors import DomainViolation, SingularPoint
from .quadrature import adaptive, ladder

FLOOR_FACTOR = 1e-9  # |x| floor near axis crossings, relative to the curve diameter
N_PROBE = 4097


class ParamCurve:
    t0: float
    t1: float

    def position(self, t):
        raise NotImplementedError

    def derivative(self, t):
        raise NotImplementedError

    def breakpoints(self):
        """Parameters where the derivative may jump (always includes the ends)."""
        return np.array([self.t0, self.t1])

    def diameter(self):
        t = np.linspace(self.t0, self.t1, 257)
        x, y = self.position(t)
        return float(np.hypot(np.ptp(x), np.ptp(y)))


class ClosedFormCurve(ParamCurve):
    """Curve given by callables ``position(t) -> (x, y)`` and ``derivative(t) -> (x', y')``.

    The derivative is probed against central differences at 16 parameters on
    construction.
    """

    def __init__(self, position, derivative, t0, t1, check=True):
        if not t0 < t1:
            raise ValueError("curve needs t0 < t1")
        self._pos = position
        self._der = derivative
        self.t0, self.t1 = float(t0), float(t1)
        if check:
            self._check_derivative()

    def position(self, t):
        x, y = self._pos(np.asarray(t, dtype=float))
        return np.broadcast_to(x, np.shape(t)).astype(float), np.broadcast_to(y, np.shape(t)).astype(float)

    def derivative(self, t):
        dx, dy = self._der(np.asarray(t, dtype=float))
        return np.broadcast_to(dx, np.shape(t)).astype(float), np.broadcast_to(dy, np.shape(t)).astype(float)

    def _check_derivative(self):
        rng = np.random.default_rng(0)
        span = self.t1 - self.t0
        h = 1e-5 * span
        t = self.t0 + h + rng.random(16) * (span - 2 * h)
        xp, yp = self.position(t + h)
        xm, ym = self.position(t - h)
        dx, dy = self.derivative(t)
        x, y = self.position(t)
        scale = 1.0 + np.max(np.abs(np.concatenate([dx, dy]))) + np.max(np.abs(np.concatenate([x, y]))) / span
        gap = max(np.max(np.abs((xp - xm) / (2 * h) - dx)), np.max(np.abs((yp - ym) / (2 * h) - dy)))
        if not np.isfinite(gap) or gap > 1e-4 * scale:
            raise ValueError(f"derivative disagrees with finite differences (gap {gap:.3e})")


class PolylineCurve(ParamCurve):
    """Piecewise-linear curve through ``points`` at strictly increasing parameters ``t``.

    Consecutive repeated points are dropped.
    """

    def __init__(self, t, points):
        t = np.asarray(t, dtype=float)
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(t) != len(pts):
            raise ValueError("polyline needs matching parameters and (n, 2) points")
        if len(t) < 2:
            raise ValueError("polyline needs at least two samples")
        if np.any(np.diff(t) <= 0):
            raise ValueError("polyline parameters must be strictly increasing")
        if not np.all(np.isfinite(pts)):
            raise ValueError("polyline positions must be finite")
        keep = np.ones(len(t), dtype=bool)
        keep[1:] = np.any(np.diff(pts, axis=0) != 0, axis=1)
        if keep.sum() < 2:
            keep[-1] = True  # constant curve
        self.t = t[keep]
        self.points = pts[keep]
        self.t0, self.t1 = float(t[0]), float(t[-1])
        self.t[-1] = self.t1  # a dropped trailing repeat hands its parameter on

    @classmethod
    def through(cls, points):
        pts = np.asarray(points, dtype=float)
        return cls(np.linspace(0.0, 1.0, len(pts)), pts)

    def position(self, t):
        t = np.asarray(t, dtype=float)
        return np.interp(t, self.t, self.points[:, 0]), np.interp(t, self.t, self.points[:, 1])

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        k = np.clip(np.searchsorted(self.t, t, side="right") - 1, 0, len(self.t) - 2)
        dt = self.t[k + 1] - self.t[k]
        d = (self.points[k + 1] - self.points[k]) / dt[..., None]
        return d[..., 0], d[..., 1]

    def breakpoints(self):
        return self.t.copy()

    def diameter(self):
        return float(np.hypot(np.ptp(self.points[:, 0]), np.ptp(self.points[:, 1])))


def segment(p, q):
    (x0, y0), (x1, y1) = p, q
    return PolylineCurve([0.0, 1.0], [[x0, y0], [x1, y1]])


def graph(y_coeffs, t0, t1, x_coeffs=(0.0, 1.0)):
    """Polynomial curve t -> (sum x_k t^k, sum y_k t^k); default x(t) = t."""
    xc = np.asarray(x_coeffs, dtype=float)
    yc = np.asarray(y_coeffs, dtype=float)
    dxc, dyc = P.polyder(xc), P.polyder(yc)
    return ClosedFormCurve(
        lambda t: (P.polyval(t, xc), P.polyval(t, yc)),
        lambda t: (P.polyval(t, dxc), P.polyval(t, dyc)),
        t0,
        t1,
    )


# --- axis points -----------------------------------------------------------


def _axis_points(curve, floor):
    """Parameters where the curve meets x = 0, and the subset where x changes sign.

    Returns (singular, crossings, on_axis_pieces) where ``on_axis_pieces`` are
    parameter intervals along which x vanishes identically.
    """
    if isinstance(curve, PolylineCurve):
        t = curve.t
        x = curve.points[:, 0]
    else:
        t = np.union1d(np.linspace(curve.t0, curve.t1, N_PROBE), curve.breakpoints())
        x, _ = curve.position(t)
    singular, crossings, pieces = set(), [], []
    zero = x == 0
    for k in range(len(t) - 1):
        if zero[k] and zero[k + 1]:
            pieces.append((t[k], t[k + 1]))
    for k in np.flatnonzero(zero):
        singular.add(float(t[k]))
        before = x[k - 1] if k > 0 else 0.0
        after = x[k + 1] if k + 1 < len(x) else 0.0
        if before * after < 0:
            crossings.append(float(t[k]))
    for k in np.flatnonzero(x[:-1] * x[1:] < 0):
        if isinstance(curve, PolylineCurve):
            tc = t[k] + (t[k + 1] - t[k]) * x[k] / (x[k] - x[k + 1])
        else:
            tc = brentq(lambda s: float(curve.position(s)[0]), t[k], t[k + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
        singular.add(float(tc))
        crossings.append(float(tc))
    if not isinstance(curve, PolylineCurve):
        ax = np.abs(x)
        for k in range(1, len(t) - 1):
            if ax[k] > 0 and ax[k] <= ax[k - 1] and ax[k] <= ax[k + 1] and x[k - 1] * x[k + 1] > 0:
                res = minimize_scalar(
                    lambda s: abs(float(curve.position(s)[0])),
                    bounds=(t[k - 1], t[k + 1]),
                    method="bounded",
                    options={"xatol": 1e-14},
                )
                if res.fun <= floor:
                    singular.add(float(res.x))
    return sorted(singular), sorted(crossings), pieces


def _pieces(curve, singular, on_axis=()):
    """Split the parameter interval at singular points and breakpoints.

    Each returned piece (s, e, sing_s, sing_e) has at most one singular end,
    except pieces lying on the axis, which are returned whole.
    """
    cuts = np.union1d(curve.breakpoints(), singular)
    sing = set(singular)
    out = []
    for s, e in zip(cuts[:-1], cuts[1:]):
        ss, se = float(s) in sing, float(e) in sing
        if (s, e) in on_axis:
            out.append((s, e, True, True))
        elif ss and se:
            m = 0.5 * (s + e)
            out.append((s, m, True, False))
            out.append((m, e, False, True))
        else:
            out.append((s, e, ss, se))
    return out


def _integrate(curve, integrand, floored, floor, rtol=1e-12, min_levels=3):
    """Integrate a vector integrand along the curve, laddering into axis points.

    Returns (value, error, divergent, stable, resolved, detected_at) where
    ``resolved`` is the quadrature over the region actually sampled (no
    extrapolated tails) and ``detected_at`` the deepest ladder level at which
    a divergence was first flagged.
    """
    singular, _, on_axis = _axis_points(curve, floor)
    regular_bp = []
    value = None
    on_axis = set(on_axis)
    pieces = _pieces(curve, singular, on_axis)

    def at_floor(t):
        return abs(float(curve.position(t)[0])) <= floor

    results = []
    for s, e, ss, se in pieces:
        if (s, e) in on_axis:
            results.append(("axis", s, e))
        elif ss or se:
            c, r = (s, e) if ss else (e, s)
            results.append(("ladder", ladder(integrand, c, r, at_floor, floored, min_levels=min_levels, rtol=rtol)))
        else:
            regular_bp.append((s, e))
    m = np.asarray(integrand(np.full((1, 15), 0.5 * (curve.t0 + curve.t1)))).shape[0]
    value = np.zeros(m)
    error = np.zeros(m)
    resolved = np.zeros(m)
    divergent = np.zeros(m, dtype=bool)
    stable = np.ones(m, dtype=bool)
    detected_at = np.zeros(m, dtype=int)
    if regular_bp:
        a = np.array([p[0] for p in regular_bp])
        b = np.array([p[1] for p in regular_bp])
        v, err = _adaptive_pieces(integrand, a, b, rtol)
        value += v
        error += err
        resolved += v
    for item in results:
        if item[0] == "axis":
            _, s, e = item
            xs, ys = curve.position(np.array([s, e]))
            piece = np.asarray(integrand(np.array([[0.5 * (s + e)] * 15])), dtype=float)[:, 0, 0]
            moving = np.abs(ys[1] - ys[0]) > 0
            inf_mask = np.isinf(piece) | (piece > 0) & moving
            value = np.where(inf_mask, np.inf, value)
            divergent |= inf_mask
            detected_at = np.where(inf_mask & (detected_at == 0), 1, detected_at)
        else:
            res = item[1]
            value += res.value
            error += res.error
            resolved += res.totals[-1]
            divergent |= res.divergent
            stable &= res.stable | res.divergent
            detected_at = np.maximum(detected_at, res.detected_at)
    return value, error, divergent, stable, resolved, detected_at


def _adaptive_pieces(integrand, a, b, rtol):
    """Adaptive quadrature over disjoint pieces [a_i, b_i] in one batch."""
    bp = np.empty(2 * len(a))
    bp[0::2], bp[1::2] = a, b
    # gaps between pieces become zero-weight intervals by masking the integrand
    mask_a, mask_b = a, b

    def masked(t):
        vals = np.asarray(integrand(t), dtype=float)
        inside = np.zeros(t.shape, dtype=bool)
        for lo, hi in zip(mask_a, mask_b):
            inside |= (t > lo) & (t < hi)
        return np.where(inside, vals, 0.0)

    contiguous = np.all(a[1:] == b[:-1])
    if contiguous:
        return adaptive(integrand, np.concatenate([a, b[-1:]]), rtol=rtol)
    order = np.argsort(a)
    bps = np.unique(np.concatenate([a[order], b[order]]))
    return adaptive(masked, bps, rtol=rtol)


# --- length ----------------------------------------------------------------


@dataclass
class LengthResult:
    value: float
    error_estimate: float
    axis_crossings: List[float] = field(default_factory=list)
    x_variation: float = 0.0
    divergent: bool = False

    @property
    def infinite(self):
        return self.divergent or not np.isfinite(self.value)

    def to_dict(self):
        return {
            "value": "inf" if self.infinite else self.value,
            "infinite": self.infinite,
            "error_estimate": self.error_estimate,
            "x_variation": self.x_variation,
            "axis_crossings": list(self.axis_crossings),
        }


def _element(alpha, dx, dy, ax):
    # no vertical motion contributes nothing, even where ax underflows
    with np.errstate(divide="ignore", invalid="ignore"):
        vert = np.where(dy == 0, 0.0, dy**2 / ax ** (2 * alpha))
    return np.stack([np.sqrt(dx**2 + vert), np.abs(dx)])


def _length_integrand(alpha, curve, floor):
    def f(t):
        x, _ = curve.position(t)
        dx, dy = curve.derivative(t)
        return _element(alpha, dx, dy, np.maximum(np.abs(x), floor))

    def floored(t, scale):
        x, _ = curve.position(t)
        dx, dy = curve.derivative(t)
        return _element(alpha, dx, dy, np.maximum(np.abs(x), scale * floor))

    return f, floored


def grushin_length(alpha, curve, rtol=1e-12):
    """Length of ``curve`` in the Carnot-Caratheodory metric.

    Returns a LengthResult whose ``value`` is +inf when the length integral
    diverges at an axis point. ``x_variation`` is the integral of |x'| over
    the resolved region, a lower bound for ``value``.
    """
    alpha = check_alpha(alpha)
    floor = FLOOR_FACTOR * max(curve.diameter(), 1e-300)
    f, floored = _length_integrand(alpha, curve, floor)
    _, crossings, _ = _axis_points(curve, floor)
    value, error, divergent, _, resolved, _ = _integrate(curve, f, floored, floor, rtol=rtol)
    return LengthResult(
        value=float(value[0]) if not divergent[0] else float("inf"),
        error_estimate=float(error[0]),
        axis_crossings=crossings,
        x_variation=float(resolved[1]),
        divergent=bool(divergent[0]),
    )


# --- admissibility ---------------------------------------------------------


@dataclass
class AdmissibilityReport:
    integral_of_dx: float
    integral_of_dy_over_x_alpha: float
    refinement_trend: str
    verdict: str
    levels_used: int = 0

    def to_dict(self):
        v = self.integral_of_dy_over_x_alpha
        return {
            "integral_of_dx": self.integral_of_dx,
            "integral_of_dy_over_x_alpha": "divergent" if not np.isfinite(v) else v,
            "refinement_trend": self.refinement_trend,
            "verdict": self.verdict,
            "levels_used": self.levels_used,
        }


def admissibility_check(alpha, curve, levels=3):
    """Decide whether x' and y'/|x|^alpha are integrable along the curve."""
    alpha = check_alpha(alpha)
    if levels < 3:
        raise ValueError("admissibility needs at least 3 refinement levels")
    floor = FLOOR_FACTOR * max(curve.diameter(), 1e-300)

    def f(t, scale=1.0):
        x, _ = curve.position(t)
        dx, dy = curve.derivative(t)
        ax = np.maximum(np.abs(x), scale * floor)
        return np.stack([np.abs(dx), np.abs(dy) / ax**alpha])

    value, _, divergent, stable, _, detected = _integrate(curve, f, f, floor, rtol=1e-10, min_levels=levels)
    singular, _, _ = _axis_points(curve, floor)
    used = levels if singular else 0
    if divergent[1] or divergent[0]:
        # report the level at which the divergence became visible
        return AdmissibilityReport(float(value[0]), float("inf"), "increasing", "not-admissible", int(detected.max()))
    if np.all(stable):
        return AdmissibilityReport(float(value[0]), float(value[1]), "stable", "admissible", used)
    return AdmissibilityReport(float(value[0]), float(value[1]), "increasing", "inconclusive", used)


# --- maps acting on curves -------------------------------------------------


def pushforward(gmap, curve, samples=4097):
    """Polyline through g(curve(t_i)) on a refined mesh; parameters are kept."""
    if samples < 2:
        raise ValueError("pushforward needs at least two samples")
    t = np.union1d(np.linspace(curve.t0, curve.t1, samples), curve.breakpoints())
    x, y = curve.position(t)
    if not np.all(gmap.contains(x, y)):
        raise DomainViolation("curve leaves the domain of the map")
    g1, g2 = gmap.evaluate(x, y)
    return PolylineCurve(t, np.column_stack([g1, g2]))


@dataclass
class DistortionResult:
    pushed_length: float
    weighted_length: float
    c1: float
    c2: float
    original_length: float
    samples: int = 0

    def to_dict(self):
        return dict(self.__dict__)


def _grad_norm(gmap, x, y):
    jet = gmap.jet(x, y)
    (gx, gy), _ = horizontal_gradient(gmap.alpha, jet, x)
    return np.hypot(gx, gy)


PUSH_RTOL = 1e-7
MAX_PUSH_SAMPLES = 2**20 + 1


def length_distortion(alpha, gmap, curve, samples=4097):
    """Compare l(g o curve) with the integral of |grad_H g1| along the curve.

    For a conformal g the two agree, since the length element transforms by
    the factor |grad_H g1|. ``c1``/``c2`` are the extreme factors seen on the
    initial sample mesh. The pushed polyline starts at ``samples`` points and
    is refined by doubling until its length changes by at most ``PUSH_RTOL``
    relative; ``samples`` in the result is the final count.
    """
    alpha = check_alpha(alpha)
    if gmap.alpha != alpha:
        raise ValueError("alpha of the map differs from the requested alpha")
    floor = FLOOR_FACTOR * max(curve.diameter(), 1e-300)
    t = np.linspace(curve.t0, curve.t1, samples)
    x, _ = curve.position(t)
    if np.any(x == 0):
        raise SingularPoint("curve meets the singular line on the sample mesh")
    base, base_floored = _length_integrand(alpha, curve, floor)

    def weighted(t):
        x, y = curve.position(t)
        return base(t)[:1] * _grad_norm(gmap, x, y)[None]

    def weighted_floored(t, scale):
        x, y = curve.position(t)
        return base_floored(t, scale)[:1] * _grad_norm(gmap, x, y)[None]

    wval, _, wdiv, _, _, _ = _integrate(curve, weighted, weighted_floored, floor)
    original = grushin_length(alpha, curve)
    # the polyline image converges like samples^-2; double until it settles
    pushed = grushin_length(alpha, pushforward(gmap, curve, samples))
    n = samples
    while 2 * n - 1 <= MAX_PUSH_SAMPLES:
        finer = grushin_length(alpha, pushforward(gmap, curve, 2 * n - 1))
        settled = abs(finer.value - pushed.value) <= PUSH_RTOL * abs(finer.value)
        pushed, n = finer, 2 * n - 1
        if settled or not np.isfinite(finer.value):
            break
    xs, ys = curve.position(t)
    factors = _grad_norm(gmap, xs, ys)
    return DistortionResult(
        pushed_length=pushed.value,
        weighted_length=float(wval[0]) if not wdiv[0] else float("inf"),
        c1=float(np.min(factors)),
        c2=float(np.max(factors)),
        original_length=original.value,
        samples=n,
    )
