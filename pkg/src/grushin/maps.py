"""Grushin maps: Meyerson conjugates, entire affine maps, and sampled maps."""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from ._powers import apow, check_alpha, spow
from .core import HorizontalJet, finite_diff_jet, meyerson, meyerson_inv
from .errors import (
    DegenerateDerivative,
    DomainMismatch,
    DomainViolation,
    GrushinError,
    NotEntireAffine,
    SingularPoint,
)
from .holo import IDENTITY, HoloExpr, RealAffine, compose, holo_eval


class GrushinMap:
    alpha: float
    domain = None

    def evaluate(self, x, y):
        """Return (g1, g2) at (x, y)."""
        raise NotImplementedError

    def __call__(self, x, y):
        return self.evaluate(x, y)

    def jet(self, x, y):
        """Best available jet: analytic for closed forms, finite differences otherwise."""
        return analytic_jet(self, x, y)

    @property
    def has_analytic_jet(self):
        return True

    def contains(self, x, y):
        if self.domain is None:
            return np.ones(np.broadcast(np.asarray(x), np.asarray(y)).shape, dtype=bool)
        return self.domain.contains(x, y)


@dataclass(frozen=True)
class ConjugatedMap(GrushinMap):
    """g = meyerson_inv o expr o meyerson."""

    alpha: float
    expr: HoloExpr
    domain: Optional[object] = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))

    def evaluate(self, x, y):
        u, v = meyerson(self.alpha, x, y)
        (w1, w2), _ = holo_eval(self.expr, u, v)
        return meyerson_inv(self.alpha, w1, w2)

    def to_dict(self):
        return {"alpha": self.alpha, "kind": "conjugated", "expr": self.expr.to_dict()}


@dataclass(frozen=True)
class EntireAffineMap(GrushinMap):
    """(x, y) -> (sign(a) |a|^(1/(alpha+1)) x, a y + b)."""

    alpha: float
    a: float
    b: float = 0.0
    domain: Optional[object] = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        if not np.isfinite(self.a) or self.a == 0:
            raise ValueError("entire map requires a finite nonzero a")
        if not np.isfinite(self.b):
            raise ValueError("entire map requires a finite b")

    @property
    def x_scale(self):
        return float(spow(self.a, 1.0 / (self.alpha + 1.0)))

    def evaluate(self, x, y):
        return self.x_scale * np.asarray(x, dtype=float), self.a * np.asarray(y, dtype=float) + self.b

    def as_conjugated(self):
        return ConjugatedMap(self.alpha, RealAffine(self.a, self.b), self.domain)

    def to_dict(self):
        return {"alpha": self.alpha, "kind": "entire", "a": self.a, "b": self.b}


@dataclass(frozen=True, eq=False)
class SampledMap(GrushinMap):
    """Map known on a rectangular grid; ``g1[j, i]`` is the value at (xs[i], ys[j]).

    Evaluated by bilinear interpolation inside the grid hull.
    """

    alpha: float
    xs: np.ndarray
    ys: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    domain: Optional[object] = None
    _interp: tuple = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        g1 = np.asarray(self.g1, dtype=float)
        g2 = np.asarray(self.g2, dtype=float)
        if xs.ndim != 1 or ys.ndim != 1 or len(xs) < 2 or len(ys) < 2:
            raise ValueError("sample axes must be 1-d with at least two points")
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
            raise ValueError("sample axes must be strictly increasing")
        if g1.shape != (len(ys), len(xs)) or g2.shape != g1.shape:
            raise ValueError("sample values must have shape (len(ys), len(xs))")
        if not (np.all(np.isfinite(g1)) and np.all(np.isfinite(g2))):
            raise ValueError("sample values must be finite")
        for name, val in (("xs", xs), ("ys", ys), ("g1", g1), ("g2", g2)):
            object.__setattr__(self, name, val)
        interp = tuple(RegularGridInterpolator((ys, xs), g, method="linear") for g in (g1, g2))
        object.__setattr__(self, "_interp", interp)

    @property
    def has_analytic_jet(self):
        return False

    def contains(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        inside = (x >= self.xs[0]) & (x <= self.xs[-1]) & (y >= self.ys[0]) & (y <= self.ys[-1])
        if self.domain is not None:
            inside &= self.domain.contains(x, y)
        return inside

    def evaluate(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        if not np.all(self.contains(x, y)):
            raise DomainViolation("sampled map evaluated outside its sample grid")
        pts = np.stack([y.ravel(), x.ravel()], axis=-1)
        return tuple(f(pts).reshape(x.shape) for f in self._interp)

    def jet(self, x, y):
        h = 0.5 * min(np.min(np.diff(self.xs)), np.min(np.diff(self.ys)))
        return finite_diff_jet(self.evaluate, x, y, h=h, contains=self.contains)

    def node_jets(self):
        """Finite-difference jets at the sample nodes (second order inside)."""
        d1y, d1x = np.gradient(self.g1, self.ys, self.xs, edge_order=2)
        d2y, d2x = np.gradient(self.g2, self.ys, self.xs, edge_order=2)
        xx, yy = np.meshgrid(self.xs, self.ys)
        return xx, yy, HorizontalJet(self.g1, self.g2, d1x, d1y, d2x, d2y)

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "kind": "sampled",
            "samples": {
                "xs": self.xs.tolist(),
                "ys": self.ys.tolist(),
                "g1": self.g1.tolist(),
                "g2": self.g2.tolist(),
            },
        }


def conjugate(alpha, expr, domain=None):
    return ConjugatedMap(alpha, expr, domain)


def identity_map(alpha):
    return ConjugatedMap(alpha, IDENTITY)


def entire_map(alpha, a, b=0.0):
    if a == 0:
        raise ValueError("entire map requires a != 0")
    return EntireAffineMap(alpha, float(a), float(b))


def dilation_map(alpha, lam):
    """The dilation delta_lam as an entire map (a = lam^(alpha+1), b = 0)."""
    if not lam > 0:
        raise ValueError("dilation factor must be positive")
    return EntireAffineMap(alpha, lam ** (check_alpha(alpha) + 1.0), 0.0)


def analytic_jet(gmap, x, y):
    """Exact first partials of a closed-form map.

    For conjugates, the partials of g come from the complex derivative f' of
    the planar map through the chain rule, with x~ = meyerson(x)::

        dg1/dx = |x|^a Re f' / |g1|^a     dg1/dy = -Im f' / |g1|^a
        dg2/dx = |x|^a Im f'              dg2/dy = Re f'
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if isinstance(gmap, EntireAffineMap):
        s = gmap.x_scale
        g1, g2 = gmap.evaluate(x, y)
        shape = np.broadcast(x, y).shape
        return HorizontalJet(
            g1=np.broadcast_to(g1, shape),
            g2=np.broadcast_to(g2, shape),
            g1x=np.full(shape, s),
            g1y=np.zeros(shape),
            g2x=np.zeros(shape),
            g2y=np.full(shape, gmap.a),
        )
    if isinstance(gmap, SampledMap):
        raise GrushinError("sampled maps have no analytic jet; use finite differences")
    if not isinstance(gmap, ConjugatedMap):
        raise TypeError(f"unsupported map type {type(gmap).__name__}")
    alpha = gmap.alpha
    if np.any(x == 0):
        raise SingularPoint("analytic jet requested on the singular line x = 0")
    u, v = meyerson(alpha, x, y)
    (w1, w2), der = holo_eval(gmap.expr, u, v)
    g1, g2 = meyerson_inv(alpha, w1, w2)
    if np.any(g1 == 0):
        raise SingularPoint("analytic jet requested where g1 = 0")
    ax = apow(x, alpha)
    ag = apow(g1, alpha)
    re, im = der.real, der.imag
    return HorizontalJet(g1=g1, g2=g2, g1x=ax * re / ag, g1y=-im / ag, g2x=ax * im, g2y=re)


def _as_expr(gmap):
    if isinstance(gmap, EntireAffineMap):
        return RealAffine(gmap.a, gmap.b)
    if isinstance(gmap, ConjugatedMap):
        return gmap.expr
    raise DomainMismatch(f"cannot compose {type(gmap).__name__} symbolically")


def compose_maps(g, h):
    """g o h. The inner meyerson_inv o meyerson pair cancels, leaving expr_g o expr_h."""
    if g.alpha != h.alpha:
        raise DomainMismatch(f"alpha mismatch: {g.alpha} vs {h.alpha}")
    if isinstance(g, EntireAffineMap) and isinstance(h, EntireAffineMap):
        return EntireAffineMap(g.alpha, g.a * h.a, g.a * h.b + g.b, h.domain)
    return ConjugatedMap(g.alpha, compose(_as_expr(g), _as_expr(h)), h.domain)


def invert_map(g):
    if isinstance(g, EntireAffineMap):
        return EntireAffineMap(g.alpha, 1.0 / g.a, -g.b / g.a)
    if isinstance(g, ConjugatedMap):
        return ConjugatedMap(g.alpha, g.expr.inverse())
    raise DomainMismatch(f"cannot invert {type(g).__name__} symbolically")


@dataclass
class EntireClassification:
    a: float
    b: float
    residual: float


def classify_entire(gmap, xs=None, ys=None, rtol=1e-9):
    """Recover (a, b) of an entire affine map from g2 on the axis, then verify.

    ``a = g2(0, 1) - g2(0, 0)`` and ``b = g2(0, 0)``; the full formula is then
    checked on the probe grid.
    """
    alpha = gmap.alpha
    if xs is None:
        xs = np.linspace(-2.0, 2.0, 9)
    if ys is None:
        ys = np.linspace(-2.0, 2.0, 9)
    try:
        _, (g2_0, g2_1) = gmap.evaluate(np.zeros(2), np.array([0.0, 1.0]))
        xx, yy = np.meshgrid(xs, ys)
        g1, g2 = gmap.evaluate(xx, yy)
    except (GrushinError, ZeroDivisionError, FloatingPointError) as exc:
        raise NotEntireAffine(f"map is not evaluable on the probe grid: {exc}") from exc
    b = float(g2_0)
    a = float(g2_1 - g2_0)
    if a == 0 or not np.isfinite(a):
        raise NotEntireAffine("g2 is constant along the axis")
    s = spow(a, 1.0 / (alpha + 1.0))
    scale = 1.0 + np.max(np.abs(g1)) + np.max(np.abs(g2))
    residual = float(max(np.max(np.abs(g1 - s * xx)), np.max(np.abs(g2 - (a * yy + b)))))
    if not np.isfinite(residual) or residual > rtol * scale:
        raise NotEntireAffine(f"entire-map formula fails on the probe grid (residual {residual:.3e})")
    return EntireClassification(a=a, b=b, residual=residual)


def axis_derivative(gmap, y):
    """d g~1 / dx at (0, y): the real part of the planar derivative on the axis."""
    if isinstance(gmap, EntireAffineMap):
        return np.full(np.shape(y), float(gmap.a))
    if isinstance(gmap, ConjugatedMap):
        _, der = holo_eval(gmap.expr, np.zeros(np.shape(y)), y)
        return der.real
    raise GrushinError(f"no axis derivative for {type(gmap).__name__}")


def ext_boundary(alpha, gmap, y, tol=1e-12):
    """Continuous extension of |x|^a / |g1|^a to the axis.

    Equals |1 / c|^(a/(a+1)) with c = d g~1/dx (0, y). The modulus handles
    maps that swap the half-planes (c < 0).
    """
    alpha = check_alpha(alpha)
    if gmap.alpha != alpha:
        raise DomainMismatch("alpha of the map differs from the requested alpha")
    c = axis_derivative(gmap, np.asarray(y, dtype=float))
    if np.any(np.abs(c) < tol):
        raise DegenerateDerivative("d g~1/dx vanishes on the axis")
    return apow(1.0 / c, alpha / (alpha + 1.0))


@dataclass
class RatioLimitReport:
    rho: np.ndarray
    ratios: np.ndarray
    limit: float
    errors: np.ndarray
    rate: float
    converged: bool


def ratio_limit_check(expr, y0, rho=None, direction=(1.0, 1.0)):
    """Probe u1(x, y) / x along (rho dx, y0 + rho dy) for shrinking rho.

    The expected limit is Re f'(i y0). ``rate`` is the least-squares slope of
    log(error) against log(rho) over errors above the rounding floor.
    """
    if rho is None:
        rho = 10.0 ** -np.arange(1, 7)
    rho = np.asarray(rho, dtype=float)
    dx, dy = direction
    if dx == 0:
        raise ValueError("direction must leave the axis (dx != 0)")
    xs = rho * dx
    (u1, _), _ = holo_eval(expr, xs, y0 + rho * dy)
    ratios = u1 / xs
    _, der = holo_eval(expr, 0.0, y0)
    limit = float(np.real(der))
    errors = np.abs(ratios - limit)
    floor = 1e-13 * max(1.0, abs(limit))
    usable = errors > floor
    if np.count_nonzero(usable) >= 2:
        rate = float(np.polyfit(np.log(rho[usable]), np.log(errors[usable]), 1)[0])
    else:
        rate = float("inf")
    tail = errors[-3:]
    converged = bool(np.all((np.diff(tail) <= 0) | (tail[1:] <= floor)) and tail[-1] <= 1e-3 * max(1.0, abs(limit)))
    return RatioLimitReport(rho, ratios, limit, errors, rate, converged)
