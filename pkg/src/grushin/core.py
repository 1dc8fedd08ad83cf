"""Point transforms and first-order differential operators on the Grushin plane.

Every function accepts scalars or numpy arrays for the coordinates and
broadcasts elementwise. ``alpha`` is the exponent of the vector field
``Y = |x|**alpha d/dy``.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._powers import apow, check_alpha, spow
from .errors import EvaluationOutsideDomain, SingularPoint


class GrushinPoint(NamedTuple):
    x: float
    y: float


class PlanePoint(NamedTuple):
    u: float
    v: float


@dataclass(frozen=True)
class HorizontalJet:
    """Values and Euclidean first partials of ``g = (g1, g2)`` at a base point."""

    g1: np.ndarray
    g2: np.ndarray
    g1x: np.ndarray
    g1y: np.ndarray
    g2x: np.ndarray
    g2y: np.ndarray

    def as_array(self):
        return np.array([self.g1, self.g2, self.g1x, self.g1y, self.g2x, self.g2y])


@dataclass(frozen=True)
class DAlphaMatrix:
    m11: np.ndarray
    m12: np.ndarray
    m21: np.ndarray
    m22: np.ndarray

    @property
    def det(self):
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def norm(self):
        """Frobenius norm."""
        return np.sqrt(self.m11**2 + self.m12**2 + self.m21**2 + self.m22**2)

    def rotation_defect(self):
        """|m11 - m22| + |m12 + m21|; zero exactly for multiples of rotations."""
        return np.abs(self.m11 - self.m22) + np.abs(self.m12 + self.m21)

    def as_array(self):
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])


def meyerson(alpha, x, y):
    """Map (x, y) to (x|x|^alpha / (alpha + 1), y)."""
    alpha = check_alpha(alpha)
    x = np.asarray(x, dtype=float)
    return spow(x, alpha + 1.0) / (alpha + 1.0), np.asarray(y, dtype=float)


def meyerson_inv(alpha, u, v):
    alpha = check_alpha(alpha)
    u = np.asarray(u, dtype=float)
    return spow((alpha + 1.0) * u, 1.0 / (alpha + 1.0)), np.asarray(v, dtype=float)


def dilation(alpha, lam, x, y):
    """Intrinsic dilation (x, y) -> (lam x, lam^(alpha+1) y)."""
    alpha = check_alpha(alpha)
    if not lam > 0:
        raise ValueError(f"dilation factor must be positive, got {lam!r}")
    return lam * np.asarray(x, dtype=float), lam ** (alpha + 1.0) * np.asarray(y, dtype=float)


def horizontal_gradient(alpha, jet, x):
    """Return (grad_H g1, grad_H g2), each a pair (X g_i, Y g_i)."""
    alpha = check_alpha(alpha)
    w = apow(x, alpha)
    return (jet.g1x, w * jet.g1y), (jet.g2x, w * jet.g2y)


def horizontal_jacobian(alpha, jet, x):
    """Determinant of the horizontal differential, J_g = X g1 Y g2 - X g2 Y g1."""
    alpha = check_alpha(alpha)
    return apow(x, alpha) * (jet.g1x * jet.g2y - jet.g2x * jet.g1y)


def wirtinger(alpha, jet, x):
    """Return (W g, Wbar g) as complex values.

    Both are the derivatives ``(d/dx -+ i|x|^alpha d/dy)`` of ``meyerson o g``
    written out in terms of the jet of ``g``.
    """
    alpha = check_alpha(alpha)
    ax = apow(x, alpha)
    ag = apow(jet.g1, alpha)
    a = ag * jet.g1x
    b = ax * jet.g2y
    d = ax * ag * jet.g1y
    w = (a + b) + 1j * (jet.g2x - d)
    wbar = (a - b) + 1j * (jet.g2x + d)
    return w, wbar


def zero_threshold(g1):
    return 1e-12 * (1.0 + np.max(np.abs(g1)))


def d_alpha_matrix(alpha, jet, x, zero_tol=None):
    """The matrix [[X g1, Y g1], [X g2 / |g1|^a, Y g2 / |g1|^a]].

    Raises SingularPoint if any |g1| falls below ``zero_tol`` (default
    ``1e-12 * (1 + max|g1|)`` over the supplied values).
    """
    alpha = check_alpha(alpha)
    g1 = np.asarray(jet.g1, dtype=float)
    if zero_tol is None:
        zero_tol = zero_threshold(g1)
    if np.any(np.abs(g1) < zero_tol):
        raise SingularPoint("g1 vanishes; D_alpha g is undefined there")
    ax = apow(x, alpha)
    ag = apow(g1, alpha)
    return DAlphaMatrix(
        m11=jet.g1x,
        m12=ax * jet.g1y,
        m21=jet.g2x / ag,
        m22=ax * jet.g2y / ag,
    )


def wirtinger_identity_residual(alpha, jet, x):
    """|W g|^2 - |Wbar g|^2 - 4 |g1|^(2 alpha) det D_alpha g.

    The last term is formed as ``4 |g1|^alpha J_g`` so it stays defined where
    g1 = 0.
    """
    alpha = check_alpha(alpha)
    w, wbar = wirtinger(alpha, jet, x)
    rhs = 4.0 * apow(jet.g1, alpha) * horizontal_jacobian(alpha, jet, x)
    return np.abs(w) ** 2 - np.abs(wbar) ** 2 - rhs


def default_step(x, y):
    return np.finfo(float).eps ** (1.0 / 3.0) * (1.0 + np.hypot(x, y))


def finite_diff_jet(evaluator, x, y, h=None, contains=None):
    """Central-difference jet of ``evaluator(x, y) -> (g1, g2)``.

    ``contains(x, y)`` optionally declares the domain; every stencil point
    must lie inside it.
    """
    if h is None:
        h = default_step(x, y)
    if np.any(np.asarray(h) <= 0):
        raise ValueError("finite-difference step must be positive")
    stencil = [(x + h, y), (x - h, y), (x, y + h), (x, y - h)]
    if contains is not None:
        for sx, sy in stencil + [(x, y)]:
            if not np.all(contains(sx, sy)):
                raise EvaluationOutsideDomain(f"stencil point ({sx}, {sy}) leaves the domain")
    g1, g2 = evaluator(x, y)
    (p1, p2), (m1, m2), (q1, q2), (r1, r2) = (evaluator(*s) for s in stencil)
    return HorizontalJet(
        g1=np.asarray(g1, dtype=float),
        g2=np.asarray(g2, dtype=float),
        g1x=(np.asarray(p1) - m1) / (2 * h),
        g1y=(np.asarray(q1) - r1) / (2 * h),
        g2x=(np.asarray(p2) - m2) / (2 * h),
        g2y=(np.asarray(q2) - r2) / (2 * h),
    )
