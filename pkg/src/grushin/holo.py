"""Closed grammar of holomorphic maps that fix the imaginary axis.

Each node evaluates its value and complex derivative exactly (chain rule on
``Compose``). The grammar is deliberately small: it is the set of maps whose
axis preservation ``Re f(z) = 0 <=> Re z = 0`` can be certified.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import DomainViolation, NotInvertibleSymbolically, PoleHit


class HoloExpr:
    def evaluate(self, z):
        """Return (f(z), f'(z)) for complex scalar or array ``z``."""
        raise NotImplementedError

    def __call__(self, z):
        return self.evaluate(z)[0]

    def inverse(self):
        raise NotInvertibleSymbolically(f"{type(self).__name__} has no symbolic inverse")

    def check_domain(self, z):
        pass

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class RealAffine(HoloExpr):
    """z -> a z + i c with real a != 0."""

    a: float
    c: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.a) or self.a == 0:
            raise ValueError("RealAffine requires a finite nonzero slope a")
        if not np.isfinite(self.c):
            raise ValueError("RealAffine offset c must be finite")

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        return self.a * z + 1j * self.c, np.full_like(z, self.a)

    def inverse(self):
        return RealAffine(1.0 / self.a, -self.c / self.a)

    def to_dict(self):
        return {"node": "real_affine", "a": self.a, "c": self.c}


IDENTITY = RealAffine(1.0, 0.0)


@dataclass(frozen=True)
class Shift(HoloExpr):
    """z -> z + s for complex s.

    Not axis-preserving unless Re s = 0; kept only so counterexamples to the
    zero-set condition can be expressed.
    """

    s: complex

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        return z + self.s, np.ones_like(z)

    def inverse(self):
        return Shift(-self.s)

    def to_dict(self):
        return {"node": "shift", "re": self.s.real, "im": self.s.imag}


@dataclass(frozen=True)
class Joukovski(HoloExpr):
    """z -> z + 1/z; Re w = x (1 + 1/|z|^2), so the axis is fixed exactly."""

    def check_domain(self, z):
        if np.any(np.asarray(z) == 0):
            raise PoleHit("Joukovski map evaluated at its pole z = 0")

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        self.check_domain(z)
        return z + 1.0 / z, 1.0 - 1.0 / z**2

    def to_dict(self):
        return {"node": "joukovski"}


@dataclass(frozen=True)
class OddRealPoly(HoloExpr):
    """z -> sum_k coeffs[k] z^(2k+1) on a declared plane box.

    ``box = (umin, umax, vmin, vmax)``. Axis preservation is domain dependent
    (Re z^3 = x (x^2 - 3 y^2)), so it is probed at construction.
    """

    coeffs: Tuple[float, ...]
    box: Tuple[float, float, float, float]
    probe: int = 41

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        object.__setattr__(self, "box", tuple(float(b) for b in self.box))
        if not self.coeffs or not all(np.isfinite(self.coeffs)):
            raise ValueError("OddRealPoly needs at least one finite coefficient")
        umin, umax, vmin, vmax = self.box
        if not (umin < umax and vmin < vmax):
            raise ValueError("OddRealPoly box must be nondegenerate")
        u = np.linspace(umin, umax, self.probe)
        if umin < 0 < umax:
            u = np.union1d(u, [0.0])
        uu, vv = np.meshgrid(u, np.linspace(vmin, vmax, self.probe))
        z = uu + 1j * vv
        re = self._value(z).real
        scale = 1.0 + np.max(np.abs(re))
        on_axis = uu == 0
        bad = (np.sign(re) != np.sign(uu)) & ~on_axis
        bad |= on_axis & (np.abs(re) > 1e-12 * scale)
        bad |= ~on_axis & (np.abs(re) <= 1e-12 * scale)
        if np.any(bad):
            raise DomainViolation("OddRealPoly does not preserve the imaginary axis on its box")

    def _value(self, z):
        out = np.zeros_like(z)
        for k, c in enumerate(self.coeffs):
            out = out + c * z ** (2 * k + 1)
        return out

    def check_domain(self, z):
        z = np.asarray(z)
        umin, umax, vmin, vmax = self.box
        inside = (z.real >= umin) & (z.real <= umax) & (z.imag >= vmin) & (z.imag <= vmax)
        if not np.all(inside):
            raise DomainViolation("OddRealPoly evaluated outside its declared box")

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        self.check_domain(z)
        der = np.zeros_like(z)
        for k, c in enumerate(self.coeffs):
            n = 2 * k + 1
            der = der + c * n * z ** (n - 1)
        return self._value(z), der

    def to_dict(self):
        return {"node": "odd_poly", "coeffs": list(self.coeffs), "box": list(self.box)}


@dataclass(frozen=True)
class Compose(HoloExpr):
    """outer o inner."""

    outer: HoloExpr
    inner: HoloExpr

    def evaluate(self, z):
        w, dw = self.inner.evaluate(z)
        v, dv = self.outer.evaluate(w)
        return v, dv * dw

    def inverse(self):
        return compose(self.inner.inverse(), self.outer.inverse())

    def to_dict(self):
        return {"node": "compose", "outer": self.outer.to_dict(), "inner": self.inner.to_dict()}


def compose(outer, inner):
    """Compose two expressions, folding affine-affine pairs and identities."""
    if inner == IDENTITY:
        return outer
    if outer == IDENTITY:
        return inner
    if isinstance(outer, RealAffine) and isinstance(inner, RealAffine):
        return RealAffine(outer.a * inner.a, outer.a * inner.c + outer.c)
    return Compose(outer, inner)


def holo_eval(expr, u, v):
    """Evaluate ``expr`` at u + iv; returns ((Re f, Im f), f') with f' complex."""
    val, der = expr.evaluate(np.asarray(u, dtype=float) + 1j * np.asarray(v, dtype=float))
    return (val.real, val.imag), der


def from_dict(doc):
    """Build an expression from its document form (see ``to_dict``)."""
    node = doc["node"]
    if node == "real_affine":
        return RealAffine(float(doc["a"]), float(doc.get("c", 0.0)))
    if node == "joukovski":
        return Joukovski()
    if node == "odd_poly":
        return OddRealPoly(tuple(doc["coeffs"]), tuple(doc["box"]))
    if node == "shift":
        return Shift(complex(float(doc.get("re", 0.0)), float(doc.get("im", 0.0))))
    if node == "compose":
        return compose(from_dict(doc["outer"]), from_dict(doc["inner"]))
    raise ValueError(f"unknown expression node {node!r}")
