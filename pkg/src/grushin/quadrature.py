"""Adaptive Gauss-Kronrod quadrature with a refinement ladder at singular endpoints.

Integrands are vector valued: ``f(t)`` maps an array of parameters of shape
``S`` to an array of shape ``(m,) + S``. All components share the same nodes,
so pointwise inequalities between components survive quadrature exactly
(the Kronrod weights are positive).
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np

# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
_XK = np.array([
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144845693013,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
])
_GAUSS_IDX = np.array([1, 3, 5, 7, 9, 11, 13])


def gk15(f, a, b, with_noise=False):
    """Apply G7-K15 to each interval [a_i, b_i]; returns (kronrod, |kronrod - gauss|).

    With ``with_noise`` a third array estimates the rounding noise of the
    Kronrod value: the nodes carry an absolute error of eps*|t|, which moves
    the integral by about eps*|t|*|f(b) - f(a)|.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    t = mid[:, None] + half[:, None] * _XK[None, :]
    vals = np.asarray(f(t), dtype=float)
    k = (vals * _WK).sum(axis=-1) * half
    g = (vals[..., _GAUSS_IDX] * _WG).sum(axis=-1) * half
    if not with_noise:
        return k, np.abs(k - g)
    eps = np.finfo(float).eps
    swing = np.max(vals, axis=-1) - np.min(vals, axis=-1)
    noise = eps * (np.abs(k) + np.abs(mid) * swing)
    return k, np.abs(k - g), noise


def adaptive(f, breakpoints, rtol=1e-12, atol=1e-300, max_intervals=200_000):
    """Integrate vector-valued ``f`` over consecutive breakpoints.

    Intervals are bisected until each one's error is within its share of
    ``max(atol, rtol * |total|)``, component by component.
    Returns (values, error_estimates), each of shape (m,).
    """
    bp = np.asarray(breakpoints, dtype=float)
    a, b = bp[:-1], bp[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    span = float(np.sum(b - a))
    if span == 0:
        m = np.asarray(f(np.zeros((1, 15)))).shape[0]
        return np.zeros(m), np.zeros(m)
    done_val = None
    done_err = None
    while True:
        k, e, noise = gk15(f, a, b, with_noise=True)
        if done_val is None:
            done_val = np.zeros(k.shape[0])
            done_err = np.zeros(k.shape[0])
        total = done_val + k.sum(axis=1)
        tol = np.maximum(atol, rtol * np.abs(total))
        share = (b - a) / span
        # an interval whose error is at rounding level cannot improve by bisection
        floor = 50 * noise
        ok = np.all((e <= tol[:, None] * share[None, :]) | (e <= floor), axis=0)
        ok |= (b - a) <= 1e-14 * span
        if len(a) > max_intervals:
            ok[:] = True
        done_val += k[:, ok].sum(axis=1)
        done_err += e[:, ok].sum(axis=1)
        if np.all(ok):
            return done_val, done_err
        a, b = a[~ok], b[~ok]
        m = 0.5 * (a + b)
        a, b = np.concatenate([a, m]), np.concatenate([m, b])


def _ratio(num, den):
    return np.where(den > 0, num / np.maximum(den, 1e-300), 0.0)


def _evolving_tail(inc, r_2, r_1, r0, terms=80):
    """Tail sum when the increment ratios themselves converge geometrically.

    With ratios r_2, r_1, r0 from the last levels, the ratio sequence is
    modelled as r_inf + (r0 - r_inf) q^j and the tail is summed term by term.
    Returns (tail, modelled); ``modelled`` is false where the ratios do not
    converge geometrically.
    """
    d0 = r_1 - r_2
    d1 = r0 - r_1
    q = np.where(d0 != 0, d1 / np.where(d0 != 0, d0, 1.0), 0.0)
    ok = (np.abs(q) < 0.5) & (r0 > 0) & (r0 < NO_DECAY)
    r_inf = r0 + d1 * q / (1.0 - q)
    ok &= (r_inf > 0) & (r_inf < NO_DECAY)
    q = np.where(ok, q, 0.0)
    r_inf = np.where(ok, r_inf, 0.0)
    tail = np.zeros_like(inc)
    term = inc.copy()
    qj = np.ones_like(q)
    for _ in range(terms):
        qj = qj * q
        term = term * (r_inf + (r0 - r_inf) * qj)
        tail = tail + term
    return tail, ok


@dataclass
class LadderResult:
    value: np.ndarray
    error: np.ndarray
    divergent: np.ndarray
    stable: np.ndarray
    detected_at: np.ndarray  # level at which divergence was flagged, 0 if never
    totals: List[np.ndarray] = field(default_factory=list)


GROWTH = 0.10  # a refinement that adds more than this fraction counts as growth
NO_DECAY = 0.90  # successive increments above this ratio do not decay
TAIL_SAFETY = 10.0  # the extrapolated tail's spread underestimates its error


def ladder(f, c, r, at_floor, floored, min_levels=3, max_levels=60, rtol=1e-12):
    """Integrate f on the interval between a singular endpoint ``c`` and a regular endpoint ``r``.

    The excluded neighbourhood of ``c`` shrinks by a factor 10 per level.
    A component is declared divergent once two successive levels each add
    more than 10% to its running total while the increments fail to decay.
    Otherwise the remainder is extrapolated geometrically; once the cut-off
    reaches the |x| floor (``at_floor(t)`` true) the last sliver is evaluated
    at its midpoint with ``floored(t, scale)``, and the change of that sliver
    under a tenfold larger floor is its error estimate. A geometric tail is
    instead judged by how much it moves when the previous ratio is used.
    """
    sgn = 1.0 if r > c else -1.0
    length = abs(r - c)
    delta = length / 10.0
    cut = c + sgn * delta
    v, e = adaptive(f, sorted((cut, r)), rtol=rtol)
    totals = [v.copy()]
    incs = []
    m = v.shape[0]
    divergent = np.zeros(m, dtype=bool)
    stable = np.zeros(m, dtype=bool)
    detected_at = np.zeros(m, dtype=int)
    err = e.copy()
    level = 1
    while level < max_levels:
        new_delta = delta / 10.0
        new_cut = c + sgn * new_delta
        if new_cut == cut or new_cut == c or at_floor(new_cut):
            break
        # accuracy is judged against the running total: close to c the
        # parameter grid cannot resolve x to more than a few digits
        inc, ie = adaptive(f, sorted((new_cut, cut)), rtol=rtol, atol=rtol * np.abs(totals[-1]))
        prev = totals[-1]
        total = prev + inc
        err += ie
        incs.append(inc)
        totals.append(total)
        delta, cut = new_delta, new_cut
        level += 1
        if len(incs) >= 2:
            p_prev = totals[-3]
            grow_now = inc > GROWTH * np.maximum(prev, 1e-300)
            grow_before = incs[-2] > GROWTH * np.maximum(p_prev, 1e-300)
            no_decay = inc >= NO_DECAY * incs[-2]
            divergent |= grow_now & grow_before & no_decay & (level >= min_levels)
            detected_at[divergent & (detected_at == 0)] = level
            ratio = np.where(incs[-2] > 0, inc / np.maximum(incs[-2], 1e-300), 0.0)
            small = inc <= rtol * np.maximum(np.abs(total), 1e-300)
            stable = ~divergent & small & (ratio < NO_DECAY)
        if level >= min_levels and np.all(divergent | stable):
            break
    value = totals[-1].copy()
    # remainder between c and the final cut-off
    mid = c + sgn * delta / 2.0
    sliver = np.asarray(floored(np.array([[mid]]), 1.0), dtype=float)[:, 0, 0] * delta
    sliver_coarse = np.asarray(floored(np.array([[mid]]), 10.0), dtype=float)[:, 0, 0] * delta
    geometric, spread = sliver, np.abs(sliver - sliver_coarse)
    # ratios at or above one overflow here; those entries are masked by ``use``
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if len(incs) >= 2:
            r1 = _ratio(incs[-1], incs[-2])
            g1 = incs[-1] * r1 / np.maximum(1.0 - r1, 1e-300)
            if len(incs) >= 3:
                r0 = _ratio(incs[-2], incs[-3])
                g0 = incs[-1] * r0 / np.maximum(1.0 - r0, 1e-300)
            else:
                g0 = sliver
            use = r1 < NO_DECAY
            if len(incs) >= 4:
                r_2 = _ratio(incs[-3], incs[-4])
                g_ev, modelled = _evolving_tail(incs[-1], r_2, r0, r1)
                g0 = np.where(modelled, g1, g0)
                g1 = np.where(modelled, g_ev, g1)
            geometric = np.where(use, g1, sliver)
            spread = np.where(use, np.abs(g1 - g0), spread)
    tail = np.where(divergent, 0.0, geometric)
    value = value + tail
    err = err + np.where(divergent, 0.0, TAIL_SAFETY * spread)
    value[divergent] = np.inf
    stable = stable | (~divergent & (np.abs(tail) <= 1e-3 * np.maximum(np.abs(value), 1e-300)))
    return LadderResult(value=value, error=err, divergent=divergent, stable=stable, detected_at=detected_at, totals=totals)
