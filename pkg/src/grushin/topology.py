"""Rectilinear domains, their trace on the singular line, and the incidence obstruction.

A domain is the interior of the union of finitely many closed axis-aligned
rectangles, so rectangles that abut along an edge of positive length are
glued. All combinatorics run on a cell decomposition with exact rational
coordinates: the distinct x-coordinates (plus 0) and y-coordinates cut the
bounding box into cells, each either covered or not.
"""
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Tuple

import numpy as np
from scipy import ndimage

from .errors import SearchBudgetExceeded

SEARCH_LIMIT = 12


def as_fraction(value):
    """Exact rational from an int, Fraction, decimal string, or float (via its repr)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    value = float(value)
    if not np.isfinite(value):
        raise ValueError("coordinates must be finite")
    return Fraction(repr(value))


@dataclass(frozen=True)
class RectilinearDomain:
    rects: Tuple[Tuple[Fraction, Fraction, Fraction, Fraction], ...]
    _cells: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        rects = tuple(tuple(as_fraction(c) for c in r) for r in self.rects)
        if not rects:
            raise ValueError("a domain needs at least one rectangle")
        for k, r in enumerate(rects):
            if len(r) != 4:
                raise ValueError(f"rectangle {k} must have four coordinates")
            xmin, xmax, ymin, ymax = r
            if not (xmin < xmax and ymin < ymax):
                raise ValueError(f"rectangle {k} is degenerate (need xmin < xmax and ymin < ymax)")
        object.__setattr__(self, "rects", rects)
        object.__setattr__(self, "_cells", _decompose(rects))
        _, n = ndimage.label(self._cells[2])
        if n != 1:
            raise ValueError(f"domain is not connected ({n} pieces)")

    @classmethod
    def from_rects(cls, rects):
        return cls(tuple(tuple(r) for r in rects))

    @property
    def xs(self):
        return self._cells[0]

    @property
    def ys(self):
        return self._cells[1]

    @property
    def covered(self):
        return self._cells[2]

    def bbox(self):
        return (
            float(min(r[0] for r in self.rects)),
            float(max(r[1] for r in self.rects)),
            float(min(r[2] for r in self.rects)),
            float(max(r[3] for r in self.rects)),
        )

    def diameter(self):
        x0, x1, y0, y1 = self.bbox()
        return float(np.hypot(x1 - x0, y1 - y0))

    def contains(self, x, y):
        """Membership of float points in the open domain (vectorized)."""
        xs = np.array([float(v) for v in self.xs])
        ys = np.array([float(v) for v in self.ys])
        cov = self.covered
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        ix = np.searchsorted(xs, x, side="right") - 1
        iy = np.searchsorted(ys, y, side="right") - 1
        on_x = (ix >= 0) & (ix < len(xs)) & (xs[np.clip(ix, 0, len(xs) - 1)] == x)
        on_y = (iy >= 0) & (iy < len(ys)) & (ys[np.clip(iy, 0, len(ys) - 1)] == y)
        inside = np.ones(x.shape, dtype=bool)
        for dx in (0, 1):
            for dy in (0, 1):
                cx = ix - dx
                cy = iy - dy
                needed = ((dx == 0) | on_x) & ((dy == 0) | on_y)
                valid = (cx >= 0) & (cx < cov.shape[0]) & (cy >= 0) & (cy < cov.shape[1])
                hit = np.zeros(x.shape, dtype=bool)
                hit[valid] = cov[cx[valid], cy[valid]]
                inside &= ~needed | hit
        return inside

    def affine_image(self, sx, a, b=0.0):
        """Image under (x, y) -> (sx x, a y + b); exact when the factors are rational."""
        sx, a, b = as_fraction(sx), as_fraction(a), as_fraction(b)
        out = []
        for xmin, xmax, ymin, ymax in self.rects:
            x0, x1 = sorted((sx * xmin, sx * xmax))
            y0, y1 = sorted((a * ymin + b, a * ymax + b))
            out.append((x0, x1, y0, y1))
        return RectilinearDomain(tuple(out))

    def dilate(self, lam, alpha):
        """Image under the dilation (lam x, lam^(alpha+1) y)."""
        lam = as_fraction(lam)
        alpha = as_fraction(alpha)
        if alpha.denominator == 1:
            factor = lam ** int(alpha + 1)
        else:
            factor = float(lam) ** float(alpha + 1)
        return self.affine_image(lam, factor, 0)

    def translate(self, dy):
        return self.affine_image(1, 1, dy)

    def to_dict(self):
        return {"rects": [[str(c) for c in r] for r in self.rects]}


def _decompose(rects):
    xs = sorted({c for r in rects for c in r[:2]})
    if xs[0] < 0 < xs[-1]:
        xs = sorted(set(xs) | {Fraction(0)})
    ys = sorted({c for r in rects for c in r[2:]})
    cov = np.zeros((len(xs) - 1, len(ys) - 1), dtype=bool)
    xi = {v: k for k, v in enumerate(xs)}
    yi = {v: k for k, v in enumerate(ys)}
    for xmin, xmax, ymin, ymax in rects:
        cov[xi[xmin]:xi[xmax], yi[ymin]:yi[ymax]] = True
    return tuple(xs), tuple(ys), cov


def _axis_column(domain):
    """Index k with xs[k] == 0 strictly inside the x-span, else None."""
    xs = domain.xs
    for k in range(1, len(xs) - 1):
        if xs[k] == 0:
            return k
    return None


def _axis_runs(domain):
    k = _axis_column(domain)
    if k is None:
        return k, []
    cov = domain.covered
    both = cov[k - 1, :] & cov[k, :]
    runs = []
    j = 0
    while j < len(both):
        if both[j]:
            start = j
            while j + 1 < len(both) and both[j + 1]:
                j += 1
            runs.append((start, j))
        j += 1
    return k, runs


def axis_components(domain) -> List[Tuple[Fraction, Fraction]]:
    """Connected components of (domain) intersected with {x = 0}, as open y-intervals."""
    _, runs = _axis_runs(domain)
    ys = domain.ys
    return [(ys[a], ys[b + 1]) for a, b in runs]


@dataclass(frozen=True)
class SideComponent:
    side: str  # "left" or "right"
    cells: frozenset

    def __repr__(self):
        return f"SideComponent({self.side}, {len(self.cells)} cells)"


def _side_labels(domain):
    xs = domain.xs
    cov = domain.covered
    left_cols = np.array([xs[i + 1] <= 0 for i in range(len(xs) - 1)])
    left_mask = cov & left_cols[:, None]
    right_mask = cov & ~left_cols[:, None]
    lab_l, n_l = ndimage.label(left_mask)
    lab_r, n_r = ndimage.label(right_mask)
    return lab_l, n_l, lab_r, n_r


def side_components(domain) -> List[SideComponent]:
    """Components of the domain minus {x = 0}, left ones first, each in label order."""
    lab_l, n_l, lab_r, n_r = _side_labels(domain)
    out = []
    for side, lab, n in (("left", lab_l, n_l), ("right", lab_r, n_r)):
        for c in range(1, n + 1):
            cells = frozenset(zip(*map(lambda a: a.tolist(), np.nonzero(lab == c))))
            out.append(SideComponent(side, cells))
    return out


@dataclass(frozen=True)
class IncidenceGraph:
    sides: Tuple[str, ...]  # side label of each side vertex
    axis: Tuple[Tuple[Fraction, Fraction], ...]
    edges: frozenset  # pairs (side index, axis index)

    def neighbors(self, s):
        return frozenset(a for (t, a) in self.edges if t == s)

    def side_degrees(self):
        return [len(self.neighbors(s)) for s in range(len(self.sides))]

    def axis_degrees(self):
        return [sum(1 for (_, a) in self.edges if a == i) for i in range(len(self.axis))]


def incidence_graph(domain) -> IncidenceGraph:
    """Edge (S, I) iff the closure of S shares a positive-length piece of I."""
    k, runs = _axis_runs(domain)
    lab_l, n_l, lab_r, n_r = _side_labels(domain)
    sides = tuple(["left"] * n_l + ["right"] * n_r)
    edges = set()
    ys = domain.ys
    axis = tuple((ys[a], ys[b + 1]) for a, b in runs)
    for i, (a, b) in enumerate(runs):
        for j in range(a, b + 1):
            edges.add((int(lab_l[k - 1, j]) - 1, i))
            edges.add((n_l + int(lab_r[k, j]) - 1, i))
    return IncidenceGraph(sides=sides, axis=axis, edges=frozenset(edges))


@dataclass
class NoObstruction:
    axis_map: Dict[int, int]
    side_map: Dict[int, int]
    swapped: bool

    obstructed = False


@dataclass
class Obstruction:
    certificate: dict

    obstructed = True


def _swap(label):
    return "right" if label == "left" else "left"


def _axis_signatures(g, labels):
    degs = g.side_degrees()
    return [
        tuple(sorted((labels[s], degs[s]) for (s, a) in g.edges if a == i))
        for i in range(len(g.axis))
    ]


def _bijections(sig1, sig2):
    """Axis bijections i -> perm[i] that respect signatures, in lexicographic order."""
    n = len(sig1)
    perm = [None] * n
    used = [False] * n

    def extend(i):
        if i == n:
            yield tuple(perm)
            return
        for j in range(n):
            if not used[j] and sig1[i] == sig2[j]:
                used[j] = True
                perm[i] = j
                yield from extend(i + 1)
                used[j] = False

    yield from extend(0)


def _search(g1, g2, allow_side_swap):
    nb1 = [g1.neighbors(s) for s in range(len(g1.sides))]
    key2 = Counter((g2.sides[s], g2.neighbors(s)) for s in range(len(g2.sides)))
    by_key2 = {}
    for s in range(len(g2.sides)):
        by_key2.setdefault((g2.sides[s], g2.neighbors(s)), []).append(s)
    sig2 = _axis_signatures(g2, g2.sides)
    for swapped in ([False, True] if allow_side_swap else [False]):
        labels1 = [(_swap(l) if swapped else l) for l in g1.sides]
        for perm in _bijections(_axis_signatures(g1, labels1), sig2):
            keys = [(labels1[s], frozenset(perm[a] for a in nb1[s])) for s in range(len(g1.sides))]
            if Counter(keys) != key2:
                continue
            pool = {k: list(v) for k, v in by_key2.items()}
            side_map = {s: pool[keys[s]].pop(0) for s in range(len(g1.sides))}
            return NoObstruction(dict(enumerate(perm)), side_map, swapped)
    return None


def obstruction_check(d1, d2, allow_side_swap=True):
    """Search for an incidence-preserving correspondence between two domains.

    A conformal map must carry axis components onto axis components and side
    components onto side components with their incidences, so the absence of
    such a correspondence rules conformal equivalence out. The converse is not
    claimed.
    """
    g1, g2 = incidence_graph(d1), incidence_graph(d2)
    if len(g1.axis) != len(g2.axis):
        return Obstruction({"kind": "axis_component_count", "left": len(g1.axis), "right": len(g2.axis)})
    if len(g1.sides) != len(g2.sides):
        return Obstruction({"kind": "side_component_count", "left": len(g1.sides), "right": len(g2.sides)})
    deg1, deg2 = sorted(g1.side_degrees(), reverse=True), sorted(g2.side_degrees(), reverse=True)
    if deg1 != deg2:
        return Obstruction({"kind": "side_degree_multiset", "left": deg1, "right": deg2})
    a1, a2 = sorted(g1.axis_degrees()), sorted(g2.axis_degrees())
    if a1 != a2:
        return Obstruction({"kind": "axis_degree_multiset", "left": a1, "right": a2})
    if len(g1.axis) > SEARCH_LIMIT or len(g1.sides) > SEARCH_LIMIT:
        raise SearchBudgetExceeded(
            f"{len(g1.axis)} axis / {len(g1.sides)} side components exceed the limit of {SEARCH_LIMIT}"
        )
    found = _search(g1, g2, allow_side_swap)
    if found is not None:
        return found
    return Obstruction({"kind": "no_incidence_isomorphism", "allow_side_swap": allow_side_swap})
