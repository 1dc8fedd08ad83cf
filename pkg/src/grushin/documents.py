"""JSON documents for maps, curves and domains.

Schemas (unknown fields are rejected everywhere):

map
    ``{"alpha": 1.0, "kind": "conjugated", "expr": <node>}``
    ``{"alpha": 1.0, "kind": "entire", "a": 2.0, "b": 0.5}``
    ``{"alpha": 1.0, "kind": "sampled", "samples": {"xs": [...], "ys": [...], "g1": [[...]], "g2": [[...]]}}``
    Any map may carry an optional ``"domain"`` (a domain document).

expression node
    ``{"node": "real_affine", "a": 3.0, "c": -1.0}`` for z -> a z + i c,
    ``{"node": "joukovski"}``,
    ``{"node": "odd_poly", "coeffs": [...], "box": [umin, umax, vmin, vmax]}``,
    ``{"node": "shift", "re": 1.0, "im": 0.0}``,
    ``{"node": "compose", "outer": <node>, "inner": <node>}``.

curve
    ``{"kind": "segment", "p": [x, y], "q": [x, y]}``
    ``{"kind": "polyline", "points": [[x, y], ...], "t": [...]}`` (``t`` optional)
    ``{"kind": "graph", "y_coeffs": [...], "t0": 0, "t1": 1, "x_coeffs": [0, 1]}``
    (``x_coeffs`` optional; coefficients in increasing degree)

domain
    ``{"rects": [[xmin, xmax, ymin, ymax], ...]}``; coordinates may be decimal
    strings, parsed exactly.
"""
import json
import math

from .curves import PolylineCurve, graph, segment
from .errors import DocumentError, DomainViolation
from .holo import Joukovski, OddRealPoly, RealAffine, Shift, compose
from .maps import ConjugatedMap, EntireAffineMap, SampledMap
from .topology import RectilinearDomain, as_fraction


def _fields(doc, path, required, optional=()):
    if not isinstance(doc, dict):
        raise DocumentError(path, "expected an object")
    for key in required:
        if key not in doc:
            raise DocumentError(f"{path}.{key}", "missing required field")
    extra = sorted(set(doc) - set(required) - set(optional))
    if extra:
        raise DocumentError(f"{path}.{extra[0]}", "unknown field")


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DocumentError(path, "expected a number")
    value = float(value)
    if not math.isfinite(value):
        raise DocumentError(path, "must be finite")
    return value


def _numbers(value, path, length=None):
    if not isinstance(value, list):
        raise DocumentError(path, "expected an array")
    if length is not None and len(value) != length:
        raise DocumentError(path, f"expected {length} entries")
    return [_number(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _matrix(value, path):
    if not isinstance(value, list) or not value:
        raise DocumentError(path, "expected a non-empty array of rows")
    return [_numbers(row, f"{path}[{j}]") for j, row in enumerate(value)]


def _alpha(doc, path):
    alpha = _number(doc["alpha"], f"{path}.alpha")
    if alpha <= 0:
        raise DocumentError(f"{path}.alpha", "alpha must be positive")
    return alpha


def parse_expr(doc, path="$.expr"):
    if not isinstance(doc, dict) or "node" not in doc:
        raise DocumentError(f"{path}.node", "missing required field")
    node = doc["node"]
    try:
        if node == "real_affine":
            _fields(doc, path, ("node", "a"), ("c",))
            a = _number(doc["a"], f"{path}.a")
            if a == 0:
                raise DocumentError(f"{path}.a", "RealAffine needs a nonzero slope a")
            return RealAffine(a, _number(doc.get("c", 0.0), f"{path}.c"))
        if node == "joukovski":
            _fields(doc, path, ("node",))
            return Joukovski()
        if node == "odd_poly":
            _fields(doc, path, ("node", "coeffs", "box"))
            return OddRealPoly(tuple(_numbers(doc["coeffs"], f"{path}.coeffs")), tuple(_numbers(doc["box"], f"{path}.box", 4)))
        if node == "shift":
            _fields(doc, path, ("node",), ("re", "im"))
            return Shift(complex(_number(doc.get("re", 0.0), f"{path}.re"), _number(doc.get("im", 0.0), f"{path}.im")))
        if node == "compose":
            _fields(doc, path, ("node", "outer", "inner"))
            return compose(parse_expr(doc["outer"], f"{path}.outer"), parse_expr(doc["inner"], f"{path}.inner"))
    except (ValueError, DomainViolation) as exc:
        if isinstance(exc, DocumentError):
            raise
        raise DocumentError(path, str(exc)) from exc
    raise DocumentError(f"{path}.node", f"unknown expression node {node!r}")


def parse_domain(doc, path="$"):
    _fields(doc, path, ("rects",))
    rects = doc["rects"]
    if not isinstance(rects, list) or not rects:
        raise DocumentError(f"{path}.rects", "expected a non-empty array")
    parsed = []
    for k, r in enumerate(rects):
        rp = f"{path}.rects[{k}]"
        if not isinstance(r, list) or len(r) != 4:
            raise DocumentError(rp, "a rectangle is [xmin, xmax, ymin, ymax]")
        coords = []
        for i, c in enumerate(r):
            if isinstance(c, bool) or not isinstance(c, (int, float, str)):
                raise DocumentError(f"{rp}[{i}]", "expected a number or decimal string")
            try:
                coords.append(as_fraction(c))
            except (ValueError, ArithmeticError) as exc:
                raise DocumentError(f"{rp}[{i}]", str(exc)) from exc
        if not (coords[0] < coords[1] and coords[2] < coords[3]):
            raise DocumentError(rp, f"rectangle {k} is degenerate (need xmin < xmax and ymin < ymax)")
        parsed.append(tuple(coords))
    try:
        return RectilinearDomain.from_rects(parsed)
    except ValueError as exc:
        raise DocumentError(f"{path}.rects", str(exc)) from exc


def parse_map(doc, path="$"):
    if not isinstance(doc, dict):
        raise DocumentError(path, "expected an object")
    kind = doc.get("kind")
    common = ("alpha", "kind")
    if kind == "conjugated":
        _fields(doc, path, common + ("expr",), ("domain",))
    elif kind == "entire":
        _fields(doc, path, common + ("a",), ("b", "domain"))
    elif kind == "sampled":
        _fields(doc, path, common + ("samples",), ("domain",))
    else:
        raise DocumentError(f"{path}.kind", "expected 'conjugated', 'entire' or 'sampled'")
    alpha = _alpha(doc, path)
    domain = parse_domain(doc["domain"], f"{path}.domain") if "domain" in doc else None
    if kind == "conjugated":
        return ConjugatedMap(alpha, parse_expr(doc["expr"], f"{path}.expr"), domain)
    if kind == "entire":
        a = _number(doc["a"], f"{path}.a")
        if a == 0:
            raise DocumentError(f"{path}.a", "entire map needs a nonzero a")
        return EntireAffineMap(alpha, a, _number(doc.get("b", 0.0), f"{path}.b"), domain)
    sp = f"{path}.samples"
    s = doc["samples"]
    _fields(s, sp, ("xs", "ys", "g1", "g2"))
    try:
        return SampledMap(
            alpha,
            _numbers(s["xs"], f"{sp}.xs"),
            _numbers(s["ys"], f"{sp}.ys"),
            _matrix(s["g1"], f"{sp}.g1"),
            _matrix(s["g2"], f"{sp}.g2"),
            domain,
        )
    except ValueError as exc:
        if isinstance(exc, DocumentError):
            raise
        raise DocumentError(sp, str(exc)) from exc


def parse_curve(doc, path="$"):
    if not isinstance(doc, dict):
        raise DocumentError(path, "expected an object")
    kind = doc.get("kind")
    try:
        if kind == "segment":
            _fields(doc, path, ("kind", "p", "q"))
            return segment(_numbers(doc["p"], f"{path}.p", 2), _numbers(doc["q"], f"{path}.q", 2))
        if kind == "polyline":
            _fields(doc, path, ("kind", "points"), ("t",))
            pts = doc["points"]
            if not isinstance(pts, list) or len(pts) < 2:
                raise DocumentError(f"{path}.points", "expected at least two points")
            pts = [_numbers(p, f"{path}.points[{i}]", 2) for i, p in enumerate(pts)]
            if "t" in doc:
                return PolylineCurve(_numbers(doc["t"], f"{path}.t", len(pts)), pts)
            return PolylineCurve.through(pts)
        if kind == "graph":
            _fields(doc, path, ("kind", "y_coeffs", "t0", "t1"), ("x_coeffs",))
            t0 = _number(doc["t0"], f"{path}.t0")
            t1 = _number(doc["t1"], f"{path}.t1")
            if not t0 < t1:
                raise DocumentError(f"{path}.t1", "need t0 < t1")
            xc = _numbers(doc.get("x_coeffs", [0.0, 1.0]), f"{path}.x_coeffs")
            return graph(_numbers(doc["y_coeffs"], f"{path}.y_coeffs"), t0, t1, x_coeffs=xc)
    except ValueError as exc:
        if isinstance(exc, DocumentError):
            raise
        raise DocumentError(path, str(exc)) from exc
    raise DocumentError(f"{path}.kind", "expected 'segment', 'polyline' or 'graph'")


PARSERS = {"map": parse_map, "curve": parse_curve, "domain": parse_domain}


def load_document(path, kind):
    """Read and validate a JSON document of the given kind ('map', 'curve', 'domain')."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise DocumentError(str(path), f"cannot read file ({exc.strerror})") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from exc
    return PARSERS[kind](doc)
