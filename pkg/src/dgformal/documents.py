"""JSON interchange documents for dg-algebras and simplicial complexes.

Scalars are exact: integers or "p/q" strings.  Structure constants are
sparse, a missing entry means zero.

    {"format": "dga/1", "field": "QQ",
     "basis": {"0": ["1"], "1": ["x", "y", "z"], "2": ["xy", "xz", "yz"]},
     "differential": [["z", {"xy": "1"}]],
     "product": [["x", "y", {"xy": "1"}], ...],
     "unital": true, "unit": "1", "reduced": false}

    {"format": "complex/1", "vertices": ["0", "1", "2"],
     "simplices": [["0", "1"], ["1", "2"], ["0", "2"]], "basepoint": "0"}
"""

from __future__ import annotations

import json
from fractions import Fraction

from .complexes import OrderedSimplicialComplex
from .dga import DgAlgebra, algebra_from_tables
from .errors import MalformedInputError

ALGEBRA_FORMAT = "dga/1"
COMPLEX_FORMAT = "complex/1"


class DocumentError(MalformedInputError):
    """Parse failure with a position: (line, column) for syntax, a JSON path otherwise."""

    def __init__(self, message, line=None, column=None, path=None):
        self.line, self.column, self.path = line, column, path
        where = []
        if line is not None:
            where.append(f"line {line}, column {column}")
        if path:
            where.append(f"at {path}")
        super().__init__((", ".join(where) + ": " if where else "") + message)


def scalar_to_str(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def parse_scalar(x, path) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise DocumentError(f"scalar {x!r} is not exact; use an integer or a 'p/q' string", path=path)
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise DocumentError(f"bad scalar {x!r}", path=path) from None
    raise DocumentError(f"bad scalar {x!r}", path=path)


def load_json(text: str):
    if not text.strip():
        raise DocumentError("empty document", line=1, column=1)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(e.msg, line=e.lineno, column=e.colno) from None


def _vector(obj, path, names):
    if not isinstance(obj, dict):
        raise DocumentError("expected an object {basis name: scalar}", path=path)
    out = {}
    for k, v in obj.items():
        if k not in names:
            raise DocumentError(f"unknown basis element {k!r}", path=f"{path}.{k}")
        c = parse_scalar(v, f"{path}.{k}")
        if c:
            out[k] = c
    return out


def _expect(cond, message, path):
    if not cond:
        raise DocumentError(message, path=path)


def algebra_from_document(doc) -> DgAlgebra:
    _expect(isinstance(doc, dict), "document must be an object", "$")
    _expect(doc.get("format") == ALGEBRA_FORMAT, f"format must be {ALGEBRA_FORMAT!r}", "$.format")
    _expect(doc.get("field", "QQ") == "QQ", "only the rationals 'QQ' are supported", "$.field")
    raw = doc.get("basis")
    _expect(isinstance(raw, dict), "basis must map degrees to name lists", "$.basis")
    basis, names = {}, set()
    for d, ns in raw.items():
        try:
            deg = int(d)
        except ValueError:
            raise DocumentError(f"degree {d!r} is not an integer", path="$.basis") from None
        _expect(isinstance(ns, list) and all(isinstance(n, str) for n in ns),
                "basis entries must be lists of names", f"$.basis.{d}")
        for n in ns:
            _expect(n not in names, f"basis name {n!r} used twice", f"$.basis.{d}")
            names.add(n)
        basis[deg] = ns

    diff = {}
    for j, entry in enumerate(doc.get("differential", [])):
        path = f"$.differential[{j}]"
        _expect(isinstance(entry, list) and len(entry) == 2, "expected [source, vector]", path)
        src, vec = entry
        _expect(src in names, f"unknown basis element {src!r}", path)
        _expect(src not in diff, f"differential of {src!r} given twice", path)
        diff[src] = _vector(vec, path, names)

    prod = {}
    for j, entry in enumerate(doc.get("product", [])):
        path = f"$.product[{j}]"
        _expect(isinstance(entry, list) and len(entry) == 3, "expected [left, right, vector]", path)
        a, b, vec = entry
        _expect(a in names and b in names, f"unknown basis element in ({a!r}, {b!r})", path)
        _expect((a, b) not in prod, f"product ({a}, {b}) given twice", path)
        prod[(a, b)] = _vector(vec, path, names)

    unit = None
    if doc.get("unital", False):
        u = doc.get("unit")
        _expect(u is not None, "unital document needs a unit", "$.unit")
        if isinstance(u, str):
            _expect(u in names, f"unknown unit {u!r}", "$.unit")
            unit = {u: 1}
        else:
            unit = _vector(u, "$.unit", names)
    aug = doc.get("augmentation")
    if aug is not None:
        aug = _vector(aug, "$.augmentation", names)
    try:
        return algebra_from_tables(basis, diff, prod, unit=unit, augmentation=aug,
                                   name=doc.get("name", ""), reduced=bool(doc.get("reduced", False)))
    except MalformedInputError as e:
        raise DocumentError(str(e), path="$") from None


def algebra_to_document(A: DgAlgebra) -> dict:
    S = A.space
    vec = lambda v: {S.names[k]: scalar_to_str(c) for k, c in sorted(v.items())}  # noqa: E731
    doc = {"format": ALGEBRA_FORMAT, "field": "QQ"}
    if A.name:
        doc["name"] = A.name
    doc["basis"] = {str(d): list(ns) for d, ns in S.basis.items()}
    doc["differential"] = [[S.names[k], vec(col)] for k, col in sorted(A.d.columns.items()) if col]
    doc["product"] = [[S.names[a], S.names[b], vec(v)]
                      for (a, b), v in sorted(A.product.entries.items()) if v]
    doc["unital"] = A.unit is not None
    if A.unit is not None:
        doc["unit"] = vec(A.unit)
    if A.augmentation:
        doc["augmentation"] = vec(A.augmentation)
    doc["reduced"] = bool(A.reduced)
    return doc


def complex_from_document(doc, basepoint=None) -> OrderedSimplicialComplex:
    _expect(isinstance(doc, dict), "document must be an object", "$")
    _expect(doc.get("format") == COMPLEX_FORMAT, f"format must be {COMPLEX_FORMAT!r}", "$.format")
    verts = doc.get("vertices")
    _expect(isinstance(verts, list) and verts, "vertices must be a nonempty list", "$.vertices")
    verts = [str(v) for v in verts]
    pos = {v: j for j, v in enumerate(verts)}
    _expect(len(pos) == len(verts), "duplicate vertex names", "$.vertices")
    maximal = []
    for j, s in enumerate(doc.get("simplices", [])):
        _expect(isinstance(s, list) and s, "simplex must be a nonempty list of vertices",
                f"$.simplices[{j}]")
        for v in s:
            _expect(str(v) in pos, f"unknown vertex {v!r}", f"$.simplices[{j}]")
        idx = [pos[str(v)] for v in s]
        _expect(len(set(idx)) == len(idx), "repeated vertex in simplex", f"$.simplices[{j}]")
        maximal.append(idx)
    bp = basepoint if basepoint is not None else doc.get("basepoint", verts[0])
    _expect(str(bp) in pos, f"unknown basepoint {bp!r}", "$.basepoint")
    return OrderedSimplicialComplex.from_maximal(verts, maximal, pos[str(bp)])


def complex_to_document(X: OrderedSimplicialComplex) -> dict:
    maximal = [s for s in sorted(X.simplices)
               if not any(len(t) > len(s) and set(s) <= set(t) for t in X.simplices)]
    return {"format": COMPLEX_FORMAT, "vertices": [str(v) for v in X.vertices],
            "simplices": [[X.vertices[v] for v in s] for s in maximal],
            "basepoint": X.vertices[X.basepoint]}


def read_document(text: str):
    """('algebra', DgAlgebra-document) or ('complex', document) after syntax checks."""
    doc = load_json(text)
    fmt = doc.get("format") if isinstance(doc, dict) else None
    if fmt == ALGEBRA_FORMAT:
        return "algebra", doc
    if fmt == COMPLEX_FORMAT:
        return "complex", doc
    raise DocumentError(f"unknown format {fmt!r}", path="$.format")


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False)
