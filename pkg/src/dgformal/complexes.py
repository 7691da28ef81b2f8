"""Ordered simplicial complexes, their cochain algebras, and the example corpus."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

from .dga import (DgAlgebra, algebra_from_tables, cup_length, exterior_product_table,
                  induced_cohomology_algebra, is_connected, offending_product,
                  reduced_subalgebra, validate)
from .errors import DisconnectedError, MalformedInputError
from .linalg import ONE, GradedMap, GradedVectorSpace, MultilinearMap


class OrderedSimplicialComplex:
    """Simplices are strictly increasing tuples of vertex indices."""

    def __init__(self, vertices, simplices, basepoint=0):
        self.vertices = list(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise MalformedInputError("duplicate vertex names")
        nv = len(self.vertices)
        simp = set()
        for s in simplices:
            s = tuple(s)
            if not s or any(not 0 <= v < nv for v in s):
                raise MalformedInputError(f"simplex {s} uses an unknown vertex")
            if any(a >= b for a, b in zip(s, s[1:])):
                raise MalformedInputError(f"simplex {s} is not strictly increasing")
            simp.add(s)
        for v in range(nv):
            simp.add((v,))
        for s in simp:
            if len(s) > 1:
                for j in range(len(s)):
                    face = s[:j] + s[j + 1:]
                    if face not in simp:
                        raise MalformedInputError(
                            f"missing face {self.label(face)} of {self.label(s)}")
        self.simplices = frozenset(simp)
        if isinstance(basepoint, str):
            basepoint = self.vertices.index(basepoint)
        if not 0 <= basepoint < max(nv, 1):
            raise MalformedInputError("basepoint out of range")
        self.basepoint = basepoint

    @classmethod
    def from_maximal(cls, vertices, maximal, basepoint=0):
        """Close a list of (possibly unsorted) maximal simplices under faces."""
        vertices = list(vertices)
        pos = {v: j for j, v in enumerate(vertices)}
        closed = set()
        for s in maximal:
            s = tuple(sorted(pos[v] if not isinstance(v, int) else v for v in s))
            for k in range(1, len(s) + 1):
                closed.update(itertools.combinations(s, k))
        return cls(vertices, closed, basepoint)

    def label(self, s) -> str:
        return "[" + ",".join(str(self.vertices[v]) for v in s) + "]"

    def by_dimension(self) -> dict[int, list[tuple]]:
        out = {}
        for s in sorted(self.simplices):
            out.setdefault(len(s) - 1, []).append(s)
        return out

    @property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def is_connected(self) -> bool:
        n = len(self.vertices)
        if n == 0:
            return False
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a
        for s in self.simplices:
            if len(s) == 2:
                parent[find(s[0])] = find(s[1])
        return len({find(v) for v in range(n)}) == 1

    def __repr__(self):
        return f"OrderedSimplicialComplex({len(self.vertices)} vertices, {len(self.simplices)} simplices)"


def cochain_algebra(X: OrderedSimplicialComplex, name: str = "") -> DgAlgebra:
    """Simplicial cochains with (α ∪ β)(v_0..v_{p+q}) = α(v_0..v_p) β(v_p..v_{p+q})."""
    by_dim = X.by_dimension()
    basis = {p: [X.label(s) for s in ss] for p, ss in by_dim.items()}
    S = GradedVectorSpace(basis)
    index = {s: S.offset(p) + j for p, ss in by_dim.items() for j, s in enumerate(ss)}

    d_cols = {}
    for tau, t in index.items():
        if len(tau) == 1:
            continue
        for j in range(len(tau)):
            sigma = tau[:j] + tau[j + 1:]
            col = d_cols.setdefault(index[sigma], {})
            col[t] = col.get(t, 0) + (-1 if j % 2 else 1)

    prod = {}
    for rho, r in index.items():
        for p in range(len(rho)):
            prod[(index[rho[:p + 1]], index[rho[p:]])] = {r: ONE}
    unit = {index[(v,)]: ONE for v in range(len(X.vertices))}
    return DgAlgebra(S, GradedMap(S, S, 1, d_cols), MultilinearMap(S, S, 2, 0, prod),
                     unit=unit, augmentation={index[(X.basepoint,)]: ONE}, name=name)


def suspension(X: OrderedSimplicialComplex) -> OrderedSimplicialComplex:
    north, south = "N", "S"
    while north in X.vertices:
        north += "'"
    while south in X.vertices:
        south += "'"
    n = len(X.vertices)
    simp = set(X.simplices)
    for cone in (n, n + 1):
        simp.add((cone,))
        for s in X.simplices:
            simp.add(s + (cone,))
    return OrderedSimplicialComplex(X.vertices + [north, south], simp, X.basepoint)


def reduced_cochain_algebra(X: OrderedSimplicialComplex, basepoint=None) -> DgAlgebra:
    A = cochain_algebra(X)
    if basepoint is not None:
        if isinstance(basepoint, str):
            basepoint = X.vertices.index(basepoint)
        A.augmentation = {A.space.index(X.label((basepoint,))): ONE}
    return reduced_subalgebra(A)


def ls_cat_lower_bound(X: OrderedSimplicialComplex) -> int:
    """Cup length of X: a lower bound for its Lusternik-Schnirelmann category."""
    if not X.is_connected():
        raise DisconnectedError("LS-category bound needs a connected complex")
    return cup_length(induced_cohomology_algebra(reduced_cochain_algebra(X)))


# --------------------------------------------------------------------------
# standard complexes

def point():
    return OrderedSimplicialComplex(["0"], [(0,)])


def circle():
    return OrderedSimplicialComplex.from_maximal(["0", "1", "2"], [(0, 1), (1, 2), (0, 2)])


def sphere2():
    return OrderedSimplicialComplex.from_maximal(
        ["0", "1", "2", "3"], list(itertools.combinations(range(4), 3)))


def two_points():
    return OrderedSimplicialComplex(["p", "q"], [(0,), (1,)])


def wedge(*pieces, names=None):
    """One-point union, glueing the basepoints (vertex 0 of each piece)."""
    vertices = ["*"]
    simplices = {(0,)}
    for j, X in enumerate(pieces):
        tag = names[j] if names else chr(ord("a") + j)
        remap = {}
        for v, vname in enumerate(X.vertices):
            if v == X.basepoint:
                remap[v] = 0
            else:
                remap[v] = len(vertices)
                vertices.append(f"{tag}{vname}")
        for s in X.simplices:
            simplices.add(tuple(sorted(remap[v] for v in s)))
    return OrderedSimplicialComplex(vertices, simplices, 0)


def torus7():
    """Minimal 7-vertex triangulation: triangles {i,i+1,i+3}, {i,i+2,i+3} mod 7."""
    tri = []
    for i in range(7):
        tri.append((i, (i + 1) % 7, (i + 3) % 7))
        tri.append((i, (i + 2) % 7, (i + 3) % 7))
    return OrderedSimplicialComplex.from_maximal([str(v) for v in range(7)], tri)


def truncated_heisenberg() -> DgAlgebra:
    """Λ(x, y, z) with |x|=|y|=|z|=1, dz = xy, truncated above degree 2.

    Cohomology has trivial reduced products but <[x],[x],[y]> = [xz] ≠ 0; the
    algebraic stand-in for the Borromean rings complement.
    """
    basis, prod = exterior_product_table("xyz", 2)
    return algebra_from_tables(basis, {"z": {"xy": 1}}, prod, unit="1", name="truncated Heisenberg")


def heisenberg() -> DgAlgebra:
    """Λ(x, y, z) with dz = xy: cochains of the Heisenberg nilmanifold."""
    basis, prod = exterior_product_table("xyz")
    return algebra_from_tables(basis, {"z": {"xy": 1}}, prod, unit="1", name="Heisenberg")


def exterior(generators="xy", cap=None, name=None) -> DgAlgebra:
    basis, prod = exterior_product_table(generators, cap)
    return algebra_from_tables(basis, {}, prod, unit="1",
                               name=name or f"Λ({','.join(generators)})" + (f"≤{cap}" if cap else ""))


# --------------------------------------------------------------------------
# corpus

@dataclass
class ExampleDescriptor:
    """A named construction with the properties the engine should recompute.

    ``expected`` keys: dims (reduced cohomology per degree), cup_length,
    trivial_product, zero_differential, verdict (certify_formality),
    pipeline ('formal', 'non-formal' or 'not-applicable') and massey, a list
    of (class names, value string or None for vanishing).
    """

    name: str
    build: Callable[[], DgAlgebra]
    expected: dict = field(default_factory=dict)
    complex: Callable[[], OrderedSimplicialComplex] | None = None
    note: str = ""

    def algebra(self) -> DgAlgebra:
        A = self.build()
        A.name = self.name
        return A


def _from_complex(fn):
    return lambda: cochain_algebra(fn())


def example_corpus() -> list[ExampleDescriptor]:
    E = ExampleDescriptor
    s1v = lambda: wedge(circle(), circle())  # noqa: E731
    s1v2 = lambda: wedge(circle(), circle(), sphere2())  # noqa: E731
    storus = lambda: suspension(torus7())  # noqa: E731
    return [
        E("point", _from_complex(point), complex=point,
          expected=dict(dims={}, cup_length=0, trivial_product=True, verdict="formal-up-to-cap",
                        pipeline="formal")),
        E("circle", _from_complex(circle), complex=circle,
          expected=dict(dims={1: 1}, cup_length=1, trivial_product=True,
                        verdict="formal-up-to-cap", pipeline="formal")),
        E("S2", _from_complex(sphere2), complex=sphere2,
          expected=dict(dims={2: 1}, cup_length=1, trivial_product=True,
                        verdict="formal-up-to-cap", absolute=True, pipeline="formal")),
        E("S1vS1", _from_complex(s1v), complex=s1v,
          expected=dict(dims={1: 2}, cup_length=1, trivial_product=True,
                        verdict="formal-up-to-cap", pipeline="formal")),
        E("S1vS1vS2", _from_complex(s1v2), complex=s1v2,
          expected=dict(dims={1: 2, 2: 1}, cup_length=1, trivial_product=True,
                        verdict="formal-up-to-cap", pipeline="formal")),
        E("torus", _from_complex(torus7), complex=torus7,
          note="transferred m_3 is nonzero but not a Massey product, so no verdict",
          expected=dict(dims={1: 2, 2: 1}, cup_length=2, trivial_product=False,
                        verdict="inconclusive", pipeline="not-applicable")),
        E("suspension(torus)", _from_complex(storus), complex=storus,
          expected=dict(dims={2: 2, 3: 1}, cup_length=1, trivial_product=True,
                        verdict="formal-up-to-cap", absolute=True, pipeline="formal")),
        E("truncated Heisenberg", truncated_heisenberg,
          note="algebraic stand-in for the Borromean rings complement",
          expected=dict(dims={1: 2, 2: 2}, cup_length=1, trivial_product=True,
                        verdict="non-formal", pipeline="non-formal",
                        massey=[(("[x]", "[x]", "[y]"), "[xz]"), (("[x]", "[y]", "[y]"), "-[yz]")])),
        E("Heisenberg", heisenberg,
          expected=dict(dims={1: 2, 2: 2, 3: 1}, cup_length=2, trivial_product=False,
                        verdict="non-formal", pipeline="not-applicable",
                        massey=[(("[x]", "[x]", "[y]"), "[xz]")])),
        E("Λ(x,y)", lambda: exterior("xy"),
          expected=dict(dims={1: 2, 2: 1}, cup_length=2, trivial_product=False,
                        zero_differential=True, verdict="formal-up-to-cap",
                        pipeline="not-applicable")),
        E("Λ(x,y,z)≤1", lambda: exterior("xyz", 1),
          expected=dict(dims={1: 3}, cup_length=1, trivial_product=True, zero_differential=True,
                        verdict="formal-up-to-cap", pipeline="formal")),
        E("Λ(x,y,z)", lambda: exterior("xyz"),
          expected=dict(dims={1: 3, 2: 3, 3: 1}, cup_length=3, trivial_product=False,
                        zero_differential=True, verdict="formal-up-to-cap",
                        pipeline="not-applicable",
                        massey=[(("[x]", "[x]", "[x]"), None)])),
    ]


def recompute(entry: ExampleDescriptor, cap: int = 8) -> dict:
    """Recompute every property listed in ``entry.expected``."""
    from .formality import certify_formality, theorem1_pipeline
    from .massey import massey_vanishes, triple_massey
    from .errors import NotApplicableError

    A = entry.algebra()
    got = {}
    want = entry.expected
    R = reduced_subalgebra(A) if A.unit is not None else A
    HA = induced_cohomology_algebra(R)
    H = HA.H
    got["valid"] = validate(A).ok
    if "dims" in want:
        got["dims"] = {d: H.dim(d) for d in H.support if H.dim(d)}
    if "cup_length" in want:
        got["cup_length"] = cup_length(HA)
    if "trivial_product" in want:
        got["trivial_product"] = offending_product(HA) is None
    if "zero_differential" in want:
        got["zero_differential"] = A.d.is_zero()
    if "verdict" in want or "absolute" in want:
        cert = certify_formality(A, cap)
        got["verdict"] = cert.verdict
        if "absolute" in want:
            got["absolute"] = cert.bound_is_absolute
    if "pipeline" in want:
        try:
            got["pipeline"] = theorem1_pipeline(A, cap).verdict.replace("-up-to-cap", "")
        except NotApplicableError:
            got["pipeline"] = "not-applicable"
    if "massey" in want:
        vals = []
        for names, _ in want["massey"]:
            xs = [{H.index(nm): ONE} for nm in names]
            out = triple_massey(R, *xs, contraction=HA.contraction)
            if out.kind == "obstructed":
                vals.append((names, "obstructed"))
            elif massey_vanishes(out):
                vals.append((names, None))
            else:
                vals.append((names, H.format(out.value)))
        got["massey"] = vals
    if entry.complex is not None and is_connected(A):
        got["ls_cat_lower_bound"] = ls_cat_lower_bound(entry.complex())
    return got


def run_corpus(entries=None, cap: int = 8):
    """[(name, mismatches)] where mismatches maps key -> (expected, got)."""
    out = []
    for e in entries if entries is not None else example_corpus():
        got = recompute(e, cap)
        bad = {k: (v, got.get(k)) for k, v in e.expected.items()
               if _normalize(got.get(k)) != _normalize(v)}
        if not got["valid"]:
            bad["valid"] = (True, False)
        out.append((e.name, bad))
    return out


def _normalize(v):
    if isinstance(v, list):
        return [(tuple(a), b) if isinstance(a, (list, tuple)) else a for a, b in v]
    return v
