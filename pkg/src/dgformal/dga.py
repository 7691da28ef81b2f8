"""Finite-dimensional dg-algebras and their cohomology algebras."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import DisconnectedError, InvalidAlgebraError, MalformedInputError
from .linalg import (ONE, ZERO, ChainComplex, ContractionData, EchelonBasis, GradedMap,
                     GradedVectorSpace, MultilinearMap, cohomology, kernel_basis, vaxpy,
                     vscale, vsub)


class DgAlgebra:
    """Graded space with degree +1 differential and a bilinear product.

    ``unit`` is an optional degree-0 vector; ``augmentation`` an optional
    functional on degree 0 (sparse dict), e.g. evaluation at a basepoint.
    """

    def __init__(self, space: GradedVectorSpace, d: GradedMap, product: MultilinearMap,
                 unit: Mapping | None = None, augmentation: Mapping | None = None,
                 name: str = "", reduced: bool = False):
        if d.source != space or d.target != space or d.shift != 1:
            raise MalformedInputError("differential must be a degree +1 endomorphism of the space")
        if product.arity != 2 or product.shift != 0 or product.source != space or product.target != space:
            raise MalformedInputError("product must be a degree-0 bilinear map on the space")
        if unit is not None:
            unit = dict(unit)
            if any(space.degrees[k] != 0 for k in unit):
                raise MalformedInputError("unit must lie in degree 0")
        self.space = space
        self.d = d
        self.product = product
        self.unit = unit
        self.augmentation = dict(augmentation) if augmentation else None
        self.name = name
        self.reduced = reduced
        self._left = {}
        self._right = {}
        for a, b in product.entries:
            self._left.setdefault(a, set()).add(b)
            self._right.setdefault(b, set()).add(a)

    @property
    def unital(self) -> bool:
        return self.unit is not None

    @property
    def complex(self) -> ChainComplex:
        return ChainComplex(self.space, self.d)

    def mul(self, u: Mapping, v: Mapping) -> dict:
        out = {}
        entries = self.product.entries
        for a, x in u.items():
            partners = self._left.get(a)
            if not partners:
                continue
            for b, y in v.items():
                if b in partners:
                    vaxpy(out, entries[(a, b)], x * y)
        return out

    def bar(self, v: Mapping) -> dict:
        """(-1)^{|v|} v for homogeneous v."""
        deg = self.space.degree_of(v)
        return dict(v) if deg is None or deg % 2 == 0 else vscale(v, -1)

    def default_augmentation(self):
        if self.augmentation:
            return self.augmentation
        if self.unit is not None and self.space.dim(0) == 1:
            (k, c), = self.unit.items()
            return {k: 1 / c}
        return None

    def __repr__(self):
        return f"DgAlgebra({self.name or '?'}, {self.space!r})"


# --------------------------------------------------------------------------
# validation

@dataclass
class ValidationReport:
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def add(self, identity, witness, detail=""):
        self.failures.append((identity, tuple(witness), detail))

    def __str__(self):
        if self.ok:
            return "all identities hold"
        return "; ".join(f"{ident} fails at {', '.join(w)}" + (f" ({det})" if det else "")
                         for ident, w, det in self.failures)


def validate(A: DgAlgebra, limit: int = 20) -> ValidationReport:
    """Check d²=0, Leibniz, associativity and unit laws on basis elements.

    Only basis tuples on which some term can be nonzero are visited.
    """
    S, d = A.space, A.d
    names = S.names
    rep = ValidationReport()

    dd = d @ d
    for k in sorted(dd.columns):
        rep.add("d∘d = 0", [names[k]], f"d(d({names[k]})) = {S.format(dd.columns[k])}")
        if len(rep.failures) >= limit:
            return rep

    # Leibniz: d(ab) = d(a) b + (-1)^{|a|} a d(b)
    cand = set(A.product.entries)
    for a in range(S.dim()):
        for u in d.columns.get(a, {}):
            for b in A._left.get(u, ()):
                cand.add((a, b))
    for b in range(S.dim()):
        for u in d.columns.get(b, {}):
            for a in A._right.get(u, ()):
                cand.add((a, b))
    for a, b in sorted(cand):
        ea, eb = {a: ONE}, {b: ONE}
        lhs = d(A.product.on_basis((a, b)))
        rhs = A.mul(d.columns.get(a, {}), eb)
        vaxpy(rhs, A.mul(ea, d.columns.get(b, {})), -ONE if S.degrees[a] % 2 else ONE)
        if lhs != rhs:
            rep.add("Leibniz", [names[a], names[b]], f"defect {S.format(vsub(lhs, rhs))}")
            if len(rep.failures) >= limit:
                return rep

    # associativity on triples where some product is nonzero
    triples = set()
    for (a, b), v in A.product.entries.items():
        for u in v:
            for c in A._left.get(u, ()):
                triples.add((a, b, c))
    for (b, c), v in A.product.entries.items():
        for u in v:
            for a in A._right.get(u, ()):
                triples.add((a, b, c))
    for a, b, c in sorted(triples):
        left = A.mul(A.product.on_basis((a, b)), {c: ONE})
        right = A.mul({a: ONE}, A.product.on_basis((b, c)))
        if left != right:
            rep.add("associativity", [names[a], names[b], names[c]],
                    f"defect {S.format(vsub(left, right))}")
            if len(rep.failures) >= limit:
                return rep

    if A.unit is not None:
        for k in range(S.dim()):
            e = {k: ONE}
            if A.mul(A.unit, e) != e or A.mul(e, A.unit) != e:
                rep.add("unit", [names[k]])
                if len(rep.failures) >= limit:
                    return rep
        if d(A.unit):
            rep.add("unit", ["d(1)"], "unit is not closed")
    return rep


def ensure_valid(A: DgAlgebra):
    rep = validate(A)
    if not rep.ok:
        raise InvalidAlgebraError(rep)


# --------------------------------------------------------------------------
# cohomology algebra

@dataclass(eq=False)
class CohomologyAlgebra:
    algebra: DgAlgebra
    contraction: ContractionData
    product: MultilinearMap

    @property
    def H(self) -> GradedVectorSpace:
        return self.contraction.H

    def mul(self, x: Mapping, y: Mapping) -> dict:
        return self.product(x, y)

    def positive_indices(self) -> list[int]:
        return [k for k in range(self.H.dim()) if self.H.degrees[k] > 0]

    def class_of(self, cocycle: Mapping) -> dict:
        if self.algebra.d(cocycle):
            raise MalformedInputError("not a cocycle")
        return self.contraction.p(cocycle)

    def dims(self) -> dict[int, int]:
        return {d: self.H.dim(d) for d in self.H.support}


def induced_cohomology_algebra(A: DgAlgebra, contraction: ContractionData | None = None
                               ) -> CohomologyAlgebra:
    ensure_valid(A)
    c = contraction or cohomology(A.complex)
    H = c.H
    entries = {}
    for a in range(H.dim()):
        ia = c.i.columns.get(a, {})
        for b in range(H.dim()):
            if H.degrees[a] + H.degrees[b] not in H.basis:
                continue
            v = c.p(A.mul(ia, c.i.columns.get(b, {})))
            if v:
                entries[(a, b)] = v
    return CohomologyAlgebra(A, c, MultilinearMap(H, H, 2, 0, entries))


def offending_product(HA: CohomologyAlgebra):
    """First pair of positive-degree basis classes with nonzero product, or None."""
    pos = set(HA.positive_indices())
    for (a, b), v in sorted(HA.product.entries.items()):
        if a in pos and b in pos and v:
            return (a, b), v
    return None


def is_reduced_product_trivial(HA: CohomologyAlgebra) -> bool:
    return offending_product(HA) is None


def cup_length(HA: CohomologyAlgebra) -> int:
    """Largest n with a nonzero n-fold product of positive-degree classes."""
    pos = HA.positive_indices()
    if not pos:
        return 0
    current = [{k: ONE} for k in pos]
    n = 1
    while True:
        E = EchelonBasis()
        for u in current:
            for k in pos:
                E.add(HA.mul(u, {k: ONE}))
        if not len(E):
            return n
        current = list(E.rows)
        n += 1


# --------------------------------------------------------------------------
# reduction and augmentation

def is_connected(A: DgAlgebra, contraction: ContractionData | None = None) -> bool:
    c = contraction or cohomology(A.complex)
    return c.H.dim(0) == 1


def reduced_subalgebra(A: DgAlgebra, functional: Mapping | None = None) -> DgAlgebra:
    """Replace degree 0 by the kernel of an augmentation functional.

    For the cochain algebra of a connected complex with evaluation at a vertex
    this is a non-unital dg-algebra computing reduced cohomology.
    """
    functional = functional or A.default_augmentation()
    if not functional:
        raise MalformedInputError("no augmentation functional available")
    S = A.space
    if any(S.degrees[k] != 0 for k in functional):
        raise MalformedInputError("augmentation must be a functional on degree 0")
    if not is_connected(A):
        raise DisconnectedError("input is not connected; reduce each component separately")

    n0 = S.dim(0)
    off0 = S.offset(0) if n0 else 0
    row = {k: Fraction(c) for k, c in functional.items()}
    phi = GradedMap(S, GradedVectorSpace({0: ["*"]}), 0,
                    {k: {0: c} for k, c in row.items()})
    kernel = kernel_basis(phi, 0) if n0 else []
    pivots = [min(v) for v in kernel]
    knames = []
    for j, v in enumerate(kernel):
        if len(v) == 1 and next(iter(v.values())) == 1:
            knames.append(S.names[next(iter(v))])
        else:
            knames.append(f"r0.{j}")
    basis = dict(S.basis)
    if kernel:
        basis[0] = knames
    else:
        basis.pop(0, None)
    R = GradedVectorSpace(basis)

    def include(k):
        if R.degrees[k] == 0:
            return kernel[k - R.offset(0)]
        return {S.offset(R.degrees[k]) + k - R.offset(R.degrees[k]): ONE}

    def restrict(v):
        out = {}
        for k, c in v.items():
            deg = S.degrees[k]
            if deg == 0:
                continue
            out[R.offset(deg) + k - S.offset(deg)] = c
        zero_part = {k: c for k, c in v.items() if S.degrees[k] == 0}
        if zero_part:
            coords = {}
            for j, p in enumerate(pivots):
                if p in zero_part:
                    coords[R.offset(0) + j] = zero_part[p]
            back = {}
            for j, c in coords.items():
                vaxpy(back, kernel[j - R.offset(0)], c)
            if back != zero_part:
                raise MalformedInputError("functional is not multiplicative: product leaves its kernel")
            out.update(coords)
        return out

    incl = {k: include(k) for k in range(R.dim())}
    d_cols = {k: restrict(A.d(v)) for k, v in incl.items()}
    prod = {}
    for a in range(R.dim()):
        for b in range(R.dim()):
            if R.degrees[a] + R.degrees[b] not in R.basis:
                continue
            v = restrict(A.mul(incl[a], incl[b]))
            if v:
                prod[(a, b)] = v
    return DgAlgebra(R, GradedMap(R, R, 1, d_cols), MultilinearMap(R, R, 2, 0, prod),
                     name=(A.name + " reduced").strip(), reduced=True)


def reduce_if_unital(A: DgAlgebra) -> DgAlgebra:
    """The augmentation-ideal model used by the Massey/formality machinery."""
    if A.unit is None or A.default_augmentation() is None:
        return A
    return reduced_subalgebra(A)


def augmented_complex(A: DgAlgebra) -> ChainComplex:
    """K in degree -1 mapped by ε onto the unit, followed by A (as a complex)."""
    if A.unit is None:
        raise MalformedInputError("augmented complex needs a unital algebra")
    S = A.space
    if S.support and min(S.support) < 0:
        raise MalformedInputError("augmented complex needs an algebra in degrees >= 0")
    if not is_connected(A):
        raise DisconnectedError("input is not connected; treat components separately")
    name = "K"
    while name in S.names:
        name += "'"
    basis = {-1: [name], **S.basis}
    T = GradedVectorSpace(basis)
    shift = lambda k: k + 1  # noqa: E731  degree -1 occupies index 0
    cols = {0: {shift(k): c for k, c in A.unit.items()}}
    for k, col in A.d.columns.items():
        cols[shift(k)] = {shift(j): c for j, c in col.items()}
    return ChainComplex(T, GradedMap(T, T, 1, cols))


def algebra_from_tables(basis, differential=None, product=None, unit=None, augmentation=None,
                        name="", reduced=False) -> DgAlgebra:
    """Build a DgAlgebra from name-keyed tables.

    ``differential``: {x: {y: coeff}}; ``product``: {(x, y): {z: coeff}};
    ``unit``: a basis name or {name: coeff}.  Basis names must be unique
    across degrees.
    """
    S = GradedVectorSpace(basis)
    idx = S.index

    def v(d):
        return {idx(k): Fraction(c) for k, c in d.items() if Fraction(c)}

    d = GradedMap(S, S, 1, {idx(x): v(col) for x, col in (differential or {}).items()})
    prod = MultilinearMap(S, S, 2, 0, {(idx(a), idx(b)): v(val)
                                       for (a, b), val in (product or {}).items()})
    if isinstance(unit, str):
        unit = {unit: 1}
    return DgAlgebra(S, d, prod, unit=v(unit) if unit else None,
                     augmentation=v(augmentation) if augmentation else None,
                     name=name, reduced=reduced)


def exterior_product_table(generators, relations_degree_cap=None):
    """Product table of a truncated exterior algebra on degree-1 generators.

    Returns (basis, product) with basis elements named by concatenated
    generator names; monomials above ``relations_degree_cap`` are dropped.
    """
    import itertools as it
    n = len(generators)
    top = n if relations_degree_cap is None else min(n, relations_degree_cap)
    monos = {0: [()]}
    for k in range(1, top + 1):
        monos[k] = list(it.combinations(range(n), k))
    name = lambda m: "".join(generators[j] for j in m) if m else "1"  # noqa: E731
    basis = {k: [name(m) for m in ms] for k, ms in monos.items()}
    product = {}
    for ka, ma in ((k, m) for k, ms in monos.items() for m in ms):
        for kb, mb in ((k, m) for k, ms in monos.items() for m in ms):
            if ka + kb > top or set(ma) & set(mb):
                continue
            seq = list(ma + mb)
            inv = sum(1 for x in range(len(seq)) for y in range(x + 1, len(seq)) if seq[x] > seq[y])
            product[(name(ma), name(mb))] = {name(tuple(sorted(seq))): -1 if inv % 2 else 1}
    return basis, product
