"""Formality certificates and the reduced-to-unreduced span splice."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .dga import (DgAlgebra, augmented_complex, induced_cohomology_algebra, offending_product,
                  reduce_if_unital)
from .errors import InternalConsistencyError, InvalidSpanError, NotApplicableError
from .linalg import (ONE, ChainComplex, GradedMap, GradedVectorSpace, Preimage, cohomology,
                     is_chain_map, is_quasi_isomorphic_map, rref, tuples_landing_in)
from .massey import detection_sign, higher_massey_unique, massey_vanishes, triple_massey
from .transfer import transfer

DEFAULT_CAP = 8


def arity_bound(H: GradedVectorSpace):
    """Largest arity at which m_n can be nonzero on positive-degree classes.

    None means unbounded (classes in degree 1).  Always at least 2.
    """
    pos = [d for d in H.support if d > 0]
    if not pos:
        return 2
    dmin, dmax = min(pos), max(pos)
    if dmin == 1:
        return None
    n = 2
    while (n + 1) * dmin + 2 - (n + 1) <= dmax:
        n += 1
    return n


@dataclass
class FormalityCertificate:
    """``verdict`` is 'formal-up-to-cap', 'non-formal' or 'inconclusive'."""

    verdict: str
    cap: int
    bound_is_absolute: bool
    witness: dict | None = None
    trace: list = field(default_factory=list)

    @property
    def is_formal(self) -> bool:
        return self.verdict == "formal-up-to-cap"


def _effective_cap(H, cap):
    bound = arity_bound(H)
    if bound is None:
        return cap, False
    return min(cap, bound), True


def certify_formality(A: DgAlgebra, cap: int = DEFAULT_CAP) -> FormalityCertificate:
    """Transfer to the cohomology and look for a nonzero higher product.

    Unital algebras with an augmentation are replaced by their augmentation
    ideal first.  A nonzero m_n counts as a non-formality witness only when
    it is a Massey product in disguise (m_2, ..., m_{n-1} vanish on positive
    classes) or when some triple Massey product on basis classes is
    nonvanishing; otherwise the verdict is inconclusive.
    """
    R = reduce_if_unital(A)
    HA = induced_cohomology_algebra(R)
    H = HA.H
    top, absolute = _effective_cap(H, cap)
    tr = transfer(R, HA.contraction, max(top, 2))
    first = None
    for n in range(3, top + 1):
        m = tr.m(n)
        keys = [k for k in m.nonzero_keys() if all(H.degrees[j] > 0 for j in k)]
        if keys:
            first = (n, keys[0], m.entries[keys[0]])
            break
    if first is None:
        return FormalityCertificate("formal-up-to-cap", top, absolute)
    n, key, value = first
    witness = {"n": n, "tuple": [H.names[k] for k in key], "value": H.format(value),
               "key": key}
    if offending_product(HA) is None:
        witness["reason"] = "unique Massey product (lower products vanish)"
        return FormalityCertificate("non-formal", top, absolute, witness)
    mw = nonvanishing_triple_massey(R, HA)
    if mw is not None:
        witness["reason"] = "nonvanishing triple Massey product"
        witness["massey"] = mw
        return FormalityCertificate("non-formal", top, absolute, witness)
    witness["reason"] = "nonzero higher product alongside a nontrivial cup product"
    return FormalityCertificate("inconclusive", top, absolute, witness)


def nonvanishing_triple_massey(A, HA):
    """Search basis triples of positive classes for a defined, nonvanishing <x, y, z>."""
    H = HA.H
    pos = HA.positive_indices()
    for a in pos:
        for b in pos:
            if HA.product.on_basis((a, b)):
                continue
            for c in pos:
                if HA.product.on_basis((b, c)):
                    continue
                if H.degrees[a] + H.degrees[b] + H.degrees[c] - 1 not in H.basis:
                    continue
                out = triple_massey(A, {a: ONE}, {b: ONE}, {c: ONE}, HA.contraction)
                if out.kind != "obstructed" and not massey_vanishes(out):
                    return {"classes": [H.names[a], H.names[b], H.names[c]],
                            "value": H.format(out.value),
                            "indeterminacy": [H.format(v) for v in out.indeterminacy]}
    return None


def theorem1_pipeline(A: DgAlgebra, cap: int = DEFAULT_CAP) -> FormalityCertificate:
    """Trivial product + vanishing Massey products ⇒ formal, run step by step.

    For each n = 3..cap the unique Massey n-products on all basis tuples of
    positive classes are computed from explicit defining systems and checked
    against the transferred m_n; a nonvanishing one stops the induction.
    """
    R = reduce_if_unital(A)
    HA = induced_cohomology_algebra(R)
    bad = offending_product(HA)
    H = HA.H
    if bad is not None:
        (a, b), v = bad
        raise NotApplicableError(
            f"induced product is not trivial: {H.names[a]}·{H.names[b]} = {H.format(v)}")
    bound = arity_bound(H)
    tr = transfer(R, HA.contraction, max(cap, 2))
    pos = set(HA.positive_indices())
    trace = []
    for n in range(3, cap + 1):
        step = {"n": n, "tuples": 0, "vanishing": True}
        if bound is not None and n > bound:
            step["note"] = "vanishes for degree reasons"
        for key in tuples_landing_in(H, n, 2 - n, H):
            if not all(k in pos for k in key):
                continue
            step["tuples"] += 1
            classes = [{k: ONE} for k in key]
            out = higher_massey_unique(R, tr, classes)
            if not massey_vanishes(out):
                step["vanishing"] = False
                step["witness"] = [H.names[k] for k in key]
                trace.append(step)
                witness = {"n": n, "tuple": step["witness"], "value": H.format(out.value),
                           "key": key, "reason": "nonvanishing unique Massey product",
                           "m_n": H.format(tr.m(n).on_basis(key)),
                           "sign": detection_sign(out.degrees)}
                return FormalityCertificate("non-formal", cap, bound is not None and cap >= bound,
                                            witness, trace)
        if any(all(k in pos for k in key) for key in tr.m(n).nonzero_keys()):
            raise InternalConsistencyError(
                f"all Massey {n}-products vanish but the transferred m_{n} does not")
        step["m_n_zero"] = True
        trace.append(step)
    absolute = bound is not None and cap >= bound
    return FormalityCertificate("formal-up-to-cap", cap, absolute, trace=trace)


# --------------------------------------------------------------------------
# spans and the splice

@dataclass(eq=False)
class DgSpan:
    """H <-left- B -right-> C, both legs chain maps (checked by ``check``)."""

    B: ChainComplex
    H: ChainComplex
    C: ChainComplex
    left: GradedMap
    right: GradedMap

    def commuting_squares(self) -> dict[str, bool]:
        return {"left": is_chain_map(self.left, self.B, self.H),
                "right": is_chain_map(self.right, self.B, self.C)}

    def quasi_isomorphisms(self) -> dict[str, bool]:
        cb = cohomology(self.B)
        return {"left": is_quasi_isomorphic_map(self.left, self.B, self.H, cb),
                "right": is_quasi_isomorphic_map(self.right, self.B, self.C, cb)}

    def is_valid(self) -> bool:
        sq = self.commuting_squares()
        return all(sq.values()) and all(self.quasi_isomorphisms().values())


def trivial_reduced_span(A: DgAlgebra) -> DgSpan:
    """B = augmented complex, right leg the identity, left leg its projection p."""
    aug = augmented_complex(A)
    c = cohomology(aug)
    Hc = ChainComplex.zero(c.H)
    return DgSpan(aug, Hc, aug, c.p, GradedMap.identity(aug.space))


def splice_span(span: DgSpan, A: DgAlgebra) -> DgSpan:
    """Turn a span onto the augmented complex of A into a span onto A itself.

    The degree -1 copy of K is removed from the target and re-inserted as
    H^0.  The new middle term has B'^{-1} = B^{-1}, B'^0 = B^0 ⊕ K and
    B'^n = B^n for n > 0, with d'(c) = (d c, -q^{-1}(c)) on B^{-1}; the legs
    are (b, λ) ↦ q^0(b) + λ·1 and (b, λ) ↦ φ(b) + λ, where φ extends
    q^{-1} ∘ (d^{-1})^{-1} from the coboundaries to all of B^0.
    """
    sq = span.commuting_squares()
    if not all(sq.values()):
        raise InvalidSpanError(f"span legs are not chain maps: {sq}")
    qi = span.quasi_isomorphisms()
    if not all(qi.values()):
        raise InvalidSpanError(f"span legs are not quasi-isomorphisms: {qi}")
    aug = augmented_complex(A)
    if span.C.space != aug.space or span.C.d != aug.d:
        raise InvalidSpanError("right leg must land in the augmented complex of A")
    if A.unit is None:
        raise InvalidSpanError("algebra must be unital")

    B, q, pleg = span.B, span.right, span.left
    SB = B.space
    kname = "λ"
    while kname in SB.names:
        kname += "'"
    basis = {d: list(names) for d, names in SB.basis.items()}
    basis[0] = basis.get(0, []) + [kname]
    S2 = GradedVectorSpace(basis)
    lam = S2.index(kname, 0)

    def emb(k):  # B index -> B' index
        d = SB.degrees[k]
        return S2.offset(d) + k - SB.offset(d)

    def emb_vec(v):
        return {emb(k): c for k, c in v.items()}

    # q^{-1}: B^{-1} -> K, read off as the coefficient of the K basis vector
    kidx = aug.space.offset(-1) if aug.space.dim(-1) else None

    def q_minus(k):
        return q.columns.get(k, {}).get(kidx, 0) if kidx is not None else 0

    d_cols = {}
    for k in range(SB.dim()):
        col = emb_vec(B.d.columns.get(k, {}))
        if SB.degrees[k] == -1:
            c = q_minus(k)
            if c:
                col[lam] = col.get(lam, 0) - c
        if col:
            d_cols[emb(k)] = col
    B2 = ChainComplex(S2, GradedMap(S2, S2, 1, d_cols))

    C = A.complex
    shift = {k: k - 1 for k in range(1, aug.space.dim())}  # drop the K basis vector
    right_cols = {}
    for k in range(SB.dim()):
        if SB.degrees[k] < 0:
            continue
        col = {shift[j]: c for j, c in q.columns.get(k, {}).items() if j in shift}
        if col:
            right_cols[emb(k)] = col
    right_cols[lam] = dict(A.unit)
    right = GradedMap(S2, C.space, 0, right_cols)

    Hred = span.H.space
    Hbasis = {d: list(names) for d, names in Hred.basis.items() if d != 0}
    one = "1"
    while one in Hred.names:
        one += "'"
    Hbasis[0] = [one]
    H2 = GradedVectorSpace(Hbasis)
    h_one = H2.index(one, 0)

    def h_emb(v):
        out = {}
        for k, c in v.items():
            d = Hred.degrees[k]
            if d == 0:
                raise InvalidSpanError("reduced cohomology must vanish in degree 0")
            out[H2.offset(d) + k - Hred.offset(d)] = c
        return out

    # φ: B^0 -> K with φ(d b) = q^{-1}(b) for b in B^{-1}
    phi = {}
    if SB.dim(-1) and SB.dim(0):
        # φ as a row vector on B^0: φ(d e_k) = q^{-1}(e_k) for each e_k in B^{-1}
        n0 = SB.dim(0)
        rows = [SB.to_dense(B.d.columns.get(k, {}), 0) + [Fraction(q_minus(k))]
                for k in SB.indices(-1)]
        R, piv = rref(rows, n0 + 1)
        if n0 in piv:
            raise InvalidSpanError("q^{-1} does not factor through d^{-1}")
        sol = [Fraction(0)] * n0
        for row, p in zip(R, piv):
            sol[p] = row[n0]
        phi = {SB.offset(0) + j: c for j, c in enumerate(sol) if c}
    left_cols = {}
    for k in range(SB.dim()):
        d = SB.degrees[k]
        if d < 0:
            continue
        col = h_emb(pleg.columns.get(k, {})) if d > 0 else {}
        if d == 0 and phi.get(k):
            col = {h_one: phi[k]}
        if col:
            left_cols[emb(k)] = col
    left_cols[lam] = {h_one: ONE}
    Hc2 = ChainComplex.zero(H2)
    left = GradedMap(S2, H2, 0, left_cols)
    out = DgSpan(B2, Hc2, C, left, right)
    if not all(out.commuting_squares().values()) or not all(out.quasi_isomorphisms().values()):
        raise InternalConsistencyError("spliced span failed its own checks")
    return out


def literal_splice_rank_defect(span: DgSpan, A: DgAlgebra) -> dict:
    """Cohomology of the middle term B^0 ⊕ B^{-1} with differential [d^0, 0]
    (the splice without the degree -1 correction), for diagnostics."""
    B = span.B
    SB = B.space
    basis = {d: list(n) for d, n in SB.basis.items() if d >= 0}
    basis[0] = basis.get(0, []) + [f"{x}'" for x in SB.basis.get(-1, ())]
    S2 = GradedVectorSpace(basis)
    cols = {}
    for k in range(SB.dim()):
        d = SB.degrees[k]
        if d < 0:
            continue
        col = {}
        for j, c in B.d.columns.get(k, {}).items():
            col[S2.offset(SB.degrees[j]) + j - SB.offset(SB.degrees[j])] = c
        if col:
            cols[S2.offset(d) + k - SB.offset(d)] = col
    c = cohomology(ChainComplex(S2, GradedMap(S2, S2, 1, cols)))
    return c.betti
