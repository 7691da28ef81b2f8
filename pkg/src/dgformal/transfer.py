"""Homotopy transfer of a dg-algebra structure onto its cohomology.

Merkulov-style recursion over planar binary trees: with f_1 = i,

    λ_2 = m_2,   λ_n = Σ_{k=1}^{n-1} σ(n, k) m_2(f_k ⊗ f_{n-k}),
    m_n = p λ_n,   f_n = -h λ_n,

where the sign σ also absorbs the Koszul sign of f_{n-k} passing the first k
inputs.  The result is only returned after the Stasheff and morphism
identities have been verified up to the arity cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .ainfinity import (AInfinityMorphism, AInfinityStructure, morphism_defect,
                        stasheff_defect)
from .errors import MalformedInputError, TransferFault
from .linalg import ContractionData, MultilinearMap, cohomology, tuples_landing_in, vaxpy

DEFAULT_CAP = 8


@dataclass(eq=False)
class TransferResult:
    structure: AInfinityStructure
    morphism: AInfinityMorphism
    arity_cap: int
    contraction: ContractionData
    verified: bool

    def m(self, n) -> MultilinearMap:
        return self.structure.op(n)

    def f(self, n) -> MultilinearMap:
        return self.morphism.component(n)


@lru_cache(maxsize=None)
def tree_summands(n: int) -> tuple:
    """Planar binary rooted trees with n leaves as nested pairs; a leaf is ``0``.

    Ordered by the size of the left subtree, then recursively.
    """
    if n < 1:
        raise MalformedInputError("trees need at least one leaf")
    if n == 1:
        return (0,)
    out = []
    for k in range(1, n):
        for left in tree_summands(k):
            for right in tree_summands(n - k):
                out.append((left, right))
    return tuple(out)


def leaves(tree) -> int:
    return 1 if tree == 0 else leaves(tree[0]) + leaves(tree[1])


def split_sign(n: int, k: int, left_degree: int) -> int:
    """σ(n, k): sign of the m_2(f_k ⊗ f_{n-k}) summand of λ_n.

    (-1)^{k-1} from the A∞-morphism identity for the composition (k, n-k),
    times the Koszul sign of f_{n-k} (degree 1-(n-k)) passing the first k inputs.
    """
    e = (1 - (n - k)) * left_degree + (k - 1)
    return -1 if e % 2 else 1


def transfer(A, contraction: ContractionData | None = None, arity_cap: int | None = None,
             verify: bool = True) -> TransferResult:
    """Transferred A∞-structure on H(A) and the A∞-quasi-isomorphism H(A) → A.

    The default cap is min(8, arity_bound(H)) when the degree bound is finite.
    """
    c = contraction or cohomology(A.complex)
    if arity_cap is None:
        from .formality import arity_bound
        bound = arity_bound(c.H)
        arity_cap = DEFAULT_CAP if bound is None else min(DEFAULT_CAP, bound)
    if arity_cap < 2:
        raise MalformedInputError("arity cap must be at least 2")
    H, S = c.H, A.space
    i, p, h = c.i, c.p, c.h
    degs = H.degrees

    f_vals = {1: {(k,): i.columns[k] for k in i.columns}}
    m_ops = {1: MultilinearMap(H, H, 1, 1), }
    for n in range(2, arity_cap + 1):
        m_entries, f_entries = {}, {}
        for key in tuples_landing_in(H, n, 2 - n, S):
            lam = {}
            for k in range(1, n):
                left = f_vals[k].get(key[:k])
                if not left:
                    continue
                right = f_vals[n - k].get(key[k:])
                if not right:
                    continue
                vaxpy(lam, A.mul(left, right), split_sign(n, k, sum(degs[j] for j in key[:k])))
            if not lam:
                continue
            mv = p(lam)
            if mv:
                m_entries[key] = mv
            fv = h(lam)
            if fv:
                f_entries[key] = {j: -x for j, x in fv.items()}
        m_ops[n] = MultilinearMap(H, H, n, 2 - n, m_entries, check=False)
        f_vals[n] = f_entries

    structure = AInfinityStructure(H, m_ops, arity_cap)
    target = AInfinityStructure.from_dg_algebra(A)
    comps = {n: MultilinearMap(H, S, n, 1 - n, f_vals[n], check=False)
             for n in range(1, arity_cap + 1)}
    morphism = AInfinityMorphism(structure, target, comps, arity_cap)
    result = TransferResult(structure, morphism, arity_cap, c, verified=False)
    if verify:
        verify_transfer(result)
    return result


def verify_transfer(result: TransferResult):
    for n in range(1, result.arity_cap + 1):
        sd = stasheff_defect(result.structure, n)
        if not sd.is_zero():
            key = sd.nonzero_keys()[0]
            raise TransferFault(f"Stasheff identity fails at arity {n} on "
                                f"{tuple(sd.source.names[k] for k in key)}")
        md = morphism_defect(result.morphism, n)
        if not md.is_zero():
            key = md.nonzero_keys()[0]
            raise TransferFault(f"morphism identity fails at arity {n} on "
                                f"{tuple(md.source.names[k] for k in key)}")
    result.verified = True
    return result


def evaluate_tree(A, contraction: ContractionData, tree, key) -> dict:
    """λ-value of a single tree on a basis tuple of H, i.e. the tree's summand
    of the recursion before applying p or -h.  Leaves evaluate to i."""
    H = contraction.H

    def f_of(sub, sub_key):
        if sub == 0:
            return contraction.i.columns.get(sub_key[0], {})
        return {j: -x for j, x in contraction.h(lam_of(sub, sub_key)).items()}

    def lam_of(t, sub_key):
        left, right = t
        k = leaves(left)
        n = len(sub_key)
        sign = split_sign(n, k, sum(H.degrees[j] for j in sub_key[:k]))
        prod = A.mul(f_of(left, sub_key[:k]), f_of(right, sub_key[k:]))
        return {j: sign * x for j, x in prod.items()}

    if tree == 0:
        raise MalformedInputError("a single leaf has no λ-value")
    return lam_of(tree, tuple(key))
