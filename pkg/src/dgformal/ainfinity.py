"""A∞-structures, A∞-morphisms and exact verifiers for their identities.

Identities are checked element-wise on basis tuples, with the Koszul rule
``(g ⊗ g')(x ⊗ y) = (-1)^{|g'||x|} g(x) ⊗ g'(y)`` supplying the signs.
"""

from __future__ import annotations

import itertools
from typing import Mapping, Sequence

from .errors import IncompleteStructureError, MalformedInputError, NotAMorphismError
from .linalg import (ONE, ChainComplex, GradedMap, GradedVectorSpace, MultilinearMap,
                     is_quasi_isomorphic_map, tuples_landing_in, vaxpy)

ID = None  # identity slot in a tensor of maps


def koszul_apply(maps: Sequence, tensor, space: GradedVectorSpace) -> dict:
    """Apply g_1 ⊗ ... ⊗ g_k to a sparse tensor of basis elements of ``space``.

    Each g_j is a MultilinearMap or ``ID``.  A basis tuple may be passed
    directly instead of a tensor.  Degrees of maps are their ``shift``.
    """
    if isinstance(tensor, tuple):
        tensor = {tensor: ONE}
    arities = [1 if g is ID else g.arity for g in maps]
    width = sum(arities)
    out = {}
    degs = space.degrees
    for key, coeff in tensor.items():
        if len(key) != width:
            raise MalformedInputError("tensor length does not match the maps' arities")
        parts = [{(): coeff}]
        pos = 0
        passed = 0  # total degree of inputs to the left of the current map
        sign = 0
        for g, a in zip(maps, arities):
            chunk = key[pos:pos + a]
            if g is ID:
                val = {chunk[0]: ONE}
            else:
                if g.shift % 2:
                    sign += passed
                val = g.on_basis(chunk)
                if not val:
                    parts = None
                    break
            passed += sum(degs[k] for k in chunk)
            pos += a
            parts.append(val)
        if parts is None:
            continue
        acc = {(): -coeff if sign % 2 else coeff}
        for val in parts[1:]:
            nxt = {}
            for t, c in acc.items():
                for k, x in val.items():
                    nxt[t + (k,)] = c * x
            acc = nxt
        for t, c in acc.items():
            y = out.get(t, 0) + c
            if y:
                out[t] = y
            else:
                out.pop(t, None)
    return out


def homogeneous_sign(maps_degrees, input_degree_groups) -> int:
    """(-1)^{Σ_j |g_j| (|x_1| + ... before g_j)} for grouped input degrees."""
    passed, e = 0, 0
    for g, group in zip(maps_degrees, input_degree_groups):
        e += g * passed
        passed += sum(group)
    return -1 if e % 2 else 1


class AInfinityStructure:
    """Operations m_n of degree 2-n on ``space``.

    ``arity_cap`` bounds the arities for which ops are known; ``None`` means
    every op absent from ``ops`` is genuinely zero (as for a dg-algebra).
    """

    def __init__(self, space: GradedVectorSpace, ops: Mapping[int, MultilinearMap],
                 arity_cap: int | None):
        self.space = space
        self.ops = dict(ops)
        self.arity_cap = arity_cap
        for n, m in self.ops.items():
            if m.arity != n or m.shift != 2 - n:
                raise MalformedInputError(f"m_{n} must have arity {n} and degree {2 - n}")

    @classmethod
    def from_dg_algebra(cls, A):
        return cls(A.space, {1: MultilinearMap.from_graded_map(A.d), 2: A.product}, None)

    def op(self, n: int) -> MultilinearMap:
        if n in self.ops:
            return self.ops[n]
        if self.arity_cap is None or n <= self.arity_cap:
            if self.arity_cap is None or n > 2:
                return MultilinearMap(self.space, self.space, n, 2 - n)
        raise IncompleteStructureError(f"m_{n} is not available (arity cap {self.arity_cap})")

    @property
    def complex(self) -> ChainComplex:
        return ChainComplex(self.space, self.op(1).to_graded_map())

    def __repr__(self):
        return f"AInfinityStructure(cap={self.arity_cap}, ops={sorted(self.ops)})"


class AInfinityMorphism:
    def __init__(self, source: AInfinityStructure, target: AInfinityStructure,
                 components: Mapping[int, MultilinearMap], arity_cap: int | None):
        self.source = source
        self.target = target
        self.components = dict(components)
        self.arity_cap = arity_cap
        for n, f in self.components.items():
            if f.arity != n or f.shift != 1 - n:
                raise MalformedInputError(f"f_{n} must have arity {n} and degree {1 - n}")

    @classmethod
    def strict(cls, f1: GradedMap, source, target):
        return cls(source, target, {1: MultilinearMap.from_graded_map(f1)}, None)

    def component(self, n: int) -> MultilinearMap:
        if n in self.components:
            return self.components[n]
        if self.arity_cap is None or n <= self.arity_cap:
            return MultilinearMap(self.source.space, self.target.space, n, 1 - n)
        raise IncompleteStructureError(f"f_{n} is not available (arity cap {self.arity_cap})")


def stasheff_defect(m: AInfinityStructure, n: int) -> MultilinearMap:
    """Σ_{r+s+t=n} (-1)^{r+st} m_{r+1+t}(Id^r ⊗ m_s ⊗ Id^t) as an n-linear map."""
    S = m.space
    terms = []
    for s in range(1, n + 1):
        for r in range(0, n - s + 1):
            t = n - r - s
            inner, outer = m.op(s), m.op(r + 1 + t)
            if inner.is_zero() or outer.is_zero():
                continue
            terms.append((-1 if (r + s * t) % 2 else 1,
                          [ID] * r + [inner] + [ID] * t, outer))
    entries = {}
    for key in tuples_landing_in(S, n, 3 - n, S):
        acc = {}
        for sign, maps, outer in terms:
            vaxpy(acc, outer.on_tensor(koszul_apply(maps, key, S)), sign)
        if acc:
            entries[key] = acc
    return MultilinearMap(S, S, n, 3 - n, entries, check=False)


def compositions(n: int, k: int):
    """Ordered k-tuples of positive integers summing to n."""
    for cuts in itertools.combinations(range(1, n), k - 1):
        bounds = (0,) + cuts + (n,)
        yield tuple(bounds[j + 1] - bounds[j] for j in range(k))


def morphism_sign_exponent(parts) -> int:
    """u_k = Σ_{t=1}^{k-1} t (i_{k-t} - 1) for parts (i_1, ..., i_k)."""
    k = len(parts)
    return sum(t * (parts[k - t - 1] - 1) for t in range(1, k))


def morphism_defect(f: AInfinityMorphism, n: int) -> MultilinearMap:
    """Left side minus right side of the A∞-morphism identity at arity n."""
    S, T = f.source.space, f.target.space
    lhs_terms = []
    for s in range(1, n + 1):
        for r in range(0, n - s + 1):
            t = n - r - s
            inner, outer = f.source.op(s), f.component(r + 1 + t)
            if inner.is_zero() or outer.is_zero():
                continue
            lhs_terms.append((-1 if (r + s * t) % 2 else 1, [ID] * r + [inner] + [ID] * t, outer))
    rhs_terms = []
    for k in range(1, n + 1):
        mk = f.target.op(k)
        if mk.is_zero():
            continue
        for parts in compositions(n, k):
            comps = [f.component(i) for i in parts]
            if any(c.is_zero() for c in comps):
                continue
            rhs_terms.append((-1 if morphism_sign_exponent(parts) % 2 else 1, comps, mk))
    entries = {}
    for key in tuples_landing_in(S, n, 2 - n, T):
        acc = {}
        for sign, maps, outer in lhs_terms:
            vaxpy(acc, outer.on_tensor(koszul_apply(maps, key, S)), sign)
        for sign, maps, outer in rhs_terms:
            vaxpy(acc, outer.on_tensor(koszul_apply(maps, key, S)), -sign)
        if acc:
            entries[key] = acc
    return MultilinearMap(S, T, n, 2 - n, entries, check=False)


def is_quasi_isomorphism(f: AInfinityMorphism) -> bool:
    if not morphism_defect(f, 1).is_zero():
        raise NotAMorphismError("f_1 is not a chain map")
    return is_quasi_isomorphic_map(f.component(1).to_graded_map(),
                                   f.source.complex, f.target.complex)
