import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from dgformal.errors import InvalidComplexError, MalformedInputError
from dgformal.linalg import (ChainComplex, GradedMap, GradedVectorSpace, MultilinearMap,
                             cohomology, image_basis, kernel_basis, rref, solve)
from dgformal.random_algebras import random_complex

complexes = st.integers(0, 10**9).map(lambda s: random_complex(random.Random(s)))


def sympy_rank(block):
    if not block or not block[0]:
        return 0
    return sympy.Matrix(block).rank()


def test_scalars_are_reduced_fractions():
    assert Fraction(6, -4) == Fraction(-3, 2)
    assert Fraction(6, -4).denominator == 2


# solve

def test_solve_identity():
    S = GradedVectorSpace({0: ["a", "b"], 1: ["c"]})
    v = {0: Fraction(3), 1: Fraction(-1, 2)}
    assert solve(GradedMap.identity(S), v) == v


def test_solve_zero_map_zero_vector():
    S = GradedVectorSpace({0: ["a", "b"]})
    assert solve(GradedMap.zero(S, S), {}) == {}


def test_solve_heisenberg_d(theis):
    S = theis.space
    z = solve(theis.d, {S.index("xy"): 1})
    assert z == {S.index("z"): 1}
    assert theis.d(z) == {S.index("xy"): 1}


def test_solve_no_preimage(theis):
    S = theis.space
    assert solve(theis.d, {S.index("xz"): 1}) is None


def test_solve_rejects_foreign_index():
    S = GradedVectorSpace({0: ["a"]})
    with pytest.raises(MalformedInputError):
        solve(GradedMap.identity(S), {5: Fraction(1)})


# kernels and images

def test_kernel_of_identity_empty():
    S = GradedVectorSpace({0: ["a", "b", "c"]})
    assert kernel_basis(GradedMap.identity(S), 0) == []


def test_kernel_of_zero_map():
    S = GradedVectorSpace({0: ["a", "b"]})
    ker = kernel_basis(GradedMap.zero(S, S), 0)
    assert ker == [{0: 1}, {1: 1}]


def test_kernel_heisenberg_degree2(theis):
    S = theis.space
    ker = kernel_basis(theis.d, 2)
    assert sorted(S.names[next(iter(v))] for v in ker) == ["xy", "xz", "yz"]
    assert all(len(v) == 1 for v in ker)


def test_image_heisenberg_degree1(theis):
    S = theis.space
    assert image_basis(theis.d, 1) == [{S.index("xy"): 1}]


# cohomology

def test_cohomology_zero_differential():
    S = GradedVectorSpace({0: ["a"], 1: ["b", "c"], 3: ["e"]})
    c = cohomology(ChainComplex.zero(S))
    assert c.H.dim() == S.dim()
    assert c.i == GradedMap(c.H, S, 0, {k: {k: 1} for k in range(4)})
    assert c.p == GradedMap(S, c.H, 0, {k: {k: 1} for k in range(4)})
    assert c.h.is_zero()


def test_cohomology_heisenberg(theis):
    c = cohomology(theis.complex)
    assert c.betti == {0: 1, 1: 2, 2: 2}
    assert c.H.basis == {0: ("[1]",), 1: ("[x]", "[y]"), 2: ("[xz]", "[yz]")}
    assert all(c.identities().values())


def test_cohomology_acyclic_two_term():
    S = GradedVectorSpace({0: ["u"], 1: ["v"]})
    d = GradedMap(S, S, 1, {0: {1: Fraction(2)}})
    c = cohomology(ChainComplex(S, d))
    assert c.H.dim() == 0
    assert c.h == GradedMap(S, S, -1, {1: {0: Fraction(1, 2)}})


def test_invalid_complex_names_degree_and_element():
    S = GradedVectorSpace({0: ["a"], 1: ["b"], 2: ["c"]})
    d = GradedMap(S, S, 1, {0: {1: 1}, 1: {2: 1}})
    with pytest.raises(InvalidComplexError) as exc:
        cohomology(ChainComplex(S, d))
    assert exc.value.degree == 0 and exc.value.element == "a"


def test_multilinear_degree_check():
    S = GradedVectorSpace({0: ["a"], 1: ["b"]})
    with pytest.raises(MalformedInputError):
        MultilinearMap(S, S, 2, 0, {(1, 1): {0: Fraction(1)}})


def test_rref_matches_sympy():
    M = [[2, 4, 1, 0], [1, 2, 0, 3], [3, 6, 1, 3]]
    R, piv = rref(M)
    ref, rpiv = sympy.Matrix(M).rref()
    assert piv == list(rpiv)
    assert [[sympy.Rational(x.numerator, x.denominator) for x in row] for row in R] == \
        ref.tolist()[:len(R)]


# properties

@given(complexes)
def test_contraction_identities_random(C):
    c = cohomology(C)
    assert all(c.identities().values())


@given(complexes)
def test_betti_rank_nullity(C):
    c = cohomology(C)
    S = C.space
    for n in S.support:
        rk_out = sympy_rank(C.d.block(n)) if S.dim(n + 1) else 0
        rk_in = sympy_rank(C.d.block(n - 1)) if S.dim(n - 1) else 0
        assert c.H.dim(n) == S.dim(n) - rk_out - rk_in


@given(complexes, st.randoms(use_true_random=False))
def test_solve_returns_exact_preimage(C, rnd):
    S = C.space
    src = [k for k in range(S.dim()) if S.degrees[k] + 1 in S.basis]
    if not src:
        return
    x = {k: Fraction(rnd.randint(-3, 3)) for k in rnd.sample(src, min(2, len(src)))
         if S.degrees[k] == S.degrees[src[0]]}
    x = {k: c for k, c in x.items() if c}
    b = C.d(x)
    y = solve(C.d, b)
    assert y is not None and C.d(y) == b
