import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dgformal.complexes import (circle, cochain_algebra, point, sphere2, torus7, two_points,
                                wedge, exterior)
from dgformal.dga import (DgAlgebra, algebra_from_tables, augmented_complex, cup_length,
                          exterior_product_table, induced_cohomology_algebra,
                          is_reduced_product_trivial, offending_product, reduced_subalgebra,
                          validate)
from dgformal.errors import DisconnectedError
from dgformal.linalg import ONE, cohomology, vaxpy
from dgformal.random_algebras import random_sullivan_algebra

algebras = st.integers(0, 10**9).map(lambda s: random_sullivan_algebra(random.Random(s)))


def leibniz_defects(A):
    """Independent expansion of d(ab) - da.b - (-1)^|a| a.db on all basis pairs."""
    S = A.space
    bad = []
    for a in range(S.dim()):
        for b in range(S.dim()):
            ea, eb = {a: ONE}, {b: ONE}
            lhs = A.d(A.mul(ea, eb))
            rhs = {}
            vaxpy(rhs, A.mul(A.d(ea), eb))
            vaxpy(rhs, A.mul(ea, A.d(eb)), -1 if S.degrees[a] % 2 else 1)
            if lhs != rhs:
                bad.append((S.names[a], S.names[b]))
    return bad


def test_exterior_valid():
    assert validate(exterior("xy")).ok


def test_truncated_heisenberg_valid(theis):
    assert validate(theis).ok
    assert theis.space.dim() == 7
    assert leibniz_defects(theis) == []


def test_dz_equals_xz_truncated_is_still_valid():
    # degree 3 is truncated away, so d(xz) = -x.xz = 0 and nothing can fail
    basis, prod = exterior_product_table("xyz", 2)
    A = algebra_from_tables(basis, {"z": {"xz": 1}}, prod, unit="1")
    assert validate(A).ok
    assert leibniz_defects(A) == []


def test_dz_equals_xz_full_exterior_invalid():
    basis, prod = exterior_product_table("xyz")
    A = algebra_from_tables(basis, {"z": {"xz": 1}}, prod, unit="1")
    rep = validate(A)
    assert not rep.ok
    assert all("z" in w for _, w, _ in rep.failures)
    assert set(leibniz_defects(A)) == {("y", "z"), ("z", "y")}


def test_d_squared_failure_reported():
    A = algebra_from_tables({0: ["u"], 1: ["v"], 2: ["w"]}, {"u": {"v": 1}, "v": {"w": 1}}, {})
    rep = validate(A)
    assert ("d∘d = 0", ("u",)) in [(i, w) for i, w, _ in rep.failures]


def test_unit_law_failure_reported():
    A = algebra_from_tables({0: ["e"], 1: ["v"]}, {}, {("e", "e"): {"e": 1}}, unit="e")
    assert any(i.startswith("unit") for i, _, _ in validate(A).failures)


def test_zero_differential_product_is_algebra_product():
    A = exterior("xy")
    HA = induced_cohomology_algebra(A)
    names = {(A.space.names[a], A.space.names[b]): v for (a, b), v in A.product.entries.items()}
    hnames = {(HA.H.names[a][1:-1], HA.H.names[b][1:-1]):
              {HA.H.names[k][1:-1]: c for k, c in v.items()}
              for (a, b), v in HA.product.entries.items()}
    assert hnames == {k: {A.space.names[j]: c for j, c in v.items()} for k, v in names.items()}


def test_heisenberg_xy_product_vanishes(theis):
    HA = induced_cohomology_algebra(theis)
    H = HA.H
    assert HA.mul({H.index("[x]"): ONE}, {H.index("[y]"): ONE}) == {}
    assert is_reduced_product_trivial(HA)


def test_torus_product_nonzero():
    HA = induced_cohomology_algebra(cochain_algebra(torus7()))
    h1 = list(HA.H.indices(1))
    assert HA.mul({h1[0]: ONE}, {h1[1]: ONE})
    assert not is_reduced_product_trivial(HA)


def test_full_heisenberg_product(fheis):
    HA = induced_cohomology_algebra(fheis)
    H = HA.H
    assert HA.mul({H.index("[x]"): ONE}, {H.index("[yz]"): ONE}) == {H.index("[xyz]"): 1}
    assert offending_product(HA) is not None


@pytest.mark.parametrize("X, expected", [(point(), 0), (wedge(circle(), circle()), 1),
                                         (torus7(), 2)])
def test_cup_length(X, expected):
    assert cup_length(induced_cohomology_algebra(cochain_algebra(X))) == expected


def test_reduced_point_is_zero():
    R = reduced_subalgebra(cochain_algebra(point()))
    assert R.space.dim() == 0


@pytest.mark.parametrize("X, dims", [(circle(), {1: 1}), (sphere2(), {2: 1})])
def test_reduced_cohomology(X, dims):
    R = reduced_subalgebra(cochain_algebra(X))
    assert validate(R).ok
    assert cohomology(R.complex).betti == dims


def test_reduced_disconnected_rejected():
    with pytest.raises(DisconnectedError):
        reduced_subalgebra(cochain_algebra(two_points()))


def test_augmented_point_acyclic():
    c = cohomology(augmented_complex(cochain_algebra(point())))
    assert c.H.dim() == 0


def test_augmented_circle():
    c = cohomology(augmented_complex(cochain_algebra(circle())))
    assert c.betti == {1: 1}


def test_augmented_two_points_rejected():
    with pytest.raises(DisconnectedError):
        augmented_complex(cochain_algebra(two_points()))


@pytest.mark.parametrize("X", [circle(), sphere2(), torus7(), wedge(circle(), sphere2())])
def test_reduced_and_augmented_agree(X):
    A = cochain_algebra(X)
    assert cohomology(reduced_subalgebra(A).complex).betti == \
        cohomology(augmented_complex(A)).betti


# properties

@given(algebras)
def test_random_algebras_valid(A):
    assert validate(A).ok


@given(algebras)
def test_cohomology_product_associative(A):
    HA = induced_cohomology_algebra(A)
    n = HA.H.dim()
    for a in range(n):
        for b in range(n):
            ab = HA.mul({a: ONE}, {b: ONE})
            for c in range(n):
                assert HA.mul(ab, {c: ONE}) == HA.mul({a: ONE}, HA.mul({b: ONE}, {c: ONE}))


@given(algebras, st.randoms(use_true_random=False))
def test_product_independent_of_representatives(A, rnd):
    HA = induced_cohomology_algebra(A)
    c = HA.contraction
    S = A.space
    reps = {}
    for k in range(HA.H.dim()):
        r = dict(c.i.columns.get(k, {}))
        for b in S.indices(HA.H.degrees[k] - 1):
            vaxpy(r, A.d({b: ONE}), Fraction(rnd.randint(-2, 2)))
        reps[k] = r
    for (a, b), v in HA.product.entries.items():
        assert c.p(A.mul(reps[a], reps[b])) == v
    for a in range(HA.H.dim()):
        for b in range(HA.H.dim()):
            if (a, b) not in HA.product.entries:
                assert not c.p(A.mul(reps[a], reps[b]))


@given(algebras)
def test_cup_length_at_most_one_iff_trivial(A):
    HA = induced_cohomology_algebra(A)
    assert (cup_length(HA) <= 1) == is_reduced_product_trivial(HA)


def test_dg_algebra_rejects_bad_unit():
    A = exterior("x")
    with pytest.raises(Exception):
        DgAlgebra(A.space, A.d, A.product, unit={1: ONE})
