"""Acceptance suite: nine criteria, one PASS/FAIL line each.

Run with pytest (lines appear in the terminal summary) or directly:
``python3 tests/test_acceptance.py``.
"""

import itertools
import random
import time

import pytest

from dgformal.ainfinity import morphism_defect, stasheff_defect
from dgformal.complexes import (circle, cochain_algebra, example_corpus, sphere2, suspension,
                                torus7, truncated_heisenberg, wedge)
from dgformal.dga import (augmented_complex, induced_cohomology_algebra, reduce_if_unital,
                          reduced_subalgebra)
from dgformal.errors import NotApplicableError
from dgformal.formality import (arity_bound, certify_formality, splice_span, theorem1_pipeline,
                                trivial_reduced_span)
from dgformal.linalg import ONE, cohomology, vsub
from dgformal.massey import (detection_sign, epsilon, higher_massey_unique, in_lower_images,
                             massey_vanishes, triple_massey)
from dgformal.random_algebras import random_complex, random_suite
from dgformal.transfer import transfer

SEED = 2024
SUITE_SIZE = 100
RESULTS = {}


def record(number, ok, detail):
    RESULTS[number] = (ok, detail)
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    return line


_suite = None


def suite():
    global _suite
    if _suite is None:
        _suite = random_suite(SUITE_SIZE, seed=SEED)
    return _suite


def positive(H):
    return [k for k in range(H.dim()) if H.degrees[k] > 0]


# 1 --------------------------------------------------------------------------

def criterion_1():
    t0 = time.time()
    bad = []
    for j, A in enumerate(suite()):
        tr = transfer(A, arity_cap=6, verify=False)
        for n in range(1, 7):
            if not stasheff_defect(tr.structure, n).is_zero():
                bad.append((j, "Stasheff", n))
            if not morphism_defect(tr.morphism, n).is_zero():
                bad.append((j, "morphism", n))
    elapsed = time.time() - t0
    ok = not bad and elapsed < 120 and len(suite()) >= 100
    dims_ok = all(max(A.space.dim(d) for d in A.space.support) <= 4 and
                  set(A.space.support) <= set(range(5)) for A in suite())
    ok = ok and dims_ok
    return ok, (f"{len(suite())} algebras, n <= 6, {len(bad)} nonzero defects, "
                f"{elapsed:.1f}s (limit 120s)")


# 2 --------------------------------------------------------------------------

def detection_counts():
    found = literal = corrected = 0
    for A in suite():
        c = cohomology(A.complex)
        tr = transfer(A, c, arity_cap=3)
        H = c.H
        for key in itertools.product(positive(H), repeat=3):
            if sum(H.degrees[k] for k in key) - 1 not in H.basis:
                continue
            xs = [{k: ONE} for k in key]
            out = triple_massey(A, *xs, c)
            if out.kind == "obstructed":
                continue
            found += 1
            a03 = out.defining_system.value(A, c)
            m3 = tr.m(3)(*xs)
            lit = {k: epsilon(out.degrees) * x for k, x in m3.items()}
            cor = {k: detection_sign(out.degrees) * x for k, x in m3.items()}
            literal += not in_lower_images(tr, 3, vsub(lit, a03))
            corrected += not in_lower_images(tr, 3, vsub(cor, a03))
    return found, literal, corrected


def criterion_2():
    found, literal, corrected = detection_counts()
    return literal == 0 and found > 0, (
        f"{found} defining systems; ε·m_3 - [a_03] outside Im(m_2) in {literal} "
        f"(with sign (-1)^n·ε: {corrected})")


# 3 --------------------------------------------------------------------------

def criterion_3():
    A = truncated_heisenberg()
    R = reduce_if_unital(A)
    HA = induced_cohomology_algebra(R)
    H, c = HA.H, HA.contraction
    x, y, xz = H.index("[x]"), H.index("[y]"), H.index("[xz]")
    xs = [{x: ONE}, {x: ONE}, {y: ONE}]
    out = triple_massey(R, *xs, c)
    tr = transfer(R, c, arity_cap=3)
    hi = higher_massey_unique(R, tr, xs)
    m3 = tr.m(3)(*xs)
    eps = epsilon(out.degrees)
    checks = {
        "unique [xz]": out.is_unique and out.value == {xz: 1} and not massey_vanishes(out),
        "zero indeterminacy": out.indeterminacy == [],
        "m_3 = ε⁻¹[xz]": m3 == {xz: eps},
        "non-formal": certify_formality(A).verdict == "non-formal",
        "triple = higher": hi.value == out.value,
    }
    failed = [k for k, v in checks.items() if not v]
    return not failed, (f"m_3([x],[x],[y]) = {H.format(m3)}, ε = {eps}; "
                        + ("all clauses hold" if not failed else "failing: " + ", ".join(failed)))


# 4 --------------------------------------------------------------------------

def criterion_4():
    checked, names, bad = 0, [], []
    for e in example_corpus():
        A = e.algebra()
        if not A.d.is_zero():
            continue
        names.append(e.name)
        R = reduce_if_unital(A)
        c = cohomology(R.complex)
        for key in itertools.product(positive(c.H), repeat=3):
            out = triple_massey(R, *[{k: ONE} for k in key], c)
            if out.kind == "obstructed":
                continue
            checked += 1
            if not massey_vanishes(out):
                bad.append((e.name, key))
    return not bad and checked > 0, (f"{len(names)} zero-differential entries, {checked} defined "
                                     f"triples, {len(bad)} not containing 0")


# 5 --------------------------------------------------------------------------

def criterion_5():
    parts = []
    ok = True
    for name, X in (("suspension(torus)", suspension(torus7())),
                    ("S1vS1vS2", wedge(circle(), circle(), sphere2()))):
        t0 = time.time()
        A = cochain_algebra(X)
        cert = theorem1_pipeline(A, 8)
        R = reduced_subalgebra(A)
        tr = transfer(R, arity_cap=8)
        zero = all(tr.m(n).is_zero() for n in range(3, 9))
        steps = all(s["vanishing"] and s.get("m_n_zero") for s in cert.trace)
        dt = time.time() - t0
        good = cert.is_formal and zero and steps and dt < 30
        ok &= good
        parts.append(f"{name} {'formal' if good else 'NOT formal'} ({dt:.1f}s)")
    try:
        theorem1_pipeline(cochain_algebra(torus7()))
        ok = False
        parts.append("torus accepted")
    except NotApplicableError:
        parts.append("torus not-applicable")
    return ok, "; ".join(parts)


# 6 --------------------------------------------------------------------------

def criterion_6():
    parts, ok = [], True
    for name, X in (("circle", circle()), ("S1vS1", wedge(circle(), circle()))):
        A = cochain_algebra(X)
        out = splice_span(trivial_reduced_span(A), A)
        sq, qi = out.commuting_squares(), out.quasi_isomorphisms()
        good = all(sq.values()) and all(qi.values()) and out.C.space == A.space
        ok &= good
        parts.append(f"{name} {'valid' if good else 'invalid'}")
    return ok, "; ".join(parts)


# 7 --------------------------------------------------------------------------

def criterion_7():
    agree, bad = 0, []
    for e in example_corpus():
        if not e.expected.get("trivial_product"):
            continue
        A = e.algebra()
        p, c = theorem1_pipeline(A, 8).verdict, certify_formality(A, 8).verdict
        if p == c:
            agree += 1
        else:
            bad.append(f"{e.name}: {p} vs {c}")
    return not bad and agree > 0, f"{agree} trivial-product entries agree" + (
        "; " + "; ".join(bad) if bad else "")


# 8 --------------------------------------------------------------------------

def criterion_8():
    outputs, bad = 0, []
    for e in example_corpus():
        A = e.algebra()
        cs = [A.complex]
        if A.unit is not None and A.augmentation is not None:
            cs += [reduced_subalgebra(A).complex, augmented_complex(A)]
        for C in cs:
            outputs += 1
            ids = cohomology(C).identities()
            if len(ids) != 5 or not all(ids.values()):
                bad.append(e.name)
    rng = random.Random(SEED)
    for _ in range(100):
        outputs += 1
        ids = cohomology(random_complex(rng)).identities()
        if len(ids) != 5 or not all(ids.values()):
            bad.append("random")
    return not bad, f"{outputs} contractions (corpus + 100 random), {len(bad)} failures"


# 9 --------------------------------------------------------------------------

def criterion_9():
    R = reduced_subalgebra(cochain_algebra(sphere2()))
    c = cohomology(R.complex)
    bound = arity_bound(c.H)
    tr = transfer(R, c, arity_cap=8)
    nonzero = [n for n in range(bound + 1, 9) if not tr.m(n).is_zero()]
    return bound == 2 and not nonzero, (f"bound {bound}; m_n nonzero above it for n in "
                                        f"{nonzero or 'none'} (checked to 8)")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("number", range(1, 10))
def test_criterion(number):
    ok, detail = CRITERIA[number - 1]()
    record(number, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    for j, fn in enumerate(CRITERIA, start=1):
        record(j, *fn())
