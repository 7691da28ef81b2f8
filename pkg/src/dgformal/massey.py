"""Massey products through defining systems.

Conventions: ``bar(a) = (-1)^{|a|} a``; a defining system for x_1, ..., x_n
is a family a_{i,j} (0 <= i < j <= n, (i, j) != (0, n)) with
[a_{i-1,i}] = x_i and d a_{i,j} = Σ_{i<k<j} bar(a_{i,k}) a_{k,j}; its value is
the class of a_{0,n} = Σ_{0<k<n} bar(a_{0,k}) a_{k,n}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import (DefiningSystemError, InternalConsistencyError, MalformedInputError,
                     NotApplicableError, UndefinedProductError)
from .linalg import ONE, EchelonBasis, Preimage, cohomology, kernel_basis, vaxpy, vsub


def epsilon(degrees: Sequence[int]) -> int:
    """(-1)^{Σ_{j=1}^{n-1} (n-j)|x_j|} for the degrees of x_1, ..., x_n."""
    n = len(degrees)
    if n < 3:
        raise MalformedInputError("epsilon is defined for n >= 3")
    e = sum((n - j) * degrees[j - 1] for j in range(1, n))
    return -1 if e % 2 else 1


def detection_sign(degrees: Sequence[int]) -> int:
    """Sign s with <x_1, ..., x_n> = s * m_n(x_1, ..., x_n) for the transferred
    structure built by :func:`dgformal.transfer.transfer`.

    Equals (-1)^n * epsilon(degrees).  The extra (-1)^n is forced by the
    Stasheff and A∞-morphism sign conventions used throughout the package.
    """
    return (-1) ** len(degrees) * epsilon(degrees)


class _Solver:
    """d-preimages with one cached elimination per degree."""

    def __init__(self, A):
        self.A = A
        self._cache = {}

    def __call__(self, target: Mapping):
        if not target:
            return {}
        deg = self.A.space.degree_of(target)
        src = deg - 1
        if self.A.space.dim(src) == 0:
            return None
        if src not in self._cache:
            self._cache[src] = Preimage(self.A.d, src)
        return self._cache[src].solve(target)


def _solver(A):
    s = getattr(A, "_massey_solver", None)
    if s is None:
        s = _Solver(A)
        A._massey_solver = s
    return s


def massey_sum(A, cochains: Mapping, i: int, j: int) -> dict:
    """Σ_{i<k<j} bar(a_{i,k}) a_{k,j}."""
    out = {}
    for k in range(i + 1, j):
        vaxpy(out, A.mul(A.bar(cochains[(i, k)]), cochains[(k, j)]))
    return out


@dataclass
class DefiningSystem:
    classes: list
    cochains: dict

    @property
    def n(self) -> int:
        return len(self.classes)

    def positions(self):
        n = self.n
        for length in range(1, n + 1):
            for i in range(0, n - length + 1):
                if (i, i + length) != (0, n):
                    yield i, i + length

    def validate(self, A, contraction):
        for pos in self.positions():
            if pos not in self.cochains:
                raise DefiningSystemError(pos, "cochain missing")
            i, j = pos
            a = self.cochains[pos]
            if j == i + 1:
                if A.d(a):
                    raise DefiningSystemError(pos, "not a cocycle")
                if contraction.p(a) != dict(self.classes[i]):
                    raise DefiningSystemError(pos, "represents the wrong class")
            elif A.d(a) != massey_sum(A, self.cochains, i, j):
                raise DefiningSystemError(pos, "d a_ij differs from the required sum")
        return True

    def top_cochain(self, A) -> dict:
        return massey_sum(A, self.cochains, 0, self.n)

    def value(self, A, contraction) -> dict:
        top = self.top_cochain(A)
        if A.d(top):
            raise InternalConsistencyError("a_{0,n} of a valid defining system is not a cocycle")
        return contraction.p(top)


@dataclass
class MasseyOutcome:
    """``kind`` is one of 'unique', 'coset', 'witness-of-vanishing', 'obstructed'."""

    kind: str
    classes: list
    degrees: tuple
    value: dict | None = None
    indeterminacy: list = field(default_factory=list)
    defining_system: DefiningSystem | None = None
    obstruction: tuple | None = None
    complete: bool = True

    @property
    def n(self) -> int:
        return len(self.classes)

    @property
    def epsilon(self) -> int:
        return epsilon(self.degrees)

    @property
    def is_unique(self) -> bool:
        return self.kind == "unique" or (self.kind == "coset" and not self.indeterminacy)

    def reduced_value(self) -> dict:
        """Value reduced modulo the indeterminacy echelon basis."""
        E = EchelonBasis()
        for v in self.indeterminacy:
            E.add(v)
        return E.reduce(self.value or {})


def _class_degree(H, x):
    if not x:
        raise MalformedInputError("zero class has no degree; pass its degree explicitly")
    return H.degree_of(x)


def _degrees(H, classes, degrees):
    if degrees is not None:
        degrees = tuple(degrees)
        for x, d in zip(classes, degrees):
            if x and H.degree_of(x) != d:
                raise MalformedInputError("class degree does not match the stated degree")
        return degrees
    return tuple(_class_degree(H, x) for x in classes)


def _system_for_triple(A, c, reps, solve):
    a = {(0, 1): reps[0], (1, 2): reps[1], (2, 3): reps[2]}
    for pos in ((0, 2), (1, 3)):
        rhs = massey_sum(A, a, *pos)
        sol = solve(rhs)
        if sol is None:
            return None, (pos, rhs, c.p(rhs))
        a[pos] = sol
    return DefiningSystem([c.p(r) for r in reps], a), None


def triple_massey(A, x1, x2, x3, contraction=None, degrees=None) -> MasseyOutcome:
    """<x1, x2, x3> as representative plus indeterminacy subspace.

    The indeterminacy is computed from the choices themselves: cocycles
    added to a_{0,2} and a_{1,3}, and coboundaries added to each
    representative (with a_{0,2}, a_{1,3} re-solved).
    """
    c = contraction or cohomology(A.complex)
    H = c.H
    classes = [dict(x1), dict(x2), dict(x3)]
    degs = _degrees(H, classes, degrees)
    solve = _solver(A)
    reps = [c.i(x) for x in classes]
    ds, obstruction = _system_for_triple(A, c, reps, solve)
    if ds is None:
        return MasseyOutcome("obstructed", classes, degs, obstruction=obstruction)
    base = ds.value(A, c)
    a = ds.cochains

    E = EchelonBasis()
    S = A.space
    for z in kernel_basis(A.d, degs[0] + degs[1] - 1):
        E.add(c.p(A.mul(A.bar(z), a[(2, 3)])))
    for w in kernel_basis(A.d, degs[1] + degs[2] - 1):
        E.add(c.p(A.mul(A.bar(a[(0, 1)]), w)))
    for slot in range(3):
        for b in S.indices(degs[slot] - 1):
            moved = list(reps)
            moved[slot] = vaxpy(dict(reps[slot]), A.d.columns.get(b, {}))
            ds2, _ = _system_for_triple(A, c, moved, solve)
            if ds2 is None:
                raise InternalConsistencyError("changing a representative obstructed the product")
            E.add(vsub(ds2.value(A, c), base))
    return MasseyOutcome("coset", classes, degs, value=base, indeterminacy=list(E.rows),
                         defining_system=ds)


def _positive_tuples_nonzero(m, H):
    for key in m.nonzero_keys():
        if all(H.degrees[k] > 0 for k in key):
            return key
    return None


def check_vanishing_below(transfer, n):
    """Smallest k in [2, n-1] with m_k nonzero on positive-degree classes, or None."""
    H = transfer.structure.space
    for k in range(2, n):
        key = _positive_tuples_nonzero(transfer.m(k), H)
        if key is not None:
            return k, key
    return None


def build_defining_system(A, contraction, classes) -> DefiningSystem:
    """Level-by-level defining system; raises DefiningSystemError when some
    required right-hand side is not exact."""
    solve = _solver(A)
    n = len(classes)
    a = {(j - 1, j): contraction.i(x) for j, x in enumerate(classes, start=1)}
    for length in range(2, n):
        for i in range(0, n - length + 1):
            j = i + length
            rhs = massey_sum(A, a, i, j)
            sol = solve(rhs)
            if sol is None:
                raise DefiningSystemError((i, j), "required right-hand side is not exact")
            a[(i, j)] = sol
    return DefiningSystem([dict(x) for x in classes], a)


def higher_massey_unique(A, transfer, classes, degrees=None) -> MasseyOutcome:
    """The unique Massey product when m_2, ..., m_{n-1} vanish on positive classes.

    The value is computed twice, from an explicit defining system and as
    detection_sign * m_n(x_1, ..., x_n); disagreement is an internal error.
    """
    n = len(classes)
    if n < 3:
        raise MalformedInputError("Massey products need n >= 3")
    if transfer.arity_cap < n:
        raise MalformedInputError(f"transfer only reaches arity {transfer.arity_cap}")
    c = transfer.contraction
    H = c.H
    classes = [dict(x) for x in classes]
    degs = _degrees(H, classes, degrees)
    if any(d <= 0 for d in degs):
        raise NotApplicableError("classes must have positive degree")
    bad = check_vanishing_below(transfer, n)
    if bad is not None:
        k, key = bad
        raise NotApplicableError(
            f"m_{k} does not vanish (e.g. on {tuple(H.names[j] for j in key)}); "
            f"the Massey {n}-product need not be unique")
    try:
        ds = build_defining_system(A, c, classes)
    except DefiningSystemError as exc:
        raise InternalConsistencyError(
            f"lower Massey products vanish but no defining system exists: {exc}") from exc
    value = ds.value(A, c)
    predicted = {k: detection_sign(degs) * x for k, x in transfer.m(n)(*classes).items()}
    if predicted != value:
        raise InternalConsistencyError(
            f"defining system gives {H.format(value)} but the transferred m_{n} "
            f"predicts {H.format(predicted)}")
    return MasseyOutcome("unique", classes, degs, value=value, defining_system=ds)


def massey_vanishes(outcome: MasseyOutcome) -> bool:
    if outcome.kind == "obstructed":
        raise UndefinedProductError("the Massey product is not defined")
    if outcome.kind == "witness-of-vanishing":
        return True
    if outcome.kind == "unique":
        return not outcome.value
    return not outcome.reduced_value()


def detection_check(A, transfer, classes, ds: DefiningSystem, degrees=None) -> bool:
    """Whether sign * m_n(x) - [a_{0,n}] lies in Σ_{j<n} Im(m_j)."""
    c = transfer.contraction
    ds.validate(A, c)
    n = len(classes)
    degs = _degrees(c.H, [dict(x) for x in classes], degrees)
    value = ds.value(A, c)
    lhs = {k: detection_sign(degs) * x for k, x in transfer.m(n)(*classes).items()}
    diff = vsub(lhs, value)
    return in_lower_images(transfer, n, diff)


def in_lower_images(transfer, n, v) -> bool:
    E = EchelonBasis()
    for j in range(1, n):
        for val in transfer.m(j).entries.values():
            E.add(val)
    return E.contains(v)


@dataclass
class MasseyExploration:
    """Values found by a bounded search over defining systems.  Never complete."""

    classes: list
    values: list
    systems_tried: int
    vanishing_system: DefiningSystem | None
    complete: bool = False

    def as_outcome(self, degrees) -> MasseyOutcome | None:
        if self.vanishing_system is None:
            return None
        return MasseyOutcome("witness-of-vanishing", self.classes, tuple(degrees), value={},
                             defining_system=self.vanishing_system, complete=False)


def explore_massey(A, classes, contraction=None, degrees=None, coefficients=(0, 1, -1),
                   max_generators=2, budget=500) -> MasseyExploration:
    """Backtracking search through defining systems (best effort, any n >= 3).

    Each a_{i,j} ranges over the canonical preimage plus small combinations
    of the first ``max_generators`` cocycles (representatives: coboundaries).
    The values found form a subset of the Massey set.
    """
    c = contraction or cohomology(A.complex)
    classes = [dict(x) for x in classes]
    n = len(classes)
    degs = _degrees(c.H, classes, degrees)
    solve = _solver(A)
    order = [(j - 1, j) for j in range(1, n + 1)]
    order += [(i, i + L) for L in range(2, n) for i in range(0, n - L + 1) if (i, i + L) != (0, n)]
    values, tried = [], [0]
    vanishing = [None]

    def done():
        return tried[0] >= budget or vanishing[0] is not None

    def rec(idx, a):
        if done():
            return
        if idx == len(order):
            tried[0] += 1
            ds = DefiningSystem(classes, dict(a))
            val = ds.value(A, c)
            if val not in values:
                values.append(val)
            if not val:
                vanishing[0] = ds
            return
        i, j = order[idx]
        deg = sum(degs[i:j]) - (j - i - 1)
        if j == i + 1:
            cands = _coboundary_variations(A, c.i(classes[i]), deg, coefficients, max_generators)
        else:
            base = solve(massey_sum(A, a, i, j))
            if base is None:
                return
            cands = _cocycle_variations(A, base, deg, coefficients, max_generators)
        for v in cands:
            a[(i, j)] = v
            rec(idx + 1, a)
            if done():
                break
        a.pop((i, j), None)

    rec(0, {})
    return MasseyExploration(classes, values, tried[0], vanishing[0])


def _coboundary_variations(A, base, deg, coefficients, max_generators):
    E = EchelonBasis()
    for b in A.space.indices(deg - 1):
        col = A.d.columns.get(b)
        if col:
            E.add(col)
    yield from _combos(base, list(E.rows)[:max_generators], coefficients)


def _cocycle_variations(A, base, deg, coefficients, max_generators):
    gens = kernel_basis(A.d, deg)
    yield from _combos(base, gens[:max_generators], coefficients)


def _combos(base, gens, coefficients):
    for coeffs in itertools.product(coefficients, repeat=len(gens)):
        v = dict(base)
        for cf, g in zip(coeffs, gens):
            vaxpy(v, g, cf)
        yield v
