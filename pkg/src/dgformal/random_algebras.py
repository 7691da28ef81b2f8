"""Seeded random dg-algebras: truncated free graded-commutative algebras with
Sullivan-style differentials.

Generators g_1, ..., g_k get degrees in 1..3; d(g_i) is a random cocycle of
degree |g_i| + 1 in the subalgebra on g_1, ..., g_{i-1}, extended as a
derivation.  Monomials above ``top`` are set to zero, which is a dg-ideal.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .dga import DgAlgebra
from .linalg import ONE, GradedMap, GradedVectorSpace, MultilinearMap, kernel_basis, vaxpy

NAMES = "abcdefgh"


def _monomials(degs, top):
    """Sorted index tuples (odd generators at most once) of degree 0..top."""
    out = [()]
    frontier = [()]
    while frontier:
        nxt = []
        for m in frontier:
            start = m[-1] if m else 0
            for g in range(start, len(degs)):
                if degs[g] % 2 and m and m[-1] == g:
                    continue
                w = m + (g,)
                if sum(degs[j] for j in w) <= top:
                    nxt.append(w)
        out.extend(nxt)
        frontier = nxt
    return out


def _sort_with_sign(seq, degs):
    """Sort a generator sequence; sign from transposing odd generators.  0 if an odd repeats."""
    seq = list(seq)
    sign = 1
    for i in range(1, len(seq)):  # insertion sort, counting odd-odd swaps
        j = i
        while j > 0 and seq[j - 1] > seq[j]:
            if degs[seq[j - 1]] % 2 and degs[seq[j]] % 2:
                sign = -sign
            seq[j - 1], seq[j] = seq[j], seq[j - 1]
            j -= 1
    for a, b in zip(seq, seq[1:]):
        if a == b and degs[a] % 2:
            return 0, None
    return sign, tuple(seq)


def _name(m, degs):
    if not m:
        return "1"
    parts = []
    for g in sorted(set(m)):
        e = m.count(g)
        parts.append(NAMES[g] + (f"^{e}" if e > 1 else ""))
    return "".join(parts)


def random_sullivan_algebra(rng: random.Random, max_gens=4, top=4, max_dim=4, unital=None,
                            coeff_range=2, max_tries=200,
                            degree_pool=(1, 1, 1, 2, 2, 3)) -> DgAlgebra:
    """A valid dg-algebra with dims <= max_dim per degree, degrees 0..top.

    Generator degrees are drawn uniformly from ``degree_pool``.
    """
    for _ in range(max_tries):
        k = rng.randint(1, max_gens)
        degs = sorted(rng.choice(degree_pool) for _ in range(k))
        monos = _monomials(degs, top)
        by_deg = {}
        for m in monos:
            by_deg.setdefault(sum(degs[j] for j in m), []).append(m)
        if any(len(v) > max_dim for d, v in by_deg.items() if d > 0):
            continue
        is_unital = rng.random() < 0.5 if unital is None else unital
        return _build(rng, degs, monos, top, is_unital, coeff_range)
    raise RuntimeError("could not find small enough generator degrees")


def _build(rng, degs, monos, top, unital, coeff_range):
    if not unital:
        monos = [m for m in monos if m]
    basis = {}
    for m in monos:
        basis.setdefault(sum(degs[j] for j in m), []).append(_name(m, degs))
    S = GradedVectorSpace(basis)
    index = {m: S.index(_name(m, degs)) for m in monos}
    mdeg = lambda m: sum(degs[j] for j in m)  # noqa: E731

    def mul_monos(m1, m2):
        if mdeg(m1) + mdeg(m2) > top:
            return {}
        sign, m = _sort_with_sign(m1 + m2, degs)
        if not sign or m not in index:
            return {}
        return {index[m]: Fraction(sign)}

    prod = {}
    for m1 in monos:
        for m2 in monos:
            v = mul_monos(m1, m2)
            if v:
                prod[(index[m1], index[m2])] = v

    # d on generators, chosen one at a time among cocycles of the earlier ones
    dgen = {}
    d_cols = {}

    def d_of(m):
        # Leibniz: d(g_1 ... g_r) = Σ (-1)^{|g_1..g_{s-1}|} g_1..d(g_s)..g_r
        out = {}
        for s, g in enumerate(m):
            dg = dgen.get(g)
            if not dg:
                continue
            sign = -1 if mdeg(m[:s]) % 2 else 1
            for t, c in dg.items():
                sgn, w = _sort_with_sign(m[:s] + t + m[s + 1:], degs)
                if not sgn or mdeg(w) > top:
                    continue
                out[w] = out.get(w, 0) + sign * sgn * c
        return {w: c for w, c in out.items() if c}

    for g in range(len(degs)):
        target = degs[g] + 1
        earlier = [m for m in monos if m and max(m) < g and mdeg(m) == target]
        if not earlier or rng.random() < 0.15:
            continue
        # cocycles among earlier monomials in that degree
        sub = GradedVectorSpace({target: [str(j) for j in range(len(earlier))],
                                 target + 1: ["*" + str(j) for j in range(len(monos))]})
        cols = {}
        for j, m in enumerate(earlier):
            dm = d_of(m)
            col = {}
            for w, c in dm.items():
                col[sub.offset(target + 1) + monos.index(w)] = c
            if col:
                cols[j] = col
        Z = kernel_basis(GradedMap(sub, sub, 1, cols), target)
        if not Z:
            continue
        choice = {}
        for z in Z:
            c = rng.randint(-coeff_range, coeff_range)
            if c:
                vaxpy(choice, z, c)
        if choice:
            dgen[g] = {earlier[j]: c for j, c in choice.items()}

    for m in monos:
        dm = d_of(m)
        col = {index[w]: Fraction(c) for w, c in dm.items() if w in index}
        if col:
            d_cols[index[m]] = col
    unit = {index[()]: ONE} if unital else None
    name = "Λ(" + ",".join(f"{NAMES[g]}{degs[g]}" for g in range(len(degs))) + ")"
    name += "".join(f" d{NAMES[g]}={_vec_str(v, degs)}" for g, v in dgen.items())
    return DgAlgebra(S, GradedMap(S, S, 1, d_cols), MultilinearMap(S, S, 2, 0, prod),
                     unit=unit, name=name + ("" if unital else " (reduced)"), reduced=not unital)


def _vec_str(v, degs):
    return "+".join(f"{c}{_name(m, degs)}" for m, c in v.items())


def random_suite(count=100, seed=0, **kw):
    rng = random.Random(seed)
    return [random_sullivan_algebra(rng, **kw) for _ in range(count)]


def random_complex(rng: random.Random, max_degree=4, max_dim=4, density=0.5):
    """A random cochain complex d: C^n -> C^{n+1} with d∘d = 0 built as
    d = P^{-1} D P for a block-shifted D of random rank (exact rationals)."""
    from .linalg import ChainComplex
    dims = {n: rng.randint(0, max_dim) for n in range(max_degree + 1)}
    S = GradedVectorSpace({n: [f"e{n}.{j}" for j in range(k)] for n, k in dims.items()})
    cols = {}
    # choose, per degree, a rank r_n with r_{n-1} + r_n <= dim C^n
    ranks = {}
    used = {n: 0 for n in dims}
    for n in range(max_degree):
        room = min(dims[n] - used[n], dims[n + 1])
        r = rng.randint(0, max(room, 0))
        ranks[n] = r
        used[n + 1] += r
    # canonical form: e_{n, used_n + j} -> e_{n+1, j}; then conjugate by random unitriangular maps
    for n, r in ranks.items():
        for j in range(r):
            src = S.offset(n) + used[n] + j
            cols[src] = {S.offset(n + 1) + j: ONE}
    D = GradedMap(S, S, 1, cols)
    P, Pinv = _random_unitriangular(S, rng, density)
    return ChainComplex(S, Pinv @ D @ P)


def _random_unitriangular(S, rng, density):
    cols, inv_cols = {}, {}
    for n in S.support:
        idx = list(S.indices(n))
        # upper unitriangular U and its inverse by back substitution
        U = {k: {k: ONE} for k in idx}
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                if rng.random() < density:
                    U[idx[b]][idx[a]] = Fraction(rng.randint(-2, 2))
        cols.update({k: {t: c for t, c in v.items() if c} for k, v in U.items()})
    P = GradedMap(S, S, 0, cols)
    for n in S.support:
        idx = list(S.indices(n))
        for k in idx:
            # solve P x = e_k by back substitution (P is upper unitriangular)
            x = {}
            for t in reversed(idx):
                s = (1 if t == k else 0) - sum(P.columns[j].get(t, 0) * x.get(j, 0)
                                               for j in idx if j > t)
                if s:
                    x[t] = Fraction(s)
            inv_cols[k] = x
    return P, GradedMap(S, S, 0, inv_cols)
