"""Exact linear algebra over Q on finite graded vector spaces.

Vectors are sparse dicts ``{global basis index: Fraction}``.  Elimination is
done on dense per-degree matrices with leftmost-pivot, first-row tie-breaking,
so every output here is reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import InvalidComplexError, MalformedInputError

ZERO = Fraction(0)
ONE = Fraction(1)


# --------------------------------------------------------------------------
# sparse vectors

def vec(items=()) -> dict:
    out = {}
    for k, c in dict(items).items():
        c = Fraction(c)
        if c:
            out[k] = c
    return out


def vaxpy(acc: dict, v: Mapping, c=ONE) -> dict:
    """acc += c*v in place; drops cancelled entries."""
    if not c:
        return acc
    for k, x in v.items():
        y = acc.get(k, ZERO) + c * x
        if y:
            acc[k] = y
        else:
            acc.pop(k, None)
    return acc


def vadd(*vs) -> dict:
    acc = {}
    for v in vs:
        vaxpy(acc, v)
    return acc


def vsub(u, v) -> dict:
    return vaxpy(dict(u), v, -ONE)


def vscale(v, c) -> dict:
    c = Fraction(c)
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


# --------------------------------------------------------------------------
# dense elimination

def sparse_rref(rows: Sequence[Mapping], ncols: int):
    """Reduced row echelon form of sparse rows {column: value}.

    Returns (rows, pivots) sorted by pivot column; only columns < ncols are
    eligible as pivots, later columns are carried along.
    """
    work = [{j: Fraction(x) for j, x in r.items() if x} for r in rows]
    work = [r for r in work if r]
    done_rows, pivots = [], []
    for col in range(ncols):
        cands = [i for i, r in enumerate(work) if col in r]
        if not cands:
            continue
        pi = min(cands, key=lambda i: len(work[i]))
        prow = work.pop(pi)
        inv = 1 / prow[col]
        if inv != 1:
            prow = {j: x * inv for j, x in prow.items()}
        for r in work:
            c = r.get(col)
            if c:
                vaxpy(r, prow, -c)
        for r in done_rows:
            c = r.get(col)
            if c:
                vaxpy(r, prow, -c)
        work = [r for r in work if r]
        done_rows.append(prow)
        pivots.append(col)
        if not work:
            break
    return done_rows, pivots


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form.  Returns (nonzero rows, pivot columns)."""
    if not rows:
        return [], []
    width = len(rows[0])
    if ncols is None:
        ncols = width
    sparse = [{j: x for j, x in enumerate(r) if x} for r in rows]
    R, pivots = sparse_rref(sparse, ncols)
    out = []
    for r in R:
        dense = [ZERO] * width
        for j, x in r.items():
            dense[j] = x
        out.append(dense)
    return out, pivots


def rank(rows, ncols=None) -> int:
    return len(rref(rows, ncols)[1])


def invert(M):
    n = len(M)
    aug = [list(map(Fraction, row)) + [ONE if i == j else ZERO for j in range(n)]
           for i, row in enumerate(M)]
    R, piv = rref(aug, n)
    if piv != list(range(n)):
        raise MalformedInputError("matrix is singular")
    return [row[n:] for row in R]


def matmul(A, B):
    if not A or not B:
        return [[ZERO] * (len(B[0]) if B else 0) for _ in A]
    Bt = list(zip(*B))
    return [[sum((a * b for a, b in zip(row, col)), ZERO) for col in Bt] for row in A]


class EchelonBasis:
    """Incrementally grown reduced echelon basis of a subspace of Q^n (sparse rows)."""

    def __init__(self):
        self.rows: list[dict] = []
        self.pivots: list[int] = []

    def reduce(self, v: Mapping) -> dict:
        v = dict(v)
        for row, p in zip(self.rows, self.pivots):
            c = v.get(p)
            if c:
                vaxpy(v, row, -c)
        return v

    def add(self, v: Mapping) -> dict | None:
        """Insert v; returns the normalised new row, or None if v was dependent."""
        r = self.reduce(v)
        if not r:
            return None
        p = min(r)
        r = vscale(r, 1 / r[p])
        for i, row in enumerate(self.rows):
            c = row.get(p)
            if c:
                self.rows[i] = vaxpy(dict(row), r, -c)
        order = sorted(range(len(self.pivots) + 1),
                       key=lambda i: self.pivots[i] if i < len(self.pivots) else p)
        rows = self.rows + [r]
        piv = self.pivots + [p]
        self.rows = [rows[i] for i in order]
        self.pivots = [piv[i] for i in order]
        return r

    def contains(self, v: Mapping) -> bool:
        return not self.reduce(v)

    def __len__(self):
        return len(self.rows)


def span_contains(vectors: Iterable[Mapping], v: Mapping) -> bool:
    E = EchelonBasis()
    for w in vectors:
        E.add(w)
    return E.contains(v)


# --------------------------------------------------------------------------
# graded spaces and maps

class GradedVectorSpace:
    """Finite-dimensional Z-graded Q-vector space with named, ordered bases.

    Basis elements get consecutive global indices, ordered by degree and then
    by position within the degree.
    """

    def __init__(self, basis: Mapping[int, Sequence[str]]):
        self.basis = {int(d): tuple(names) for d, names in sorted(basis.items()) if len(names)}
        self.names: list[str] = []
        self.degrees: list[int] = []
        self._offset: dict[int, int] = {}
        for d, names in self.basis.items():
            if len(set(names)) != len(names):
                raise MalformedInputError(f"duplicate basis name in degree {d}")
            self._offset[d] = len(self.names)
            self.names.extend(names)
            self.degrees.extend([d] * len(names))
        self._lookup = {}
        for k, name in enumerate(self.names):
            self._lookup.setdefault(name, []).append(k)

    @property
    def support(self) -> list[int]:
        return list(self.basis)

    def dim(self, degree=None) -> int:
        if degree is None:
            return len(self.names)
        return len(self.basis.get(degree, ()))

    def indices(self, degree) -> range:
        start = self._offset.get(degree, 0)
        return range(start, start + self.dim(degree))

    def offset(self, degree) -> int:
        return self._offset[degree]

    def index(self, name: str, degree=None) -> int:
        hits = self._lookup.get(name, [])
        if degree is not None:
            hits = [k for k in hits if self.degrees[k] == degree]
        if len(hits) != 1:
            raise MalformedInputError(f"basis element {name!r} is "
                                      + ("unknown" if not hits else "ambiguous"))
        return hits[0]

    def degree_of(self, v: Mapping) -> int | None:
        """Degree of a homogeneous nonzero vector (None for zero)."""
        degs = {self.degrees[k] for k in v}
        if len(degs) > 1:
            raise MalformedInputError("inhomogeneous vector")
        return degs.pop() if degs else None

    def basis_vector(self, k) -> dict:
        return {k: ONE}

    def to_dense(self, v: Mapping, degree) -> list:
        off = self._offset.get(degree, 0)
        out = [ZERO] * self.dim(degree)
        for k, c in v.items():
            if self.degrees[k] != degree:
                raise MalformedInputError(f"vector has a component outside degree {degree}")
            out[k - off] = c
        return out

    def from_dense(self, col, degree) -> dict:
        off = self._offset.get(degree, 0)
        return {off + j: Fraction(c) for j, c in enumerate(col) if c}

    def format(self, v: Mapping) -> str:
        if not v:
            return "0"
        parts = []
        for k in sorted(v):
            c = v[k]
            if c == 1:
                parts.append(f"+{self.names[k]}")
            elif c == -1:
                parts.append(f"-{self.names[k]}")
            else:
                parts.append(f"{'+' if c > 0 else '-'}{abs(c)}*{self.names[k]}")
        s = " ".join(parts)
        return s[1:] if s.startswith("+") else s

    def __eq__(self, other):
        return isinstance(other, GradedVectorSpace) and self.basis == other.basis

    def __hash__(self):
        return hash(tuple(self.basis.items()))

    def __repr__(self):
        dims = ", ".join(f"{d}:{len(n)}" for d, n in self.basis.items())
        return f"GradedVectorSpace({{{dims}}})"


class GradedMap:
    """Linear map of fixed degree ``shift``, stored as sparse columns."""

    def __init__(self, source: GradedVectorSpace, target: GradedVectorSpace, shift: int,
                 columns: Mapping[int, Mapping] | None = None):
        self.source = source
        self.target = target
        self.shift = shift
        self.columns = {}
        for k, col in (columns or {}).items():
            col = vec(col)
            if not col:
                continue
            d = source.degrees[k] + shift
            if any(target.degrees[j] != d for j in col):
                raise MalformedInputError(
                    f"column {source.names[k]!r} does not land in degree {d}")
            self.columns[k] = col

    @classmethod
    def identity(cls, space):
        return cls(space, space, 0, {k: {k: ONE} for k in range(space.dim())})

    @classmethod
    def zero(cls, source, target, shift=0):
        return cls(source, target, shift, {})

    @classmethod
    def from_blocks(cls, source, target, shift, blocks: Mapping[int, Sequence[Sequence]]):
        """blocks[d] is a dense matrix (rows: target degree d+shift, cols: source degree d)."""
        cols = {}
        for d, M in blocks.items():
            rows_expected, cols_expected = target.dim(d + shift), source.dim(d)
            if len(M) != rows_expected or any(len(r) != cols_expected for r in M):
                raise MalformedInputError(f"block for degree {d} has wrong shape")
            for j, k in enumerate(source.indices(d)):
                cols[k] = target.from_dense([M[i][j] for i in range(rows_expected)], d + shift)
        return cls(source, target, shift, cols)

    def __call__(self, v: Mapping) -> dict:
        out = {}
        for k, c in v.items():
            col = self.columns.get(k)
            if col:
                vaxpy(out, col, c)
        return out

    apply = __call__

    def block(self, degree) -> list[list[Fraction]]:
        rows = self.target.dim(degree + self.shift)
        M = [[ZERO] * self.source.dim(degree) for _ in range(rows)]
        off = self.target._offset.get(degree + self.shift, 0)
        for j, k in enumerate(self.source.indices(degree)):
            for i, c in self.columns.get(k, {}).items():
                M[i - off][j] = c
        return M

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self ∘ other."""
        return GradedMap(other.source, self.target, self.shift + other.shift,
                         {k: self(col) for k, col in other.columns.items()})

    __matmul__ = compose

    def __add__(self, other):
        self._check_parallel(other)
        cols = {k: dict(c) for k, c in self.columns.items()}
        for k, c in other.columns.items():
            vaxpy(cols.setdefault(k, {}), c)
        return GradedMap(self.source, self.target, self.shift, cols)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return GradedMap(self.source, self.target, self.shift,
                         {k: vscale(col, c) for k, col in self.columns.items()})

    def _check_parallel(self, other):
        if (self.source, self.target, self.shift) != (other.source, other.target, other.shift):
            raise MalformedInputError("maps are not parallel")

    def is_zero(self) -> bool:
        return not self.columns

    def __eq__(self, other):
        return (isinstance(other, GradedMap)
                and (self.source, self.target, self.shift) == (other.source, other.target, other.shift)
                and self.columns == other.columns)

    def __repr__(self):
        return f"GradedMap(shift={self.shift}, nnz_columns={len(self.columns)})"


class MultilinearMap:
    """Sparse n-linear map ``source^{⊗n} → target`` of degree ``shift``.

    ``entries`` maps tuples of source basis indices to target vectors;
    absent tuples map to zero.
    """

    def __init__(self, source, target, arity: int, shift: int, entries=None, check=True):
        if arity < 1:
            raise MalformedInputError("arity must be >= 1")
        self.source = source
        self.target = target
        self.arity = arity
        self.shift = shift
        self.entries: dict[tuple, dict] = {}
        for key, v in (entries or {}).items():
            key = tuple(key)
            if not v:
                continue
            if check:
                if len(key) != arity:
                    raise MalformedInputError(f"entry {key} has wrong arity")
                d = sum(source.degrees[k] for k in key) + shift
                if any(target.degrees[j] != d for j in v):
                    raise MalformedInputError(
                        f"entry {tuple(source.names[k] for k in key)} does not land in degree {d}")
            self.entries[key] = v

    @classmethod
    def from_graded_map(cls, f: GradedMap):
        return cls(f.source, f.target, 1, f.shift, {(k,): c for k, c in f.columns.items()},
                   check=False)

    def to_graded_map(self) -> GradedMap:
        if self.arity != 1:
            raise MalformedInputError("only arity-1 maps convert to GradedMap")
        return GradedMap(self.source, self.target, self.shift,
                         {key[0]: v for key, v in self.entries.items()})

    def on_basis(self, key) -> dict:
        return self.entries.get(tuple(key), {})

    def on_tensor(self, tensor: Mapping[tuple, Fraction]) -> dict:
        out = {}
        for key, c in tensor.items():
            v = self.entries.get(key)
            if v:
                vaxpy(out, v, c)
        return out

    def __call__(self, *vectors) -> dict:
        if len(vectors) != self.arity:
            raise MalformedInputError("wrong number of arguments")
        return self.on_tensor(tensor_product(vectors))

    def is_zero(self) -> bool:
        return not self.entries

    def nonzero_keys(self):
        return sorted(self.entries)

    def __sub__(self, other):
        entries = {k: dict(v) for k, v in self.entries.items()}
        for k, v in other.entries.items():
            vaxpy(entries.setdefault(k, {}), v, -ONE)
        return MultilinearMap(self.source, self.target, self.arity, self.shift,
                              {k: v for k, v in entries.items() if v}, check=False)

    def __eq__(self, other):
        return (isinstance(other, MultilinearMap) and self.arity == other.arity
                and self.shift == other.shift and self.entries == other.entries)

    def __repr__(self):
        return f"MultilinearMap(arity={self.arity}, shift={self.shift}, nnz={len(self.entries)})"


def tensor_product(vectors: Sequence[Mapping]) -> dict:
    """Expand v_1 ⊗ ... ⊗ v_n into a sparse tensor {index tuple: coeff}."""
    out = {(): ONE}
    for v in vectors:
        nxt = {}
        for key, c in out.items():
            for k, x in v.items():
                nxt[key + (k,)] = c * x
        out = nxt
    return {k: c for k, c in out.items() if c}


# --------------------------------------------------------------------------
# solving

class Preimage:
    """Cached solver for ``f(x) = b`` in one source degree.

    Row-reduces the block once while recording the row operations, so each
    subsequent solve is a matrix-vector product.
    """

    def __init__(self, f: GradedMap, source_degree: int):
        self.f = f
        self.degree = source_degree
        self.ncols = n = f.source.dim(source_degree)
        tdeg = source_degree + f.shift
        self.nrows = m = f.target.dim(tdeg)
        toff = f.target.offset(tdeg) if m else 0
        rows = [{} for _ in range(m)]
        for j, k in enumerate(f.source.indices(source_degree)):
            for t, c in f.columns.get(k, {}).items():
                rows[t - toff][j] = c
        for i in range(m):
            rows[i][n + i] = ONE
        R, pivots = sparse_rref(rows, n + m) if m else ([], [])
        self._toff = toff
        self._soff = f.source.offset(source_degree) if n else 0
        tail = lambda r: {j - n: x for j, x in r.items() if j >= n}  # noqa: E731
        self.solution_rows = [(p, tail(r)) for r, p in zip(R, pivots) if p < n]
        self.constraints = [tail(r) for r, p in zip(R, pivots) if p >= n]

    def solve(self, b: Mapping):
        tdeg = self.degree + self.f.shift
        local = {}
        for k, c in b.items():
            if self.f.target.degrees[k] != tdeg:
                raise MalformedInputError(f"vector has a component outside degree {tdeg}")
            local[k - self._toff] = c
        for row in self.constraints:
            if sum((x * local[j] for j, x in row.items() if j in local), ZERO):
                return None
        sol = {}
        for p, row in self.solution_rows:
            v = sum((x * local[j] for j, x in row.items() if j in local), ZERO)
            if v:
                sol[self._soff + p] = v
        return sol


def solve(f: GradedMap, target_vector: Mapping):
    """Some x with f(x) = target_vector, or None.  Deterministic."""
    for k in target_vector:
        if not 0 <= k < f.target.dim():
            raise MalformedInputError(f"index {k} is outside the target space")
    tdeg = f.target.degree_of(target_vector)
    if tdeg is None:
        return {}
    sdeg = tdeg - f.shift
    if f.source.dim(sdeg) == 0:
        return None
    return Preimage(f, sdeg).solve(target_vector)


def kernel_basis(f: GradedMap, degree) -> list[dict]:
    """Reduced-echelon basis of ker f in the given source degree."""
    n = f.source.dim(degree)
    if n == 0:
        return []
    M = f.block(degree)
    R, pivots = rref(M, n) if M else ([], [])
    basis = []
    for free in (j for j in range(n) if j not in pivots):
        x = [ZERO] * n
        x[free] = ONE
        for row, p in zip(R, pivots):
            x[p] = -row[free]
        basis.append(x)
    E, _ = rref(basis, n)
    return [f.source.from_dense(row, degree) for row in E]


def image_basis(f: GradedMap, degree) -> list[dict]:
    """Reduced-echelon basis of f(source_degree) inside target degree + shift."""
    tdeg = degree + f.shift
    m = f.target.dim(tdeg)
    cols = [f.target.to_dense(f.columns.get(k, {}), tdeg) for k in f.source.indices(degree)]
    if not cols or m == 0:
        return []
    R, _ = rref(cols, m)
    return [f.target.from_dense(row, tdeg) for row in R]


# --------------------------------------------------------------------------
# complexes and contractions

@dataclass(frozen=True, eq=False)
class ChainComplex:
    space: GradedVectorSpace
    d: GradedMap

    def __post_init__(self):
        if self.d.source != self.space or self.d.target != self.space or self.d.shift != 1:
            raise MalformedInputError("differential must be a degree +1 endomorphism")

    def check(self):
        dd = self.d.compose(self.d)
        for k in sorted(dd.columns):
            raise InvalidComplexError(self.space.degrees[k], self.space.names[k])

    @classmethod
    def zero(cls, space):
        return cls(space, GradedMap.zero(space, space, 1))


@dataclass(frozen=True, eq=False)
class ContractionData:
    """Deformation retract (i, p, h) of ``complex`` onto ``H`` (zero differential)."""

    complex: ChainComplex
    H: GradedVectorSpace
    i: GradedMap
    p: GradedMap
    h: GradedMap

    @property
    def d(self):
        return self.complex.d

    def identities(self) -> dict[str, bool]:
        A = self.complex.space
        idA, idH = GradedMap.identity(A), GradedMap.identity(self.H)
        d, i, p, h = self.d, self.i, self.p, self.h
        return {
            "p∘i = id": (p @ i) == idH,
            "id - i∘p = d∘h + h∘d": (idA - i @ p) == (d @ h) + (h @ d),
            "h∘i = 0": (h @ i).is_zero(),
            "p∘h = 0": (p @ h).is_zero(),
            "h∘h = 0": (h @ h).is_zero(),
        }

    def class_of(self, cocycle: Mapping) -> dict:
        return self.p(cocycle)

    def representative(self, cls: Mapping) -> dict:
        return self.i(cls)

    @property
    def betti(self) -> dict[int, int]:
        return {d: self.H.dim(d) for d in self.complex.space.support if self.H.dim(d)}


def _class_name(space, rep):
    if len(rep) == 1:
        (k, c), = rep.items()
        if c == 1:
            return f"[{space.names[k]}]"
    return None


def cohomology(complex: ChainComplex) -> ContractionData:
    """Cohomology with explicit contraction data.

    Per degree n, the space splits as B ⊕ R ⊕ L: B the coboundaries, R the
    chosen echelon cocycle representatives, L unit vectors on the non-pivot
    columns of the cocycle echelon form.  d maps L^{n-1} isomorphically onto
    B^n; h inverts it on B and vanishes on R ⊕ L.
    """
    complex.check()
    A, d = complex.space, complex.d
    support = A.support

    reps: dict[int, list[dict]] = {}
    decomp = {}
    for n in support:
        Z = kernel_basis(d, n)
        B = image_basis(d, n - 1) if A.dim(n - 1) else []
        E = EchelonBasis()
        for b in B:
            E.add(b)
        R = []
        for z in Z:
            r = E.add(z)
            if r is not None:
                R.append(r)
        zpiv = {min(z) for z in Z}
        L = [{k: ONE} for k in A.indices(n) if k not in zpiv]
        decomp[n] = (B, R, L)
        reps[n] = R

    hbasis = {}
    for n in support:
        names = []
        for j, r in enumerate(reps[n]):
            nm = _class_name(A, r)
            names.append(nm if nm and nm not in names else f"[h{n}.{j}]")
        if names:
            hbasis[n] = names
    H = GradedVectorSpace(hbasis)

    i_cols, p_cols, h_cols = {}, {}, {}
    for n in support:
        B, R, L = decomp[n]
        for j, r in enumerate(R):
            i_cols[H.offset(n) + j] = r
        basis = B + R + L
        dim = A.dim(n)
        assert len(basis) == dim
        M = [[ZERO] * dim for _ in range(dim)]
        for j, v in enumerate(basis):
            for k, c in v.items():
                M[k - A.offset(n)][j] = c
        Minv = invert(M)
        # sections s(b) ∈ L^{n-1} with d s(b) = b
        sections = []
        if B:
            Lprev = decomp[n - 1][2]
            dL = GradedMap(A, A, 1, {next(iter(l)): d.columns.get(next(iter(l)), {}) for l in Lprev})
            pre = Preimage(dL, n - 1)
            for b in B:
                s = pre.solve(b)
                if s is None:
                    raise AssertionError("coboundary without preimage on the complement")
                sections.append(s)
        for col, k in enumerate(A.indices(n)):
            coords = [Minv[row][col] for row in range(dim)]
            pv = {H.offset(n) + j: coords[len(B) + j] for j in range(len(R)) if coords[len(B) + j]}
            if pv:
                p_cols[k] = pv
            hv = {}
            for j, s in enumerate(sections):
                if coords[j]:
                    vaxpy(hv, s, coords[j])
            if hv:
                h_cols[k] = hv
    return ContractionData(complex, H,
                           GradedMap(H, A, 0, i_cols),
                           GradedMap(A, H, 0, p_cols),
                           GradedMap(A, A, -1, h_cols))


def induced_map(f: GradedMap, source: ContractionData, target: ContractionData) -> GradedMap:
    """The map H(f) = p_target ∘ f ∘ i_source on cohomology."""
    return target.p @ f @ source.i


def is_chain_map(f: GradedMap, source: ChainComplex, target: ChainComplex) -> bool:
    return f.shift == 0 and (f @ source.d) == (target.d @ f)


def is_quasi_isomorphic_map(f: GradedMap, source: ChainComplex, target: ChainComplex,
                            cs: ContractionData | None = None,
                            ct: ContractionData | None = None) -> bool:
    """True iff the chain map f induces isomorphisms on cohomology in every degree."""
    cs = cs or cohomology(source)
    ct = ct or cohomology(target)
    Hf = induced_map(f, cs, ct)
    for n in sorted(set(cs.H.support) | set(ct.H.support)):
        a, b = cs.H.dim(n), ct.H.dim(n)
        if a != b:
            return False
        if a and rank(Hf.block(n), a) != a:
            return False
    return True


def degree_tuples(space: GradedVectorSpace, n: int, lo, hi):
    """All basis-index n-tuples whose degree sum lies in [lo, hi]."""
    degs = space.support
    if not degs or n == 0:
        return
    dmin, dmax = min(degs), max(degs)

    def rec(prefix_degs, total):
        k = len(prefix_degs)
        if k == n:
            if lo <= total <= hi:
                yield tuple(prefix_degs)
            return
        rest = n - k - 1
        for d in degs:
            t = total + d
            if t + rest * dmin > hi or t + rest * dmax < lo:
                continue
            prefix_degs.append(d)
            yield from rec(prefix_degs, t)
            prefix_degs.pop()

    for ds in rec([], 0):
        yield from itertools.product(*(space.indices(d) for d in ds))


def tuples_landing_in(source: GradedVectorSpace, n: int, shift: int, target: GradedVectorSpace):
    """n-tuples of source basis indices whose degree sum + shift lies in target's support."""
    tsup = set(target.support)
    if not tsup or not source.support:
        return
    lo, hi = min(tsup) - shift, max(tsup) - shift
    for key in degree_tuples(source, n, lo, hi):
        if sum(source.degrees[k] for k in key) + shift in tsup:
            yield key
