"""Exact integer and rational linear algebra over the ambient lattice.

Vectors are tuples of Python ints (or Fractions where noted); matrices are
sequences of row tuples.  Everything is arbitrary precision and the results
are deterministic, so they can be used as dictionary keys and golden values.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import DimensionMismatch, TropintError


class _Infinite:
    """Sentinel returned by lattice_index for non-finite indices."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"


INFINITE = _Infinite()


def dot(a, b):
    if len(a) != len(b):
        raise DimensionMismatch(f"dot of lengths {len(a)} and {len(b)}")
    return sum(x * y for x, y in zip(a, b))


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vscale(s, a):
    return tuple(s * x for x in a)


def vneg(a):
    return tuple(-x for x in a)


def is_zero_vector(a):
    return all(x == 0 for x in a)


def vgcd(v):
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return g


def primitive(v):
    """The primitive integer vector spanning the same ray as v.

    Divides by the (positive) gcd of the entries; the direction is preserved.
    """
    g = vgcd(v)
    if g == 0:
        raise TropintError("primitive() of the zero vector")
    return tuple(x // g for x in v)


def clear_denominators(v):
    """Scale a rational vector to the primitive integer vector on its ray."""
    from math import lcm

    denom = 1
    for x in v:
        denom = lcm(denom, Fraction(x).denominator)
    ints = tuple(int(x * denom) for x in v)
    return primitive(ints)


def mat_mul(A, B):
    cols = list(zip(*B))
    return tuple(tuple(dot(row, col) for col in cols) for row in A)


def mat_vec(A, v):
    return tuple(dot(row, v) for row in A)


def identity_matrix(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(A):
    return tuple(zip(*A))


def matrix_rank(rows):
    """Rank of a matrix with integer or Fraction entries, by exact elimination.

    Integer input uses fraction-free elimination with gcd reduction; anything
    else falls back to Fraction arithmetic.
    """
    if not rows:
        return 0
    if all(isinstance(x, int) for row in rows for x in row):
        work = [list(row) for row in rows]
        rank = 0
        ncols = len(work[0])
        col = 0
        while rank < len(work) and col < ncols:
            pivot = next((r for r in range(rank, len(work)) if work[r][col] != 0), None)
            if pivot is None:
                col += 1
                continue
            work[rank], work[pivot] = work[pivot], work[rank]
            pr = work[rank]
            for r in range(rank + 1, len(work)):
                v = work[r][col]
                if v != 0:
                    p = pr[col]
                    g = gcd(abs(v), abs(p))
                    a, b = p // g, v // g
                    new = [a * x - b * y for x, y in zip(work[r], pr)]
                    gr = 0
                    for x in new:
                        gr = gcd(gr, abs(x))
                        if gr == 1:
                            break
                    work[r] = [x // gr for x in new] if gr > 1 else new
            rank += 1
            col += 1
        return rank
    work = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    ncols = len(work[0]) if work else 0
    col = 0
    while rank < len(work) and col < ncols:
        pivot = next((r for r in range(rank, len(work)) if work[r][col] != 0), None)
        if pivot is None:
            col += 1
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        pr = work[rank]
        for r in range(rank + 1, len(work)):
            if work[r][col] != 0:
                factor = work[r][col] / pr[col]
                work[r] = [a - factor * b for a, b in zip(work[r], pr)]
        rank += 1
        col += 1
    return rank


@dataclass(frozen=True)
class SnfDecomposition:
    """Smith normal form U*A*V = S with unimodular U, V.

    The diagonal of S is nonnegative and each entry divides the next.
    """

    U: tuple
    S: tuple
    V: tuple

    @property
    def diagonal(self):
        return tuple(
            self.S[i][i] for i in range(min(len(self.S), len(self.S[0]) if self.S else 0))
        )

    @property
    def rank(self):
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(A):
    """Smith normal form of an integer matrix by elementary operations.

    Pivots are chosen with minimal absolute value to limit coefficient
    growth; fine for the matrix sizes fans produce (n up to ~25).
    """
    m = len(A)
    if m == 0:
        return SnfDecomposition(U=(), S=(), V=())
    n = len(A[0])
    S = [list(row) for row in A]
    for row in A:
        if len(row) != n:
            raise TropintError("smith_normal_form: ragged matrix")
    U = [list(row) for row in identity_matrix(m)]
    V = [list(row) for row in identity_matrix(n)]

    def row_op(i, j, q):
        # row_i -= q * row_j
        S[i] = [a - q * b for a, b in zip(S[i], S[j])]
        U[i] = [a - q * b for a, b in zip(U[i], U[j])]

    def col_op(i, j, q):
        # col_i -= q * col_j
        for row in S:
            row[i] -= q * row[j]
        for row in V:
            row[i] -= q * row[j]

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(m, n):
        # move the nonzero entry of smallest magnitude into the pivot slot
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if S[i][j] != 0 and (best is None or abs(S[i][j]) < abs(S[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        while True:
            i, j = best
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            # reduce column t then row t against the pivot
            dirty = False
            for i in range(t + 1, m):
                if S[i][t] != 0:
                    q = S[i][t] // S[t][t]
                    row_op(i, t, q)
                    if S[i][t] != 0:
                        dirty = True
            for j in range(t + 1, n):
                if S[t][j] != 0:
                    q = S[t][j] // S[t][t]
                    col_op(j, t, q)
                    if S[t][j] != 0:
                        dirty = True
            if not dirty:
                # pivot must divide every remaining entry for the chain
                offender = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if S[i][j] % S[t][t] != 0:
                            offender = i
                            break
                    if offender is not None:
                        break
                if offender is None:
                    break
                # folding the offending row into row t creates a smaller pivot
                row_op(t, offender, -1)
            best = min(
                ((i, j) for i in range(t, m) for j in range(t, n) if S[i][j] != 0),
                key=lambda ij: abs(S[ij[0]][ij[1]]),
            )
        if S[t][t] < 0:
            S[t] = [-a for a in S[t]]
            U[t] = [-a for a in U[t]]
        t += 1

    return SnfDecomposition(
        U=tuple(tuple(r) for r in U),
        S=tuple(tuple(r) for r in S),
        V=tuple(tuple(r) for r in V),
    )


def lattice_index(generators, ambient_dim):
    """Index in Z^n of the subgroup generated by the given vectors.

    Returns INFINITE when the generators do not span R^n; otherwise the
    product of the Smith diagonal entries.
    """
    gens = [tuple(g) for g in generators]
    for g in gens:
        if len(g) != ambient_dim:
            raise DimensionMismatch("lattice_index: generator of wrong length")
    if not gens:
        return INFINITE if ambient_dim > 0 else 1
    snf = smith_normal_form(tuple(gens))
    diag = snf.diagonal
    if len(diag) < ambient_dim or any(d == 0 for d in diag):
        return INFINITE
    index = 1
    for d in diag:
        index *= d
    return index


def integer_kernel(A):
    """A basis of the saturated lattice ker(A) in Z^cols.

    The basis vectors are columns of the SNF transform V, hence part of a
    basis of Z^cols: the kernel lattice they span is saturated.
    """
    m = len(A)
    if m == 0:
        return []
    n = len(A[0])
    snf = smith_normal_form(A)
    diag = snf.diagonal
    basis = []
    for j in range(n):
        if j >= len(diag) or diag[j] == 0:
            basis.append(tuple(snf.V[i][j] for i in range(n)))
    return basis


def hnf_rows(vectors):
    """Canonical (row-style Hermite) basis of the lattice spanned by the rows.

    Pivots positive, entries above each pivot reduced into [0, pivot).
    Zero input rows are dropped; the result is empty for an empty span.
    """
    rows = [list(v) for v in vectors if not is_zero_vector(v)]
    if not rows:
        return []
    n = len(rows[0])
    done = []
    col = 0
    while rows and col < n:
        live = [r for r in rows if r[col] != 0]
        if not live:
            col += 1
            continue
        while True:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            for r in live[1:]:
                q = r[col] // piv[col]
                for k in range(n):
                    r[k] -= q * piv[k]
            live = [r for r in live if r[col] != 0]
            if len(live) <= 1:
                break
        piv = live[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        done.append(piv)
        rest = [r for r in rows if r[col] == 0 and any(r)]
        rows = rest
        col += 1
    # reduce entries above pivots
    for i in reversed(range(len(done))):
        pcol = next(k for k in range(n) if done[i][k] != 0)
        for j in range(i):
            q = done[j][pcol] // done[i][pcol]
            if q:
                done[j] = [a - q * b for a, b in zip(done[j], done[i])]
    return [tuple(r) for r in done]


def saturation_basis(vectors, ambient_dim):
    """Canonical basis of (span of the vectors) intersected with Z^n.

    Computed as the kernel of the kernel: both steps produce saturated
    lattices, and a final Hermite pass makes the basis canonical.
    """
    vecs = [tuple(v) for v in vectors if not is_zero_vector(tuple(v))]
    if not vecs:
        return []
    rows = tuple(vecs)
    ortho = integer_kernel(rows)
    if not ortho:
        return [tuple(r) for r in identity_matrix(ambient_dim)]
    sat = integer_kernel(tuple(ortho))
    return hnf_rows(sat)


def invert_unimodular(M):
    """Exact inverse of a unimodular integer matrix (fails loudly otherwise)."""
    n = len(M)
    work = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
            for i, row in enumerate(M)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col] != 0), None)
        if pivot is None:
            raise TropintError("invert_unimodular: singular matrix")
        work[col], work[pivot] = work[pivot], work[col]
        pv = work[col][col]
        work[col] = [x / pv for x in work[col]]
        for r in range(n):
            if r != col and work[r][col] != 0:
                f = work[r][col]
                work[r] = [a - f * b for a, b in zip(work[r], work[col])]
    inv = []
    for row in work:
        entries = row[n:]
        if any(x.denominator != 1 for x in entries):
            raise TropintError("invert_unimodular: matrix is not unimodular")
        inv.append(tuple(int(x) for x in entries))
    return tuple(inv)


def solve_integer(A, b):
    """One integer solution x of A x = b, or None when none exists."""
    m = len(A)
    if m == 0:
        return ()
    n = len(A[0])
    snf = smith_normal_form(A)
    c = mat_vec(snf.U, b)
    diag = snf.diagonal
    y = [0] * n
    for i in range(m):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d != 0:
                return None
            y[i] = c[i] // d
    return mat_vec(snf.V, tuple(y))


def solve_rational(rows, target):
    """Coefficients expressing target as a combination of the rows, or None.

    Returns a tuple of Fractions c with sum(c_i * rows_i) == target.
    """
    if not rows:
        return () if is_zero_vector(target) else None
    n = len(rows[0])
    aug = [[Fraction(rows[i][j]) for i in range(len(rows))] + [Fraction(target[j])]
           for j in range(n)]
    ncols = len(rows)
    pivots = []
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, n) if aug[r][col] != 0), None)
        if pivot is None:
            continue
        aug[rank], aug[pivot] = aug[pivot], aug[rank]
        pv = aug[rank][col]
        aug[rank] = [x / pv for x in aug[rank]]
        for r in range(n):
            if r != rank and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[rank])]
        pivots.append(col)
        rank += 1
    for r in range(rank, n):
        if aug[r][ncols] != 0:
            return None
    coeffs = [Fraction(0)] * ncols
    for r, col in enumerate(pivots):
        coeffs[col] = aug[r][ncols]
    return tuple(coeffs)


class QuotientLattice:
    """Coordinates for N / N_tau fixed by a saturated basis extension.

    Built from generators of tau: the saturation of their span is extended
    to a basis of Z^n via SNF, and the complementary coordinates give a
    deterministic projection Z^n -> Z^(n-r) with kernel exactly span(tau).
    """

    def __init__(self, tau_generators, ambient_dim):
        self.ambient_dim = ambient_dim
        sat = saturation_basis(tau_generators, ambient_dim)
        self.sat_basis = tuple(sat)
        self.rank = len(sat)
        self.quotient_rank = ambient_dim - self.rank
        if self.rank == 0:
            self.proj_rows = identity_matrix(ambient_dim)
            self._U = None
            self._Uinv = None
            return
        # columns of the saturated basis; SNF has unit diagonal
        C = tuple(tuple(sat[j][i] for j in range(self.rank)) for i in range(ambient_dim))
        snf = smith_normal_form(C)
        if any(d != 1 for d in snf.diagonal):
            raise TropintError("QuotientLattice: saturation basis not unimodularly extendable")
        self.proj_rows = tuple(snf.U[self.rank:])
        self._Uinv = None  # computed on demand for lifts
        self._U = snf.U

    def project(self, v):
        return tuple(dot(row, v) for row in self.proj_rows)

    def lift(self, w):
        """Some lattice point projecting to w."""
        if self.rank == 0:
            return tuple(w)
        if self._Uinv is None:
            self._Uinv = invert_unimodular(self._U)
        n = self.ambient_dim
        full = (0,) * self.rank + tuple(w)
        return tuple(dot(self._Uinv[i], full) for i in range(n))
