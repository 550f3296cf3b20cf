"""Exact polynomial-matrix algebra over the rationals.

Dense matrices with `Poly` entries.  Everything here is exact: unimodular
row/column echelon reductions (with the transform *and* its inverse
accumulated, so matrix inversion of unimodular factors is free),
fraction-free Bareiss determinants, syzygy bases, right-divisibility,
normal rank, the max-degree-of-full-size-minors functional used for
properness tests, and constant-rank tests over a region of the complex
plane.

Conventions:
  * row echelon:     U @ M == stack(E, zero rows),  U unimodular
  * column echelon:  M @ V == [E  0],               V unimodular
  * a syzygy basis for M is the last (rows - rank) rows of the row
    echelon transform; being rows of a unimodular matrix they have full
    row rank at every complex point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numeric import AXIS, DEFAULT_TOL, OPEN_RHP, Tolerance, region_of
from .numeric import roots as numeric_roots
from .poly import NEG_INF, Poly


class PolyMat:
    """Rectangular matrix of Poly entries.  Zero-dimension matrices are
    allowed (pass `cols=` when there are no rows to pin the width); they show
    up as empty selectors and as spectral factors of identically-zero
    densities."""

    __slots__ = ("entries", "rows", "cols")

    def __init__(self, entries, *, cols: int | None = None):
        rows = tuple(tuple(Poly.of(e) for e in row) for row in entries)
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged rows")
            if cols is not None and cols != width:
                raise ValueError("cols= disagrees with row width")
        else:
            if cols is None:
                raise ValueError("PolyMat with no rows needs explicit cols=")
            width = cols
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", width)

    def __setattr__(self, *a):
        raise AttributeError("PolyMat is immutable")

    # -- constructors --------------------------------------------------------

    @staticmethod
    def identity(n: int) -> "PolyMat":
        return PolyMat([[Poly.one() if i == j else Poly.zero() for j in range(n)]
                        for i in range(n)], cols=n)

    @staticmethod
    def zeros(r: int, c: int) -> "PolyMat":
        return PolyMat([[Poly.zero()] * c for _ in range(r)], cols=c)

    @staticmethod
    def constant(grid) -> "PolyMat":
        """Constant matrix from a grid of numbers/Fractions."""
        return PolyMat([[Poly.constant(v) for v in row] for row in grid])

    @staticmethod
    def scalar(p) -> "PolyMat":
        return PolyMat([[Poly.of(p)]])

    # -- queries --------------------------------------------------------------

    def __getitem__(self, ij) -> Poly:
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other) -> bool:
        return (isinstance(other, PolyMat) and self.cols == other.cols
                and self.entries == other.entries)

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        body = "; ".join(", ".join(repr(e) for e in row) for row in self.entries)
        return f"PolyMat[{body}]"

    @property
    def is_zero(self) -> bool:
        return all(e.is_zero for row in self.entries for e in row)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def max_degree(self):
        return max((e.degree for row in self.entries for e in row), default=NEG_INF)

    # -- shape manipulation -----------------------------------------------------

    def transpose(self) -> "PolyMat":
        return PolyMat([[self.entries[i][j] for i in range(self.rows)]
                        for j in range(self.cols)], cols=self.rows)

    @property
    def T(self) -> "PolyMat":
        return self.transpose()

    def star(self) -> "PolyMat":
        """Para-Hermitian adjoint M*(s) = M(-s)^T."""
        return PolyMat([[self.entries[i][j].star() for i in range(self.rows)]
                        for j in range(self.cols)], cols=self.rows)

    def submatrix(self, row_idx, col_idx) -> "PolyMat":
        col_idx = list(col_idx)
        return PolyMat([[self.entries[i][j] for j in col_idx] for i in row_idx],
                       cols=len(col_idx))

    def select_columns(self, col_idx) -> "PolyMat":
        return self.submatrix(range(self.rows), col_idx)

    def hstack(self, other: "PolyMat") -> "PolyMat":
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return PolyMat([list(a) + list(b) for a, b in zip(self.entries, other.entries)],
                       cols=self.cols + other.cols)

    def vstack(self, other: "PolyMat") -> "PolyMat":
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return PolyMat(list(self.entries) + list(other.entries), cols=self.cols)

    @staticmethod
    def block(grid) -> "PolyMat":
        """Assemble from a 2-D grid of PolyMat blocks."""
        rows = []
        for block_row in grid:
            acc = block_row[0]
            for blk in block_row[1:]:
                acc = acc.hstack(blk)
            rows.append(acc)
        out = rows[0]
        for r in rows[1:]:
            out = out.vstack(r)
        return out

    # -- arithmetic ---------------------------------------------------------------

    def __add__(self, other: "PolyMat") -> "PolyMat":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return PolyMat([[a + b for a, b in zip(ra, rb)]
                        for ra, rb in zip(self.entries, other.entries)],
                       cols=self.cols)

    def __sub__(self, other: "PolyMat") -> "PolyMat":
        return self + (-other)

    def __neg__(self) -> "PolyMat":
        return PolyMat([[-e for e in row] for row in self.entries], cols=self.cols)

    def __mul__(self, scalar) -> "PolyMat":
        return PolyMat([[e * scalar for e in row] for row in self.entries],
                       cols=self.cols)

    __rmul__ = __mul__

    def __matmul__(self, other: "PolyMat") -> "PolyMat":
        if self.cols != other.rows:
            raise ValueError("inner dimension mismatch")
        ot = other.transpose().entries
        out = []
        for row in self.entries:
            out_row = []
            for col in ot:
                acc = Poly.zero()
                for a, b in zip(row, col):
                    if not (a.is_zero or b.is_zero):
                        acc = acc + a * b
                out_row.append(acc)
            out.append(out_row)
        return PolyMat(out, cols=other.cols)

    # -- evaluation -----------------------------------------------------------------

    def eval_complex(self, z: complex) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=complex)
        for i, row in enumerate(self.entries):
            for j, e in enumerate(row):
                out[i, j] = e.eval_complex(z)
        return out

    def eval_fraction(self, t) -> list[list[Fraction]]:
        return [[e(t) for e in row] for row in self.entries]

    # -- determinants ------------------------------------------------------------------

    def det(self) -> Poly:
        """Exact determinant: cofactor expansion for small sizes, fraction-free
        Bareiss elimination (exact divisions) above that."""
        if not self.is_square:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        if n == 0:
            return Poly.one()
        if n == 1:
            return self.entries[0][0]
        if n == 2:
            a, b = self.entries[0]
            c, d = self.entries[1]
            return a * d - b * c
        if n == 3:
            return self._det_cofactor()
        return self._det_bareiss()

    def _det_cofactor(self) -> Poly:
        n = self.rows
        if n == 1:
            return self.entries[0][0]
        acc = Poly.zero()
        cols = list(range(n))
        for j in range(n):
            a = self.entries[0][j]
            if a.is_zero:
                continue
            minor = self.submatrix(range(1, n), cols[:j] + cols[j + 1:])
            term = a * minor._det_cofactor()
            acc = acc + term if j % 2 == 0 else acc - term
        return acc

    def _det_bareiss(self) -> Poly:
        n = self.rows
        m = [list(row) for row in self.entries]
        prev = Poly.one()
        sign = 1
        for k in range(n - 1):
            # smallest-degree nonzero pivot limits coefficient growth
            piv = None
            for i in range(k, n):
                if not m[i][k].is_zero:
                    if piv is None or m[i][k].degree < m[piv][k].degree:
                        piv = i
            if piv is None:
                return Poly.zero()
            if piv != k:
                m[k], m[piv] = m[piv], m[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    num = m[k][k] * m[i][j] - m[i][k] * m[k][j]
                    m[i][j] = num // prev  # exact in the Bareiss scheme
                m[i][k] = Poly.zero()
            prev = m[k][k]
        d = m[n - 1][n - 1]
        return d if sign == 1 else -d

    def adjugate(self) -> "PolyMat":
        """Transpose of the cofactor matrix; A @ adj(A) == det(A) * I."""
        if not self.is_square:
            raise ValueError("adjugate of non-square matrix")
        n = self.rows
        if n == 1:
            return PolyMat.identity(1)
        idx = list(range(n))
        out = [[Poly.zero()] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = self.submatrix([r for r in idx if r != i],
                                       [c for c in idx if c != j])
                cof = minor.det()
                out[j][i] = cof if (i + j) % 2 == 0 else -cof
        return PolyMat(out)


# -- rank over the rational function field ------------------------------------------


def normalrank(M: PolyMat) -> int:
    """Rank of M over Q(s), by fraction-free forward elimination."""
    a = [list(row) for row in M.entries]
    r, c = M.rows, M.cols
    rank = 0
    row = 0
    for col in range(c):
        piv = None
        for i in range(row, r):
            if not a[i][col].is_zero:
                if piv is None or a[i][col].degree < a[piv][col].degree:
                    piv = i
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        p = a[row][col]
        for i in range(row + 1, r):
            e = a[i][col]
            if e.is_zero:
                continue
            a[i] = [p * a[i][j] - e * a[row][j] for j in range(c)]
        rank += 1
        row += 1
        if row == r:
            break
    return rank


# -- unimodular echelon reductions ------------------------------------------------------


@dataclass(frozen=True)
class EchelonResult:
    """U @ M == stack(E, zeros) for row forms; M @ U == [E  0] for column forms.
    Uinv is the exact inverse of U, accumulated during the reduction."""
    U: PolyMat
    Uinv: PolyMat
    E: PolyMat | None
    rank: int


def row_echelon(M: PolyMat) -> EchelonResult:
    """Upper (Hermite-style) row echelon form via exact Euclidean column sweeps.

    Pivots are minimal-degree entries (ties: lowest row index), pivots are made
    monic, and entries above each pivot are reduced modulo the pivot.
    """
    l, c = M.rows, M.cols
    a = [list(row) for row in M.entries]
    u = [[Poly.one() if i == j else Poly.zero() for j in range(l)] for i in range(l)]
    uinv = [[Poly.one() if i == j else Poly.zero() for j in range(l)] for i in range(l)]

    def swap(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]
        for row in uinv:
            row[i], row[j] = row[j], row[i]

    def addmul(i, j, q: Poly):
        # row_i -= q * row_j; inverse op: column_j of Uinv += q * column_i
        if q.is_zero:
            return
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]
        for row in uinv:
            row[j] = row[j] + q * row[i]

    def scale(i, s: Fraction):
        a[i] = [x * s for x in a[i]]
        u[i] = [x * s for x in u[i]]
        sinv = 1 / s
        for row in uinv:
            row[i] = row[i] * sinv

    r = 0
    for col in range(c):
        if r == l:
            break
        while True:
            piv = None
            for i in range(r, l):
                if not a[i][col].is_zero:
                    if piv is None or a[i][col].degree < a[piv][col].degree:
                        piv = i
            if piv is None:
                break
            if piv != r:
                swap(r, piv)
            others = [i for i in range(r + 1, l) if not a[i][col].is_zero]
            if not others:
                break
            for i in others:
                addmul(i, r, a[i][col] // a[r][col])
        if not a[r][col].is_zero:
            scale(r, 1 / a[r][col].leading)
            for i in range(r):
                q = a[i][col] // a[r][col]
                addmul(i, r, q)
            r += 1

    E = PolyMat([a[i] for i in range(r)]) if r > 0 else None
    return EchelonResult(U=PolyMat(u), Uinv=PolyMat(uinv), E=E, rank=r)


def column_echelon(M: PolyMat) -> EchelonResult:
    """Lower column echelon form: M @ V == [E  0] with V unimodular."""
    res = row_echelon(M.transpose())
    E = res.E.transpose() if res.E is not None else None
    return EchelonResult(U=res.U.transpose(), Uinv=res.Uinv.transpose(),
                         E=E, rank=res.rank)


def syzygy_basis(M: PolyMat) -> PolyMat | None:
    """Basis for the left syzygy {c : c^T M = 0}; rows have full rank at every
    complex point (they are rows of a unimodular transform).  None if the
    syzygy module is trivial (normalrank == row count)."""
    res = row_echelon(M)
    if res.rank == M.rows:
        return None
    return res.U.submatrix(range(res.rank, M.rows), range(M.rows))


def row_reduced(M: PolyMat) -> EchelonResult:
    """Row-reduced form: the matrix of highest-row-degree coefficients has full
    row rank.  Requires normalrank(M) == rows."""
    l, c = M.rows, M.cols
    a = [list(row) for row in M.entries]
    U = PolyMat.identity(l)
    Uinv = PolyMat.identity(l)

    def row_degree(i):
        return max((a[i][j].degree for j in range(c)), default=NEG_INF)

    while True:
        degs = [row_degree(i) for i in range(l)]
        if any(d == NEG_INF for d in degs):
            raise ValueError("rank deficient: zero row during row reduction")
        lead = [[a[i][j].coeff(int(degs[i])) for j in range(c)] for i in range(l)]
        kern = _left_kernel_vector(lead)
        if kern is None:
            break
        support = [i for i, ci in enumerate(kern) if ci != 0]
        k = max(support, key=lambda i: degs[i])
        ck = kern[k]
        # row_k <- sum_i c_i s^(d_k - d_i) row_i ; strictly drops sum of degrees
        op = [[Poly.zero()] * l for _ in range(l)]
        opinv = [[Poly.zero()] * l for _ in range(l)]
        for i in range(l):
            op[i][i] = Poly.one()
            opinv[i][i] = Poly.one()
        for i in support:
            shift = Poly([0] * int(degs[k] - degs[i]) + [1])
            op[k][i] = kern[i] * shift if i != k else Poly.constant(kern[k])
            if i != k:
                opinv[k][i] = (-kern[i] / ck) * shift
            else:
                opinv[k][i] = Poly.constant(1 / ck)
        opm = PolyMat(op)
        a_new = opm @ PolyMat(a)
        a = [list(row) for row in a_new.entries]
        U = opm @ U
        Uinv = Uinv @ PolyMat(opinv)
    return EchelonResult(U=U, Uinv=Uinv, E=PolyMat(a), rank=l)


def column_reduced(M: PolyMat) -> EchelonResult:
    """Column-reduced form: M @ U has a nonsingular highest-column-degree
    coefficient matrix.  Requires normalrank(M) == cols."""
    res = row_reduced(M.transpose())
    return EchelonResult(U=res.U.transpose(), Uinv=res.Uinv.transpose(),
                         E=res.E.transpose(), rank=res.rank)


def _left_kernel_vector(grid) -> list[Fraction] | None:
    """A nonzero rational vector c with c^T G = 0, or None if G has full row rank."""
    r = len(grid)
    c = len(grid[0]) if r else 0
    # eliminate on the transpose: find kernel of G^T x = 0 i.e. left kernel of G
    m = [[Fraction(grid[i][j]) for i in range(r)] for j in range(c)]  # c x r
    pivots = []
    row = 0
    for col in range(r):
        piv = None
        for i in range(row, c):
            if m[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = 1 / m[row][col]
        m[row] = [x * inv for x in m[row]]
        for i in range(c):
            if i != row and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[row])]
        pivots.append(col)
        row += 1
    free = [j for j in range(r) if j not in pivots]
    if not free:
        return None
    j = free[0]
    vec = [Fraction(0)] * r
    vec[j] = Fraction(1)
    for i, pc in enumerate(pivots):
        vec[pc] = -m[i][j]
    return vec


# -- minors, properness degree, divisibility ----------------------------------------------


def delta(M: PolyMat) -> int:
    """Max degree over determinants of all full-size column subsets.
    Requires normalrank(M) == rows."""
    m = M.rows
    if normalrank(M) < m:
        raise ValueError("rank deficient")
    best = NEG_INF
    for cols in itertools.combinations(range(M.cols), m):
        d = M.select_columns(cols).det().degree
        if d > best:
            best = d
    return int(best)


def minor_gcd(M: PolyMat) -> Poly:
    """Monic gcd of all maximal minors of a full-normalrank wide/square matrix.

    Computed as det(E) of the column echelon compression M @ V = [E 0]: by
    Cauchy-Binet every maximal minor of M is det(E) times a minor of the
    unimodular V^-1, and those minors have trivial gcd.
    """
    if normalrank(M) < M.rows:
        raise ValueError("rank deficient")
    res = column_echelon(M)
    return res.E.det().monic()


def divisible_on_right(A: PolyMat, F: PolyMat) -> tuple[bool, PolyMat | None]:
    """Does H exist with A == H @ F?  F must be square nonsingular.
    Tests divisibility of A @ adj(F) by det(F), entrywise and exactly."""
    d = F.det()
    if d.is_zero:
        raise ValueError("F is singular")
    B = A @ F.adjugate()
    out = []
    for row in B.entries:
        hrow = []
        for e in row:
            q, r = divmod(e, d)
            if not r.is_zero:
                return False, None
            hrow.append(q)
        out.append(hrow)
    H = PolyMat(out)
    return True, H


def unimodularly_equivalent(R1: PolyMat, R2: PolyMat) -> bool:
    """Do R1 and R2 define the same kernel, i.e. R1 == U @ R2 for unimodular U?
    Both must have full row normalrank."""
    if (R1.rows, R1.cols) != (R2.rows, R2.cols):
        return False

    def divides(Ra, Rb) -> bool:
        # exists H with Ra == H @ Rb
        res = column_echelon(Rb)
        G = Ra @ res.U
        tail = G.submatrix(range(G.rows), range(res.rank, G.cols)) \
            if res.rank < G.cols else None
        if tail is not None and not tail.is_zero:
            return False
        head = G.select_columns(range(res.rank))
        ok, _ = divisible_on_right(head, res.E)
        return ok

    return divides(R1, R2) and divides(R2, R1)


def left_coprime(A: PolyMat, B: PolyMat) -> bool:
    """Full row rank of [A B] at every complex point."""
    M = A.hstack(B)
    if normalrank(M) < M.rows:
        return False
    return minor_gcd(M).degree == 0


# -- constant-rank tests over a region --------------------------------------------

REGION_ALL_C = "all-C"
REGION_CLOSED_RHP = "closed-rhp"


@dataclass(frozen=True)
class FullRankResult:
    """Outcome of a constant-rank test.  `witnesses` are points in the region
    where the rank drops; `robust` is False when the verdict flips under a
    tenfold wider axis band (callers should then report inconclusive)."""
    ok: bool
    witnesses: tuple[complex, ...]
    robust: bool


def fullrank_everywhere(M: PolyMat, region: str,
                        tol: Tolerance = DEFAULT_TOL) -> FullRankResult:
    """Does M(z) keep full row rank for every z in the region?

    Exact reduction: the rank drops exactly at the roots of the gcd of the
    maximal minors.  The gcd is computed exactly; only locating its roots and
    classifying them against the axis band is numeric.
    """
    g = minor_gcd(M)  # raises ValueError("rank deficient") when appropriate
    if g.degree == 0:
        return FullRankResult(True, (), True)
    if region == REGION_ALL_C:
        rs = numeric_roots(g, tol)
        return FullRankResult(False, tuple(z for z, _, _ in rs.roots), True)
    if region != REGION_CLOSED_RHP:
        raise ValueError(f"unknown region {region!r}")
    rs = numeric_roots(g, tol)
    bad = tuple(z for z, _, tag in rs.roots if tag in (AXIS, OPEN_RHP))
    bad10 = [z for z, _, _ in rs.roots
             if region_of(z, tol, band_scale=10.0) in (AXIS, OPEN_RHP)]
    robust = (len(bad) == 0) == (len(bad10) == 0)
    return FullRankResult(not bad, bad, robust)
