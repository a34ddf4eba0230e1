"""Truncated power series k[t]/(t^P) and matrices over them.

Series are tuples of P field elements, lowest degree first.  Matrices are
lists of rows of series.  Only what the lifted Dieudonne toy needs is here:
products, unit inverses, coefficient Frobenius, Berkowitz characteristic
polynomials and t-adic valuations.
"""

from __future__ import annotations

from typing import Sequence

from .ffalg import FieldCtx, Matrix

Series = tuple[int, ...]
SMatrix = list[list[Series]]


class PrecisionError(ArithmeticError):
    """A valuation needed for the answer is at or beyond the working precision."""


class SeriesRing:
    def __init__(self, field: FieldCtx, prec: int):
        if prec < 1:
            raise ValueError("precision must be positive")
        self.field = field
        self.prec = prec
        self.zero: Series = (0,) * prec
        self.one: Series = (1,) + (0,) * (prec - 1)

    def const(self, c: int) -> Series:
        return (c,) + (0,) * (self.prec - 1)

    def monomial(self, c: int, k: int) -> Series:
        out = [0] * self.prec
        if k < self.prec:
            out[k] = c
        return tuple(out)

    def from_coeffs(self, coeffs: Sequence[int]) -> Series:
        c = list(coeffs[: self.prec])
        return tuple(c + [0] * (self.prec - len(c)))

    def add(self, a: Series, b: Series) -> Series:
        add = self.field.add
        return tuple(add[x][y] for x, y in zip(a, b))

    def sub(self, a: Series, b: Series) -> Series:
        sub = self.field.sub
        return tuple(sub[x][y] for x, y in zip(a, b))

    def neg(self, a: Series) -> Series:
        neg = self.field.neg
        return tuple(neg[x] for x in a)

    def scale(self, c: int, a: Series) -> Series:
        row = self.field.mul[c]
        return tuple(row[x] for x in a)

    def mul(self, a: Series, b: Series) -> Series:
        F = self.field
        add, mul = F.add, F.mul
        P = self.prec
        out = [0] * P
        for i, x in enumerate(a):
            if x:
                mrow = mul[x]
                for j in range(P - i):
                    y = b[j]
                    if y:
                        out[i + j] = add[out[i + j]][mrow[y]]
        return tuple(out)

    def val(self, a: Series) -> int:
        for i, x in enumerate(a):
            if x:
                return i
        return self.prec

    def is_unit(self, a: Series) -> bool:
        return a[0] != 0

    def inv(self, a: Series) -> Series:
        F = self.field
        if not a[0]:
            raise ZeroDivisionError("series is not a unit")
        P = self.prec
        u0 = F.inv[a[0]]
        out = [0] * P
        out[0] = u0
        for n in range(1, P):
            s = 0
            for i in range(1, n + 1):
                if a[i] and out[n - i]:
                    s = F.add[s][F.mul[a[i]][out[n - i]]]
            out[n] = F.mul[F.neg[s]][u0]
        return tuple(out)

    def frob(self, a: Series, s: int = 1) -> Series:
        tab = self.field.frob_tables[s % self.field.m]
        return tuple(tab[x] for x in a)

    def shift(self, a: Series, k: int) -> Series:
        """Multiply by t^k (k >= 0), truncating."""
        if k == 0:
            return a
        return ((0,) * k + a[: self.prec - k]) if k < self.prec else self.zero

    def divide_t(self, a: Series, k: int) -> Series:
        """Divide by t^k; the top k coefficients become unknown and are set to 0."""
        if any(a[:k]):
            raise ArithmeticError(f"series not divisible by t^{k}")
        return a[k:] + (0,) * k

    def change_prec(self, a: Series, prec: int) -> Series:
        return tuple(a[:prec]) + (0,) * max(0, prec - len(a))

    # -- matrices ------------------------------------------------------------
    def mzero(self, r: int, c: int) -> SMatrix:
        return [[self.zero] * c for _ in range(r)]

    def mident(self, n: int) -> SMatrix:
        return [[self.one if i == j else self.zero for j in range(n)] for i in range(n)]

    def mconst(self, A: Matrix) -> SMatrix:
        return [[self.const(x) for x in row] for row in A]

    def mmul(self, A: SMatrix, B: SMatrix) -> SMatrix:
        if not A:
            return []
        inner, ncols = len(B), len(B[0]) if B else 0
        out = []
        for row in A:
            new = []
            for j in range(ncols):
                acc = self.zero
                for k in range(inner):
                    if any(row[k]) and any(B[k][j]):
                        acc = self.add(acc, self.mul(row[k], B[k][j]))
                new.append(acc)
            out.append(new)
        return out

    def madd(self, A: SMatrix, B: SMatrix) -> SMatrix:
        return [[self.add(x, y) for x, y in zip(r, s)] for r, s in zip(A, B)]

    def msub(self, A: SMatrix, B: SMatrix) -> SMatrix:
        return [[self.sub(x, y) for x, y in zip(r, s)] for r, s in zip(A, B)]

    def mscale(self, c: Series, A: SMatrix) -> SMatrix:
        return [[self.mul(c, x) for x in row] for row in A]

    def mfrob(self, A: SMatrix, s: int = 1) -> SMatrix:
        return [[self.frob(x, s) for x in row] for row in A]

    def mshift(self, A: SMatrix, k: int) -> SMatrix:
        return [[self.shift(x, k) for x in row] for row in A]

    def mtranspose(self, A: SMatrix) -> SMatrix:
        return [list(col) for col in zip(*A)] if A else []

    def mreduce(self, A: SMatrix) -> Matrix:
        """Constant terms."""
        return tuple(tuple(x[0] for x in row) for row in A)

    def minv(self, A: SMatrix) -> SMatrix:
        """Inverse of a matrix whose reduction mod t is invertible."""
        n = len(A)
        M = [list(row) + [self.one if i == j else self.zero for j in range(n)] for i, row in enumerate(A)]
        for c in range(n):
            piv = next((r for r in range(c, n) if M[r][c][0]), None)
            if piv is None:
                raise ZeroDivisionError("matrix is not invertible over the series ring")
            M[c], M[piv] = M[piv], M[c]
            u = self.inv(M[c][c])
            M[c] = [self.mul(u, x) for x in M[c]]
            for r in range(n):
                if r != c and any(M[r][c]):
                    f = M[r][c]
                    M[r] = [self.sub(x, self.mul(f, y)) for x, y in zip(M[r], M[c])]
        return [row[n:] for row in M]

    def mequal(self, A: SMatrix, B: SMatrix, prec: int | None = None) -> bool:
        k = self.prec if prec is None else prec
        return all(x[:k] == y[:k] for r, s in zip(A, B) for x, y in zip(r, s))

    def mval(self, A: SMatrix) -> int:
        return min((self.val(x) for row in A for x in row), default=self.prec)

    def charpoly(self, A: SMatrix) -> list[Series]:
        """Coefficients [1, c_1, ..., c_n] of det(X I - A) (Berkowitz, division free)."""
        n = len(A)
        vect = [self.one]
        for r in range(n):
            a = A[r][r]
            R = A[r][:r]
            C = [A[i][r] for i in range(r)]
            S = [row[:r] for row in A[:r]]
            col = [self.one, self.neg(a)]
            cur = C
            for _ in range(r):
                acc = self.zero
                for x, y in zip(R, cur):
                    acc = self.add(acc, self.mul(x, y))
                col.append(self.neg(acc))
                cur = [self._dot(row, cur) for row in S]
            # Toeplitz product: new[i] = sum_k col[k] * vect[i-k]
            new = []
            for i in range(r + 2):
                acc = self.zero
                for k in range(max(0, i - len(vect) + 1), min(i, r + 1) + 1):
                    acc = self.add(acc, self.mul(col[k], vect[i - k]))
                new.append(acc)
            vect = new
        return vect

    def _dot(self, row: Sequence[Series], vec: Sequence[Series]) -> Series:
        acc = self.zero
        for x, y in zip(row, vec):
            acc = self.add(acc, self.mul(x, y))
        return acc


def lower_hull_slopes(points: Sequence[tuple[int, int | None]]) -> list:
    """Slopes (with multiplicity) of the lower convex hull of points (x, y),
    x = 0..n; y None stands for +infinity.  Returns n fractions, increasing."""
    from fractions import Fraction

    pts = [(x, y) for x, y in points if y is not None]
    hull: list[tuple[int, int]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point if it lies on or above the segment
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    slopes = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        s = Fraction(y2 - y1, x2 - x1)
        slopes.extend([s] * (x2 - x1))
    return slopes


def block_toeplitz(ring: SeriesRing, A: SMatrix, e: int) -> Matrix:
    """k-matrix of A acting on (k[t]/t^e)^n in the generator-major basis
    (index g*e + k for t^k v_g)."""
    rows_n = len(A)
    cols_n = len(A[0]) if A else 0
    out = [[0] * (cols_n * e) for _ in range(rows_n * e)]
    for r in range(rows_n):
        for g in range(cols_n):
            a = A[r][g]
            for k in range(e):
                for s in range(e - k):
                    c = a[s] if s < len(a) else 0
                    if c:
                        out[r * e + s + k][g * e + k] = c
    return tuple(tuple(row) for row in out)


def series_vector(ring: SeriesRing, v: Sequence[int], e: int) -> list[Series]:
    """Column of series from a k-vector in the generator-major basis."""
    n = len(v) // e
    return [ring.from_coeffs(v[g * e:(g + 1) * e]) for g in range(n)]
