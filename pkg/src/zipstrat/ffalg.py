"""Exact linear algebra over GF(p^m).

Field elements are plain ints in ``range(q)``: the int ``sum(c_i * p**i)``
encodes the residue ``sum(c_i X^i)`` modulo the field's modulus.  All
arithmetic goes through precomputed tables, which keeps the inner loops of
row reduction cheap for the small dimensions used throughout the package.

Vectors are tuples of ints.  Matrices are tuples of row tuples and act on
column vectors.  A :class:`SemilinearMap` ``(A, s)`` sends ``v`` to
``A . v^(p^s)`` where the power is applied entrywise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

Vector = tuple[int, ...]
Matrix = tuple[Vector, ...]

MAX_FIELD_ORDER = 1024


class FieldError(ValueError):
    pass


class DimensionError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


# -- polynomials over GF(p), low-degree-first coefficient tuples -------------

def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    r = [x % p for x in a]
    _poly_trim(r)
    db = len(b) - 1
    inv_lead = pow(b[-1], p - 2, p)
    while len(r) - 1 >= db and r:
        c = r[-1] * inv_lead % p
        shift = len(r) - 1 - db
        for i, bi in enumerate(b):
            r[shift + i] = (r[shift + i] - c * bi) % p
        _poly_trim(r)
    return r


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Brute-force test: no monic factor of degree 1..deg/2."""
    deg = len(poly) - 1
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _poly_mod(poly, list(low) + [1], p):
                return False
    return True


def smallest_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree m, comparing
    coefficients from the constant term upwards."""
    if m == 1:
        return (0, 1)
    for low in itertools.product(range(p), repeat=m):
        # product() is lexicographic with the first entry most significant,
        # which is the constant term here
        coeffs = tuple(low) + (1,)
        if is_irreducible(coeffs, p):
            return coeffs
    raise FieldError(f"no irreducible polynomial of degree {m} over GF({p})")  # pragma: no cover


class FieldCtx:
    """GF(p^m) with table arithmetic.  Instances are cached per (p, m)."""

    def __init__(self, p: int, m: int):
        if not is_prime(p):
            raise FieldError(f"p={p} is not prime")
        if m < 1:
            raise FieldError("extension degree must be >= 1")
        q = p**m
        if q > MAX_FIELD_ORDER:
            raise FieldError(f"field order {q} exceeds {MAX_FIELD_ORDER}")
        self.p = p
        self.m = m
        self.q = q
        self.modulus = smallest_irreducible(p, m)
        self.digits = [self._to_digits(a) for a in range(q)]
        self.add = [[self._from_digits([(x + y) % p for x, y in zip(self.digits[a], self.digits[b])])
                     for b in range(q)] for a in range(q)]
        self.neg = [self._from_digits([(-x) % p for x in self.digits[a]]) for a in range(q)]
        self.sub = [[self.add[a][self.neg[b]] for b in range(q)] for a in range(q)]
        self.mul = [[self._mul_slow(a, b) for b in range(q)] for a in range(q)]
        self.inv = [0] * q
        for a in range(1, q):
            row = self.mul[a]
            self.inv[a] = row.index(1)
        frob = [self._pow(a, p) for a in range(q)]
        # frob_tables[s] is the map a -> a^(p^s), s taken mod m
        self.frob_tables = [list(range(q))]
        for _ in range(1, m):
            prev = self.frob_tables[-1]
            self.frob_tables.append([frob[x] for x in prev])
        # negmul[c] maps b -> -c*b, the row update used in elimination
        self.negmul = [self.mul[self.neg[c]] for c in range(q)]

    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, m={self.m})"

    def __reduce__(self):
        return (make_field, (self.p, self.m))

    # -- encoding ------------------------------------------------------------
    def _to_digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.m):
            out.append(a % self.p)
            a //= self.p
        return out

    def _from_digits(self, digits: Sequence[int]) -> int:
        v = 0
        for c in reversed(digits):
            v = v * self.p + c
        return v

    def _mul_slow(self, a: int, b: int) -> int:
        da, db = self.digits[a], self.digits[b]
        prod = [0] * (2 * self.m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        r = _poly_mod(prod, self.modulus, self.p)
        return self._from_digits(r + [0] * (self.m - len(r)))

    def _pow(self, a: int, n: int) -> int:
        r = 1
        for _ in range(n):
            r = self._mul_slow(r, a)
        return r

    # -- public helpers ------------------------------------------------------
    @property
    def gen(self) -> int:
        """Class of X (equals 0 in the prime field, where X is the modulus)."""
        return self.p if self.m > 1 else 0

    def element(self, coeffs: Sequence[int]) -> int:
        """Encode low-degree-first coefficients as a field element."""
        c = list(coeffs) + [0] * (self.m - len(coeffs))
        return self._from_digits([x % self.p for x in c[: self.m]])

    def frob(self, a: int, s: int = 1) -> int:
        return self.frob_tables[s % self.m][a]

    def power(self, a: int, n: int) -> int:
        if n < 0:
            a, n = self.inv[a], -n
        r, base = 1, a
        while n:
            if n & 1:
                r = self.mul[r][base]
            base = self.mul[base][base]
            n >>= 1
        return r

    def elements(self) -> range:
        return range(self.q)

    def random_element(self, rng, nonzero: bool = False) -> int:
        if nonzero:
            return int(rng.integers(1, self.q))
        return int(rng.integers(0, self.q))


@lru_cache(maxsize=None)
def make_field(p: int, m: int = 1) -> FieldCtx:
    return FieldCtx(p, m)


# -- vectors and matrices ----------------------------------------------------

def zero_matrix(r: int, c: int) -> Matrix:
    return tuple((0,) * c for _ in range(r))


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(A: Matrix, ncols: int | None = None) -> Matrix:
    if not A:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*A))


def twist_vector(F: FieldCtx, v: Sequence[int], s: int) -> Vector:
    if s % F.m == 0:
        return tuple(v)
    t = F.frob_tables[s % F.m]
    return tuple(t[x] for x in v)


def twist_matrix(F: FieldCtx, A: Matrix, s: int) -> Matrix:
    if s % F.m == 0:
        return A
    t = F.frob_tables[s % F.m]
    return tuple(tuple(t[x] for x in row) for row in A)


def mat_vec(F: FieldCtx, A: Matrix, v: Sequence[int]) -> Vector:
    add, mul = F.add, F.mul
    out = []
    for row in A:
        acc = 0
        for a, b in zip(row, v):
            if a and b:
                acc = add[acc][mul[a][b]]
        out.append(acc)
    return tuple(out)


def mat_mul(F: FieldCtx, A: Matrix, B: Matrix, inner: int | None = None) -> Matrix:
    if not A:
        return ()
    n = len(B[0]) if B else 0
    if not B:
        return tuple((0,) * n for _ in A)
    add, mul = F.add, F.mul
    cols = tuple(zip(*B))
    out = []
    for row in A:
        nz = [(k, a) for k, a in enumerate(row) if a]
        r = []
        for col in cols:
            acc = 0
            for k, a in nz:
                b = col[k]
                if b:
                    acc = add[acc][mul[a][b]]
            r.append(acc)
        out.append(tuple(r))
    return tuple(out)


def vec_add(F: FieldCtx, u: Sequence[int], v: Sequence[int]) -> Vector:
    add = F.add
    return tuple(add[a][b] for a, b in zip(u, v))


def vec_scale(F: FieldCtx, c: int, v: Sequence[int]) -> Vector:
    row = F.mul[c]
    return tuple(row[x] for x in v)


def rref(F: FieldCtx, rows: Iterable[Sequence[int]], ncols: int) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form with zero rows dropped, plus pivot columns."""
    M = [list(r) for r in rows]
    for r in M:
        if len(r) != ncols:
            raise DimensionError(f"row of length {len(r)} in a {ncols}-column matrix")
    add, inv, negmul, mul = F.add, F.inv, F.negmul, F.mul
    pivots: list[int] = []
    r = 0
    nrows = len(M)
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if M[i][c]:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            M[r], M[piv] = M[piv], M[r]
        lead = M[r][c]
        if lead != 1:
            mr = mul[inv[lead]]
            M[r] = [mr[x] for x in M[r]]
        Mr = M[r]
        for i in range(nrows):
            if i != r:
                f = M[i][c]
                if f:
                    nm = negmul[f]
                    Mi = M[i]
                    M[i] = [add[a][nm[b]] if b else a for a, b in zip(Mi, Mr)]
        pivots.append(c)
        r += 1
    return tuple(tuple(row) for row in M[:r]), tuple(pivots)


def rank(F: FieldCtx, A: Matrix, ncols: int | None = None) -> int:
    if not A:
        return 0
    return len(rref(F, A, len(A[0]) if ncols is None else ncols)[0])


def null_space(F: FieldCtx, A: Matrix, ncols: int) -> Matrix:
    """Basis (as rows) of {x : A x = 0}."""
    R, piv = rref(F, A, ncols) if A else ((), ())
    free = [c for c in range(ncols) if c not in set(piv)]
    neg = F.neg
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for row, pc in zip(R, piv):
            if row[fc]:
                v[pc] = neg[row[fc]]
        basis.append(tuple(v))
    return tuple(basis)


def solve_linear(F: FieldCtx, A: Matrix, b: Sequence[int], ncols: int) -> Vector | None:
    """One solution of A x = b, or None."""
    aug = [tuple(row) + (bi,) for row, bi in zip(A, b)]
    R, piv = rref(F, aug, ncols + 1)
    if piv and piv[-1] == ncols:
        return None
    x = [0] * ncols
    for row, pc in zip(R, piv):
        x[pc] = row[ncols]
    return tuple(x)


def mat_inverse(F: FieldCtx, A: Matrix) -> Matrix:
    n = len(A)
    aug = [tuple(row) + tuple(1 if i == j else 0 for j in range(n)) for i, row in enumerate(A)]
    R, piv = rref(F, aug, 2 * n)
    if len(piv) < n or piv[n - 1] != n - 1:
        raise ValueError("matrix is singular")
    return tuple(row[n:] for row in R)


def random_matrix(F: FieldCtx, r: int, c: int, rng) -> Matrix:
    vals = rng.integers(0, F.q, size=(r, c)) if r and c else []
    return tuple(tuple(int(x) for x in row) for row in vals) if r and c else tuple((0,) * c for _ in range(r))


def random_invertible(F: FieldCtx, n: int, rng) -> Matrix:
    while True:
        A = random_matrix(F, n, n, rng)
        if rank(F, A, n) == n:
            return A


# -- subspaces ---------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    """Row space of ``basis``, kept in canonical RREF so that equality of
    subspaces is equality of representations."""

    field: FieldCtx
    n: int
    basis: Matrix

    @staticmethod
    def span(F: FieldCtx, n: int, vectors: Iterable[Sequence[int]]) -> "Subspace":
        vecs = [tuple(v) for v in vectors]
        if not vecs:
            return Subspace(F, n, ())
        R, _ = rref(F, vecs, n)
        return Subspace(F, n, R)

    @staticmethod
    def zero(F: FieldCtx, n: int) -> "Subspace":
        return Subspace(F, n, ())

    @staticmethod
    def full(F: FieldCtx, n: int) -> "Subspace":
        return Subspace(F, n, identity(n))

    @staticmethod
    def coordinate(F: FieldCtx, n: int, idx: Iterable[int]) -> "Subspace":
        idx = sorted(set(idx))
        return Subspace(F, n, tuple(tuple(1 if j == i else 0 for j in range(n)) for i in idx))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.n == other.n and self.basis == other.basis and self.field is other.field

    def __hash__(self) -> int:
        return hash((self.n, self.basis))

    def __repr__(self) -> str:
        return f"Subspace(n={self.n}, dim={self.dim}, basis={list(map(list, self.basis))})"

    def _check(self, other: "Subspace") -> None:
        if self.n != other.n:
            raise DimensionError(f"ambient dimensions differ: {self.n} vs {other.n}")

    def annihilator(self) -> "Subspace":
        """{x : <b, x> = 0 for all basis rows b} for the standard dot product."""
        return Subspace(self.field, self.n, _rref_rows(self.field, null_space(self.field, self.basis, self.n), self.n))

    def contains_vector(self, v: Sequence[int]) -> bool:
        if not any(v):
            return True
        F = self.field
        # reduce v against the RREF basis; membership iff the remainder vanishes
        w = list(v)
        add, negmul = F.add, F.negmul
        for row in self.basis:
            pc = next(i for i, x in enumerate(row) if x)
            c = w[pc]
            if c:
                nm = negmul[c]
                w = [add[a][nm[b]] if b else a for a, b in zip(w, row)]
        return not any(w)

    def contains(self, other: "Subspace") -> bool:
        self._check(other)
        return other.dim <= self.dim and all(self.contains_vector(v) for v in other.basis)

    def __le__(self, other: "Subspace") -> bool:
        return other.contains(self)


def _rref_rows(F: FieldCtx, rows: Matrix, n: int) -> Matrix:
    return rref(F, rows, n)[0] if rows else ()


def subspace_sum(U: Subspace, V: Subspace) -> Subspace:
    U._check(V)
    if not U.basis:
        return V
    if not V.basis:
        return U
    return Subspace.span(U.field, U.n, U.basis + V.basis)


def intersect(U: Subspace, V: Subspace) -> Subspace:
    U._check(V)
    if U.dim == 0 or V.dim == 0:
        return Subspace.zero(U.field, U.n)
    if U.dim == U.n:
        return V
    if V.dim == V.n:
        return U
    ann = subspace_sum(U.annihilator(), V.annihilator())
    return ann.annihilator()


def twist_subspace(U: Subspace, s: int) -> Subspace:
    F = U.field
    if s % F.m == 0:
        return U
    # Frobenius fixes 0 and 1, so the twisted RREF is again in RREF
    return Subspace(F, U.n, twist_matrix(F, U.basis, s))


# -- semilinear maps ---------------------------------------------------------

@dataclass(frozen=True)
class SemilinearMap:
    """v -> A . v^(p^twist); the twist is normalised modulo m."""

    field: FieldCtx
    matrix: Matrix
    twist: int
    nrows: int
    ncols: int

    @staticmethod
    def make(F: FieldCtx, matrix: Sequence[Sequence[int]], twist: int = 0,
             ncols: int | None = None) -> "SemilinearMap":
        A = tuple(tuple(int(x) for x in row) for row in matrix)
        nr = len(A)
        nc = len(A[0]) if A else (ncols or 0)
        if any(len(r) != nc for r in A):
            raise DimensionError("ragged matrix")
        return SemilinearMap(F, A, twist % F.m, nr, nc)

    @staticmethod
    def identity(F: FieldCtx, n: int, twist: int = 0) -> "SemilinearMap":
        return SemilinearMap.make(F, identity(n), twist, n)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __call__(self, v: Sequence[int]) -> Vector:
        if len(v) != self.ncols:
            raise DimensionError(f"vector of length {len(v)} for a map with {self.ncols} columns")
        return mat_vec(self.field, self.matrix, twist_vector(self.field, v, self.twist))

    def compose(self, other: "SemilinearMap") -> "SemilinearMap":
        """self o other: (A, s) o (B, t) = (A . B^(p^s), s + t)."""
        if self.ncols != other.nrows:
            raise DimensionError("incompatible shapes for composition")
        F = self.field
        B = twist_matrix(F, other.matrix, self.twist)
        if other.nrows == 0:
            prod = zero_matrix(self.nrows, other.ncols)
        else:
            prod = mat_mul(F, self.matrix, B) if self.matrix else ()
            if not prod:
                prod = zero_matrix(self.nrows, other.ncols)
        return SemilinearMap(F, prod, (self.twist + other.twist) % F.m, self.nrows, other.ncols)

    def __matmul__(self, other: "SemilinearMap") -> "SemilinearMap":
        return self.compose(other)

    def columns(self) -> Matrix:
        return transpose(self.matrix) if self.matrix else tuple(() for _ in range(self.ncols))


def kernel(f: SemilinearMap) -> Subspace:
    F = f.field
    K = null_space(F, f.matrix, f.ncols) if f.nrows else identity(f.ncols)
    return twist_subspace(Subspace(F, f.ncols, _rref_rows(F, K, f.ncols)), -f.twist)


def image(f: SemilinearMap, U: Subspace | None = None) -> Subspace:
    F = f.field
    if U is None:
        return Subspace.span(F, f.nrows, f.columns())
    if U.n != f.ncols:
        raise DimensionError(f"subspace of dimension {U.n} fed to a map with {f.ncols} columns")
    return Subspace.span(F, f.nrows, (f(v) for v in U.basis))


def preimage(f: SemilinearMap, W: Subspace) -> Subspace:
    """{v : f(v) in W}."""
    F = f.field
    if W.n != f.nrows:
        raise DimensionError(f"target subspace of dimension {W.n} for a map with {f.nrows} rows")
    if W.dim == W.n:
        return Subspace.full(F, f.ncols)
    ann = W.annihilator().basis
    # A y in W  <=>  ann . A y = 0
    cond = mat_mul(F, ann, f.matrix) if f.nrows else ()
    K = null_space(F, cond, f.ncols) if cond else identity(f.ncols)
    return twist_subspace(Subspace(F, f.ncols, _rref_rows(F, K, f.ncols)), -f.twist)


def solve(f: SemilinearMap, b: Sequence[int]) -> Vector | None:
    """Some v with f(v) = b, or None when b is not in the image."""
    F = f.field
    if len(b) != f.nrows:
        raise DimensionError("right-hand side has the wrong length")
    y = solve_linear(F, f.matrix, b, f.ncols)
    if y is None:
        return None
    return twist_vector(F, y, -f.twist)


def complement_basis(U: Subspace, V: Subspace) -> Matrix:
    """Rows extending a basis of U to a basis of V (U inside V): standard
    pivot-free choice taken from V's RREF rows."""
    if not V.contains(U):
        raise ValueError("U is not contained in V")
    F = U.field
    rows = list(U.basis)
    current = U
    out = []
    for v in V.basis:
        if not current.contains_vector(v):
            out.append(v)
            rows.append(v)
            current = Subspace.span(F, U.n, rows)
    return tuple(out)
