"""Synthetic mod-p Dieudonne data with splitting flags, and their polygons.

A datum is built from random splitting flags and a lift to k[[t]] (t plays
the role of the uniformizer): with omega~ = B . R[[t]]^h a lattice lifting
omega, Ver~_j = B_{j-1} g_j (sigma^{-1}-linear) and Frob~_j = t^e Ver~_j^{-1}
(sigma-linear).  Reducing mod t^e gives (H, Frob, Ver) with Ver(H) = omega.

For kinds AL/AU only the primed half is modelled: the host has rank d and
the flag ranks are the primed signature a^l.  For kind C the host has rank
2d with the antidiagonal symplectic form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .epsmod import (
    EpsModule,
    SplittingStructure,
    conjugate_partition,
    module_type,
    pairing_value,
    sample_splitting,
    sample_symplectic_splitting,
    symplectic_gram,
    validate_splitting,
)
from .ffalg import (
    FieldCtx,
    Matrix,
    SemilinearMap,
    Subspace,
    image,
    kernel,
    make_field,
    mat_mul,
    random_invertible,
    transpose,
    twist_matrix,
)
from .tseries import PrecisionError, SeriesRing, SMatrix, block_toeplitz, lower_hull_slopes

KINDS = ("C", "AL", "AU")


class SignatureError(ValueError):
    pass


# -- PEL data ----------------------------------------------------------------

@dataclass(frozen=True)
class LocalFactor:
    label: str
    kind: str
    e: int
    f: int
    d: int
    mult: int = 1
    signature: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SignatureError(f"unknown kind {self.kind!r}")
        if self.e < 1 or self.f < 1 or self.d < 1 or self.mult < 1:
            raise SignatureError("e, f, d and multiplicity must be positive")
        sig = self.signature
        if self.kind == "C":
            full = tuple((self.d,) * self.e for _ in range(self.f))
            if sig and tuple(map(tuple, sig)) != full:
                raise SignatureError("kind C forces every d^l to equal d")
            object.__setattr__(self, "signature", full)
            return
        if len(sig) == 1 and self.f > 1:
            sig = tuple(sig) * self.f
        sig = tuple(tuple(int(x) for x in row) for row in sig)
        if len(sig) != self.f or any(len(row) != self.e for row in sig):
            raise SignatureError(f"signature must be {self.f} rows of {self.e} entries")
        if any(not 0 <= x <= self.d for row in sig for x in row):
            raise SignatureError(f"signature entries must lie in [0, {self.d}]")
        object.__setattr__(self, "signature", sig)

    @property
    def host_rank(self) -> int:
        return 2 * self.d if self.kind == "C" else self.d

    def ranks(self, j: int) -> tuple[int, ...]:
        return self.signature[j]


@dataclass(frozen=True)
class PELDatum:
    p: int
    m: int
    factors: tuple[LocalFactor, ...]

    @property
    def field(self) -> FieldCtx:
        return make_field(self.p, self.m)


def hilbert(p: int, e: int, f: int, m: int = 1) -> PELDatum:
    return PELDatum(p, m, (LocalFactor("1", "C", e, f, 1),))


def siegel(p: int, g: int, e: int, f: int = 1, m: int = 1) -> PELDatum:
    return PELDatum(p, m, (LocalFactor("1", "C", e, f, g),))


def unitary(p: int, d: int, signature: Sequence[Sequence[int]], e: int, f: int = 1, m: int = 1,
            kind: str = "AU") -> PELDatum:
    return PELDatum(p, m, (LocalFactor("1", kind, e, f, d, 1, tuple(map(tuple, signature))),))


# -- data --------------------------------------------------------------------

@dataclass(frozen=True)
class FactorLift:
    """Lifted Ver~ (twist -1) and Frob~ (twist +1) per j, at precision prec."""

    ring: SeriesRing
    ver: tuple[SMatrix, ...]
    frob: tuple[SMatrix, ...]

    @property
    def prec(self) -> int:
        return self.ring.prec


@dataclass(frozen=True)
class FactorData:
    factor: LocalFactor
    host: EpsModule
    splittings: tuple[SplittingStructure, ...]
    frob: tuple[SemilinearMap, ...]   # frob[j]: H_{j-1} -> H_j
    ver: tuple[SemilinearMap, ...]    # ver[j]:  H_j -> H_{j-1}
    pairing: Matrix | None = None
    lift: FactorLift | None = None

    @property
    def f(self) -> int:
        return self.factor.f

    def omega(self, j: int) -> Subspace:
        return self.splittings[j % self.f].omega


@dataclass(frozen=True)
class FVDatum:
    pel: PELDatum
    factors: tuple[FactorData, ...]

    @property
    def field(self) -> FieldCtx:
        return self.pel.field


@dataclass(frozen=True)
class DatumReport:
    ok: bool
    factor: int | None = None
    j: int | None = None
    condition: str | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


# -- k[eps]-adapted bases ----------------------------------------------------

def adapted_basis(H: EpsModule, omega: Subspace) -> tuple[SMatrix, tuple[int, ...]]:
    """(U, a) with U invertible over k[t]/t^e and omega = U . (+)_k t^{a_k} R.

    Smith normal form over k[eps] of the matrix whose columns are a k-basis
    of omega, keeping track of the inverse row transform only.
    """
    e, h = H.e, H.rank
    R = SeriesRing(H.field, e)
    cols = [[R.from_coeffs(v[g * e:(g + 1) * e]) for g in range(h)] for v in omega.basis]
    G = [[cols[c][r] for c in range(len(cols))] for r in range(h)]
    ncols = len(cols)
    U = R.mident(h)
    expo = [e] * h
    for k in range(h):
        best = None
        for i in range(k, h):
            for j in range(k, ncols):
                v = R.val(G[i][j])
                if v < e and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        v, i, j = best
        G[k], G[i] = G[i], G[k]
        for row in U:
            row[k], row[i] = row[i], row[k]
        for row in G:
            row[k], row[j] = row[j], row[k]
        unit_inv = R.inv(R.divide_t(G[k][k], v))
        for i in range(k + 1, h):
            x = G[i][k]
            if any(x):
                fct = R.mul(R.divide_t(x, v), unit_inv)
                G[i] = [R.sub(a, R.mul(fct, b)) for a, b in zip(G[i], G[k])]
                # inverse transform: column k of U gains fct times column i
                for row in U:
                    row[k] = R.add(row[k], R.mul(fct, row[i]))
        for j in range(k + 1, ncols):
            x = G[k][j]
            if any(x):
                fct = R.mul(R.divide_t(x, v), unit_inv)
                for row in G:
                    row[j] = R.sub(row[j], R.mul(fct, row[k]))
        expo[k] = v
    return U, tuple(expo)


def _lift_poly(R: SeriesRing, A: SMatrix) -> SMatrix:
    return [[R.change_prec(x, R.prec) for x in row] for row in A]


def _antidiag_J(R: SeriesRing, half: int) -> SMatrix:
    h = 2 * half
    J = R.mzero(h, h)
    for r in range(h):
        J[r][h - 1 - r] = R.one if r < half else R.const(R.field.neg[1])
    return J


def symplectic_basis(R: SeriesRing, S: SMatrix, half: int) -> SMatrix:
    """Q with Q^T S Q = J (antidiagonal) for an alternating S invertible mod t."""
    h = 2 * half
    vecs = [[R.one if r == c else R.zero for r in range(h)] for c in range(h)]

    def form(x, y):
        Sy = [R._dot(row, y) for row in S]
        return R._dot(x, Sy)

    cols: list = [None] * h
    remaining = vecs
    for i in range(half):
        x = remaining[0]
        idx = next((k for k in range(1, len(remaining)) if form(x, remaining[k])[0]), None)
        if idx is None:
            raise ArithmeticError("form is degenerate modulo t")
        y = remaining[idx]
        c = R.inv(form(x, y))
        y = [R.mul(c, a) for a in y]
        rest = [z for k, z in enumerate(remaining) if k not in (0, idx)]
        new_rest = []
        for z in rest:
            zy, zx = form(z, y), form(z, x)
            new_rest.append([R.add(R.sub(a, R.mul(zy, b)), R.mul(zx, cc)) for a, b, cc in zip(z, x, y)])
        remaining = new_rest
        cols[i] = x
        cols[h - 1 - i] = y
    return [[cols[c][r] for c in range(h)] for r in range(h)]


def _random_series(R: SeriesRing, rng, deg: int) -> tuple[int, ...]:
    q = R.field.q
    return R.from_coeffs([int(x) for x in rng.integers(0, q, size=min(deg, R.prec))])


def random_gl(R: SeriesRing, h: int, rng, deg: int) -> SMatrix:
    F = R.field
    g0 = random_invertible(F, h, rng)
    out = R.mconst(g0)
    for r in range(h):
        for c in range(h):
            tail = _random_series(R, rng, deg - 1)
            out[r][c] = R.add(out[r][c], R.shift(tail, 1))
    return out


def random_sp(R: SeriesRing, half: int, rng, deg: int) -> SMatrix:
    """Product of random symplectic transvections x -> x + c <v, x> v."""
    h = 2 * half
    J = _antidiag_J(R, half)
    g = R.mident(h)
    F = R.field
    for _ in range(3 * h + 2):
        v = [_random_series(R, rng, deg) for _ in range(h)]
        c = R.const(F.random_element(rng, nonzero=True))
        vJ = [R._dot(v, [J[r][col] for r in range(h)]) for col in range(h)]
        T = [[R.add(R.one if r == col else R.zero, R.mul(c, R.mul(v[r], vJ[col]))) for col in range(h)]
             for r in range(h)]
        g = R.mmul(T, g)
    return g




def lattice_basis(H: EpsModule, omega: Subspace, R: SeriesRing, kind: str) -> tuple[SMatrix, SMatrix]:
    """(B, B*) over R with B R^h lifting omega and B B* = t^e.

    For kind C, B is normalised so that B^T J B = t^e J, and then B* = J^T B^T J.
    """
    e, h = H.e, H.rank
    U, expo = adapted_basis(H, omega)
    Ul = _lift_poly(R, U)
    if kind != "C":
        B = [[R.shift(Ul[r][c], expo[c]) for c in range(h)] for r in range(h)]
        Ui = R.minv(Ul)
        Bd = [[R.shift(Ui[r][c], e - expo[r]) for c in range(h)] for r in range(h)]
        return B, Bd
    big = SeriesRing(H.field, R.prec + e)
    Ub = _lift_poly(big, U)
    B0 = [[big.shift(Ub[r][c], expo[c]) for c in range(h)] for r in range(h)]
    Jb = _antidiag_J(big, h // 2)
    G = big.mmul(big.mtranspose(B0), big.mmul(Jb, B0))
    S = [[R.change_prec(big.divide_t(x, e), R.prec) for x in row] for row in G]
    Q = symplectic_basis(R, S, h // 2)
    B = R.mmul([[R.change_prec(x, R.prec) for x in row] for row in B0], Q)
    J = _antidiag_J(R, h // 2)
    Bd = R.mmul(R.mtranspose(J), R.mmul(R.mtranspose(B), J))
    return B, Bd


# -- sampling ----------------------------------------------------------------

def default_newton_precision(factor: LocalFactor, m: int) -> int:
    return 4 * factor.e * factor.host_rank * m * factor.f


def lift_precision(factor: LocalFactor, m: int) -> int:
    """Working t-adic precision of the lift.

    The determinant of the composite Frobenius has valuation
    m * sum_j dim(omega_j) <= m*f*e*h, so one more digit fixes every point of
    its Newton polygon; 2e is what the reduction itself needs.
    """
    return max(2 * factor.e, m * factor.f * factor.e * factor.host_rank + 1)


def build_factor(factor: LocalFactor, field: FieldCtx, splittings: Sequence[SplittingStructure],
                 gs: Sequence[SMatrix], R: SeriesRing) -> FactorData:
    """Datum from explicit flags and explicit g_j (invertible over R)."""
    f = factor.f
    H = splittings[0].host
    pairing = symplectic_gram(field, factor.e, factor.d) if factor.kind == "C" else None
    te = R.monomial(1, factor.e)
    bases = [lattice_basis(H, s.omega, R, factor.kind) for s in splittings]
    ver_l, frob_l = [], []
    for j in range(f):
        B, Bd = bases[(j - 1) % f]
        A = R.mmul(B, gs[j])
        # Frob~ = t^e Ver~^{-1}: v -> sigma(g^{-1} B*) . sigma(v)
        Ad = R.mmul(R.minv(gs[j]), Bd)
        ver_l.append(A)
        frob_l.append(R.mfrob(Ad, 1))
        assert R.mequal(R.mmul(A, R.mfrob(R.mfrob(Ad, 1), -1)), R.mscale(te, R.mident(H.rank)))
    lift = FactorLift(R, tuple(ver_l), tuple(frob_l))
    return reduce_lift(factor, H, tuple(splittings), pairing, lift)


def reduce_lift(factor: LocalFactor, H: EpsModule, splittings: tuple[SplittingStructure, ...],
                pairing: Matrix | None, lift: FactorLift) -> FactorData:
    F = H.field
    e, n = H.e, H.dim
    frob = tuple(SemilinearMap.make(F, block_toeplitz(lift.ring, A, e), 1, n) for A in lift.frob)
    ver = tuple(SemilinearMap.make(F, block_toeplitz(lift.ring, A, e), -1, n) for A in lift.ver)
    return FactorData(factor, H, splittings, frob, ver, pairing, lift)


def sample_factor(factor: LocalFactor, field: FieldCtx, rng,
                  splittings: Sequence[SplittingStructure] | None = None,
                  gs: Sequence[Matrix] | None = None) -> FactorData:
    e, f, h = factor.e, factor.f, factor.host_rank
    H = EpsModule(field, e, h)
    if splittings is None:
        if factor.kind == "C":
            G = symplectic_gram(field, e, factor.d)
            splittings = [sample_symplectic_splitting(H, rng, G) for _ in range(f)]
        else:
            splittings = [sample_splitting(H, factor.ranks(j), rng) for j in range(f)]
    R = SeriesRing(field, lift_precision(factor, field.m))
    if gs is not None:
        glist = [R.mconst(g) for g in gs]
    elif factor.kind == "C":
        glist = [random_sp(R, factor.d, rng, 2 * e) for _ in range(f)]
    else:
        glist = [random_gl(R, h, rng, 2 * e) for _ in range(f)]
    return build_factor(factor, field, tuple(splittings), glist, R)


def sample_fv(pel: PELDatum, rng) -> FVDatum:
    F = pel.field
    return FVDatum(pel, tuple(sample_factor(fac, F, rng) for fac in pel.factors))


def standard_splitting(H: EpsModule, half: int) -> SplittingStructure:
    """F^l = eps^(e-l) span(v_1..v_half): the flag of the free Lagrangian
    spanned by the first half of the generators."""
    e = H.e
    steps = [H.zero()]
    for l in range(1, e + 1):
        idx = [g * e + k for g in range(half) for k in range(e - l, e)]
        steps.append(Subspace.coordinate(H.field, H.dim, idx))
    return SplittingStructure(H, tuple(steps), (half,) * e)


def standard_fv(pel: PELDatum, gs_per_factor: Sequence[Sequence[Matrix]]) -> FVDatum:
    """Datum on the standard flags with prescribed constant g_j (kind C only)."""
    F = pel.field
    out = []
    for fac, gs in zip(pel.factors, gs_per_factor):
        if fac.kind != "C":
            raise SignatureError("standard data are defined for kind C factors")
        H = EpsModule(F, fac.e, fac.host_rank)
        sp = standard_splitting(H, fac.d)
        out.append(sample_factor(fac, F, None, [sp] * fac.f, gs))
    return FVDatum(pel, tuple(out))


# -- validation --------------------------------------------------------------

def validate_factor(fd: FactorData) -> DatumReport:
    H = fd.host
    F = H.field
    f, e = fd.f, H.e

    def fail(j, cond, detail=""):
        return DatumReport(False, None, j, cond, detail)

    for j, s in enumerate(fd.splittings):
        rep = validate_splitting(s, fd.pairing)
        if not rep:
            return fail(j, "splitting/" + (rep.condition or ""), rep.detail)
        if s.ranks != fd.factor.ranks(j):
            return fail(j, "splitting/signature")
    for j in range(f):
        Fr, Vr = fd.frob[j], fd.ver[j]
        if kernel(Fr) != image(Vr):
            return fail(j, "ker Frob = im Ver")
        if kernel(Vr) != image(Fr):
            return fail(j, "ker Ver = im Frob")
        if image(Vr) != fd.omega(j - 1):
            return fail(j, "Ver(H) = omega")
        if fd.pairing is not None:
            # <Ver x, y> = sigma^{-1} <x, Frob y>  <=>  A^T G = G sigma^{-1}(A')
            G = fd.pairing
            lhs = mat_mul(F, transpose(Vr.matrix), G)
            rhs = mat_mul(F, G, twist_matrix(F, Fr.matrix, -1))
            if lhs != rhs:
                return fail(j, "pairing compatibility")
    if fd.lift is not None:
        R = fd.lift.ring
        te = R.monomial(1, e)
        for j in range(f):
            A, Ad = fd.lift.ver[j], fd.lift.frob[j]
            if not R.mequal(R.mmul(A, R.mfrob(Ad, -1)), R.mscale(te, R.mident(H.rank))):
                return fail(j, "lift: Ver~ Frob~ = t^e")
            if block_toeplitz(R, A, e) != fd.ver[j].matrix or block_toeplitz(R, Ad, e) != fd.frob[j].matrix:
                return fail(j, "lift: reduction")
    return DatumReport(True)


def validate_fv(datum: FVDatum) -> DatumReport:
    for i, fd in enumerate(datum.factors):
        rep = validate_factor(fd)
        if not rep:
            return DatumReport(False, i, rep.j, rep.condition, rep.detail)
    return DatumReport(True)


# -- polygons ----------------------------------------------------------------

@dataclass(frozen=True)
class Polygon:
    """y-values at x = 0..h of an upper convex polygon starting at (0, 0)."""

    ys: tuple[Fraction, ...]

    @staticmethod
    def from_slopes(slopes: Sequence) -> "Polygon":
        ys = [Fraction(0)]
        for s in slopes:
            ys.append(ys[-1] + Fraction(s))
        return Polygon(tuple(ys))

    @property
    def width(self) -> int:
        return len(self.ys) - 1

    @property
    def slopes(self) -> tuple[Fraction, ...]:
        return tuple(b - a for a, b in zip(self.ys, self.ys[1:]))

    @property
    def convex(self) -> bool:
        s = self.slopes
        return self.ys[0] == 0 and all(a >= b for a, b in zip(s, s[1:]))

    def breakpoints(self) -> list[tuple[int, Fraction]]:
        s = self.slopes
        pts = [(0, self.ys[0])]
        for x in range(1, self.width):
            if s[x - 1] != s[x]:
                pts.append((x, self.ys[x]))
        if self.width:
            pts.append((self.width, self.ys[-1]))
        return pts


def polygon_leq(P: Polygon, Q: Polygon) -> bool:
    if P.width != Q.width:
        raise ValueError("polygons have different x-ranges")
    return all(a <= b for a, b in zip(P.ys, Q.ys))


def average_polygons(polys: Sequence[Polygon]) -> Polygon:
    n = len(polys)
    return Polygon(tuple(sum(ys, Fraction(0)) / n for ys in zip(*(p.ys for p in polys))))


def hdg_of_kr(kr: Sequence[Sequence[int]], h: int | None = None) -> Polygon:
    """Average over j of the partial sums of each (dominant) valuation vector."""
    polys = []
    width = h if h is not None else max(len(v) for v in kr)
    for v in kr:
        v = list(v)
        if any(a < b for a, b in zip(v, v[1:])):
            raise ValueError(f"valuation vector {v} is not dominant")
        if len(v) > width:
            raise ValueError("valuation vector longer than the rank")
        polys.append(Polygon.from_slopes(v + [0] * (width - len(v))))
    return average_polygons(polys)


def kr_type(fd: FactorData) -> tuple[tuple[int, ...], ...]:
    return tuple(module_type(fd.host, s.omega) for s in fd.splittings)


def max_kr(factor: LocalFactor) -> tuple[tuple[int, ...], ...]:
    return tuple(conjugate_partition(factor.ranks(j)) for j in range(factor.f))


def is_max_kr(fd: FactorData) -> bool:
    return kr_type(fd) == max_kr(fd.factor)


def hodge_polygon(fd: FactorData) -> Polygon:
    return hdg_of_kr(kr_type(fd), fd.host.rank)


def pr_polygon(factor: LocalFactor) -> Polygon:
    h = factor.host_rank
    polys = []
    for j in range(factor.f):
        ys = tuple(Fraction(sum(min(s, d) for d in factor.ranks(j))) for s in range(h + 1))
        polys.append(Polygon(ys))
    return average_polygons(polys)


def composite_frobenius(fd: FactorData, R: SeriesRing) -> SMatrix:
    """Matrix of (Frob~_0 o Frob~_{f-1} o ... o Frob~_1)^m on H~_0; linear."""
    m = fd.host.field.m
    f = fd.f
    lift = fd.lift
    cur = R.mident(fd.host.rank)
    twist = 0
    order = [(j % f) for j in range(1, f + 1)] * m
    for j in order:
        A = [[R.change_prec(x, R.prec) for x in row] for row in lift.frob[j]]
        cur = R.mmul(A, R.mfrob(cur, 1))
        twist += 1
    assert twist % m == 0
    return cur


def newton_polygon(fd: FactorData, prec: int | None = None) -> Polygon:
    """Frobenius slopes of the lift, normalised by m*f."""
    if fd.lift is None:
        raise ValueError("Newton polygon needs the lift")
    F = fd.host.field
    m, f, h = F.m, fd.f, fd.host.rank
    N = prec if prec is not None else default_newton_precision(fd.factor, m)
    total = m * sum(s.omega.dim for s in fd.splittings)
    work = min(N, total + 1, fd.lift.prec)
    R = SeriesRing(F, work)
    Phi = composite_frobenius(fd, R)
    cp = R.charpoly(Phi)
    vals = [R.val(c) for c in cp]
    pts = [(i, v if v < work else None) for i, v in enumerate(vals)]
    if pts[-1][1] is None:
        raise PrecisionError(f"determinant valuation not visible at precision {work}; increase N")
    slopes = lower_hull_slopes(pts)
    # a coefficient of unknown valuation is harmless unless the hull passes above `work` there
    ys = [Fraction(0)]
    for s in slopes:
        ys.append(ys[-1] + s)
    for i, v in pts:
        if v is None and ys[i] > work:
            raise PrecisionError(f"coefficient {i} has valuation >= {work}; increase N")
    return Polygon.from_slopes(sorted((s / (m * f) for s in slopes), reverse=True))
