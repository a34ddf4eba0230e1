"""Semi-simplification of a Dieudonne datum with splitting flags into graded
F-zip data.

For each residue index j and 1 <= l <= e the block M^l_j is the quotient
eps^{-1}F^{l-1}/F^{l-1} of H_j.  Blocks are visited in the cyclic order
(j, 1), ..., (j, e), (j+1, 1), ...; F goes forward along this cycle and V
backward.  The edge (j-1, e) -> (j, 1) carries Frobenius (F sigma-linear, V
sigma^{-1}-linear); all other edges are linear.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .dieudonne import FactorData, FVDatum
from .epsmod import EpsModule, SplittingStructure, pairing_value
from .ffalg import (
    FieldCtx,
    Matrix,
    SemilinearMap,
    Subspace,
    complement_basis,
    identity,
    image,
    kernel,
    mat_inverse,
    mat_mul,
    preimage,
    solve_linear,
    subspace_sum,
    transpose,
    twist_matrix,
)
from .tseries import SeriesRing


class LemmaViolation(AssertionError):
    def __init__(self, report: "ZipReport"):
        super().__init__(report.describe())
        self.report = report


# -- graded blocks -----------------------------------------------------------

@dataclass(frozen=True)
class GradedBlock:
    """M = pre/sub with an explicit section and coordinate projection."""

    j: int
    l: int
    pre: Subspace
    sub: Subspace
    section: Matrix          # rows of H spanning a complement of sub in pre
    proj: Matrix             # dim x n matrix, kills sub, section[i] -> e_i

    @property
    def dim(self) -> int:
        return len(self.section)

    def coords(self, F: FieldCtx, x: Sequence[int]) -> tuple[int, ...]:
        from .ffalg import mat_vec
        return mat_vec(F, self.proj, x)

    def lift(self, F: FieldCtx, c: Sequence[int]) -> tuple[int, ...]:
        out = [0] * self.pre.n
        for ci, row in zip(c, self.section):
            if ci:
                mr = F.mul[ci]
                out = [F.add[a][mr[b]] for a, b in zip(out, row)]
        return tuple(out)

    def image_of(self, F: FieldCtx, U: Subspace) -> Subspace:
        """Image in M of a subspace of pre."""
        return Subspace.span(F, self.dim, (self.coords(F, v) for v in U.basis))


def make_block(H: EpsModule, j: int, l: int, sub: Subspace) -> GradedBlock:
    F = H.field
    pre = H.eps_preimage(sub)
    section = complement_basis(sub, pre)
    ext = complement_basis(pre, H.full())
    rows = list(sub.basis) + list(section) + list(ext)
    # columns of M are the basis vectors; proj = middle rows of M^{-1}
    Minv = mat_inverse(F, transpose(tuple(rows)))
    s = sub.dim
    return GradedBlock(j, l, pre, sub, tuple(section), tuple(Minv[s:s + len(section)]))


# -- zip data ----------------------------------------------------------------

@dataclass(frozen=True)
class TwistDescriptor:
    """Cyclic shift of the (j, l) labels, with Frobenius on the wrap edges."""

    e: int
    f: int
    m: int

    @property
    def labels(self) -> list[tuple[int, int]]:
        return [(j, l) for j in range(self.f) for l in range(1, self.e + 1)]

    def step(self, label: tuple[int, int]) -> tuple[tuple[int, int], int]:
        """Next label and the Frobenius power picked up on the way."""
        j, l = label
        if l < self.e:
            return (j, l + 1), 0
        return ((j + 1) % self.f, 1), 1

    def apply(self, label: tuple[int, int], times: int) -> tuple[tuple[int, int], int]:
        power = 0
        for _ in range(times):
            label, s = self.step(label)
            power += s
        return label, power

    @property
    def order(self) -> int:
        """Smallest n with every label and the accumulated Frobenius fixed."""
        return self.e * self.f * self.m


@dataclass(frozen=True)
class FactorZip:
    data: FactorData
    blocks: tuple[tuple[GradedBlock, ...], ...]       # blocks[j][l-1]
    F: tuple[tuple[SemilinearMap, ...], ...]          # F[j][l-1]: into block (j, l)
    V: tuple[tuple[SemilinearMap, ...], ...]          # V[j][l-1]: out of block (j, l)
    g: tuple[Matrix, ...]                             # on M^1_j
    g_canonical: bool
    twist: TwistDescriptor

    @property
    def e(self) -> int:
        return self.data.host.e

    @property
    def f(self) -> int:
        return self.data.f

    @property
    def field(self) -> FieldCtx:
        return self.data.host.field

    def vertices(self) -> list[tuple[int, int]]:
        return self.twist.labels

    def F_out(self, j: int, l: int) -> SemilinearMap:
        """F leaving block (j, l)."""
        if l < self.e:
            return self.F[j][l]
        return self.F[(j + 1) % self.f][0]

    def C(self, j: int, l: int) -> Subspace:
        return kernel(self.F_out(j, l))

    def D(self, j: int, l: int) -> Subspace:
        return kernel(self.V[j][l - 1])

    def omega_line(self, j: int, l: int) -> Subspace:
        """omega^l = F^l / F^{l-1} inside M^l."""
        b = self.blocks[j][l - 1]
        return b.image_of(self.field, self.data.splittings[j].steps[l])

    def cycle_maps(self) -> tuple[list[SemilinearMap], list[SemilinearMap]]:
        """(Fs, Vs) indexed by vertex position; Fs[v]: M_{v-1} -> M_v with the
        wrap-edge F replaced by g^{-1} F so that Im F_v = Ker V_v."""
        F = self.field
        Fs, Vs = [], []
        for j in range(self.f):
            for l in range(1, self.e + 1):
                fm = self.F[j][l - 1]
                if l == 1:
                    gi = SemilinearMap.make(F, mat_inverse(F, self.g[j]), 0, self.blocks[j][0].dim)
                    fm = gi @ fm
                Fs.append(fm)
                Vs.append(self.V[j][l - 1])
        return Fs, Vs


@dataclass(frozen=True)
class FZipPlus:
    datum: FVDatum
    factors: tuple[FactorZip, ...]


# -- construction ------------------------------------------------------------

def build_M(fd: FactorData) -> tuple[tuple[GradedBlock, ...], ...]:
    H = fd.host
    return tuple(
        tuple(make_block(H, j, l, s.steps[l - 1]) for l in range(1, H.e + 1))
        for j, s in enumerate(fd.splittings))


def _map_from_columns(F: FieldCtx, cols: Sequence[Sequence[int]], twist: int, nrows: int) -> SemilinearMap:
    if not cols:
        return SemilinearMap(F, tuple(() for _ in range(nrows)), twist % F.m, nrows, 0)
    return SemilinearMap.make(F, transpose(tuple(tuple(c) for c in cols)), twist, len(cols))


def v1_columns(fd: FactorData, blocks, j: int, shift: Sequence[Sequence[int]] | None = None) -> list:
    """Columns of V^1_j: x -> Ver_j(eps^{1-e} x) mod F^{e-1}_{j-1}; ``shift``
    optionally perturbs the chosen eps^{e-1}-roots (for well-definedness tests)."""
    H = fd.host
    F = H.field
    e, f = H.e, fd.f
    tgt = blocks[(j - 1) % f][e - 1]
    cols = []
    for i, x in enumerate(blocks[j][0].section):
        y = H.eps_root(x, e - 1)
        if shift is not None:
            y = tuple(F.add[a][b] for a, b in zip(y, shift[i]))
        cols.append(tgt.coords(F, fd.ver[j](y)))
    return cols


def build_FV(fd: FactorData, blocks) -> tuple[tuple, tuple]:
    H = fd.host
    F = H.field
    e, f = H.e, fd.f
    Fm, Vm = [], []
    for j in range(f):
        frow, vrow = [], []
        for l in range(1, e + 1):
            cur = blocks[j][l - 1]
            if l == 1:
                src = blocks[(j - 1) % f][e - 1]
                fcols = [cur.coords(F, fd.frob[j](x)) for x in src.section]
                frow.append(_map_from_columns(F, fcols, 1, cur.dim))
                vrow.append(_map_from_columns(F, v1_columns(fd, blocks, j), -1, src.dim))
            else:
                prev = blocks[j][l - 2]
                # inclusion eps^{-1}F^{l-2} -> eps^{-1}F^{l-1}, then quotient
                fcols = [cur.coords(F, x) for x in prev.section]
                vcols = [prev.coords(F, H.eps(x)) for x in cur.section]
                frow.append(_map_from_columns(F, fcols, 0, cur.dim))
                vrow.append(_map_from_columns(F, vcols, 0, prev.dim))
        Fm.append(tuple(frow))
        Vm.append(tuple(vrow))
    return tuple(Fm), tuple(Vm)


def canonical_g(fd: FactorData, blocks) -> tuple[tuple[Matrix, ...], bool]:
    """g_j on M^1_j from the lift: x = eps^{e-1} y -> eps^{e-1} (t^{-e} Frob~ Ver~)(y).

    Without a lift a substitute iso taking Ker V^1 onto Im F^1 is returned
    and the flag is False.
    """
    H = fd.host
    F = H.field
    e, h, f = H.e, H.rank, fd.f
    if fd.lift is None:
        return _substitute_g(fd, blocks), False
    R = fd.lift.ring
    out = []
    for j in range(f):
        # Frob~_j o Ver~_j: v -> A' sigma(A sigma^{-1} v) = A' sigma(A) v
        prod = R.mmul(fd.lift.frob[j], R.mfrob(fd.lift.ver[j], 1))
        C0 = tuple(tuple(R.divide_t(x, e)[0] for x in row) for row in prod)
        blk = blocks[j][0]
        cols = []
        for x in blk.section:
            top = [x[g * e + e - 1] for g in range(h)]
            z = [0] * h
            for r in range(h):
                acc = 0
                for c in range(h):
                    if C0[r][c] and top[c]:
                        acc = F.add[acc][F.mul[C0[r][c]][top[c]]]
                z[r] = acc
            vec = [0] * H.dim
            for g in range(h):
                vec[g * e + e - 1] = z[g]
            cols.append(blk.coords(F, vec))
        out.append(transpose(tuple(tuple(c) for c in cols)))
    return tuple(out), True


def _basis_change(F: FieldCtx, src: Matrix, dst: Matrix) -> Matrix:
    """Matrix sending the rows of src (a basis) to the rows of dst."""
    S = transpose(src)
    D = transpose(dst)
    return mat_mul(F, D, mat_inverse(F, S))


def _substitute_g(fd: FactorData, blocks) -> tuple[Matrix, ...]:
    H = fd.host
    F = H.field
    Fm, Vm = build_FV(fd, blocks)
    out = []
    for j in range(fd.f):
        n = blocks[j][0].dim
        K, I = kernel(Vm[j][0]), image(Fm[j][0])
        full = Subspace.full(F, n)
        src = K.basis + complement_basis(K, full)
        dst = I.basis + complement_basis(I, full)
        out.append(_basis_change(F, src, dst))
    return tuple(out)


def zipify_factor(fd: FactorData) -> FactorZip:
    blocks = build_M(fd)
    Fm, Vm = build_FV(fd, blocks)
    g, canon = canonical_g(fd, blocks)
    tw = TwistDescriptor(fd.host.e, fd.f, fd.host.field.m)
    return FactorZip(fd, blocks, Fm, Vm, g, canon, tw)


def assemble_zip(datum: FVDatum, check: bool = True) -> FZipPlus:
    z = FZipPlus(datum, tuple(zipify_factor(fd) for fd in datum.factors))
    if check:
        rep = verify_zip(z)
        if not rep:
            raise LemmaViolation(rep)
    return z


# -- verification ------------------------------------------------------------

@dataclass(frozen=True)
class ZipReport:
    ok: bool
    failures: tuple[tuple[int, int, int, str], ...] = ()

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "all zip checks pass"
        return "; ".join(f"factor {i} (j={j}, l={l}): {what}" for i, j, l, what in self.failures)


def expected_ker_v_dim(fz: FactorZip, j: int, l: int) -> int:
    """dim Ker V^l_j = h - d^{l-1}_j, with d^0_j read as d^e_{j-1}."""
    fac = fz.data.factor
    h = fz.data.host.rank
    if l >= 2:
        return h - fac.ranks(j)[l - 2]
    return h - fac.ranks((j - 1) % fz.f)[fz.e - 1]


def check_factor(fz: FactorZip, literal_ranks: bool = False) -> list[tuple[int, int, str]]:
    """Structural lemma checks; returns (j, l, failure) triples."""
    F = fz.field
    bad = []
    fac = fz.data.factor
    h = fz.data.host.rank
    for j in range(fz.f):
        for l in range(1, fz.e + 1):
            blk = fz.blocks[j][l - 1]
            if blk.dim != h:
                bad.append((j, l, f"dim M = {blk.dim}, expected {h}"))
                continue
            Fl, Vl = fz.F[j][l - 1], fz.V[j][l - 1]
            kV, iF = kernel(Vl), image(Fl)
            if l >= 2:
                if iF != kV:
                    bad.append((j, l, "Im F != Ker V"))
            else:
                gK = Subspace.span(F, blk.dim, (SemilinearMap.make(F, fz.g[j], 0, blk.dim)(v) for v in kV.basis))
                if gK != iF:
                    bad.append((j, l, "g(Ker V^1) != Im F^1"))
            if kernel(Fl) != image(Vl):
                bad.append((j, l, "Ker F != Im V"))
            if kV.dim != expected_ker_v_dim(fz, j, l):
                bad.append((j, l, f"dim Ker V = {kV.dim}, expected {expected_ker_v_dim(fz, j, l)}"))
            if literal_ranks:
                d = fac.ranks(j)[l - 1]
                if kV.dim != d:
                    bad.append((j, l, f"dim Ker V = {kV.dim} != d^l = {d}"))
                if kernel(Fl).dim != h - d:
                    bad.append((j, l, f"dim Ker F = {kernel(Fl).dim} != h - d^l = {h - d}"))
            # F induces M/C -> D and V induces M/D -> C; both must be onto
            if Fl.ncols - kernel(Fl).dim != kV.dim:
                bad.append((j, l, "F does not induce an iso M/C -> D"))
            if Vl.ncols - kV.dim != kernel(Fl).dim:
                bad.append((j, l, "V does not induce an iso M/D -> C"))
    return bad


def verify_zip(z: FZipPlus, literal_ranks: bool = False) -> ZipReport:
    fails = []
    for i, fz in enumerate(z.factors):
        for j, l, what in check_factor(fz, literal_ranks):
            fails.append((i, j, l, what))
    return ZipReport(not fails, tuple(fails))


def v1_well_defined(fd: FactorData, rng) -> bool:
    """V^1 computed with randomly perturbed eps^{e-1}-roots agrees."""
    H = fd.host
    F = H.field
    blocks = build_M(fd)
    ker = H.kernel_eps(H.e - 1)
    for j in range(fd.f):
        base = v1_columns(fd, blocks, j)
        shift = []
        for _ in blocks[j][0].section:
            c = [int(x) for x in rng.integers(0, F.q, size=ker.dim)]
            v = [0] * H.dim
            for ci, row in zip(c, ker.basis):
                v = [F.add[a][F.mul[ci][b]] for a, b in zip(v, row)]
            shift.append(v)
        if v1_columns(fd, blocks, j, shift) != base:
            return False
    return True


def graded_pairing(fz: FactorZip, j: int, l: int) -> Matrix:
    """Form on M^l_j in section coordinates: (x, y) -> <u, y> with eps^{e-l} u = x."""
    H = fz.data.host
    G = fz.data.pairing
    blk = fz.blocks[j][l - 1]
    roots = [H.eps_root(x, H.e - l) for x in blk.section]
    return tuple(tuple(pairing_value(H.field, G, u, y) for y in blk.section) for u in roots)


def isotropic(F: FieldCtx, gram: Matrix, U: Subspace) -> bool:
    return all(pairing_value(F, gram, x, y) == 0 for x in U.basis for y in U.basis)


# -- Hasse invariants --------------------------------------------------------

def _coords_in(F: FieldCtx, U: Subspace, v: Sequence[int]) -> tuple[int, ...]:
    sol = solve_linear(F, transpose(U.basis), v, U.dim)
    if sol is None:
        raise ArithmeticError("vector is not in the subspace")
    return sol


def v_restricted(fz: FactorZip, j: int, l: int) -> Matrix:
    """Matrix of V^l_j restricted to omega^l_j -> omega^{l-1} (omega^e_{j-1} for l = 1)."""
    F = fz.field
    src = fz.omega_line(j, l)
    dst = fz.omega_line(j, l - 1) if l >= 2 else fz.omega_line((j - 1) % fz.f, fz.e)
    V = fz.V[j][l - 1]
    cols = [_coords_in(F, dst, V(x)) for x in src.basis]
    return transpose(tuple(cols)) if cols else ()


def _det(F: FieldCtx, A: Matrix) -> int:
    n = len(A)
    M = [list(r) for r in A]
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = F.neg[det]
        det = F.mul[det][M[c][c]]
        inv = F.inv[M[c][c]]
        for r in range(c + 1, n):
            if M[r][c]:
                fct = F.mul[M[r][c]][inv]
                M[r] = [F.sub[a][F.mul[fct][b]] for a, b in zip(M[r], M[c])]
    return det


@dataclass(frozen=True)
class HasseValue:
    zero: bool
    scalar: int


def hilbert_partial_hasse(fz: FactorZip) -> dict[tuple[int, int], HasseValue]:
    """h^l_j as the determinant of V on the omega lines (Hilbert shape: d = 1, kind C)."""
    fac = fz.data.factor
    if fac.kind != "C" or fac.d != 1:
        raise ValueError("partial Hasse invariants need a Hilbert-shaped factor")
    out = {}
    for j in range(fz.f):
        for l in range(1, fz.e + 1):
            s = _det(fz.field, v_restricted(fz, j, l))
            out[(j, l)] = HasseValue(s == 0, s)
    return out


def hasse_filtration_criterion(fd: FactorData) -> dict[tuple[int, int], bool]:
    """Direct filtration tests for h^l_j = 0, computed on H without the zip."""
    H = fd.host
    e, f = H.e, fd.f
    out = {}
    for j in range(f):
        steps = fd.splittings[j].steps
        for l in range(2, e + 1):
            out[(j, l)] = H.eps_image(steps[l]) == steps[l - 2]
        # F^1 inside Ker V^1: Ver(eps^{1-e} F^1) lies in F^{e-1}_{j-1}
        roots = H.eps_preimage(steps[1], e - 1)
        prev = fd.splittings[(j - 1) % f].steps[e - 1]
        out[(j, 1)] = prev.contains(image(fd.ver[j], roots))
    return out


def mu_ordinary_hasse(fz: FactorZip) -> HasseValue:
    """Product over all (j, l) of det(V restricted to the omega pieces)."""
    if fz.data.factor.kind != "C":
        raise ValueError("the mu-ordinary Hasse invariant is defined here for kind C factors")
    F = fz.field
    val = 1
    for j in range(fz.f):
        for l in range(1, fz.e + 1):
            val = F.mul[val][_det(F, v_restricted(fz, j, l))]
    return HasseValue(val == 0, val)
