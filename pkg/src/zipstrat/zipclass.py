"""EO classification of cycle F-zips: canonical filtration, zip type lookup,
E-orbit oracle and point counts.

A cycle zip is a sequence of blocks M_0, ..., M_{N-1} with F_v: M_{v-1} -> M_v
and V_v: M_v -> M_{v-1}.  The standard zip attached to g = (g_v) has
C_v = span(e_1..e_{c_v}) and

    F_v = g_v E_v sigma^{t_v},   V_v = sigma^{-t_v} Pi_v g_v^{-1},

where E_v kills the first c_{v-1} coordinates and Pi_v keeps them.  Two
tuples give isomorphic zips iff they lie in one orbit of

    g_v -> h_v^{-1} g_v sigma^{t_v}(lev(h_{v-1})) u_v,

h_v in the parabolic P_+ stabilising C_v, u_v in the opposite unipotent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .coxeter import Elem, WeylCtx, WeylFactor, default_x, enumerate_JW, perm_matrix, siegel_J
from .ffalg import (FieldCtx, Matrix, SemilinearMap, Subspace, identity, image, kernel, mat_inverse, mat_mul,
                    preimage, rref, transpose, twist_matrix)


class ClassificationError(RuntimeError):
    pass


class SizeBoundError(ValueError):
    pass


ORBIT_BOUND = 10 ** 7


# -- shapes ------------------------------------------------------------------

@dataclass(frozen=True)
class VertexSpec:
    kind: str    # "GL" or "Sp"
    h: int
    c: int       # dim C_v = dim Ker F_{v+1}

    def __post_init__(self):
        if self.kind not in ("GL", "Sp"):
            raise ValueError(f"unknown group kind {self.kind}")
        if not 0 <= self.c <= self.h:
            raise ValueError("c out of range")
        if self.kind == "Sp" and (self.h % 2 or self.c != self.h // 2):
            raise ValueError("Sp blocks need even h and c = h/2")

    @property
    def weyl_factor(self) -> WeylFactor:
        return WeylFactor("A", self.h) if self.kind == "GL" else WeylFactor("C", self.h // 2)

    def dim_group(self) -> int:
        h = self.h
        return h * h if self.kind == "GL" else h * (h + 1) // 2

    def dim_parabolic(self) -> int:
        c, h = self.c, self.h
        if self.kind == "GL":
            return h * h - c * (h - c)
        return self.dim_group() - c * (c + 1) // 2


@dataclass(frozen=True)
class ZipShape:
    vertices: tuple[VertexSpec, ...]
    twists: tuple[int, ...]       # twists[v] is the Frobenius power on F_v

    def __post_init__(self):
        if len(self.twists) != len(self.vertices) or not self.vertices:
            raise ValueError("one twist per vertex")
        if len({(v.kind, v.h) for v in self.vertices}) != 1:
            raise ValueError("all blocks of a cycle share one group")

    @staticmethod
    def gl(h: int, c: int) -> "ZipShape":
        return ZipShape((VertexSpec("GL", h, c),), (1,))

    @staticmethod
    def sp(g: int) -> "ZipShape":
        return ZipShape((VertexSpec("Sp", 2 * g, g),), (1,))

    @property
    def n(self) -> int:
        return len(self.vertices)

    def c_in(self, v: int) -> int:
        """Dimension of the kernel of F_v, which lives in the previous block."""
        return self.vertices[(v - 1) % self.n].c

    def weyl(self) -> WeylCtx:
        return WeylCtx.cyclic([s.weyl_factor for s in self.vertices])

    def J(self) -> list[tuple[int, int]]:
        return siegel_J(self.weyl(), [s.c for s in self.vertices])

    def dim_G(self) -> int:
        return sum(s.dim_group() for s in self.vertices)

    def dim_P(self) -> int:
        return sum(s.dim_parabolic() for s in self.vertices)


def shape_of_factor_zip(fz) -> ZipShape:
    """Shape of a pipeline FactorZip (blocks in (j, l) order)."""
    kind = "Sp" if fz.data.factor.kind == "C" else "GL"
    verts, tw = [], []
    for j in range(fz.f):
        for l in range(1, fz.e + 1):
            verts.append(VertexSpec(kind, fz.blocks[j][l - 1].dim, fz.C(j, l).dim))
            tw.append(1 if l == 1 else 0)
    return ZipShape(tuple(verts), tuple(tw))


def shape_of_factor(factor) -> ZipShape:
    """Shape read off a LocalFactor: block (j, l) has c = d^l_j."""
    kind = "Sp" if factor.kind == "C" else "GL"
    verts, tw = [], []
    for j in range(factor.f):
        for l in range(1, factor.e + 1):
            verts.append(VertexSpec(kind, factor.host_rank, factor.ranks(j)[l - 1]))
            tw.append(1 if l == 1 else 0)
    return ZipShape(tuple(verts), tuple(tw))


# -- standard zips -----------------------------------------------------------

def _proj(F: FieldCtx, h: int, keep: Iterable[int]) -> Matrix:
    keep = set(keep)
    return tuple(tuple(1 if (i == j and i in keep) else 0 for j in range(h)) for i in range(h))


def standard_maps(shape: ZipShape, F: FieldCtx, gs: Sequence[Matrix]) -> tuple[list, list]:
    Fs, Vs = [], []
    for v, (spec, g) in enumerate(zip(shape.vertices, gs)):
        h, c, t = spec.h, shape.c_in(v), shape.twists[v]
        E = _proj(F, h, range(c, h))
        Pi = _proj(F, h, range(c))
        Fs.append(SemilinearMap.make(F, mat_mul(F, g, E), t, h))
        Vm = mat_mul(F, Pi, mat_inverse(F, g))
        Vs.append(SemilinearMap.make(F, twist_matrix(F, Vm, -t), -t, h))
    return Fs, Vs


# -- canonical filtration ----------------------------------------------------

@dataclass(frozen=True)
class CanonicalFlag:
    steps: tuple[tuple[Subspace, ...], ...]                 # per block, increasing
    signature: tuple[tuple[int, int, int, int], ...]        # (v, dim U, dim F U, dim V^-1 U)


def canonical_filtration(Fs: Sequence[SemilinearMap], Vs: Sequence[SemilinearMap]) -> CanonicalFlag:
    """Close {0, M_v} under U -> F(U) and U -> V^{-1}(U) across the cycle.

    Every block ends with a chain of subspaces; equal-dimension incomparable
    members abort with ClassificationError.
    """
    N = len(Fs)
    F = Fs[0].field
    dims = [f.nrows for f in Fs]
    spaces: list[dict[int, Subspace]] = [{0: Subspace.zero(F, d), d: Subspace.full(F, d)} for d in dims]
    work = [(v, U) for v in range(N) for U in spaces[v].values()]
    done: dict[tuple[int, int], tuple[int, int]] = {}
    guard = sum((d + 1) for d in dims) * 4 + 8
    while work:
        guard -= 1
        if guard < 0:
            raise ClassificationError("closure did not stabilise")
        v, U = work.pop()
        w = (v + 1) % N
        fu, vu = image(Fs[w], U), preimage(Vs[w], U)
        for new in (fu, vu):
            old = spaces[w].get(new.dim)
            if old is None:
                spaces[w][new.dim] = new
                work.append((w, new))
            elif old != new:
                raise ClassificationError(f"block {w}: two distinct subspaces of dimension {new.dim}")
        done[(v, U.dim)] = (fu.dim, vu.dim)
    steps = tuple(tuple(spaces[v][k] for k in sorted(spaces[v])) for v in range(N))
    for v, chain in enumerate(steps):
        for a, b in zip(chain, chain[1:]):
            if not b.contains(a):
                raise ClassificationError(f"block {v}: closure is not a chain")
    sig = tuple(sorted((v, k, *done[(v, k)]) for v in range(N) for k in spaces[v]))
    return CanonicalFlag(steps, sig)


# -- representatives and the lookup table -------------------------------------

def _field_matrix(F: FieldCtx, M) -> Matrix:
    return tuple(tuple(F.neg[1] if x == -1 else x for x in row) for row in M)


def representative(shape: ZipShape, F: FieldCtx, w: Elem) -> list[Matrix]:
    """g_v = w_v x_v as monomial matrices, x = w_0 w_{0,phi(J)}.

    With this choice the locus of type w has |P(F_q)| q^{l(w)} points."""
    W = shape.weyl()
    g = W.mul(w, default_x(W, shape.J()))
    return [_field_matrix(F, perm_matrix(fac, gv, -1)) for fac, gv in zip(W.factors, g)]


@lru_cache(maxsize=None)
def type_table(shape: ZipShape, F: FieldCtx) -> dict:
    """signature -> w for every w in ^JW, from the standard representatives."""
    W = shape.weyl()
    table = {}
    for w in enumerate_JW(W, shape.J()):
        sig = canonical_filtration(*standard_maps(shape, F, representative(shape, F, w))).signature
        if sig in table:
            raise ClassificationError("representatives of two EO types share a canonical type")
        table[sig] = w
    return table


def classify_maps(shape: ZipShape, Fs, Vs) -> Elem:
    sig = canonical_filtration(Fs, Vs).signature
    table = type_table(shape, Fs[0].field)
    try:
        return table[sig]
    except KeyError:
        raise ClassificationError("canonical type matches no EO representative") from None


def classify_standard(shape: ZipShape, F: FieldCtx, gs: Sequence[Matrix]) -> Elem:
    return classify_maps(shape, *standard_maps(shape, F, gs))


@dataclass(frozen=True)
class ZipType:
    shape: ZipShape
    w: Elem

    @property
    def length(self) -> int:
        return self.shape.weyl().length(self.w)

    @property
    def word(self) -> str:
        return self.shape.weyl().word_label(self.w)

    @property
    def is_maximal(self) -> bool:
        W = self.shape.weyl()
        return self.length == max(W.length(u) for u in enumerate_JW(W, self.shape.J()))

    @property
    def is_minimal(self) -> bool:
        return self.length == 0


def zip_type(fz) -> ZipType:
    """EO type of a pipeline FactorZip."""
    shape = shape_of_factor_zip(fz)
    Fs, Vs = fz.cycle_maps()
    return ZipType(shape, classify_maps(shape, Fs, Vs))


def zip_types(z) -> tuple[ZipType, ...]:
    return tuple(zip_type(fz) for fz in z.factors)


# -- the zip group -----------------------------------------------------------

def _antidiag(h: int) -> list[list[int]]:
    return [[1 if i + j == h - 1 else 0 for j in range(h)] for i in range(h)]


def _sp_form(F: FieldCtx, h: int) -> Matrix:
    d = h // 2
    return tuple(tuple((1 if i < d else F.neg[1]) if i + j == h - 1 else 0 for j in range(h)) for i in range(h))


def is_in_group(spec: VertexSpec, F: FieldCtx, g: Matrix) -> bool:
    if spec.kind == "GL":
        return True
    Jm = _sp_form(F, spec.h)
    return mat_mul(F, mat_mul(F, transpose(g), Jm), g) == Jm


def _block(F: FieldCtx, h: int, c: int, A=None, B=None, C=None, D=None) -> Matrix:
    M = [list(r) for r in identity(h)]
    for blk, (r0, c0) in ((A, (0, 0)), (B, (0, c)), (C, (c, 0)), (D, (c, c))):
        if blk is not None:
            for i, row in enumerate(blk):
                for j, x in enumerate(row):
                    M[r0 + i][c0 + j] = x
    return tuple(tuple(r) for r in M)


def _random_mat(F: FieldCtx, r: int, c: int, rng) -> list[list[int]]:
    return [[int(rng.integers(F.q)) for _ in range(c)] for _ in range(r)]


def _random_gl(F: FieldCtx, n: int, rng) -> Matrix:
    from .ffalg import random_invertible
    return random_invertible(F, n, rng)


def _sym_twisted(F: FieldCtx, d: int, rng) -> list[list[int]]:
    """K.S with S symmetric (K the d x d antidiagonal): the blocks allowed in
    symplectic unipotent radicals for the antidiagonal form."""
    S = [[0] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            S[i][j] = S[j][i] = int(rng.integers(F.q))
    return [list(S[d - 1 - i]) for i in range(d)]


def levi_part(spec: VertexSpec, F: FieldCtx, h_mat: Matrix, c: int) -> Matrix:
    h = spec.h
    return tuple(tuple(h_mat[i][j] if (i < c) == (j < c) else 0 for j in range(h)) for i in range(h))


def random_parabolic(spec: VertexSpec, F: FieldCtx, rng) -> Matrix:
    """Random element of P_+ (stabiliser of span(e_1..e_c)) in the block group."""
    h, c = spec.h, spec.c
    if spec.kind == "GL":
        A, D = _random_gl(F, c, rng), _random_gl(F, h - c, rng)
        lev = _block(F, h, c, A=A, D=D)
        uni = _block(F, h, c, B=_random_mat(F, c, h - c, rng))
        return mat_mul(F, lev, uni)
    d = c
    A = _random_gl(F, d, rng)
    K = _antidiag(d)
    Dm = mat_mul(F, mat_mul(F, K, transpose(mat_inverse(F, A))), K)
    lev = _block(F, h, d, A=A, D=Dm)
    uni = _block(F, h, d, B=_sym_twisted(F, d, rng))
    return mat_mul(F, lev, uni)


def random_opposite_unipotent(spec: VertexSpec, F: FieldCtx, c: int, rng) -> Matrix:
    h = spec.h
    if spec.kind == "GL":
        return _block(F, h, c, C=_random_mat(F, h - c, c, rng))
    return _block(F, h, c, C=_sym_twisted(F, c, rng))


def e_act(shape: ZipShape, F: FieldCtx, gs: Sequence[Matrix], hs: Sequence[Matrix],
          us: Sequence[Matrix]) -> list[Matrix]:
    """g_v -> h_v^{-1} g_v sigma^{t_v}(lev(h_{v-1})) u_v."""
    N = shape.n
    out = []
    for v in range(N):
        prev = (v - 1) % N
        lev = levi_part(shape.vertices[prev], F, hs[prev], shape.vertices[prev].c)
        right = mat_mul(F, twist_matrix(F, lev, shape.twists[v]), us[v])
        out.append(mat_mul(F, mat_mul(F, mat_inverse(F, hs[v]), gs[v]), right))
    return out


def random_e_element(shape: ZipShape, F: FieldCtx, rng) -> tuple[list[Matrix], list[Matrix]]:
    hs = [random_parabolic(s, F, rng) for s in shape.vertices]
    us = [random_opposite_unipotent(s, F, shape.c_in(v), rng) for v, s in enumerate(shape.vertices)]
    return hs, us


def random_group_element(shape: ZipShape, F: FieldCtx, rng) -> list[Matrix]:
    """Random g with g_v in the block group (Sp via a Bruhat-type product)."""
    out = []
    for v, s in enumerate(shape.vertices):
        if s.kind == "GL":
            out.append(_random_gl(F, s.h, rng))
            continue
        d = s.h // 2
        g = identity(s.h)
        for _ in range(3):
            g = mat_mul(F, g, random_parabolic(s, F, rng))
            g = mat_mul(F, g, random_opposite_unipotent(s, F, d, rng))
        out.append(g)
    return out


# -- enumeration, oracle and point counts -------------------------------------

def _all_matrices(F: FieldCtx, r: int, c: int):
    for flat in itertools.product(range(F.q), repeat=r * c):
        yield tuple(tuple(flat[i * c:(i + 1) * c]) for i in range(r))


def group_order(spec: VertexSpec, q: int) -> int:
    h = spec.h
    if spec.kind == "GL":
        out = 1
        for i in range(h):
            out *= q ** h - q ** i
        return out
    d = h // 2
    out = q ** (d * d)
    for i in range(1, d + 1):
        out *= q ** (2 * i) - 1
    return out


def enumerate_group(spec: VertexSpec, F: FieldCtx) -> list[Matrix]:
    if group_order(spec, F.q) > ORBIT_BOUND:
        raise SizeBoundError("group too large to enumerate")
    from .ffalg import rank
    out = [g for g in _all_matrices(F, spec.h, spec.h) if rank(F, g, spec.h) == spec.h]
    if spec.kind == "Sp":
        out = [g for g in out if is_in_group(spec, F, g)]
    return out


def _generators(shape: ZipShape, F: FieldCtx) -> list[tuple[list[Matrix], list[Matrix]]]:
    """Elementary elements of E: one nontrivial component each."""
    N = shape.n
    gens = []
    for v, s in enumerate(shape.vertices):
        h = s.h
        ids = [identity(x.h) for x in shape.vertices]
        ps, us = [], []
        if s.kind == "GL":
            c = s.c
            for i in range(h):
                for j in range(h):
                    if i == j:
                        continue
                    for a in range(1, F.q):
                        E = [list(r) for r in identity(h)]
                        E[i][j] = a
                        E = tuple(tuple(r) for r in E)
                        if not (i >= c and j < c):
                            ps.append(E)
            for i in range(h):
                for a in range(2, F.q):
                    E = [list(r) for r in identity(h)]
                    E[i][i] = a
                    ps.append(tuple(tuple(r) for r in E))
            cin = shape.c_in(v)
            for i in range(cin, h):
                for j in range(cin):
                    for a in range(1, F.q):
                        E = [list(r) for r in identity(h)]
                        E[i][j] = a
                        us.append(tuple(tuple(r) for r in E))
        else:
            d = h // 2
            K = _antidiag(d)
            for A in enumerate_group(VertexSpec("GL", d, 0), F):
                Dm = mat_mul(F, mat_mul(F, K, transpose(mat_inverse(F, A))), K)
                ps.append(_block(F, h, d, A=A, D=Dm))
            for S in _all_matrices(F, d, d):
                KS = mat_mul(F, K, S)
                if KS != transpose(KS):
                    continue
                ps.append(_block(F, h, d, B=S))
                us.append(_block(F, h, d, C=S))
        for p in ps:
            hs = list(ids)
            hs[v] = p
            gens.append((hs, list(ids)))
        for u in us:
            uu = list(ids)
            uu[v] = u
            gens.append((list(ids), uu))
    return gens


def orbit_oracle(shape: ZipShape, F: FieldCtx) -> list[list[tuple[Matrix, ...]]]:
    """Exhaustive E(F_q)-orbits on G(F_q) by union-find under generators of E."""
    total = 1
    for s in shape.vertices:
        total *= group_order(s, F.q)
    if total > ORBIT_BOUND:
        raise SizeBoundError(f"|G(F_q)| = {total} exceeds {ORBIT_BOUND}")
    elems = [tuple(t) for t in itertools.product(*(enumerate_group(s, F) for s in shape.vertices))]
    index = {g: i for i, g in enumerate(elems)}
    parent = list(range(len(elems)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    gens = _generators(shape, F)
    for i, g in enumerate(elems):
        for hs, us in gens:
            j = index[tuple(e_act(shape, F, g, hs, us))]
            a, b = find(i), find(j)
            if a != b:
                parent[a] = b
    groups: dict[int, list] = {}
    for i, g in enumerate(elems):
        groups.setdefault(find(i), []).append(g)
    return sorted(groups.values(), key=len)


def gl_coset_representatives(F: FieldCtx, h: int, c: int):
    """One g per coset g U_- of GL_h(F_q), U_- = [[1, 0], [*, 1]] (blocks c, h-c)."""
    from .ffalg import rank
    k = h - c
    for Y in _all_matrices(F, h, k):
        if k and rank(F, transpose(Y), h) < k:
            continue
        R, piv = rref(F, transpose(Y), h) if k else ((), ())
        free = [i for i in range(h) if i not in piv]
        for A in enumerate_group(VertexSpec("GL", c, 0), F) if c else [()]:
            # first c columns: A placed on the free coordinates
            g = [[0] * h for _ in range(h)]
            for col in range(c):
                for r_i, r in enumerate(free):
                    g[r][col] = A[r_i][col]
            for col in range(k):
                for r in range(h):
                    g[r][c + col] = Y[r][col]
            yield tuple(tuple(r) for r in g)


def point_counts(shape: ZipShape, F: FieldCtx) -> dict[Elem, int]:
    """|{g in G(F_q): type(g) = w}| for a single-vertex shape."""
    if shape.n != 1:
        raise ValueError("point counts are implemented for single-block shapes")
    spec = shape.vertices[0]
    counts = {w: 0 for w in enumerate_JW(shape.weyl(), shape.J())}
    if spec.kind == "GL":
        mult = F.q ** (spec.c * (spec.h - spec.c))
        for g in gl_coset_representatives(F, spec.h, spec.c):
            counts[classify_standard(shape, F, [g])] += mult
    else:
        for g in enumerate_group(spec, F):
            counts[classify_standard(shape, F, [g])] += 1
    return counts


def point_count(shape: ZipShape, F: FieldCtx, w: Elem) -> int:
    return point_counts(shape, F)[w]


def parabolic_order(shape: ZipShape, q: int) -> int:
    """|P_+(F_q)| for a single-vertex shape."""
    s = shape.vertices[0]
    if s.kind == "GL":
        return (group_order(VertexSpec("GL", s.c, 0), q) * group_order(VertexSpec("GL", s.h - s.c, 0), q)
                * q ** (s.c * (s.h - s.c)))
    d = s.c
    return group_order(VertexSpec("GL", d, 0), q) * q ** (d * (d + 1) // 2)


def interpolate(points: Sequence[tuple[int, Fraction]]) -> list[Fraction]:
    """Coefficients (constant first) of the interpolating polynomial."""
    n = len(points)
    coeffs = [Fraction(0)] * n
    for i, (xi, yi) in enumerate(points):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xj * basis[k + 1]
            denom *= xi - xj
        for k in range(n):
            coeffs[k] += yi * basis[k] / denom
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def fitted_degree(shape: ZipShape, counts_by_q: dict[int, int]) -> int:
    """Degree of the polynomial interpolating the counts: |P(F_q)| times the
    interpolant of count/|P(F_q)|, which must be integral with fewer
    coefficients than sample points."""
    pts = [(q, Fraction(n, parabolic_order(shape, q))) for q, n in sorted(counts_by_q.items())]
    coeffs = interpolate(pts)
    if len(coeffs) >= len(pts):
        raise ClassificationError("ratio is not determined by the sample points")
    if any(c.denominator != 1 for c in coeffs):
        raise ClassificationError("ratio polynomial is not integral")
    return shape.dim_P() + len(coeffs) - 1


# -- pipeline criteria -------------------------------------------------------

def minimal_eo_criterion(fd) -> bool:
    """Comparability of C and D in every block, read on the filtrations of H:
    F^l vs eps^{-1}F^{l-2} for l >= 2, and F^1 vs eps^{e-1} Ver^{-1}(F^{e-1}_{j-1})."""
    H = fd.host
    e, f = H.e, fd.f
    for j in range(f):
        st = fd.splittings[j].steps
        for l in range(2, e + 1):
            A, B = st[l], H.eps_preimage(st[l - 2])
            if not (A.contains(B) or B.contains(A)):
                return False
        K = preimage(fd.ver[j], fd.splittings[(j - 1) % f].steps[e - 1])
        for _ in range(e - 1):
            K = H.eps_image(K)
        if not (st[1].contains(K) or K.contains(st[1])):
            return False
    return True


def reduced_maps(fd) -> tuple[list[SemilinearMap], list[SemilinearMap]]:
    """Frob and Ver reduced to H/eps H (coordinates: the eps^0 coefficients)."""
    H = fd.host
    e, h, F = H.e, H.rank, H.field

    def red(m: SemilinearMap) -> SemilinearMap:
        cols = []
        for g in range(h):
            x = [0] * H.dim
            x[g * e] = 1
            y = m(x)
            cols.append([y[r * e] for r in range(h)])
        return SemilinearMap.make(F, transpose(tuple(map(tuple, cols))), m.twist, h)

    return [red(fd.frob[j]) for j in range(fd.f)], [red(fd.ver[j]) for j in range(fd.f)]


def reduced_type(fd) -> ZipType | None:
    """Type of the reduced zip on H/eps H at maximal KR type (kind C); None
    when the KR type is not maximal, since the reduction is then no zip."""
    from .dieudonne import is_max_kr
    if fd.factor.kind != "C":
        raise ValueError("reduced data is implemented for kind C factors")
    if not is_max_kr(fd):
        return None
    Fs, Vs = reduced_maps(fd)
    for a, b in zip(Fs, Vs):
        if image(a) != kernel(b):
            raise ClassificationError("reduced maps are not exact at maximal KR type")
    h = fd.host.rank
    shape = ZipShape(tuple(VertexSpec("Sp", h, h // 2) for _ in range(fd.f)), (1,) * fd.f)
    return ZipType(shape, classify_maps(shape, Fs, Vs))
