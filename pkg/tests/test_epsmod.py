import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zipstrat.epsmod import (
    EpsModule,
    InfeasibleRanks,
    NotEpsStable,
    SplittingStructure,
    conjugate_partition,
    flag_from_omega_max,
    max_kr_type,
    module_type,
    orthogonal,
    sample_splitting,
    sample_symplectic_splitting,
    symplectic_gram,
    validate_splitting,
)
from zipstrat.ffalg import Subspace, make_field, mat_mul


def brute_type(H, M):
    """Partition via an explicit cyclic decomposition search on tiny modules:
    count elements killed by eps^k (|M[eps^k]| = q^(sum min(part, k)))."""
    F = H.field
    vecs = [v for v in itertools.product(range(F.q), repeat=M.dim)]
    elems = []
    for c in vecs:
        x = [0] * H.dim
        for ci, row in zip(c, M.basis):
            x = [F.add[a][F.mul[ci][b]] for a, b in zip(x, row)]
        elems.append(tuple(x))
    killed = []
    for k in range(H.e + 1):
        killed.append(sum(1 for x in elems if not any(H.eps_power(x, k))))
    # log_q |M[eps^k]| = sum_parts min(part, k)
    logs = [round(np.log(n) / np.log(F.q)) for n in killed]
    at_least = [logs[k] - logs[k - 1] for k in range(1, H.e + 1)]
    parts = []
    for k in range(H.e, 0, -1):
        nxt = at_least[k] if k < H.e else 0
        parts += [k] * (at_least[k - 1] - nxt)
    return tuple(parts)


def test_nil_shape():
    H = EpsModule(make_field(3), 3, 2)
    N = H.nil.matrix
    N2 = mat_mul(H.field, N, N)
    N3 = mat_mul(H.field, N2, N)
    assert any(any(r) for r in N2)
    assert not any(any(r) for r in N3)
    assert H.dim == 6


def test_type_of_free_module_and_socle():
    H = EpsModule(make_field(2), 3, 2)
    assert module_type(H, H.full()) == (3, 3)
    assert module_type(H, H.kernel_eps(1)) == (1, 1)


def test_type_21():
    F = make_field(3)
    H = EpsModule(F, 2, 2)
    v = H.from_coefficients([[1, 0], [0, 0]])
    w = H.from_coefficients([[0, 0], [1, 0]])
    M = Subspace.span(F, H.dim, [v, H.eps(v), H.eps(w)])
    assert module_type(H, M) == (2, 1)


def test_not_stable():
    F = make_field(2)
    H = EpsModule(F, 2, 1)
    with pytest.raises(NotEpsStable):
        module_type(H, Subspace.span(F, 2, [(1, 0)]))


def test_e1_any_subspace_passes():
    F = make_field(3)
    H = EpsModule(F, 1, 3)
    U = Subspace.span(F, 3, [(1, 2, 0)])
    s = SplittingStructure(H, (H.zero(), U), (1,))
    assert validate_splitting(s)


def test_eps_stability_violation():
    F = make_field(2)
    H = EpsModule(F, 2, 1)
    bad = Subspace.span(F, 2, [(1, 0)])  # eps * (1,0) = (0,1) is not in F^0 = 0
    s = SplittingStructure(H, (H.zero(), bad, H.full()), (1, 1))
    rep = validate_splitting(s)
    assert not rep and rep.condition == "eps-stability"


def test_containment_and_rank_violations():
    F = make_field(2)
    H = EpsModule(F, 2, 2)
    a = Subspace.span(F, 4, [(0, 1, 0, 0)])
    b = Subspace.span(F, 4, [(0, 0, 0, 1)])
    rep = validate_splitting(SplittingStructure(H, (H.zero(), a, b), (1, 0)))
    assert rep.condition == "containment"
    rep = validate_splitting(SplittingStructure(H, (H.zero(), a, a), (1, 1)))
    assert rep.condition == "rank"


def test_forced_first_step():
    F = make_field(3)
    H = EpsModule(F, 2, 2)
    s = sample_splitting(H, (2, 0), np.random.default_rng(0))
    assert s.steps[1] == H.kernel_eps(1)


def test_infeasible():
    H = EpsModule(make_field(3), 2, 2)
    with pytest.raises(InfeasibleRanks):
        sample_splitting(H, (3, 0), np.random.default_rng(0))


@pytest.mark.parametrize("p,e,r,ranks", [
    (3, 2, 2, (1, 1)),
    (2, 2, 2, (1, 1)),
    (3, 1, 4, (2,)),
    (3, 3, 2, (1, 1, 1)),
    (2, 2, 3, (1, 2)),
    (3, 2, 3, (2, 1)),
])
def test_sampler_round_trip(p, e, r, ranks):
    H = EpsModule(make_field(p), e, r)
    for seed in range(1000):
        s = sample_splitting(H, ranks, np.random.default_rng(seed))
        assert validate_splitting(s)
        t = module_type(H, s.omega)
        assert len(t) <= r and sum(t) == sum(ranks)


def test_symplectic_sampler_round_trip():
    for p, e, half in [(3, 1, 1), (3, 2, 1), (3, 3, 1), (3, 2, 2), (2, 2, 2)]:
        F = make_field(p)
        H = EpsModule(F, e, 2 * half)
        G = symplectic_gram(F, e, half)
        for seed in range(200):
            s = sample_symplectic_splitting(H, np.random.default_rng(seed), G)
            rep = validate_splitting(s, pairing=G)
            assert rep, rep
            # omega is Lagrangian for the k-valued form
            assert orthogonal(F, G, s.omega) == s.omega


def test_perpendicularity_failure_detected():
    F = make_field(3)
    H = EpsModule(F, 1, 2)
    G = symplectic_gram(F, 1, 1)
    # any line is Lagrangian in dimension 2, so use a 4-dimensional host
    H4 = EpsModule(F, 1, 4)
    G4 = symplectic_gram(F, 1, 2)
    U = Subspace.span(F, 4, [(1, 0, 0, 0), (0, 0, 0, 1)])  # e1 pairs with e4
    rep = validate_splitting(SplittingStructure(H4, (H4.zero(), U), (2,)), pairing=G4)
    assert rep.condition == "perpendicularity"
    assert validate_splitting(SplittingStructure(H, (H.zero(), Subspace.span(F, 2, [(1, 1)])), (1,)), G)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(2, 2, 2), (3, 2, 2), (2, 3, 1), (3, 3, 2), (2, 2, 3)]))
def test_module_type_matches_brute_force(seed, shape):
    p, e, r = shape
    H = EpsModule(make_field(p), e, r)
    rng = np.random.default_rng(seed)
    ranks = [0] * e
    budget = r
    for l in range(e):
        ranks[l] = int(rng.integers(0, r + 1))
    s = sample_splitting(H, ranks, rng)
    M = s.omega
    if H.field.q ** M.dim > 5000:
        return
    t = module_type(H, M)
    assert t == brute_type(H, M)
    # conjugate-partition identity
    dims = [M.dim]
    cur = M
    for _ in range(e):
        cur = H.eps_image(cur)
        dims.append(cur.dim)
    assert sum(dims[k - 1] - dims[k] for k in range(1, e + 1)) == M.dim


def test_feasibility_monotone():
    H = EpsModule(make_field(3), 3, 2)
    rng = np.random.default_rng(5)
    for ranks in itertools.product(range(3), repeat=3):
        s = sample_splitting(H, ranks, rng)
        for smaller in itertools.product(*(range(d + 1) for d in ranks)):
            assert validate_splitting(sample_splitting(H, smaller, rng))


def test_max_type_and_unique_flag():
    assert conjugate_partition((2, 1, 1)) == (3, 1)
    assert max_kr_type((1, 1)) == (2,)
    F = make_field(3)
    H = EpsModule(F, 2, 2)
    # omega of type (2): a free rank-one summand; its flag is forced
    v = H.from_coefficients([[1, 0], [2, 0]])
    omega = Subspace.span(F, 4, [v, H.eps(v)])
    flag = flag_from_omega_max(H, omega)
    assert validate_splitting(SplittingStructure(H, flag, (1, 1)))
    for seed in range(50):
        s = sample_splitting(H, (1, 1), np.random.default_rng(seed))
        if module_type(H, s.omega) == (2,):
            assert s.steps == flag_from_omega_max(H, s.omega)
