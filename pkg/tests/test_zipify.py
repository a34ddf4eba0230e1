import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from conftest import CONFIGS, antidiag_sp
from zipstrat.dieudonne import hilbert, sample_fv, siegel, standard_fv, unitary
from zipstrat.ffalg import SemilinearMap, identity
from zipstrat.rng import stream
from zipstrat.zipify import (
    LemmaViolation,
    assemble_zip,
    graded_pairing,
    hasse_filtration_criterion,
    hilbert_partial_hasse,
    isotropic,
    mu_ordinary_hasse,
    v1_well_defined,
    verify_zip,
)

NAMES = sorted(CONFIGS)
HILBERT = [n for n in NAMES if n.startswith("hilbert")]


@settings(max_examples=20, deadline=None)
@given(name=st.sampled_from(NAMES), seed=st.integers(0, 2 ** 32))
def test_exactness_lemmas(name, seed):
    z = assemble_zip(sample_fv(CONFIGS[name], stream(seed, 0)), check=False)
    rep = verify_zip(z, literal_ranks=True)
    assert rep, rep.describe()


@settings(max_examples=10, deadline=None)
@given(name=st.sampled_from(NAMES), seed=st.integers(0, 2 ** 32))
def test_v1_independent_of_roots(name, seed):
    d = sample_fv(CONFIGS[name], stream(seed, 0))
    assert v1_well_defined(d.factors[0], stream(seed, 1))


@pytest.mark.parametrize("name", NAMES)
def test_g_is_identity(name):
    fz = assemble_zip(sample_fv(CONFIGS[name], stream(11, 0))).factors[0]
    assert all(g == identity(len(g)) for g in fz.g)


@pytest.mark.parametrize("name", ["siegel-g2-e2", "hilbert-e3", "hilbert-e2-f2"])
def test_c_and_d_isotropic(name):
    for s in range(5):
        fz = assemble_zip(sample_fv(CONFIGS[name], stream(12, s))).factors[0]
        for j in range(fz.f):
            for l in range(1, fz.e + 1):
                G = graded_pairing(fz, j, l)
                assert isotropic(fz.field, G, fz.C(j, l))
                assert isotropic(fz.field, G, fz.D(j, l))


@settings(max_examples=25, deadline=None)
@given(name=st.sampled_from(HILBERT), seed=st.integers(0, 2 ** 32))
def test_partial_hasse_matches_filtration(name, seed):
    d = sample_fv(CONFIGS[name], stream(seed, 0))
    fz = assemble_zip(d).factors[0]
    hp = hilbert_partial_hasse(fz)
    crit = hasse_filtration_criterion(d.factors[0])
    assert set(hp) == set(crit)
    assert all(hp[k].zero == crit[k] for k in hp)


def test_constant_signature_ker_v_rank():
    # d^l constant in l: Ker V^l has dim h - d^{l-1}, which differs from d^l
    d = sample_fv(unitary(3, 3, [[1, 1]], 2), stream(1, 0))
    z = assemble_zip(d)
    assert verify_zip(z)
    assert not verify_zip(z, literal_ranks=True)


def test_standard_ordinary_and_supersingular_hasse():
    pel = siegel(3, 2, 1)
    F = pel.field
    ordi = assemble_zip(standard_fv(pel, [[identity(4)]])).factors[0]
    ss = assemble_zip(standard_fv(pel, [[antidiag_sp(F, 4)]])).factors[0]
    assert not mu_ordinary_hasse(ordi).zero
    assert mu_ordinary_hasse(ss).zero


def test_hasse_rejects_unitary():
    fz = assemble_zip(sample_fv(CONFIGS["unitary-12"], stream(1, 0))).factors[0]
    with pytest.raises(ValueError):
        mu_ordinary_hasse(fz)
    with pytest.raises(ValueError):
        hilbert_partial_hasse(fz)


def test_corrupted_zip_names_lemma():
    z = assemble_zip(sample_fv(hilbert(3, 2, 1), stream(2, 0)))
    fz = z.factors[0]
    F2 = fz.F[0][1]
    zero = SemilinearMap.make(fz.field, tuple((0,) * F2.ncols for _ in range(F2.nrows)), F2.twist, F2.ncols)
    bad_F = ((fz.F[0][0], zero),)
    bad = dataclasses.replace(z, factors=(dataclasses.replace(fz, F=bad_F),))
    rep = verify_zip(bad)
    assert not rep
    assert any(l == 2 and "Im F" in what for _, _, l, what in rep.failures)
    with pytest.raises(LemmaViolation):
        raise LemmaViolation(rep)
