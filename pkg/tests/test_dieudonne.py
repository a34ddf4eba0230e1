from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import CONFIGS, antidiag_sp
from zipstrat.dieudonne import (
    LocalFactor,
    Polygon,
    SignatureError,
    hdg_of_kr,
    hodge_polygon,
    is_max_kr,
    kr_type,
    max_kr,
    newton_polygon,
    polygon_leq,
    pr_polygon,
    sample_fv,
    siegel,
    standard_fv,
    validate_fv,
)
from zipstrat.ffalg import SemilinearMap, identity
from zipstrat.rng import stream

NAMES = sorted(CONFIGS)


@settings(max_examples=15, deadline=None)
@given(name=st.sampled_from(NAMES), seed=st.integers(0, 2 ** 32))
def test_sampled_data_validate(name, seed):
    d = sample_fv(CONFIGS[name], stream(seed, 0))
    assert validate_fv(d)


@settings(max_examples=15, deadline=None)
@given(name=st.sampled_from(NAMES), seed=st.integers(0, 2 ** 32))
def test_polygon_chain(name, seed):
    fd = sample_fv(CONFIGS[name], stream(seed, 1)).factors[0]
    N, H, P = newton_polygon(fd), hodge_polygon(fd), pr_polygon(fd.factor)
    assert N.convex and H.convex and P.convex
    assert polygon_leq(N, H) and polygon_leq(H, P)
    assert N.ys[-1] == H.ys[-1] == P.ys[-1]
    if is_max_kr(fd):
        assert H == P


@pytest.mark.parametrize("name", NAMES)
def test_hodge_of_max_kr_is_pr(name):
    fac = CONFIGS[name].factors[0]
    assert hdg_of_kr(max_kr(fac), fac.host_rank) == pr_polygon(fac)


def test_kr_type_bounded_by_max():
    fac = CONFIGS["hilbert-e2"].factors[0]
    seen = set()
    for s in range(40):
        fd = sample_fv(CONFIGS["hilbert-e2"], stream(5, s)).factors[0]
        seen.add(kr_type(fd))
    assert max_kr(fac) in seen
    assert seen <= {((2,),), ((1, 1),)}


def test_polygon_basics():
    P = Polygon.from_slopes([1, Fraction(1, 2), 0])
    assert P.ys == (0, 1, Fraction(3, 2), Fraction(3, 2))
    assert P.convex and P.width == 3
    assert not Polygon.from_slopes([0, 1]).convex
    flat = Polygon.from_slopes([Fraction(1, 2)] * 3)
    assert polygon_leq(flat, P) and not polygon_leq(P, flat)
    with pytest.raises(ValueError):
        hdg_of_kr([(0, 1)], 2)


def test_supersingular_and_ordinary_newton():
    pel = siegel(3, 1, 1)
    F = pel.field
    ordi = standard_fv(pel, [[identity(2)]]).factors[0]
    ss = standard_fv(pel, [[antidiag_sp(F, 2)]]).factors[0]
    assert newton_polygon(ordi).slopes == (1, 0)
    assert newton_polygon(ss).slopes == (Fraction(1, 2), Fraction(1, 2))


def test_corrupted_datum_is_rejected():
    d = sample_fv(CONFIGS["hilbert-e2"], stream(3, 0))
    fd = d.factors[0]
    Fr = fd.frob[0]
    bad = SemilinearMap.make(fd.host.field, identity(fd.host.dim), Fr.twist, fd.host.dim)
    broken = type(fd)(fd.factor, fd.host, fd.splittings, (bad,), fd.ver, fd.pairing, None)
    rep = validate_fv(type(d)(d.pel, (broken,)))
    assert not rep and rep.condition.startswith(("ker", "Ver"))


@pytest.mark.parametrize("kw", [
    dict(kind="X", e=1, f=1, d=1),
    dict(kind="C", e=0, f=1, d=1),
    dict(kind="AU", e=2, f=1, d=3, signature=((1,),)),
    dict(kind="AU", e=1, f=1, d=3, signature=((4,),)),
    dict(kind="C", e=1, f=1, d=2, signature=((1,),)),
])
def test_signature_errors(kw):
    with pytest.raises(SignatureError):
        LocalFactor("1", **kw)
