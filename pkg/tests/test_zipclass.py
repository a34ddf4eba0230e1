from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import CONFIGS, antidiag_sp
from zipstrat.coxeter import enumerate_JW
from zipstrat.dieudonne import is_max_kr, sample_fv, siegel, standard_fv
from zipstrat.ffalg import identity, make_field
from zipstrat.rng import stream
from zipstrat.zipclass import (
    ClassificationError,
    SizeBoundError,
    VertexSpec,
    ZipShape,
    classify_standard,
    e_act,
    fitted_degree,
    group_order,
    interpolate,
    is_in_group,
    minimal_eo_criterion,
    orbit_oracle,
    parabolic_order,
    point_counts,
    random_e_element,
    random_group_element,
    reduced_type,
    shape_of_factor,
    shape_of_factor_zip,
    type_table,
    zip_type,
)
from zipstrat.zipify import assemble_zip, mu_ordinary_hasse

S = VertexSpec
SHAPES = {
    "gl2": ZipShape.gl(2, 1),
    "gl3-1": ZipShape.gl(3, 1),
    "gl3-2": ZipShape.gl(3, 2),
    "sp2": ZipShape.sp(1),
    "sp4": ZipShape.sp(2),
    "gl3-mixed": ZipShape((S("GL", 3, 1), S("GL", 3, 2)), (1, 0)),
    "sp2-cycle": ZipShape((S("Sp", 2, 1), S("Sp", 2, 1)), (1, 0)),
}


@pytest.mark.parametrize("name", sorted(SHAPES))
def test_type_table_is_bijective_onto_JW(name):
    shape = SHAPES[name]
    W = shape.weyl()
    tab = type_table(shape, make_field(2))
    assert sorted(tab.values()) == sorted(enumerate_JW(W, shape.J()))


@pytest.mark.parametrize("q", [2, 3])
def test_orbit_oracle_gl2(q):
    shape = SHAPES["gl2"]
    F = make_field(q)
    W = shape.weyl()
    sizes = {}
    for orbit in orbit_oracle(shape, F):
        types = {classify_standard(shape, F, list(g)) for g in orbit}
        assert len(types) == 1
        w = types.pop()
        sizes[w] = sizes.get(w, 0) + len(orbit)
    assert sum(sizes.values()) == group_order(shape.vertices[0], q)
    for w, n in sizes.items():
        assert n == parabolic_order(shape, q) * q ** W.length(w)


@pytest.mark.parametrize("name", ["sp2", "sp2-cycle"])
def test_orbit_oracle_symplectic(name):
    shape = SHAPES[name]
    F = make_field(2)
    for orbit in orbit_oracle(shape, F):
        assert len({classify_standard(shape, F, list(g)) for g in orbit}) == 1


@settings(max_examples=30, deadline=None)
@given(name=st.sampled_from(sorted(SHAPES)), q=st.sampled_from([2, 3]), seed=st.integers(0, 2 ** 32))
def test_type_constant_under_e_action(name, q, seed):
    shape = SHAPES[name]
    F = make_field(q)
    rng = stream(seed, 0)
    gs = random_group_element(shape, F, rng)
    assert all(is_in_group(s, F, g) for s, g in zip(shape.vertices, gs))
    hs, us = random_e_element(shape, F, rng)
    assert classify_standard(shape, F, gs) == classify_standard(shape, F, e_act(shape, F, gs, hs, us))


def test_point_counts_gl2_degrees():
    shape = ZipShape.gl(2, 1)
    W = shape.weyl()
    counts = {}
    for q, F in [(2, make_field(2)), (3, make_field(3)), (4, make_field(2, 2)), (5, make_field(5))]:
        pc = point_counts(shape, F)
        assert sum(pc.values()) == group_order(shape.vertices[0], q)
        for w, n in pc.items():
            counts.setdefault(w, {})[q] = n
    for w, by_q in counts.items():
        assert fitted_degree(shape, by_q) == shape.dim_P() + W.length(w)


@pytest.mark.parametrize("c", [1, 2])
def test_point_counts_gl3_sum(c):
    shape = ZipShape.gl(3, c)
    W = shape.weyl()
    pc = point_counts(shape, make_field(2))
    assert sum(pc.values()) == group_order(shape.vertices[0], 2)
    assert all(n % (parabolic_order(shape, 2) * 2 ** W.length(w)) == 0 for w, n in pc.items())


def test_point_counts_sp2():
    shape = ZipShape.sp(1)
    pc = point_counts(shape, make_field(3))
    assert sorted(pc.values()) == [parabolic_order(shape, 3), parabolic_order(shape, 3) * 3]


def test_interpolate_exact():
    pts = [(q, Fraction(q ** 3 - 2 * q + 7)) for q in (2, 3, 4, 5)]
    assert interpolate(pts) == [7, -2, 0, 1]


def test_fitted_degree_rejects_non_polynomial():
    shape = ZipShape.gl(2, 1)
    with pytest.raises(ClassificationError):
        fitted_degree(shape, {2: 1, 3: 1, 5: 1})


def test_oracle_size_bound():
    with pytest.raises(SizeBoundError):
        orbit_oracle(ZipShape.gl(3, 1), make_field(7))


def test_standard_data_types():
    pel = siegel(3, 2, 1)
    F = pel.field
    ordi = zip_type(assemble_zip(standard_fv(pel, [[identity(4)]])).factors[0])
    ss = zip_type(assemble_zip(standard_fv(pel, [[antidiag_sp(F, 4)]])).factors[0])
    assert ordi.is_maximal and not ordi.is_minimal
    assert ss.word == "e" and ss.is_minimal


@pytest.mark.parametrize("name", ["hilbert-e1", "hilbert-e2", "hilbert-e3", "hilbert-e2-f2", "siegel-g2-e2"])
def test_mu_ordinary_equivalences(name):
    for s in range(25):
        d = sample_fv(CONFIGS[name], stream(21, s))
        fd, fz = d.factors[0], assemble_zip(d).factors[0]
        zt = zip_type(fz)
        nonzero = not mu_ordinary_hasse(fz).zero
        red = reduced_type(fd)
        assert (red is None) == (not is_max_kr(fd))
        assert nonzero == zt.is_maximal == (red is not None and red.is_maximal)


@pytest.mark.parametrize("name", sorted(CONFIGS))
def test_minimal_eo_criterion(name):
    for s in range(25):
        d = sample_fv(CONFIGS[name], stream(22, s))
        zt = zip_type(assemble_zip(d).factors[0])
        assert minimal_eo_criterion(d.factors[0]) == zt.is_minimal


@pytest.mark.parametrize("name", sorted(CONFIGS))
def test_shape_of_factor_matches_zip(name):
    d = sample_fv(CONFIGS[name], stream(23, 0))
    assert shape_of_factor(d.pel.factors[0]) == shape_of_factor_zip(assemble_zip(d).factors[0])
