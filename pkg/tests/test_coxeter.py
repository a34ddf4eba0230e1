import itertools
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from zipstrat.coxeter import (
    WeylCtx,
    WeylFactor,
    build_poset,
    dot_export,
    enumerate_JW,
    perm_matrix,
    pinv,
    pmul,
    poset_json,
    siegel_J,
    tableau_leq,
)

FACTORS = [WeylFactor("A", 3), WeylFactor("A", 4), WeylFactor("C", 1), WeylFactor("C", 2), WeylFactor("C", 3)]


def bfs_lengths(f):
    dist = {f.identity: 0}
    frontier = [f.identity]
    while frontier:
        nxt = []
        for w in frontier:
            for i in range(f.rank):
                ws = pmul(w, f.simple(i))
                if ws not in dist:
                    dist[ws] = dist[w] + 1
                    nxt.append(ws)
        frontier = nxt
    return dist


def subword_downset(f, w):
    """Subword property: products of all subwords of one reduced word of w."""
    word = []
    x = w
    while f.length(x):
        i = next(i for i in range(f.rank) if f.is_right_descent(x, i))
        word.append(i)
        x = pmul(x, f.simple(i))
    out = set()
    for mask in itertools.product((0, 1), repeat=len(word)):
        y = f.identity
        for keep, i in zip(mask, reversed(word)):
            if keep:
                y = pmul(y, f.simple(i))
        out.add(y)
    return out


@pytest.mark.parametrize("f", FACTORS, ids=str)
def test_length_is_word_length(f):
    dist = bfs_lengths(f)
    assert len(dist) == len(f.elements())
    assert all(f.length(w) == d for w, d in dist.items())
    assert f.length(f.longest()) == max(dist.values())


@pytest.mark.parametrize("f", [WeylFactor("A", 3), WeylFactor("C", 2), WeylFactor("C", 3)], ids=str)
def test_bruhat_matches_subword_oracle(f):
    W = WeylCtx((f,))
    for w in f.elements():
        down = subword_downset(f, w)
        for u in f.elements():
            assert W.bruhat_leq((u,), (w,)) == (u in down)


def test_bruhat_matches_tableau_criterion():
    f = WeylFactor("A", 4)
    W = WeylCtx((f,))
    els = f.elements()
    assert all(W.bruhat_leq((u,), (w,)) == tableau_leq(u, w) for u in els for w in els)


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_group_laws(data):
    f = data.draw(st.sampled_from(FACTORS))
    els = f.elements()
    u, v, w = (data.draw(st.sampled_from(els)) for _ in range(3))
    assert pmul(pmul(u, v), w) == pmul(u, pmul(v, w))
    assert pmul(u, pinv(u)) == f.identity
    assert f.length(u) == f.length(pinv(u))
    for i in range(f.rank):
        d = f.length(pmul(u, f.simple(i))) - f.length(u)
        assert d == (-1 if f.is_right_descent(u, i) else 1)


def test_type_c_commutes_with_bar():
    f = WeylFactor("C", 3)
    n = f.points
    assert len(f.elements()) == 48
    for w in f.elements():
        assert all(w[n - 1 - i] == n - 1 - w[i] for i in range(n))


def gl_size(h, c):
    return comb(h, c)


@pytest.mark.parametrize("shape,size", [
    ((("A", 2, 1),), 2),
    ((("A", 3, 1),), 3),
    ((("A", 3, 2),), 3),
    ((("A", 3, 1), ("A", 3, 2)), 9),
    ((("A", 4, 2),), 6),
    ((("A", 3, 1), ("A", 3, 1), ("A", 3, 2)), 27),
])
def test_unitary_index_set_sizes(shape, size):
    W = WeylCtx.cyclic([WeylFactor(k, h) for k, h, _ in shape])
    J = siegel_J(W, [c for _, _, c in shape])
    assert len(enumerate_JW(W, J)) == size
    assert size == eval("*".join(str(gl_size(h, c)) for _, h, c in shape))


@pytest.mark.parametrize("g,n", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_hilbert_siegel_index_set_sizes(g, n):
    W = WeylCtx.cyclic([WeylFactor("C", g)] * n)
    J = siegel_J(W, [g] * n)
    assert len(enumerate_JW(W, J)) == 2 ** (g * n)


@pytest.mark.parametrize("factors,cs", [
    ([("A", 3)], [1]),
    ([("A", 3)], [2]),
    ([("C", 2)], [2]),
    ([("C", 1)] * 2, [1, 1]),
    ([("C", 1)] * 3, [1, 1, 1]),
    ([("C", 2)] * 2, [2, 2]),
    ([("A", 3)] * 2, [1, 2]),
    ([("A", 4)] * 2, [2, 1]),
])
def test_zip_order_refines_length(factors, cs):
    W = WeylCtx.cyclic([WeylFactor(k, h) for k, h in factors])
    P = build_poset(W, siegel_J(W, cs))
    for a in P.elements:
        for b in P.elements:
            if a != b and P.preceq(a, b):
                assert W.length(a) < W.length(b)
    assert [P.elements[i] for i in P.minimal()] == [W.identity]
    assert len(P.maximal()) == 1
    assert W.length(P.longest) == max(W.length(w) for w in P.elements)


def test_siegel_poset_is_a_chain_for_g1():
    W = WeylCtx((WeylFactor("C", 1),))
    P = build_poset(W, siegel_J(W, [1]))
    assert len(P.elements) == 2 and len(P.covers()) == 1


def test_dot_export_hilbert_e2():
    W = WeylCtx.cyclic([WeylFactor("C", 1)] * 2)
    P = build_poset(W, siegel_J(W, [1, 1]))
    dot = dot_export(P)
    assert dot == dot_export(build_poset(W, siegel_J(W, [1, 1])))
    assert dot.startswith("digraph") and "\r" not in dot
    assert sum(1 for line in dot.splitlines() if "label=" in line) == 4
    js = poset_json(P)
    assert len(js["elements"]) == 4


def test_word_labels():
    W = WeylCtx.cyclic([WeylFactor("C", 1)] * 2)
    assert W.word_label(W.identity) == "e"
    assert W.word_label(W.longest()) == "s1[1] s1[0]"
    W1 = WeylCtx((WeylFactor("A", 3),))
    assert W1.word_label(W1.simple(0, 0)) == "s1"


@pytest.mark.parametrize("f", [WeylFactor("A", 3), WeylFactor("C", 2)], ids=str)
def test_perm_matrix_is_monomial(f):
    for w in f.elements():
        M = perm_matrix(f, w, 2)
        assert all(sum(1 for x in row if x) == 1 for row in M)
        assert all(sum(1 for row in M if row[c]) == 1 for c in range(f.points))
