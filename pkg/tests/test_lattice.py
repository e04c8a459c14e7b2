import itertools
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crystals import generate
from crystals.core import isomorphic
from crystals.errors import InputError
from crystals.lattice import (LatticeDecomposition, apply_word_batch, count_common_middles, decompose,
                              deviation_box, interval, lower_box, middle_params, principal_lattice,
                              principal_string, principal_vertex, subcrystal_params, upper_box, zeta, zeta_inv)

from oracles import weyl_dimension


def box(c):
    return itertools.product(*(range(x + 1) for x in c))


def test_principal_strings():
    assert principal_string(3, 1) == (3, 2, 1)
    assert principal_string(3, 3) == (1, 2, 3)
    assert principal_string(1, 1) == (1,)
    with pytest.raises(InputError):
        principal_string(3, 4)


def test_principal_vertex_examples():
    K = generate((1, 1, 1))
    assert principal_vertex(K, (0, 0, 0)) == K.source
    assert principal_vertex(K, (1, 1, 1)) == K.sink
    assert principal_vertex(K, (1, 0, 0)) == K.apply_word(K.source, (3, 2, 1))


@pytest.mark.parametrize("c", [(2, 1, 1), (1, 1, 1, 1), (1, 2)])
def test_principal_strings_commute(c):
    K = generate(c)
    n = len(c)
    verts = np.array(list(principal_lattice(K, c).ravel()))
    for k, l in itertools.combinations(range(1, n + 1), 2):
        a = apply_word_batch(K, apply_word_batch(K, verts, principal_string(n, k)), principal_string(n, l))
        b = apply_word_batch(K, apply_word_batch(K, verts, principal_string(n, l)), principal_string(n, k))
        both = (a >= 0) & (b >= 0)
        assert np.array_equal(a >= 0, b >= 0)
        assert np.array_equal(a[both], b[both])


def test_lattice_is_injective_and_independent_of_order():
    c = (2, 1, 2)
    K = generate(c)
    P = principal_lattice(K, c)
    assert np.unique(P).size == P.size == 18
    for a in box(c):
        assert principal_vertex(K, a) == P[a]


def test_interval_examples():
    K = generate((1, 1, 1))
    h, whole = interval(K, (0, 0, 0), (1, 1, 1))
    assert whole.num_vertices == 64
    h, sub = interval(K, (0, 0, 0), (1, 0, 1))
    assert sub.num_vertices == 15 == weyl_dimension("A", (1, 0, 1))
    assert isomorphic(sub, generate((1, 0, 1)))
    # K(1,0) is the 3-vertex A2 crystal: a 1-edge followed by a 2-edge
    h, sub = interval(generate((2, 0)), (1, 0), (2, 0))
    assert isomorphic(sub, generate((1, 0)))
    assert sub.edge_list() == [(0, 1, 1), (1, 2, 2)]
    with pytest.raises(InputError):
        interval(K, (1, 0, 0), (0, 1, 1))


@pytest.mark.parametrize("c", [(1, 2, 1), (2, 1, 1)])
def test_intervals_are_smaller_crystals(c):
    K = generate(c)
    rng = random.Random(7)
    points = list(box(c))
    for _ in range(8):
        a, b = sorted(rng.sample(points, 2))
        b = tuple(max(x, y) for x, y in zip(a, b))
        _, sub = interval(K, a, b)
        assert isomorphic(sub, generate(tuple(y - x for x, y in zip(a, b))))


def test_decomposition_of_k111():
    K = generate((1, 1, 1))
    ups, lows = decompose(K, "upper"), decompose(K, "lower")
    assert len(ups) == len(lows) == 8
    u = next(h for h in ups if h.locus == (0, 1, 1))
    assert u.parameter == (2, 1)
    dec = LatticeDecomposition(K)
    sizes = Counter(m.vertices.size for m in dec.middles)
    assert len(dec.middles) == 30 and sizes[1] == 8


@pytest.mark.parametrize("c", [(2, 0, 1), (1, 2, 2), (1, 1, 0, 1)])
def test_subcrystal_count_and_parameters(c):
    K = generate(c)
    for side in ("upper", "lower"):
        handles = decompose(K, side)
        assert len(handles) == int(np.prod([x + 1 for x in c]))
        for h in handles:
            sub, _ = K.restrict(h.vertices, h.colors)
            assert tuple(int(x) for x in sub.heads[sub.source]) == h.parameter
            assert isomorphic(sub, generate(h.parameter))


def test_subcrystal_params_examples():
    assert subcrystal_params((1, 1, 1), (0, 0, 1), "upper") == ((1, 2), (0, 1))
    assert subcrystal_params((2, 3, 1), (0, 0, 0), "upper") == ((2, 3), (0, 0))
    assert subcrystal_params((1, 1, 1), (1, 0, 0), "lower") == ((2, 1), (1, 0))


def test_zeta_examples():
    assert zeta((1, 1, 1), (0, 0, 0), (0, 0)) == ((0, 0, 0), (0, 0))
    assert zeta((1, 1, 1), (0, 0, 0), (1, 0)) == ((1, 0, 0), (-1, 0))
    assert zeta((1, 1, 1), (0, 0, 1), (0, 1)) == ((0, 1, 1), (0, -1))
    with pytest.raises(InputError):
        zeta((1, 1, 1), (0, 0, 0), (2, 0))


@st.composite
def parameter_and_deviation(draw):
    n = draw(st.integers(2, 6))
    c = tuple(draw(st.lists(st.integers(0, 5), min_size=n, max_size=n)))
    a = tuple(draw(st.integers(0, x)) for x in c)
    d = tuple(draw(st.integers(lo, hi)) for lo, hi in upper_box(c, a))
    return c, a, d


@given(parameter_and_deviation())
@settings(max_examples=300, deadline=None)
def test_zeta_round_trip(data):
    c, a, d = data
    b, nabla = zeta(c, a, d)
    assert all(0 <= x <= y for x, y in zip(b, c))
    assert all(lo <= x <= hi for x, (lo, hi) in zip(nabla, lower_box(c, b)))
    assert zeta_inv(c, b, nabla) == (a, d)


def test_middle_params_examples():
    param, up, low = middle_params((1, 1, 1), a=(0, 0, 0), delta=(1, 0))
    assert param == (2,)
    param, up, low = middle_params((1, 2, 1), a=(1, 1, 0), delta=(0, 0))
    assert param == (2,) and up == (1,) and low == (1,)


@pytest.mark.parametrize("c", [(1, 1, 1), (2, 1, 1), (1, 2, 1), (1, 1, 1, 1), (2, 0, 1, 1)])
def test_middles_follow_zeta(c):
    K = generate(c)
    dec = LatticeDecomposition(K)
    seen = set()
    for m in dec.middles:
        assert zeta(c, m.a, m.delta) == (m.b, m.nabla)
        param, up, low = middle_params(c, a=m.a, delta=m.delta)
        assert param == m.parameter
        assert middle_params(c, b=m.b, nabla=m.nabla)[0] == param
        seen.add((m.a, m.delta))
    expected = sum(1 for a in box(c) for _ in deviation_box(c, a))
    assert len(seen) == len(dec.middles) == expected


def test_count_common_middles():
    c = (1, 1, 1)
    assert count_common_middles(c, (0, 0, 0), (1, 0, 0)) == 1
    assert count_common_middles(c, (0, 1, 0), (0, 1, 0)) >= 1
    dec = LatticeDecomposition(generate(c))
    pairs = Counter((m.a, m.b) for m in dec.middles)
    for a in box(c):
        for b in box(c):
            assert count_common_middles(c, a, b) == pairs[(a, b)]
