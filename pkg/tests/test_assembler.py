import itertools
import time

import pytest

from crystals import generate
from crystals.assembler import Assembler, assemble, component_orders, path_crystal
from crystals.core import isomorphic
from crystals.errors import InputError, ResourceLimitError
from crystals.lowrank import sail_build


def test_base_cases():
    A = Assembler()
    T = A.ci_template((1, 1), (3,))
    assert T.crystal.num_vertices == 4 and T.crystal.edge_list() == [(0, 1, 1), (1, 2, 1), (2, 3, 1)]
    assert isomorphic(assemble((1, 2)), sail_build(1, 2))
    assert assemble((1, 2)).num_vertices == 15


def test_k111():
    A = Assembler()
    K = A.assemble((1, 1, 1))
    assert (K.num_vertices, K.num_edges) == (64, 102)
    assert isomorphic(K, generate((1, 1, 1)))
    # upper templates are requested in lattice order, before any lower template
    uppers = [p for p in A.stats.requests if len(p) == 2][:8]
    assert set(uppers) == {(1, 1), (0, 1), (2, 0), (1, 2), (1, 0), (0, 2), (2, 1)}


def test_cache_hits():
    A = Assembler()
    A.assemble((2, 2, 2))
    assert A.stats.cache_hits > 0
    hits = A.stats.cache_hits
    A.assemble((2, 2, 2))
    assert A.stats.cache_hits == hits + 1
    assert A.stats.templates == len(A.cache)


@pytest.mark.parametrize("c", [c for c in itertools.product(range(3), repeat=3)]
                         + [(1, 0, 1, 1), (2, 1, 0, 1), (1, 1, 1, 1, 1)])
def test_assembly_matches_crossing_model(c):
    assert isomorphic(assemble(c), generate(c))


def test_output_is_canonical():
    K1 = assemble((1, 2, 1))
    K2 = Assembler().assemble((1, 2, 1))
    G = generate((1, 2, 1))
    assert (K1.succ == K2.succ).all()
    assert (K1.succ == G.succ).all()


def test_interval_validation():
    A = Assembler()
    with pytest.raises(InputError):
        A.ci_template((2, 1), (1,))
    with pytest.raises(InputError):
        A.ci_template((1, 2), (1,))
    with pytest.raises(InputError):
        assemble(())


def test_vertex_cap(monkeypatch):
    monkeypatch.setenv("CRYSTAL_MAX_VERTICES", "500")
    with pytest.raises(ResourceLimitError):
        assemble((2, 2, 2))


def test_component_orders_rank_from_source():
    K = generate((1, 2, 1))
    label, rank, members = component_orders(K, [2])
    for v in range(K.num_vertices):
        assert rank[v] == K.tails[v, 1]
    assert path_crystal(0).num_vertices == 1


def test_time_per_vertex_stays_flat():
    ratios = []
    for m in (1, 8):
        best = min(_timed((m, 1, 1)) for _ in range(3))
        ratios.append(best / generate((m, 1, 1)).num_vertices)
    assert ratios[1] / ratios[0] < 10


def _timed(c):
    t = time.perf_counter()
    Assembler().assemble(c)
    return time.perf_counter() - t
