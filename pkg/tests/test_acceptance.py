"""End-to-end acceptance checks, one test per criterion, each printing a PASS/FAIL line."""

import itertools
import random
import time

import numpy as np

from crystals import generate, sail_build, worm_generate
from crystals.assembler import Assembler
from crystals.core import Crystal, head_tail, isomorphic
from crystals.extract import (Describer, complementarity, enumerate_B, enumerate_C, extract, extract_B, extract_C,
                              omega, omega_prime)
from crystals.lattice import LatticeDecomposition, decompose, lower_box, upper_box, zeta, zeta_inv
from crystals.verifier import PASS, recheck, verify_A, verify_BC

from oracles import sail_count, weyl_dimension

ASSEMBLY_SWEEP = (list(itertools.product(range(3), repeat=3)) + list(itertools.product(range(2), repeat=4))
                  + [(3, 2, 1), (1, 2, 3), (2, 2, 2)])


def path_colors(K):
    out, v = [], K.source
    while K.sinks()[0] != v:
        (i,) = [i for i in range(1, K.n + 1) if K.f(v, i) is not None]
        out.append(i)
        v = K.f(v, i)
    return out


def palindromic_parameters(length, limit=10**5):
    """All (c1, c2) whose palindromic base crystal of the given length has at most ``limit`` vertices."""

    def base(c1, c2):
        return (c1, c2, c1) if length == 3 else (c1, c2, c2, c1)

    out, c1 = [], 0
    while weyl_dimension("A", base(c1, 0)) <= limit:
        c2 = 0
        while weyl_dimension("A", base(c1, c2)) <= limit:
            out.append((c1, c2))
            c2 += 1
        c1 += 1
    return out, base


def test_criterion_01_k111_counts(criterion):
    t = time.perf_counter()
    K = generate((1, 1, 1))
    seconds = time.perf_counter() - t
    ok = (K.num_vertices, K.num_edges) == (64, 102) and seconds < 1
    assert criterion(1, ok, f"K(1,1,1): {K.num_vertices} vertices, {K.num_edges} edges in {seconds:.3f}s")


def test_criterion_02_k111_decomposition(criterion):
    K = generate((1, 1, 1))
    ups, lows = decompose(K, "upper"), decompose(K, "lower")
    middles = LatticeDecomposition(K).middles
    singletons = sum(1 for m in middles if m.vertices.size == 1)
    ok = (len(ups), len(lows), len(middles), singletons) == (8, 8, 30, 8)
    assert criterion(2, ok, f"upper={len(ups)} lower={len(lows)} middle={len(middles)} singletons={singletons}")


def test_criterion_03_assembly_matches_crossing_model(criterion):
    t = time.perf_counter()
    bad = [c for c in ASSEMBLY_SWEEP if not isomorphic(Assembler().assemble(c), generate(c))]
    seconds = time.perf_counter() - t
    ok = not bad and seconds < 120
    assert criterion(3, ok, f"{len(ASSEMBLY_SWEEP)} parameters, mismatches={bad}, {seconds:.1f}s")


def test_criterion_04_sail_model(criterion):
    bad = [(a, b) for a in range(7) for b in range(7) if not isomorphic(sail_build(a, b), generate((a, b)))]
    K = sail_build(1, 2)
    ok = not bad and K.num_vertices == 15 == sail_count(1, 2)
    assert criterion(4, ok, f"49 sail builds, mismatches={bad}, |K(1,2)|={K.num_vertices}")


def test_criterion_05_small_worm_graphs(criterion):
    W10, W01 = worm_generate(1, 0), worm_generate(0, 1)
    ok = (W10.num_vertices == 5 and path_colors(W10) == [1, 2, 2, 1]
          and W01.num_vertices == 4 and path_colors(W01) == [2, 1, 2])
    assert criterion(5, ok, f"W(1,0): {W10.num_vertices} vertices {path_colors(W10)}; "
                            f"W(0,1): {W01.num_vertices} vertices {path_colors(W01)}")


def test_criterion_06_b_extracts(criterion):
    t = time.perf_counter()
    bad = [(a, b) for a in range(5) for b in range(5)
           if not isomorphic(extract_B(generate((a, b, a))), worm_generate(a, b))]
    seconds = time.perf_counter() - t
    ok = not bad and seconds < 120
    assert criterion(6, ok, f"25 B-extracts, mismatches={bad}, {seconds:.1f}s")


def test_criterion_07_c_extracts(criterion):
    bad = [(a, b) for a in range(4) for b in range(4)
           if not isomorphic(extract_C(generate((a, b, b, a))),
                             worm_generate(b, a).relabel_colors({1: 2, 2: 1}))]
    assert criterion(7, not bad, f"16 C-extracts against swapped worm graphs, mismatches={bad}")


def test_criterion_08_description_counts(criterion):
    bad, total = [], 0
    params3, base3 = palindromic_parameters(3)
    for c in params3:
        K = generate(base3(*c))
        total += K.num_vertices
        if complementarity(K).fixed.size != len(enumerate_B(*c)):
            bad.append(base3(*c))
    params4, base4 = palindromic_parameters(4)
    for c in params4:
        K = generate(base4(*c))
        total += K.num_vertices
        if complementarity(K).fixed.size != len(enumerate_C(*c)):
            bad.append(base4(*c))
    ok = not bad and len(params3) > 0 and len(params4) > 0
    assert criterion(8, ok, f"{len(params3)} A3 and {len(params4)} A4 bases ({total} vertices), mismatches={bad}")


def test_criterion_09_omega_formulas(criterion):
    checked, bad = 0, 0
    for base, kind, formula in (((2, 1, 2), "B", omega), ((2, 1, 1, 2), "C", omega_prime)):
        K = generate(base)
        X = extract(K, kind)
        describe = Describer(K)
        for v, w in enumerate(X.vertices):
            checked += 1
            if formula(describe(int(w)), base[:2]) != head_tail(X.crystal, v, 1).head:
                bad += 1
    assert criterion(9, bad == 0, f"{checked} self-complementary vertices, {bad} disagreements")


def _mutants(rng, pool, trials):
    for _ in range(trials):
        K = generate(rng.choice(pool))
        u, _, i = K.edge_list()[rng.randrange(K.num_edges)]
        succ = K.succ.copy()
        succ[u, i - 1] = -1
        yield Crystal(K.n, succ)


def test_criterion_10_verifier(criterion):
    a_bad = [c for c in ASSEMBLY_SWEEP if not verify_A(generate(c)).summary]
    bc_bad = []
    for a, b in itertools.product(range(3), repeat=2):
        rb = verify_BC(extract_B(generate((a, b, a))), "B")
        if not (rb.summary and rb.status("BC4") == PASS):
            bc_bad.append(("B", a, b))
        rc = verify_BC(extract_C(generate((a, b, b, a))), "C")
        if not (rc.summary and rc.status("BC4'") == PASS):
            bc_bad.append(("C", a, b))
    rng = random.Random(10)
    pool = [c for c in ASSEMBLY_SWEEP if sum(c) > 0]
    caught = 0
    for M in _mutants(rng, pool, 50):
        fails = verify_A(M).failures()
        if fails and all(recheck(M, ch) for ch in fails):
            caught += 1
    ok = not a_bad and not bc_bad and caught == 50
    assert criterion(10, ok, f"verify_A failures={a_bad}, verify_BC failures={bc_bad}, "
                             f"mutants caught with valid witnesses={caught}/50")


def test_criterion_11_zeta_round_trip(criterion):
    rng = np.random.default_rng(11)
    bad = 0
    for _ in range(10**4):
        n = int(rng.integers(2, 7))
        c = tuple(int(x) for x in rng.integers(0, 6, size=n))
        a = tuple(int(rng.integers(0, x + 1)) for x in c)
        d = tuple(int(rng.integers(lo, hi + 1)) for lo, hi in upper_box(c, a))
        b, nabla = zeta(c, a, d)
        in_box = all(lo <= x <= hi for x, (lo, hi) in zip(nabla, lower_box(c, b)))
        if not in_box or zeta_inv(c, b, nabla) != (a, d):
            bad += 1
    assert criterion(11, bad == 0, f"10000 random (c, a, Delta) with n <= 6, {bad} failures")


def test_criterion_12_assembly_scaling(criterion):
    ratios = []
    for m in range(1, 9):
        c = (m, 1, 1)
        best = float("inf")
        for _ in range(3):
            t = time.perf_counter()
            K = Assembler().assemble(c)
            best = min(best, time.perf_counter() - t)
        ratios.append(best / K.num_vertices)
    growth = max(ratios) / ratios[0]
    ok = growth < 10
    assert criterion(12, ok, f"time per vertex over m=1..8 grows by {growth:.2f}x "
                             f"({ratios[0] * 1e6:.1f} -> {ratios[-1] * 1e6:.1f} us)")
