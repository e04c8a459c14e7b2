"""Crossing model: A_n crystals as feasible functions on a supporting graph.

The supporting graph has one rectangular component ``G^k`` per color
``k = 1..n``.  A node of ``G^k`` is addressed by grid coordinates ``(m, j)``
with ``1 <= m <= k`` and ``1 <= j <= n-k+1``; it sits on level
``i = m + j - 1``.  Inside a component the SE edges run ``(m, j) -> (m, j+1)``
and the ascending edges run ``(m+1, j) -> (m, j)``.  The nodes with the same
``(m, j)`` across components form the multinode ``V_i(j)``, ordered by ``k``.

Functions are stored as flat integer vectors in a fixed node order: by
level ``i``, then ``j``, then component ``k``.  Everything below is
vectorized over a batch of such vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import Crystal
from .errors import InputError, MalformedCrystalError, check_cap, parse_parameter


class SupportingGraph:
    def __init__(self, n: int):
        if n < 1:
            raise InputError("the number of colors must be at least 1")
        self.n = n
        nodes = []  # (k, m, j)
        self.level_start = []
        for i in range(1, n + 1):
            self.level_start.append(len(nodes))
            for j in range(1, i + 1):
                m = i - j + 1
                for k in range(m, n - j + 2):
                    nodes.append((k, m, j))
        self.level_start.append(len(nodes))
        self.nodes = nodes
        self.size = len(nodes)
        self.index = {node: t for t, node in enumerate(nodes)}
        self.comp = np.array([k for k, _, _ in nodes], dtype=np.int64)

        N = self.size

        def ext(k, m, j):
            # value slot for grid point (m, j) of G^k; outside points use the constant column
            if 1 <= m <= k and 1 <= j <= n - k + 1:
                return self.index[(k, m, j)]
            if j <= n - k + 1:
                return N + k - 1
            raise AssertionError("slack formula never reaches the zero region")

        self.nw = np.array([ext(k, m, j - 1) for k, m, j in nodes])
        self.sw_src = np.array([ext(k, m + 1, j - 1) for k, m, j in nodes])
        self.low = np.array([ext(k, m + 1, j) for k, m, j in nodes])
        # SE successor and SW predecessor inside G^k, or the node itself when absent
        self.se = np.array([self.index.get((k, m, j + 1), t) for t, (k, m, j) in enumerate(nodes)])
        self.sw = np.array([self.index.get((k, m + 1, j), t) for t, (k, m, j) in enumerate(nodes)])
        self.has_se = self.se != np.arange(N)
        self.has_sw = self.sw != np.arange(N)
        # Multinode V_i(j) with j >= 2 also collects the slack of the boundary
        # point (m, j) of G^k, k = n-j+2, which lies just right of that grid:
        # there the slack reduces to f(m, j-1) - f(m+1, j-1).  Slot N+n is zero.
        self.zero = N + n
        self.edge_hi, self.edge_lo = [], []
        for i in range(1, n + 1):
            hi, lo = [], []
            for j in range(1, i + 1):
                m, k = i - j + 1, n - j + 2
                if j == 1:
                    hi.append(self.zero)
                    lo.append(self.zero)
                else:
                    hi.append(ext(k, m, j - 1))
                    lo.append(ext(k, m + 1, j - 1))
            self.edge_hi.append(np.array(hi))
            self.edge_lo.append(np.array(lo))

    def node(self, k: int, m: int, j: int) -> int:
        return self.index[(k, m, j)]

    def multinode(self, i: int, j: int) -> list[int]:
        L = self.n - i + 1
        start = self.level_start[i - 1] + (j - 1) * L
        return list(range(start, start + L))

    def level_slice(self, i: int) -> slice:
        return slice(self.level_start[i - 1], self.level_start[i])


@lru_cache(maxsize=None)
def supporting_graph(n: int) -> SupportingGraph:
    return SupportingGraph(n)


build_supporting_graph = supporting_graph


def _padded(G: SupportingGraph, F: np.ndarray, c: Sequence[int]) -> np.ndarray:
    consts = np.broadcast_to(np.asarray(list(c) + [0], dtype=F.dtype), (F.shape[0], G.n + 1))
    return np.concatenate([F, consts], axis=1)


def batch_feasible(G: SupportingGraph, F: np.ndarray, c: Sequence[int]) -> np.ndarray:
    """Boolean mask of rows that are feasible functions."""
    F = np.atleast_2d(F)
    cap = np.asarray(c)[G.comp - 1]
    ok = ((F >= 0) & (F <= cap)).all(axis=1)
    ok &= (F >= F[:, G.se]).all(axis=1)
    ok &= (F[:, G.sw] >= F).all(axis=1)
    for i in range(1, G.n + 1):
        _, found = _switch_positions(G, F, i)
        ok &= found.all(axis=1)
    return ok


def _switch_positions(G: SupportingGraph, F: np.ndarray, i: int) -> tuple[np.ndarray, np.ndarray]:
    """First admissible switch position for every multinode of level ``i``.

    Returns ``(pos, found)`` with shape ``(B, i)`` each.
    """
    L = G.n - i + 1
    sl = G.level_slice(i)
    vals = F[:, sl]
    se_tight = (vals == F[:, G.se[sl]]).reshape(-1, i, L)
    sw_tight = (vals == F[:, G.sw[sl]]).reshape(-1, i, L)
    ones = np.ones(se_tight.shape[:2] + (1,), dtype=bool)
    before = np.concatenate([ones, np.logical_and.accumulate(se_tight[:, :, :-1], axis=2)], axis=2)
    after_rev = np.logical_and.accumulate(sw_tight[:, :, :0:-1], axis=2)
    after = np.concatenate([after_rev[:, :, ::-1], ones], axis=2)
    good = before & after
    return good.argmax(axis=2), good.any(axis=2)


def batch_slacks(G: SupportingGraph, F: np.ndarray, c: Sequence[int], i: int) -> tuple[np.ndarray, np.ndarray]:
    """Multinode slacks and reduced slacks of level ``i``; both of shape ``(B, i)``."""
    Fa = _padded(G, np.atleast_2d(F), c)
    sl = G.level_slice(i)
    L = G.n - i + 1
    node_eps = Fa[:, G.nw[sl]] - Fa[:, sl] - Fa[:, G.sw_src[sl]] + Fa[:, G.low[sl]]
    eps = node_eps.reshape(-1, i, L).sum(axis=2)
    eps += Fa[:, G.edge_hi[i - 1]] - Fa[:, G.edge_lo[i - 1]]
    prefix = np.cumsum(eps, axis=1)
    # max over the empty prefix (0) and all strictly earlier prefix sums
    earlier = np.concatenate([np.zeros_like(prefix[:, :1]), prefix[:, :-1]], axis=1)
    earlier = np.maximum.accumulate(np.maximum(earlier, 0), axis=1)
    reduced = np.maximum(prefix - earlier, 0)
    return eps, reduced


def batch_move(G: SupportingGraph, F: np.ndarray, c: Sequence[int], i: int) -> tuple[np.ndarray, np.ndarray]:
    """Apply the color-``i`` move to every row.

    Returns ``(children, acts)``; rows where the move does not act are
    copies of the input.
    """
    F = np.atleast_2d(F)
    _, reduced = batch_slacks(G, F, c, i)
    positive = reduced > 0
    acts = positive.any(axis=1)
    # the active multinode is the last one with positive reduced slack
    j_act = i - 1 - positive[:, ::-1].argmax(axis=1)
    pos, found = _switch_positions(G, F, i)
    rows = np.flatnonzero(acts)
    jj = j_act[rows]
    if not found[rows, jj].all():
        raise MalformedCrystalError(f"active multinode of level {i} has no switch node")
    L = G.n - i + 1
    target = G.level_start[i - 1] + jj * L + pos[rows, jj]
    out = F.copy()
    out[rows, target] += 1
    return out, acts


# scalar interface


@dataclass(frozen=True)
class FeasibleFunction:
    """A function on the supporting graph, values stored in the fixed node order."""

    c: tuple[int, ...]
    values: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.c)

    def at(self, k: int, m: int, j: int) -> int:
        return self.values[supporting_graph(self.n).node(k, m, j)]

    def extended(self, k: int, m: int, j: int) -> int:
        """Value at any grid point, using ``c_k`` left/below of ``G^k`` and 0 to its right."""
        n = self.n
        if 1 <= m <= k and 1 <= j <= n - k + 1:
            return self.at(k, m, j)
        return self.c[k - 1] if j <= n - k + 1 else 0

    def levels(self) -> list[list[int]]:
        G = supporting_graph(self.n)
        return [list(self.values[G.level_slice(i)]) for i in range(1, self.n + 1)]

    def to_dict(self) -> dict:
        return {"c": list(self.c), "levels": self.levels()}

    @classmethod
    def from_dict(cls, obj: dict) -> "FeasibleFunction":
        c = parse_parameter(obj["c"])
        values = tuple(int(x) for level in obj["levels"] for x in level)
        return cls(c, values)

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.int64)


def principal_function(c: Sequence[int], a: Sequence[int] | None = None) -> FeasibleFunction:
    """The function equal to ``a_k`` on all of ``G^k`` (zero function by default)."""
    c = parse_parameter(c)
    a = parse_parameter(a if a is not None else [0] * len(c), length=len(c), name="a")
    if any(x > y for x, y in zip(a, c)):
        raise InputError(f"a={a} exceeds c={c}")
    G = supporting_graph(len(c))
    return FeasibleFunction(c, tuple(a[k - 1] for k in G.comp.tolist()))


def is_feasible(f: FeasibleFunction) -> bool:
    G = supporting_graph(f.n)
    if len(f.values) != G.size:
        return False
    return bool(batch_feasible(G, f.array()[None, :], f.c)[0])


def switch_node(f: FeasibleFunction, i: int, j: int) -> tuple[int, int, int]:
    """The switch node of multinode ``V_i(j)`` as ``(k, m, j)``."""
    G = supporting_graph(f.n)
    _check_level(f.n, i)
    if not 1 <= j <= i:
        raise InputError(f"multinode index {j} out of range 1..{i}")
    pos, found = _switch_positions(G, f.array()[None, :], i)
    if not found[0, j - 1]:
        raise MalformedCrystalError(f"multinode V_{i}({j}) has no switch node")
    return G.nodes[G.multinode(i, j)[pos[0, j - 1]]]


def slacks(f: FeasibleFunction, i: int) -> tuple[list[int], list[int]]:
    """``(eps, reduced)`` for level ``i``, indexed by multinode ``j = 1..i``."""
    _check_level(f.n, i)
    eps, reduced = batch_slacks(supporting_graph(f.n), f.array()[None, :], f.c, i)
    return eps[0].tolist(), reduced[0].tolist()


def apply_move(f: FeasibleFunction, i: int) -> FeasibleFunction | None:
    """The crossing-model operator of color ``i``; ``None`` when it does not act."""
    _check_level(f.n, i)
    out, acts = batch_move(supporting_graph(f.n), f.array()[None, :], f.c, i)
    if not acts[0]:
        return None
    return FeasibleFunction(f.c, tuple(out[0].tolist()))


def _check_level(n: int, i: int) -> None:
    if not 1 <= i <= n:
        raise InputError(f"color {i} out of range 1..{n}")


# whole crystal


def generate_functions(c: Sequence[int], *, check: bool = False) -> tuple[Crystal, np.ndarray]:
    """Build ``K(c)`` together with the feasible function of every vertex.

    The crystal is graded, so breadth-first layers from the zero function
    coincide with weight levels and duplicates can only occur inside a
    layer.  Vertices come out in canonical order: a layer is sorted by the
    smallest (parent id, color) reaching each vertex.
    """
    c = parse_parameter(c)
    if not c:
        raise InputError("c must be nonempty")
    n = len(c)
    G = supporting_graph(n)
    dtype = np.int32 if max(c) < 2**30 else np.int64
    frontier = np.zeros((1, G.size), dtype=dtype)
    layers, succ_layers = [frontier], []
    total, start = 1, 0
    while True:
        B = frontier.shape[0]
        kids, masks = [], []
        for i in range(1, n + 1):
            out, acts = batch_move(G, frontier, c, i)
            kids.append(out)
            masks.append(acts)
        # interleave so that rows run in (parent, color) order
        stacked = np.stack(kids, axis=1).reshape(B * n, G.size)
        acts = np.stack(masks, axis=1).reshape(B * n)
        cand = stacked[acts]
        succ = np.full(B * n, -1, dtype=np.int64)
        nxt_start = start + B
        if cand.shape[0]:
            if check and not batch_feasible(G, cand, c).all():
                raise MalformedCrystalError("a move produced an infeasible function")
            packed = np.ascontiguousarray(cand).view(np.dtype((np.void, cand.dtype.itemsize * G.size))).ravel()
            _, first, inv = np.unique(packed, return_index=True, return_inverse=True)
            order = np.argsort(first, kind="stable")
            rank = np.empty_like(order)
            rank[order] = np.arange(order.size)
            succ[acts] = nxt_start + rank[inv.ravel()]
            frontier = cand[first[order]]
        else:
            frontier = cand
        succ_layers.append(succ.reshape(B, n))
        start = nxt_start
        if not frontier.shape[0]:
            break
        total += frontier.shape[0]
        check_cap(total, f"K{c}")
        layers.append(frontier)
    functions = np.concatenate(layers).astype(np.int64)
    table = np.concatenate(succ_layers)
    return Crystal(n, table, "A", c), functions


def generate(c: Sequence[int], *, check: bool = False) -> Crystal:
    """The A_n crystal ``K(c)`` in canonical numbering."""
    return generate_functions(c, check=check)[0]


def function_of(c: Sequence[int], values: np.ndarray) -> FeasibleFunction:
    return FeasibleFunction(tuple(c), tuple(int(x) for x in values))


# upper-lattice locator


def upper_lattice_vertex(c: Sequence[int], a: Sequence[int], delta: Sequence[int]) -> FeasibleFunction:
    """Closed-form feasible function of the vertex with deviation ``delta`` in ``Pi_up[a]``.

    On ``G^k`` the value is ``a_k`` plus ``Delta^-_{k-1}`` on the columns
    ``m < k`` plus ``Delta^+_k`` on the rows ``j <= n - k``, where
    ``Delta_0 = Delta_n = 0``.
    """
    c = parse_parameter(c)
    n = len(c)
    a = parse_parameter(a, length=n, name="a")
    try:
        delta = tuple(int(x) for x in delta)
    except (TypeError, ValueError):
        raise InputError("delta must be a sequence of integers") from None
    if len(delta) != n - 1:
        raise InputError(f"delta must have length {n - 1}")
    if any(x > y for x, y in zip(a, c)):
        raise InputError(f"a={a} exceeds c={c}")
    for k in range(1, n):
        lo, hi = -a[k], c[k - 1] - a[k - 1]
        if not lo <= delta[k - 1] <= hi:
            raise InputError(f"Delta_{k}={delta[k - 1]} outside [{lo}, {hi}]")
    D = (0,) + delta + (0,)
    G = supporting_graph(n)
    values = []
    for k, m, j in G.nodes:
        v = a[k - 1]
        if m <= k - 1:
            v += min(D[k - 1], 0)
        if j <= n - k:
            v += max(D[k], 0)
        values.append(v)
    return FeasibleFunction(c, tuple(values))
