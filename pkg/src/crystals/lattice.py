"""Principal lattice, interval subcrystals and the upper/lower/middle decomposition.

Deviations are stored as plain tuples: an upper deviation ``delta`` holds
``Delta_1..Delta_{n-1}`` and a lower deviation ``nabla`` holds
``nabla_2..nabla_n``.  The implicit boundary entries ``Delta_0``,
``Delta_n``, ``nabla_1`` and ``nabla_{n+1}`` are zero.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .core import Crystal, canonicalize
from .errors import InputError, MalformedCrystalError, parse_parameter


def _pos(x: int) -> int:
    return x if x > 0 else 0


def _neg(x: int) -> int:
    return x if x < 0 else 0


def principal_string(n: int, k: int) -> tuple[int, ...]:
    """The word ``S_{n,k} = w_{n-k+1} ... w_2 w_1`` with ``w_j = F_j F_{j+1} ... F_{j+k-1}``."""
    if not 1 <= k <= n:
        raise InputError(f"k={k} out of range 1..{n}")
    word: list[int] = []
    for j in range(n - k + 1, 0, -1):
        word.extend(range(j, j + k))
    return tuple(word)


def apply_word_batch(K: Crystal, verts: np.ndarray, word: Sequence[int]) -> np.ndarray:
    """Apply an operator word (right to left) to many vertices; ``-1`` where it fails."""
    v = np.asarray(verts, dtype=np.int64).copy()
    for i in reversed(word):
        ok = v >= 0
        v[ok] = K.succ[v[ok], i - 1]
    return v


def source_parameter(K: Crystal) -> tuple[int, ...]:
    s = K.source
    return tuple(int(x) for x in K.heads[s])


def principal_lattice(K: Crystal, c: Sequence[int] | None = None) -> np.ndarray:
    """Array of shape ``(c_1+1, ..., c_n+1)`` holding ``p[a]`` for every ``a`` in the box.

    ``p[a] = S_{n,n}^{a_n} ... S_{n,1}^{a_1}(source)``; the box is filled one
    axis at a time, so ``S_{n,1}`` is applied first as in the formula.
    """
    n = K.n
    c = source_parameter(K) if c is None else parse_parameter(c, length=n)
    grid = np.array(K.source, dtype=np.int64)
    for k in range(1, n + 1):
        word = principal_string(n, k)
        slabs = [grid]
        for _ in range(c[k - 1]):
            nxt = apply_word_batch(K, slabs[-1].ravel(), word).reshape(grid.shape)
            if (nxt < 0).any():
                raise MalformedCrystalError(f"principal string S_{{{n},{k}}} does not act inside the box")
            slabs.append(nxt)
        grid = np.stack(slabs, axis=k - 1)
    return grid


def principal_vertex(K: Crystal, a: Sequence[int]) -> int:
    c = source_parameter(K)
    a = parse_parameter(a, length=K.n, name="a")
    if any(x > y for x, y in zip(a, c)):
        raise InputError(f"a={a} is outside the box 0..{c}")
    v = K.source
    for k in range(1, K.n + 1):
        word = principal_string(K.n, k)
        for _ in range(a[k - 1]):
            v = K.apply_word(v, word)
            if v is None:
                raise MalformedCrystalError(f"principal string S_{{{K.n},{k}}} stops before a={a}")
    return v


def components(K: Crystal, colors: Sequence[int]) -> tuple[int, np.ndarray]:
    """Weakly connected components of the subgraph with the given colors."""
    V = K.num_vertices
    cols = [i - 1 for i in colors]
    if cols:
        sub = K.succ[:, cols]
        rows, _ = np.nonzero(sub >= 0)
        heads = sub[sub >= 0]
    else:
        rows = heads = np.empty(0, dtype=np.int64)
    graph = coo_matrix((np.ones(rows.size, dtype=np.int8), (rows, heads)), shape=(V, V))
    return connected_components(graph, directed=True, connection="weak")


@dataclass
class SubcrystalHandle:
    kind: str
    colors: tuple[int, ...]
    vertices: np.ndarray
    parameter: tuple[int, ...]
    heart: int
    # a for upper, b for lower, ((a, delta), (b, nabla)) for middle, (a, a2) for interval
    locus: tuple = ()
    source: int = -1

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "colors": list(self.colors),
            "parameter": list(self.parameter),
            "heart": int(self.heart),
            "locus": _jsonable(self.locus),
            "vertices": [int(v) for v in self.vertices],
        }


def _jsonable(x):
    if isinstance(x, (tuple, list)):
        return [_jsonable(y) for y in x]
    return int(x)


def _split(K: Crystal, colors: Sequence[int]):
    """Split ``K`` into its components on ``colors``.

    Returns ``(labels, blocks, locals_)`` where ``blocks[t]`` lists the
    ambient ids of component ``t`` and ``locals_[t]`` is that component as a
    crystal on colors renumbered ``1..len(colors)``.
    """
    ncomp, labels = components(K, colors)
    order = np.argsort(labels, kind="stable")
    starts = np.searchsorted(labels[order], np.arange(ncomp + 1))
    rank = np.empty(K.num_vertices, dtype=np.int64)
    rank[order] = np.arange(order.size) - starts[labels[order]]
    cols = [i - 1 for i in colors]
    sub = K.succ[:, cols] if cols else np.empty((K.num_vertices, 0), dtype=np.int64)
    local = np.where(sub >= 0, rank[np.maximum(sub, 0)], -1)
    blocks, locals_ = [], []
    for t in range(ncomp):
        members = order[starts[t]:starts[t + 1]]
        blocks.append(members)
        locals_.append(Crystal(len(cols), local[members]))
    return labels, blocks, locals_


def _side_colors(n: int, side: str) -> tuple[int, ...]:
    if side == "upper":
        return tuple(range(1, n))
    if side == "lower":
        return tuple(range(2, n + 1))
    if side == "middle":
        return tuple(range(2, n))
    raise InputError(f"unknown side {side!r}")


def decompose(K: Crystal, side: str) -> list[SubcrystalHandle]:
    """Upper (drop color ``n``) or lower (drop color 1) subcrystals, sorted by locus."""
    if K.family != "A":
        raise InputError("decomposition needs an A-family crystal")
    if side not in ("upper", "lower"):
        raise InputError("side must be 'upper' or 'lower'")
    colors = _side_colors(K.n, side)
    P = principal_lattice(K, K.c)
    labels, blocks, locals_ = _split(K, colors)
    owner = np.full(len(blocks), -1, dtype=np.int64)
    handles: list[SubcrystalHandle | None] = [None] * len(blocks)
    for a in np.ndindex(P.shape):
        v = int(P[a])
        t = int(labels[v])
        if owner[t] >= 0:
            raise MalformedCrystalError(f"{side} subcrystal containing vertex {v} has two principal vertices")
        owner[t] = v
        sub = locals_[t]
        src = sub.source
        param = tuple(int(x) for x in sub.heads[src])
        handles[t] = SubcrystalHandle(side, colors, blocks[t], param, v, tuple(a), int(blocks[t][src]))
    if (owner < 0).any():
        t = int(np.flatnonzero(owner < 0)[0])
        raise MalformedCrystalError(f"{side} subcrystal with vertex {int(blocks[t][0])} has no principal vertex")
    return sorted(handles, key=lambda h: h.locus)


def interval(K: Crystal, a: Sequence[int], a2: Sequence[int]) -> tuple[SubcrystalHandle, Crystal]:
    """Vertices on directed paths from ``p[a]`` to ``p[a2]`` and the crystal they span."""
    a = parse_parameter(a, length=K.n, name="a")
    a2 = parse_parameter(a2, length=K.n, name="a'")
    if any(x > y for x, y in zip(a, a2)):
        raise InputError(f"interval needs a <= a', got {a} and {a2}")
    lo, hi = principal_vertex(K, a), principal_vertex(K, a2)
    fwd = _reach(K.succ, lo)
    back = _reach(K.pred, hi)
    verts = np.flatnonzero(fwd & back)
    sub, verts = K.restrict(verts, range(1, K.n + 1))
    sub, order = canonicalize(sub)
    verts = verts[order]
    param = tuple(int(x) for x in sub.heads[0])
    diff = tuple(y - x for x, y in zip(a, a2))
    handle = SubcrystalHandle("interval", tuple(range(1, K.n + 1)), verts, param, lo, (a, a2), lo)
    return handle, sub.with_meta("A", diff)


def _reach(table: np.ndarray, start: int) -> np.ndarray:
    seen = np.zeros(table.shape[0], dtype=bool)
    seen[start] = True
    frontier = np.array([start])
    while frontier.size:
        nxt = table[frontier].ravel()
        nxt = np.unique(nxt[nxt >= 0])
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    return seen


# closed-form parameters


def subcrystal_params(c: Sequence[int], locus: Sequence[int], side: str) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Parameter and heart coordinate of ``K_up[a]`` or ``K_low[b]``.

    Upper: ``c_i - a_i + a_{i+1}`` and ``a_{i+1}`` for ``i = 1..n-1``.
    Lower: ``c_i - b_i + b_{i-1}`` and ``b_{i-1}`` for ``i = 2..n``.
    """
    c = parse_parameter(c)
    n = len(c)
    x = parse_parameter(locus, length=n, name="locus")
    if any(p > q for p, q in zip(x, c)):
        raise InputError(f"locus {x} is outside the box 0..{c}")
    if side == "upper":
        return (tuple(c[i] - x[i] + x[i + 1] for i in range(n - 1)),
                tuple(x[i + 1] for i in range(n - 1)))
    if side == "lower":
        return (tuple(c[i] - x[i] + x[i - 1] for i in range(1, n)),
                tuple(x[i - 1] for i in range(1, n)))
    raise InputError("side must be 'upper' or 'lower'")


def _check_box(c, a):
    n = len(c)
    a = parse_parameter(a, length=n, name="a")
    if any(x > y for x, y in zip(a, c)):
        raise InputError(f"{a} is outside the box 0..{c}")
    return a


def _int_tuple(x, length, name):
    try:
        t = tuple(int(v) for v in x)
    except (TypeError, ValueError):
        raise InputError(f"{name} must be a sequence of integers") from None
    if len(t) != length:
        raise InputError(f"{name} must have length {length}, got {len(t)}")
    return t


def upper_box(c: Sequence[int], a: Sequence[int]) -> list[tuple[int, int]]:
    """Bounds ``-a_{i+1} <= Delta_i <= c_i - a_i`` for ``i = 1..n-1``."""
    return [(-a[i + 1], c[i] - a[i]) for i in range(len(c) - 1)]


def lower_box(c: Sequence[int], b: Sequence[int]) -> list[tuple[int, int]]:
    """Bounds ``-b_{i-1} <= nabla_i <= c_i - b_i`` for ``i = 2..n``."""
    return [(-b[i - 1], c[i] - b[i]) for i in range(1, len(c))]


def zeta(c: Sequence[int], a: Sequence[int], delta: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Map an upper locus and deviation to the lower locus and deviation of the same middle.

    ``b_i = a_i + Delta_i^+ + Delta_{i-1}^-`` and ``nabla_i = -Delta_{i-1}``.
    """
    c = parse_parameter(c)
    n = len(c)
    a = _check_box(c, a)
    delta = _int_tuple(delta, n - 1, "delta")
    for i, (lo, hi) in enumerate(upper_box(c, a), start=1):
        if not lo <= delta[i - 1] <= hi:
            raise InputError(f"Delta_{i}={delta[i - 1]} outside [{lo}, {hi}]")
    D = (0,) + delta + (0,)
    b = tuple(a[i - 1] + _pos(D[i]) + _neg(D[i - 1]) for i in range(1, n + 1))
    nabla = tuple(-D[i - 1] for i in range(2, n + 1))
    return b, nabla


def zeta_inv(c: Sequence[int], b: Sequence[int], nabla: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Inverse of :func:`zeta`: ``a_i = b_i + nabla_i^+ + nabla_{i+1}^-``, ``Delta_i = -nabla_{i+1}``."""
    c = parse_parameter(c)
    n = len(c)
    b = _check_box(c, b)
    nabla = _int_tuple(nabla, n - 1, "nabla")
    for i, (lo, hi) in enumerate(lower_box(c, b), start=2):
        if not lo <= nabla[i - 2] <= hi:
            raise InputError(f"nabla_{i}={nabla[i - 2]} outside [{lo}, {hi}]")
    N = (0,) + nabla + (0,)  # N[i-1] = nabla_i for i = 1..n+1
    a = tuple(b[i - 1] + _pos(N[i - 1]) + _neg(N[i]) for i in range(1, n + 1))
    delta = tuple(-N[i] for i in range(1, n))
    return a, delta


def middle_params(c: Sequence[int], a: Sequence[int] | None = None, delta: Sequence[int] | None = None,
                  b: Sequence[int] | None = None, nabla: Sequence[int] | None = None):
    """Parameter of a middle subcrystal and its heart coordinates on both sides.

    Returns ``(param, heart_up, heart_low)`` indexed by colors ``2..n-1``:
    ``c_i - Delta_i + Delta_{i-1}``, ``a_i + Delta_{i-1}`` and ``b_i + nabla_{i+1}``.
    Either ``(a, delta)`` or ``(b, nabla)`` (or both, if consistent) must be given.
    """
    c = parse_parameter(c)
    n = len(c)
    if a is not None and delta is not None:
        bb, nn = zeta(c, a, delta)
        if b is not None and nabla is not None and (tuple(b), tuple(nabla)) != (bb, nn):
            raise InputError("(a, delta) and (b, nabla) do not describe the same middle subcrystal")
        b, nabla = bb, nn
        a, delta = tuple(a), tuple(delta)
    elif b is not None and nabla is not None:
        a, delta = zeta_inv(c, b, nabla)
        b, nabla = tuple(b), tuple(nabla)
    else:
        raise InputError("give (a, delta) or (b, nabla)")
    D = (0,) + delta + (0,)
    N = (0,) + nabla + (0,)
    param = tuple(c[i - 1] - D[i] + D[i - 1] for i in range(2, n))
    heart_up = tuple(a[i - 1] + D[i - 1] for i in range(2, n))
    heart_low = tuple(b[i - 1] + N[i] for i in range(2, n))
    return param, heart_up, heart_low


def deviation_box(c: Sequence[int], a: Sequence[int]):
    """All upper deviations for ``a`` in lexicographic order."""
    return itertools.product(*(range(lo, hi + 1) for lo, hi in upper_box(c, a)))


def count_common_middles(c: Sequence[int], a: Sequence[int], b: Sequence[int]) -> int:
    """Number of middle subcrystals shared by ``K_up[a]`` and ``K_low[b]``, by enumeration."""
    c = parse_parameter(c)
    a = _check_box(c, a)
    b = _check_box(c, b)
    return sum(1 for d in deviation_box(c, a) if zeta(c, a, d)[0] == b)


# full decomposition with deviations


@dataclass
class MiddleInfo:
    a: tuple[int, ...]
    delta: tuple[int, ...]
    b: tuple[int, ...]
    nabla: tuple[int, ...]
    parameter: tuple[int, ...]
    source: int
    up_vertex: int  # the middle's vertex in the upper lattice of K_up[a]
    low_vertex: int  # its vertex in the lower lattice of K_low[b]
    vertices: np.ndarray = field(repr=False, default=None)


class LatticeDecomposition:
    """Upper, lower and middle subcrystals of an A-crystal with all lattice coordinates.

    Deviations of a middle subcrystal are read off the principal lattices of
    the upper and lower subcrystals containing it, computed on those
    subcrystals by their own principal strings.
    """

    def __init__(self, K: Crystal):
        if K.family != "A" or K.c is None:
            raise InputError("decomposition needs an A-family crystal with its parameter")
        n = K.n
        if n < 2:
            raise InputError("middle subcrystals need at least two colors")
        self.K = K
        self.c = K.c
        self.upper = decompose(K, "upper")
        self.lower = decompose(K, "lower")
        V = K.num_vertices
        self.upper_of = np.empty(V, dtype=np.int64)
        for t, h in enumerate(self.upper):
            self.upper_of[h.vertices] = t
        self.lower_of = np.empty(V, dtype=np.int64)
        for t, h in enumerate(self.lower):
            self.lower_of[h.vertices] = t

        # deviation of every upper/lower lattice vertex; -1 marks "not a lattice vertex"
        self.up_dev = np.full((V, n - 1), 0, dtype=np.int64)
        self.on_up = np.zeros(V, dtype=bool)
        for h in self.upper:
            self._lattice_of(h, self.up_dev, self.on_up)
        self.low_dev = np.full((V, n - 1), 0, dtype=np.int64)
        self.on_low = np.zeros(V, dtype=bool)
        for h in self.lower:
            self._lattice_of(h, self.low_dev, self.on_low)

        colors = _side_colors(n, "middle")
        labels, blocks, locals_ = _split(K, colors)
        self.middle_of = labels
        self.middles: list[MiddleInfo] = []
        for t, (members, sub) in enumerate(zip(blocks, locals_)):
            ups = members[self.on_up[members]]
            lows = members[self.on_low[members]]
            if ups.size != 1 or lows.size != 1:
                raise MalformedCrystalError(
                    f"middle subcrystal with vertex {int(members[0])} meets the upper lattice "
                    f"{ups.size} times and the lower lattice {lows.size} times")
            z, zl = int(ups[0]), int(lows[0])
            src = sub.source if sub.n else 0
            self.middles.append(MiddleInfo(
                a=self.upper[self.upper_of[z]].locus,
                delta=tuple(int(x) for x in self.up_dev[z]),
                b=self.lower[self.lower_of[zl]].locus,
                nabla=tuple(int(x) for x in self.low_dev[zl]),
                parameter=tuple(int(x) for x in sub.heads[src]),
                source=int(members[src]),
                up_vertex=z,
                low_vertex=zl,
                vertices=members,
            ))

    def _lattice_of(self, h: SubcrystalHandle, dev: np.ndarray, mark: np.ndarray) -> None:
        sub, verts = self.K.restrict(h.vertices, h.colors)
        P = principal_lattice(sub, h.parameter)
        _, heart = subcrystal_params(self.c, h.locus, h.kind)
        for coord in np.ndindex(P.shape):
            v = int(verts[P[coord]])
            dev[v] = np.subtract(coord, heart)
            mark[v] = True

    def middle_handles(self) -> list[SubcrystalHandle]:
        colors = _side_colors(self.K.n, "middle")
        return [SubcrystalHandle("middle", colors, m.vertices, m.parameter, m.up_vertex,
                                 ((m.a, m.delta), (m.b, m.nabla)), m.source) for m in self.middles]

    def upper_locus(self, v: int) -> tuple[int, ...]:
        return self.upper[self.upper_of[v]].locus

    def lower_locus(self, v: int) -> tuple[int, ...]:
        return self.lower[self.lower_of[v]].locus

    def middle(self, v: int) -> MiddleInfo:
        return self.middles[self.middle_of[v]]
