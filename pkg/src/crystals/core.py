"""Edge-colored digraphs with at most one in- and out-edge per color.

A :class:`Crystal` stores its edges as two dense tables ``succ`` and ``pred``
of shape ``(V, n)``; entry ``succ[v, i-1]`` is the head of the color-``i``
edge leaving ``v`` or ``-1``.  Colors are 1-based everywhere in the public
API.  Operator words are written left to right and applied right to left,
so ``(3, 2, 1)`` means apply ``F1``, then ``F2``, then ``F3``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InputError, MalformedCrystalError

FAMILIES = ("A", "B", "C", "raw")

# graphviz "dark28" scheme; colors cycle after eight
DOT_COLORSCHEME = "dark28"


class LineStats(NamedTuple):
    tail: int
    head: int


class Crystal:
    """A finite edge-colored digraph with the one-in/one-out property per color."""

    def __init__(self, n: int, succ: np.ndarray, family: str = "raw", c: Sequence[int] | None = None):
        succ = np.asarray(succ, dtype=np.int64)
        if succ.ndim != 2 or succ.shape[1] != n:
            raise InputError(f"successor table must have shape (V, {n})")
        if family not in FAMILIES:
            raise InputError(f"unknown family {family!r}")
        V = succ.shape[0]
        if ((succ < -1) | (succ >= V)).any():
            raise MalformedCrystalError("edge endpoint out of range")
        pred = np.full_like(succ, -1)
        for i in range(n):
            col = succ[:, i]
            tails = np.flatnonzero(col >= 0)
            heads = col[tails]
            if heads.size != np.unique(heads).size:
                dup = int(np.flatnonzero(np.bincount(heads) > 1)[0])
                raise MalformedCrystalError(f"vertex {dup} has two incoming edges of color {i + 1}")
            pred[heads, i] = tails
        self.n = n
        self.succ = succ
        self.pred = pred
        self.family = family
        self.c = tuple(int(x) for x in c) if c is not None else None
        self._lines: tuple[np.ndarray, np.ndarray] | None = None

    @classmethod
    def from_edges(cls, n: int, num_vertices: int, edges: Iterable[Sequence[int]],
                   family: str = "raw", c: Sequence[int] | None = None) -> "Crystal":
        arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 3)
        if arr.size and (arr[:, 2].min() < 1 or arr[:, 2].max() > n):
            raise MalformedCrystalError(f"edge colors must lie in 1..{n}")
        if arr.size and (arr[:, :2].min() < 0 or arr[:, :2].max() >= num_vertices):
            raise MalformedCrystalError("edge endpoint out of range")
        succ = np.full((num_vertices, n), -1, dtype=np.int64)
        if arr.size:
            key = arr[:, 0] * n + arr[:, 2] - 1
            if np.unique(key).size != key.size:
                _, first, counts = np.unique(key, return_index=True, return_counts=True)
                bad = arr[first[counts > 1][0]]
                raise MalformedCrystalError(
                    f"vertex {int(bad[0])} has two outgoing edges of color {int(bad[2])}")
            succ[arr[:, 0], arr[:, 2] - 1] = arr[:, 1]
        return cls(n, succ, family, c)

    # basic shape

    @property
    def num_vertices(self) -> int:
        return self.succ.shape[0]

    @property
    def num_edges(self) -> int:
        return int((self.succ >= 0).sum())

    def edges(self) -> np.ndarray:
        """Edges as an ``(E, 3)`` array of ``(from, to, color)`` sorted by (from, color)."""
        v, i = np.nonzero(self.succ >= 0)
        return np.stack([v, self.succ[v, i], i + 1], axis=1)

    def edge_list(self) -> list[tuple[int, int, int]]:
        return [tuple(e) for e in self.edges().tolist()]

    def color_counts(self) -> list[int]:
        return [int(x) for x in (self.succ >= 0).sum(axis=0)]

    def sources(self) -> np.ndarray:
        return np.flatnonzero((self.pred < 0).all(axis=1))

    def sinks(self) -> np.ndarray:
        return np.flatnonzero((self.succ < 0).all(axis=1))

    @property
    def source(self) -> int:
        s = self.sources()
        if s.size != 1:
            raise MalformedCrystalError(f"expected a unique source, found {s.size}")
        return int(s[0])

    @property
    def sink(self) -> int:
        s = self.sinks()
        if s.size != 1:
            raise MalformedCrystalError(f"expected a unique sink, found {s.size}")
        return int(s[0])

    def __repr__(self) -> str:
        c = "" if self.c is None else f", c={self.c}"
        return f"Crystal(family={self.family!r}, n={self.n}{c}, vertices={self.num_vertices})"

    # operators

    def _color(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise InputError(f"color {i} out of range 1..{self.n}")
        return i - 1

    def f(self, v: int, i: int) -> int | None:
        w = int(self.succ[v, self._color(i)])
        return None if w < 0 else w

    def e(self, v: int, i: int) -> int | None:
        w = int(self.pred[v, self._color(i)])
        return None if w < 0 else w

    def apply_word(self, v: int | None, word: Sequence[int], inverse: bool = False) -> int | None:
        table = self.pred if inverse else self.succ
        for i in reversed(word):
            if v is None:
                return None
            w = int(table[v, self._color(i)])
            v = None if w < 0 else w
        return v

    # line statistics

    def _line_tables(self) -> tuple[np.ndarray, np.ndarray]:
        if self._lines is None:
            V, n = self.succ.shape
            tails = np.full((V, n), -1, dtype=np.int64)
            heads = np.full((V, n), -1, dtype=np.int64)
            for i in range(n):
                starts = np.flatnonzero(self.pred[:, i] < 0)
                cur, line = starts, np.arange(starts.size)
                length = np.zeros(starts.size, dtype=np.int64)
                line_of = np.zeros(V, dtype=np.int64)
                pos = 0
                while cur.size:
                    tails[cur, i] = pos
                    line_of[cur] = line
                    length[line] = pos
                    nxt = self.succ[cur, i]
                    keep = nxt >= 0
                    cur, line = nxt[keep], line[keep]
                    pos += 1
                reached = tails[:, i] >= 0
                if not reached.all():
                    v = int(np.flatnonzero(~reached)[0])
                    raise MalformedCrystalError(f"vertex {v} lies on a cycle of color {i + 1}")
                heads[:, i] = length[line_of] - tails[:, i]
            self._lines = (tails, heads)
        return self._lines

    @property
    def tails(self) -> np.ndarray:
        return self._line_tables()[0]

    @property
    def heads(self) -> np.ndarray:
        return self._line_tables()[1]

    def cycle_witness(self) -> tuple[int, int] | None:
        """Return ``(vertex, color)`` on a monochromatic cycle, if there is one."""
        try:
            self._line_tables()
        except MalformedCrystalError:
            for i in range(self.n):
                seen = np.zeros(self.num_vertices, dtype=bool)
                cur = np.flatnonzero(self.pred[:, i] < 0)
                while cur.size:
                    seen[cur] = True
                    cur = self.succ[cur, i]
                    cur = cur[cur >= 0]
                if not seen.all():
                    return int(np.flatnonzero(~seen)[0]), i + 1
        return None

    # derived graphs

    def relabel_colors(self, mapping: dict[int, int] | Sequence[int]) -> "Crystal":
        """Return the crystal whose color ``mapping[i]`` edges are this crystal's ``i`` edges."""
        if not isinstance(mapping, dict):
            mapping = {i + 1: int(m) for i, m in enumerate(mapping)}
        if sorted(mapping) != list(range(1, self.n + 1)) or sorted(mapping.values()) != list(range(1, self.n + 1)):
            raise InputError("color relabeling must be a permutation of all colors")
        succ = np.empty_like(self.succ)
        for i, j in mapping.items():
            succ[:, j - 1] = self.succ[:, i - 1]
        return Crystal(self.n, succ, "raw", None)

    def restrict(self, vertices: Sequence[int] | np.ndarray, colors: Sequence[int]) -> tuple["Crystal", np.ndarray]:
        """Induced subgraph on ``vertices`` keeping ``colors`` (renumbered ``1..len(colors)``).

        Returns the subgraph and the array of original vertex ids.
        """
        verts = np.asarray(vertices, dtype=np.int64)
        local = np.full(self.num_vertices, -1, dtype=np.int64)
        local[verts] = np.arange(verts.size)
        cols = [self._color(i) for i in colors]
        sub = self.succ[np.ix_(verts, cols)] if cols else np.empty((verts.size, 0), dtype=np.int64)
        out = np.where(sub >= 0, local[np.maximum(sub, 0)], -1)
        return Crystal(len(cols), out, "raw", None), verts

    def with_meta(self, family: str, c: Sequence[int] | None) -> "Crystal":
        K = Crystal.__new__(Crystal)
        K.n, K.succ, K.pred, K._lines = self.n, self.succ, self.pred, self._lines
        if family not in FAMILIES:
            raise InputError(f"unknown family {family!r}")
        K.family = family
        K.c = tuple(int(x) for x in c) if c is not None else None
        return K


def head_tail(K: Crystal, v: int, i: int) -> LineStats:
    """Tail and head length of ``v`` along its color-``i`` line."""
    j = K._color(i)
    if not 0 <= v < K.num_vertices:
        raise InputError(f"vertex {v} out of range")
    t, h = K._line_tables()
    return LineStats(int(t[v, j]), int(h[v, j]))


def edge_label(K: Crystal, u: int, i: int, j: int) -> int:
    """Label of the color-``i`` edge leaving ``u`` with respect to color ``j``.

    The label is the growth of the ``j``-head length across the edge and must
    be 0 or 1 for neighboring colors.
    """
    if abs(i - j) != 1:
        raise InputError(f"labels are defined for neighboring colors, got {i} and {j}")
    v = K.f(u, i)
    if v is None:
        raise InputError(f"no edge of color {i} leaves vertex {u}")
    label = head_tail(K, v, j).head - head_tail(K, u, j).head
    if label not in (0, 1):
        raise MalformedCrystalError(f"edge ({u}, {v}) of color {i} has label {label} w.r.t. {j}")
    return label


@dataclass
class GradingResult:
    ok: bool
    potential: np.ndarray | None = None
    # closed route as (from, to, color, forward) steps; set when ok is False
    witness: list[tuple[int, int, int, bool]] | None = None

    def net_counts(self, n: int) -> list[int]:
        counts = [0] * n
        for _, _, i, fwd in self.witness or []:
            counts[i - 1] += 1 if fwd else -1
        return counts


def check_graded(K: Crystal) -> GradingResult:
    """Look for a weight function ``w`` with ``w(F_i v) = w(v) + e_i``.

    On failure the witness is a closed undirected route whose forward and
    backward traversals of some color do not balance.
    """
    V, n = K.succ.shape
    pot = np.zeros((V, n), dtype=np.int64)
    parent: list[tuple[int, int, bool] | None] = [None] * V
    seen = np.zeros(V, dtype=bool)
    succ, pred = K.succ.tolist(), K.pred.tolist()
    eye = np.eye(n, dtype=np.int64)

    for root in range(V):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for i in range(n):
                for w, sign in ((succ[u][i], 1), (pred[u][i], -1)):
                    if w < 0:
                        continue
                    expect = pot[u] + sign * eye[i]
                    if not seen[w]:
                        seen[w] = True
                        pot[w] = expect
                        parent[w] = (u, i + 1, sign > 0)
                        queue.append(w)
                    elif not np.array_equal(pot[w], expect):
                        # root -> u, edge u-w, w -> root
                        down = _route_from_root(parent, u)
                        edge = (u, w, i + 1, True) if sign > 0 else (w, u, i + 1, False)
                        up = _route_to_root(parent, w)
                        return GradingResult(False, None, down + [edge] + up)
    return GradingResult(True, pot, None)


def _route_from_root(parent, v):
    # steps walked from the root down to v; each step is (edge tail, edge head, color, forward)
    chain = []
    while parent[v] is not None:
        p, i, fwd = parent[v]
        chain.append((p, v, i, True) if fwd else (v, p, i, False))
        v = p
    return list(reversed(chain))


def _route_to_root(parent, v):
    # steps walked from v back up to the root
    chain = []
    while parent[v] is not None:
        p, i, fwd = parent[v]
        chain.append((p, v, i, False) if fwd else (v, p, i, True))
        v = p
    return chain


def canonical_order(K: Crystal) -> np.ndarray:
    """Breadth-first order from the unique source, children taken by (parent rank, color).

    Returns ``order`` with ``order[k]`` the old id of the vertex ranked ``k``.
    """
    src = K.source
    V = K.num_vertices
    seen = np.zeros(V, dtype=bool)
    seen[src] = True
    parts = [np.array([src], dtype=np.int64)]
    frontier = parts[0]
    while frontier.size:
        flat = K.succ[frontier].ravel()
        flat = flat[flat >= 0]
        flat = flat[~seen[flat]]
        if not flat.size:
            break
        _, first = np.unique(flat, return_index=True)
        frontier = flat[np.sort(first)]
        seen[frontier] = True
        parts.append(frontier)
    order = np.concatenate(parts)
    if order.size != V:
        raise MalformedCrystalError(f"{V - order.size} vertices are not reachable from the source")
    return order


def renumber(K: Crystal, order: np.ndarray, family: str | None = None,
             c: Sequence[int] | None = None) -> Crystal:
    """Renumber so that old vertex ``order[k]`` becomes ``k``."""
    inv = np.empty_like(order)
    inv[order] = np.arange(order.size)
    old = K.succ[order]
    succ = np.where(old >= 0, inv[np.maximum(old, 0)], -1)
    return Crystal(K.n, succ, family or K.family, c if c is not None else K.c)


def canonicalize(K: Crystal) -> tuple[Crystal, np.ndarray]:
    """Return the canonically numbered crystal and the order used."""
    order = canonical_order(K)
    return renumber(K, order), order


def isomorphism(K1: Crystal, K2: Crystal) -> np.ndarray | None:
    """Color-preserving isomorphism sending source to source, or ``None``.

    Both graphs are walked in lockstep from their sources along edges in
    both directions; every edge met at one side must be mirrored at the
    other.  Returns ``phi`` with ``phi[v1] = v2``.
    """
    if K1.n != K2.n:
        raise InputError(f"color counts differ: {K1.n} and {K2.n}")
    s1 = _unique_source(K1)
    s2 = _unique_source(K2)
    V = K1.num_vertices
    if V != K2.num_vertices or K1.num_edges != K2.num_edges:
        return None
    phi = np.full(V, -1, dtype=np.int64)
    taken = np.zeros(V, dtype=bool)
    phi[s1] = s2
    taken[s2] = True
    frontier = np.array([s1], dtype=np.int64)
    while frontier.size:
        image = phi[frontier]
        fresh_parts, fresh_imgs = [], []
        for t1, t2 in ((K1.succ, K2.succ), (K1.pred, K2.pred)):
            a, b = t1[frontier], t2[image]
            if not np.array_equal(a >= 0, b >= 0):
                return None
            mask = a >= 0
            a, b = a[mask], b[mask]
            known = phi[a] >= 0
            if (phi[a[known]] != b[known]).any():
                return None
            fresh_parts.append(a[~known])
            fresh_imgs.append(b[~known])
        a = np.concatenate(fresh_parts)
        b = np.concatenate(fresh_imgs)
        if not a.size:
            break
        ua, first, inv = np.unique(a, return_index=True, return_inverse=True)
        if (b != b[first][inv]).any():
            return None
        ub = b[first]
        if taken[ub].any() or np.unique(ub).size != ub.size:
            return None
        phi[ua] = ub
        taken[ub] = True
        frontier = ua
    if (phi < 0).any():
        # parts unreachable even undirected: not a single connected crystal
        return None
    return phi


def isomorphic(K1: Crystal, K2: Crystal) -> bool:
    return isomorphism(K1, K2) is not None


def _unique_source(K: Crystal) -> int:
    s = K.sources()
    if s.size != 1:
        raise InputError(f"isomorphism test needs a unique source, found {s.size}")
    return int(s[0])


# serialization

def to_dict(K: Crystal, annotations: dict | None = None) -> dict:
    sources, sinks = K.sources(), K.sinks()
    obj = {
        "format": "crystal-v1",
        "family": K.family,
        "n": K.n,
        "c": list(K.c) if K.c is not None else [],
        "vertices": K.num_vertices,
        "source": int(sources[0]) if sources.size == 1 else None,
        "sink": int(sinks[0]) if sinks.size == 1 else None,
        "edges": K.edges().tolist(),
    }
    if annotations:
        obj.update(annotations)
    return obj


def to_json(K: Crystal, annotations: dict | None = None) -> str:
    return json.dumps(to_dict(K, annotations), separators=(",", ":")) + "\n"


def from_dict(obj: dict) -> Crystal:
    if not isinstance(obj, dict) or obj.get("format") != "crystal-v1":
        raise InputError("not a crystal-v1 document")
    try:
        n = int(obj["n"])
        V = int(obj["vertices"])
        family = obj.get("family", "raw")
        c = obj.get("c") or None
        edges = obj["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed crystal-v1 document: {exc}") from None
    if n < 0 or V < 0:
        raise InputError("n and vertices must be nonnegative")
    if family not in FAMILIES:
        raise InputError(f"unknown family {family!r}")
    if any(not isinstance(e, list) or len(e) != 3 for e in edges):
        raise InputError("edges must be [from, to, color] triples")
    return Crystal.from_edges(n, V, edges, family, c)


def from_json(text: str) -> Crystal:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None
    return from_dict(obj)


def to_dot(K: Crystal, name: str = "crystal") -> str:
    lines = [f"digraph {name} {{", f"  edge [colorscheme={DOT_COLORSCHEME}];"]
    for v in range(K.num_vertices):
        lines.append(f"  {v};")
    for u, v, i in K.edges().tolist():
        lines.append(f'  {u} -> {v} [color={(i - 1) % 8 + 1}, label="{i}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
