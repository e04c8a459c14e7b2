"""Recursive assembly of ``K(c)`` from its upper and lower subcrystals.

For ``n >= 3`` every upper subcrystal ``K_up[a]`` is a copy of the smaller
crystal ``K(c_up(a))`` and every lower one a copy of ``K(c_low(b))``.  The
copies are glued along their middle subcrystals (colors ``2..n-1``): the
middle of ``K_up[a]`` at deviation ``Delta`` is the middle of ``K_low[b]``
at deviation ``nabla``, where ``(b, nabla) = zeta(a, Delta)``.  Inside a
matched pair the vertices are aligned by breadth-first order from the
middle's own source, which is the unique color-preserving isomorphism.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import Crystal, canonicalize
from .errors import CrystalError, InputError, check_cap, parse_parameter
from .lattice import components, principal_lattice, subcrystal_params, zeta
from .lowrank import sail_build


class AssemblyError(CrystalError):
    """Two middle subcrystals that should be identified do not fit together."""

    kind = "internal"


def path_crystal(length: int) -> Crystal:
    succ = np.full((length + 1, 1), -1, dtype=np.int64)
    succ[:-1, 0] = np.arange(1, length + 1)
    return Crystal(1, succ, "A", (length,))


def component_orders(K: Crystal, colors: Sequence[int]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Components on ``colors`` with every vertex's rank in its component's breadth-first order.

    Returns ``(label, rank, members)`` where ``members`` lists all vertices
    sorted by ``(label, rank)``.  The order inside a component follows the
    canonical rule: start at the component's source and take children by
    (parent rank, color).
    """
    ncomp, label = components(K, colors)
    cols = [i - 1 for i in colors]
    V = K.num_vertices
    if cols:
        roots = np.flatnonzero((K.pred[:, cols] < 0).all(axis=1))
    else:
        roots = np.arange(V)
    if roots.size != ncomp:
        raise AssemblyError(f"{roots.size} sources for {ncomp} components on colors {tuple(colors)}")
    seen = np.zeros(V, dtype=bool)
    seen[roots] = True
    parts = [roots]
    frontier = roots
    sub = K.succ[:, cols]
    while frontier.size and cols:
        flat = sub[frontier].ravel()
        flat = flat[flat >= 0]
        flat = flat[~seen[flat]]
        if not flat.size:
            break
        _, first = np.unique(flat, return_index=True)
        frontier = flat[np.sort(first)]
        seen[frontier] = True
        parts.append(frontier)
    visit = np.concatenate(parts)
    if visit.size != V:
        raise AssemblyError("a component is not reachable from its source")
    members = visit[np.argsort(label[visit], kind="stable")]
    starts = np.searchsorted(label[members], np.arange(ncomp))
    rank = np.empty(V, dtype=np.int64)
    rank[members] = np.arange(V) - starts[label[members]]
    return label, rank, members


@dataclass
class Template:
    """A fully built crystal ``K(p)`` with the data needed to stamp it into a bigger one."""

    parameter: tuple[int, ...]
    crystal: Crystal
    lattice: np.ndarray  # p[a] for every a in the box
    _sides: dict = field(default_factory=dict, repr=False)

    def middles(self, side: str):
        """Components without the first color ("upper" copy) or without the last ("lower" copy).

        Returns ``(label, rank, members, starts, coord)``: ``coord[t]`` is the
        lattice coordinate of the only principal vertex in component ``t``.
        """
        if side not in self._sides:
            n = self.crystal.n
            colors = range(2, n + 1) if side == "upper" else range(1, n)
            label, rank, members = component_orders(self.crystal, list(colors))
            ncomp = int(label.max()) + 1
            coord = [None] * ncomp
            for a in np.ndindex(self.lattice.shape):
                t = int(label[self.lattice[a]])
                if coord[t] is not None:
                    raise AssemblyError(f"component of K{self.parameter} holds two principal vertices")
                coord[t] = a
            if any(x is None for x in coord):
                raise AssemblyError(f"component of K{self.parameter} holds no principal vertex")
            starts = np.searchsorted(label[members], np.arange(ncomp + 1))
            self._sides[side] = (label, rank, members, starts, {a: t for t, a in enumerate(coord)})
        return self._sides[side]


@dataclass
class AssemblyStats:
    templates: int = 0
    cache_hits: int = 0
    peak_vertices: int = 0
    requests: list = field(default_factory=list)
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {"templates": self.templates, "cache_hits": self.cache_hits,
                "peak_vertices": self.peak_vertices, "seconds": round(self.seconds, 6)}


class Assembler:
    """Builds A-crystals by recursive gluing, memoizing every crystal it constructs."""

    def __init__(self):
        self.cache: dict[tuple[int, ...], Template] = {}
        self.stats = AssemblyStats()

    def ci_template(self, interval: tuple[int, int], parameter: Sequence[int]) -> Template:
        """Template for the subcrystal on colors ``interval = (i, j)`` with the given parameter.

        Crystals are determined by their parameter, so the cache key is the
        parameter alone (its length is the interval length).
        """
        p = parse_parameter(parameter)
        i, j = (int(x) for x in interval)
        if i < 1 or j < i:
            raise InputError(f"color interval {interval} is empty or not positive")
        if j - i + 1 != len(p):
            raise InputError(f"interval {interval} has {j - i + 1} colors, parameter {p} has {len(p)}")
        self.stats.requests.append(p)
        hit = self.cache.get(p)
        if hit is not None:
            self.stats.cache_hits += 1
            return hit
        K = self._build(p)
        T = Template(p, K, principal_lattice(K, p))
        self.cache[p] = T
        self.stats.templates += 1
        self.stats.peak_vertices = max(self.stats.peak_vertices, K.num_vertices)
        return T

    def assemble(self, c: Sequence[int]) -> Crystal:
        t0 = time.perf_counter()
        c = parse_parameter(c)
        if not c:
            raise InputError("c must be nonempty")
        K = self.ci_template((1, len(c)), c).crystal
        self.stats.seconds += time.perf_counter() - t0
        return K

    def _build(self, c: tuple[int, ...]) -> Crystal:
        n = len(c)
        if n == 1:
            return path_crystal(c[0])
        if n == 2:
            return sail_build(*c)
        return self._glue(c)

    def _glue(self, c: tuple[int, ...]) -> Crystal:
        n = len(c)
        box = list(itertools.product(*(range(x + 1) for x in c)))

        # stamp upper copies side by side
        uppers, offsets, total = {}, {}, 0
        for a in box:
            param, _ = subcrystal_params(c, a, "upper")
            T = self.ci_template((1, n - 1), param)
            uppers[a] = T
            offsets[a] = total
            total += T.crystal.num_vertices
        check_cap(total, f"K{c}")
        self.stats.peak_vertices = max(self.stats.peak_vertices, total)
        succ = np.full((total, n), -1, dtype=np.int64)
        for a, T in uppers.items():
            s = T.crystal.succ
            succ[offsets[a]:offsets[a] + s.shape[0], :n - 1] = np.where(s >= 0, s + offsets[a], -1)

        # lower copies contribute the color-n edges once their vertices are matched
        matched: set[tuple] = set()
        for b in box:
            lparam, lheart = subcrystal_params(c, b, "lower")
            L = self.ci_template((2, n), lparam)
            l_label, l_rank, _, _, l_coord = L.middles("lower")
            glob = np.full(L.crystal.num_vertices, -1, dtype=np.int64)
            for bb, t in l_coord.items():
                nabla = tuple(x - h for x, h in zip(bb, lheart))
                a, delta = _zeta_inverse_or_fail(c, b, nabla)
                U = uppers[a]
                _, uheart = subcrystal_params(c, a, "upper")
                u_label, u_rank, u_members, u_starts, u_coord = U.middles("upper")
                ut = u_coord[tuple(h + d for h, d in zip(uheart, delta))]
                if (a, delta) in matched:
                    raise AssemblyError(f"middle at a={a}, delta={delta} matched twice")
                matched.add((a, delta))
                mine = np.flatnonzero(l_label == t)
                size = u_starts[ut + 1] - u_starts[ut]
                if size != mine.size:
                    raise AssemblyError(f"middle at a={a}, delta={delta} has {size} vertices, "
                                        f"its partner at b={b} has {mine.size}")
                glob[mine] = offsets[a] + u_members[u_starts[ut] + l_rank[mine]]
            if (glob < 0).any():
                raise AssemblyError(f"lower copy at b={b} is not fully matched")
            tails = np.flatnonzero(L.crystal.succ[:, n - 2] >= 0)
            src, dst = glob[tails], glob[L.crystal.succ[tails, n - 2]]
            if (succ[src, n - 1] >= 0).any():
                raise AssemblyError(f"color-{n} edge placed twice while gluing b={b}")
            succ[src, n - 1] = dst
        expected = sum(len(U.middles("upper")[4]) for U in uppers.values())
        if len(matched) != expected:
            raise AssemblyError(f"{expected - len(matched)} upper middles were never matched")
        K, _ = canonicalize(Crystal(n, succ))
        return K.with_meta("A", c)


def _zeta_inverse_or_fail(c, b, nabla):
    from .lattice import zeta_inv

    a, delta = zeta_inv(c, b, nabla)
    if zeta(c, a, delta) != (tuple(b), tuple(nabla)):
        raise AssemblyError(f"zeta does not round-trip at b={b}, nabla={nabla}")
    return a, delta


def assemble(c: Sequence[int], assembler: Assembler | None = None) -> Crystal:
    """``K(c)`` by recursive assembly; pass an :class:`Assembler` to share its template cache."""
    return (assembler or Assembler()).assemble(c)
