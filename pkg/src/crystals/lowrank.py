"""Closed constructions for two colors: the A_2 sail model and the B_2 worm model."""

from __future__ import annotations

from collections import deque
from typing import NamedTuple, Sequence

import numpy as np

from .core import Crystal, canonicalize
from .errors import InputError, MalformedCrystalError, check_cap, parse_parameter


# A_2 sail model


def sail_build(c1: int, c2: int) -> Crystal:
    """``K(c1, c2)`` glued from ``c2 + 1`` right sails and ``c1 + 1`` left sails.

    A right sail has vertices ``0 <= q <= p <= c1`` and a left sail
    ``0 <= p <= q <= c2``; color 1 steps ``p`` and color 2 steps ``q``.  The
    diagonal vertex ``(i, i)`` of right sail ``j`` is the diagonal vertex
    ``(j, j)`` of left sail ``i``.
    """
    c1, c2 = parse_parameter((c1, c2))
    check_cap((c1 + 1) * (c2 + 1) * (c1 + c2 + 2) // 2, f"K({c1},{c2})")
    ids: dict[tuple, int] = {}

    def vid(key):
        if key not in ids:
            ids[key] = len(ids)
        return ids[key]

    def right(j, p, q):
        return vid(("R", j, p, q))

    def left(i, p, q):
        # diagonal vertices of left sails are owned by the right sails
        return right(q, i, i) if p == q else vid(("L", i, p, q))

    edges = []
    for j in range(c2 + 1):
        for p in range(c1 + 1):
            for q in range(p + 1):
                u = right(j, p, q)
                if p < c1:
                    edges.append((u, right(j, p + 1, q), 1))
                if q < p:
                    edges.append((u, right(j, p, q + 1), 2))
    for i in range(c1 + 1):
        for q in range(c2 + 1):
            for p in range(q + 1):
                u = left(i, p, q)
                if p < q:
                    edges.append((u, left(i, p + 1, q), 1))
                if q < c2:
                    edges.append((u, left(i, p, q + 1), 2))
    K = Crystal.from_edges(2, len(ids), edges)
    K, _ = canonicalize(K)
    return K.with_meta("A", (c1, c2))


class LineData(NamedTuple):
    p_length: int  # length of the 1-path P through p[a]
    p_heart: int  # position of p[a] on P
    b: tuple[int, int]  # locus of the 2-path Q through the i-th vertex of P
    q_length: int
    q_heart: int  # position of p[b] on Q
    q_index: int  # position of the i-th vertex of P on Q


def a2_line_data(c: Sequence[int], a: Sequence[int], i: int) -> LineData:
    """The 1-path through ``p[a]`` and the 2-path through its ``i``-th vertex, in closed form."""
    c1, c2 = parse_parameter(c, length=2)
    a1, a2 = parse_parameter(a, length=2, name="a")
    if a1 > c1 or a2 > c2:
        raise InputError(f"a={a} is outside the box 0..{(c1, c2)}")
    p = c1 - a1 + a2
    if not 0 <= i <= p:
        raise InputError(f"i={i} out of range 0..{p}")
    delta = i - a2
    if delta >= 0:
        b = (a1 + delta, a2)
        q = c2 - 2 * a2 + a1 + i
        qh = b[0]
    else:
        b = (a1, i)
        q = c2 - i + a1
        qh = a1
    return LineData(p, a2, b, q, qh, qh - delta)


# B_2 worm model


class Worm(NamedTuple):
    """Six-tuple ``(x', y, x''; y', x, y'')``: a horizontal limb at height ``y`` and a vertical limb at ``x``."""

    xp: int
    y: int
    xpp: int
    yp: int
    x: int
    ypp: int

    @property
    def points(self):
        """``(X', X'', Y', Y'')``."""
        return (self.xp, self.y), (self.xpp, self.y), (self.x, self.yp), (self.x, self.ypp)

    def sorts(self) -> set[str]:
        Xp, Xpp, Yp, Ypp = self.points
        out = set()
        if Xp == Xpp:
            out.add("V")
        if Ypp == Xp:
            out.add("VH")
        if Xpp == Yp:
            out.add("HV")
        if Yp == Ypp:
            out.add("H")
        return out

    def admissible(self, c1: int, c2: int) -> bool:
        xp, y, xpp, yp, x, ypp = self
        if not all(0 <= t <= 2 * c1 for t in (x, xp, xpp)):
            return False
        if not all(0 <= t <= c2 for t in (y, yp, ypp)):
            return False
        if xp % 2 or xpp % 2:
            return False
        if not (yp <= y <= ypp and xp <= x <= xpp):
            return False
        if yp < y and xp != x:
            return False
        if y < ypp and x != xpp:
            return False
        return True


def principal_worm() -> Worm:
    return Worm(0, 0, 0, 0, 0, 0)


def worm_apply(w: Worm, color: int, c: Sequence[int]) -> Worm | None:
    """One step of color 1 or 2 on a worm; ``None`` when the result leaves the rectangle."""
    c1, c2 = parse_parameter(c, length=2)
    w = Worm(*w)
    if not w.admissible(c1, c2):
        raise InputError(f"{tuple(w)} is not an admissible worm for {(c1, c2)}")
    xp, y, xpp, yp, x, ypp = w
    if color == 1:
        if 2 * x > xp + xpp:
            out = w._replace(xp=xp + 2)
        elif x == xp == xpp and ypp > y:
            out = w._replace(y=y + 1)
        else:
            out = w._replace(xpp=xpp + 2)
    elif color == 2:
        if 2 * y > yp + ypp:
            out = w._replace(yp=yp + 1)
        elif ypp == y == yp and xpp > x:
            out = w._replace(x=x + 1)
        else:
            out = w._replace(ypp=ypp + 1)
    else:
        raise InputError(f"worm colors are 1 and 2, got {color}")
    if max(out.x, out.xp, out.xpp) > 2 * c1 or max(out.y, out.yp, out.ypp) > c2:
        return None
    return out


def enumerate_worms(c1: int, c2: int) -> list[Worm]:
    """All admissible worms, by direct search over the bounded six-tuples."""
    c1, c2 = parse_parameter((c1, c2))
    out = []
    for y in range(c2 + 1):
        for xp in range(0, 2 * c1 + 1, 2):
            for xpp in range(xp, 2 * c1 + 1, 2):
                for x in range(xp, xpp + 1):
                    # a lower limb forces x = x', an upper limb forces x = x''
                    low = range(y + 1) if x == xp else (y,)
                    high = range(y, c2 + 1) if x == xpp else (y,)
                    for yp in low:
                        for ypp in high:
                            out.append(Worm(xp, y, xpp, yp, x, ypp))
    return out


def worm_generate(c1: int, c2: int) -> Crystal:
    """The worm graph ``W(c1, c2)`` as a two-colored crystal of family B."""
    return worm_graph(c1, c2)[0]


def worm_graph(c1: int, c2: int) -> tuple[Crystal, list[Worm]]:
    """``W(c1, c2)`` together with the worm at every (canonically numbered) vertex."""
    c1, c2 = parse_parameter((c1, c2))
    worms = enumerate_worms(c1, c2)
    check_cap(len(worms), f"W({c1},{c2})")
    index = {w: t for t, w in enumerate(worms)}
    succ = np.full((len(worms), 2), -1, dtype=np.int64)
    for t, w in enumerate(worms):
        for color in (1, 2):
            nxt = worm_apply(w, color, (c1, c2))
            if nxt is not None:
                succ[t, color - 1] = index[nxt]
    K = Crystal(2, succ)
    start = index[principal_worm()]
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in succ[u]:
            if v >= 0 and int(v) not in seen:
                seen.add(int(v))
                queue.append(int(v))
    if len(seen) != len(worms):
        raise MalformedCrystalError(f"{len(worms) - len(seen)} worms are unreachable from the principal worm")
    K, order = canonicalize(K)
    return K.with_meta("B", (c1, c2)), [worms[t] for t in order]
