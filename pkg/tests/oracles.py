"""Independent reference computations used by the tests.

Nothing here imports the package's construction code: dimensions come
from the Weyl formula over a root system generated from a Cartan matrix,
and A-crystals from semistandard tableaux with the signature rule.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction

import numpy as np


def cartan(family: str, n: int) -> np.ndarray:
    """``A[i, j] = <alpha_i^vee, alpha_j>``; for B the last root is short, for C it is long."""
    A = 2 * np.eye(n, dtype=int)
    for i in range(n - 1):
        A[i, i + 1] = A[i + 1, i] = -1
    if n >= 2 and family == "B":
        A[n - 1, n - 2] = -2
    elif n >= 2 and family == "C":
        A[n - 2, n - 1] = -2
    return A


def positive_coroots(family: str, n: int) -> list[tuple[int, ...]]:
    """Positive coroots in the basis of simple coroots, by closing under simple reflections."""
    A = cartan(family, n)
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    seen = set(simple)
    queue = deque(simple)
    while queue:
        b = np.array(queue.popleft())
        for i in range(n):
            pairing = int(b @ A[:, i])  # <beta^vee, alpha_i>
            r = b.copy()
            r[i] -= pairing
            t = tuple(int(x) for x in r)
            if all(x >= 0 for x in t) and any(t) and t not in seen:
                seen.add(t)
                queue.append(t)
    return sorted(seen)


def weyl_dimension(family: str, c) -> int:
    """Dimension of the irreducible module with highest weight ``sum c_i omega_i``."""
    c = tuple(c)
    out = Fraction(1)
    for k in positive_coroots(family, len(c)):
        out *= Fraction(sum(ki * (ci + 1) for ki, ci in zip(k, c)), sum(k))
    assert out.denominator == 1
    return int(out)


# tableau model of the A_n crystal with highest weight c


def _highest_tableau(c):
    rows = [sum(c[r:]) for r in range(len(c))]
    return tuple(tuple([r + 1] * length) for r, length in enumerate(rows) if length)


def _lower(T, i):
    """Kashiwara operator f_i on a tableau via the bracketing of its row-reading word."""
    word = [(r, k, x) for r in range(len(T) - 1, -1, -1) for k, x in enumerate(T[r])]
    opens, free = 0, []
    for pos, (_, _, x) in enumerate(word):
        if x == i + 1:
            opens += 1
        elif x == i:
            if opens:
                opens -= 1
            else:
                free.append(pos)
    if not free:
        return None
    r, k, _ = word[free[-1]]
    rows = [list(row) for row in T]
    rows[r][k] = i + 1
    return tuple(tuple(row) for row in rows)


def tableau_crystal(c):
    """``(num_vertices, edges)`` of the tableau crystal, vertices numbered in BFS order."""
    n = len(c)
    top = _highest_tableau(c)
    ids = {top: 0}
    queue = deque([top])
    edges = []
    while queue:
        T = queue.popleft()
        for i in range(1, n + 1):
            U = _lower(T, i)
            if U is None:
                continue
            if U not in ids:
                ids[U] = len(ids)
                queue.append(U)
            edges.append((ids[T], ids[U], i))
    return len(ids), edges


def sail_count(c1: int, c2: int) -> int:
    """Vertices of the glued sails: right sails minus the shared diagonals plus left sails."""
    right = (c2 + 1) * (c1 + 1) * (c1 + 2) // 2
    left = (c1 + 1) * (c2 + 1) * (c2 + 2) // 2
    return right + left - (c1 + 1) * (c2 + 1)


def line_lengths(edges, num_vertices, color):
    """Head length of every vertex along ``color`` computed from a plain edge list."""
    nxt = {u: v for u, v, i in edges if i == color}
    out = []
    for v in range(num_vertices):
        h = 0
        while v in nxt:
            v = nxt[v]
            h += 1
        out.append(h)
    return out
