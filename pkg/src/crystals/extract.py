"""Symmetric extraction of B_n and C_n crystals from palindromic A-crystals.

For an A_m crystal whose parameter reads the same backwards, color ``i``
is paired with ``i' = m + 1 - i``.  The complementarity involution ``sigma``
sends the end of a path from the source to the end of the path with every
color replaced by its partner; its fixed points form the extract.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .core import Crystal, canonicalize, isomorphism
from .errors import InputError, MalformedCrystalError, parse_parameter
from .lattice import LatticeDecomposition, apply_word_batch, principal_lattice
from .lowrank import Worm


def _pos(x: int) -> int:
    return x if x > 0 else 0


def _neg(x: int) -> int:
    return x if x < 0 else 0


@dataclass
class SymmetricCrystal:
    base: Crystal
    sigma: np.ndarray

    @property
    def fixed(self) -> np.ndarray:
        return np.flatnonzero(self.sigma == np.arange(self.sigma.size))

    def partner(self, i: int) -> int:
        return self.base.n + 1 - i


def _check_palindromic(K: Crystal) -> tuple[int, ...]:
    if K.family != "A" or K.c is None:
        raise InputError("symmetric extraction needs an A-family crystal with its parameter")
    c = K.c
    if tuple(reversed(c)) != c:
        raise InputError(f"parameter {c} is not palindromic")
    return c


def complementarity(K: Crystal) -> SymmetricCrystal:
    """Compute ``sigma`` by walking ``K`` from the source in lockstep with its color-mirrored self.

    Every vertex is reached along directed edges, and ``sigma(F_i v) = F_{i'} sigma(v)``.
    """
    _check_palindromic(K)
    V, n = K.succ.shape
    mirror = np.arange(n)[::-1]
    sigma = np.full(V, -1, dtype=np.int64)
    src = K.source
    sigma[src] = src
    frontier = np.array([src], dtype=np.int64)
    while frontier.size:
        kids = K.succ[frontier]
        imgs = K.succ[sigma[frontier]][:, mirror]
        mask = kids >= 0
        if not np.array_equal(mask, imgs >= 0):
            raise MalformedCrystalError("color-mirrored walk meets a missing edge")
        k, im = kids[mask], imgs[mask]
        uk, first, inv = np.unique(k, return_index=True, return_inverse=True)
        if (im != im[first][inv.ravel()]).any():
            raise MalformedCrystalError("color-mirrored walk is inconsistent")
        known = sigma[uk] >= 0
        if (sigma[uk[known]] != im[first][known]).any():
            raise MalformedCrystalError("color-mirrored walk is inconsistent")
        fresh = uk[~known]
        sigma[fresh] = im[first][~known]
        frontier = fresh
    if (sigma < 0).any():
        raise MalformedCrystalError("some vertices are not reachable from the source")
    if not np.array_equal(sigma[sigma], np.arange(V)):
        raise MalformedCrystalError("complementarity map is not an involution")
    return SymmetricCrystal(K, sigma)


def sigma_by_isomorphism(K: Crystal) -> np.ndarray:
    """Independent route to ``sigma``: the isomorphism from ``K`` onto ``K`` with mirrored colors."""
    _check_palindromic(K)
    n = K.n
    phi = isomorphism(K, K.relabel_colors({i: n + 1 - i for i in range(1, n + 1)}))
    if phi is None:
        raise MalformedCrystalError("crystal is not isomorphic to its color mirror")
    return phi


class Extract(NamedTuple):
    crystal: Crystal
    vertices: np.ndarray  # ambient id of every extract vertex
    symmetric: SymmetricCrystal


def _paired_edges(K: Crystal, S: np.ndarray, in_S: np.ndarray, i: int) -> np.ndarray:
    j = K.n + 1 - i
    v1 = apply_word_batch(K, S, (i, j))
    v2 = apply_word_batch(K, S, (j, i))
    if not np.array_equal(v1, v2):
        t = int(np.flatnonzero(v1 != v2)[0])
        raise MalformedCrystalError(f"F_{i} and F_{j} do not commute at vertex {int(S[t])}")
    ok = v1 >= 0
    if not in_S[v1[ok]].all():
        raise MalformedCrystalError(f"paired step of colors {i},{j} leaves the self-complementary set")
    return v1


def _build_extract(K: Crystal, kind: str) -> Extract:
    c = _check_palindromic(K)
    m = K.n
    if kind == "B":
        if m % 2 == 0:
            raise InputError(f"B-extraction needs an odd number of colors, got {m}")
        n = (m + 1) // 2
    elif kind == "C":
        if m % 2:
            raise InputError(f"C-extraction needs an even number of colors, got {m}")
        n = m // 2
    else:
        raise InputError(f"unknown extract kind {kind!r}")
    sym = complementarity(K)
    S = sym.fixed
    in_S = np.zeros(K.num_vertices, dtype=bool)
    in_S[S] = True
    local = np.full(K.num_vertices, -1, dtype=np.int64)
    local[S] = np.arange(S.size)
    succ = np.full((S.size, n), -1, dtype=np.int64)
    for i in range(1, n):
        v = _paired_edges(K, S, in_S, i)
        succ[:, i - 1] = np.where(v >= 0, local[np.maximum(v, 0)], -1)
    if kind == "B":
        v = K.succ[S, n - 1]
    else:
        v = apply_word_batch(K, S, (n, n + 1, n + 1, n))
    ok = v >= 0
    if not in_S[v[ok]].all():
        raise MalformedCrystalError("last extract color leaves the self-complementary set")
    succ[:, n - 1] = np.where(ok, local[np.maximum(v, 0)], -1)
    E, order = canonicalize(Crystal(n, succ))
    return Extract(E.with_meta(kind, c[:n]), S[order], sym)


def extract_B(K: Crystal) -> Crystal:
    """B_n extract of a palindromic A_{2n-1} crystal."""
    return _build_extract(K, "B").crystal


def extract_C(K: Crystal) -> Crystal:
    """C_n extract of a palindromic A_{2n} crystal; the last color uses ``F_n F_{n+1}^2 F_n``."""
    return _build_extract(K, "C").crystal


def extract(K: Crystal, kind: str) -> Extract:
    return _build_extract(K, kind)


def base_parameter(kind: str, cbar: Sequence[int]) -> tuple[int, ...]:
    """Palindromic A-parameter whose extract of the given kind has parameter ``cbar``."""
    cbar = parse_parameter(cbar)
    if not cbar:
        raise InputError("parameter must be nonempty")
    if kind == "B":
        return cbar + tuple(reversed(cbar[:-1]))
    if kind == "C":
        return cbar + tuple(reversed(cbar))
    raise InputError(f"unknown extract kind {kind!r}")


# descriptions of self-complementary vertices for two-colored extracts


class BDescription(NamedTuple):
    a1: int
    a2: int
    delta: int
    ell: int


class CDescription(NamedTuple):
    a1: int
    a2: int
    delta: int
    rho: int


def enumerate_B(c1: int, c2: int) -> list[BDescription]:
    """Integer points of the description polytope for ``B(c1, c2)``."""
    c1, c2 = parse_parameter((c1, c2))
    out = []
    for a1 in range(c1 + 1):
        for a2 in range(c2 + 1):
            for d in range(max(-a2, a2 - c2), c1 - a1 + 1):
                for ell in range(c2 + 2 * d + 1):
                    out.append(BDescription(a1, a2, d, ell))
    return out


def enumerate_C(c1: int, c2: int) -> list[CDescription]:
    """Integer points of the description polytope for ``C(c1, c2)``."""
    c1, c2 = parse_parameter((c1, c2))
    out = []
    for a1 in range(c1 + 1):
        for a2 in range(c2 + 1):
            for d in range(-a2, c1 - a1 + 1):
                for rho in range(c2 + d + 1):
                    out.append(CDescription(a1, a2, d, rho))
    return out


def valid_B(d: Sequence[int], c: Sequence[int]) -> bool:
    a1, a2, delta, ell = d
    c1, c2 = c
    return (0 <= a1 <= c1 and 0 <= a2 <= c2 and max(-a2, a2 - c2) <= delta <= c1 - a1
            and 0 <= ell <= c2 + 2 * delta)


def valid_C(d: Sequence[int], c: Sequence[int]) -> bool:
    a1, a2, delta, rho = d
    c1, c2 = c
    return 0 <= a1 <= c1 and 0 <= a2 <= c2 and -a2 <= delta <= c1 - a1 and 0 <= rho <= c2 + delta


class Describer:
    """Descriptions of the self-complementary vertices of a palindromic A_3 or A_4 crystal.

    The upper locus and deviation come from the lattice decomposition of
    the base crystal; the last coordinate is the position of the vertex in
    its middle subcrystal.
    """

    def __init__(self, K: Crystal):
        c = _check_palindromic(K)
        if K.n not in (3, 4):
            raise InputError("descriptions are defined for palindromic A_3 and A_4 crystals")
        self.K = K
        self.kind = "B" if K.n == 3 else "C"
        self.cbar = c[:2]
        self.sym = complementarity(K)
        self.dec = LatticeDecomposition(K)
        self._middle_lattice: dict[int, dict[int, tuple[int, ...]]] = {}

    def __call__(self, v: int) -> BDescription | CDescription:
        v = int(v)
        if not 0 <= v < self.K.num_vertices:
            raise InputError(f"vertex {v} out of range")
        if self.sym.sigma[v] != v:
            raise InputError(f"vertex {v} is not self-complementary")
        a = self.dec.upper_locus(v)
        mid = self.dec.middle(v)
        delta = mid.delta[0]
        if self.kind == "B":
            if mid.delta != (delta, -delta):
                raise MalformedCrystalError(f"deviation {mid.delta} at vertex {v} is not of the form (d, -d)")
            return BDescription(a[0], a[1], delta, int(self.K.tails[v, 1]))
        if mid.delta != (delta, 0, -delta):
            raise MalformedCrystalError(f"deviation {mid.delta} at vertex {v} is not of the form (d, 0, -d)")
        coord = self._middle_coords(self.dec.middle_of[v]).get(v)
        if coord is None or coord[0] != coord[1]:
            raise MalformedCrystalError(f"vertex {v} is not on the diagonal of its middle lattice")
        return CDescription(a[0], a[1], delta, coord[0])

    def _middle_coords(self, t: int) -> dict[int, tuple[int, ...]]:
        if t not in self._middle_lattice:
            mid = self.dec.middles[t]
            sub, verts = self.K.restrict(mid.vertices, (2, 3))
            P = principal_lattice(sub, mid.parameter)
            self._middle_lattice[t] = {int(verts[P[x]]): x for x in np.ndindex(P.shape)}
        return self._middle_lattice[t]


def describe_B(K: Crystal, v: int) -> BDescription:
    d = Describer(K)
    if d.kind != "B":
        raise InputError("describe_B needs a palindromic A_3 crystal")
    return d(v)


def describe_C(K: Crystal, v: int) -> CDescription:
    d = Describer(K)
    if d.kind != "C":
        raise InputError("describe_C needs a palindromic A_4 crystal")
    return d(v)


# worms for descriptions


def _worm(X1, X2, Y1, Y2) -> Worm:
    if X1[1] != X2[1] or Y1[0] != Y2[0]:
        raise MalformedCrystalError("limbs are not axis-parallel")
    return Worm(X1[0], X1[1], X2[0], Y1[1], Y1[0], Y2[1])


def worm_of_B(d: Sequence[int], c: Sequence[int]) -> Worm:
    """Worm in ``W(c1, c2)`` for a description ``(a1, a2, delta, ell)`` of ``B(c1, c2)``."""
    c = parse_parameter(c, length=2)
    a1, a2, delta, ell = (int(x) for x in d)
    if not valid_B((a1, a2, delta, ell), c):
        raise InputError(f"{tuple(d)} is not a description for B{c}")
    a3 = a1 + _pos(delta)
    X1, X2 = (2 * a1, a2), (2 * a3, a2)
    if delta >= 0:
        if ell < a2:
            Y1, Y2 = (2 * a1, ell), X1
        elif ell <= a2 + 2 * delta:
            Y1 = Y2 = (2 * a1 + ell - a2, a2)
        else:
            Y1, Y2 = X2, (2 * a3, ell - 2 * delta)
    elif ell <= a2 + delta:
        Y1, Y2 = (2 * a1, ell), (2 * a1, a2 - delta)
    else:
        Y1, Y2 = (2 * a1, a2 + delta), (2 * a1, ell - 2 * delta)
    return _worm(X1, X2, Y1, Y2)


def worm_of_C(d: Sequence[int], c: Sequence[int]) -> Worm:
    """Worm in ``W(c2, c1)`` for a description ``(a1, a2, delta, rho)`` of ``C(c1, c2)``, closed form."""
    c = parse_parameter(c, length=2)
    a1, a2, delta, rho = (int(x) for x in d)
    if not valid_C((a1, a2, delta, rho), c):
        raise InputError(f"{tuple(d)} is not a description for C{c}")
    a4, a3 = a1 + _pos(delta), a2 + _neg(delta)
    Y1, Y2 = (a2 + a3, a1), (a2 + a3, a4)
    height = a1 + min(_pos(rho - a3), _pos(delta))
    X1 = (2 * min(rho, a3), height)
    X2 = (2 * a2 + 2 * _pos(rho - a2 - delta), height)
    return _worm(X1, X2, Y1, Y2)


def worm_of_C_cases(d: Sequence[int], c: Sequence[int]) -> Worm:
    """Same map as :func:`worm_of_C`, written as the case analysis on the sign of ``delta``."""
    c = parse_parameter(c, length=2)
    a1, a2, delta, rho = (int(x) for x in d)
    if not valid_C((a1, a2, delta, rho), c):
        raise InputError(f"{tuple(d)} is not a description for C{c}")
    a4, a3 = a1 + _pos(delta), a2 + _neg(delta)
    J0, J1 = (2 * a3, a1), (2 * a2, a4)
    if delta <= 0:
        Y = (a2 + a3, a1)  # midpoint of J0 J1
        if rho <= a3:
            return _worm((2 * rho, a1), J1, Y, Y)
        return _worm(J0, (2 * a2 + 2 * (rho - a3), a1), Y, Y)
    if rho <= a3:
        return _worm((2 * rho, a1), J0, J0, J1)
    if rho <= a3 + delta:
        X = (2 * a3, a1 + rho - a3)
        return _worm(X, X, J0, J1)
    return _worm(J1, (2 * a3 + 2 * (rho - a3 - delta), a4), J0, J1)


def omega(d: Sequence[int], c: Sequence[int]) -> int:
    """Closed-form head length of the first extract color at a B-description."""
    c1, _ = parse_parameter(c, length=2)
    a1, a2, delta, ell = (int(x) for x in d)
    return c1 - a1 - delta + ell - min(ell, a2 + delta)


def omega_prime(d: Sequence[int], c: Sequence[int]) -> int:
    """Closed-form head length of the first extract color at a C-description."""
    c1, _ = parse_parameter(c, length=2)
    a1, a2, delta, rho = (int(x) for x in d)
    phi = rho - a2 - delta
    psi = rho - a2 - _neg(delta)
    return c1 - a1 - delta + _pos(phi) + _pos(_neg(phi) + _pos(psi))
