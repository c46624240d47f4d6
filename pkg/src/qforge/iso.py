"""Isomorphism of quandles, homology of meshes, and the cyclic-orbit criterion."""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from math import gcd
from typing import Sequence

import numpy as np

from .abelian import CapExceeded, Elem, GroupHom, factorint, image, isomorphisms
from .congruence import all_congruences
from .mesh import AffineMesh, canonical_mesh
from .quandle import (Quandle, is_involutory, left_translation, orbits, reductivity_degree)

DEFAULT_AUT_CAP = 256


class ConsistencyFailure(AssertionError):
    pass


class ShapeMismatch(ValueError):
    pass


@dataclass(frozen=True)
class IsoWitness:
    """Either a bijection ``mapping`` (quandles) or ``(sigma, psi, d)`` (meshes)."""

    mapping: tuple[int, ...] | None = None
    sigma: tuple[int, ...] | None = None
    psi: tuple[GroupHom, ...] | None = None
    d: tuple[Elem, ...] | None = None

    @property
    def kind(self) -> str:
        return "quandle" if self.mapping is not None else "mesh"


# ---------------------------------------------------------------------------
# fingerprints


@dataclass(frozen=True)
class InvariantFingerprint:
    size: int
    orbit_sizes: tuple[int, ...]
    reductivity: int | None
    involutory: bool
    cycle_types: tuple
    congruence_count: int | None = None


def fingerprint(Q: Quandle, congruence_cap: int | None = 24) -> InvariantFingerprint:
    """Isomorphism invariants; the congruence count is computed only for ``size <= congruence_cap``."""
    cyc = Counter(left_translation(Q, a).cycle_type() for a in range(Q.size))
    count = None
    if congruence_cap is not None and Q.size <= congruence_cap:
        count = len(all_congruences(Q))
    return InvariantFingerprint(
        Q.size,
        tuple(sorted(len(o) for o in orbits(Q))),
        reductivity_degree(Q),
        is_involutory(Q),
        tuple(sorted(cyc.items())),
        count,
    )


def _base_colors(M: np.ndarray) -> list[tuple]:
    n = len(M)
    rowfix = (M == np.arange(n)[None, :]).sum(axis=1)
    colfix = (M == np.arange(n)[:, None]).sum(axis=0)
    colperm = np.array([len(np.unique(M[:, y])) for y in range(n)])
    same_row = np.array([(M == M[a]).all(axis=1).sum() for a in range(n)])
    return [(int(rowfix[a]), int(colfix[a]), int(colperm[a]), int(same_row[a])) for a in range(n)]


def _refine(tables: list[tuple[np.ndarray, np.ndarray]], init: list[np.ndarray] | None = None) -> list[np.ndarray]:
    """Colour refinement run jointly on several quandles so colours are comparable."""
    colors = init if init is not None else _compress([_base_colors(M) for M, _ in tables])
    ncol = len(np.unique(np.concatenate(colors)))
    while True:
        new = []
        for (M, D), c in zip(tables, colors):
            K = int(c.max()) + 1
            base = c[None, :]
            row = np.sort(c[M] * K + base, axis=1)
            col = np.sort(c[M.T] * K + base, axis=1)
            drow = np.sort(c[D] * K + base, axis=1)
            sig = np.concatenate([c[:, None], row, col, drow], axis=1)
            new.append([r.tobytes() for r in sig])
        new_colors = _compress(new)
        k = len(np.unique(np.concatenate(new_colors)))
        # each signature starts with the old colour, so the partition only gets finer
        if k == ncol:
            return new_colors
        colors, ncol = new_colors, k


def _compress(sigs: list[list]) -> list[np.ndarray]:
    keys = sorted({s for sig in sigs for s in sig})
    idx = {k: i for i, k in enumerate(keys)}
    return [np.array([idx[s] for s in sig], dtype=np.int64) for sig in sigs]


def refined_profile(Q: Quandle) -> tuple:
    """Histogram of stable colours; an isomorphism invariant usable as a hash key."""
    (c,) = _refine([(Q.mult, Q.ldiv)])
    return tuple(sorted(Counter(c.tolist()).items()))


def _generating_sequence(Q: Quandle, colors: np.ndarray) -> list[int]:
    """Greedy generators: largest orbits first, then rarest colour, then index."""
    orbs = sorted(orbits(Q), key=lambda o: (-len(o), o[0]))
    freq = Counter(colors.tolist())
    order = [x for o in orbs for x in sorted(o, key=lambda x: (freq[int(colors[x])], x))]
    gens: list[int] = []
    inside = np.zeros(Q.size, dtype=bool)
    for x in order:
        if inside[x]:
            continue
        gens.append(x)
        inside[_subquandle(Q, [i for i in np.nonzero(inside)[0]] + [x])] = True
        if inside.all():
            break
    return gens


def _subquandle(Q: Quandle, gens: Sequence[int]) -> np.ndarray:
    S = np.zeros(Q.size, dtype=bool)
    S[list(gens)] = True
    while True:
        idx = np.nonzero(S)[0]
        new = S.copy()
        new[Q.mult[np.ix_(idx, idx)].ravel()] = True
        new[Q.ldiv[np.ix_(idx, idx)].ravel()] = True
        if new.sum() == S.sum():
            return idx
        S = new


def _propagate(Q1: Quandle, Q2: Quandle, f: np.ndarray, used: np.ndarray, c1, c2) -> bool:
    """Extend ``f`` to the subquandle generated by its domain; False on conflict."""
    while True:
        dom = np.nonzero(f >= 0)[0]
        img = f[dom]
        grew = False
        for T1, T2 in ((Q1.mult, Q2.mult), (Q1.ldiv, Q2.ldiv)):
            X = T1[np.ix_(dom, dom)].ravel()
            Y = T2[np.ix_(img, img)].ravel()
            cur = f[X]
            known = cur >= 0
            if np.any(cur[known] != Y[known]):
                return False
            if not known.all():
                Xn, Yn = X[~known], Y[~known]
                # the same new element may be reached twice; the images must agree
                order = np.argsort(Xn, kind="stable")
                Xn, Yn = Xn[order], Yn[order]
                dup = Xn[1:] == Xn[:-1]
                if np.any(dup & (Yn[1:] != Yn[:-1])):
                    return False
                first = np.concatenate([[True], ~dup])
                Xn, Yn = Xn[first], Yn[first]
                if len(np.unique(Yn)) != len(Yn) or used[Yn].any():
                    return False
                if np.any(c1[Xn] != c2[Yn]):
                    return False
                f[Xn] = Yn
                used[Yn] = True
                grew = True
        if not grew:
            return True


def quandle_isomorphic(Q1: Quandle, Q2: Quandle) -> IsoWitness | None:
    n = Q1.size
    if Q2.size != n:
        return None
    if sorted(len(o) for o in orbits(Q1)) != sorted(len(o) for o in orbits(Q2)):
        return None
    if reductivity_degree(Q1) != reductivity_degree(Q2):
        return None
    c1, c2 = _refine([(Q1.mult, Q1.ldiv), (Q2.mult, Q2.ldiv)])
    if sorted(c1.tolist()) != sorted(c2.tolist()):
        return None
    gens = _generating_sequence(Q1, c1)

    tables = [(Q1.mult, Q1.ldiv), (Q2.mult, Q2.ldiv)]

    def individualize(f: np.ndarray, c1, c2):
        """Refine after giving every mapped pair ``(x, f(x))`` its own shared colour."""
        tag1 = np.where(f >= 0, np.arange(n), -1)
        tag2 = np.full(n, -1)
        tag2[f[f >= 0]] = np.nonzero(f >= 0)[0]
        d1, d2 = _compress([list(zip(c1.tolist(), tag1.tolist())), list(zip(c2.tolist(), tag2.tolist()))])
        r1, r2 = _refine(tables, [d1, d2])
        if sorted(r1.tolist()) != sorted(r2.tolist()):
            return None
        return r1, r2

    def search(depth: int, f: np.ndarray, used: np.ndarray, c1, c2):
        if depth == len(gens):
            return f if (f >= 0).all() else None
        g = gens[depth]
        if f[g] >= 0:
            return search(depth + 1, f, used, c1, c2)
        for y in np.nonzero((c2 == c1[g]) & ~used)[0]:
            f2, u2 = f.copy(), used.copy()
            f2[g] = y
            u2[y] = True
            if not _propagate(Q1, Q2, f2, u2, c1, c2):
                continue
            if (f2 >= 0).all():
                return f2
            cols = individualize(f2, c1, c2)
            if cols is None:
                continue
            res = search(depth + 1, f2, u2, *cols)
            if res is not None:
                return res
        return None

    f = search(0, np.full(n, -1, dtype=np.int64), np.zeros(n, dtype=bool), c1, c2)
    if f is None:
        return None
    if not np.array_equal(f[Q1.mult], Q2.mult[np.ix_(f, f)]):
        raise ConsistencyFailure("isomorphism search produced a non-homomorphism")
    return IsoWitness(mapping=tuple(int(x) for x in f))


def apply_witness(Q: Quandle, w: IsoWitness) -> Quandle:
    return Q.relabel(w.mapping)


# ---------------------------------------------------------------------------
# mesh homology


def check_homology(m1: AffineMesh, m2: AffineMesh, w: IsoWitness) -> bool:
    sigma, psi, d = w.sigma, w.psi, w.d
    k = m1.k
    for i, j in itertools.product(range(k), repeat=2):
        si, sj = sigma[i], sigma[j]
        if psi[j].compose(m1.phi[i][j]) != m2.phi[si][sj].compose(psi[i]):
            return False
        G = m2.groups[sj]
        rhs = G.sub(G.add(m2.c[si][sj], m2.phi[si][sj](d[i])), m2.phi[sj][sj](d[j]))
        if psi[j](m1.c[i][j]) != rhs:
            return False
    return True


def are_homologous(m1: AffineMesh, m2: AffineMesh, cap: int = DEFAULT_AUT_CAP) -> IsoWitness | None:
    """Search for ``(sigma, psi_i, d_i)`` satisfying (H1) and (H2)."""
    k = m1.k
    if m2.k != k:
        return None
    if any(G.size > cap for G in m1.groups + m2.groups):
        raise CapExceeded(f"summand larger than automorphism cap {cap}")
    if sorted(G.primary_type for G in m1.groups) != sorted(G.primary_type for G in m2.groups):
        return None
    # biggest / rarest summands first
    order = sorted(range(k), key=lambda i: (-m1.groups[i].size, i))
    sigma = [-1] * k
    psi: list = [None] * k
    used = [False] * k
    found: list = []

    def h1_ok(i: int) -> bool:
        for j in range(k):
            if sigma[j] < 0:
                continue
            for a, b in ((i, j), (j, i)):
                # psi_b o phi_ab == phi'_{sa,sb} o psi_a, compared on element tables
                if not np.array_equal(psi[b].table[m1.phi[a][b].table],
                                      m2.phi[sigma[a]][sigma[b]].table[psi[a].table]):
                    return False
        return True

    def assign(pos: int) -> bool:
        if pos == k:
            d = _solve_d(m1, m2, sigma, psi)
            if d is not None:
                found.append(IsoWitness(sigma=tuple(sigma), psi=tuple(psi), d=tuple(d)))
                return True
            return False
        i = order[pos]
        for s in range(k):
            if used[s] or m2.groups[s].primary_type != m1.groups[i].primary_type:
                continue
            for p in isomorphisms(m1.groups[i], m2.groups[s], cap):
                sigma[i], psi[i] = s, p
                used[s] = True
                if h1_ok(i) and assign(pos + 1):
                    return True
                used[s] = False
                sigma[i], psi[i] = -1, None
        return False

    assign(0)
    if not found:
        return None
    w = found[0]
    if not check_homology(m1, m2, w):
        raise ConsistencyFailure("homology search produced an invalid witness")
    return w


def _solve_d(m1: AffineMesh, m2: AffineMesh, sigma, psi) -> list | None:
    """Find ``d_i in A'_{sigma i}`` with (H2), by backtracking on element indices."""
    k = m1.k
    A2 = m2.groups
    adds = [_group_tables(G) for G in A2]
    # target[i][j] = index in A'_{sj} of psi_j(c_ij) - c'_{si,sj}
    target = [[0] * k for _ in range(k)]
    for i, j in itertools.product(range(k), repeat=2):
        G = A2[sigma[j]]
        target[i][j] = G.index(G.sub(psi[j](m1.c[i][j]), m2.c[sigma[i]][sigma[j]]))
    if any(target[j][j] for j in range(k)):
        return None
    # H2: phi'_{si,sj}(d_i) - phi'_{sj,sj}(d_j) = target[i][j]
    order = sorted(range(k), key=lambda i: A2[sigma[i]].size)
    d: dict[int, int] = {}

    def rec(pos: int) -> bool:
        if pos == k:
            return True
        j = order[pos]
        sj = sigma[j]
        add_j, sub_j = adds[sj]
        cand = np.ones(A2[sj].size, dtype=bool)
        for i, di in d.items():
            si = sigma[i]
            add_i, _ = adds[si]
            # pair (i, j): phi'_{sj,sj}(d_j) = phi'_{si,sj}(d_i) - target[i][j]
            cand &= m2.phi[sj][sj].table == sub_j[m2.phi[si][sj].table[di], target[i][j]]
            # pair (j, i): phi'_{sj,si}(d_j) = target[j][i] + phi'_{si,si}(d_i)
            cand &= m2.phi[sj][si].table == add_i[target[j][i], m2.phi[si][si].table[di]]
        for x in np.nonzero(cand)[0]:
            d[j] = int(x)
            if rec(pos + 1):
                return True
            del d[j]
        return False

    if not rec(0):
        return None
    return [A2[sigma[i]].element(d[i]) for i in range(k)]


_TABLES: dict = {}


def _group_tables(G) -> tuple[np.ndarray, np.ndarray]:
    """Addition and subtraction tables on element indices."""
    if G not in _TABLES:
        co = G.coords
        orders = np.array(G.orders or (1,), dtype=np.int64)[: G.rank]
        add = G.index_array((co[:, None, :] + co[None, :, :]) % orders)
        sub = G.index_array((co[:, None, :] - co[None, :, :]) % orders)
        _TABLES[G] = (add, sub)
    return _TABLES[G]


def iso_equiv_check(Q1: Quandle, Q2: Quandle) -> bool:
    a = quandle_isomorphic(Q1, Q2) is not None
    m1, _ = canonical_mesh(Q1)
    m2, _ = canonical_mesh(Q2)
    b = are_homologous(m1, m2) is not None
    if a != b:
        raise ConsistencyFailure(f"quandle isomorphism says {a}, mesh homology says {b}")
    return a


# ---------------------------------------------------------------------------
# cyclic criterion


@dataclass(frozen=True)
class CyclicShape:
    p: int
    s: int
    k: int
    a: int
    C: tuple[int, ...]


def cyclic_shape(m: AffineMesh) -> CyclicShape:
    """Read off ``(p, s, k, a, C)`` from a mesh of the standard siq shape over ``Z_{p^s}`` with ``phi = p^k a``.

    Summand 0 must be the cyclic group; raises ShapeMismatch otherwise.
    """
    A = m.groups[0]
    if A.rank != 1:
        raise ShapeMismatch("summand 0 is not a cyclic group Z_{p^s}")
    N = A.orders[0]
    fac = factorint(N)
    if len(fac) != 1:
        raise ShapeMismatch(f"|A| = {N} is not a prime power")
    (p, s), = fac.items()
    phi = m.phi[0][0]
    v = phi.matrix[0][0]
    if v == 0:
        raise ShapeMismatch("phi is zero")
    k = 0
    while v % p == 0:
        v //= p
        k += 1
    if not (0 < k < s):
        raise ShapeMismatch(f"phi = {phi.matrix[0][0]} is not p^k a with 0 < k < s")
    a = phi.matrix[0][0] // p**k
    img = image(phi)
    C = []
    to_A = []
    for r in range(1, m.k):
        e = m.phi[r][0]
        if not e.is_injective() or frozenset(e(b) for b in m.groups[r].elements()) != img.members:
            raise ShapeMismatch(f"phi_{r},0 is not an embedding onto phi(A)")
        to_A.append(e)
        C.append(m.c[r][0][0])

    def emb(r):
        return GroupHom.identity(A) if r == 0 else to_A[r - 1]

    def phi_on(x):
        return phi(x)

    for i, j in itertools.product(range(m.k), repeat=2):
        ei, ej = emb(i), emb(j)
        for b in m.groups[i].elements():
            x = ei(b)
            if i == 0 and j == 0:
                want = phi_on(x)
            elif i == 0:
                want = phi_on(phi_on(x))
            elif j == 0:
                want = x
            else:
                want = phi_on(x)
            if ej(m.phi[i][j](b)) != want:
                raise ShapeMismatch(f"phi_{i},{j} does not match the standard siq mesh")
        if i == j:
            continue
        if i == 0:
            want = A.neg(phi_on((C[j - 1],)))
        elif j == 0:
            want = (C[i - 1],)
        else:
            want = phi_on(A.sub((C[i - 1],), (C[j - 1],)))
        if ej(m.c[i][j]) != want:
            raise ShapeMismatch(f"c_{i},{j} does not match the standard siq mesh")
    return CyclicShape(p, s, k, a, tuple(C))


def _bilinear(C1, C2, sigma, mod) -> bool:
    n = len(C1)
    return all((C1[i] * C2[sigma[j]] - C1[j] * C2[sigma[i]]) % mod == 0
               for i in range(n) for j in range(i + 1, n))


def _unit_solution(C1, C2, sigma, p, s, k) -> bool:
    """Engine: is there a unit ``y`` of Z_{p^s} with ``C2[sigma i] - y C1[i]`` in ``p^k Z``?

    Units of Z_{p^s} map onto the units of Z_{p^k}, so ``y`` is searched mod ``p^k``.
    """
    mod = p**k
    for y in range(1, mod + 1):
        if gcd(y, p) != 1:
            continue
        if all((C2[sigma[i]] - y * C1[i]) % mod == 0 for i in range(len(C1))):
            return True
    return False


def cyclic_iso_criterion(m1: AffineMesh, m2: AffineMesh) -> bool:
    """Decide isomorphism of two standard siq meshes over the same ``(Z_{p^s}, phi = p^k a)``.

    The meshes are isomorphic iff some permutation ``sigma`` of the non-main
    summands and some unit ``y`` give ``c'_{sigma i} = y c_i (mod p^k)``; for
    constants containing a generator this is the bilinear condition
    ``c_i c'_{sigma j} - c_j c'_{sigma i} = 0`` read modulo ``p^k``.
    Both forms are evaluated and must agree.
    """
    s1, s2 = cyclic_shape(m1), cyclic_shape(m2)
    if (s1.p, s1.s, s1.k) != (s2.p, s2.s, s2.k) or m1.phi[0][0] != m2.phi[0][0]:
        raise ShapeMismatch("meshes are over different (Z_{p^s}, phi)")
    if len(s1.C) != len(s2.C):
        raise ShapeMismatch("meshes have different numbers of orbits")
    mod = s1.p**s1.k
    zeros1 = sum(c % mod == 0 for c in s1.C)
    zeros2 = sum(c % mod == 0 for c in s2.C)
    if zeros1 > 1 or zeros2 > 1 or zeros1 != zeros2:
        raise ShapeMismatch("constants outside the criterion's coset hypotheses")
    if not any(gcd(c, s1.p) == 1 for c in s1.C) or not any(gcd(c, s2.p) == 1 for c in s2.C):
        raise ShapeMismatch("constants contain no generator of Z_{p^s}")
    n = len(s1.C)
    fast = engine = False
    for sigma in itertools.permutations(range(n)):
        f = _bilinear(s1.C, s2.C, sigma, mod)
        e = _unit_solution(s1.C, s2.C, sigma, s1.p, s1.s, s1.k)
        if f != e:
            raise ConsistencyFailure(f"bilinear test and linear engine disagree at sigma={sigma}")
        fast |= f
        engine |= e
        if fast:
            break
    return fast
