"""Congruences of finite quandles and the submodule-family correspondence below pi."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .abelian import CapExceeded, GroupHom, Subgroup, image, is_submodule, kernel
from .mesh import AffineMesh, LabeledSum
from .quandle import Quandle, orbits

DEFAULT_LATTICE_CAP = 10**5


def _canonical(labels) -> tuple[int, ...]:
    """Relabel blocks by first occurrence."""
    seen: dict = {}
    return tuple(seen.setdefault(x, len(seen)) for x in labels)


@dataclass(frozen=True)
class Congruence:
    labels: tuple[int, ...]
    quandle: Quandle | None = field(default=None, compare=False, repr=False)

    @classmethod
    def from_labels(cls, labels, Q: Quandle | None = None) -> Congruence:
        return cls(_canonical(np.asarray(labels).tolist()), Q)

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n: int, Q: Quandle | None = None) -> Congruence:
        lab = [-1] * n
        for b, blk in enumerate(blocks):
            for x in blk:
                if lab[x] != -1:
                    raise ValueError(f"element {x} in two blocks")
                lab[x] = b
        if -1 in lab:
            raise ValueError("blocks do not cover the carrier")
        return cls.from_labels(lab, Q)

    @classmethod
    def diagonal(cls, n: int, Q=None) -> Congruence:
        return cls(tuple(range(n)), Q)

    @classmethod
    def full(cls, n: int, Q=None) -> Congruence:
        return cls((0,) * n, Q)

    @property
    def size(self) -> int:
        return len(self.labels)

    @cached_property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        out: dict[int, list[int]] = {}
        for x, b in enumerate(self.labels):
            out.setdefault(b, []).append(x)
        return tuple(tuple(v) for v in out.values())

    @property
    def num_blocks(self) -> int:
        return max(self.labels) + 1 if self.labels else 0

    def block_of(self, x: int) -> tuple[int, ...]:
        return self.blocks[self.labels[x]]

    def representative(self, x: int) -> int:
        return self.block_of(x)[0]

    def related(self, a: int, b: int) -> bool:
        return self.labels[a] == self.labels[b]

    def nontrivial_blocks(self) -> list[tuple[int, ...]]:
        return [b for b in self.blocks if len(b) > 1]

    def block_sizes(self) -> tuple[int, ...]:
        return tuple(sorted((len(b) for b in self.blocks), reverse=True))

    @property
    def is_diagonal(self) -> bool:
        return self.num_blocks == self.size

    @property
    def is_full(self) -> bool:
        return self.num_blocks <= 1

    def meet(self, other: Congruence) -> Congruence:
        return Congruence(_canonical(zip(self.labels, other.labels)), self.quandle)

    __and__ = meet

    def join(self, other: Congruence) -> Congruence:
        n = self.size
        a = np.asarray(self.labels)
        b = np.asarray(other.labels)
        rows = np.concatenate([np.arange(n), np.arange(n)])
        # element x is joined to label node n + a[x] and to label node 2n + b[x]
        cols = np.concatenate([n + a, 2 * n + b])
        _, lab = connected_components(coo_matrix((np.ones(2 * n), (rows, cols)), shape=(3 * n, 3 * n)),
                                      directed=False)
        return Congruence.from_labels(lab[:n], self.quandle)

    __or__ = join

    def __le__(self, other: Congruence) -> bool:
        return self.meet(other).labels == self.labels

    def __lt__(self, other: Congruence) -> bool:
        return self <= other and self.labels != other.labels

    def is_compatible(self, Q: Quandle) -> bool:
        lab = np.asarray(self.labels)
        rep = np.array([self.representative(x) for x in range(self.size)])
        for T in (Q.mult, Q.ldiv):
            if not np.array_equal(lab[T], lab[T[rep][:, rep]]):
                return False
        return True

    def to_json(self) -> list[list[int]]:
        return [list(b) for b in sorted(self.blocks)]

    def __str__(self) -> str:
        return "{" + ", ".join("{" + ",".join(map(str, b)) + "}" for b in sorted(self.blocks)) + "}"


def _close(Q: Quandle, lab: np.ndarray) -> np.ndarray:
    """Least congruence containing the partition with labels ``lab``."""
    n = Q.size
    ar = np.arange(n)
    ncomp = len(np.unique(lab))
    while True:
        # a representative per block
        first = np.full(lab.max() + 1, -1)
        first[lab[::-1]] = ar[::-1]
        rep = first[lab]
        src = [ar]
        dst = [rep]
        for T in (Q.mult, Q.ldiv):
            src.append(T[:, ar].ravel())
            dst.append(T[:, rep].ravel())
            src.append(T[ar, :].ravel())
            dst.append(T[rep, :].ravel())
        s = np.concatenate(src)
        d = np.concatenate(dst)
        mask = s != d
        g = coo_matrix((np.ones(mask.sum() + n), (np.concatenate([s[mask], ar]), np.concatenate([d[mask], rep]))),
                       shape=(n, n))
        k, new = connected_components(g, directed=False)
        if k == ncomp:
            return new
        lab, ncomp = new, k


def principal_congruence(Q: Quandle, a: int, b: int) -> Congruence:
    n = Q.size
    if not (0 <= a < n and 0 <= b < n):
        raise IndexError(f"elements must lie in 0..{n - 1}")
    lab = np.arange(n)
    lab[max(a, b)] = min(a, b)
    return Congruence.from_labels(_close(Q, lab), Q)


def congruence_generated(Q: Quandle, pairs: Iterable[tuple[int, int]]) -> Congruence:
    n = Q.size
    rows, cols = [], []
    for a, b in pairs:
        rows.append(a)
        cols.append(b)
    _, lab = connected_components(coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)), directed=False)
    return Congruence.from_labels(_close(Q, lab), Q)


def iter_principal_labels(Q: Quandle):
    """Yield ``(a, b, labels)`` for every pair ``a < b`` with ``labels`` those of Theta(a, b).

    Left translations are automorphisms, so Theta(z*a, z*b) = L_z(Theta(a, b));
    closures are computed once per orbit of LMlt on pairs and transported.
    """
    n = Q.size
    gens = np.unique(Q.mult, axis=0)
    done = np.zeros((n, n), dtype=bool)
    np.fill_diagonal(done, True)
    for a0, b0 in itertools.combinations(range(n), 2):
        if done[a0, b0]:
            continue
        lab = np.arange(n)
        lab[b0] = a0
        stack = [(a0, b0, _close(Q, lab))]
        done[a0, b0] = done[b0, a0] = True
        while stack:
            a, b, lab = stack.pop()
            yield min(a, b), max(a, b), lab
            for g in gens:
                a2, b2 = int(g[a]), int(g[b])
                if not done[a2, b2]:
                    done[a2, b2] = done[b2, a2] = True
                    moved = np.empty_like(lab)
                    moved[g] = lab
                    stack.append((a2, b2, moved))


def principal_congruences(Q: Quandle) -> dict[tuple[int, int], Congruence]:
    out = {(a, b): Congruence.from_labels(lab, Q) for a, b, lab in iter_principal_labels(Q)}
    return dict(sorted(out.items()))


def all_congruences(Q: Quandle, cap: int = DEFAULT_LATTICE_CAP) -> list[Congruence]:
    """Every congruence of ``Q`` (joins of principal congruences), sorted by block count descending."""
    n = Q.size
    principals = list({c.labels: c for c in principal_congruences(Q).values()}.values())
    found = {Congruence.diagonal(n).labels: Congruence.diagonal(n, Q)}
    for p in principals:
        found.setdefault(p.labels, p)
    frontier = list(principals)
    while frontier:
        nxt = []
        for c in frontier:
            for p in principals:
                if p <= c:
                    continue
                j = c | p
                if j.labels not in found:
                    found[j.labels] = Congruence(j.labels, Q)
                    nxt.append(found[j.labels])
                    if len(found) > cap:
                        raise CapExceeded(f"more than {cap} congruences")
        frontier = nxt
    found.setdefault(Congruence.full(n).labels, Congruence.full(n, Q))
    return sorted(found.values(), key=lambda c: (-c.num_blocks, c.block_sizes(), c.labels))


def minimal_congruences(Q: Quandle) -> list[Congruence]:
    principals = list({c.labels: c for c in principal_congruences(Q).values()}.values())
    return sorted((c for c in principals if not any(d < c for d in principals)),
                  key=lambda c: sorted(c.blocks))


def _meet_labels(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.unique(a * (b.max() + 1) + b, return_inverse=True)[1]


def monolith(Q: Quandle) -> Congruence | None:
    """Meet of all nontrivial principal congruences; None unless ``Q`` is SI."""
    n = Q.size
    if n < 2:
        return None
    cur = None
    for _, _, lab in iter_principal_labels(Q):
        cur = lab if cur is None else _meet_labels(cur, lab)
        if cur.max() == n - 1:
            return None
    return Congruence.from_labels(cur, Q)


def is_subdirectly_irreducible(Q: Quandle) -> bool:
    return monolith(Q) is not None


def is_simple(Q: Quandle) -> bool:
    n = Q.size
    if n < 2:
        return False
    return all(principal_congruence(Q, 0, b).is_full for b in range(1, n)) and \
        all(principal_congruence(Q, a, b).is_full for a, b in itertools.combinations(range(1, n), 2))


def orbit_congruence_pi(Q: Quandle) -> Congruence:
    return Congruence.from_blocks(orbits(Q), Q.size, Q)


def lambda_congruence(Q: Quandle) -> Congruence:
    keys: dict[bytes, int] = {}
    return Congruence.from_labels([keys.setdefault(Q.mult[a].tobytes(), len(keys)) for a in range(Q.size)], Q)


def theta_congruence(Q: Quandle) -> Congruence:
    return orbit_congruence_pi(Q) & lambda_congruence(Q)


def has_projection_quotient(Q: Quandle, rho: Congruence) -> bool:
    lab = np.asarray(rho.labels)
    return bool(np.all(lab[Q.mult] == lab[None, :]))


# ---------------------------------------------------------------------------
# submodule families


class FamilyViolation(ValueError):
    pass


@dataclass(frozen=True)
class SubmoduleFamily:
    mesh: AffineMesh = field(repr=False)
    members: tuple[Subgroup, ...]

    def __post_init__(self):
        m = self.mesh
        if len(self.members) != m.k:
            raise FamilyViolation("need one subgroup per summand")
        for i, M in enumerate(self.members):
            if M.parent != m.groups[i]:
                raise FamilyViolation(f"member {i} is not a subgroup of A_{i}")
            if not is_submodule(m.module(i), M):
                raise FamilyViolation(f"member {i} is not a submodule")
        for kk, j in itertools.product(range(m.k), repeat=2):
            h = m.phi[kk][j]
            if any(h(a) not in self.members[j] for a in self.members[kk].elements):
                raise FamilyViolation(f"phi_{kk},{j}(M_{kk}) is not inside M_{j}")

    def __str__(self) -> str:
        return "(" + ", ".join(str(M) for M in self.members) + ")"


def _sub(G, members) -> Subgroup:
    members = frozenset(members)
    return Subgroup(G, members, tuple(sorted(members)))


def congruence_from_family(L: LabeledSum, F: SubmoduleFamily) -> Congruence:
    keys: dict = {}
    cosets = {}
    for i, M in enumerate(F.members):
        G = L.mesh.groups[i]
        for a in G.elements():
            if (i, a) not in cosets:
                for s in M.elements:
                    cosets[(i, G.add(a, s))] = (i, a)
    lab = [keys.setdefault(cosets[L.element_of[x]], len(keys)) for x in range(L.quandle.size)]
    rho = Congruence.from_labels(lab, L.quandle)
    if not rho.is_compatible(L.quandle):
        raise AssertionError("family did not produce a congruence")
    return rho


def summand_congruence(L: LabeledSum) -> Congruence:
    return Congruence.from_labels([i for i, _ in L.element_of], L.quandle)


def family_from_congruence(L: LabeledSum, rho: Congruence) -> SubmoduleFamily:
    if not rho <= summand_congruence(L):
        raise FamilyViolation("congruence is not below the summand partition")
    members = []
    for i, G in enumerate(L.mesh.groups):
        z = L.index_of[(i, G.zero)]
        members.append(_sub(G, [L.element_of[x][1] for x in rho.block_of(z)]))
    F = SubmoduleFamily(L.mesh, tuple(members))
    if congruence_from_family(L, F).labels != rho.labels:
        raise FamilyViolation("congruence is not induced by its submodule family")
    return F


def _stable_image(h: GroupHom) -> Subgroup:
    """``⋂_n h^n(A)`` for an endomorphism of a finite group."""
    cur = image(GroupHom.identity(h.source))
    while True:
        nxt = _sub(h.source, {h(a) for a in cur.elements})
        if nxt.members == cur.members:
            return cur
        cur = nxt


def kernel_families(L: LabeledSum | AffineMesh, j: int = 0) -> tuple[SubmoduleFamily, SubmoduleFamily, SubmoduleFamily]:
    """The three families ``(Ker phi_{i,j})_i``, ``(S_i)_i`` and ``(phi_{j,p}(S_j))_p``,
    where ``S_i = ⋂_n phi_{i,i}^n(A_i)``."""
    m = L.mesh if isinstance(L, LabeledSum) else L
    ker = SubmoduleFamily(m, tuple(kernel(m.phi[i][j]) for i in range(m.k)))
    stable = [_stable_image(m.phi[i][i]) for i in range(m.k)]
    st = SubmoduleFamily(m, tuple(stable))
    pushed = SubmoduleFamily(m, tuple(_sub(m.groups[p], {m.phi[j][p](a) for a in stable[j].elements})
                                      for p in range(m.k)))
    return ker, st, pushed
