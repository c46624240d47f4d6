"""Affine meshes, their sums, orbit modules and canonical meshes of medial quandles."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .abelian import (Elem, FinAbGroup, GroupHom, LaurentModule, abelian_groups,
                      decompose, homs, is_nilpotent, subgroup_generated)
from .quandle import Quandle, medial_witness, orbits


class MeshViolation(ValueError):
    def __init__(self, condition: str, indices):
        self.condition = condition
        self.indices = indices
        super().__init__(f"mesh condition {condition} fails at {indices}")


class NonMedial(ValueError):
    pass


@dataclass(frozen=True)
class AffineMesh:
    """Mesh ``(A_i; phi_{i,j}; c_{i,j})`` over the index set ``0..k-1``.

    ``embeddings`` optionally records, for summands that are really subgroups
    of some bigger group (like ``2Z_4``), the embedding ``A_i -> parent``.
    They are provenance only and do not take part in equality.
    """

    groups: tuple[FinAbGroup, ...]
    phi: tuple[tuple[GroupHom, ...], ...]
    c: tuple[tuple[Elem, ...], ...]
    embeddings: tuple = field(default=(), compare=False)

    @property
    def k(self) -> int:
        return len(self.groups)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(G.size for G in self.groups)

    @property
    def order(self) -> int:
        return sum(self.sizes)

    def t(self, i: int) -> GroupHom:
        """``1 - phi_{i,i}``, the automorphism acting on summand ``i``."""
        return GroupHom.identity(self.groups[i]) - self.phi[i][i]

    def module(self, i: int) -> LaurentModule:
        return LaurentModule(self.groups[i], self.t(i))

    def __str__(self) -> str:
        groups = ", ".join(str(G) for G in self.groups)
        phis = "; ".join(" ".join(str([list(r) for r in h.matrix]) for h in row) for row in self.phi)
        cs = "; ".join(" ".join(str(list(x)) for x in row) for row in self.c)
        return f"(({groups}); ({phis}); ({cs}))"


def _as_hom(x, src: FinAbGroup, tgt: FinAbGroup) -> GroupHom:
    if isinstance(x, GroupHom):
        if x.source != src or x.target != tgt:
            raise ValueError(f"hom {x} does not go {src} -> {tgt}")
        return x
    if isinstance(x, (int, np.integer)):
        if x == 0:
            return GroupHom.zero(src, tgt)
        if src == tgt:
            return GroupHom.scalar(src, int(x))
        raise ValueError("integer shorthand for a hom between different groups must be 0")
    return GroupHom(src, tgt, tuple(tuple(r) for r in x))


def _as_elem(x, G: FinAbGroup) -> Elem:
    if isinstance(x, (int, np.integer)):
        if G.rank == 1:
            return G.reduce((int(x),))
        if G.rank == 0 and x == 0:
            return ()
        if x == 0:
            return G.zero
        raise ValueError(f"integer shorthand {x} is ambiguous for {G}")
    return G.reduce(x)


def check_mesh(m: AffineMesh) -> None:
    """Raise MeshViolation for the first failing condition among (M1)-(M4)."""
    k = m.k
    A, phi, c = m.groups, m.phi, m.c
    for i in range(k):
        if not m.t(i).is_bijective():
            raise MeshViolation("M1", (i,))
    for i in range(k):
        if any(c[i][i]):
            raise MeshViolation("M2", (i, i))
    for i, kk in itertools.product(range(k), repeat=2):
        ref = None
        for j in range(k):
            comp = phi[j][kk].compose(phi[i][j])
            if ref is None:
                ref, j0 = comp, j
            elif comp != ref:
                raise MeshViolation("M3", (i, j0, j, kk))
    for i, j, kk in itertools.product(range(k), repeat=3):
        lhs = phi[j][kk](c[i][j])
        rhs = phi[kk][kk](A[kk].sub(c[i][kk], c[j][kk]))
        if lhs != rhs:
            raise MeshViolation("M4", (i, j, kk))


def validate_mesh(groups: Sequence, phi: Sequence[Sequence], c: Sequence[Sequence],
                  embeddings: Sequence = ()) -> AffineMesh:
    groups = tuple(G if isinstance(G, FinAbGroup) else FinAbGroup(tuple(G)) for G in groups)
    k = len(groups)
    if len(phi) != k or any(len(r) != k for r in phi) or len(c) != k or any(len(r) != k for r in c):
        raise ValueError(f"phi and c must be {k}x{k}")
    phis = tuple(tuple(_as_hom(phi[i][j], groups[i], groups[j]) for j in range(k)) for i in range(k))
    cs = tuple(tuple(_as_elem(c[i][j], groups[j]) for j in range(k)) for i in range(k))
    m = AffineMesh(groups, phis, cs, tuple(embeddings))
    check_mesh(m)
    return m


def is_indecomposable(m: AffineMesh) -> bool:
    for j, A in enumerate(m.groups):
        gens = [m.c[i][j] for i in range(m.k)]
        for i in range(m.k):
            gens.extend(m.phi[i][j].columns())
        if len(subgroup_generated(A, gens)) != A.size:
            return False
    return True


def is_reductive_mesh(m: AffineMesh) -> bool:
    return all(is_nilpotent(m.phi[i][i]) for i in range(m.k))


# ---------------------------------------------------------------------------
# sums


@dataclass(frozen=True)
class LabeledSum:
    """A quandle together with the mesh it is the sum of, and the labelling."""

    quandle: Quandle
    mesh: AffineMesh
    element_of: tuple[tuple[int, Elem], ...]
    names: tuple = field(default=(), compare=False)

    @cached_property
    def index_of(self) -> dict[tuple[int, Elem], int]:
        return {lab: x for x, lab in enumerate(self.element_of)}

    def summand(self, i: int) -> list[int]:
        return [x for x, (j, _) in enumerate(self.element_of) if j == i]

    def name(self, x: int) -> str:
        if self.names:
            return str(self.names[x])
        i, a = self.element_of[x]
        return f"{i}:{a}"


def _add_table(G: FinAbGroup) -> np.ndarray:
    co = G.coords
    s = (co[:, None, :] + co[None, :, :]) % np.array(G.orders or (1,), dtype=np.int64)[: G.rank]
    return G.index_array(s)


def sum_mesh(m: AffineMesh, names: Sequence = ()) -> LabeledSum:
    """Sum quandle; element order is summand by summand, group elements lexicographic."""
    check_mesh(m)
    offsets = np.cumsum((0,) + m.sizes)
    n = int(offsets[-1])
    table = np.empty((n, n), dtype=np.int64)
    adds = [_add_table(G) for G in m.groups]
    for i, j in itertools.product(range(m.k), repeat=2):
        Aj = m.groups[j]
        cij = Aj.index(m.c[i][j])
        pa = m.phi[i][j].table          # indices in A_j
        tb = m.t(j).table               # indices in A_j
        block = adds[j][adds[j][cij][pa][:, None], tb[None, :]]
        table[offsets[i]:offsets[i + 1], offsets[j]:offsets[j + 1]] = block + offsets[j]
    Q = Quandle(table)
    labels = tuple((i, a) for i, G in enumerate(m.groups) for a in G.elements())
    return LabeledSum(Q, m, labels, tuple(names))


# ---------------------------------------------------------------------------
# orbit modules


@dataclass(frozen=True)
class OrbitModule:
    """Orbit ``Qe`` with ``a + b = alpha_a(b)``, ``-a = alpha_a^{-1}(e)``, ``t a = e*a``."""

    quandle: Quandle = field(repr=False)
    base: int
    carrier: tuple[int, ...]
    witnesses: dict = field(repr=False, compare=False)

    def add(self, a: int, b: int) -> int:
        return int(self.witnesses[a][b])

    def neg(self, a: int) -> int:
        return int(np.argsort(self.witnesses[a])[self.base])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def t(self, a: int) -> int:
        return self.quandle.op(self.base, a)

    def t_inv(self, a: int) -> int:
        return self.quandle.div(self.base, a)

    @cached_property
    def add_table(self) -> dict[tuple[int, int], int]:
        return {(a, b): self.add(a, b) for a in self.carrier for b in self.carrier}

    def check(self) -> None:
        """Verify abelian group axioms and that ``t`` is an automorphism of the carrier."""
        S = set(self.carrier)
        e = self.base
        tab = self.add_table
        for (a, b), s in tab.items():
            if s not in S:
                raise ValueError(f"orbit module not closed: {a}+{b}={s}")
            if tab[(b, a)] != s:
                raise ValueError(f"orbit module not commutative at {a},{b}")
            if self.t(s) != tab[(self.t(a), self.t(b))]:
                raise ValueError(f"t not additive at {a},{b}")
        for a in self.carrier:
            if tab[(e, a)] != a or tab[(a, self.neg(a))] != e:
                raise ValueError(f"zero/negation fails at {a}")
        for a, b, c in itertools.product(self.carrier, repeat=3):
            if tab[(tab[(a, b)], c)] != tab[(a, tab[(b, c)])]:
                raise ValueError(f"orbit module not associative at {a},{b},{c}")
        if len({self.t(a) for a in self.carrier}) != len(self.carrier):
            raise ValueError("t is not a bijection of the orbit")

    @cached_property
    def _abstract(self):
        G, basis = decompose(self.carrier, self.add, self.base)
        to_q = {}
        for a in G.elements():
            x = self.base
            for coef, b in zip(a, basis):
                for _ in range(coef):
                    x = self.add(x, b)
            to_q[a] = x
        if len(set(to_q.values())) != len(self.carrier):
            raise ValueError("decomposition of the orbit module is not bijective")
        return G, to_q

    def as_group(self) -> tuple[FinAbGroup, dict[Elem, int], dict[int, Elem]]:
        """Abstract group ``G``, and the two labelling maps ``G -> orbit`` and back."""
        G, to_q = self._abstract
        return G, dict(to_q), {x: a for a, x in to_q.items()}

    def as_laurent_module(self) -> LaurentModule:
        G, to_q, from_q = self.as_group()
        t = GroupHom.from_table(G, G, lambda a: from_q[self.t(to_q[a])])
        return LaurentModule(G, t)


def orbit_module(Q: Quandle, e: int, check: bool = True) -> OrbitModule:
    if medial_witness(Q) is not None:
        raise NonMedial("orbit modules need a medial quandle")
    n = Q.size
    gens = Q.mult[:, Q.ldiv[0]]       # L_a L_0^{-1}
    gens = np.unique(gens, axis=0)
    ident = np.arange(n, dtype=np.int64)
    wit = {e: ident}
    frontier = [e]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = int(g[a])
                if b not in wit:
                    wit[b] = g[wit[a]]
                    nxt.append(b)
        frontier = nxt
    M = OrbitModule(Q, e, tuple(sorted(wit)), wit)
    if check:
        M.check()
    return M


def canonical_mesh(Q: Quandle) -> tuple[AffineMesh, LabeledSum]:
    """Mesh ``A_{Q,E}`` for the transversal of least orbit elements, with its labelling of ``Q``."""
    if medial_witness(Q) is not None:
        raise NonMedial("canonical meshes exist only for medial quandles")
    orbs = orbits(Q)
    E = [o[0] for o in orbs]
    mods = [orbit_module(Q, e) for e in E]
    abstract = [M.as_group() for M in mods]
    groups = tuple(a[0] for a in abstract)
    k = len(E)
    phi = [[None] * k for _ in range(k)]
    c = [[None] * k for _ in range(k)]
    for i, j in itertools.product(range(k), repeat=2):
        e, f = E[i], E[j]
        Mf = mods[j]
        _, to_i, _ = abstract[i]
        _, _, from_j = abstract[j]
        ef = Q.op(e, f)
        c[i][j] = from_j[ef]
        fn = lambda a, to_i=to_i, from_j=from_j, f=f, ef=ef, Mf=Mf: from_j[Mf.sub(Q.op(to_i[a], f), ef)]
        phi[i][j] = GroupHom.from_table(groups[i], groups[j], fn)
    m = validate_mesh(groups, phi, c)
    labels = [None] * Q.size
    for i, (_, to_i, _) in enumerate(abstract):
        for a, x in to_i.items():
            labels[x] = (i, a)
    L = LabeledSum(Q, m, tuple(labels))
    # Q must be exactly the sum under this labelling
    S = sum_mesh(m)
    pos = np.array([S.index_of[lab] for lab in labels])
    if not np.array_equal(pos[Q.mult], S.quandle.mult[np.ix_(pos, pos)]):
        raise AssertionError("quandle differs from the sum of its canonical mesh")
    return m, L


# ---------------------------------------------------------------------------
# random meshes (for property tests)


def _random_group(rng, order: int) -> FinAbGroup:
    opts = abelian_groups(order)
    return opts[int(rng.integers(len(opts)))]


def random_mesh(rng, max_order: int = 10, max_summands: int = 3, indecomposable: bool = True,
                tries: int = 200) -> AffineMesh:
    """Random valid mesh with total order at most ``max_order``.

    Entries are chosen in a random order by randomized backtracking so that
    (M3) and (M4) hold; with ``indecomposable`` the result is resampled
    until it is indecomposable.
    """
    for _ in range(tries):
        k = int(rng.integers(1, max_summands + 1))
        budget = max_order
        sizes = []
        for i in range(k):
            left = budget - (k - i - 1)
            if left < 1:
                break
            s = int(rng.integers(1, min(left, 8) + 1))
            sizes.append(s)
            budget -= s
        groups = [_random_group(rng, s) for s in sizes]
        m = _random_mesh_on(rng, groups)
        if m is None:
            continue
        if indecomposable and not is_indecomposable(m):
            continue
        return m
    raise RuntimeError("could not sample a mesh")


def _random_mesh_on(rng, groups: list[FinAbGroup], node_budget: int = 5000) -> AffineMesh | None:
    k = len(groups)
    cand = {}
    for i, j in itertools.product(range(k), repeat=2):
        hs = homs(groups[i], groups[j])
        if i == j:
            hs = [h for h in hs if (GroupHom.identity(groups[i]) - h).is_bijective()]
        order = rng.permutation(len(hs))
        # bias towards zero so (M3) does not kill most draws
        zero = GroupHom.zero(groups[i], groups[j])
        lst = [hs[t] for t in order]
        if zero in lst and rng.random() < 0.3:
            lst.remove(zero)
            lst.insert(0, zero)
        cand[(i, j)] = lst
    slots = [(i, j) for i in range(k) for j in range(k)]
    phi: dict = {}
    nodes = [0]

    def m3_ok():
        # every fully assigned instance of phi_{j,k} phi_{i,j} = phi_{j',k} phi_{i,j'}
        for i, kk in itertools.product(range(k), repeat=2):
            ref = None
            for j in range(k):
                if (i, j) in phi and (j, kk) in phi:
                    comp = phi[(j, kk)].compose(phi[(i, j)])
                    if ref is None:
                        ref = comp
                    elif comp != ref:
                        return False
        return True

    def fill_phi(s):
        if s == len(slots):
            return True
        nodes[0] += 1
        if nodes[0] > node_budget:
            return False
        for h in cand[slots[s]]:
            phi[slots[s]] = h
            if m3_ok() and fill_phi(s + 1):
                return True
            del phi[slots[s]]
        return False

    if not fill_phi(0):
        return None
    PHI = [[phi[(i, j)] for j in range(k)] for i in range(k)]
    cslots = [(i, j) for i in range(k) for j in range(k) if i != j]
    c = {(i, i): groups[i].zero for i in range(k)}
    celems = {j: list(groups[j].elements()) for j in range(k)}

    def m4_ok():
        for i, j, kk in itertools.product(range(k), repeat=3):
            if (i, j) in c and (i, kk) in c and (j, kk) in c:
                if PHI[j][kk](c[(i, j)]) != PHI[kk][kk](groups[kk].sub(c[(i, kk)], c[(j, kk)])):
                    return False
        return True

    def fill_c(s):
        if s == len(cslots):
            return True
        nodes[0] += 1
        if nodes[0] > 2 * node_budget:
            return False
        i, j = cslots[s]
        for t in rng.permutation(len(celems[j])):
            c[(i, j)] = celems[j][t]
            if m4_ok() and fill_c(s + 1):
                return True
            del c[(i, j)]
        return False

    if not fill_c(0):
        return None
    C = [[c[(i, j)] for j in range(k)] for i in range(k)]
    return validate_mesh(groups, PHI, C)


def relabel_mesh(m: AffineMesh, sigma: Sequence[int], psi: Sequence[GroupHom], d: Sequence[Elem]) -> AffineMesh:
    """Image of ``m`` under a homology ``(sigma, psi, d)``.

    The result ``m'`` satisfies (H1) and (H2) with respect to ``m``:
    summand ``i`` of ``m`` becomes summand ``sigma[i]`` of ``m'`` via ``psi[i]``.
    """
    k = m.k
    inv = [0] * k
    for i, s in enumerate(sigma):
        inv[s] = i
    groups = [psi[inv[s]].target for s in range(k)]
    phi = [[None] * k for _ in range(k)]
    c = [[None] * k for _ in range(k)]
    for i, j in itertools.product(range(k), repeat=2):
        pi, pj = psi[i], psi[j]
        phi[sigma[i]][sigma[j]] = pj.compose(m.phi[i][j]).compose(pi.inverse())
    for i, j in itertools.product(range(k), repeat=2):
        si, sj = sigma[i], sigma[j]
        G = groups[sj]
        # c'_{si,sj} = psi_j(c_ij) - phi'_{si,sj}(d_i) + phi'_{sj,sj}(d_j)
        val = psi[j](m.c[i][j])
        val = G.sub(val, phi[si][sj](d[i]))
        val = G.add(val, phi[sj][sj](d[j]))
        c[si][sj] = val
    return validate_mesh(groups, phi, c)
