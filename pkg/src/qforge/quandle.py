"""Finite quandles given by multiplication tables."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .abelian import CapExceeded

DEFAULT_CLOSURE_CAP = 10**5


class AxiomViolation(ValueError):
    def __init__(self, kind: str, witness):
        self.kind = kind
        self.witness = witness
        super().__init__(f"{kind} fails at {witness}")


class Quandle:
    """Quandle on ``0..n-1``; ``mult[a, b] = a*b`` and ``ldiv[a, b] = a\\b``.

    Build through :func:`validate_quandle` unless the table is known to be good.
    """

    __slots__ = ("mult", "ldiv", "__dict__")

    def __init__(self, mult, ldiv=None):
        mult = np.asarray(mult, dtype=np.int64)
        mult.setflags(write=False)
        self.mult = mult
        if ldiv is None:
            n = mult.shape[0]
            ldiv = np.empty_like(mult)
            rows = np.arange(n)[:, None]
            ldiv[rows, mult] = np.arange(n)[None, :]
        ldiv = np.asarray(ldiv, dtype=np.int64)
        ldiv.setflags(write=False)
        self.ldiv = ldiv

    @property
    def size(self) -> int:
        return self.mult.shape[0]

    def __len__(self) -> int:
        return self.size

    def op(self, a: int, b: int) -> int:
        return int(self.mult[a, b])

    def div(self, a: int, b: int) -> int:
        return int(self.ldiv[a, b])

    def table(self) -> list[list[int]]:
        return self.mult.tolist()

    def relabel(self, perm: Sequence[int]) -> Quandle:
        """Copy transported along ``perm`` (old index ``x`` becomes ``perm[x]``)."""
        perm = np.asarray(perm, dtype=np.int64)
        n = self.size
        inv = np.empty(n, dtype=np.int64)
        inv[perm] = np.arange(n)
        new = perm[self.mult[np.ix_(inv, inv)]]
        return Quandle(new)

    def __eq__(self, other) -> bool:
        return isinstance(other, Quandle) and np.array_equal(self.mult, other.mult)

    def __hash__(self) -> int:
        return hash(self.mult.tobytes())

    def __repr__(self) -> str:
        return f"Quandle(size={self.size})"


def validate_quandle(table) -> Quandle:
    M = np.asarray(table)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ValueError("quandle table must be a non-empty square array")
    if not np.issubdtype(M.dtype, np.integer):
        raise ValueError("quandle table entries must be integers")
    n = M.shape[0]
    M = M.astype(np.int64)
    if M.min() < 0 or M.max() >= n:
        raise ValueError(f"table entries must lie in 0..{n - 1}")
    diag = M[np.arange(n), np.arange(n)]
    bad = np.nonzero(diag != np.arange(n))[0]
    if len(bad):
        raise AxiomViolation("idempotency", int(bad[0]))
    for a in range(n):
        if len(np.unique(M[a])) != n:
            vals, counts = np.unique(M[a], return_counts=True)
            dup = int(vals[counts > 1][0])
            b, c = (int(x) for x in np.nonzero(M[a] == dup)[0][:2])
            raise AxiomViolation("left quasigroup", (a, b, c))
    # x*(y*z) == (x*y)*(x*z)
    for x in range(n):
        lhs = M[x][M]  # lhs[y, z] = x*(y*z)
        rhs = M[M[x][:, None], M[x][None, :]]
        if not np.array_equal(lhs, rhs):
            y, z = (int(v) for v in np.argwhere(lhs != rhs)[0])
            raise AxiomViolation("left distributivity", (x, y, z))
    return Quandle(M)


def medial_witness(Q: Quandle):
    """First failing instance ``(identity, (x, y, u, v))`` of the three medial laws, or None."""
    n = Q.size
    small = np.int16 if n < 2**15 else np.int64
    M, D = Q.mult.astype(small), Q.ldiv.astype(small)
    laws = (
        ("(x*y)*(u*v)=(x*u)*(y*v)", M, M, M, M, M, M),
        ("(x\\y)\\(u\\v)=(x\\u)\\(y\\v)", D, D, D, D, D, D),
        ("(x\\y)*(u\\v)=(x*u)\\(y*v)", D, D, M, M, M, D),
    )
    for name, A, B, C, E, F, G in laws:
        # lhs[y,u,v] = C[A[x,y], B[u,v]] ; rhs[y,u,v] = G[E[x,u], F[y,v]]
        Bflat = B.ravel().astype(np.intp)
        Fi = F.astype(np.intp)
        for x in range(n):
            lhs = np.take(C[A[x]], Bflat, axis=1).reshape(n, n, n)
            rhs = np.take(G[E[x]], Fi, axis=1).transpose(1, 0, 2)
            if not np.array_equal(lhs, rhs):
                y, u, v = (int(t) for t in np.argwhere(lhs != rhs)[0])
                return name, (x, y, u, v)
    return None


def is_medial(Q: Quandle) -> bool:
    return medial_witness(Q) is None


# ---------------------------------------------------------------------------
# permutations and groups


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(i) for i in self.images)
        if sorted(imgs) != list(range(len(imgs))):
            raise ValueError("not a permutation")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(n)))

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __len__(self) -> int:
        return len(self.images)

    def __mul__(self, other: Permutation) -> Permutation:
        """``(self * other)(x) = self(other(x))``."""
        return Permutation(tuple(self.images[i] for i in other.images))

    def inverse(self) -> Permutation:
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    @property
    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycle_type(self) -> tuple[int, ...]:
        seen = [False] * len(self.images)
        lengths = []
        for i in range(len(self.images)):
            if seen[i]:
                continue
            k, j = 0, i
            while not seen[j]:
                seen[j] = True
                j = self.images[j]
                k += 1
            lengths.append(k)
        return tuple(sorted(lengths, reverse=True))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for i in range(len(self.images)):
            if i in seen or self.images[i] == i:
                continue
            cyc = [i]
            seen.add(i)
            j = self.images[i]
            while j != i:
                cyc.append(j)
                seen.add(j)
                j = self.images[j]
            out.append(tuple(cyc))
        return out

    def __str__(self) -> str:
        cyc = self.cycles()
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc) or "()"


def left_translation(Q: Quandle, a: int) -> Permutation:
    return Permutation(tuple(Q.mult[a].tolist()))


def left_translations(Q: Quandle) -> list[Permutation]:
    return [left_translation(Q, a) for a in range(Q.size)]


def displacement_generators(Q: Quandle) -> list[Permutation]:
    """``L_a L_0^{-1}`` for every ``a``."""
    L0inv = Q.ldiv[0]
    return [Permutation(tuple(Q.mult[a][L0inv].tolist())) for a in range(Q.size)]


def _orbits_from_arrays(n: int, gens: np.ndarray) -> list[list[int]]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for x, y in enumerate(g.tolist()):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)
    blocks: dict[int, list[int]] = {}
    for x in range(n):
        blocks.setdefault(find(x), []).append(x)
    return sorted(blocks.values())


def orbits(Q: Quandle) -> list[list[int]]:
    """Orbits of Dis(Q), each sorted, listed by least element."""
    gens = Q.mult[:, Q.ldiv[0]]
    return _orbits_from_arrays(Q.size, gens)


def lmlt_orbits(Q: Quandle) -> list[list[int]]:
    return _orbits_from_arrays(Q.size, Q.mult)


def orbit_index(Q: Quandle) -> list[int]:
    idx = [0] * Q.size
    for i, orb in enumerate(orbits(Q)):
        for x in orb:
            idx[x] = i
    return idx


def is_connected(Q: Quandle) -> bool:
    return len(orbits(Q)) == 1


def is_latin(Q: Quandle) -> bool:
    cols = np.sort(Q.mult, axis=0)
    return bool(np.all(cols == np.arange(Q.size)[:, None]))


def is_projection(Q: Quandle) -> bool:
    return bool(np.all(Q.mult == np.arange(Q.size)[None, :]))


def reductivity_degree(Q: Quandle) -> int | None:
    """Least ``m`` with ``(..((x*y)*y)..)*y = y`` (``m`` factors of y) for all x, y."""
    n = Q.size
    ys = np.arange(n)
    cur = np.tile(np.arange(n)[:, None], (1, n))  # cur[x, y] = x
    for m in range(1, n + 2):
        cur = Q.mult[cur, ys[None, :]]
        if np.all(cur == ys[None, :]):
            return m
    return None


def is_reductive(Q: Quandle) -> bool:
    return reductivity_degree(Q) is not None


def is_involutory(Q: Quandle) -> bool:
    rows = np.arange(Q.size)[:, None]
    return bool(np.all(Q.mult[rows, Q.mult] == np.arange(Q.size)[None, :]))


def quasi_reductive_witness(Q: Quandle) -> tuple[int, int] | None:
    """First pair ``a < b`` in a common orbit with ``L_a = L_b``."""
    idx = orbit_index(Q)
    seen: dict[tuple, int] = {}
    for a in range(Q.size):
        key = (idx[a], Q.mult[a].tobytes())
        if key in seen:
            return seen[key], a
        seen[key] = a
    return None


def is_quasi_reductive(Q: Quandle) -> bool:
    return quasi_reductive_witness(Q) is not None


# ---------------------------------------------------------------------------
# permutation group closures


@dataclass(frozen=True)
class PermGroupClosure:
    generators: tuple[Permutation, ...]
    elements: np.ndarray | None = field(default=None, compare=False, repr=False)
    capped: bool = False

    @property
    def order(self) -> int | None:
        return None if self.elements is None else len(self.elements)

    @property
    def degree(self) -> int:
        return len(self.generators[0]) if self.generators else 0

    def is_trivial(self) -> bool:
        return self.elements is not None and len(self.elements) == 1

    def is_abelian(self) -> bool:
        gens = [np.array(g.images) for g in self.generators]
        return all(np.array_equal(a[b], b[a]) for a in gens for b in gens)


def _closure_array(gens: np.ndarray, n: int, cap: int) -> np.ndarray | None:
    """Group generated by the rows of ``gens``; None when it exceeds ``cap``."""
    ident = np.arange(n, dtype=np.int64)
    gens = np.unique(gens.reshape(-1, n), axis=0) if len(gens) else np.empty((0, n), np.int64)
    gens = np.array([g for g in gens if not np.array_equal(g, ident)], dtype=np.int64).reshape(-1, n)
    seen = {ident.tobytes()}
    elems = [ident]
    frontier = ident[None, :]
    while len(frontier):
        if len(gens) == 0:
            break
        # products g o x for every generator g and frontier element x
        prods = gens[:, frontier].reshape(-1, n)
        prods = np.unique(prods, axis=0)
        new = []
        for row in prods:
            key = row.tobytes()
            if key not in seen:
                seen.add(key)
                new.append(row)
        if len(seen) > cap:
            return None
        elems.extend(new)
        frontier = np.array(new, dtype=np.int64).reshape(-1, n)
    return np.array(elems, dtype=np.int64)


def closure(generators: Sequence[Permutation], cap: int = DEFAULT_CLOSURE_CAP) -> PermGroupClosure:
    gens = tuple(generators)
    n = len(gens[0]) if gens else 0
    arr = np.array([g.images for g in gens], dtype=np.int64).reshape(-1, n)
    elems = _closure_array(arr, n, cap)
    return PermGroupClosure(gens, elems, elems is None)


def lmlt(Q: Quandle, cap: int = DEFAULT_CLOSURE_CAP) -> PermGroupClosure:
    return closure(left_translations(Q), cap)


def dis(Q: Quandle, cap: int = DEFAULT_CLOSURE_CAP) -> PermGroupClosure:
    return closure(displacement_generators(Q), cap)


def _commutator_subgroup(H: np.ndarray, gens: np.ndarray, n: int, cap: int) -> np.ndarray | None:
    """``[H, G]`` where ``G = <gens>``: normal closure in G of all ``[h, g]``."""
    comms = []
    for g in gens:
        ginv = np.argsort(g)
        # [h, g] = h^-1 g^-1 h g  (as functions, composed right to left)
        hinv = np.argsort(H, axis=1)
        c = np.take_along_axis(hinv, ginv[H[:, g]], axis=1)
        comms.append(c)
    comms = np.unique(np.concatenate(comms), axis=0) if comms else np.empty((0, n), np.int64)
    # normal closure: add conjugates by generators until stable
    current = _closure_array(comms, n, cap)
    if current is None:
        return None
    while True:
        conj = []
        for g in gens:
            ginv = np.argsort(g)
            conj.append(g[current[:, ginv]])
        allgens = np.unique(np.concatenate([comms] + conj), axis=0)
        nxt = _closure_array(allgens, n, cap)
        if nxt is None:
            return None
        if len(nxt) == len(current):
            return current
        current, comms = nxt, allgens


def lmlt_nilpotency_degree(Q: Quandle, cap: int = DEFAULT_CLOSURE_CAP) -> int | None:
    """Nilpotency class of LMlt(Q): number of steps of the lower central series to reach 1.

    Returns None if the series stabilises at a nontrivial group.  Raises
    CapExceeded when a closure does not fit under ``cap``.
    """
    n = Q.size
    gens = np.unique(Q.mult, axis=0)
    G = _closure_array(gens, n, cap)
    if G is None:
        raise CapExceeded(f"LMlt closure exceeds {cap} elements")
    k = 0
    current = G
    while len(current) > 1:
        nxt = _commutator_subgroup(current, gens, n, cap)
        if nxt is None:
            raise CapExceeded(f"commutator closure exceeds {cap} elements")
        if len(nxt) == len(current):
            return None
        current = nxt
        k += 1
    return k


def try_lmlt_nilpotency_degree(Q: Quandle, cap: int = DEFAULT_CLOSURE_CAP) -> tuple[int | None, bool]:
    """``(degree, capped)``; degree is None when not nilpotent or capped."""
    try:
        return lmlt_nilpotency_degree(Q, cap), False
    except CapExceeded:
        return None, True
