"""Finite abelian groups, homomorphisms and Z[t,t^-1]-modules.

Groups are explicit products of cyclic factors ``Z_{n_1} x ... x Z_{n_k}``;
elements are tuples of residues.  Nothing is silently put into a normal
form: ``Z_4`` and ``Z_2 x Z_2`` are different carriers, and so are
``Z_6`` and ``Z_2 x Z_3``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import gcd, prod
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

Elem = tuple  # residue vector


class CapExceeded(RuntimeError):
    """A configured enumeration cap was hit."""


DEFAULT_SUBGROUP_CAP = 10_000


def factorint(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class FinAbGroup:
    orders: tuple[int, ...] = ()

    def __post_init__(self):
        orders = tuple(int(n) for n in self.orders)
        if any(n < 1 for n in orders):
            raise ValueError(f"cyclic factor orders must be >= 1, got {orders}")
        object.__setattr__(self, "orders", orders)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def size(self) -> int:
        return prod(self.orders)

    @property
    def zero(self) -> Elem:
        return (0,) * self.rank

    @cached_property
    def _strides(self) -> tuple[int, ...]:
        strides = []
        s = 1
        for n in reversed(self.orders):
            strides.append(s)
            s *= n
        return tuple(reversed(strides))

    @cached_property
    def _elements(self) -> tuple[Elem, ...]:
        return tuple(itertools.product(*(range(n) for n in self.orders)))

    def elements(self) -> tuple[Elem, ...]:
        """All elements in lexicographic order (element ``i`` has index ``i``)."""
        return self._elements

    @cached_property
    def coords(self) -> np.ndarray:
        """``size x rank`` array of element coordinates."""
        if self.rank == 0:
            return np.zeros((1, 0), dtype=np.int64)
        return np.array(self._elements, dtype=np.int64)

    def index(self, a: Elem) -> int:
        return sum(x * s for x, s in zip(a, self._strides))

    def index_array(self, coords: np.ndarray) -> np.ndarray:
        """Vectorised ``index`` for an ``(..., rank)`` array of reduced coordinates."""
        if self.rank == 0:
            return np.zeros(coords.shape[:-1], dtype=np.int64)
        return coords @ np.array(self._strides, dtype=np.int64)

    def element(self, i: int) -> Elem:
        return self._elements[i]

    def __contains__(self, a) -> bool:
        try:
            return len(a) == self.rank and all(0 <= int(x) < n for x, n in zip(a, self.orders))
        except TypeError:
            return False

    def check(self, a) -> Elem:
        """Return ``a`` as a tuple, raising if it is not an element of this group."""
        a = tuple(int(x) for x in a)
        if a not in self:
            raise ValueError(f"{a} is not an element of {self}")
        return a

    def reduce(self, vec: Iterable[int]) -> Elem:
        vec = tuple(vec)
        if len(vec) != self.rank:
            raise ValueError(f"vector {vec} has wrong length for {self}")
        return tuple(int(x) % n for x, n in zip(vec, self.orders))

    def add(self, a: Elem, b: Elem) -> Elem:
        return tuple((x + y) % n for x, y, n in zip(a, b, self.orders))

    def sub(self, a: Elem, b: Elem) -> Elem:
        return tuple((x - y) % n for x, y, n in zip(a, b, self.orders))

    def neg(self, a: Elem) -> Elem:
        return tuple((-x) % n for x, n in zip(a, self.orders))

    def mul(self, k: int, a: Elem) -> Elem:
        return tuple((k * x) % n for x, n in zip(a, self.orders))

    def order_of(self, a: Elem) -> int:
        o = 1
        for x, n in zip(a, self.orders):
            o = o * (n // gcd(x, n)) // gcd(o, n // gcd(x, n))
        return o

    @cached_property
    def element_orders(self) -> tuple[int, ...]:
        return tuple(self.order_of(a) for a in self._elements)

    @cached_property
    def primary_type(self) -> tuple[int, ...]:
        """Sorted prime-power invariants; equal iff the groups are isomorphic."""
        parts = []
        for n in self.orders:
            parts.extend(p**e for p, e in factorint(n).items())
        return tuple(sorted(parts))

    def is_isomorphic_to(self, other: FinAbGroup) -> bool:
        return self.primary_type == other.primary_type

    def __str__(self) -> str:
        if not self.orders:
            return "1"
        return " x ".join(f"Z{n}" for n in self.orders)


def invariant_factors(G: FinAbGroup) -> tuple[int, ...]:
    """Invariant factors ``d_1 | d_2 | ...`` (display only; never used as a carrier)."""
    by_prime: dict[int, list[int]] = {}
    for q in G.primary_type:
        if q == 1:
            continue
        p = min(factorint(q))
        by_prime.setdefault(p, []).append(q)
    for v in by_prime.values():
        v.sort(reverse=True)
    length = max((len(v) for v in by_prime.values()), default=0)
    factors = []
    for i in range(length):
        factors.append(prod(v[i] for v in by_prime.values() if i < len(v)))
    return tuple(reversed(factors))


def normal_form(G: FinAbGroup) -> FinAbGroup:
    return FinAbGroup(invariant_factors(G))


def _partitions(n: int, largest: int | None = None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


@lru_cache(maxsize=None)
def abelian_groups(n: int) -> tuple[FinAbGroup, ...]:
    """One representative of every abelian group of order ``n``, in primary form."""
    if n == 1:
        return (FinAbGroup(()),)
    per_prime = []
    for p, e in sorted(factorint(n).items()):
        per_prime.append([tuple(p**k for k in part) for part in _partitions(e)])
    return tuple(FinAbGroup(sum(choice, ())) for choice in itertools.product(*per_prime))


def cyclic(n: int) -> FinAbGroup:
    return FinAbGroup((n,))


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism given by an integer matrix.

    ``matrix[r][c]`` is the coefficient of source generator ``c`` in target
    coordinate ``r``, so column ``c`` is the image of the ``c``-th standard
    generator.  Entries are reduced modulo the target orders; equality of
    homomorphisms is equality of the reduced matrices.
    """

    source: FinAbGroup
    target: FinAbGroup
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.matrix)
        if len(rows) != self.target.rank or any(len(r) != self.source.rank for r in rows):
            raise ValueError(
                f"matrix shape does not match {self.source} -> {self.target}: {rows}"
            )
        rows = tuple(tuple(x % m for x in row) for row, m in zip(rows, self.target.orders))
        for c, n in enumerate(self.source.orders):
            for r, m in enumerate(self.target.orders):
                if (n * rows[r][c]) % m:
                    raise ValueError(
                        f"not well defined: generator {c} has order {n} but its image "
                        f"coordinate {rows[r][c]} in Z{m} does not vanish"
                    )
        object.__setattr__(self, "matrix", rows)

    @classmethod
    def _trusted(cls, source: FinAbGroup, target: FinAbGroup, matrix) -> GroupHom:
        # matrix already reduced and well defined (e.g. a composite of valid maps)
        h = object.__new__(cls)
        object.__setattr__(h, "source", source)
        object.__setattr__(h, "target", target)
        object.__setattr__(h, "matrix", matrix)
        return h

    @classmethod
    def from_images(cls, source: FinAbGroup, target: FinAbGroup, images: Sequence[Elem]) -> GroupHom:
        if len(images) != source.rank:
            raise ValueError("need one image per source generator")
        matrix = tuple(tuple(img[r] for img in images) for r in range(target.rank))
        return cls(source, target, matrix)

    @classmethod
    def identity(cls, G: FinAbGroup) -> GroupHom:
        return cls.scalar(G, 1)

    @classmethod
    def scalar(cls, G: FinAbGroup, k: int) -> GroupHom:
        return cls(G, G, tuple(tuple(k if r == c else 0 for c in range(G.rank)) for r in range(G.rank)))

    @classmethod
    def zero(cls, G: FinAbGroup, H: FinAbGroup) -> GroupHom:
        return cls(G, H, tuple((0,) * G.rank for _ in range(H.rank)))

    @classmethod
    def from_table(cls, source: FinAbGroup, target: FinAbGroup, fn: Callable[[Elem], Elem]) -> GroupHom:
        """Build from a function known to be additive (checked on every element)."""
        gens = [tuple(int(i == c) for i in range(source.rank)) for c in range(source.rank)]
        h = cls.from_images(source, target, [target.reduce(fn(g)) for g in gens])
        for a in source.elements():
            if h(a) != fn(a):
                raise ValueError(f"map is not additive at {a}")
        return h

    def columns(self) -> list[Elem]:
        return [tuple(row[c] for row in self.matrix) for c in range(self.source.rank)]

    def __call__(self, a: Elem) -> Elem:
        if len(a) != self.source.rank:
            raise ValueError(f"{a} is not an element of {self.source}")
        return tuple(
            sum(x * y for x, y in zip(row, a)) % m for row, m in zip(self.matrix, self.target.orders)
        )

    @cached_property
    def table(self) -> np.ndarray:
        """Image index of every source element index."""
        if self.target.rank == 0:
            return np.zeros(self.source.size, dtype=np.int64)
        mat = np.array(self.matrix, dtype=np.int64).reshape(self.target.rank, self.source.rank)
        img = (self.source.coords @ mat.T) % np.array(self.target.orders, dtype=np.int64)
        return self.target.index_array(img)

    def compose(self, inner: GroupHom) -> GroupHom:
        """``self o inner``."""
        if inner.target != self.source:
            raise ValueError(f"cannot compose {self.source}<-{inner.target}")
        images = [self(col) for col in inner.columns()]
        return GroupHom._trusted(inner.source, self.target,
                                 tuple(tuple(img[r] for img in images) for r in range(self.target.rank)))

    __mul__ = compose

    def __add__(self, other: GroupHom) -> GroupHom:
        self._same_shape(other)
        return GroupHom(self.source, self.target,
                        tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(self.matrix, other.matrix)))

    def __sub__(self, other: GroupHom) -> GroupHom:
        self._same_shape(other)
        return GroupHom(self.source, self.target,
                        tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(self.matrix, other.matrix)))

    def __neg__(self) -> GroupHom:
        return GroupHom(self.source, self.target, tuple(tuple(-x for x in r) for r in self.matrix))

    def _same_shape(self, other: GroupHom):
        if (self.source, self.target) != (other.source, other.target):
            raise ValueError("homomorphisms have different source/target")

    def __pow__(self, k: int) -> GroupHom:
        if self.source != self.target:
            raise ValueError("power of a non-endomorphism")
        if k < 0:
            return self.inverse() ** (-k)
        out = GroupHom.identity(self.source)
        for _ in range(k):
            out = self.compose(out)
        return out

    @property
    def is_zero(self) -> bool:
        return all(x == 0 for row in self.matrix for x in row)

    @property
    def is_endomorphism(self) -> bool:
        return self.source == self.target

    def is_injective(self) -> bool:
        return len(set(self.table.tolist())) == self.source.size

    def is_bijective(self) -> bool:
        return self.source.size == self.target.size and self.is_injective()

    def inverse(self) -> GroupHom:
        if not self.is_bijective():
            raise ValueError("homomorphism is not bijective")
        inv = np.empty(self.target.size, dtype=np.int64)
        inv[self.table] = np.arange(self.source.size)
        gens = [tuple(int(i == c) for i in range(self.target.rank)) for c in range(self.target.rank)]
        return GroupHom.from_images(self.target, self.source,
                                    [self.source.element(int(inv[self.target.index(g)])) for g in gens])

    def __str__(self) -> str:
        return f"{self.source} -> {self.target} {[list(r) for r in self.matrix]}"


# ---------------------------------------------------------------------------
# subgroups


@dataclass(frozen=True)
class Subgroup:
    parent: FinAbGroup
    members: frozenset
    gens: tuple = field(default=(), compare=False)

    @cached_property
    def elements(self) -> tuple[Elem, ...]:
        return tuple(sorted(self.members))

    def __contains__(self, a) -> bool:
        return tuple(a) in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __le__(self, other: Subgroup) -> bool:
        return self.members <= other.members

    def __lt__(self, other: Subgroup) -> bool:
        return self.members < other.members

    @property
    def is_trivial(self) -> bool:
        return len(self.members) == 1

    @property
    def is_full(self) -> bool:
        return len(self.members) == self.parent.size

    def meet(self, other: Subgroup) -> Subgroup:
        common = self.members & other.members
        return Subgroup(self.parent, frozenset(common), tuple(sorted(common)))

    __and__ = meet

    def join(self, other: Subgroup) -> Subgroup:
        return subgroup_generated(self.parent, tuple(self.gens) + tuple(other.gens))

    __or__ = join

    def as_group(self) -> tuple[FinAbGroup, GroupHom]:
        """An abstract group isomorphic to this subgroup and the embedding into the parent."""
        G = self.parent
        H, basis = decompose(self.elements, G.add, G.zero)
        return H, GroupHom.from_images(H, G, basis)

    def __str__(self) -> str:
        return "{" + ", ".join(str(e if len(e) != 1 else e[0]) for e in self.elements) + "}"


def _span(G: FinAbGroup, gens: Iterable[Elem], start: Iterable[Elem] = ()) -> set:
    gens = [g for g in dict.fromkeys(gens) if any(g)]
    seen = set(start) or {G.zero}
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = G.add(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def subgroup_generated(G: FinAbGroup, gens: Iterable[Elem]) -> Subgroup:
    gens = tuple(G.check(g) for g in gens)
    return Subgroup(G, frozenset(_span(G, gens)), gens)


def hom_apply(h: GroupHom, a) -> Elem:
    return h(h.source.check(a))


def kernel(h: GroupHom) -> Subgroup:
    members = [a for a, img in zip(h.source.elements(), h.table.tolist()) if img == 0]
    return Subgroup(h.source, frozenset(members), tuple(members))


def image(h: GroupHom) -> Subgroup:
    cols = h.columns()
    return subgroup_generated(h.target, cols)


def is_automorphism(h: GroupHom) -> bool:
    if h.source != h.target:
        raise ValueError("is_automorphism needs an endomorphism")
    return kernel(h).is_trivial


def cosets(G: FinAbGroup, S: Subgroup) -> list[tuple[Elem, ...]]:
    """Cosets of ``S``, each sorted, ordered by their least element."""
    out = []
    seen: set = set()
    for a in G.elements():
        if a in seen:
            continue
        coset = tuple(sorted(G.add(a, s) for s in S.members))
        seen.update(coset)
        out.append(coset)
    return out


def transversal(G: FinAbGroup, S: Subgroup) -> list[Elem]:
    return [c[0] for c in cosets(G, S)]


# ---------------------------------------------------------------------------
# enumeration of homomorphisms


def homs(G: FinAbGroup, H: FinAbGroup) -> list[GroupHom]:
    """Every homomorphism ``G -> H`` (generator images killed by the generator order)."""
    choices = [[h for h in H.elements() if all((n * x) % m == 0 for x, m in zip(h, H.orders))]
               for n in G.orders]
    return [GroupHom.from_images(G, H, imgs) for imgs in itertools.product(*choices)]


@lru_cache(maxsize=None)
def _isomorphisms(G: FinAbGroup, H: FinAbGroup) -> tuple[GroupHom, ...]:
    if G.primary_type != H.primary_type:
        return ()
    by_order: dict[int, list[Elem]] = {}
    for h, o in zip(H.elements(), H.element_orders):
        by_order.setdefault(o, []).append(h)
    gen_orders = [G.order_of(tuple(int(i == c) for i in range(G.rank))) for c in range(G.rank)]
    out = []

    def extend(images: list, span: set, expected: int):
        c = len(images)
        if c == G.rank:
            out.append(GroupHom.from_images(G, H, images))
            return
        n = gen_orders[c]
        for h in by_order.get(n, ()):
            # span of images so far must grow by exactly the generator order
            new_span = _span(H, [h], span) if span else _span(H, [h])
            if len(new_span) == expected * n:
                extend(images + [h], new_span, expected * n)

    extend([], set(), 1)
    # independence via span sizes is necessary; bijectivity is the definitive test
    return tuple(h for h in out if h.is_bijective())


def isomorphisms(G: FinAbGroup, H: FinAbGroup, cap: int = 256) -> tuple[GroupHom, ...]:
    if max(G.size, H.size) > cap:
        raise CapExceeded(f"isomorphism enumeration capped at groups of order {cap}")
    return _isomorphisms(G, H)


def automorphisms(G: FinAbGroup, cap: int = 256) -> tuple[GroupHom, ...]:
    return isomorphisms(G, G, cap)


def endomorphisms(G: FinAbGroup) -> list[GroupHom]:
    return homs(G, G)


def is_nilpotent(h: GroupHom) -> bool:
    if h.source != h.target:
        raise ValueError("nilpotency needs an endomorphism")
    p = h
    for _ in range(h.source.size):
        if p.is_zero:
            return True
        p = h.compose(p)
    return p.is_zero


def decompose(elements: Sequence[Hashable], add: Callable, zero) -> tuple[FinAbGroup, list]:
    """Find ``Z_{n_1} x ... x Z_{n_k}`` (primary form) isomorphic to a finite abelian group.

    ``elements`` is the carrier, ``add`` its addition.  Returns the group and the
    list of carrier elements chosen as images of the standard generators.
    """
    elements = list(elements)
    m = len(elements)

    def span(gens, start=None):
        seen = set(start) if start else {zero}
        frontier = list(seen)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = add(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    def order(a):
        k, x = 1, a
        while x != zero:
            x = add(x, a)
            k += 1
        return k

    orders = {a: order(a) for a in elements}
    profile = sorted(orders.values())
    for T in abelian_groups(m):
        if sorted(T.element_orders) != profile:
            continue
        result = []

        def extend(basis, current):
            c = len(basis)
            if c == T.rank:
                result.append(list(basis))
                return True
            n = T.orders[c]
            for a in elements:
                if orders[a] != n:
                    continue
                s = span([a], current)
                if len(s) == len(current) * n:
                    if extend(basis + [a], s):
                        return True
            return False

        if extend([], {zero}):
            return T, result[0]
    raise ValueError("carrier is not a finite abelian group under the given addition")


# ---------------------------------------------------------------------------
# Z[t, t^-1]-modules


@dataclass(frozen=True)
class LaurentModule:
    """Abelian group with an automorphism ``t``; ``phi = 1 - t``."""

    group: FinAbGroup
    t: GroupHom

    def __post_init__(self):
        if self.t.source != self.group or self.t.target != self.group:
            raise ValueError("t must be an endomorphism of the module's group")
        if not self.t.is_bijective():
            raise ValueError(f"t is not an automorphism: {self.t}")

    @classmethod
    def scalar(cls, G: FinAbGroup, k: int) -> LaurentModule:
        return cls(G, GroupHom.scalar(G, k))

    @cached_property
    def phi(self) -> GroupHom:
        return GroupHom.identity(self.group) - self.t

    @cached_property
    def t_inv(self) -> GroupHom:
        return self.t.inverse()

    def __str__(self) -> str:
        return f"({self.group}, t={[list(r) for r in self.t.matrix]})"


def submodule_generated(M: LaurentModule, gens: Iterable[Elem]) -> Subgroup:
    G = M.group
    gens = [G.check(g) for g in gens]
    orbit = set(gens)
    frontier = list(gens)
    while frontier:
        nxt = []
        for x in frontier:
            y = M.t(x)
            if y not in orbit:
                orbit.add(y)
                nxt.append(y)
        frontier = nxt
    return Subgroup(G, frozenset(_span(G, sorted(orbit))), tuple(sorted(orbit)))


def is_submodule(M: LaurentModule, S: Subgroup) -> bool:
    G = M.group
    if G.zero not in S.members:
        return False
    for a in S.members:
        if G.neg(a) not in S.members or M.t(a) not in S.members:
            return False
        for b in S.gens or S.members:
            if G.add(a, b) not in S.members:
                return False
    return True


def _cyclic_submodules(M: LaurentModule) -> list[Subgroup]:
    seen: dict[frozenset, Subgroup] = {}
    for a in M.group.elements():
        S = submodule_generated(M, [a])
        seen.setdefault(S.members, S)
    return list(seen.values())


def submodules(M: LaurentModule, cap: int = DEFAULT_SUBGROUP_CAP) -> list[Subgroup]:
    """All t-closed subgroups, sorted by size then elements."""
    if M.group.size > cap:
        raise CapExceeded(f"module of order {M.group.size} exceeds subgroup cap {cap}")
    cyclic_subs = _cyclic_submodules(M)
    found: dict[frozenset, Subgroup] = {S.members: S for S in cyclic_subs}
    frontier = list(found.values())
    while frontier:
        nxt = []
        for A in frontier:
            for B in cyclic_subs:
                if B.members <= A.members:
                    continue
                J = subgroup_generated(M.group, tuple(A.gens) + tuple(B.gens))
                if J.members not in found:
                    found[J.members] = J
                    nxt.append(J)
        frontier = nxt
        if len(found) > cap:
            raise CapExceeded(f"more than {cap} submodules")
    return sorted(found.values(), key=lambda S: (len(S), S.elements))


def subgroups(G: FinAbGroup, cap: int = DEFAULT_SUBGROUP_CAP) -> list[Subgroup]:
    return submodules(LaurentModule(G, GroupHom.identity(G)), cap)


def minimal_submodules(M: LaurentModule, cap: int = DEFAULT_SUBGROUP_CAP) -> list[Subgroup]:
    if M.group.size > cap:
        raise CapExceeded(f"module of order {M.group.size} exceeds subgroup cap {cap}")
    nonzero = [S for S in _cyclic_submodules(M) if not S.is_trivial]
    return sorted((S for S in nonzero if not any(T < S for T in nonzero)),
                  key=lambda S: (len(S), S.elements))


def is_si_module(M: LaurentModule, cap: int = DEFAULT_SUBGROUP_CAP) -> bool:
    return len(minimal_submodules(M, cap)) == 1


def socle(M: LaurentModule, cap: int = DEFAULT_SUBGROUP_CAP) -> Subgroup:
    mins = minimal_submodules(M, cap)
    gens: tuple = ()
    for S in mins:
        gens += tuple(S.gens)
    return subgroup_generated(M.group, gens)
