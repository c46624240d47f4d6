"""Builders: projection and Alexander quandles, siq(A, t, C), and the gallery."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .abelian import (Elem, FinAbGroup, GroupHom, LaurentModule, cyclic, image, is_si_module,
                      subgroup_generated)
from .mesh import AffineMesh, LabeledSum, sum_mesh, validate_mesh
from .quandle import Quandle


class SpecViolation(ValueError):
    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        super().__init__(f"{invariant}: {detail}" if detail else invariant)


def projection_quandle(n: int) -> Quandle:
    if n < 1:
        raise ValueError("projection quandle needs n >= 1")
    return Quandle(np.tile(np.arange(n), (n, 1)))


def alexander(A: FinAbGroup, f: GroupHom | int) -> Quandle:
    """``x*y = (1-f)(x) + f(y)``."""
    if isinstance(f, (int, np.integer)):
        f = GroupHom.scalar(A, int(f))
    if f.source != A or f.target != A:
        raise ValueError("f must be an endomorphism of A")
    if not f.is_bijective():
        raise ValueError(f"f is not an automorphism of {A}")
    one_minus = GroupHom.identity(A) - f
    co = A.coords
    orders = np.array(A.orders, dtype=np.int64)
    left = co[one_minus.table]     # (1-f)(x) coordinates
    right = co[f.table]
    s = (left[:, None, :] + right[None, :, :]) % orders if A.rank else np.zeros((1, 1, 0), np.int64)
    return Quandle(A.index_array(s))


@dataclass(frozen=True)
class SiqSpec:
    module: LaurentModule
    C: tuple[Elem, ...]
    allow_non_si_module: bool = field(default=False, compare=False)

    def __post_init__(self):
        G = self.module.group
        C = tuple(G.check(c) for c in self.C)
        object.__setattr__(self, "C", C)
        phi = self.module.phi
        img = image(phi)
        reps = set()
        for c in C:
            coset = frozenset(G.add(c, s) for s in img.members)
            if coset in reps:
                raise SpecViolation("distinct cosets", f"{c} shares its coset of phi(A) with another element of C")
            reps.add(coset)
        if len(subgroup_generated(G, list(C) + list(img.elements))) != G.size:
            raise SpecViolation("generation", "C together with phi(A) does not generate A")
        if C and phi.is_injective():
            raise SpecViolation("non-injective phi", "phi = 1 - t is injective but C is non-empty")
        if not self.allow_non_si_module and not is_si_module(self.module):
            raise SpecViolation("SI module", f"{self.module} is not subdirectly irreducible")

    @classmethod
    def make(cls, group, t, C: Sequence, allow_non_si_module: bool = False) -> SiqSpec:
        G = group if isinstance(group, FinAbGroup) else FinAbGroup(tuple(group))
        if isinstance(t, (int, np.integer)):
            th = GroupHom.scalar(G, int(t))
        elif isinstance(t, GroupHom):
            th = t
        else:
            th = GroupHom(G, G, tuple(tuple(r) for r in t))
        elems = tuple((c,) if isinstance(c, (int, np.integer)) else tuple(c) for c in C)
        return cls(LaurentModule(G, th), tuple(G.reduce(c) for c in elems), allow_non_si_module)

    @property
    def phi(self) -> GroupHom:
        return self.module.phi

    @property
    def order(self) -> int:
        return self.module.group.size + len(image(self.phi)) * len(self.C)

    def __str__(self) -> str:
        G = self.module.group
        t = self.module.t
        ts = str(t.matrix[0][0]) if G.rank == 1 else str([list(r) for r in t.matrix])
        cs = ", ".join(str(c[0]) if G.rank == 1 else str(c) for c in self.C)
        return f"siq({G}, {ts}, {{{cs}}})"


def remark_7_10_mesh(spec: SiqSpec) -> AffineMesh:
    """Mesh over ``{A} ∪ {phi(A) x {i}}`` with ``c_{i,1}=i, c_{1,i}=-phi(i), c_{i,j}=phi(i-j)``.

    Summand 0 is ``A``; summand ``r+1`` is an abstract copy ``B`` of ``phi(A)``
    for the ``r``-th element of ``C``; the embedding ``B -> A`` is recorded.
    """
    A = spec.module.group
    phi = spec.phi
    B, emb = image(phi).as_group()
    back = {emb(b): b for b in B.elements()}
    into_B = lambda a: back[a]
    C = spec.C
    k = len(C) + 1
    phi_BB = GroupHom.from_table(B, B, lambda b: into_B(phi(emb(b))))
    phi_AB = GroupHom.from_table(A, B, lambda a: into_B(phi(phi(a))))
    groups = [A] + [B] * len(C)
    P = [[None] * k for _ in range(k)]
    c = [[None] * k for _ in range(k)]
    P[0][0] = phi
    c[0][0] = A.zero
    for r, ci in enumerate(C, start=1):
        P[r][0] = emb
        P[0][r] = phi_AB
        c[r][0] = ci
        c[0][r] = into_B(A.neg(phi(ci)))
        for s, cj in enumerate(C, start=1):
            P[r][s] = phi_BB
            c[r][s] = into_B(phi(A.sub(ci, cj)))
    return validate_mesh(groups, P, c, embeddings=[GroupHom.identity(A)] + [emb] * len(C))


def siq(spec: SiqSpec) -> LabeledSum:
    """The quandle siq(A, t, C), on ``A`` followed by ``phi(A) x {c}`` for ``c`` in ``C``."""
    A = spec.module.group
    C = spec.C
    img = image(spec.phi).elements
    carrier: list = [a for a in A.elements()] + [(a, i) for i in C for a in img]
    pos = {(None, a): x for x, a in enumerate(A.elements())}
    for r, i in enumerate(C):
        for a in img:
            pos[(i, a)] = len(pos)
    n = len(carrier)
    add, sub = A.add, A.sub
    phi = {a: spec.phi(a) for a in A.elements()}.__getitem__      # memoised phi and t
    t = {a: spec.module.t(a) for a in A.elements()}.__getitem__

    def op(x, y):
        if x < A.size and y < A.size:
            a, b = carrier[x], carrier[y]
            return pos[(None, add(phi(a), t(b)))]
        if x >= A.size and y >= A.size:
            (a, i), (b, j) = carrier[x], carrier[y]
            return pos[(j, add(phi(sub(add(a, i), j)), t(b)))]
        if x >= A.size:
            (a, i), b = carrier[x], carrier[y]
            return pos[(None, add(add(a, t(b)), i))]
        a, (b, j) = carrier[x], carrier[y]
        return pos[(j, add(phi(sub(phi(a), j)), t(b)))]

    table = np.array([[op(x, y) for y in range(n)] for x in range(n)], dtype=np.int64)
    Q = Quandle(table)
    mesh = remark_7_10_mesh(spec)
    B, emb = image(spec.phi).as_group()
    back = {emb(b): b for b in B.elements()}
    labels = [(0, a) for a in A.elements()] + [(r, back[a]) for r, i in enumerate(C, start=1) for a in img]

    def fmt(e):
        return str(e[0]) if A.rank == 1 else str(e)

    names = [fmt(a) for a in A.elements()] + [f"({fmt(a)},{fmt(i)})" for i in C for a in img]
    return LabeledSum(Q, mesh, tuple(labels), tuple(names))


# ---------------------------------------------------------------------------
# gallery


@dataclass(frozen=True)
class GalleryItem:
    name: str
    obj: Any            # Quandle, SiqSpec or AffineMesh
    note: str = ""

    @property
    def kind(self) -> str:
        if isinstance(self.obj, SiqSpec):
            return "siq"
        if isinstance(self.obj, AffineMesh):
            return "mesh"
        return "quandle"

    def quandle(self) -> Quandle:
        if isinstance(self.obj, SiqSpec):
            return siq(self.obj).quandle
        if isinstance(self.obj, AffineMesh):
            return sum_mesh(self.obj).quandle
        return self.obj

    def mesh(self) -> AffineMesh | None:
        if isinstance(self.obj, SiqSpec):
            return remark_7_10_mesh(self.obj)
        if isinstance(self.obj, AffineMesh):
            return self.obj
        return None


V4 = FinAbGroup((2, 2))
T_V4 = ((1, 0), (1, 1))


def z2_pair_mesh() -> AffineMesh:
    Z2 = cyclic(2)
    return validate_mesh([Z2, Z2], [[0, 0], [0, 0]], [[0, 1], [1, 0]])


def z4_siq_mesh() -> AffineMesh:
    """((Z_4, 2Z_4); (2 0; 1 2); (0 -2; 1 0)) with 2Z_4 stored as Z_2."""
    Z4, Z2 = cyclic(4), cyclic(2)
    emb = GroupHom(Z2, Z4, ((2,),))
    return validate_mesh([Z4, Z2], [[2, 0], [emb, 0]], [[0, 1], [1, 0]],
                         embeddings=[GroupHom.identity(Z4), emb])


def gallery() -> list[GalleryItem]:
    Z = cyclic
    S = SiqSpec.make
    items = [
        GalleryItem("alexander(Z4,3)", alexander(Z(4), 3), "non-SI, 2-reductive, two 2-element orbits"),
        GalleryItem("mesh ((Z2,Z2);0;(0 1;1 0))", z2_pair_mesh(), "sums to (Z4,3)"),
        GalleryItem("mesh ((Z4,2Z4);(2 0;1 2);(0 -2;1 0))", z4_siq_mesh(), "standard mesh of siq(Z4,3,{1})"),
        GalleryItem("siq(Z4,3,{1})", S((4,), 3, [1]), "size 6, SI, strictly 3-reductive, involutory"),
        GalleryItem("siq(Z2^2,T,{(1,0)})", S((2, 2), T_V4, [(1, 0)]), "size 6, SI, strictly 3-reductive"),
        GalleryItem("siq(Z4,3,{0,1})", S((4,), 3, [0, 1]), "size 8, SI, strictly 3-reductive, involutory"),
        GalleryItem("siq(Z2^2,T,{0,(1,0)})", S((2, 2), T_V4, [(0, 0), (1, 0)]), "size 8, SI, strictly 3-reductive"),
        GalleryItem("siq(Z49,43,{1,3,4})", S((49,), 43, [1, 3, 4]), "70 elements"),
        GalleryItem("siq(Z49,43,{2,5,6})", S((49,), 43, [2, 5, 6]), "70 elements, not isomorphic to the previous"),
        GalleryItem("siq(Z9,7,{1})", S((9,), 7, [1]), "siq(Z_{p^m},1-p,C) with p=3, m=2"),
        GalleryItem("siq(Z9,7,{0,1,2})", S((9,), 7, [0, 1, 2]), "siq(Z_{p^m},1-p,C) with p=3, m=2"),
        GalleryItem("siq(Z2,1,{1})", S((2,), 1, [1]), "strictly 2-reductive"),
        GalleryItem("siq(Z3,1,{1,2})", S((3,), 1, [1, 2]), "strictly 2-reductive"),
        GalleryItem("siq(Z4,1,{1})", S((4,), 1, [1]), "strictly 2-reductive"),
        GalleryItem("siq(Z4,1,{0,1,2})", S((4,), 1, [0, 1, 2]), "strictly 2-reductive"),
        GalleryItem("alexander(Z2,1)", alexander(Z(2), 1), "two-element projection quandle, SI, involutory"),
        GalleryItem("alexander(Z9,-1)", alexander(Z(9), -1), "latin, SI, involutory"),
        GalleryItem("alexander(Z5,2)", alexander(Z(5), 2), "latin"),
        GalleryItem("alexander(Z9,2)", alexander(Z(9), 2), "latin, SI"),
        GalleryItem("alexander(Z3,2)", alexander(Z(3), 2), "simple"),
        GalleryItem("projection(3)", projection_quandle(3), "non-SI"),
        GalleryItem("alexander(Z6,-1)", alexander(Z(6), -1), "non-SI, non-reductive"),
        GalleryItem("alexander(Z3^3,M)", alexander(FinAbGroup((3, 3, 3)),
                                                  GroupHom.from_images(FinAbGroup((3, 3, 3)), FinAbGroup((3, 3, 3)),
                                                                       [(2, 0, 0), (0, 1, 0), (0, 1, 1)])),
                    "finite quasi-reductive, not reductive"),
    ]
    return items


def gallery_dict() -> dict[str, GalleryItem]:
    return {g.name: g for g in gallery()}
