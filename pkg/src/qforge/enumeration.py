"""Exhaustive enumeration of small medial quandles and of SI medial quandles by order."""
from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .abelian import (FinAbGroup, GroupHom, LaurentModule, abelian_groups, automorphisms, homs, image,
                      is_nilpotent, is_si_module, transversal, subgroup_generated)
from .congruence import monolith
from .construct import SiqSpec, alexander, projection_quandle, siq
from .iso import fingerprint, quandle_isomorphic, refined_profile
from .mesh import AffineMesh, is_indecomposable, sum_mesh
from .quandle import (Quandle, is_connected, is_latin, is_medial, is_quasi_reductive, orbits,
                      reductivity_degree)


# ---------------------------------------------------------------------------
# deduplication


def _cheap_key(Q: Quandle):
    fp = fingerprint(Q, congruence_cap=None)
    return (fp.size, fp.orbit_sizes, fp.reductivity, fp.involutory, fp.cycle_types, refined_profile(Q))


class IsoBuckets:
    """Collects quandles up to isomorphism."""

    def __init__(self):
        self.buckets: dict = {}
        self.items: list = []

    def add(self, Q: Quandle, payload=None) -> bool:
        key = _cheap_key(Q)
        bucket = self.buckets.setdefault(key, [])
        for R, _ in bucket:
            if quandle_isomorphic(Q, R) is not None:
                return False
        bucket.append((Q, payload))
        self.items.append((Q, payload))
        return True

    def __len__(self) -> int:
        return len(self.items)


# ---------------------------------------------------------------------------
# mesh-based enumeration of medial quandles


def orbit_types(n: int) -> Iterator[tuple[FinAbGroup, ...]]:
    """Multisets of groups with total order ``n`` (summand sizes non-increasing)."""
    def parts(m, largest):
        if m == 0:
            yield ()
            return
        for k in range(min(m, largest), 0, -1):
            for rest in parts(m - k, k):
                yield (k,) + rest

    for part in parts(n, n):
        sizes = sorted(set(part), reverse=True)
        choices = []
        for sz in sizes:
            mult = part.count(sz)
            opts = list(range(len(abelian_groups(sz))))
            choices.append([tuple(abelian_groups(sz)[i] for i in combo)
                            for combo in itertools.combinations_with_replacement(opts, mult)])
        for pick in itertools.product(*choices):
            yield tuple(g for block in pick for g in block)


def _phi_assignments(groups, diag_filter: Callable[[GroupHom], bool], require: Callable[[dict], bool] | None):
    k = len(groups)
    cand = {}
    for i, j in itertools.product(range(k), repeat=2):
        hs = homs(groups[i], groups[j])
        if i == j:
            hs = [h for h in hs if (GroupHom.identity(groups[i]) - h).is_bijective() and diag_filter(h)]
        cand[(i, j)] = hs
    # diagonal first so the nilpotency choice prunes early
    slots = [(i, i) for i in range(k)] + [(i, j) for i in range(k) for j in range(k) if i != j]
    phi: dict = {}

    def ok(slot) -> bool:
        a, b = slot
        # every (M3) instance phi_{j,kk} phi_{i,j} = phi_{j',kk} phi_{i,j'} involving the new slot
        for i, kk in itertools.product(range(k), repeat=2):
            if not (a == i or b == kk):
                continue
            ref = None
            for j in range(k):
                if (i, j) in phi and (j, kk) in phi:
                    comp = phi[(j, kk)].compose(phi[(i, j)])
                    if ref is None:
                        ref = comp
                    elif comp != ref:
                        return False
        return True

    def rec(s):
        if s == len(slots):
            yield [[phi[(i, j)] for j in range(k)] for i in range(k)]
            return
        if s == k and require is not None and not require(phi):
            return
        for h in cand[slots[s]]:
            phi[slots[s]] = h
            if ok(slots[s]):
                yield from rec(s + 1)
            del phi[slots[s]]

    yield from rec(0)


def _constant_assignments(groups, PHI) -> Iterator[list[list]]:
    k = len(groups)
    slots = [(i, j) for j in range(k) for i in range(k) if i != j]
    c = {(i, i): groups[i].zero for i in range(k)}
    elems = [groups[j].elements() for j in range(k)]

    def ok(a, b):
        for i, j, kk in itertools.product(range(k), repeat=3):
            if (a, b) not in ((i, j), (i, kk), (j, kk)):
                continue
            if (i, j) in c and (i, kk) in c and (j, kk) in c:
                if PHI[j][kk](c[(i, j)]) != PHI[kk][kk](groups[kk].sub(c[(i, kk)], c[(j, kk)])):
                    return False
        return True

    def rec(s):
        if s == len(slots):
            yield [[c[(i, j)] for j in range(k)] for i in range(k)]
            return
        a, b = slots[s]
        for x in elems[b]:
            c[(a, b)] = x
            if ok(a, b):
                yield from rec(s + 1)
            del c[(a, b)]

    yield from rec(0)


def _shift_canonical(groups, PHI, C) -> bool:
    """True iff ``C`` is the least constant matrix among its shifts
    ``c_ij - phi_ij(d_i) + phi_jj(d_j)`` (homologies with sigma = id, psi = id)."""
    k = len(groups)
    key = tuple(groups[j].index(C[i][j]) for i in range(k) for j in range(k))
    for d in itertools.product(*(G.elements() for G in groups)):
        shifted = []
        for i in range(k):
            for j in range(k):
                G = groups[j]
                shifted.append(G.index(G.add(G.sub(C[i][j], PHI[i][j](d[i])), PHI[j][j](d[j]))))
        if tuple(shifted) < key:
            return False
    return True


@dataclass
class MedialEnumeration:
    order: int
    quandles: list[Quandle]
    meshes: list[AffineMesh]
    meshes_tried: int = 0


def enumerate_medial(n: int, reductive_only: bool = False, require_nonzero_diag: bool = False,
                     accept: Callable[[Quandle], bool] | None = None) -> MedialEnumeration:
    """Medial quandles of order ``n`` up to isomorphism, as sums of indecomposable meshes.

    ``reductive_only`` restricts every ``phi_ii`` to be nilpotent;
    ``require_nonzero_diag`` keeps only meshes with some ``phi_ii != 0``.
    ``accept`` filters the sums before deduplication.
    """
    found = IsoBuckets()
    tried = 0
    diag_filter = is_nilpotent if reductive_only else (lambda h: True)
    require = None
    if require_nonzero_diag:
        require = lambda phi: any(not phi[(i, i)].is_zero for i in range(len(phi)) if (i, i) in phi)
    for groups in orbit_types(n):
        if require_nonzero_diag and not any(
                any(not h.is_zero and diag_filter(h) and (GroupHom.identity(G) - h).is_bijective()
                    for h in homs(G, G)) for G in groups):
            continue
        for PHI in _phi_assignments(groups, diag_filter, require):
            for C in _constant_assignments(groups, PHI):
                if not _shift_canonical(groups, PHI, C):
                    continue
                m = AffineMesh(tuple(groups), tuple(tuple(r) for r in PHI), tuple(tuple(r) for r in C))
                if not is_indecomposable(m):
                    continue
                tried += 1
                Q = sum_mesh(m).quandle
                if accept is not None and not accept(Q):
                    continue
                found.add(Q, m)
    return MedialEnumeration(n, [q for q, _ in found.items], [m for _, m in found.items], tried)


def reductive_not_2_reductive(n: int) -> MedialEnumeration:
    """Reductive medial quandles of order ``n`` that are not 2-reductive.

    By the reductivity criterion for meshes this means all ``phi_ii`` nilpotent
    and some ``phi_ii`` nonzero; the result is also re-checked on the tables.
    """
    def accept(Q):
        r = reductivity_degree(Q)
        return r is not None and r > 2

    return enumerate_medial(n, reductive_only=True, require_nonzero_diag=True, accept=accept)


# ---------------------------------------------------------------------------
# 2-reductive SI quandles


def two_reductive_si_bruteforce(n: int) -> list[Quandle]:
    """Strictly 2-reductive SI medial quandles of order ``n`` from all meshes with ``phi = 0``."""
    found = IsoBuckets()
    for groups in orbit_types(n):
        k = len(groups)
        PHI = [[GroupHom.zero(groups[i], groups[j]) for j in range(k)] for i in range(k)]
        slots = [(i, j) for i in range(k) for j in range(k) if i != j]
        for vals in itertools.product(*(groups[j].elements() for _, j in slots)):
            C = [[groups[j].zero for j in range(k)] for _ in range(k)]
            for (i, j), v in zip(slots, vals):
                C[i][j] = v
            m = AffineMesh(tuple(groups), tuple(map(tuple, PHI)), tuple(map(tuple, C)))
            if not is_indecomposable(m):
                continue
            Q = sum_mesh(m).quandle
            if reductivity_degree(Q) == 2 and monolith(Q) is not None:
                found.add(Q, m)
    return [q for q, _ in found.items]


def two_reductive_si_pruned(n: int) -> list[Quandle]:
    """Same as :func:`two_reductive_si_bruteforce`, restricted to one nontrivial orbit plus singletons.

    With all ``phi = 0`` every family of subgroups gives a congruence, so an SI
    sum has at most one summand of size > 1; singletons are interchangeable,
    so only the multiset of their constants matters.
    """
    found = IsoBuckets()
    for m_size in range(2, n):
        r = n - m_size
        for A in abelian_groups(m_size):
            for consts in itertools.combinations_with_replacement(A.elements(), r):
                if len(subgroup_generated(A, consts)) != A.size:
                    continue
                groups = [A] + [FinAbGroup(())] * r
                k = r + 1
                PHI = [[GroupHom.zero(groups[i], groups[j]) for j in range(k)] for i in range(k)]
                C = [[groups[j].zero for j in range(k)] for _ in range(k)]
                for i, c in enumerate(consts, start=1):
                    C[i][0] = c
                m = AffineMesh(tuple(groups), tuple(map(tuple, PHI)), tuple(map(tuple, C)))
                Q = sum_mesh(m).quandle
                if reductivity_degree(Q) == 2 and monolith(Q) is not None:
                    found.add(Q, m)
    return [q for q, _ in found.items]


def rr89_family(n: int) -> list[tuple[Quandle, SiqSpec]]:
    """``siq(Z_{p^k}, 1, C)`` with ``C`` containing a generator and ``p^k + |C| = n``, up to isomorphism."""
    from .abelian import factorint
    found = IsoBuckets()
    for q in range(2, n):
        fac = factorint(q)
        if len(fac) != 1:
            continue
        (p, _), = fac.items()
        size = n - q
        for C in itertools.combinations(range(q), size):
            if not any(c % p for c in C):
                continue
            spec = SiqSpec.make((q,), 1, C)
            found.add(siq(spec).quandle, spec)
    return found.items


# ---------------------------------------------------------------------------
# SI quandles by order


def _conjugacy_classes(G: FinAbGroup, cap: int = 256) -> list[GroupHom]:
    auts = automorphisms(G, cap)
    arr = np.array([a.table for a in auts], dtype=np.int64)
    inv = np.argsort(arr, axis=1)
    index = {row.tobytes(): i for i, row in enumerate(arr)}
    seen = np.zeros(len(auts), dtype=bool)
    reps = []
    for i, t in enumerate(arr):
        if seen[i]:
            continue
        reps.append(auts[i])
        conj = np.take_along_axis(arr, t[inv], axis=1)   # g t g^-1
        for row in conj:
            seen[index[row.tobytes()]] = True
    return reps


def si_modules(max_order: int, cap: int = 256) -> Iterator[LaurentModule]:
    """SI modules ``(A, t)`` with ``1 < |A| <= max_order``, ``t`` up to conjugacy in Aut(A)."""
    for m in range(2, max_order + 1):
        for A in abelian_groups(m):
            for t in _conjugacy_classes(A, cap):
                M = LaurentModule(A, t)
                if is_si_module(M):
                    yield M


@dataclass
class EnumerationReport:
    order: int
    representatives: list[dict] = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    candidates: int = 0
    complete: bool = True
    seed: int | None = None

    def quandles(self) -> list[Quandle]:
        return [r["quandle"] for r in self.representatives]


def classify(Q: Quandle) -> tuple[str, dict]:
    """One of ``latin``, ``reductive``, ``two-element-projection`` or ``NOT-SI``, with evidence."""
    if not is_medial(Q):
        raise ValueError("classify needs a medial quandle")
    mono = monolith(Q)
    evidence = {
        "monolith": None if mono is None else mono.to_json(),
        "orbits": len(orbits(Q)),
        "reductivity": reductivity_degree(Q),
        "quasi_reductive": is_quasi_reductive(Q),
    }
    if mono is None:
        return "NOT-SI", evidence
    if Q.size == 2:
        return "two-element-projection", evidence
    if is_latin(Q):
        return "latin", evidence
    if evidence["reductivity"] is not None:
        return "reductive", evidence
    # would be a finite quasi-reductive non-reductive SI quandle, which cannot exist
    return "quasi-reductive-non-reductive", evidence


def _si_candidates(n: int, cap: int) -> Iterator[dict]:
    if n == 2:
        yield {"kind": "projection", "n": 2}
    for A in abelian_groups(n):
        for f in _conjugacy_classes(A, cap):
            yield {"kind": "alexander", "group": list(A.orders), "t": [list(r) for r in f.matrix]}
    for M in si_modules(n - 1, cap):
        phi = M.phi
        if phi.is_injective():
            continue
        img = image(phi)
        rest = n - M.group.size
        if rest % len(img):
            continue
        size = rest // len(img)
        trans = transversal(M.group, img)
        if size < 1 or size > len(trans):
            continue
        for C in itertools.combinations(trans, size):
            if len(subgroup_generated(M.group, list(C) + list(img.elements))) != M.group.size:
                continue
            yield {"kind": "siq", "spec": SiqSpec(M, C)}


def _evaluate(prov: dict):
    """Build a candidate and test it; returns ``(table, si)`` or None for skipped candidates."""
    if prov["kind"] == "projection":
        Q = projection_quandle(prov["n"])
    elif prov["kind"] == "alexander":
        A = FinAbGroup(tuple(prov["group"]))
        Q = alexander(A, GroupHom(A, A, tuple(map(tuple, prov["t"]))))
        if not is_connected(Q):
            return None
    else:
        Q = siq(prov["spec"]).quandle
    si = monolith(Q) is not None
    if prov["kind"] == "siq" and not si:
        raise AssertionError(f"{prov['spec']} is not SI")
    return Q.mult, si


def enumerate_si(n: int, cap: int = 256, jobs: int = 1, budget: float | None = None) -> EnumerationReport:
    """All SI medial quandles of order ``n`` up to isomorphism.

    Connected ones are Alexander quandles ``(A, f)``, tested directly; the
    non-connected ones with more than two elements are ``siq(A, t, C)`` for an
    SI module, with ``C`` inside the least-element transversal of ``phi(A)``.
    With ``jobs > 1`` candidates are built and tested in worker processes and
    deduplicated here, in candidate order, so the result does not depend on
    ``jobs``.  If ``budget`` seconds run out the report is marked incomplete.
    """
    start = time.monotonic()
    found = IsoBuckets()
    candidates = 0
    complete = True
    pool = ProcessPoolExecutor(jobs) if jobs > 1 else None
    try:
        provs = list(_si_candidates(n, cap))
        results = pool.map(_evaluate, provs, chunksize=8) if pool else map(_evaluate, provs)
        for prov, res in zip(provs, results):
            if budget is not None and time.monotonic() - start > budget:
                complete = False
                break
            if res is None:
                continue
            candidates += 1
            table, si = res
            if si:
                found.add(Quandle(table), prov)
    finally:
        if pool:
            pool.shutdown(cancel_futures=True)
    rep = EnumerationReport(n, candidates=candidates, complete=complete)
    counts: dict = {}
    for Q, prov in found.items:
        label, ev = classify(Q)
        counts[label] = counts.get(label, 0) + 1
        rep.representatives.append({"quandle": Q, "provenance": prov, "class": label, "evidence": ev,
                                    "fingerprint": fingerprint(Q, congruence_cap=None)})
    rep.counts = dict(sorted(counts.items()))
    return rep


def involutory_family(n: int) -> list[tuple[Quandle, str]]:
    """The expected involutory SI list of order ``n``."""
    from .abelian import factorint, cyclic
    out = []
    if n == 2:
        out.append((alexander(cyclic(2), 1), "(Z2,1)"))
    fac = factorint(n)
    if len(fac) == 1 and 2 not in fac:
        out.append((alexander(cyclic(n), -1), f"(Z{n},-1)"))
    for k in range(1, 6):
        q = 2**k
        half = max(q // 2, 1)
        if q + half == n:
            out.append((siq(SiqSpec.make((q,), -1, [1])).quandle, f"siq(Z{q},-1,{{1}})"))
        if q + 2 * half == n:
            out.append((siq(SiqSpec.make((q,), -1, [0, 1])).quandle, f"siq(Z{q},-1,{{0,1}})"))
    return out
