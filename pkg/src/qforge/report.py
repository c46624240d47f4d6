"""Machine-checked tables for the concrete finite claims, with PASS/FAIL per claim."""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .abelian import FinAbGroup, GroupHom, abelian_groups, cyclic, image, transversal
from .config import RunConfig
from .congruence import all_congruences, minimal_congruences, monolith
from .construct import T_V4, SiqSpec, alexander, projection_quandle, siq, z2_pair_mesh
from .enumeration import (IsoBuckets, _conjugacy_classes, enumerate_si, involutory_family,
                          reductive_not_2_reductive, rr89_family, two_reductive_si_pruned)
from .formats import dump_json, quandle_to_json
from .iso import are_homologous, cyclic_iso_criterion, quandle_isomorphic
from .mesh import canonical_mesh
from .quandle import is_connected, is_involutory, is_latin, is_quasi_reductive, reductivity_degree


@dataclass
class Claim:
    key: str
    text: str
    passed: bool
    detail: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)   # optional table

    def as_json(self) -> dict:
        return {"key": self.key, "claim": self.text, "result": "PASS" if self.passed else "FAIL",
                "detail": self.detail, "rows": self.rows}


def _same_iso_classes(xs, ys) -> bool:
    if len(xs) != len(ys):
        return False
    unmatched = list(ys)
    for x in xs:
        for i, y in enumerate(unmatched):
            if quandle_isomorphic(x, y) is not None:
                del unmatched[i]
                break
        else:
            return False
    return True


def claim_z4_3() -> Claim:
    Q = alexander(cyclic(4), 3)
    mesh, _ = canonical_mesh(Q)
    mins = sorted(sorted(map(tuple, t.to_json())) for t in minimal_congruences(Q))
    expected = [[(0,), (1, 3), (2,)], [(0, 2), (1,), (3,)]]
    hom = are_homologous(mesh, z2_pair_mesh()) is not None
    si = monolith(Q) is not None
    ok = hom and mins == expected and not si
    return Claim("z4_3", "(Z4,3): canonical mesh homologous to ((Z2,Z2);0;(0 1;1 0)), "
                 "minimal congruences {{0,2},{1},{3}} and {{1,3},{0},{2}}, not SI", ok,
                 {"homologous": hom, "minimal": [[list(b) for b in m] for m in mins], "si": si})


def _pair_claim(key, text, specs, order, expected_count, expected_si):
    qs = [siq(s).quandle for s in specs]
    si = [monolith(q) is not None for q in qs]
    red = [reductivity_degree(q) for q in qs]
    noniso = quandle_isomorphic(qs[0], qs[1]) is None
    enum = reductive_not_2_reductive(order)
    n_si = sum(monolith(q) is not None for q in enum.quandles)
    found = _same_iso_classes([q for q in enum.quandles if monolith(q) is not None], qs)
    ok = all(si) and red == [3, 3] and noniso and len(enum.quandles) == expected_count \
        and n_si == expected_si and found
    rows = [{"quandle": str(s), "si": a, "reductivity": r} for s, a, r in zip(specs, si, red)]
    return Claim(key, text, ok, {"non_isomorphic": noniso, "enumerated": len(enum.quandles),
                                 "enumerated_si": n_si, "si_are_the_pair": found}, rows)


def claim_size6() -> Claim:
    specs = [SiqSpec.make((4,), 3, [1]), SiqSpec.make((2, 2), T_V4, [(1, 0)])]
    return _pair_claim("size6", "exactly two reductive, not 2-reductive medial quandles of size 6; "
                       "both SI, strictly 3-reductive, non-isomorphic", specs, 6, 2, 2)


def claim_size8() -> Claim:
    specs = [SiqSpec.make((4,), 3, [0, 1]), SiqSpec.make((2, 2), T_V4, [(0, 0), (1, 0)])]
    return _pair_claim("size8", "nine reductive, not 2-reductive medial quandles of size 8, "
                       "exactly two of them SI", specs, 8, 9, 2)


def _lattice_profile(Q) -> list:
    prof = Counter(tuple(sorted(t.block_sizes())) for t in all_congruences(Q))
    return sorted([list(k), v] for k, v in prof.items())


def claim_z49_pair() -> Claim:
    s1 = SiqSpec.make((49,), 43, [1, 3, 4])
    s2 = SiqSpec.make((49,), 43, [2, 5, 6])
    L1, L2 = siq(s1), siq(s2)
    crit = cyclic_iso_criterion(L1.mesh, L2.mesh)
    iso = quandle_isomorphic(L1.quandle, L2.quandle)
    p1, p2 = _lattice_profile(L1.quandle), _lattice_profile(L2.quandle)
    ok = (not crit) and iso is None and p1 == p2 and L1.quandle.size == L2.quandle.size == 70
    return Claim("z49_pair", "siq(Z49,43,{1,3,4}) and siq(Z49,43,{2,5,6}) are not isomorphic "
                 "but have congruence lattices of the same shape", ok,
                 {"cyclic_criterion": crit, "quandle_isomorphic": iso is not None,
                  "congruences": [sum(v for _, v in p1), sum(v for _, v in p2)],
                  "same_block_size_profile": p1 == p2})


def three_orbit_classes(q: int, t: int) -> list[tuple]:
    """Isomorphism classes of 3-orbit siq(Z_q, t, C), as lists of C."""
    found = IsoBuckets()
    G = cyclic(q)
    reps = transversal(G, image(GroupHom.scalar(G, 1 - t)))
    for C in itertools.combinations(reps, 2):
        try:
            spec = SiqSpec.make(G, t, C)
        except ValueError:
            continue
        found.add(siq(spec).quandle, tuple(c[0] for c in C))
    return [C for _, C in found.items]


def claim_three_orbits() -> Claim:
    rows = []
    for q, t in ((9, 7), (25, 21), (49, 43)):
        classes = three_orbit_classes(q, t)
        rows.append({"module": f"(Z{q},{t})", "classes": len(classes), "C": [list(c) for c in classes]})
    ok = all(r["classes"] == 2 for r in rows)
    return Claim("three_orbits", "for Z_{p^s} with phi^2 = 0 and |A/phi(A)| >= 3 there are exactly two "
                 "SI medial quandles with 3 orbits", ok, {}, rows)


def claim_two_reductive(max_order: int = 12) -> Claim:
    rows, ok = [], True
    for n in range(3, max_order + 1):
        got = two_reductive_si_pruned(n)
        fam = [q for q, _ in rr89_family(n)]
        same = _same_iso_classes(got, fam)
        ok &= same
        rows.append({"order": n, "found": len(got), "family": len(fam), "equal": same})
    return Claim("two_reductive", f"strictly 2-reductive SI medial quandles of order <= {max_order} "
                 "are exactly siq(Z_{p^k},1,C) with a generator in C", ok, {}, rows)


def claim_involutory(max_order: int = 16, cap: int = 256) -> Claim:
    rows, ok = [], True
    for n in range(2, max_order + 1):
        rep = enumerate_si(n, cap=cap)
        inv = [q for q in rep.quandles() if is_involutory(q)]
        fam = involutory_family(n)
        same = _same_iso_classes(inv, [q for q, _ in fam])
        ok &= same and rep.complete
        rows.append({"order": n, "si": len(rep.representatives), "involutory": len(inv),
                     "family": [name for _, name in fam], "equal": same})
    return Claim("involutory", f"involutory SI medial quandles of order <= {max_order} are "
                 "(Z2,1), (Z_{p^k},-1) for odd p, siq(Z_{2^k},-1,{1}), siq(Z_{2^k},-1,{0,1})", ok, {}, rows)


def claim_z6() -> Claim:
    Q = alexander(cyclic(6), -1)
    qr, red, si = is_quasi_reductive(Q), reductivity_degree(Q), monolith(Q) is not None
    return Claim("z6_minus1", "(Z6,-1) is quasi-reductive, not reductive, not SI", qr and red is None and not si,
                 {"quasi_reductive": qr, "reductive": red is not None, "si": si})


def claim_projection3() -> Claim:
    si = monolith(projection_quandle(3)) is not None
    return Claim("projection3", "the 3-element projection quandle is not SI", not si, {"si": si})


def claim_alexander_si(max_order: int = 16, cap: int = 256) -> Claim:
    bad = []
    checked = 0
    for n in range(1, max_order + 1):
        for A in abelian_groups(n):
            for f in _conjugacy_classes(A, cap):
                Q = alexander(A, f)
                checked += 1
                if not is_connected(Q) and monolith(Q) is not None and n != 2:
                    bad.append(f"({A},{[list(r) for r in f.matrix]})")
    return Claim("alexander_si", f"a non-connected SI Alexander quandle of order <= {max_order} has two elements",
                 not bad, {"checked_up_to_conjugacy": checked, "counterexamples": bad})


def claim_dichotomy(max_order: int = 12, cap: int = 256) -> Claim:
    bad = []
    for n in range(3, max_order + 1):
        for r in enumerate_si(n, cap=cap).quandles():
            if not (is_latin(r) or is_quasi_reductive(r)):
                bad.append(n)
    return Claim("dichotomy", f"SI medial quandles with 3..{max_order} elements are latin or quasi-reductive",
                 not bad, {"counterexample_orders": bad})


CLAIMS = {
    "z4_3": claim_z4_3, "size6": claim_size6, "size8": claim_size8, "z49_pair": claim_z49_pair,
    "three_orbits": claim_three_orbits, "two_reductive": claim_two_reductive, "involutory": claim_involutory,
    "z6_minus1": claim_z6, "projection3": claim_projection3, "alexander_si": claim_alexander_si,
    "dichotomy": claim_dichotomy,
}


def run_claims(keys=None, config: RunConfig | None = None) -> list[Claim]:
    config = config or RunConfig()
    out = []
    for key in keys or CLAIMS:
        fn = CLAIMS[key]
        if key in ("involutory", "alexander_si", "dichotomy"):
            out.append(fn(cap=config.cap_aut))
        else:
            out.append(fn())
    return out


def _header(config: RunConfig) -> dict:
    return {"tool": "qforge", "version": __version__, "config_hash": config.config_hash(), "seed": config.seed}


def claims_to_text(claims: list[Claim], config: RunConfig) -> str:
    h = _header(config)
    lines = [f"# qforge {h['version']}  config {h['config_hash']}  seed {h['seed']}", ""]
    w = max(len(c.key) for c in claims)
    for c in claims:
        lines.append(f"{'PASS' if c.passed else 'FAIL'}  {c.key:<{w}}  {c.text}")
    for c in claims:
        if not c.rows and not c.detail:
            continue
        lines += ["", f"## {c.key}"]
        for k, v in c.detail.items():
            lines.append(f"  {k}: {v}")
        if c.rows:
            cols = list(c.rows[0])
            widths = [max(len(col), *(len(str(r[col])) for r in c.rows)) for col in cols]
            lines.append(("  " + "  ".join(f"{col:<{wd}}" for col, wd in zip(cols, widths))).rstrip())
            for r in c.rows:
                lines.append(("  " + "  ".join(f"{str(r[col]):<{wd}}" for col, wd in zip(cols, widths))).rstrip())
    return "\n".join(lines) + "\n"


def claims_to_json(claims: list[Claim], config: RunConfig) -> dict:
    return {**_header(config), "claims": [c.as_json() for c in claims]}


def report_paper_tables(outdir, config: RunConfig | None = None, keys=None) -> list[Path]:
    """Write ``paper_tables.json`` and ``paper_tables.txt`` into ``outdir``."""
    config = config or RunConfig()
    claims = run_claims(keys, config)
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    pj, pt = out / "paper_tables.json", out / "paper_tables.txt"
    dump_json(claims_to_json(claims, config), pj)
    pt.write_text(claims_to_text(claims, config))
    return [pj, pt]


def enumeration_to_json(rep, config: RunConfig) -> dict:
    from .formats import siq_to_json
    reps = []
    for r in rep.representatives:
        prov = dict(r["provenance"])
        if "spec" in prov:
            prov["spec"] = siq_to_json(prov["spec"])
        fp = r["fingerprint"]
        reps.append({"quandle": quandle_to_json(r["quandle"]), "provenance": prov, "class": r["class"],
                     "fingerprint": {"orbit_sizes": list(fp.orbit_sizes), "reductivity": fp.reductivity,
                                     "involutory": fp.involutory,
                                     "cycle_types": [[list(ct), k] for ct, k in fp.cycle_types]}})
    return {**_header(config), "order": rep.order, "complete": rep.complete, "candidates": rep.candidates,
            "counts": rep.counts, "representatives": reps}


def enumeration_to_text(rep, config: RunConfig) -> str:
    h = _header(config)
    lines = [f"# qforge {h['version']}  config {h['config_hash']}  seed {h['seed']}",
             f"order {rep.order}: {len(rep.representatives)} SI medial quandles"
             + ("" if rep.complete else " (PARTIAL: budget exceeded)"),
             "counts: " + ", ".join(f"{k}={v}" for k, v in rep.counts.items()), ""]
    for i, r in enumerate(rep.representatives):
        prov = r["provenance"]
        if prov["kind"] == "siq":
            src = str(prov["spec"])
        elif prov["kind"] == "alexander":
            src = f"alexander({FinAbGroup(tuple(prov['group']))}, {prov['t']})"
        else:
            src = f"projection({prov['n']})"
        fp = r["fingerprint"]
        lines.append(f"{i:>3}  {r['class']:<22} orbits {list(fp.orbit_sizes)!s:<20} "
                     f"red {fp.reductivity!s:<5} {src}")
    return "\n".join(lines) + "\n"
