"""Command line interface.

Examples::

    qforge make siq module.json C.json > q.json
    qforge check q.json
    qforge congr monolith q.json
    qforge iso q1.json q2.json --witness
    qforge enumerate --order 8 --format text
"""
from __future__ import annotations

import sys
from pathlib import Path

import click

from . import __version__
from .abelian import CapExceeded
from .config import RunConfig
from .congruence import all_congruences, minimal_congruences, monolith
from .construct import SpecViolation, alexander, gallery, projection_quandle, siq
from .enumeration import classify, enumerate_si
from .formats import (FormatError, dump_json, elem_from_json, group_from_json, hom_from_json, load_json,
                      load_mesh, load_quandle, mesh_to_json, module_from_json, partition_to_json,
                      quandle_to_json, quandle_to_text, siq_to_json)
from .iso import are_homologous, quandle_isomorphic
from .mesh import MeshViolation, NonMedial, canonical_mesh, is_indecomposable, sum_mesh
from .quandle import (AxiomViolation, is_connected, is_involutory, is_latin, is_medial, is_quasi_reductive,
                      medial_witness, orbits, reductivity_degree, try_lmlt_nilpotency_degree)
from .report import CLAIMS, enumeration_to_json, enumeration_to_text, report_paper_tables

USER_ERRORS = (FormatError, AxiomViolation, MeshViolation, NonMedial, SpecViolation, CapExceeded, ValueError,
               KeyError, FileNotFoundError)


class Ctx:
    def __init__(self, config: RunConfig, fmt: str):
        self.config = config
        self.fmt = fmt

    def emit(self, data, text: str | None = None, prefer: str = "text"):
        """Print ``data`` as JSON or ``text``; ``prefer`` applies when --format was not given."""
        fmt = self.fmt or prefer
        if fmt == "json" or text is None:
            click.echo(dump_json(data))
        else:
            click.echo(text.rstrip("\n"))


pass_ctx = click.make_pass_decorator(Ctx)


class Group(click.Group):
    """Turns library errors into a one-line message and exit status 2."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except USER_ERRORS as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(2)


@click.group(cls=Group)
@click.version_option(__version__, prog_name="qforge")
@click.option("--cap-lattice", type=click.IntRange(min=1), help="Largest congruence lattice to list.")
@click.option("--cap-group", type=click.IntRange(min=1), help="Largest permutation group to close.")
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True, help="Worker processes.")
@click.option("--seed", type=int, default=0, show_default=True, help="Recorded in every report.")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]),
              help="Output format; data-producing commands default to json, the rest to text.")
@click.pass_context
def main(ctx, cap_lattice, cap_group, jobs, seed, fmt):
    """Finite medial quandles: meshes, congruences, SI tests, isomorphism."""
    cfg = RunConfig(jobs=jobs, seed=seed).with_env()
    overrides = {}
    if cap_lattice is not None:
        overrides["cap_lattice"] = cap_lattice
    if cap_group is not None:
        overrides["cap_group"] = cap_group
    if overrides:
        from dataclasses import replace
        cfg = replace(cfg, **overrides)
    ctx.obj = Ctx(cfg, fmt)


# -- check ----------------------------------------------------------------------

@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@pass_ctx
def check(c: Ctx, path):
    """Validate a quandle table and print its structural properties."""
    Q = load_quandle(path)
    props = {"size": Q.size, "medial": is_medial(Q), "orbits": [len(o) for o in orbits(Q)],
             "connected": is_connected(Q), "latin": is_latin(Q), "involutory": is_involutory(Q),
             "reductivity": reductivity_degree(Q), "quasi_reductive": is_quasi_reductive(Q)}
    if not props["medial"]:
        law, wit = medial_witness(Q)
        props["medial_failure"] = {"law": law, "witness": list(wit)}
    deg, capped = try_lmlt_nilpotency_degree(Q, c.config.cap_group)
    props["lmlt_nilpotency"] = "capped" if capped else deg
    mono = monolith(Q)
    props["si"] = mono is not None
    props["monolith"] = None if mono is None else partition_to_json(mono)
    if props["medial"]:
        props["class"] = classify(Q)[0]
    text = "\n".join(f"{k:<16} {v}" for k, v in props.items())
    c.emit(props, text)


# -- mesh -----------------------------------------------------------------------

@main.group()
def mesh():
    """Affine meshes: validate, sum, canonical mesh of a quandle."""


@mesh.command("validate")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@pass_ctx
def mesh_validate(c: Ctx, path):
    m = load_mesh(path)     # raises MeshViolation naming the failed condition
    ind = is_indecomposable(m)
    c.emit({"valid": True, "indecomposable": ind, "summands": list(m.sizes), "order": m.order},
           f"valid mesh, summand sizes {list(m.sizes)}, {'indecomposable' if ind else 'decomposable'}")


@mesh.command("sum")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Write quandle JSON here.")
@pass_ctx
def mesh_sum(c: Ctx, path, output):
    L = sum_mesh(load_mesh(path))
    data = quandle_to_json(L.quandle)
    if output:
        dump_json(data, output)
    else:
        c.emit(data, quandle_to_text(L.quandle), prefer="json")


@mesh.command("canonical")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Write mesh JSON here.")
@pass_ctx
def mesh_canonical(c: Ctx, path, output):
    m, L = canonical_mesh(load_quandle(path))
    data = mesh_to_json(m)
    if output:
        dump_json(data, output)
    else:
        c.emit(data, str(m), prefer="json")


# -- congruences ----------------------------------------------------------------

@main.group()
def congr():
    """Congruence lattice, monolith and subdirect irreducibility."""


@congr.command("list")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--minimal", is_flag=True, help="Only the minimal nontrivial congruences.")
@pass_ctx
def congr_list(c: Ctx, path, minimal):
    Q = load_quandle(path)
    cs = minimal_congruences(Q) if minimal else all_congruences(Q, c.config.cap_lattice)
    data = sorted(partition_to_json(t) for t in cs)
    c.emit(data, "\n".join(str(t) for t in sorted(cs, key=lambda t: (-t.num_blocks, sorted(t.blocks)))))


@congr.command("monolith")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@pass_ctx
def congr_monolith(c: Ctx, path):
    mono = monolith(load_quandle(path))
    c.emit(None if mono is None else partition_to_json(mono), "none (not SI)" if mono is None else str(mono))


@congr.command("si")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@pass_ctx
def congr_si(c: Ctx, path):
    """Exit status 0 if subdirectly irreducible, 1 otherwise."""
    si = monolith(load_quandle(path)) is not None
    c.emit({"si": si}, "SI" if si else "not SI")
    sys.exit(0 if si else 1)


# -- constructions ----------------------------------------------------------------

@main.group()
def make():
    """Build projection, Alexander and siq quandles."""


def _emit_quandle(c: Ctx, Q, output):
    data = quandle_to_json(Q)
    if output:
        dump_json(data, output)
    else:
        c.emit(data, quandle_to_text(Q), prefer="json")


@make.command("projection")
@click.argument("n", type=click.IntRange(min=1))
@click.option("-o", "--output", type=click.Path(dir_okay=False))
@pass_ctx
def make_projection(c: Ctx, n, output):
    _emit_quandle(c, projection_quandle(n), output)


@make.command("alexander")
@click.argument("group_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("hom_path", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False))
@pass_ctx
def make_alexander(c: Ctx, group_path, hom_path, output):
    """Alexander quandle (A, f) from group.json and hom.json (an automorphism of A)."""
    A = group_from_json(load_json(group_path))
    f = hom_from_json(load_json(hom_path), A, A)
    _emit_quandle(c, alexander(A, f), output)


@make.command("siq")
@click.argument("module_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("c_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--allow-non-si-module", is_flag=True, help="Skip the SI-module requirement.")
@click.option("-o", "--output", type=click.Path(dir_okay=False))
@pass_ctx
def make_siq(c: Ctx, module_path, c_path, allow_non_si_module, output):
    """siq(A, t, C) from module.json ({"group", "t"}) and C.json (list of elements)."""
    from .construct import SiqSpec
    M = module_from_json(load_json(module_path))
    C = tuple(elem_from_json(x, M.group) for x in load_json(c_path))
    _emit_quandle(c, siq(SiqSpec(M, C, allow_non_si_module)).quandle, output)


# -- isomorphism ----------------------------------------------------------------------

@main.command()
@click.argument("q1", type=click.Path(exists=True, dir_okay=False))
@click.argument("q2", type=click.Path(exists=True, dir_okay=False))
@click.option("--witness", is_flag=True, help="Print the isomorphism found.")
@pass_ctx
def iso(c: Ctx, q1, q2, witness):
    """Exit status 0 if the quandles are isomorphic, 1 otherwise."""
    w = quandle_isomorphic(load_quandle(q1), load_quandle(q2))
    data = {"isomorphic": w is not None}
    text = "isomorphic" if w is not None else "not isomorphic"
    if witness and w is not None:
        data["mapping"] = list(w.mapping)
        text += "\n" + " ".join(f"{x}->{y}" for x, y in enumerate(w.mapping))
    c.emit(data, text)
    sys.exit(0 if w is not None else 1)


@main.command("iso-mesh")
@click.argument("m1", type=click.Path(exists=True, dir_okay=False))
@click.argument("m2", type=click.Path(exists=True, dir_okay=False))
@click.option("--witness", is_flag=True, help="Print (sigma, psi, d).")
@pass_ctx
def iso_mesh(c: Ctx, m1, m2, witness):
    """Exit status 0 if the meshes are homologous, 1 otherwise."""
    w = are_homologous(load_mesh(m1), load_mesh(m2))
    data = {"homologous": w is not None}
    text = "homologous" if w is not None else "not homologous"
    if witness and w is not None:
        data["sigma"] = list(w.sigma)
        data["psi"] = [[list(r) for r in h.matrix] for h in w.psi]
        data["d"] = [list(x) for x in w.d]
        text += f"\nsigma {data['sigma']}\npsi {data['psi']}\nd {data['d']}"
    c.emit(data, text)
    sys.exit(0 if w is not None else 1)


# -- enumeration and reports ---------------------------------------------------------------

@main.command("enumerate")
@click.option("--order", "n", type=click.IntRange(min=1), required=True)
@click.option("--budget", type=float, help="Seconds before the search stops and the report is flagged partial.")
@click.option("-o", "--output", type=click.Path(dir_okay=False))
@pass_ctx
def enumerate_cmd(c: Ctx, n, budget, output):
    """All SI medial quandles of order N up to isomorphism."""
    if n > 16:
        click.echo("warning: orders above 16 are outside the tested range", err=True)
    rep = enumerate_si(n, cap=c.config.cap_aut, jobs=c.config.jobs, budget=budget)
    data = enumeration_to_json(rep, c.config)
    if output:
        dump_json(data, output)
    else:
        c.emit(data, enumeration_to_text(rep, c.config), prefer="json")
    if not rep.complete:
        sys.exit(3)


@main.command()
@click.option("--outdir", type=click.Path(file_okay=False), default=".", show_default=True)
@click.option("--claim", "claims", multiple=True, type=click.Choice(list(CLAIMS)),
              help="Only these claims (repeatable); default all.")
@pass_ctx
def report(c: Ctx, outdir, claims):
    """Recompute the concrete finite claims and write paper_tables.{json,txt}."""
    files = report_paper_tables(outdir, c.config, list(claims) or None)
    text = files[1].read_text()
    c.emit(load_json(files[0]), text)


@main.group("gallery")
def gallery_cmd():
    """The built-in collection of example quandles and meshes."""


@gallery_cmd.command("export")
@click.argument("outdir", type=click.Path(file_okay=False))
@pass_ctx
def gallery_export(c: Ctx, outdir):
    """Write every gallery object as quandle JSON plus a provenance note."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    index = []
    for i, item in enumerate(gallery()):
        stem = f"{i:02d}"
        Q = item.quandle()
        entry = {"name": item.name, "kind": item.kind, "note": item.note, "file": f"{stem}.json"}
        if item.kind == "siq":
            entry["spec"] = siq_to_json(item.obj)
        m = item.mesh()
        if m is not None:
            entry["mesh"] = mesh_to_json(m)
        dump_json({**quandle_to_json(Q), "provenance": entry, "version": __version__,
                   "config_hash": c.config.config_hash()}, out / f"{stem}.json")
        index.append(entry)
    dump_json({"version": __version__, "config_hash": c.config.config_hash(), "items": index}, out / "index.json")
    c.emit({"written": len(index), "outdir": str(out)}, f"wrote {len(index)} gallery objects to {out}")


if __name__ == "__main__":
    main()
