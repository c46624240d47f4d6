import json

import numpy as np
import pytest

from qforge.abelian import FinAbGroup, GroupHom, cyclic
from qforge.config import RunConfig
from qforge.congruence import monolith
from qforge.construct import SiqSpec, alexander, siq, z4_siq_mesh
from qforge.formats import (FormatError, dump_json, elem_from_json, group_from_json, hom_from_json, hom_to_json,
                            load_mesh, load_quandle, mesh_from_json, mesh_to_json, module_from_json,
                            partition_from_json, partition_to_json, quandle_from_csv, quandle_from_json,
                            quandle_to_json, quandle_to_text, siq_from_json, siq_to_json)
from qforge.mesh import MeshViolation, random_mesh
from qforge.quandle import AxiomViolation


def test_group_and_hom_round_trip():
    G = FinAbGroup((2, 4))
    assert group_from_json({"orders": [2, 4]}) == G
    assert group_from_json([2, 4]) == G
    h = GroupHom(G, G, ((1, 0), (2, 3)))
    assert hom_from_json(hom_to_json(h)) == h
    assert hom_from_json(3, cyclic(5), cyclic(5)) == GroupHom.scalar(cyclic(5), 3)
    assert hom_from_json(0, cyclic(2), cyclic(4)).is_zero
    for bad in ({"orders": [0]}, {"orders": "4"}, 7):
        with pytest.raises(FormatError):
            group_from_json(bad)
    with pytest.raises(FormatError):
        hom_from_json(2, cyclic(2), cyclic(4))
    with pytest.raises(FormatError):
        hom_from_json([[1]], cyclic(2), cyclic(4))       # 2 * 1 != 0 in Z4
    with pytest.raises(FormatError):
        hom_from_json(hom_to_json(h), cyclic(8), cyclic(8))


def test_elements():
    assert elem_from_json(3, cyclic(4)) == (3,)
    with pytest.raises(FormatError):
        elem_from_json(5, cyclic(4))                 # out of range, not reduced
    assert elem_from_json([1, 3], FinAbGroup((2, 4))) == (1, 3)
    with pytest.raises(FormatError):
        elem_from_json(1, FinAbGroup((2, 2)))


def test_quandle_round_trip(gallery_items):
    for it in gallery_items:
        Q = it.quandle()
        d = json.loads(dump_json(quandle_to_json(Q)))
        assert quandle_from_json(d) == Q


def test_quandle_json_errors():
    with pytest.raises(FormatError):
        quandle_from_json({"size": 3, "table": [[0, 0], [1, 1]]})
    with pytest.raises(FormatError):
        quandle_from_json([[0, 1], [0]])
    with pytest.raises(AxiomViolation):
        quandle_from_json([[0, 0], [1, 1]])            # row 0 is not a permutation
    Q = quandle_from_json([[0, 0], [1, 1]], validate=False)
    assert Q.size == 2


def test_csv_zero_and_one_based():
    Q = alexander(cyclic(4), 3)
    zero = "\n".join(",".join(str(x) for x in row) for row in Q.mult)
    one = "\n".join(" ".join(str(x + 1) for x in row) for row in Q.mult)
    assert quandle_from_csv(zero) == Q
    assert quandle_from_csv("# Z4, t=3\n" + one + "\n") == Q
    # explicit flag wins over detection
    P = np.zeros((2, 2), dtype=int) + np.arange(2)
    assert quandle_from_csv("1 2\n1 2", one_based=True).mult.tolist() == P.tolist()
    with pytest.raises(FormatError):
        quandle_from_csv("0 1\n0")


def test_load_quandle_files(tmp_path):
    Q = siq(SiqSpec.make((4,), 3, [1])).quandle
    (tmp_path / "q.json").write_text(dump_json(quandle_to_json(Q)))
    (tmp_path / "bare.json").write_text(json.dumps(Q.mult.tolist()))
    (tmp_path / "q.csv").write_text("\n".join(",".join(map(str, r)) for r in Q.mult))
    for name in ("q.json", "bare.json", "q.csv"):
        assert load_quandle(tmp_path / name) == Q
    (tmp_path / "m.json").write_text(dump_json(mesh_to_json(z4_siq_mesh())))
    with pytest.raises(FormatError):
        load_quandle(tmp_path / "m.json")
    assert load_mesh(tmp_path / "m.json") == z4_siq_mesh()


def test_text_table():
    txt = quandle_to_text(alexander(cyclic(4), 3))
    lines = txt.splitlines()
    assert lines[0] == "  | 0 1 2 3"
    assert lines[2] == "0 | 0 3 2 1"
    assert len(lines) == 6


def test_mesh_round_trip(rng):
    for _ in range(30):
        m = random_mesh(rng, max_order=10)
        assert mesh_from_json(json.loads(dump_json(mesh_to_json(m)))) == m
    m = z4_siq_mesh()
    d = mesh_to_json(m)
    assert "embeddings" in d
    assert mesh_from_json(d).embeddings[1]((1,)) == (2,)


def test_mesh_json_shorthand_and_errors():
    d = {"groups": [[2], [2]], "phi": [[0, 0], [0, 0]], "c": [[0, 1], [1, 0]]}
    m = mesh_from_json(d)
    assert m.sizes == (2, 2)
    bad = dict(d, c=[[1, 1], [1, 0]])
    with pytest.raises(MeshViolation) as e:
        mesh_from_json(bad)
    assert e.value.condition == "M2"
    with pytest.raises(FormatError):
        mesh_from_json({"groups": [[2]], "phi": [[0]]})
    with pytest.raises(FormatError):
        mesh_from_json(dict(d, phi=[[0, 0]]))


def test_siq_spec_round_trip(gallery_items):
    for it in gallery_items:
        if it.kind != "siq":
            continue
        spec = it.obj
        back = siq_from_json(json.loads(dump_json(siq_to_json(spec))))
        assert siq(back).quandle == siq(spec).quandle
    M = module_from_json({"group": [4], "t": 3})
    assert M.t == GroupHom.scalar(cyclic(4), 3)


def test_partition_round_trip():
    Q = siq(SiqSpec.make((4,), 3, [1])).quandle
    mono = monolith(Q)
    js = partition_to_json(mono)
    assert js == [[0, 2], [1, 3], [4], [5]]
    assert partition_from_json(js, quandle=Q) == mono
    with pytest.raises(ValueError):
        partition_from_json([[0, 1], [2], [3], [4], [5]], quandle=Q)   # not compatible


def test_dump_json_is_canonical(tmp_path):
    a = dump_json({"b": 1, "a": [1, 2]})
    assert a == '{"a":[1,2],"b":1}'
    dump_json({"x": 1}, tmp_path / "o.json")
    assert (tmp_path / "o.json").read_text() == '{"x":1}\n'


def test_config_env_and_hash():
    base = RunConfig()
    cfg = base.with_env({"QFORGE_CAPS": "lattice=5000, cap_group=1e6"})
    assert cfg.cap_lattice == 5000 and cfg.cap_group == 1_000_000
    assert base.with_env({}) == base
    with pytest.raises(ValueError):
        base.with_env({"QFORGE_CAPS": "bogus=1"})
    with pytest.raises(ValueError):
        RunConfig(jobs=0)
    assert RunConfig(jobs=4, outdir="/tmp").config_hash() == base.config_hash()
    assert RunConfig(seed=1).config_hash() != base.config_hash()
