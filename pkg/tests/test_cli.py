from __future__ import annotations

import json
import subprocess
import sys

import pytest
from gmpy2 import mpq

from bileonard.cli import parse_scales, run
from bileonard.modules import ModuleType, construct
from bileonard.serialize import matrix_from_json, matrix_to_json, module_from_json, module_to_json


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_construct_and_verify(capsys, tmp_path):
    code, obj = call(capsys, "construct", "--kind", "AB", "--d", "3", "--n", "y")
    assert code == 0
    M = module_from_json(obj)
    assert M.as_dict() == construct(ModuleType.AB(3, "y")).as_dict()
    path = write(tmp_path, "m.json", obj)
    code, obj = call(capsys, "verify", "--in", path)
    assert code == 0 and obj["relations"]["ok"] and obj["irreducible"]
    assert obj["traces"] == ["4", "-4", "4"] and obj["traces_match_type"]


def test_module_json_round_trip():
    M = construct(ModuleType.B(6))
    assert module_from_json(json.loads(json.dumps(module_to_json(M)))).as_dict() == M.as_dict()
    m = M.X * mpq(-3, 7)
    assert matrix_from_json(matrix_to_json(m)) == m


def test_parse_scales():
    s = parse_scales("3,1/2")
    assert (s["x"], s["y"], s["z"]) == (3, mpq(1, 2), 1)
    assert parse_scales("y=-2")["y"] == -2


@pytest.mark.parametrize("cmd", ["classify", "eig", "idempotents", "bases", "rep"])
def test_module_commands(capsys, cmd):
    code, obj = call(capsys, cmd, "--kind", "B", "--d", "4")
    assert code == 0 and obj


def test_rep_matches_closed_form(capsys):
    code, obj = call(capsys, "rep", "--kind", "AB", "--d", "4", "--n", "z", "--a", "y", "--b", "z")
    assert code == 0 and obj["matches_closed_form"]


def test_twist(capsys):
    code, obj = call(capsys, "twist", "--kind", "AB", "--d", "3", "--n", "0", "--perm", "(0 x)(y z)")
    assert code == 0
    assert obj["predicted"] == obj["observed"] and obj["stabilizer_order"] == 6


def test_pair_commands(capsys):
    code, obj = call(capsys, "analyze-pair", "--kind", "B", "--d", "4")
    assert code == 0 and obj["is_leonard"] and obj["is_bannai_ito"]
    code, obj = call(capsys, "fit-aw", "--kind", "B", "--d", "6", "--scale", "3,1/2")
    assert code == 0 and obj["aw"]["rho"] == "36" and obj["aw"]["rho_star"] == "1"
    code, obj = call(capsys, "recognize-pair", "--kind", "B", "--d", "4", "--scale", "3,1/2", "--verbose")
    assert code == 0 and obj["xi"] == "3" and obj["choices"] == 4 and len(obj["choice_list"]) == 4


def test_scale_round_trip(capsys, tmp_path):
    # pair JSON written from scaled generators recognizes back to the same scales
    M = construct(ModuleType.AB(5, "x"))
    pair = {"A": matrix_to_json(M.X * mpq(2, 3)), "A_star": matrix_to_json(M.Y * -5)}
    code, obj = call(capsys, "recognize-pair", "--in", write(tmp_path, "p.json", pair))
    assert code == 0 and obj["rho"] == "16/9" and obj["rho_star"] == "100"


def test_triple_commands(capsys, tmp_path):
    code, obj = call(capsys, "analyze-triple", "--kind", "AB", "--d", "4", "--n", "y")
    assert code == 0 and obj["cls"] == "totally_almost_bipartite"
    code, obj = call(capsys, "recognize-triple", "--kind", "B", "--d", "6")
    assert code == 0 and obj["zeta"] == "1/2"
    code, obj = call(capsys, "extend", "--kind", "AB", "--d", "3", "--n", "x", "--xi-eps", "-2")
    assert code == 0 and obj["triple"]["cls"] == "totally_almost_bipartite"


def test_iso(capsys, tmp_path):
    a = write(tmp_path, "a.json", module_to_json(construct(ModuleType.AB(3, "0"))))
    b = write(tmp_path, "b.json", module_to_json(construct(ModuleType.AB(3, "x"))))
    code, obj = call(capsys, "iso-pair", "--in", a, "--other", a)
    assert code == 0 and obj["isomorphic"]
    code, obj = call(capsys, "iso-triple", "--in", a, "--other", b)
    assert code == 0 and not obj["isomorphic"] and obj["discriminant"] == "tr(A*)"


def test_counterexample(capsys):
    code, obj = call(capsys, "counterexample-d2")
    assert code == 0
    assert obj["triple"]["cls"] == "totally_bipartite"
    assert all(p["refined_relations"] for p in obj["pairs"].values())
    assert obj["pairs"]["A|A*"]["aw"]["rho"] == "4"
    assert not obj["recognition"]["succeeded"] and obj["recognition"]["certificate"]


def test_sweep(capsys):
    code, obj = call(capsys, "sweep", "--d-max", "4")
    assert code == 0 and obj["all_green"] and len(obj["rows"]) == 23


def test_exit_precondition(capsys):
    code, obj = call(capsys, "recognize-pair", "--kind", "B", "--d", "2")
    assert code == 2 and obj["error"] == "precondition"
    code, _ = call(capsys, "construct", "--kind", "B", "--d", "3")
    assert code == 2
    code, _ = call(capsys, "twist", "--kind", "B", "--d", "2")
    assert code == 2
    code, _ = call(capsys, "no-such-command")
    assert code == 2


def test_exit_malformed(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"A": ')
    code, obj = call(capsys, "analyze-pair", "--in", str(p))
    assert code == 3 and obj["location"].startswith(str(p))
    bad = {"A": {"order": 2, "entries": [[1, 0], [0, "x"]]}, "A_star": matrix_to_json(construct(ModuleType.AB(1, "0")).Y)}
    code, obj = call(capsys, "analyze-pair", "--in", write(tmp_path, "b.json", bad))
    assert code == 3 and obj["location"] == "$.A.entries[1][1]"


def test_exit_extension(capsys, tmp_path):
    three = {"c1": "1", "c2": "1", "c3": "1", "s1": 2, "s2": 3, "s3": 5}
    m = {"order": 1, "entries": [[three]]}
    code, obj = call(capsys, "analyze-pair", "--in", write(tmp_path, "e.json", {"A": m, "A_star": m}))
    assert code == 4 and obj["error"] == "unsupported_extension"


def test_out_file(capsys, tmp_path):
    out = tmp_path / "o.json"
    assert run(["construct", "--kind", "B", "--d", "2", "--out", str(out)]) == 0
    assert module_from_json(json.loads(out.read_text())).order == 3


def test_console_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "bileonard", "construct", "--kind", "AB", "--d", "0"],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["x"]["entries"] == [["1"]]
