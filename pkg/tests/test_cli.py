import json
import subprocess
import sys

import pytest

from stablesets import frames as fr
from stablesets.cli import bitset, parse_subsets, run
from stablesets.errors import InputError
from stablesets.polarity import polarity_from_json


def call(capsys, *argv):
    code = run(list(map(str, argv)))
    out = capsys.readouterr().out
    return code, out


def test_subset_syntax():
    assert parse_subsets("0,1;1") == [[0, 1], [1]]
    assert parse_subsets("0;;2") == [[0], [], [2]]
    assert parse_subsets("") == []
    with pytest.raises(InputError):
        parse_subsets("0,x")
    assert bitset(0b011, 3) == "110"


def test_canonical_ext_chain2(capsys, data_dir):
    code, out = call(capsys, "canonical-ext", data_dir / "chain2.json")
    doc = json.loads(out)
    assert code == 0 and doc["elements"] == 2 and doc["embedding"] == [0, 1]


def test_macneille_and_stable_lattice(capsys, data_dir):
    code, out = call(capsys, "macneille", data_dir / "n5.json")
    assert code == 0 and json.loads(out)["elements"] == 5
    code, out = call(capsys, "stable-lattice", data_dir / "nonidentity3.json")
    doc = json.loads(out)
    assert code == 0 and doc["size"] == 8


def test_define_fusion_matches_set_level(capsys, data_dir):
    code, out = call(capsys, "define", data_dir / "frame.json", data_dir / "fusion.fml", "--args", "0,1;1")
    assert code == 0
    res = json.loads(out)["results"][0]
    F = polarity_from_json(json.loads((data_dir / "frame.json").read_text()))
    assert res["mask"] == fr.fusion(F, 0b011, 0b010)
    assert res["bitset"] == bitset(res["mask"], F.x_size)


@pytest.mark.parametrize("suite,instance", [
    ("modal", "modal2x2.json"),
    ("lambek", "frame.json"),
    ("galois", "nonidentity3.json"),
    ("fhom", "fhom_modal.json"),
    ("completemac", "completemac_modal.json"),
    ("ephienlarge", "ephienlarge.json"),
    ("axioms", "axioms_modal.json"),
])
def test_check_passes(capsys, data_dir, suite, instance):
    code, out = call(capsys, "check", suite, data_dir / instance)
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "pass"
    assert doc["options"]["seed"] == 0


def test_modal_report_contents(capsys, data_dir):
    _, out = call(capsys, "check", "modal", data_dir / "modal2x2.json")
    checks = json.loads(out)["checks"]
    assert checks["adjunction"]["ok"]
    assert checks["diamond_complete_normal_operator"]["mode"] == "exhaustive"


def test_sampled_flag_recorded(capsys, data_dir):
    _, out = call(capsys, "--sampled", "--seed", "3", "check", "modal", data_dir / "modal2x2.json")
    doc = json.loads(out)
    assert doc["options"]["mode"] == "sampled" and doc["options"]["seed"] == 3
    assert doc["checks"]["box_complete_normal_dual_operator"]["mode"] == "sampled"


def test_verification_failure_exit_code(capsys, tmp_path):
    # the transitive irreflexive relation x0 R x1 does not give an ortholattice
    inst = tmp_path / "p.json"
    inst.write_text(json.dumps({"X": 2, "Y": 2, "R": [[0, 1]]}))
    code, out = call(capsys, "check", "ortho", inst)
    assert code == 1 and json.loads(out)["status"] == "fail"


@pytest.mark.parametrize("argv", [
    ["check", "modal", "missing.json"],
    ["check", "nosuchsuite", "x.json"],
    ["frobnicate"],
    [],
    ["--cap", "0", "macneille", "x.json"],
    ["--exhaustive", "--sampled", "check", "modal", "x.json"],
])
def test_error_paths_emit_json(capsys, argv):
    try:
        code = run(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2
    assert "error" in json.loads(capsys.readouterr().out)


def test_bad_inputs(capsys, data_dir, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, out = call(capsys, "macneille", bad)
    assert code == 2 and json.loads(out)["error"] == "InputError"
    notlat = tmp_path / "v.json"
    notlat.write_text(json.dumps({"elements": 3, "leq": [[0, 1], [0, 2]]}))
    code, out = call(capsys, "canonical-ext", notlat)
    assert code == 2 and json.loads(out)["error"] == "NotALattice"
    code, out = call(capsys, "define", data_dir / "frame.json", data_dir / "fusion.fml", "--args", "7")
    assert code == 2
    wrong = tmp_path / "w.json"
    wrong.write_text(json.dumps({"frame": 3}))
    code, out = call(capsys, "check", "completemac", wrong)
    assert code == 2 and "error" in json.loads(out)


def test_json_out_and_dot(capsys, data_dir, tmp_path):
    target = tmp_path / "r.json"
    code, out = call(capsys, "check", "modal", data_dir / "modal2x2.json", "--json-out", target)
    assert code == 0 and target.read_text() == out
    code, out = call(capsys, "export-dot", data_dir / "m3.json", "--completion", "macneille")
    assert code == 0 and out.startswith("digraph")
    code, out = call(capsys, "export-dot", data_dir / "nonidentity3.json")
    assert "{0,1}" in out


def test_reruns_are_byte_identical(data_dir):
    cmd = [sys.executable, "-c", "from stablesets.cli import main; main()",
           "--seed", "5", "check", "modal", str(data_dir / "modal_sweep.json")]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["status"] == "pass"
