import json
import subprocess
import sys

import pytest

from qpairs.cli import main, parse_kv_text, resolve_spec, SCHEMAS
from qpairs.errors import DomainError


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_verdict_json(capsys):
    code, out, _ = run_cli(["classify", "1", "2", "6", "--pair", "xy"], capsys)
    assert code == 0
    row = json.loads(out)
    assert row["status"] == "NOT_PR"
    assert row["witness_coloring"] == "two-adic"


def test_classify_golden_rows(capsys):
    for triple, status in ((["1", "2", "1"], "PR_UNCONDITIONAL"),
                           (["1", "17", "34"], "UNKNOWN")):
        code, out, _ = run_cli(["classify", *triple], capsys)
        assert code == 0 and json.loads(out)["status"] == status


def test_malformed_input_exit_2():
    proc = subprocess.run(
        [sys.executable, "-m", "qpairs.cli", "omega", "--form", "[1,0"],
        capture_output=True,
    )
    assert proc.returncode == 2


def test_folner_closed_form(capsys):
    code, out, _ = run_cli(["folner", "--k", "3", "--f", "liouville"], capsys)
    assert code == 0
    row = json.loads(out)
    assert row["mean_re"] == pytest.approx(1 / 9, abs=1e-12)
    assert row["box_size"] == 9


def test_solve(capsys):
    code, out, _ = run_cli(["solve", "1", "1", "2", "--k", "1", "--m", "2", "--n", "1"], capsys)
    row = json.loads(out)
    assert (row["x"], row["y"], row["z"]) == (-2, 14, 10)
    assert row["check"] is True


def test_verify_coloring(capsys):
    code, out, _ = run_cli(
        ["verify-coloring", "1", "2", "6", "--coloring", "two-adic", "--bound", "500"],
        capsys,
    )
    row = json.loads(out)
    assert code == 0 and row["monochromatic"] == 0 and row["solutions"] >= 1


def test_ring_and_distance(capsys):
    code, out, _ = run_cli(["ring", "unit", "--d", "-2"], capsys)
    assert json.loads(out) == {
        "m": 1, "n": 1, "norm": -1, "quantity": "fundamental_unit",
        "run_id": json.loads(out)["run_id"],
    }
    code, out, _ = run_cli(["distance", "--f", "liouville", "--y", "10"], capsys)
    assert json.loads(out)["value"] == pytest.approx(1.533747356112131)


def test_experiment_kv_and_unknown_key(capsys, tmp_path):
    args = ["ldelta", "f=principal", "p1=[1,0,2]", "p2=[0,2,0]", "delta=0.3",
            "q=1", "a=1", "b=0", "n=200"]
    code, out, _ = run_cli(args, capsys)
    assert code == 0
    assert json.loads(out)["abs"] == 1.0
    code, _, err = run_cli(args + ["bogus=3"], capsys)
    assert code == 2 and "unknown keys" in err


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "exp.txt"
    cfg.write_text("f = principal\np1 = [1,0,2]\np2 = [0,2,0]\n# comment\nn = 150\n")
    code, out, _ = run_cli(["ldelta", "--config", str(cfg)], capsys)
    assert code == 0
    assert json.loads(out)["abs"] == 1.0


def test_determinism_byte_identical(tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    args = ["--out", None, "ldelta", "f=liouville", "p1=[1,0,2]", "p2=[0,2,0]",
            "delta=0.3", "q=1", "a=1", "b=0", "n=300"]
    for path in (out1, out2):
        args[1] = str(path)
        assert main(args) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_sweep_rows_and_empty_values(capsys):
    code, out, _ = run_cli(
        ["--format", "csv", "sweep", "--sub", "ldelta", "--axis", "n",
         "--values", "150,200,250,300", "f=principal", "p1=[1,0,2]", "p2=[0,2,0]"],
        capsys,
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 5  # header + 4 rows
    assert lines[1].split(",")[-1] == "150"
    code, _, _ = run_cli(
        ["sweep", "--sub", "ldelta", "--axis", "n", "--values", " ", "f=principal",
         "p1=[1,0,2]", "p2=[0,2,0]"],
        capsys,
    )
    assert code == 2
    code, _, _ = run_cli(
        ["sweep", "--sub", "ldelta", "--axis", "zzz", "--values", "100",
         "f=principal", "p1=[1,0,2]", "p2=[0,2,0]"],
        capsys,
    )
    assert code == 2


def test_resource_cap_exit_3(capsys):
    code, _, err = run_cli(
        ["--cap-n", "100", "verify-coloring", "1", "2", "6",
         "--coloring", "two-adic", "--bound", "2000"],
        capsys,
    )
    assert code == 3


def test_run_id_stability():
    values1, canon1, rid1 = resolve_spec("ldelta", SCHEMAS["ldelta"],
                                         {"f": "liouville", "p1": "[1,0,2]",
                                          "p2": "[0,2,0]", "n": "100"})
    _, _, rid2 = resolve_spec("ldelta", SCHEMAS["ldelta"],
                              {"n": "100", "p2": "[0,2,0]", "p1": "[1,0,2]",
                               "f": "liouville"})
    assert rid1 == rid2  # order-insensitive canonicalization
    _, _, rid3 = resolve_spec("ldelta", SCHEMAS["ldelta"],
                              {"f": "liouville", "p1": "[1,0,2]",
                               "p2": "[0,2,0]", "n": "101"})
    assert rid1 != rid3


def test_parse_kv_text_rejects_garbage():
    assert parse_kv_text("a = 1\n\n# note\nb=2") == {"a": "1", "b": "2"}
    with pytest.raises(DomainError):
        parse_kv_text("not a pair")


def test_dyadic_witness_round_trip(capsys):
    code, out, _ = run_cli(["classify", "3", "5", "30"], capsys)
    row = json.loads(out)
    assert row["witness_coloring"] == "dyadic:6"
    code, out, _ = run_cli(
        ["verify-coloring", "3", "5", "30", "--coloring", row["witness_coloring"],
         "--bound", "500"],
        capsys,
    )
    assert json.loads(out)["monochromatic"] == 0
