import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from spinamp.amplitude_engine import PAPER, general_table
from spinamp.cli import main, parse_angle
from spinamp.paper_oracle import standard_closed_form
from spinamp.spin_algebra import Direction, spin_components

from conftest import CANONICAL_CHAINS


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def load_matrix(doc):
    return np.array([[v["re"] + 1j * v["im"] for v in row] for row in doc])


@pytest.fixture
def chain_file(tmp_path):
    def write(name_or_doc, filename="chain.json"):
        doc = CANONICAL_CHAINS[name_or_doc] if isinstance(name_or_doc, str) else name_or_doc
        path = tmp_path / filename
        path.write_text(json.dumps(doc))
        return str(path)

    return write


class TestAngles:
    @pytest.mark.parametrize("text, degrees, value", [
        ("1.5", False, 1.5), ("90d", False, math.pi / 2), ("90", True, math.pi / 2), (" 45D", False, math.pi / 4),
        ("-0.5", False, -0.5),
    ])
    def test_parse(self, text, degrees, value):
        assert parse_angle(text, degrees) == pytest.approx(value)

    @pytest.mark.parametrize("text", ["abc", "nan", "inf", "d"])
    def test_reject(self, capsys, text):
        code, out, err = run(capsys, "table", "--j", "2", "--from", text, "0")
        assert code == 2 and out == "" and "--from" in err


class TestOperators:
    def test_spin2_json_exact(self, capsys):
        code, out, _ = run(capsys, "operators", "--j", "2", "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["m"] == [2, 1, 0, -1, -2]
        for name, mat in zip(("S_x", "S_y", "S_z"), spin_components(2)):
            assert np.max(np.abs(load_matrix(doc[name]) - mat)) < 1e-12
        assert doc["S_x"][1][2] == {"re": math.sqrt(6) / 2, "im": 0.0}

    def test_spin_half_pretty(self, capsys):
        code, out, _ = run(capsys, "operators", "--j", "0.5")
        assert code == 0
        assert "S_z (units of hbar), j = 1/2" in out
        assert "0.5+0i" in out and "0-0.5i" in out

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "operators", "--j", "1", "--format", "csv")
        rows = list(csv.reader(io.StringIO(out)))
        assert code == 0 and rows[0] == ["operator", "row_m", "col_m", "re", "im"]
        assert len(rows) == 1 + 3 * 9

    @pytest.mark.parametrize("j", ["0.3", "0", "-1", "x"])
    def test_invalid_j(self, capsys, j):
        code, out, err = run(capsys, "operators", "--j", j)
        assert code == 2 and out == "" and "--j" in err


class TestTable:
    def test_identity(self, capsys):
        code, out, _ = run(capsys, "table", "--j", "2", "--from", "0", "0", "--to", "0", "0", "--format", "json")
        doc = json.loads(out)
        assert code == 0
        assert np.array_equal(load_matrix(doc["amplitudes"]), np.eye(5))
        assert doc["checks"]["unitary"] is True

    def test_x_column_matches_closed_forms(self, capsys):
        code, out, _ = run(capsys, "table", "--j", "2", "--from", "90d", "0", "--to", "0", "0",
                           "--convention", "paper", "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0
        assert list(rows[0]) == ["m_i", "m_f", "re", "im", "prob"]
        col = {int(r["m_f"]): complex(float(r["re"]), float(r["im"])) for r in rows if r["m_i"] == "2"}
        for mf, value in col.items():
            assert abs(value - standard_closed_form(2, mf, math.pi / 2, 0.0)) < 1e-12
        assert [float(r["prob"]) for r in rows if r["m_i"] == "2"] == pytest.approx([1 / 16, 1 / 4, 3 / 8, 1 / 4, 1 / 16])

    def test_unitarity_check_line(self, capsys):
        code, out, _ = run(capsys, "table", "--j", "2", "--convention", "paper", "--from", "30d", "40d", "--to", "10d", "70d")
        assert code == 0
        last = out.strip().splitlines()[-1]
        assert last.startswith("unitarity: max|U^dagger U - I| = ") and "(ok, tol 1e-12)" in last

    def test_json_round_trip(self, capsys):
        a, c = Direction(0.7, 1.9), Direction(2.3, 5.1)
        code, out, _ = run(capsys, "table", "--j", "5/2", "--from", "0.7", "1.9", "--to", "2.3", "5.1", "--format", "json")
        doc = json.loads(out)
        expected = general_table("5/2", a, c).entries
        assert np.max(np.abs(load_matrix(doc["amplitudes"]) - expected)) < 1e-12
        assert np.max(np.abs(np.array(doc["probabilities"]) - np.abs(expected) ** 2)) < 1e-12

    def test_degrees_flag_equals_suffix(self, capsys):
        _, flag, _ = run(capsys, "table", "--j", "2", "--degrees", "--from", "30", "40", "--to", "10", "70")
        _, suffix, _ = run(capsys, "table", "--j", "2", "--from", "30d", "40d", "--to", "10d", "70d")
        assert flag == suffix

    def test_paper_convention_needs_spin_two(self, capsys):
        code, out, err = run(capsys, "table", "--j", "1", "--convention", "paper")
        assert code == 2 and out == "" and "j=2" in err

    def test_paper_json_matches_engine(self, capsys):
        code, out, _ = run(capsys, "table", "--j", "2", "--from", "1", "2", "--to", "0.5", "4",
                           "--convention", "paper", "--format", "json")
        got = load_matrix(json.loads(out)["amplitudes"])
        assert np.max(np.abs(got - general_table(2, Direction(1, 2), Direction(0.5, 4), PAPER).entries)) < 1e-12


class TestVerify:
    def test_json_report(self, capsys):
        code, out, _ = run(capsys, "verify", "--samples", "1000", "--format", "json")
        records = json.loads(out)
        assert code == 1  # the published set contains suspected typos
        assert len(records) == 50
        standard = [r for r in records if int(r["equation_id"][2:]) <= 34]
        assert len(standard) == 25 and all(r["verdict"] == "confirmed" for r in standard)

    def test_defaults(self, capsys):
        _, default, _ = run(capsys, "verify", "--format", "json")
        _, explicit, _ = run(capsys, "verify", "--format", "json", "--samples", "1000", "--seed", "0xC0FFEE")
        assert default == explicit

    def test_single_sample_deterministic(self, capsys):
        first = run(capsys, "verify", "--samples", "1")
        second = run(capsys, "verify", "--samples", "1")
        assert first == second
        assert "5 angle tuples per form" in first[1]

    def test_csv(self, capsys):
        _, out, _ = run(capsys, "verify", "--samples", "10", "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 50 and rows[0]["verdict"] == "suspected-typo"

    @pytest.mark.parametrize("argv", [["--samples", "0"], ["--seed", "-1"], ["--seed", "zz"], ["--tolerance", "0"],
                                      ["--format", "xml"]])
    def test_bad_flags(self, capsys, argv):
        code, out, _ = run(capsys, "verify", *argv)
        assert code == 2 and out == ""


class TestSimulate:
    def test_z_to_x(self, capsys, chain_file):
        code, out, _ = run(capsys, "simulate", chain_file("z_to_x"), "--format", "json")
        doc = json.loads(out)
        assert code == 0 and doc["samples"] == 1_000_000 and doc["seed"] == 0xC0FFEE
        freqs = [row["frequency"] for row in doc["outcomes"]]
        assert freqs == pytest.approx([1 / 16, 1 / 4, 3 / 8, 1 / 4, 1 / 16], abs=3e-3)
        assert doc["flags"] == 0

    def test_byte_identical(self, capsys, chain_file):
        path = chain_file("z_x_select_z")
        first = run(capsys, "simulate", path, "--samples", "200000", "--format", "json")
        second = run(capsys, "simulate", path, "--samples", "200000", "--format", "json", "--workers", "4")
        assert first == second

    def test_pretty_and_csv(self, capsys, chain_file):
        path = chain_file("z_x_select_z")
        code, out, _ = run(capsys, "simulate", path, "--samples", "10000")
        assert code == 0 and "discarded by select:" in out
        code, out, _ = run(capsys, "simulate", path, "--samples", "10000", "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert rows[-1]["outcome"] == "discarded"

    def test_degrees(self, capsys, chain_file):
        doc = {"spin": 2, "prepare": {"theta": 0, "phi": 0, "m": 2}, "stages": [{"theta": 90, "phi": 0}]}
        _, deg, _ = run(capsys, "simulate", chain_file(doc), "--degrees", "--samples", "1000", "--format", "json")
        _, rad, _ = run(capsys, "simulate", chain_file("z_to_x", "rad.json"), "--samples", "1000", "--format", "json")
        assert json.loads(deg)["outcomes"] == json.loads(rad)["outcomes"]

    @pytest.mark.parametrize("doc, field", [
        ({"spin": 2, "prepare": {"theta": 0, "m": 5}, "stages": [{"theta": 0}]}, "prepare.m"),
        ({"spin": 2, "prepare": {"theta": 0, "m": 2}, "stages": [{"theta": 0, "select": "a"}]}, "stages[0].select"),
        ({"spin": 2, "prepare": {"theta": 0, "m": 2}}, "stages"),
    ])
    def test_malformed_names_field(self, capsys, chain_file, doc, field):
        code, out, err = run(capsys, "simulate", chain_file(doc))
        assert code == 2 and out == "" and f"field {field}" in err

    def test_missing_and_invalid_file(self, capsys, tmp_path):
        code, out, _ = run(capsys, "simulate", str(tmp_path / "nope.json"))
        assert code == 2 and out == ""
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        code, out, err = run(capsys, "simulate", str(bad))
        assert code == 2 and out == "" and "not valid JSON" in err

    def test_zero_samples(self, capsys, chain_file):
        code, out, _ = run(capsys, "simulate", chain_file("z_to_x"), "--samples", "0")
        assert code == 2 and out == ""


class TestConfig:
    def test_config_defaults_and_flags_win(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"format": "csv", "verify": {"samples": 5}}))
        code, out, _ = run(capsys, "--config", str(cfg), "verify")
        assert out.startswith("equation_id,")
        code, out, _ = run(capsys, "--config", str(cfg), "verify", "--format", "json", "--samples", "2")
        assert json.loads(out)[0]["equation_id"]
        _, reference, _ = run(capsys, "verify", "--format", "json", "--samples", "2")
        assert out == reference

    @pytest.mark.parametrize("content", ["[1]", "{", json.dumps({"verify": {"bogus": 1}}), json.dumps({"x": 1})])
    def test_bad_config(self, capsys, tmp_path, content):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(content)
        code, out, err = run(capsys, "--config", str(cfg), "operators", "--j", "2")
        assert code == 2 and out == "" and "--config" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spinamp", "operators", "--j", "0.3"], capture_output=True, text=True)
    assert proc.returncode == 2 and proc.stdout == "" and "error" in proc.stderr
