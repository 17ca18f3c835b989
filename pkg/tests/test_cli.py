import csv
import io
import json
import subprocess
import sys

import pytest

from keyrecycle.cli import EXIT_CAP, EXIT_INVALID, EXIT_OK, fmt_rational, main
from keyrecycle.ptc import load_family


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    assert code == EXIT_OK
    return json.loads(out)


class TestFormatting:
    def test_rational(self):
        assert fmt_rational("7/15") == "7/15 (≈ 0.466667)"
        assert fmt_rational(2) == "2 (≈ 2)"


class TestPtc:
    def test_verify_text(self, capsys):
        code, out, _ = run(capsys, "ptc-verify", "-m", "1", "-n", "1")
        assert code == EXIT_OK
        assert "eps_strong: 7/15" in out
        assert "status: PASS" in out

    def test_verify_json(self, capsys, chau12):
        rep = run_json(capsys, "ptc-verify")
        assert rep["summary"]["eps_strong"] == "5/21"
        assert rep["summary"]["eps_weak"] == "4/21"
        assert rep["summary"]["keys"] == len(chau12)

    def test_random_family(self, capsys):
        rep = run_json(capsys, "ptc-verify", "--family", "random:500", "--seed", "0")
        assert rep["summary"]["eps_strong"] == "139/500"
        assert rep["summary"]["status"] == "FAIL"

    def test_export_round_trip(self, capsys, tmp_path):
        path = tmp_path / "fam.txt"
        code, _, _ = run(capsys, "ptc-export", "-n", "1", "--out", str(path))
        assert code == EXIT_OK
        assert len(load_family(path)) == 60
        rep = run_json(capsys, "ptc-verify", "-n", "1", "--family", f"file:{path}")
        assert rep["summary"]["eps_strong"] == "7/15"

    def test_export_needs_out(self, capsys):
        assert run(capsys, "ptc-export")[0] == EXIT_INVALID

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "ptc-verify", "--family", f"file:{tmp_path / 'none'}")
        assert code == EXIT_INVALID and err

    def test_bad_file(self, capsys, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("hello\n")
        assert run(capsys, "ptc-verify", "--family", f"file:{path}")[0] == EXIT_INVALID

    def test_cap(self, capsys):
        assert run(capsys, "ptc-verify", "-m", "4", "-n", "4")[0] == EXIT_CAP

    @pytest.mark.parametrize("family", ["bogus", "random:x"])
    def test_bad_family(self, capsys, family):
        assert run(capsys, "ptc-verify", "--family", family)[0] == EXIT_INVALID

    def test_bad_dimensions(self, capsys):
        assert run(capsys, "ptc-verify", "-m", "0")[0] == EXIT_INVALID

    def test_argparse_errors_exit_one(self):
        with pytest.raises(SystemExit) as exc:
            main(["nonsense"])
        assert exc.value.code == EXIT_INVALID


class TestBounds:
    def test_rows(self, capsys):
        rep = run_json(capsys, "bounds", "-m", "4", "-n", "8", "--eta", "8")
        s = rep["summary"]
        assert s["chau"] == pytest.approx(2**-4 + 2**-9)
        assert s["mac_error"] == pytest.approx(2**-4)
        rows = {r["construction"]: r for r in rep["rows"]}
        assert rows["chau/composed"]["key"] == 92
        assert rows["chau/composed"]["recycled_reject"] == 60
        assert rows["bcgst/etc"]["key"] == 2 * 4 + 2 * 8

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "bounds", "--format", "csv")
        assert code == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 6
        assert {"construction", "key", "error"} <= set(rows[0])

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "b.json"
        code, out, _ = run(capsys, "bounds", "--format", "json", "--out", str(path))
        assert code == EXIT_OK
        assert json.loads(path.read_text()) == json.loads(out)


class TestCompose:
    def test_reject_loss(self, capsys):
        rep = run_json(capsys, "compose", "-m", "1", "-n", "2")
        assert rep["summary"]["net_loss_reject"] == 2 * 1 + 3 * 2
        assert rep["summary"]["net_loss_accept"] == 0

    def test_presets_only(self, capsys):
        assert run(capsys, "compose", "--family", "random:10")[0] == EXIT_INVALID


class TestSimulate:
    def test_identity(self, capsys, tmp_path):
        path = tmp_path / "t.jsonl"
        rep = run_json(capsys, "simulate", "-n", "1", "--trials", "3", "--transcript", str(path))
        s = rep["summary"]
        assert s["accept_probability"] == pytest.approx(1)
        assert s["sampled_accepts"] == 3
        assert s["advantage"] == pytest.approx(0, abs=1e-9)
        events = [json.loads(line) for line in path.read_text().splitlines()]
        assert {e["trial"] for e in events} == {0, 1, 2}

    @pytest.mark.parametrize(
        "kind", ["impersonation", "impersonation-then-message", "pauli:XX", "epr:IZ"]
    )
    def test_attacks_within_bound(self, capsys, kind):
        rep = run_json(capsys, "simulate", "-n", "1", "--kind", kind, "--trials", "0")
        assert rep["summary"]["status"] == "PASS"

    def test_no_recycle(self, capsys):
        rep = run_json(capsys, "simulate", "-n", "1", "--kind", "pauli:IZ", "--no-recycle", "--trials", "0")
        assert rep["summary"]["bound"] == pytest.approx(0.5)
        assert rep["summary"]["status"] == "PASS"

    @pytest.mark.parametrize("kind", ["pauli:XXX", "pauli:Q", "warp"])
    def test_bad_kind(self, capsys, kind):
        assert run(capsys, "simulate", "-n", "1", "--kind", kind)[0] == EXIT_INVALID

    def test_transcripts_reproducible(self, capsys, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        for path in (a, b):
            run(capsys, "simulate", "-n", "1", "--variant", "etc", "--trials", "2", "--seed", "9", "--transcript", str(path))
        assert a.read_text() == b.read_text()


class TestAttack:
    def test_key_extraction(self, capsys):
        code, out, _ = run(capsys, "attack", "--kind", "key-extraction", "-n", "1")
        assert code == EXIT_OK
        assert "recovered 60/60 keys, success 1.0" in out

    def test_key_extraction_withheld(self, capsys):
        rep = run_json(capsys, "attack", "--kind", "key-extraction", "-n", "1", "--withhold")
        assert rep["summary"]["success"] < 1
        assert len(rep["rows"]) == 60

    @pytest.mark.parametrize("fake,accept", [("antisymmetric", 0.25), ("mixed", 0.25)])
    def test_impersonation(self, capsys, fake, accept):
        rep = run_json(capsys, "attack", "--kind", "impersonation", "--fake", fake)
        assert rep["summary"]["accept"] == pytest.approx(accept)

    def test_bad_fake(self, capsys):
        assert run(capsys, "attack", "--kind", "impersonation", "--fake", "ghost")[0] == EXIT_INVALID

    def test_substitution_identity_family(self, capsys):
        rep = run_json(capsys, "attack", "--kind", "substitution", "-n", "1", "--family", "identity")
        assert rep["summary"]["success"] == "1/1"

    def test_battery(self, capsys):
        rep = run_json(capsys, "attack", "--kind", "battery", "-n", "1")
        assert rep["summary"]["status"] == "PASS"
        assert len(rep["rows"]) == rep["summary"]["strategies"]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "keyrecycle", "compose", "-m", "4", "-n", "8", "--format", "json"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["summary"]["initial_key"] == 92
