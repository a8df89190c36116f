import json

import pytest

from qss.cli import main, resolve_preset
from qss.errors import PresetInfeasible


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestRun:
    def test_accepted_run(self, capsys):
        code, out, _ = run_cli(
            capsys, "run", "--n", "5", "--t", "3", "--secret", "4", "--seed", "1"
        )
        assert code == 0
        blob = json.loads(out)
        assert blob["transcript"]["verdict"] == "accepted"
        assert blob["transcript"]["f0"] == 4
        assert blob["version"] and blob["config"]["n"] == 5 and blob["seed"] == 1

    def test_single_player_trivial(self, capsys):
        code, out, _ = run_cli(capsys, "run", "--n", "3", "--t", "1", "--secret", "0")
        assert code == 0
        assert json.loads(out)["transcript"]["f0"] == 0

    def test_invalid_threshold_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "run", "--n", "5", "--t", "6", "--secret", "0")
        assert code == 2
        assert "error" in err

    def test_secret_out_of_range_exits_2(self, capsys):
        code, _, _ = run_cli(capsys, "run", "--n", "3", "--t", "2", "--secret", "99")
        assert code == 2

    def test_rerun_byte_identical(self, capsys, tmp_path):
        path = tmp_path / "a.json"
        contents = []
        for _ in range(2):
            code, _, _ = run_cli(
                capsys, "run", "--n", "4", "--t", "2", "--secret", "1",
                "--seed", "9", "--out", str(path),
            )
            assert code == 0
            contents.append(path.read_bytes())
        assert contents[0] == contents[1]

    def test_output_file(self, capsys, tmp_path):
        path = tmp_path / "tr.json"
        run_cli(capsys, "run", "--n", "4", "--t", "2", "--secret", "1", "--out", str(path))
        blob = json.loads(path.read_text())
        assert set(blob["transcript"]) == {
            "d", "t", "xs", "verdict", "f0", "g0", "ancilla", "shots", "seed",
        }


class TestPresetResolution:
    def test_direct_choices(self):
        assert resolve_preset(3, 3) == (7, 3, False)
        assert resolve_preset(4, 3) == (7, 3, False)

    def test_fallback_records_new_width(self):
        # No prime above 3 players fits in 2 qubits; fall back to d=5, c=3.
        assert resolve_preset(3, 2) == (5, 3, True)
        assert resolve_preset(3, 1) == (5, 3, True)
        assert resolve_preset(4, 2) == (5, 3, True)

    def test_fifteen_players_infeasible(self):
        for c in (1, 2, 3):
            with pytest.raises(PresetInfeasible):
                resolve_preset(15, c)


class TestSimulate:
    def test_preset_with_fallback(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", "--preset", "players-3", "--c", "2",
            "--shots", "256", "--seed", "5",
        )
        assert code == 0
        blob = json.loads(out)
        assert blob["resolved"] == {
            "n": 3, "t": 3, "d": 5, "c": 3, "fallback": True, "secret": 1,
        }
        assert blob["all_correct"] and blob["ancilla_all_zero"]
        assert sum(blob["histogram"].values()) == 256
        assert blob["histogram"] == {str(blob["expected"]): 256}

    def test_preset_players4_direct(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", "--preset", "players-4", "--c", "3",
            "--shots", "128", "--seed", "6",
        )
        blob = json.loads(out)
        assert code == 0
        assert blob["resolved"]["d"] == 7 and not blob["resolved"]["fallback"]
        assert blob["histogram"] == {str(blob["expected"]): 128}

    def test_players15_infeasible_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "simulate", "--preset", "players-15", "--c", "1")
        assert code == 2
        assert "qubits" in err

    def test_explicit_instance(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", "--n", "4", "--t", "2", "--d", "7",
            "--secret", "3", "--shots", "64", "--seed", "8",
        )
        blob = json.loads(out)
        assert code == 0
        assert blob["histogram"] == {"3": 64}

    def test_explicit_needs_all_three(self, capsys):
        code, _, _ = run_cli(capsys, "simulate", "--n", "4", "--shots", "8")
        assert code == 2


class TestAttack:
    def test_intercept_resend_report(self, capsys):
        code, out, _ = run_cli(
            capsys, "attack", "--attack", "intercept_resend", "--n", "4", "--t", "3",
            "--d", "5", "--shots", "400", "--seed", "3", "--hypotheses", "1", "3",
        )
        assert code == 0
        blob = json.loads(out)
        report = blob["report"]
        assert report["kind"] == "intercept_resend"
        assert sum(report["outcome_histogram"].values()) == 400
        assert report["chi2_pvalue"] > 1e-3
        assert report["leakage"] < 0.1

    def test_forgery_report(self, capsys):
        code, out, _ = run_cli(
            capsys, "attack", "--attack", "forgery", "--n", "4", "--t", "3",
            "--d", "5", "--shots", "200", "--seed", "4",
        )
        blob = json.loads(out)
        assert code == 0
        assert blob["report"]["detection_rate"] == 1.0

    def test_unknown_kind_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["attack", "--attack", "replay", "--n", "4", "--t", "3"])
        assert exc.value.code == 2

    def test_bad_hop_exits_2(self, capsys):
        code, _, _ = run_cli(
            capsys, "attack", "--attack", "intercept_resend", "--n", "4", "--t", "3",
            "--d", "5", "--hop", "7", "--shots", "4",
        )
        assert code == 2

    def test_csv_format_rejected_for_reports(self, capsys):
        code, _, err = run_cli(
            capsys, "attack", "--attack", "forgery", "--n", "4", "--t", "3",
            "--shots", "4", "--format", "csv",
        )
        assert code == 2 and "json" in err


class TestSweep:
    def test_small_sweep_all_correct(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--d-max", "7", "--t-max", "3", "--n-max", "4", "--seed", "2"
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "d,t,n,seed,verdict,f0,expected,correct"
        assert len(lines) > 1
        for line in lines[1:]:
            fields = line.split(",")
            assert fields[4] == "accepted"
            assert fields[7] == "True"
            assert int(fields[0]) > int(fields[2])  # d > n in every cell

    def test_empty_sweep_header_only(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--d-max", "1", "--t-max", "3", "--n-max", "4"
        )
        assert code == 0
        assert out == "d,t,n,seed,verdict,f0,expected,correct\r\n"

    def test_sweep_byte_identical(self, capsys, tmp_path):
        path = tmp_path / "a.csv"
        contents = []
        for _ in range(2):
            run_cli(
                capsys, "sweep", "--d-max", "5", "--t-max", "2", "--n-max", "3",
                "--seed", "11", "--out", str(path),
            )
            contents.append(path.read_bytes())
        assert contents[0] == contents[1]

    def test_sweep_json_format(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--d-max", "3", "--t-max", "2", "--n-max", "2",
            "--format", "json",
        )
        assert code == 0
        blob = json.loads(out)
        assert all(row["correct"] for row in blob["rows"])
