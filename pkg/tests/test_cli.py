import csv
import json
import math
from pathlib import Path

import pytest
from click.testing import CliRunner

from qbc.cli import main

from conftest import DUMAS


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def fig6_key(tmp_path, runner):
    path = tmp_path / "key.json"
    result = runner.invoke(main, ["keygen", "--paper-fig6", "-o", str(path)])
    assert result.exit_code == 0, result.output
    return path


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.reader(handle))


def strict_rows(path):
    rows = read_csv(path)
    width = len(rows[0])
    assert all(len(row) == width for row in rows), "ragged CSV"
    return rows


class TestKeygen:
    def test_paper_fig6_angles(self, fig6_key):
        data = json.loads(fig6_key.read_text())
        assert data["angle_unit"] == "pi"
        assert data["theta1"] == [0.0, 0.15, 0.72, 0.32]
        assert data["theta2"] == [0.0, 0.45, 0.17, 1.64]

    def test_paper_supp_angles(self, tmp_path, runner):
        path = tmp_path / "key.json"
        result = runner.invoke(main, ["keygen", "--paper-supp", "-o", str(path)])
        assert result.exit_code == 0
        data = json.loads(path.read_text())
        assert data["theta1"][0] == pytest.approx(0.45 * math.pi)
        assert data["theta1"][1:] == [4.04, 1.04, 0.92]

    def test_seeded_keygen_is_deterministic(self, tmp_path, runner):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            result = runner.invoke(main, ["keygen", "--seed", "1", "-o", str(path)])
            assert result.exit_code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_generated_key_validates(self, tmp_path, runner):
        from qbc import keyfile

        path = tmp_path / "key.json"
        runner.invoke(main, ["keygen", "--seed", "3", "--mode", "sum_prev", "-o", str(path)])
        keyfile.load_key_dict(path)  # raises on schema violation

    def test_conflicting_presets_rejected(self, tmp_path, runner):
        result = runner.invoke(
            main, ["keygen", "--paper-fig6", "--paper-supp", "-o", str(tmp_path / "k.json")]
        )
        assert result.exit_code != 0


class TestTransmit:
    def test_worked_example_exits_zero(self, tmp_path, fig6_key, runner):
        out = tmp_path / "t.json"
        result = runner.invoke(
            main,
            ["transmit", "--key", str(fig6_key), "--message", DUMAS, "-o", str(out)],
        )
        assert result.exit_code == 0, result.output
        transcript = json.loads(out.read_text())
        assert transcript["mismatches"] == 0
        assert transcript["decoded_message"] == DUMAS
        assert len(transcript["blocks"]) == 107

    def test_empty_message(self, tmp_path, fig6_key, runner):
        out = tmp_path / "t.json"
        result = runner.invoke(
            main, ["transmit", "--key", str(fig6_key), "--message", "", "-o", str(out)]
        )
        assert result.exit_code == 0
        assert json.loads(out.read_text())["blocks"] == []

    def test_noise_triggers_retransmissions(self, tmp_path, fig6_key, runner):
        # At this fidelity the checks fire on nearly every seed; residual
        # mismatches usually survive them, so the exit code reports failure.
        out = tmp_path / "t.json"
        result = runner.invoke(
            main,
            [
                "transmit",
                "--key",
                str(fig6_key),
                "--message",
                "Wait and hope. Chap 117.",
                "--fidelity",
                "0.9",
                "--seed",
                "1",
                "-o",
                str(out),
            ],
        )
        transcript = json.loads(out.read_text())
        assert transcript["retransmissions"] > 0
        assert result.exit_code == (0 if transcript["mismatches"] == 0 else 1)

    def test_gentle_noise_converges_exactly(self, tmp_path, fig6_key, runner):
        # Pinned seed: one window check fired, the resend fixed it.
        out = tmp_path / "t.json"
        result = runner.invoke(
            main,
            [
                "transmit", "--key", str(fig6_key),
                "--message", "Wait and hope. Chap 117.",
                "--fidelity", "0.995", "--seed", "0", "-o", str(out),
            ],
        )
        transcript = json.loads(out.read_text())
        assert transcript["retransmissions"] > 0
        assert transcript["mismatches"] == 0
        assert result.exit_code == 0

    def test_message_source_is_exclusive(self, fig6_key, runner):
        result = runner.invoke(main, ["transmit", "--key", str(fig6_key)])
        assert result.exit_code != 0

    def test_missing_key_is_usage_error(self, runner):
        result = runner.invoke(
            main, ["transmit", "--key", "no-such-key.json", "--message", "Hi"]
        )
        assert result.exit_code == 2


class TestAttack:
    def test_histogram_csv(self, tmp_path, fig6_key, runner):
        out = tmp_path / "hist.csv"
        records = tmp_path / "records.csv"
        result = runner.invoke(
            main,
            [
                "attack", "--key", str(fig6_key), "--message", "Wait and hope.",
                "--runs", "30", "--seed", "7",
                "-o", str(out), "--records-out", str(records),
            ],
        )
        assert result.exit_code == 0, result.output
        rows = strict_rows(out)
        assert rows[0] == ["errors", "count"]
        assert sum(int(r[1]) for r in rows[1:]) == 30
        raw = strict_rows(records)
        assert raw[0] == ["run", "errors"]
        assert len(raw) == 31

    def test_zero_runs_is_usage_error(self, fig6_key, runner):
        result = runner.invoke(
            main,
            ["attack", "--key", str(fig6_key), "--message", "Hi", "--runs", "0"],
        )
        assert result.exit_code == 2

    def test_byte_reproducible(self, tmp_path, fig6_key, runner):
        outputs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            runner.invoke(
                main,
                [
                    "attack", "--key", str(fig6_key), "--message", "Wait and hope.",
                    "--runs", "25", "--seed", "3", "-o", str(out),
                ],
            )
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]

    def test_jobs_do_not_change_output(self, tmp_path, fig6_key, runner):
        outputs = []
        for name, jobs in (("a.csv", "1"), ("b.csv", "2")):
            out = tmp_path / name
            result = runner.invoke(
                main,
                [
                    "attack", "--key", str(fig6_key), "--message", "Wait and hope.",
                    "--runs", "24", "--seed", "5", "--jobs", jobs, "-o", str(out),
                ],
            )
            assert result.exit_code == 0, result.output
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]


class TestMatchrate:
    def test_rows_per_strategy(self, tmp_path, runner):
        key = tmp_path / "key.json"
        runner.invoke(main, ["keygen", "--paper-supp", "--mode", "parity", "-o", str(key)])
        out = tmp_path / "mr.csv"
        result = runner.invoke(
            main,
            [
                "matchrate", "--key", str(key), "--strategies", "Z2,B2",
                "--max-bits", "12", "--trials", "10", "--seed", "2", "-o", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        rows = strict_rows(out)
        assert rows[0] == ["strategy", "n_bits", "correct_rate"]
        assert len(rows) == 1 + 2 * 13
        assert {r[0] for r in rows[1:]} == {"Z2", "B2"}

    def test_unknown_strategy_rejected(self, tmp_path, fig6_key, runner):
        result = runner.invoke(
            main,
            ["matchrate", "--key", str(fig6_key), "--strategies", "Z2,BAD"],
        )
        assert result.exit_code == 2


class TestSweep:
    def test_row_count_and_determinism(self, tmp_path, fig6_key, runner):
        args = [
            "sweep", "--key", str(fig6_key), "--mode", "sum_prev",
            "--min-length", "10", "--max-length", "30", "--step", "10",
            "--x", "0.25", "--x", "0.5", "--runs", "8", "--seed", "1",
        ]
        outputs = []
        for name in ("s1.csv", "s2.csv"):
            out = tmp_path / name
            result = runner.invoke(main, args + ["-o", str(out)])
            assert result.exit_code == 0, result.output
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
        rows = strict_rows(tmp_path / "s1.csv")
        assert rows[0] == ["length", "avg_err_rate", "p_x", "x"]
        assert len(rows) == 1 + 3 * 2


class TestDiscriminate:
    def test_csv_schema(self, tmp_path, fig6_key, runner):
        out = tmp_path / "d.csv"
        result = runner.invoke(
            main,
            [
                "discriminate", "--key", str(fig6_key), "--n-qubits", "2",
                "--m", "0", "--m", "1", "--trials", "50", "--seed", "2", "-o", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        rows = strict_rows(out)
        assert rows[0] == [
            "m", "true_label", "trials", "correct", "incorrect", "inconclusive", "analytic_p",
        ]
        assert len(rows) == 3
        for row in rows[1:]:
            assert int(row[3]) + int(row[4]) + int(row[5]) == 50

    def test_six_qubit_instance(self, tmp_path, fig6_key, runner):
        out = tmp_path / "d6.csv"
        result = runner.invoke(
            main,
            [
                "discriminate", "--key", str(fig6_key), "--m", "0",
                "--trials", "20", "-o", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        rows = strict_rows(out)
        assert float(rows[1][6]) == pytest.approx(0.9665965075887119, abs=1e-9)

    def test_out_of_range_m_rejected(self, tmp_path, fig6_key, runner):
        result = runner.invoke(
            main,
            ["discriminate", "--key", str(fig6_key), "--n-qubits", "2", "--m", "9"],
        )
        assert result.exit_code == 2


class TestOptimize:
    def test_output_row(self, tmp_path, runner):
        key = tmp_path / "key.json"
        runner.invoke(main, ["keygen", "--paper-supp", "-o", str(key)])
        out = tmp_path / "opt.csv"
        result = runner.invoke(
            main, ["optimize", "--key", str(key), "--grid", "16", "-o", str(out)]
        )
        assert result.exit_code == 0, result.output
        rows = strict_rows(out)
        assert rows[0] == ["m1_alpha", "m1_beta", "m2_alpha", "m2_beta", "g", "f_zz"]
        assert len(rows) == 2
        assert float(rows[1][4]) >= float(rows[1][5])

    def test_byte_reproducible(self, tmp_path, runner):
        key = tmp_path / "key.json"
        runner.invoke(main, ["keygen", "--paper-fig6", "-o", str(key)])
        outputs = []
        for name in ("o1.csv", "o2.csv"):
            out = tmp_path / name
            runner.invoke(main, ["optimize", "--key", str(key), "--grid", "8", "-o", str(out)])
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
