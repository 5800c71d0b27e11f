"""CLI tests: commands, exit codes, frozen output schemas, reproducibility."""

import json
import math

import pytest

from bibalance.cli import main
from bibalance.game import Transcript

SQRT10 = math.sqrt(10.0)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSimulate:
    def test_optimal_vs_greedy(self, capsys):
        code, out, _ = run(capsys, "simulate", "--house", "optimal", "--gambler", "greedy", "--T", "10")
        assert code == 0
        summary = json.loads(out)
        assert set(summary) == {"loss", "gain"}
        assert summary["loss"] == pytest.approx(10.0 + SQRT10, rel=1e-9)

    def test_kt_vs_replay_tail_switch(self, capsys, tmp_path):
        fixture = tmp_path / "zeros_then_one.json"
        fixture.write_text(
            json.dumps({"T": 8, "gamma": 1.0, "rounds": [[0.5, 0.0]] * 7 + [[0.5, 1.0]]})
        )
        code, out, _ = run(
            capsys,
            "simulate", "--house", "kt", "--gambler", f"replay:{fixture}", "--T", "8",
        )
        assert code == 0
        assert json.loads(out)["loss"] == 16.0

    def test_proportional_fair_book_zero_gain(self, capsys):
        code, out, _ = run(
            capsys,
            "simulate", "--house", "optimal", "--gambler", "proportional",
            "--T", "10", "--gamma", "1.0",
        )
        assert code == 0
        assert json.loads(out)["gain"] == pytest.approx(0.0, abs=1e-12)

    def test_exhaustive_gambler(self, capsys):
        code, out, _ = run(
            capsys, "simulate", "--house", "uniform", "--gambler", "exhaustive", "--T", "4"
        )
        assert code == 0
        assert json.loads(out)["loss"] == 8.0

    def test_transcript_file_json(self, capsys, tmp_path):
        out_path = tmp_path / "game.json"
        code, _, _ = run(
            capsys,
            "simulate", "--house", "optimal", "--gambler", "greedy",
            "--T", "6", "--out", str(out_path),
        )
        assert code == 0
        transcript = Transcript.from_json(out_path.read_text())
        assert transcript.config.horizon == 6
        assert transcript.complete

    def test_transcript_file_csv_schema(self, capsys, tmp_path):
        out_path = tmp_path / "game.csv"
        run(
            capsys,
            "simulate", "--house", "optimal", "--gambler", "greedy",
            "--T", "5", "--out", str(out_path), "--format", "csv",
        )
        lines = out_path.read_text().strip().split("\n")
        assert lines[0] == "t,r,q,l0_cum,l1_cum"
        assert len(lines) == 6

    def test_byte_identical_reruns(self, capsys, tmp_path):
        args = [
            "simulate", "--house", "mc", "--gambler", "random:5",
            "--T", "8", "--mc-n", "64", "--seed", "11", "--format", "csv",
        ]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, *args, "--out", str(a))
        run(capsys, *args, "--out", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_protocol_error_exit_code(self, capsys, tmp_path):
        fixture = tmp_path / "bad.json"
        fixture.write_text(
            json.dumps({"T": 3, "gamma": 1.0, "rounds": [[0.5, 2.0]] * 3, "loss": [0.0, 0.0]})
        )
        code, _, err = run(
            capsys, "simulate", "--house", "uniform", "--gambler", f"replay:{fixture}", "--T", "3"
        )
        assert code == 3
        assert "protocol error" in err

    def test_unknown_house_exit_code(self, capsys):
        code, _, err = run(capsys, "simulate", "--house", "nope", "--gambler", "greedy", "--T", "3")
        assert code == 2
        assert "error" in err

    def test_decisive_only_house_vs_fractional_gambler_is_protocol_error(self, capsys):
        code, _, _ = run(
            capsys, "simulate", "--house", "kt", "--gambler", "proportional", "--T", "3"
        )
        assert code == 3

    def test_plot_written(self, capsys, tmp_path):
        out_path = tmp_path / "game.json"
        code, _, _ = run(
            capsys,
            "simulate", "--house", "optimal", "--gambler", "greedy",
            "--T", "6", "--out", str(out_path), "--plot",
        )
        assert code == 0
        assert (tmp_path / "game.png").exists()

    def test_blackwell_trace(self, capsys, tmp_path):
        trace = tmp_path / "trace.csv"
        code, _, _ = run(
            capsys,
            "simulate", "--house", "blackwell", "--gambler", "alternating",
            "--T", "64", "--trace-out", str(trace), "--plot",
        )
        assert code == 0
        lines = trace.read_text().strip().split("\n")
        assert lines[0] == "t,phi1,phi2,region,r,bound"
        assert len(lines) == 65
        assert (tmp_path / "trace.png").exists()


class TestSweep:
    def test_csv_schema_and_values(self, capsys):
        code, out, _ = run(capsys, "sweep", "--T", "4,16,64", "--house", "optimal")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "T,house,worst_loss,normalized_loss,bound"
        normalized = [float(line.split(",")[3]) for line in lines[1:]]
        assert normalized == pytest.approx([1.5, 1.25, 1.125], rel=1e-9)

    def test_uniform_column_is_two(self, capsys):
        code, out, _ = run(capsys, "sweep", "--T", "4,8", "--house", "uniform")
        assert code == 0
        for line in out.strip().split("\n")[1:]:
            assert float(line.split(",")[3]) == 2.0

    def test_blackwell_column_within_bound(self, capsys):
        code, out, _ = run(capsys, "sweep", "--T", "64,512", "--house", "blackwell")
        assert code == 0
        for line in out.strip().split("\n")[1:]:
            cells = line.split(",")
            assert float(cells[3]) <= float(cells[4]) + 1e-9

    def test_file_output_and_figure(self, capsys, tmp_path):
        out_path = tmp_path / "sweep.csv"
        code, _, _ = run(
            capsys,
            "sweep", "--T", "4,8", "--house", "optimal,uniform",
            "--out", str(out_path), "--plot",
        )
        assert code == 0
        assert out_path.exists()
        assert (tmp_path / "sweep.png").exists()

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "sweep", "--T", "4", "--house", "optimal", "--format", "json")
        assert code == 0
        rows = json.loads(out)
        assert rows[0]["T"] == 4
        assert rows[0]["worst_loss"] == pytest.approx(6.0, rel=1e-12)

    def test_output_independent_of_worker_pool(self, capsys, tmp_path, monkeypatch):
        args = ["sweep", "--T", "4,8,12", "--house", "optimal,kt,uniform"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        monkeypatch.setenv("BIBALANCE_THREADS", "1")
        run(capsys, *args, "--out", str(a))
        monkeypatch.setenv("BIBALANCE_THREADS", "4")
        run(capsys, *args, "--out", str(b))
        assert a.read_bytes() == b.read_bytes()


class TestVerify:
    def test_known_checks_pass(self, capsys):
        for name, extra in [
            ("optimal-loss", ["--T", "10"]),
            ("kt-counterexample", ["--T", "8"]),
            ("subtree-balance", ["--T", "3"]),
            ("blackwell-partition", ["--points", "5000"]),
            ("equalizer-t2", []),
            ("decisive-maximizer", []),
        ]:
            code, out, _ = run(capsys, "verify", name, *extra)
            report = json.loads(out)
            assert code == 0, name
            assert report["pass"] is True
            assert set(report) == {"check", "T", "max_abs_err", "pass"}

    def test_grid_minimax_t2(self, capsys):
        code, out, _ = run(capsys, "verify", "grid-minimax", "--T", "2", "--res", "0.002")
        assert code == 0
        assert json.loads(out)["max_abs_err"] <= 1e-2

    def test_unknown_check_usage_error(self, capsys):
        code, _, err = run(capsys, "verify", "nonsense")
        assert code == 2
        assert "unknown check" in err


class TestPlay:
    def test_full_game(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO("1\n1\n"))
        code, out, _ = run(capsys, "play", "--house", "optimal", "--T", "2")
        assert code == 0
        assert "game over" in out
        assert f"{2 + math.sqrt(2):.6f}" in out

    def test_eof_aborts_with_exit_4(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO("1\n"))
        code, _, err = run(capsys, "play", "--house", "optimal", "--T", "2")
        assert code == 4
        assert "aborted" in err


class TestCompare:
    def test_schema_and_ordering(self, capsys):
        code, out, _ = run(
            capsys, "compare", "--house", "optimal,uniform,kt", "--gambler", "greedy", "--T", "6"
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "house,loss,normalized_loss,gain"
        rows = [line.split(",") for line in lines[1:]]
        assert [r[0] for r in rows] == ["optimal", "uniform", "kt"]
        losses = {r[0]: float(r[1]) for r in rows}
        assert losses["optimal"] == pytest.approx(6 + math.sqrt(6), rel=1e-9)
        assert losses["uniform"] == 12.0
