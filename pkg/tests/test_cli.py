"""End-to-end command-line behaviour via ``main``."""

from __future__ import annotations

import json

import pytest

import iimnet.cli as cli
from iimnet import CaseClass, GenConfig, IntegrityError, generate, serialize_network, simulate
from iimnet.cli import main

from conftest import DEMO_IDR, ids


@pytest.fixture
def demo_file(tmp_path):
    path = tmp_path / "demo.idr"
    path.write_text(DEMO_IDR, encoding="utf-8")
    return str(path)


class TestSimulate:
    def test_grid_and_summary(self, demo_file, capsys):
        assert main(["simulate", demo_file, "--attack", "a2,b3"]) == 0
        out = capsys.readouterr().out
        assert "entity  t0  t1  t2  t3  t4" in out
        assert "a1      0   0   1   1   1" in out
        assert "failed 7/7: a1 a2 a3 a4 b1 b2 b3" in out
        assert "fixed point: t=4" in out

    def test_no_attack(self, demo_file, capsys):
        assert main(["simulate", demo_file]) == 0
        out = capsys.readouterr().out
        assert "failed 0/7:" in out
        assert "fixed point: t=0" in out

    def test_hardening_option(self, demo_file, capsys):
        assert main(["simulate", demo_file, "--attack", "a2,b3", "--harden", "a2"]) == 0
        out = capsys.readouterr().out
        assert "failed 1/7: b3" in out
        assert "a2      *" in out

    def test_horizon_pads_grid(self, demo_file, capsys):
        assert main(["simulate", demo_file, "--attack", "a2,b3", "--horizon", "6"]) == 0
        out = capsys.readouterr().out
        assert "entity  t0  t1  t2  t3  t4  t5  t6" in out

    def test_csv_output(self, demo_file, tmp_path, capsys, demo, demo_attack):
        csv_path = tmp_path / "grid.csv"
        assert main(["simulate", demo_file, "--attack", "a2,b3", "--csv", str(csv_path)]) == 0
        assert f"wrote {csv_path}" in capsys.readouterr().out
        assert csv_path.read_text() == simulate(demo, demo_attack).to_csv()

    def test_unknown_entity_exits_2(self, demo_file, capsys):
        assert main(["simulate", demo_file, "--attack", "a9"]) == 2
        assert capsys.readouterr().err.startswith("error: unknown entity")

    def test_missing_file_exits_2(self, tmp_path, capsys):
        assert main(["simulate", str(tmp_path / "nope.idr")]) == 2
        assert "error: cannot read" in capsys.readouterr().err


class TestHarden:
    def test_greedy_json(self, demo_file, capsys):
        assert main(["harden", demo_file, "--attack", "a2,b3", "--k", "1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload == {
            "attacked": ["a2", "b3"],
            "method": "greedy",
            "hardened": ["a2"],
            "objective": 1,
            "final_failed": ["b3"],
            "fixed_point_step": 0,
        }

    def test_auto_attack_with_exact_method(self, demo_file, capsys):
        rc = main(["harden", demo_file, "--auto-K", "2", "--k", "1", "--method", "exact"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["attacked"] == ["a2", "b3"]
        assert payload["hardened"] == ["a2"]
        assert payload["objective"] == 1
        assert payload["method"] == "exact"

    def test_case1_method_rejects_general_network(self, demo_file, capsys):
        rc = main(["harden", demo_file, "--attack", "a2,b3", "--k", "1", "--method", "case1"])
        assert rc == 2
        assert capsys.readouterr().err.startswith("error:")

    def test_budget_exhaustion_exits_3(self, demo_file, capsys):
        rc = main(["harden", demo_file, "--attack", "a2,b3", "--k", "1",
                   "--method", "exact", "--budget", "1"])
        assert rc == 3
        assert "budget" in capsys.readouterr().err

    def test_auto_attack_budget_exits_3(self, demo_file, capsys):
        rc = main(["harden", demo_file, "--auto-K", "2", "--k", "1", "--budget", "10"])
        assert rc == 3

    def test_attack_and_auto_are_exclusive(self, demo_file, capsys):
        with pytest.raises(SystemExit) as err:
            main(["harden", demo_file, "--attack", "a2", "--auto-K", "2", "--k", "1"])
        assert err.value.code == 2

    def test_k_required(self, demo_file):
        with pytest.raises(SystemExit) as err:
            main(["harden", demo_file, "--attack", "a2"])
        assert err.value.code == 2


class TestExportLp:
    def test_stdout_matches_library(self, demo_file, capsys, demo, demo_attack):
        from iimnet import build_model, write_lp

        assert main(["export-lp", demo_file, "--attack", "a2,b3", "--k", "1"]) == 0
        assert capsys.readouterr().out == write_lp(build_model(demo, demo_attack, 1))

    def test_file_output_and_summary(self, demo_file, tmp_path, capsys):
        out = tmp_path / "model.lp"
        assert main(["export-lp", demo_file, "--attack", "a2,b3", "--k", "1",
                     "--out", str(out)]) == 0
        line = capsys.readouterr().out
        assert f"wrote {out}: 62 binaries, 146 constraints, horizon 6" in line
        assert out.read_text().startswith("Minimize\n")


class TestGen:
    def test_written_file_matches_library(self, tmp_path, capsys):
        out = tmp_path / "net.idr"
        rc = main(["gen", "--case", "I", "--na", "5", "--nb", "5", "--seed", "3",
                   "--out", str(out)])
        assert rc == 0
        assert "wrote" in capsys.readouterr().out
        want = generate(GenConfig(case=CaseClass.CASE_I, n_a=5, n_b=5, seed=3))
        assert out.read_text() == serialize_network(want)

    def test_stdout_is_deterministic(self, capsys):
        args = ["gen", "--case", "IV", "--na", "4", "--nb", "4", "--seed", "9"]
        assert main(args) == 0
        first = capsys.readouterr().out
        assert main(args) == 0
        assert capsys.readouterr().out == first

    def test_infeasible_shape_exits_2(self, capsys):
        rc = main(["gen", "--case", "IV", "--na", "6", "--nb", "2",
                   "--max-minterm-size", "3"])
        assert rc == 2
        assert "error:" in capsys.readouterr().err


class TestExperiment:
    ARGS = ["experiment", "--cases", "I", "--sizes", "8", "--K", "3",
            "--k-list", "1,2", "--seed-list", "0,1"]

    def test_outputs_and_summary(self, tmp_path, capsys):
        out = tmp_path / "results.csv"
        assert main(self.ARGS + ["--out", str(out)]) == 0
        text = capsys.readouterr().out
        assert "rows: 4 ok, 0 failed" in text
        assert "mean gap ratio:" in text
        assert out.exists()
        assert (tmp_path / "results_timings.csv").exists()
        assert (tmp_path / "results_plotdata.csv").exists()
        assert (tmp_path / "results_caseI_n8.png").exists()

    def test_no_figures(self, tmp_path, capsys):
        out = tmp_path / "results.csv"
        assert main(self.ARGS + ["--no-figures", "--out", str(out)]) == 0
        capsys.readouterr()
        assert not list(tmp_path.glob("*.png"))

    def test_payload_bytes_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(self.ARGS + ["--no-figures", "--out", str(a)]) == 0
        assert main(self.ARGS + ["--no-figures", "--out", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_all_rows_failing_exits_1(self, tmp_path, capsys):
        out = tmp_path / "results.csv"
        rc = main(self.ARGS + ["--budget", "0", "--no-figures", "--out", str(out)])
        assert rc == 1
        assert "0 ok" in capsys.readouterr().out

    def test_empty_seed_list_exits_2(self, tmp_path, capsys):
        rc = main(["experiment", "--seeds", "0", "--out", str(tmp_path / "r.csv")])
        assert rc == 2
        assert "at least one seed" in capsys.readouterr().err


class TestDispatch:
    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as err:
            main(["frobnicate"])
        assert err.value.code == 2

    def test_integrity_error_exits_4(self, demo_file, monkeypatch, capsys):
        def boom(args):
            raise IntegrityError("states diverged")

        monkeypatch.setattr(cli, "cmd_simulate", boom)
        assert main(["simulate", demo_file]) == 4
        assert "error: states diverged" in capsys.readouterr().err

    def test_ids_parser_accepts_commas_and_spaces(self):
        assert frozenset(cli._parse_ids("a1, b2  a3")) == ids("a1", "b2", "a3")
        assert cli._parse_ids("") == []
