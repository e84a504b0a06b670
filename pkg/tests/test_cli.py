import json

import pytest

from swarmtune import load_csv
from swarmtune.cli import main


def write_config(path, out_dir, **overrides):
    raw = {
        "dataset": {
            "synthetic": {
                "n_subjects": 8,
                "windows_per_subject": 5,
                "n_features": 4,
                "n_informative": 2,
                "class_sep": 3.0,
                "seed": 4,
            }
        },
        "optimizer": "pso",
        "space": [
            {"name": "learning_rate", "kind": "continuous", "lower": 1e-3, "upper": 1e-1, "scale": "log10"},
            {"name": "hidden_units", "kind": "categorical", "choices": [8, 16]},
        ],
        "pso": {"swarm_size": 3, "iterations": 2},
        "trainer": {"epochs": 4},
        "cv": {"k": 2},
        "repeats": 2,
        "out_dir": str(out_dir),
    }
    raw.update(overrides)
    path.write_text(json.dumps(raw))
    return path


class TestTune:
    def test_runs_and_writes_outputs(self, tmp_path, capsys):
        config = write_config(tmp_path / "cfg.json", tmp_path / "run")
        code = main(["tune", "--config", str(config)])
        assert code == 0
        assert (tmp_path / "run" / "summary.json").exists()
        out = capsys.readouterr().out
        assert "best objective" in out

    def test_flag_overrides_win(self, tmp_path):
        config = write_config(tmp_path / "cfg.json", tmp_path / "a")
        code = main(
            ["tune", "--config", str(config), "--out", str(tmp_path / "b"), "--seed", "9"]
        )
        assert code == 0
        assert (tmp_path / "b" / "summary.json").exists()
        summary = json.loads((tmp_path / "b" / "summary.json").read_text())
        assert summary["config"]["master_seed"] == 9

    def test_bad_config_gives_nonzero_exit(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["tune", "--config", str(path)]) == 2
        assert "error:" in capsys.readouterr().err

    def test_missing_out_dir_fails(self, tmp_path):
        config = write_config(tmp_path / "cfg.json", tmp_path / "x")
        raw = json.loads(config.read_text())
        raw.pop("out_dir")
        config.write_text(json.dumps(raw))
        assert main(["tune", "--config", str(config)]) == 2


class TestGenerate:
    def test_emits_loadable_csv(self, tmp_path, capsys):
        out = tmp_path / "data.csv"
        code = main(
            [
                "generate",
                "--out", str(out),
                "--subjects", "6",
                "--windows", "3",
                "--features", "5",
                "--informative", "2",
                "--seed", "3",
            ]
        )
        assert code == 0
        ds = load_csv(out)
        assert ds.n_rows == 18 and ds.n_features == 5
        assert "wrote 18 rows" in capsys.readouterr().out


class TestReport:
    def test_compares_two_runs(self, tmp_path, capsys):
        cfg_a = write_config(tmp_path / "a.json", tmp_path / "ra", master_seed=1, repeats=3)
        cfg_b = write_config(tmp_path / "b.json", tmp_path / "rb", master_seed=2, repeats=3)
        assert main(["tune", "--config", str(cfg_a)]) == 0
        assert main(["tune", "--config", str(cfg_b)]) == 0
        capsys.readouterr()
        code = main(
            ["report", str(tmp_path / "ra"), str(tmp_path / "rb"), "--out", str(tmp_path / "cmp")]
        )
        assert code == 0
        out = capsys.readouterr().out
        # fixed column order: Accuracy, Precision, Recall, F1, AUC
        header = out.splitlines()[0]
        cols = header.split()
        assert cols == ["Run", "Accuracy", "Precision", "Recall", "F1", "AUC"]
        assert (tmp_path / "cmp" / "compare.json").exists()
        assert (tmp_path / "cmp" / "compare.txt").exists()

    def test_incomparable_runs_exit_nonzero(self, tmp_path, capsys):
        cfg_a = write_config(tmp_path / "a.json", tmp_path / "ra", cv={"k": 2})
        cfg_b = write_config(tmp_path / "b.json", tmp_path / "rb", cv={"k": 4})
        main(["tune", "--config", str(cfg_a)])
        main(["tune", "--config", str(cfg_b)])
        assert main(["report", str(tmp_path / "ra"), str(tmp_path / "rb")]) == 2


class TestBench:
    def test_prints_converging_trace(self, tmp_path, capsys):
        code = main(
            [
                "bench",
                "--optimizer", "pso",
                "--benchmark", "sphere",
                "--dims", "2",
                "--seed", "1",
                "--out", str(tmp_path / "bench"),
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "gen" in out and "final best value" in out
        summary = json.loads((tmp_path / "bench" / "summary.json").read_text())
        assert summary["winner"]["objective"] < 1.0
