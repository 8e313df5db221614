import json

import numpy as np
import pytest
import yaml

from tsnn import cli, dataio
from tsnn.config import ConfigError, PipelineConfig, load_config
from tsnn.dataio import FlowDataset, SyntheticSpec


def synth_csv(path, **kwargs):
    spec = dict(n_rows=600, n_features=10, informative_indices=(0, 3), class_ratio=5.0, effect_size=0.8, seed=1)
    spec.update(kwargs)
    dataio.write_csv(dataio.generate_synthetic(SyntheticSpec(**spec)), path)
    return path


def read_rows(path):
    return path.read_text().splitlines()


@pytest.fixture(scope="module")
def pipeline_run(tmp_path_factory):
    root = tmp_path_factory.mktemp("pipe")
    data = synth_csv(root / "flows.csv", n_rows=900)
    out = root / "out"
    code = cli.main(["pipeline", "--input", str(data), "--top-k", "2", "--epochs", "60",
                     "--tsi-samples", "1024", "--seed", "3", "--out", str(out)])
    assert code == 0
    return data, out


class TestSynth:
    def test_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "s.csv"
        assert cli.main(["synth", "--rows", "600", "--informative", "1,4", "--seed", "2", "--out", str(out)]) == 0
        ds = dataio.load_csv(out)
        assert ds.class_counts() == (500, 100)
        assert "500 benign, 100 DDoS" in capsys.readouterr().out

    def test_bad_spec_is_stage_tagged(self, tmp_path, capsys):
        assert cli.main(["synth", "--informative", "12", "--out", str(tmp_path / "s.csv")]) == 1
        assert "[synth]" in capsys.readouterr().err


class TestSelect:
    def test_recovers_informative_columns(self, tmp_path):
        data = synth_csv(tmp_path / "flows.csv")
        out = tmp_path / "sel"
        assert cli.main(["select", "--input", str(data), "--out", str(out), "--top-k", "3"]) == 0
        rows = read_rows(out / "ranking.csv")
        assert rows[0] == "rank,TSI,feature"
        assert {rows[1].split(",")[2], rows[2].split(",")[2]} == {"f0", "f3"}
        assert len(rows) == 4
        raw = json.loads((out / "sensitivity.json").read_text())
        assert len(raw["tsi"]) == 10 and raw["n"] == 4096 and not raw["degenerate"]
        assert (out / "config.yaml").exists()

    def test_all_benign_is_degenerate_not_fatal(self, tmp_path, caplog):
        rng = np.random.default_rng(0)
        ds = FlowDataset(rng.random((50, 4)), np.zeros(50), ("a", "b", "c", "d"))
        dataio.write_csv(ds, tmp_path / "benign.csv")
        out = tmp_path / "sel"
        with caplog.at_level("WARNING"):
            assert cli.main(["select", "--input", str(tmp_path / "benign.csv"), "--top-k", "4",
                             "--tsi-samples", "256", "--out", str(out)]) == 0
        assert "no variance" in caplog.text
        raw = json.loads((out / "sensitivity.json").read_text())
        assert raw["degenerate"] and raw["tsi"] == [0.0] * 4
        assert all(r.split(",")[1] == "0.0000" for r in read_rows(out / "ranking.csv")[1:])

    def test_sixty_three_features_top_ten(self, tmp_path):
        data = synth_csv(tmp_path / "wide.csv", n_rows=300, n_features=63, informative_indices=(5, 40))
        out = tmp_path / "sel"
        assert cli.main(["select", "--input", str(data), "--tsi-samples", "256", "--out", str(out)]) == 0
        assert len(read_rows(out / "ranking.csv")) == 11
        assert len(json.loads((out / "ranking.json").read_text())) == 10

    def test_top_k_too_large(self, tmp_path, capsys):
        data = synth_csv(tmp_path / "flows.csv", n_rows=60)
        assert cli.main(["select", "--input", str(data), "--top-k", "11", "--out", str(tmp_path / "o")]) == 1
        assert "[select]" in capsys.readouterr().err

    def test_missing_input_names_stage(self, tmp_path, capsys):
        assert cli.main(["select", "--input", str(tmp_path / "none.csv"), "--out", str(tmp_path / "o")]) == 1
        err = capsys.readouterr().err
        assert err.startswith("error: [ingest]") and "no such file" in err


class TestPipeline:
    def test_report_shape(self, pipeline_run):
        _, out = pipeline_run
        rows = json.loads((out / "evaluation.json").read_text())
        assert [(r["algorithm"], r["n_features"]) for r in rows] == [("TSNN", 2), ("SVM", 10), ("LR", 10)]
        for r in rows:
            assert all(0.0 <= r[m] <= 1.0 for m in ("accuracy", "precision", "recall"))
        assert read_rows(out / "evaluation.csv")[0] == "algorithm,n_features,accuracy,precision,recall,precision_undefined"
        for name in ("tsnn_model.json", "lr_model.json", "svm_model.json", "test.csv", "config.yaml"):
            assert (out / name).exists()

    def test_rerun_from_saved_config_is_byte_identical(self, pipeline_run, tmp_path):
        _, out = pipeline_run
        again = tmp_path / "again"
        assert cli.main(["pipeline", "--config", str(out / "config.yaml"), "--out", str(again)]) == 0
        for name in ("ranking.csv", "ranking.json", "sensitivity.json", "evaluation.csv",
                     "evaluation.json", "tsnn_model.json", "lr_model.json", "svm_model.json", "test.csv"):
            assert (again / name).read_bytes() == (out / name).read_bytes(), name
        saved = yaml.safe_load((again / "config.yaml").read_text())
        assert saved["seed"] == 3 and saved["out"] == str(again)

    def test_synthetic_mode_without_input(self, tmp_path):
        out = tmp_path / "o"
        cfg = PipelineConfig(synthetic_rows=300, top_k=2, tsi_samples=256, epochs=20, out=str(out))
        rows = cli.cmd_pipeline(cfg)
        assert [r.algorithm for r in rows] == ["TSNN", "SVM", "LR"]
        assert load_config(out / "config.yaml") == cfg


class TestEvaluate:
    def test_saved_model_matches_pipeline(self, pipeline_run, tmp_path):
        _, out = pipeline_run
        row = cli.cmd_evaluate(out / "tsnn_model.json", out / "test.csv", out=tmp_path / "ev", name="TSNN")
        in_pipeline = json.loads((out / "evaluation.json").read_text())[0]
        assert (row.accuracy, row.precision, row.recall) == (
            in_pipeline["accuracy"], in_pipeline["precision"], in_pipeline["recall"])
        assert (tmp_path / "ev" / "evaluation.json").exists()

    def test_name_flag(self, pipeline_run, tmp_path):
        _, out = pipeline_run
        argv = ["evaluate", "--model", str(out / "tsnn_model.json"), "--input", str(out / "test.csv"),
                "--name", "TSNN", "--out", str(tmp_path)]
        assert cli.main(argv) == 0
        assert json.loads((tmp_path / "evaluation.json").read_text())[0]["algorithm"] == "TSNN"

    @pytest.mark.parametrize("model,index", [("lr_model.json", 2), ("svm_model.json", 1)])
    def test_baselines_match_pipeline(self, pipeline_run, model, index):
        _, out = pipeline_run
        row = cli.cmd_evaluate(out / model, out / "test.csv")
        expected = json.loads((out / "evaluation.json").read_text())[index]
        assert row.accuracy == expected["accuracy"] and row.recall == expected["recall"]

    def test_width_mismatch(self, pipeline_run, tmp_path, capsys):
        _, out = pipeline_run
        test = dataio.load_csv(out / "test.csv")
        dataio.write_csv(test.select_columns([1, 2, 4]), tmp_path / "narrow.csv")
        code = cli.main(["evaluate", "--model", str(out / "lr_model.json"), "--input", str(tmp_path / "narrow.csv")])
        err = capsys.readouterr().err
        assert code == 1
        assert "[evaluate]" in err and "expects 10 input features" in err and "has 3 columns" in err

    def test_empty_test_file(self, pipeline_run, tmp_path, capsys):
        _, out = pipeline_run
        (tmp_path / "empty.csv").write_text("")
        assert cli.main(["evaluate", "--model", str(out / "tsnn_model.json"), "--input", str(tmp_path / "empty.csv")]) == 1
        assert "empty" in capsys.readouterr().err

    def test_unreadable_model(self, tmp_path, capsys):
        data = synth_csv(tmp_path / "flows.csv", n_rows=30)
        (tmp_path / "m.json").write_text("{")
        assert cli.main(["evaluate", "--model", str(tmp_path / "m.json"), "--input", str(data)]) == 1
        assert "[load-model]" in capsys.readouterr().err


class TestConfig:
    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("top_k: 4\nepochs: 7\nseed: 11\n")
        args = cli.build_parser().parse_args(["select", "--config", str(path), "--epochs", "9"])
        cfg = cli.resolve_config(args)
        assert (cfg.top_k, cfg.epochs, cfg.seed) == (4, 9, 11)

    def test_defaults_without_file(self):
        cfg = cli.resolve_config(cli.build_parser().parse_args(["pipeline"]))
        assert (cfg.top_k, cfg.tsi_samples, cfg.neighbors, cfg.epochs, cfg.batch_size) == (10, 4096, 5, 200, 500)
        assert cfg.train_config().l2_lambda == 1e-5

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("topk: 4\n")
        with pytest.raises(ConfigError, match="topk"):
            load_config(path)

    def test_stage_seeds_fixed_and_distinct(self):
        a, b = PipelineConfig(seed=5).stage_seeds(), PipelineConfig(seed=5).stage_seeds()
        assert a == b and len(set(a.values())) == len(a)
        assert PipelineConfig(seed=6).stage_seeds() != a

    def test_bad_config_exit_status(self, tmp_path, capsys):
        path = tmp_path / "c.yaml"
        path.write_text("- not a mapping\n")
        assert cli.main(["pipeline", "--config", str(path)]) == 1
        assert "[config]" in capsys.readouterr().err
