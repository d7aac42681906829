"""Tests for configuration, staged execution, and the command line."""

import json
import os
from dataclasses import replace

import pytest

from morphmine.cli import main
from morphmine.errors import ConfigError, DataError, StageError
from morphmine.evaluate import generate_toy_language, write_toy_language
from morphmine.pipeline import (
    PipelineConfig,
    load_config,
    run_pipeline,
    run_stage,
)

TOY = {"N": ["", "ta"], "V": ["o", "as"]}


def toy_overrides(corpus, gold, out_dir):
    return {
        "corpus_path": corpus,
        "gold_path": gold,
        "out_dir": out_dir,
        "seed": 7,
        "beta": 2,
        "n_tags": 2,
        "min_lcs_ratio": 0.6,
        "embed_dim": 16,
        "embed_window": 2,
        "embed_epochs": 2,
        "em_max_iters": 30,
        "figures": False,
    }


@pytest.fixture(scope="module")
def toy_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("toy")
    toy = generate_toy_language(TOY, 8, 300, seed=5)
    write_toy_language(toy, str(d))
    return d


@pytest.fixture(scope="module")
def mono_run(toy_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("mono")
    cfg = load_config(
        None, toy_overrides(str(toy_dir / "corpus.txt"), str(toy_dir / "gold.tsv"), str(out))
    )
    report = run_pipeline(cfg)
    return cfg, report


def tree_bytes(root):
    out = {}
    for dirpath, _, files in os.walk(root):
        for name in files:
            p = os.path.join(dirpath, name)
            with open(p, "rb") as fh:
                out[os.path.relpath(p, root)] = fh.read()
    return out


class TestConfig:
    def test_defaults(self):
        cfg = PipelineConfig()
        assert cfg.alpha == 50
        assert cfg.beta == 50
        assert cfg.n_tags == 3
        assert cfg.distance_threshold == 0.15
        assert cfg.max_contexts == 5
        assert cfg.inflector == "aligned"
        assert cfg.linkage == "average"
        assert cfg.bmacc_average == "micro"
        assert cfg.lowercase is True
        assert cfg.figures is True

    def test_file_then_overrides(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text("# comment\n\nalpha = 9\nbeta=7\nlowercase = no\n")
        cfg = load_config(str(p), {"alpha": "11"})
        assert cfg.alpha == 11  # flag wins over file
        assert cfg.beta == 7  # file wins over default
        assert cfg.lowercase is False
        assert cfg.n_tags == 3  # untouched default

    def test_unknown_key_cites_line(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text("alpha=1\nbogus=2\n")
        with pytest.raises(ConfigError, match=r"run\.cfg:2.*bogus"):
            load_config(str(p))

    def test_missing_equals_cites_line(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text("alpha\n")
        with pytest.raises(ConfigError, match=r"run\.cfg:1"):
            load_config(str(p))

    def test_bad_int(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text("alpha=many\n")
        with pytest.raises(ConfigError, match="expected int"):
            load_config(str(p))

    def test_bad_bool(self):
        with pytest.raises(ConfigError, match="boolean"):
            load_config(None, {"figures": "perhaps"})

    def test_missing_config_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(str(tmp_path / "absent.cfg"))

    def test_unknown_override_key(self):
        with pytest.raises(ConfigError, match="unknown config key"):
            load_config(None, {"gamma": "1"})

    def test_none_override_ignored(self):
        cfg = load_config(None, {"alpha": None})
        assert cfg.alpha == 50

    def test_validation_rejections(self):
        bad = [
            {"inflector": "magic"},
            {"distance_threshold": "2.5"},
            {"min_lcs_ratio": "0"},
            {"beta_unit": "chars"},
            {"linkage": "median"},
            {"bmacc_average": "pooled"},
            {"n_tags": "0"},
            {"em_restarts": "0"},
            {"embed_min_n": "4", "embed_max_n": "2"},
            {"embed_dim": "0"},
            {"alpha": "-1"},
        ]
        for overrides in bad:
            with pytest.raises(ConfigError):
                load_config(None, overrides)

    def test_hash_ignores_out_dir(self):
        a = PipelineConfig(out_dir="x")
        b = PipelineConfig(out_dir="y")
        assert a.config_hash() == b.config_hash()

    def test_hash_tracks_settings(self):
        assert PipelineConfig(seed=1).config_hash() != PipelineConfig(seed=2).config_hash()
        assert PipelineConfig(alpha=3).config_hash() != PipelineConfig(alpha=4).config_hash()

    def test_header_format(self):
        import re

        assert re.fullmatch(
            r"# config=[0-9a-f]{12} seed=7\n", PipelineConfig(seed=7).header()
        )


class TestStages:
    def test_unknown_stage(self, tmp_path):
        cfg = PipelineConfig(out_dir=str(tmp_path))
        with pytest.raises(ConfigError, match="unknown stage"):
            run_stage("fold", cfg)

    def test_missing_corpus_names_stage(self, tmp_path):
        cfg = PipelineConfig(
            corpus_path=str(tmp_path / "absent.txt"), out_dir=str(tmp_path / "out")
        )
        with pytest.raises(StageError, match="stage corpus") as info:
            run_stage("cluster", cfg)
        assert info.value.exit_code == 2

    def test_unconfigured_corpus(self, tmp_path):
        cfg = PipelineConfig(out_dir=str(tmp_path / "out"))
        with pytest.raises(StageError, match="no corpus path"):
            run_stage("cluster", cfg)

    def test_missing_upstream_artifact_names_stage(self, toy_dir, tmp_path):
        cfg = load_config(
            None,
            toy_overrides(
                str(toy_dir / "corpus.txt"),
                str(toy_dir / "gold.tsv"),
                str(tmp_path / "fresh"),
            ),
        )
        with pytest.raises(StageError, match="stage align") as info:
            run_stage("align", cfg)  # clusters.tsv was never written
        assert info.value.exit_code == 2


class TestEndToEnd:
    def test_monolithic_run_completes(self, mono_run):
        cfg, report = mono_run
        assert report is not None
        assert 0.0 <= report.bmacc <= 1.0
        assert report.bmf1 is not None and 0.0 <= report.bmf1 <= 1.0
        for name in (
            "clusters.tsv",
            "abstract.tsv",
            "pos_model.txt",
            "pos_assignment.tsv",
            "embeddings.vec",
            "slots_patterns.tsv",
            "slots_forms.tsv",
            "triples.tsv",
            "eval_items.tsv",
            "predictions.tsv",
            "generated_aligned.tsv",
            "report_aligned.json",
        ):
            assert os.path.exists(cfg.path(name)), name

    def test_artifacts_carry_config_header(self, mono_run):
        cfg, _ = mono_run
        header = cfg.header()
        for name in ("clusters.tsv", "abstract.tsv", "triples.tsv", "predictions.tsv"):
            with open(cfg.path(name), encoding="utf-8") as fh:
                assert fh.readline() == header, name

    def test_stagewise_matches_monolithic(self, mono_run, toy_dir, tmp_path):
        cfg, _ = mono_run
        staged = replace(cfg, out_dir=str(tmp_path / "staged"))
        for stage in ("cluster", "align", "predict", "inflect", "evaluate"):
            run_stage(stage, staged)
        assert tree_bytes(staged.out_dir) == tree_bytes(cfg.out_dir)

    def test_rerun_evaluate_is_idempotent(self, mono_run):
        cfg, report = mono_run
        path = cfg.path("report_aligned.json")
        with open(path, "rb") as fh:
            before = fh.read()
        again = run_stage("evaluate", cfg)
        assert again.bmacc == report.bmacc
        with open(path, "rb") as fh:
            assert fh.read() == before

    def test_report_json_contents(self, mono_run):
        cfg, report = mono_run
        with open(cfg.path("report_aligned.json"), encoding="utf-8") as fh:
            payload = json.load(fh)
        assert payload["bmacc"] == report.bmacc
        assert payload["bmf1"] == report.bmf1
        assert payload["config"] == cfg.config_hash()
        assert payload["seed"] == cfg.seed
        assert set(payload["per_pos"]) == set(report.per_pos)

    def test_baseline_inflector_separate_artifacts(self, mono_run):
        cfg, _ = mono_run
        base = replace(cfg, inflector="baseline")
        run_stage("inflect", base)
        rep = run_stage("evaluate", base)
        assert os.path.exists(base.path("generated_baseline.tsv"))
        assert os.path.exists(base.path("report_baseline.json"))
        assert 0.0 <= rep.bmacc <= 1.0
        # the aligned artifacts are untouched
        assert os.path.exists(base.path("generated_aligned.tsv"))

    def test_pipeline_without_eval_inputs_stops_after_align(self, toy_dir, tmp_path):
        over = toy_overrides(str(toy_dir / "corpus.txt"), "", str(tmp_path / "noeval"))
        cfg = load_config(None, over)
        assert run_pipeline(cfg) is None
        assert os.path.exists(cfg.path("triples.tsv"))
        assert not os.path.exists(cfg.path("predictions.tsv"))


class TestCli:
    def test_toylang_writes_corpus(self, tmp_path, capsys):
        d = tmp_path / "toy"
        code = main(
            [
                "toylang",
                "--pos", "N=,ta",
                "--pos", "V=o,as",
                "--lemmas", "4",
                "--sentences", "10",
                "--seed", "3",
                "--out-dir", str(d),
            ]
        )
        assert code == 0
        assert "corpus.txt" in capsys.readouterr().out
        assert (d / "corpus.txt").exists()
        assert (d / "gold.tsv").read_text().startswith("# config=")
        assert (d / "clusters.tsv").exists()

    def test_toylang_same_seed_same_bytes(self, tmp_path):
        dirs = [tmp_path / "a", tmp_path / "b"]
        for d in dirs:
            args = [
                "toylang",
                "--pos", "N=,ta",
                "--lemmas", "3",
                "--sentences", "5",
                "--seed", "9",
                "--out-dir", str(d),
            ]
            assert main(args) == 0
        assert tree_bytes(dirs[0]) == tree_bytes(dirs[1])

    def test_toylang_bad_pos_spec(self, tmp_path, capsys):
        assert main(["toylang", "--pos", "N", "--out-dir", str(tmp_path)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_toylang_duplicate_pos(self, tmp_path):
        args = ["toylang", "--pos", "N=a", "--pos", "N=b", "--out-dir", str(tmp_path)]
        assert main(args) == 1

    def test_toylang_shared_suffix(self, tmp_path):
        args = ["toylang", "--pos", "N=a", "--pos", "V=a,b", "--out-dir", str(tmp_path)]
        assert main(args) == 1

    def test_missing_subcommand(self, capsys):
        assert main([]) == 1
        assert "error:" in capsys.readouterr().err

    def test_unknown_flag(self):
        assert main(["cluster", "--frobnicate", "1"]) == 1

    def test_missing_corpus_is_data_error(self, tmp_path, capsys):
        code = main(
            [
                "cluster",
                "--corpus", str(tmp_path / "absent.txt"),
                "--out-dir", str(tmp_path / "out"),
            ]
        )
        assert code == 2
        assert "stage corpus" in capsys.readouterr().err

    def test_bad_option_value_is_usage_error(self, tmp_path):
        code = main(
            [
                "pipeline",
                "--corpus", str(tmp_path / "c.txt"),
                "--alpha", "many",
                "--out-dir", str(tmp_path / "out"),
            ]
        )
        assert code == 1

    def test_evaluate_without_gold(self, mono_run, capsys):
        cfg, _ = mono_run
        code = main(
            ["evaluate", "--corpus", cfg.corpus_path, "--out-dir", cfg.out_dir]
        )
        assert code == 2
        assert "gold" in capsys.readouterr().err

    def test_pipeline_end_to_end(self, toy_dir, tmp_path, capsys):
        out = tmp_path / "cliout"
        code = main(
            [
                "-v",
                "pipeline",
                "--corpus", str(toy_dir / "corpus.txt"),
                "--gold", str(toy_dir / "gold.tsv"),
                "--out-dir", str(out),
                "--seed", "7",
                "--beta", "2",
                "--n-tags", "2",
                "--min-lcs-ratio", "0.6",
                "--embed-dim", "16",
                "--embed-window", "2",
                "--embed-epochs", "2",
                "--em-max-iters", "30",
                "--no-figures",
            ]
        )
        assert code == 0
        stdout = capsys.readouterr().out
        assert "bmacc=" in stdout
        assert "bmf1=" in stdout
        assert (out / "report_aligned.json").exists()

    def test_config_file_flag(self, toy_dir, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text(
            "\n".join(
                [
                    f"corpus_path={toy_dir / 'corpus.txt'}",
                    f"out_dir={tmp_path / 'out'}",
                    "min_lcs_ratio=0.6",
                ]
            )
            + "\n"
        )
        assert main(["cluster", "--config", str(cfg_file)]) == 0
        assert (tmp_path / "out" / "clusters.tsv").exists()
