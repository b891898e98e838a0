"""End-to-end command-line runs in temp directories."""

import csv
import json
import os

import numpy as np
import pytest

from acueval.cli import (EXIT_BACKEND, EXIT_IO, EXIT_OK, EXIT_VALIDATION,
                         main, resolve_endpoint)
from acueval.dataset import load_score_csv, save_dataset, save_score_csv
from acueval.types import ScoreMatrix

from conftest import make_example, write_jsonl


@pytest.fixture
def dataset_path(tmp_path, mini_dataset):
    path = tmp_path / "data.jsonl"
    save_dataset(mini_dataset, path)
    return path


class TestScoreCommand:
    def test_gold_cached_run(self, tmp_path, dataset_path, mini_dataset):
        prefix = tmp_path / "out"
        code = main(["score", "--dataset", str(dataset_path),
                     "--extractor", "gold", "--checker", "cached",
                     "--out-prefix", str(prefix)])
        assert code == EXIT_OK
        matrix = load_score_csv(f"{prefix}.scores.csv")
        ex = mini_dataset[0]
        labels = ex.gold_labels["sys1"]
        assert matrix.values[0, list(matrix.system_ids).index("sys1")] == \
            sum(labels) / len(labels)
        audit = [json.loads(l)
                 for l in open(f"{prefix}.audit.jsonl", encoding="utf-8")]
        assert audit and {"example_id", "system_id", "acu_text", "label",
                          "probability", "contextual"} <= set(audit[0])
        timing = json.loads(open(f"{prefix}.timing.json").read())
        assert timing["timing"]["stage1_extract_seconds"] >= 0.0
        assert timing["timing"]["stage2_check_seconds"] >= 0.0
        assert timing["run"]["checker_threshold"] == 0.5

    def test_lexical_sentence_run(self, tmp_path, dataset_path):
        prefix = tmp_path / "lex"
        code = main(["score", "--dataset", str(dataset_path),
                     "--extractor", "sentence", "--checker", "lexical",
                     "--direction", "f1", "--out-prefix", str(prefix)])
        assert code == EXIT_OK
        matrix = load_score_csv(f"{prefix}.scores.csv")
        assert matrix.n_docs == 3

    def test_rerun_identical_bytes(self, tmp_path, dataset_path):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        for prefix in (out_a, out_b):
            assert main(["score", "--dataset", str(dataset_path),
                         "--out-prefix", str(prefix)]) == EXIT_OK
        assert (tmp_path / "a.scores.csv").read_bytes() == \
            (tmp_path / "b.scores.csv").read_bytes()
        assert (tmp_path / "a.audit.jsonl").read_bytes() == \
            (tmp_path / "b.audit.jsonl").read_bytes()

    def test_dry_run_writes_nothing(self, tmp_path, dataset_path):
        prefix = tmp_path / "dry"
        code = main(["score", "--dataset", str(dataset_path),
                     "--dry-run", "--out-prefix", str(prefix)])
        assert code == EXIT_OK
        assert not list(tmp_path.glob("dry*"))

    def test_remote_checker_unreachable(self, tmp_path, dataset_path):
        code = main(["score", "--dataset", str(dataset_path),
                     "--checker", "remote",
                     "--endpoint", "http://127.0.0.1:9",
                     "--out-prefix", str(tmp_path / "x")])
        assert code == EXIT_BACKEND

    def test_missing_dataset_is_io_error(self, tmp_path):
        code = main(["score", "--dataset", str(tmp_path / "nope.jsonl")])
        assert code == EXIT_IO

    def test_malformed_dataset_is_validation_error(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text("not json\n")
        code = main(["score", "--dataset", str(path)])
        assert code == EXIT_VALIDATION

    def test_one_stage_needs_endpoint(self, tmp_path, dataset_path, monkeypatch):
        monkeypatch.delenv("ACUEVAL_ENDPOINT", raising=False)
        code = main(["score", "--dataset", str(dataset_path),
                     "--metric", "one-stage",
                     "--out-prefix", str(tmp_path / "y")])
        assert code == EXIT_VALIDATION


class TestEndpointResolution:
    def test_flag_beats_config_beats_env(self, tmp_path, monkeypatch):
        config = tmp_path / "conf.json"
        config.write_text(json.dumps({"endpoint": "http://from-config"}))
        monkeypatch.setenv("ACUEVAL_ENDPOINT", "http://from-env")
        assert resolve_endpoint("http://from-flag", str(config)) == "http://from-flag"
        assert resolve_endpoint(None, str(config)) == "http://from-config"
        assert resolve_endpoint(None, None) == "http://from-env"
        monkeypatch.delenv("ACUEVAL_ENDPOINT")
        assert resolve_endpoint(None, None) is None


class TestBenchmarkCommand:
    @staticmethod
    def _write_matrices(tmp_path, n=30, m=4, seed=0):
        rng = np.random.default_rng(seed)
        docs = [f"d{i}" for i in range(n)]
        systems = [f"s{j}" for j in range(m)]
        human = ScoreMatrix(docs, systems, rng.random((n, m)))
        noise = ScoreMatrix(docs, systems, rng.random((n, m)))
        h_path = tmp_path / "human.csv"
        copy_path = tmp_path / "copy.csv"
        noise_path = tmp_path / "noise.csv"
        save_score_csv(human, h_path)
        save_score_csv(human, copy_path)
        save_score_csv(noise, noise_path)
        return h_path, copy_path, noise_path

    def test_human_vs_itself(self, tmp_path):
        h_path, copy_path, _ = self._write_matrices(tmp_path)
        prefix = tmp_path / "self"
        code = main(["benchmark", "--human", str(h_path),
                     "--metric", f"copy={copy_path}",
                     "--out-prefix", str(prefix)])
        assert code == EXIT_OK
        report = json.loads((tmp_path / "self.report.json").read_text())
        row = report["metrics"][0]
        assert row["system_value"] == 1.0
        assert row["summary_value"] == 1.0

    def test_dagger_on_copy_vs_noise(self, tmp_path):
        h_path, copy_path, noise_path = self._write_matrices(tmp_path)
        prefix = tmp_path / "bench"
        code = main(["benchmark", "--human", str(h_path),
                     "--metric", f"copy={copy_path}",
                     "--metric", f"noise={noise_path}",
                     "--baseline", "noise", "--resamples", "300",
                     "--seed", "7", "--out-prefix", str(prefix)])
        assert code == EXIT_OK
        report = json.loads((tmp_path / "bench.report.json").read_text())
        by_name = {r["metric"]: r for r in report["metrics"]}
        assert by_name["copy"]["summary_significant"] is True
        assert by_name["noise"]["summary_p_vs_baseline"] is None

    def test_outputs_parse_back(self, tmp_path):
        h_path, copy_path, noise_path = self._write_matrices(tmp_path)
        prefix = tmp_path / "parse"
        main(["benchmark", "--human", str(h_path),
              "--metric", f"copy={copy_path}",
              "--metric", f"noise={noise_path}",
              "--baseline", "noise", "--resamples", "200",
              "--out-prefix", str(prefix)])
        with open(f"{prefix}.report.csv") as f:
            rows = list(csv.DictReader(f))
        report = json.loads((tmp_path / "parse.report.json").read_text())
        assert len(rows) == len(report["metrics"]) == 2
        for csv_row, json_row in zip(rows, report["metrics"]):
            assert float(csv_row["summary_value"]) == json_row["summary_value"]

    def test_same_seed_identical_bytes(self, tmp_path):
        h_path, copy_path, noise_path = self._write_matrices(tmp_path)
        for name in ("r1", "r2"):
            main(["benchmark", "--human", str(h_path),
                  "--metric", f"copy={copy_path}",
                  "--metric", f"noise={noise_path}",
                  "--baseline", "noise", "--resamples", "200", "--seed", "5",
                  "--out-prefix", str(tmp_path / name)])
        assert (tmp_path / "r1.report.json").read_bytes() == \
            (tmp_path / "r2.report.json").read_bytes()

    def test_unknown_baseline_rejected(self, tmp_path):
        h_path, copy_path, _ = self._write_matrices(tmp_path)
        code = main(["benchmark", "--human", str(h_path),
                     "--metric", f"copy={copy_path}",
                     "--baseline", "missing",
                     "--out-prefix", str(tmp_path / "x")])
        assert code == EXIT_VALIDATION

    def test_bad_metric_spec_rejected(self, tmp_path):
        h_path, copy_path, _ = self._write_matrices(tmp_path)
        code = main(["benchmark", "--human", str(h_path),
                     "--metric", "no-equals-sign",
                     "--out-prefix", str(tmp_path / "x")])
        assert code == EXIT_VALIDATION


class TestAcuQualityCommand:
    def test_identity_run(self, tmp_path):
        records = [{"example_id": "e1",
                    "acus": ["the vote passed", "taxes will rise"]},
                   {"example_id": "e2", "acus": ["rainfall flooded the valley"]}]
        gen = write_jsonl(tmp_path / "gen.jsonl", records)
        ref = write_jsonl(tmp_path / "ref.jsonl", records)
        prefix = tmp_path / "quality"
        code = main(["acu-quality", "--generated", str(gen),
                     "--reference", str(ref), "--out-prefix", str(prefix)])
        assert code == EXIT_OK
        report = json.loads((tmp_path / "quality.quality.json").read_text())
        assert report["macro"]["precision"] == 1.0
        assert report["macro"]["recall"] == 1.0
        assert report["macro"]["f1"] == 1.0

    def test_dry_run(self, tmp_path):
        records = [{"example_id": "e1", "acus": ["one fact"]}]
        gen = write_jsonl(tmp_path / "gen.jsonl", records)
        ref = write_jsonl(tmp_path / "ref.jsonl", records)
        code = main(["acu-quality", "--generated", str(gen),
                     "--reference", str(ref), "--dry-run",
                     "--out-prefix", str(tmp_path / "q")])
        assert code == EXIT_OK
        assert not list(tmp_path.glob("q.*"))


class TestGenPretrainCommand:
    def test_two_by_twelve(self, tmp_path):
        candidates = [{"example_id": f"e{i}",
                       "candidates": [f"The committee approved item {j} of e{i}."
                                      for j in range(12)]}
                      for i in range(2)]
        references = [{"example_id": f"e{i}",
                       "reference": f"The committee approved items of e{i}."}
                      for i in range(2)]
        cand_path = write_jsonl(tmp_path / "cands.jsonl", candidates)
        ref_path = write_jsonl(tmp_path / "refs.jsonl", references)
        out_dir = tmp_path / "corpus"
        code = main(["gen-pretrain", "--candidates", str(cand_path),
                     "--references", str(ref_path),
                     "--scorer", "two_stage", "--out-dir", str(out_dir)])
        assert code == EXIT_OK
        shards = sorted(out_dir.glob("*.jsonl"))
        assert len(shards) == 1
        lines = [json.loads(l) for l in shards[0].read_text().splitlines()]
        assert len(lines) == 24
        assert all(0.0 <= r["target_score"] <= 1.0 for r in lines)

    def test_missing_reference_fails_validation(self, tmp_path):
        cand_path = write_jsonl(tmp_path / "cands.jsonl",
                                [{"example_id": "e1", "candidates": ["text"]}])
        ref_path = write_jsonl(tmp_path / "refs.jsonl",
                               [{"example_id": "other", "reference": "r"}])
        code = main(["gen-pretrain", "--candidates", str(cand_path),
                     "--references", str(ref_path), "--scorer", "rouge_avg",
                     "--out-dir", str(tmp_path / "c")])
        assert code == EXIT_VALIDATION


class TestDryRunEverywhere:
    def test_benchmark_dry_run(self, tmp_path):
        h = TestBenchmarkCommand._write_matrices(tmp_path)[0]
        code = main(["benchmark", "--human", str(h), "--metric", f"m={h}",
                     "--dry-run", "--out-prefix", str(tmp_path / "dr")])
        assert code == EXIT_OK
        assert not list(tmp_path.glob("dr.*"))

    def test_gen_pretrain_dry_run(self, tmp_path):
        cands = write_jsonl(tmp_path / "c.jsonl",
                            [{"example_id": "e1", "candidates": ["some text"]}])
        refs = write_jsonl(tmp_path / "r.jsonl",
                           [{"example_id": "e1", "reference": "ref text"}])
        out_dir = tmp_path / "corpus"
        code = main(["gen-pretrain", "--candidates", str(cands),
                     "--references", str(refs), "--dry-run",
                     "--out-dir", str(out_dir)])
        assert code == EXIT_OK
        assert not out_dir.exists()

    def test_candidate_sim_dry_run(self, tmp_path, mini_dataset):
        path = tmp_path / "d.jsonl"
        save_dataset(mini_dataset, path)
        code = main(["candidate-sim", "--dataset", str(path), "--dry-run",
                     "--out-prefix", str(tmp_path / "dr")])
        assert code == EXIT_OK
        assert not list(tmp_path.glob("dr.*"))


class TestCandidateSimCommand:
    def test_three_candidates_three_pairs(self, tmp_path, mini_dataset):
        path = tmp_path / "data.jsonl"
        save_dataset(mini_dataset, path)
        prefix = tmp_path / "sim"
        code = main(["candidate-sim", "--dataset", str(path),
                     "--bins", "10", "--out-prefix", str(prefix)])
        assert code == EXIT_OK
        stats = json.loads((tmp_path / "sim.stats.json").read_text())
        assert stats["n_pairs"] == len(mini_dataset) * 3
        lines = (tmp_path / "sim.hist.csv").read_text().splitlines()
        assert lines[0] == "bin,count"
        assert sum(int(l.split(",")[1]) for l in lines[1:]) == stats["n_pairs"]
