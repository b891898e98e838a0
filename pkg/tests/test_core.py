"""Domain types, dataset loading/validation, and serialization round-trips."""

import json

import numpy as np
import pytest

from acueval.dataset import (dataset_stats, load_dataset, load_score_csv,
                             save_dataset, save_score_csv)
from acueval.errors import ParseError, ValidationError
from acueval.types import (Acu, DatasetSummary, EntailmentJudgment,
                           EvalExample, RougeScore, ScoreMatrix, harmonic_mean)

from conftest import make_example, write_jsonl


class TestTypes:
    def test_acu_requires_content_token(self):
        Acu(acu_id="a0", text="the vote passed")
        with pytest.raises(ValidationError):
            Acu(acu_id="a1", text="of the and")
        with pytest.raises(ValidationError):
            Acu(acu_id="a2", text="   ")

    def test_judgment_bounds(self):
        EntailmentJudgment(label=1, probability=1.0)
        with pytest.raises(ValidationError):
            EntailmentJudgment(label=2, probability=0.5)
        with pytest.raises(ValidationError):
            EntailmentJudgment(label=0, probability=1.5)

    def test_rouge_score_f1_rule(self):
        s = RougeScore.from_precision_recall(0.5, 1.0)
        assert abs(s.f1 - 2 * 0.5 * 1.0 / 1.5) < 1e-12
        assert RougeScore.from_precision_recall(0.0, 0.0).f1 == 0.0

    def test_harmonic_mean(self):
        assert harmonic_mean(0.5, 1.0) == pytest.approx(2 / 3, abs=0)
        assert harmonic_mean(0.0, 0.0) == 0.0

    def test_example_label_length_mismatch_names_system(self):
        ex = make_example("ex1", n_systems=2, n_acus=5)
        bad = EvalExample(example_id="ex1", source=ex.source,
                          reference=ex.reference, candidates=ex.candidates,
                          gold_acus=ex.gold_acus,
                          gold_labels={"sys0": (1, 0, 1, 1, 0),
                                       "sys1": (1, 0, 1, 1)})
        with pytest.raises(ValidationError, match="sys1"):
            bad.validate()

    def test_example_empty_candidate_rejected(self):
        ex = EvalExample(example_id="e", source="", reference="ref text",
                         candidates={"a": "ok", "b": "   "})
        with pytest.raises(ValidationError, match="'b'"):
            ex.validate()


class TestScoreMatrix:
    def test_rejects_nan(self):
        with pytest.raises(ValidationError):
            ScoreMatrix(["d1"], ["a", "b"], [[1.0, float("nan")]])

    def test_rejects_duplicate_ids(self):
        with pytest.raises(ValidationError):
            ScoreMatrix(["d1", "d1"], ["a"], [[1.0], [2.0]])
        with pytest.raises(ValidationError):
            ScoreMatrix(["d1"], ["a", "a"], [[1.0, 2.0]])

    def test_values_immutable(self):
        m = ScoreMatrix(["d1"], ["a", "b"], [[1.0, 2.0]])
        with pytest.raises(ValueError):
            m.values[0, 0] = 9.0

    def test_reindexed(self):
        m = ScoreMatrix(["d1", "d2"], ["a", "b"], [[1.0, 2.0], [3.0, 4.0]])
        r = m.reindexed(["d2", "d1"], ["b", "a"])
        assert r.values.tolist() == [[4.0, 3.0], [2.0, 1.0]]


class TestLoadDataset:
    def test_round_trip(self, tmp_path, mini_dataset):
        path = tmp_path / "data.jsonl"
        save_dataset(mini_dataset, path)
        loaded = load_dataset(path)
        assert loaded == mini_dataset

    def test_empty_file_errors(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        with pytest.raises(ParseError, match="no records"):
            load_dataset(path)

    def test_malformed_json_names_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"example_id": "e1"\n')
        with pytest.raises(ParseError, match="line 1"):
            load_dataset(path)

    def test_missing_field_named(self, tmp_path):
        path = write_jsonl(tmp_path / "d.jsonl",
                           [{"example_id": "e1", "source": "s"}])
        with pytest.raises(ParseError, match="reference"):
            load_dataset(path)

    def test_label_mismatch_names_system_and_line(self, tmp_path):
        record = {
            "example_id": "e1", "source": "", "reference": "some reference",
            "candidates": {"bart": "an output", "t5": "another output"},
            "gold_acus": ["fact one here", "fact two here", "fact three here",
                          "fact four here", "fact five here"],
            "gold_labels": {"bart": [1, 0, 1, 1], "t5": [0, 0, 1, 1, 0]},
        }
        path = write_jsonl(tmp_path / "d.jsonl", [record])
        with pytest.raises(ValidationError) as err:
            load_dataset(path)
        assert "bart" in str(err.value)
        assert "line 1" in str(err.value)

    def test_duplicate_example_id(self, tmp_path, mini_dataset):
        path = tmp_path / "dup.jsonl"
        save_dataset([mini_dataset[0], mini_dataset[0]], path)
        with pytest.raises(ValidationError, match="duplicate example_id"):
            load_dataset(path)

    def test_release_adapter_maps_fields(self, tmp_path):
        record = {
            "example_id": "cnndm-42",
            "source": "the article text",
            "reference": "the reference summary",
            "system_outputs": {"bart": "bart output", "pegasus": "pegasus output"},
            "reference_acus": ["fact one stated", "fact two stated"],
            "annotations": {
                "bart": {"acu_labels": [1, 0], "acu": 0.5, "normalized_acu": 0.43},
                "pegasus": {"acu_labels": [1, 1], "acu": 1.0, "normalized_acu": 0.91},
            },
        }
        path = write_jsonl(tmp_path / "release.jsonl", [record])
        examples = load_dataset(path, format="rose-release")
        ex = examples[0]
        assert ex.example_id == "cnndm-42"
        assert ex.candidates == {"bart": "bart output", "pegasus": "pegasus output"}
        assert [a.text for a in ex.gold_acus] == ["fact one stated", "fact two stated"]
        assert ex.gold_labels == {"bart": (1, 0), "pegasus": (1, 1)}
        assert ex.normalized_score == {"bart": 0.43, "pegasus": 0.91}

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            load_dataset(tmp_path / "x.jsonl", format="parquet")


class TestScoreCsv:
    def test_round_trip_bit_identical(self, tmp_path):
        path = tmp_path / "scores.csv"
        path.write_text("doc_id,sys1,sys2\n"
                        "d1,0.1,0.30000000000000004\n"
                        "d2,1e-3,2.5\n")
        m = load_score_csv(path)
        assert m.values[0, 0] == float("0.1")
        assert m.values[0, 1] == float("0.30000000000000004")
        assert m.values[1, 0] == float("1e-3")
        out = tmp_path / "again.csv"
        save_score_csv(m, out)
        assert load_score_csv(out) == m

    def test_header_required(self, tmp_path):
        path = tmp_path / "scores.csv"
        path.write_text("document,sys1\nd1,0.5\n")
        with pytest.raises(ParseError, match="header"):
            load_score_csv(path)

    def test_non_numeric_cell_names_line(self, tmp_path):
        path = tmp_path / "scores.csv"
        path.write_text("doc_id,sys1\nd1,0.5\nd2,oops\n")
        with pytest.raises(ParseError, match="line 3"):
            load_score_csv(path)

    def test_load_via_dataset_format(self, tmp_path):
        path = tmp_path / "scores.csv"
        path.write_text("doc_id,s1,s2\nd1,0.25,0.5\n")
        m = load_dataset(path, format="score-csv")
        assert isinstance(m, ScoreMatrix)
        assert m.system_ids == ("s1", "s2")


class TestDatasetStats:
    def test_simple_counts(self):
        data = [make_example("e1", n_systems=3, n_acus=4),
                make_example("e2", n_systems=3, n_acus=6)]
        assert dataset_stats(data) == DatasetSummary(2, 3, 10, 6)

    def test_no_gold_acus(self):
        ex = EvalExample(example_id="e", source="", reference="ref",
                         candidates={"a": "x", "b": "y"})
        assert dataset_stats([ex]) == DatasetSummary(1, 2, 0, 2)

    def test_empty_dataset_rejected(self):
        with pytest.raises(ValidationError):
            dataset_stats([])

    def test_benchmark_shaped_fixture(self):
        # 500 docs x 8 systems with 2300 gold ACUs total
        data = [make_example(f"e{i}", n_systems=8,
                             n_acus=5 if i < 300 else 4)
                for i in range(500)]
        assert dataset_stats(data) == DatasetSummary(500, 8, 2300, 4000)

    def test_summaries_equal_docs_times_systems(self):
        data = [make_example(f"e{i}", n_systems=12, n_acus=2)
                for i in range(20)]
        stats = dataset_stats(data)
        assert stats.n_summaries == stats.n_docs * stats.n_systems
