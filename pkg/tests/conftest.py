import json

import pytest

from acueval.types import Acu, EvalExample


def make_example(example_id="ex1", n_systems=3, n_acus=4, labels=None,
                 reference=None, candidates=None):
    """A small well-formed example with gold ACUs and labels."""
    systems = [f"sys{i}" for i in range(n_systems)]
    reference = reference or (
        f"The {example_id} committee approved the budget on Monday. "
        f"The vote passed with a clear majority.")
    if candidates is None:
        candidates = {s: f"The committee of {example_id} approved a budget "
                         f"according to report {i}." for i, s in enumerate(systems)}
    acus = tuple(
        Acu(acu_id=f"{example_id}#g{i}",
            text=f"fact number {i} about {example_id}",
            origin_example=example_id)
        for i in range(n_acus))
    if labels is None:
        labels = {s: tuple((i + j) % 2 for j in range(n_acus))
                  for i, s in enumerate(systems)}
    return EvalExample(example_id=example_id, source=f"source of {example_id}",
                       reference=reference, candidates=candidates,
                       gold_acus=acus, gold_labels=labels)


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, ensure_ascii=False) + "\n")
    return path


@pytest.fixture
def mini_dataset():
    return [make_example("ex1"), make_example("ex2"), make_example("ex3")]
