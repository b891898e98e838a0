"""Command-line surface for batch runs.

Subcommands: ``score`` (two-stage or one-stage corpus scoring), ``benchmark``
(metric-vs-human correlation tables with significance daggers),
``acu-quality`` (greedy-matching quality of generated unit sets),
``gen-pretrain`` (training-corpus construction), and ``candidate-sim``
(candidate-pair similarity histograms).

Exit codes: 0 success, 2 validation/parse failures, 3 backend failures,
4 I/O failures. Every command accepts ``--dry-run``, which validates inputs
and resolves backends but touches no output files. The remote endpoint is
resolved flag > config file > ``ACUEVAL_ENDPOINT``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import metaeval, pipeline, pretrain
from .backends import (CachedChecker, GoldAcuExtractor, LexicalChecker,
                       RemoteChecker, RemoteExtractor, RemoteScorer,
                       SentenceExtractor)
from .dataset import dataset_stats, load_dataset, load_score_csv, save_score_csv
from .errors import AcuEvalError, BackendError, ParseError, ValidationError
from .types import AcuSet

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BACKEND = 3
EXIT_IO = 4

ENDPOINT_ENV = "ACUEVAL_ENDPOINT"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acueval",
        description="Content-unit based summarization evaluation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    score = sub.add_parser("score", help="score a benchmark corpus")
    score.add_argument("--dataset", required=True)
    score.add_argument("--format", default="rose-jsonl",
                       choices=["rose-jsonl", "rose-release"])
    score.add_argument("--metric", default="two-stage",
                       choices=["two-stage", "one-stage"])
    score.add_argument("--extractor", default="gold",
                       choices=["gold", "sentence", "remote"])
    score.add_argument("--checker", default="cached",
                       choices=["cached", "lexical", "remote"])
    score.add_argument("--checker-mode", default="standard",
                       choices=["standard", "contextual"])
    score.add_argument("--threshold", type=float, default=None,
                       help="checker decision threshold (backend default if unset)")
    score.add_argument("--direction", default="recall",
                       choices=["recall", "f1"])
    score.add_argument("--aggregate", default="label",
                       choices=["label", "probability"])
    score.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    score.add_argument("--endpoint", default=None)
    score.add_argument("--config", default=None)
    score.add_argument("--out-prefix", default="acueval-score")
    score.add_argument("--dry-run", action="store_true")
    score.set_defaults(func=cmd_score)

    bench = sub.add_parser("benchmark",
                           help="correlate metric matrices against human scores")
    bench.add_argument("--human", required=True, help="human score CSV")
    bench.add_argument("--metric", action="append", required=True,
                       metavar="NAME=PATH", help="metric score CSV (repeatable)")
    bench.add_argument("--baseline", default=None,
                       help="metric name to test the others against")
    bench.add_argument("--coefficient", default="kendall_b",
                       choices=list(metaeval.COEFFICIENTS))
    bench.add_argument("--resamples", type=int, default=1000)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out-prefix", default="acueval-benchmark")
    bench.add_argument("--dry-run", action="store_true")
    bench.set_defaults(func=cmd_benchmark)

    quality = sub.add_parser("acu-quality",
                             help="greedy-matching quality of generated units")
    quality.add_argument("--generated", required=True,
                         help="JSONL of {example_id, acus: [...]}")
    quality.add_argument("--reference", required=True,
                         help="JSONL of {example_id, acus: [...]}")
    quality.add_argument("--matcher", default="rouge1",
                         choices=["rouge1", "rouge2", "rougeL"])
    quality.add_argument("--out-prefix", default="acueval-quality")
    quality.add_argument("--dry-run", action="store_true")
    quality.set_defaults(func=cmd_acu_quality)

    gen = sub.add_parser("gen-pretrain",
                         help="build a one-stage pre-training corpus")
    gen.add_argument("--candidates", required=True,
                     help="JSONL of {example_id, candidates: [...]}")
    gen.add_argument("--references", required=True,
                     help="JSONL of {example_id, reference}")
    gen.add_argument("--scorer", default="two_stage",
                     choices=list(pretrain.SCORERS))
    gen.add_argument("--extractor", default="sentence",
                     choices=["sentence", "remote"])
    gen.add_argument("--checker", default="lexical",
                     choices=["lexical", "remote"])
    gen.add_argument("--threshold", type=float, default=None)
    gen.add_argument("--endpoint", default=None)
    gen.add_argument("--config", default=None)
    gen.add_argument("--out-dir", default="pretrain-corpus")
    gen.add_argument("--prefix", default="pretrain")
    gen.add_argument("--shard-size", type=int, default=pretrain.SHARD_SIZE)
    gen.add_argument("--dry-run", action="store_true")
    gen.set_defaults(func=cmd_gen_pretrain)

    sim = sub.add_parser("candidate-sim",
                         help="candidate-pair similarity distribution")
    sim.add_argument("--dataset", required=True)
    sim.add_argument("--format", default="rose-jsonl",
                     choices=["rose-jsonl", "rose-release"])
    sim.add_argument("--bins", type=int, default=20)
    sim.add_argument("--out-prefix", default="acueval-candidate-sim")
    sim.add_argument("--dry-run", action="store_true")
    sim.set_defaults(func=cmd_candidate_sim)

    return parser


def _out(prefix: Path, ext: str) -> Path:
    return Path(str(prefix) + ext)


def resolve_endpoint(flag_value: str | None, config_path: str | None) -> str | None:
    """Flag beats config file beats environment variable."""
    if flag_value:
        return flag_value
    if config_path:
        with open(config_path, "r", encoding="utf-8") as f:
            config = json.load(f)
        if config.get("endpoint"):
            return str(config["endpoint"])
    return os.environ.get(ENDPOINT_ENV) or None


def _make_extractor(kind: str, dataset, endpoint: str | None):
    if kind == "gold":
        return GoldAcuExtractor(dataset)
    if kind == "sentence":
        return SentenceExtractor()
    if kind == "remote":
        if not endpoint:
            raise ValidationError(
                "remote extractor selected but no endpoint configured")
        return RemoteExtractor(endpoint)
    raise ValidationError(f"unknown extractor '{kind}'")


def _make_checker(kind: str, dataset, endpoint: str | None, mode: str,
                  threshold: float | None):
    if kind == "cached":
        return CachedChecker(dataset)
    if kind == "lexical":
        return LexicalChecker(**({"threshold": threshold} if threshold else {}))
    if kind == "remote":
        if not endpoint:
            raise ValidationError(
                "remote checker selected but no endpoint configured")
        kwargs = {"threshold": threshold} if threshold else {}
        return RemoteChecker(endpoint, mode=mode, **kwargs)
    raise ValidationError(f"unknown checker '{kind}'")


def cmd_score(args) -> int:
    examples = load_dataset(args.dataset, format=args.format)
    stats = dataset_stats(examples)
    endpoint = resolve_endpoint(args.endpoint, args.config)

    if args.metric == "one-stage":
        if not endpoint:
            raise ValidationError(
                "one-stage scoring needs a remote endpoint")
        scorer = RemoteScorer(endpoint)
        if args.dry_run:
            print("dry run ok: one-stage scorer resolved, no files written")
            return EXIT_OK
        result = pipeline.score_corpus_one_stage(examples, scorer,
                                                 direction=args.direction)
    else:
        extractor = _make_extractor(args.extractor, examples, endpoint)
        checker = _make_checker(args.checker, examples, endpoint,
                                args.checker_mode, args.threshold)
        if args.dry_run:
            print("dry run ok: dataset and backends resolved, no files written")
            return EXIT_OK
        result = pipeline.score_corpus(examples, extractor, checker,
                                       direction=args.direction,
                                       aggregate=args.aggregate,
                                       workers=args.workers)

    prefix = Path(args.out_prefix)
    save_score_csv(result.matrix, _out(prefix, ".scores.csv"))
    pipeline.write_audit_jsonl(result, _out(prefix, ".audit.jsonl"))
    report = {
        "timing": result.timing.to_dict(),
        "run": result.metadata,
        "dataset": str(args.dataset),
        "n_docs": stats.n_docs,
        "n_systems": stats.n_systems,
    }
    with _out(prefix, ".timing.json").open("w", encoding="utf-8") as f:
        json.dump(report, f, indent=2)
        f.write("\n")
    print(f"scored {stats.n_docs} docs x {stats.n_systems} systems "
          f"-> {prefix}.scores.csv")
    return EXIT_OK


def _parse_metric_specs(specs: list[str]) -> dict[str, str]:
    metrics: dict[str, str] = {}
    for spec in specs:
        name, sep, path = spec.partition("=")
        if not sep or not name or not path:
            raise ValidationError(
                f"metric spec '{spec}' must look like NAME=PATH")
        if name in metrics:
            raise ValidationError(f"duplicate metric name '{name}'")
        metrics[name] = path
    return metrics


def cmd_benchmark(args) -> int:
    human = load_score_csv(args.human)
    metric_paths = _parse_metric_specs(args.metric)
    matrices = {name: load_score_csv(path)
                for name, path in metric_paths.items()}
    baseline = args.baseline
    if baseline is not None and baseline not in matrices:
        raise ValidationError(f"baseline '{baseline}' is not among the metrics")
    if args.dry_run:
        print("dry run ok: matrices aligned, no files written")
        return EXIT_OK

    rows = []
    for name, matrix in matrices.items():
        sys_report = metaeval.system_level(human, matrix, args.coefficient)
        sum_report = metaeval.summary_level(human, matrix, args.coefficient)
        row = {
            "metric": name,
            "coefficient": args.coefficient,
            "system_value": sys_report.value,
            "summary_value": sum_report.value,
            "summary_rows_used": sum_report.rows_used,
            "summary_rows_skipped": sum_report.rows_skipped_constant,
            "system_p_vs_baseline": None,
            "summary_p_vs_baseline": None,
            "system_significant": None,
            "summary_significant": None,
        }
        if baseline is not None and name != baseline:
            p_sys = metaeval.significance(human, matrix, matrices[baseline],
                                          level="system",
                                          coefficient=args.coefficient,
                                          resamples=args.resamples,
                                          seed=args.seed)
            p_sum = metaeval.significance(human, matrix, matrices[baseline],
                                          level="summary",
                                          coefficient=args.coefficient,
                                          resamples=args.resamples,
                                          seed=args.seed)
            row.update({
                "system_p_vs_baseline": p_sys,
                "summary_p_vs_baseline": p_sum,
                "system_significant": p_sys < 0.05,
                "summary_significant": p_sum < 0.05,
            })
        rows.append(row)

    prefix = Path(args.out_prefix)
    import csv as _csv
    with _out(prefix, ".report.csv").open("w", encoding="utf-8",
                                                newline="") as f:
        writer = _csv.DictWriter(f, fieldnames=list(rows[0].keys()),
                                 lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    with _out(prefix, ".report.json").open("w", encoding="utf-8") as f:
        json.dump({"baseline": baseline, "resamples": args.resamples,
                   "seed": args.seed, "metrics": rows}, f, indent=2)
        f.write("\n")
    for row in rows:
        dagger = " †" if row["summary_significant"] else ""
        print(f"{row['metric']:>20s}  sys={row['system_value']:+.3f}  "
              f"sum={row['summary_value']:+.3f}{dagger}")
    return EXIT_OK


def _load_acu_sets(path: str) -> dict[str, AcuSet]:
    sets: dict[str, AcuSet] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f"invalid JSON: {e.msg}", path=path,
                                 line=lineno) from e
            if "example_id" not in record or "acus" not in record:
                raise ParseError("need example_id and acus", path=path,
                                 line=lineno)
            example_id = str(record["example_id"])
            if example_id in sets:
                raise ValidationError(
                    f"{path}: line {lineno}: duplicate example_id "
                    f"'{example_id}'")
            sets[example_id] = AcuSet.from_texts(
                [str(t) for t in record["acus"]], origin=example_id)
    if not sets:
        raise ParseError("no records", path=path)
    return sets


def cmd_acu_quality(args) -> int:
    generated = _load_acu_sets(args.generated)
    reference = _load_acu_sets(args.reference)
    shared = [k for k in generated if k in reference]
    if not shared:
        raise ValidationError("no shared example_ids between the two files")
    if args.dry_run:
        print("dry run ok: unit sets loaded, no files written")
        return EXIT_OK

    per_example = []
    for example_id in shared:
        score = metaeval.acu_quality(generated[example_id],
                                     reference[example_id],
                                     matcher=args.matcher)
        per_example.append({
            "example_id": example_id,
            "precision": score.precision,
            "recall": score.recall,
            "f1": score.f1,
        })
    n = len(per_example)
    mean_p = sum(r["precision"] for r in per_example) / n
    mean_r = sum(r["recall"] for r in per_example) / n
    macro = {
        "matcher": args.matcher,
        "n_examples": n,
        "precision": mean_p,
        "recall": mean_r,
        "f1": (2 * mean_p * mean_r / (mean_p + mean_r)
               if mean_p + mean_r else 0.0),
    }

    prefix = Path(args.out_prefix)
    with _out(prefix, ".quality.json").open("w", encoding="utf-8") as f:
        json.dump({"macro": macro, "per_example": per_example}, f, indent=2)
        f.write("\n")
    import csv as _csv
    with _out(prefix, ".quality.csv").open("w", encoding="utf-8",
                                                 newline="") as f:
        writer = _csv.DictWriter(
            f, fieldnames=["example_id", "precision", "recall", "f1"],
            lineterminator="\n")
        writer.writeheader()
        writer.writerows(per_example)
    print(f"quality over {n} examples: P={100 * macro['precision']:.2f} "
          f"R={100 * macro['recall']:.2f} F1={100 * macro['f1']:.2f}")
    return EXIT_OK


def _load_jsonl_map(path: str, value_field: str):
    out = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f"invalid JSON: {e.msg}", path=path,
                                 line=lineno) from e
            if "example_id" not in record or value_field not in record:
                raise ParseError(f"need example_id and {value_field}",
                                 path=path, line=lineno)
            out[str(record["example_id"])] = record[value_field]
    if not out:
        raise ParseError("no records", path=path)
    return out


def cmd_gen_pretrain(args) -> int:
    candidates = {k: [str(c) for c in v]
                  for k, v in _load_jsonl_map(args.candidates, "candidates").items()}
    references = {k: str(v)
                  for k, v in _load_jsonl_map(args.references, "reference").items()}
    endpoint = resolve_endpoint(args.endpoint, args.config)
    extractor = checker = None
    if args.scorer == "two_stage":
        extractor = _make_extractor(args.extractor, None, endpoint)
        checker = _make_checker(args.checker, None, endpoint, "standard",
                                args.threshold)
    if args.dry_run:
        print("dry run ok: inputs and backends resolved, no files written")
        return EXIT_OK
    records = pretrain.build_corpus(candidates, references, scorer=args.scorer,
                                    extractor=extractor, checker=checker)
    paths = pretrain.write_corpus(records, args.out_dir, prefix=args.prefix,
                                  shard_size=args.shard_size)
    print(f"wrote {len(records)} records to {len(paths)} shard(s) "
          f"under {args.out_dir}")
    return EXIT_OK


def cmd_candidate_sim(args) -> int:
    examples = load_dataset(args.dataset, format=args.format)
    if args.dry_run:
        print("dry run ok: dataset loaded, no files written")
        return EXIT_OK
    dist = metaeval.candidate_similarity(examples)
    prefix = Path(args.out_prefix)
    metaeval.write_histogram_csv(dist, _out(prefix, ".hist.csv"),
                                 bins=args.bins)
    stats = {
        "n_pairs": int(len(dist.values)),
        "mean": dist.mean,
        "q1": dist.q1,
        "median": dist.median,
        "q3": dist.q3,
    }
    with _out(prefix, ".stats.json").open("w", encoding="utf-8") as f:
        json.dump(stats, f, indent=2)
        f.write("\n")
    print(f"{stats['n_pairs']} candidate pairs, mean similarity "
          f"{stats['mean']:.3f}")
    return EXIT_OK


def _is_backend_failure(error: BaseException) -> bool:
    seen = error
    while seen is not None:
        if isinstance(seen, BackendError):
            return True
        seen = seen.__cause__
    return False


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AcuEvalError as e:
        if _is_backend_failure(e):
            print(f"backend error: {e}", file=sys.stderr)
            return EXIT_BACKEND
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as e:
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return EXIT_IO


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
