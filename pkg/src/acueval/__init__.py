"""Content-unit based summarization evaluation toolkit.

Two-stage reference-based evaluation (extract atomic content units from one
text, check their presence in another, aggregate into recall/F1), a
self-contained ROUGE engine, meta-evaluation statistics over score matrices
(summary/system-level correlations, paired bootstrap significance,
preference concordance), content-unit quality analysis, and pre-training
corpus construction for a one-stage regression metric.
"""

from .backends import (ACU_DELIMITER, CachedChecker, CheckerBackend,
                       ExtractorBackend, FixtureExtractor, GoldAcuExtractor,
                       LexicalChecker, RemoteChecker, RemoteExtractor,
                       RemoteScorer, SentenceExtractor)
from .dataset import (dataset_stats, load_dataset, load_score_csv,
                      save_dataset, save_score_csv)
from .errors import (AcuEvalError, AlignmentError, BackendError,
                     DegenerateInputError, ExtractionError, ParseError,
                     ScoringError, ValidationError)
from .metaeval import (CorrelationReport, PreferencePair,
                       SimilarityDistribution, acu_quality,
                       candidate_similarity, correlate, segment_level, significance,
                       summary_level, system_level, tau_like)
from .pipeline import (AuditEntry, CorpusResult, StageTiming, TwoStageResult,
                       check_acu, check_acus, extract_acus, score_corpus,
                       score_corpus_one_stage, two_stage_f1, two_stage_recall,
                       write_audit_jsonl)
from .pretrain import PretrainRecord, build_corpus, load_corpus, write_corpus
from .rouge import rouge_avg, rouge_l, rouge_n
from .tokenizer import TokenSequence, tokenize
from .types import (Acu, AcuSet, DatasetSummary, EntailmentJudgment,
                    EvalExample, RougeScore, ScoreMatrix, harmonic_mean)

__version__ = "0.1.0"
