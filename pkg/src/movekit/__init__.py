"""movekit: move-structure annotation toolkit for research-article abstracts.

Ingest abstracts, segment sentences, auto-label rhetorical moves with a
saliency-attributed multi-label classifier, run a human review loop, and
compute corpus statistics and evaluation metrics.
"""

from .labels import LABEL_CODES, MOVE_LABELS, MoveLabel, get_label, label_colors
from .records import (
    Abstract,
    AnnotatedAbstract,
    Annotation,
    Sentence,
    Span,
    align_spans_to_sentences,
    load_corpus,
    parse_doccano_record,
    save_corpus,
    serialize_doccano,
    validate,
)
from .segment import SegmenterConfig, emit_sentence_lines, segment_sentences
from .ingest import parse_bib, parse_tabular_export
from .classifier import (
    EncoderConfig,
    ModelConfig,
    MoveClassifier,
    Prediction,
    SentenceExample,
    TrainConfig,
    corpus_to_examples,
    encode,
    train,
)
from .saliency import SaliencyVector, bucketize, occlusion_saliency
from .stats import compute_corpus_stats, label_frequency, label_occurrence
from .evaluation import SplitSpec, compare_variants, micro_prf, per_label_prf, split

__version__ = "0.1.0"

__all__ = [
    "LABEL_CODES", "MOVE_LABELS", "MoveLabel", "get_label", "label_colors",
    "Abstract", "AnnotatedAbstract", "Annotation", "Sentence", "Span",
    "align_spans_to_sentences", "load_corpus", "parse_doccano_record",
    "save_corpus", "serialize_doccano", "validate",
    "SegmenterConfig", "emit_sentence_lines", "segment_sentences",
    "parse_bib", "parse_tabular_export",
    "EncoderConfig", "ModelConfig", "MoveClassifier", "Prediction",
    "SentenceExample", "TrainConfig", "corpus_to_examples", "encode", "train",
    "SaliencyVector", "bucketize", "occlusion_saliency",
    "compute_corpus_stats", "label_frequency", "label_occurrence",
    "SplitSpec", "compare_variants", "micro_prf", "per_label_prf", "split",
    "__version__",
]
