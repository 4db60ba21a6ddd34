"""Splitting, micro / per-label precision-recall-F1, variant comparison.

Evaluation is sentence-level: gold and predicted label sets per sentence
id, scored over pooled (sentence, label) pairs. Splits are abstract-level
so the context variant never reads a test sentence during training.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import MovekitError, ValidationError
from .labels import LABEL_CODES
from .records import AnnotatedAbstract
from .segment import SegmenterConfig, segment_sentences
from .stats import round2


@dataclass(frozen=True)
class SplitSpec:
    ratio: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.ratio < 1.0:
            raise ValidationError(f"split ratio must be in (0, 1), got {self.ratio}")


@dataclass
class SplitResult:
    train: list[AnnotatedAbstract]
    test: list[AnnotatedAbstract]
    n_train_sentences: int = 0
    n_test_sentences: int = 0


def split(corpus: Sequence[AnnotatedAbstract], spec: SplitSpec,
          seg_cfg: SegmenterConfig | None = None) -> SplitResult:
    """Deterministic abstract-level split; sentence counts reported."""
    if not corpus:
        raise ValidationError("cannot split an empty corpus")
    rng = np.random.default_rng(spec.seed)
    order = rng.permutation(len(corpus))
    n_train = int(spec.ratio * len(corpus) + 0.5)
    n_train = min(max(n_train, 1), len(corpus) - 1) if len(corpus) > 1 else n_train
    train = [corpus[i] for i in sorted(order[:n_train])]
    test = [corpus[i] for i in sorted(order[n_train:])]
    result = SplitResult(train=train, test=test)
    result.n_train_sentences = sum(len(segment_sentences(a.abstract.text, seg_cfg))
                                   for a in train)
    result.n_test_sentences = sum(len(segment_sentences(a.abstract.text, seg_cfg))
                                  for a in test)
    return result


@dataclass(frozen=True)
class MicroPRF:
    precision: float  # percent, 2 decimals
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int


def _check_same_ids(gold: Mapping, pred: Mapping) -> None:
    missing_pred = sorted(set(gold) - set(pred), key=repr)
    missing_gold = sorted(set(pred) - set(gold), key=repr)
    if missing_pred or missing_gold:
        raise ValidationError(
            f"gold/pred sentence ids differ; missing from pred: {missing_pred[:5]}, "
            f"missing from gold: {missing_gold[:5]}")


def micro_prf(gold: Mapping, pred: Mapping) -> MicroPRF:
    """Pooled precision/recall/F1 over (sentence, label) pairs.

    ``gold`` and ``pred`` map sentence id -> set of label codes and must
    cover exactly the same ids.
    """
    _check_same_ids(gold, pred)
    tp = fp = fn = 0
    for sid, g in gold.items():
        p = pred[sid]
        tp += len(set(g) & set(p))
        fp += len(set(p) - set(g))
        fn += len(set(g) - set(p))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MicroPRF(precision=round2(precision * 100), recall=round2(recall * 100),
                    f1=round2(f1 * 100), tp=tp, fp=fp, fn=fn)


@dataclass(frozen=True)
class LabelPRF:
    precision: float
    recall: float
    f1: float
    support: int
    zero_support: bool = False


def per_label_prf(gold: Mapping, pred: Mapping) -> dict[str, LabelPRF]:
    """One-vs-rest P/R/F1 per label; zero-support labels are flagged."""
    _check_same_ids(gold, pred)
    out: dict[str, LabelPRF] = {}
    for code in LABEL_CODES:
        tp = fp = fn = 0
        for sid, g in gold.items():
            in_g, in_p = code in g, code in pred[sid]
            tp += in_g and in_p
            fp += in_p and not in_g
            fn += in_g and not in_p
        support = tp + fn
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        out[code] = LabelPRF(precision=round2(precision * 100), recall=round2(recall * 100),
                             f1=round2(f1 * 100), support=support,
                             zero_support=(support == 0))
    return out


@dataclass
class EvalReport:
    micro: MicroPRF
    per_label: dict
    confusion: dict            # gold label -> pred label -> count (single-label only)
    n_sentences: int
    n_gold_pairs: int
    n_pred_pairs: int


def build_report(gold: Mapping, pred: Mapping) -> EvalReport:
    micro = micro_prf(gold, pred)
    per_label = per_label_prf(gold, pred)
    confusion: dict[str, dict[str, int]] = {}
    for sid, g in gold.items():
        p = pred[sid]
        if len(g) == 1 and len(p) == 1:
            (gl,), (pl,) = tuple(g), tuple(p)
            confusion.setdefault(gl, {})[pl] = confusion.get(gl, {}).get(pl, 0) + 1
    return EvalReport(micro=micro, per_label=per_label, confusion=confusion,
                      n_sentences=len(gold),
                      n_gold_pairs=sum(len(s) for s in gold.values()),
                      n_pred_pairs=sum(len(s) for s in pred.values()))


def report_to_text(report: EvalReport) -> str:
    lines = [f"sentences: {report.n_sentences}  gold pairs: {report.n_gold_pairs}  "
             f"predicted pairs: {report.n_pred_pairs}",
             f"micro  P {report.micro.precision:.2f}  R {report.micro.recall:.2f}  "
             f"F1 {report.micro.f1:.2f}",
             "label  P       R       F1      support"]
    for code in LABEL_CODES:
        r = report.per_label[code]
        flag = "  (no gold support)" if r.zero_support else ""
        lines.append(f"{code}    {r.precision:7.2f} {r.recall:7.2f} {r.f1:7.2f} "
                     f"{r.support:7d}{flag}")
    return "\n".join(lines)


def report_to_json_dict(report: EvalReport) -> dict:
    return {
        "micro": {"precision": report.micro.precision, "recall": report.micro.recall,
                  "f1": report.micro.f1, "tp": report.micro.tp, "fp": report.micro.fp,
                  "fn": report.micro.fn},
        "per_label": {c: {"precision": r.precision, "recall": r.recall, "f1": r.f1,
                          "support": r.support, "zero_support": r.zero_support}
                      for c, r in report.per_label.items()},
        "confusion": report.confusion,
        "n_sentences": report.n_sentences,
        "n_gold_pairs": report.n_gold_pairs,
        "n_pred_pairs": report.n_pred_pairs,
    }


# -- variant comparison --

class ComparisonError(MovekitError):
    def __init__(self, message: str, report: "ComparisonReport"):
        super().__init__(message)
        self.report = report


@dataclass
class VariantRow:
    variant: str
    micro: MicroPRF | None = None
    status: str = "ok"         # or "failed: <reason>"
    metrics: list = field(default_factory=list)


@dataclass
class ComparisonReport:
    rows: list
    seed: int
    split_ratio: float
    n_train_sentences: int
    n_test_sentences: int
    train_epochs: int

    def to_text(self) -> str:
        lines = [f"seed {self.seed}, split {self.split_ratio:.2f} "
                 f"({self.n_train_sentences} train / {self.n_test_sentences} test "
                 f"sentences), {self.train_epochs} epochs",
                 "Variant    P (%)    R (%)    F1 (%)"]
        for row in self.rows:
            if row.micro is None:
                lines.append(f"{row.variant:<10} {row.status}")
            else:
                lines.append(f"{row.variant:<10} {row.micro.precision:7.2f}  "
                             f"{row.micro.recall:7.2f}  {row.micro.f1:7.2f}")
        return "\n".join(lines)

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed, "split_ratio": self.split_ratio,
            "n_train_sentences": self.n_train_sentences,
            "n_test_sentences": self.n_test_sentences,
            "train_epochs": self.train_epochs,
            "rows": [{"variant": r.variant, "status": r.status,
                      "micro": None if r.micro is None else
                      {"precision": r.micro.precision, "recall": r.micro.recall,
                       "f1": r.micro.f1}} for r in self.rows],
        }


def compare_variants(corpus: Sequence[AnnotatedAbstract],
                     variants: Sequence[str] = ("plain", "context", "saliency"),
                     spec: SplitSpec | None = None,
                     tc=None, mc=None,
                     seg_cfg: SegmenterConfig | None = None) -> ComparisonReport:
    """Train and evaluate each variant on one shared split.

    Any variant that fails to train aborts the comparison with a
    ComparisonError carrying the partial report (failed rows marked).
    """
    from . import classifier as clf_mod

    spec = spec or SplitSpec()
    tc = tc or clf_mod.TrainConfig()
    mc = mc or clf_mod.ModelConfig()
    parts = split(corpus, spec, seg_cfg)
    inner = split(parts.train, SplitSpec(ratio=0.9, seed=spec.seed), seg_cfg)

    report = ComparisonReport(rows=[], seed=tc.seed, split_ratio=spec.ratio,
                              n_train_sentences=parts.n_train_sentences,
                              n_test_sentences=parts.n_test_sentences,
                              train_epochs=tc.epochs)
    failure = None
    for variant in variants:
        row = VariantRow(variant=variant)
        report.rows.append(row)
        if failure is not None:
            row.status = "skipped (earlier variant failed)"
            row.micro = None
            continue
        try:
            vmc = replace(mc, variant=variant)
            k = vmc.context_window
            train_ex = clf_mod.corpus_to_examples(inner.train, seg_cfg, k)
            dev_ex = clf_mod.corpus_to_examples(inner.test, seg_cfg, k)
            test_ex = clf_mod.corpus_to_examples(parts.test, seg_cfg, k)
            model, metrics = clf_mod.train(train_ex, tc, vmc, dev_examples=dev_ex)
            row.metrics = metrics
            preds = model.predict_examples(test_ex)
            gold = {ex.id: set(ex.labels) for ex in test_ex}
            pred = {ex.id: set(p.labels) for ex, p in zip(test_ex, preds)}
            row.micro = micro_prf(gold, pred)
        except Exception as e:  # noqa: BLE001 - partial results are the contract
            row.status = f"failed: {e}"
            failure = e
    if failure is not None:
        raise ComparisonError(f"variant comparison aborted: {failure}", report)
    return report
