"""Multi-label move recognition per sentence.

Three variants share one architecture and differ only in input:

* ``plain``    -- the target sentence alone.
* ``context``  -- neighbor sentences appended with segment id 1, plus a
  bucketized sentence-position feature.
* ``saliency`` -- the target sentence plus a per-token saliency-bucket
  channel. Inference is two-pass: a neutral-channel pass picks a
  provisional label, occlusion saliency is computed for it, and the
  re-encoded input yields the final prediction.

Each sentence gets 8 independent probabilities (one-vs-rest heads);
labels are those at or above the decision threshold, falling back to the
argmax label so every sentence receives at least one move.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import network, saliency as saliency_mod
from .errors import ConfigError, TrainingError, ValidationError
from .labels import LABEL_CODES, LABEL_INDEX, N_LABELS
from .records import Abstract, Annotation, Span
from .segment import SegmenterConfig, segment_sentences
from .tokenizer import Tokenizer, split_words

VARIANTS = ("plain", "context", "saliency")


@dataclass(frozen=True)
class EncoderConfig:
    vocab_size: int = 2000
    hidden: int = 64
    layers: int = 2
    heads: int = 2
    ff: int = 128
    max_len: int = 64


@dataclass(frozen=True)
class ModelConfig:
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    variant: str = "plain"
    context_window: int = 1
    sentence_position_feature: bool = True
    position_buckets: int = 10
    saliency_buckets: int = 11
    decision_threshold: float = 0.5

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not 0.0 < self.decision_threshold < 1.0:
            raise ConfigError("decision_threshold must be strictly between 0 and 1")
        if self.saliency_buckets % 2 == 0 or self.saliency_buckets < 3:
            raise ConfigError("saliency_buckets must be odd and >= 3")
        if self.context_window < 0:
            raise ConfigError("context_window must be >= 0")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 2e-3
    seed: int = 0
    patience: int = 0               # 0 disables early stopping
    class_weighting: str = "none"   # or "inverse-frequency"
    saliency_warmup_epochs: int = 3
    saliency_refresh_epochs: int = 5

    def __post_init__(self):
        if self.class_weighting not in ("none", "inverse-frequency"):
            raise ConfigError(f"unknown class_weighting {self.class_weighting!r}")


@dataclass
class EncodedSentence:
    token_ids: np.ndarray
    segment_ids: np.ndarray
    position_ids: np.ndarray
    saliency_bucket_ids: np.ndarray
    sentence_position_id: int = 0
    truncated: bool = False
    n_target_tokens: int = 0              # target word-piece count that survived
    word_spans: tuple = ()                # per-word piece ranges within the target

    def __post_init__(self):
        n = len(self.token_ids)
        if not (len(self.segment_ids) == len(self.position_ids)
                == len(self.saliency_bucket_ids) == n):
            raise ValidationError("encoded channels must have equal length")


@dataclass(frozen=True)
class Prediction:
    probabilities: dict
    labels: frozenset
    scores_source: str


@dataclass(frozen=True)
class SentenceExample:
    """One classifier example: a sentence with its gold labels and window."""
    id: object
    text: str
    labels: frozenset = frozenset()
    neighbors: tuple = ()        # neighbor sentence texts, document order
    position_index: int = 0
    n_sentences: int = 1


def position_bucket(position_index: int, n_sentences: int, buckets: int) -> int:
    frac = position_index / max(n_sentences, 1)
    return min(int(frac * buckets), buckets - 1)


def encode(sentence_text: str, neighbors: Sequence[str], position_index: int,
           n_sentences: int, saliency_values, cfg: ModelConfig,
           tokenizer: Tokenizer) -> EncodedSentence:
    """Build the four id channels for one sentence.

    ``saliency_values`` are per-word scores in [-1, 1] (or None for a
    neutral channel). Over-length inputs lose context tokens first, then
    the target tail; the truncation is flagged.
    """
    max_len = cfg.encoder.max_len
    neutral = saliency_mod.neutral_bucket(cfg.saliency_buckets)
    words = split_words(sentence_text)
    target_pieces, word_spans = tokenizer.encode_words(words)

    truncated = False
    budget = max_len - 2  # [CLS] ... [SEP]
    if len(target_pieces) > budget:
        target_pieces = target_pieces[:budget]
        truncated = True

    tokens = [tokenizer.cls_id] + target_pieces + [tokenizer.sep_id]
    segments = [0] * len(tokens)
    sal = [neutral] * len(tokens)

    if saliency_values is not None:
        if len(saliency_values) != len(words):
            raise ValidationError(
                f"{len(saliency_values)} saliency values for {len(words)} words")
        bucket_ids = saliency_mod.bucketize(saliency_values, cfg.saliency_buckets)
        for (ws, we), b in zip(word_spans, bucket_ids):
            for p in range(ws, we):
                if p < len(target_pieces):
                    sal[1 + p] = int(b)

    if cfg.variant == "context" and neighbors:
        room = max_len - len(tokens)
        ctx: list[int] = []
        for ntext in neighbors:
            pieces, _ = tokenizer.encode_words(split_words(ntext))
            ctx.extend(pieces + [tokenizer.sep_id])
        if len(ctx) > room:
            ctx = ctx[:room]
            truncated = True
        tokens.extend(ctx)
        segments.extend([1] * len(ctx))
        sal.extend([neutral] * len(ctx))

    sentpos_id = 0
    if cfg.variant == "context" and cfg.sentence_position_feature:
        sentpos_id = 1 + position_bucket(position_index, n_sentences, cfg.position_buckets)

    return EncodedSentence(
        token_ids=np.asarray(tokens, dtype=np.int64),
        segment_ids=np.asarray(segments, dtype=np.int64),
        position_ids=np.arange(len(tokens), dtype=np.int64),
        saliency_bucket_ids=np.asarray(sal, dtype=np.int64),
        sentence_position_id=sentpos_id,
        truncated=truncated,
        n_target_tokens=len(target_pieces),
        word_spans=tuple(word_spans),
    )


def make_batch(encs: Sequence[EncodedSentence], pad_id: int, neutral: int) -> dict:
    n = len(encs)
    t = max(len(e.token_ids) for e in encs)
    batch = {
        "tokens": np.full((n, t), pad_id, dtype=np.int64),
        "segments": np.zeros((n, t), dtype=np.int64),
        "positions": np.zeros((n, t), dtype=np.int64),
        "saliency": np.full((n, t), neutral, dtype=np.int64),
        "sentpos": np.array([e.sentence_position_id for e in encs], dtype=np.int64),
        "mask": np.zeros((n, t), dtype=np.float64),
    }
    for i, e in enumerate(encs):
        ln = len(e.token_ids)
        batch["tokens"][i, :ln] = e.token_ids
        batch["segments"][i, :ln] = e.segment_ids
        batch["positions"][i, :ln] = e.position_ids
        batch["saliency"][i, :ln] = e.saliency_bucket_ids
        batch["mask"][i, :ln] = 1.0
    return batch


def decide_labels(prob_row: np.ndarray, threshold: float) -> frozenset:
    chosen = {LABEL_CODES[i] for i in range(N_LABELS) if prob_row[i] >= threshold}
    if not chosen:
        chosen = {LABEL_CODES[int(np.argmax(prob_row))]}
    return frozenset(chosen)


class MoveClassifier:
    """A trained model: tokenizer + config + weights. Immutable in use;
    share freely across threads for prediction."""

    def __init__(self, tokenizer: Tokenizer, config: ModelConfig,
                 params: dict, model_version: str = "unversioned"):
        self.tokenizer = tokenizer
        self.config = config
        self.net_config = network.NetConfig(
            vocab_size=len(tokenizer),
            hidden=config.encoder.hidden,
            layers=config.encoder.layers,
            heads=config.encoder.heads,
            ff=config.encoder.ff,
            max_len=config.encoder.max_len,
            n_outputs=N_LABELS,
            saliency_buckets=config.saliency_buckets,
            sentpos_buckets=config.position_buckets,
        )
        self.params = params
        self.model_version = model_version

    # -- forward helpers --

    def probabilities_for_encodings(self, encs: Sequence[EncodedSentence],
                                    chunk: int = 256) -> np.ndarray:
        neutral = saliency_mod.neutral_bucket(self.config.saliency_buckets)
        rows = []
        for i in range(0, len(encs), chunk):
            batch = make_batch(encs[i:i + chunk], self.tokenizer.pad_id, neutral)
            probs, _ = network.forward(self.params, self.net_config, batch)
            rows.append(probs)
        return np.concatenate(rows, axis=0) if rows else np.zeros((0, N_LABELS))

    def probabilities_for_token_lists(self, token_lists: Sequence[Sequence[int]]) -> np.ndarray:
        """Plain-style forward over raw target-piece lists ([CLS] x [SEP],
        neutral channels). This is the surface occlusion saliency probes."""
        neutral = saliency_mod.neutral_bucket(self.config.saliency_buckets)
        budget = self.config.encoder.max_len - 2
        encs = []
        for pieces in token_lists:
            pieces = list(pieces)[:budget]
            tokens = [self.tokenizer.cls_id] + pieces + [self.tokenizer.sep_id]
            encs.append(EncodedSentence(
                token_ids=np.asarray(tokens, dtype=np.int64),
                segment_ids=np.zeros(len(tokens), dtype=np.int64),
                position_ids=np.arange(len(tokens), dtype=np.int64),
                saliency_bucket_ids=np.full(len(tokens), neutral, dtype=np.int64),
            ))
        return self.probabilities_for_encodings(encs)

    # -- prediction --

    def _encode_example(self, ex: SentenceExample, saliency_values=None) -> EncodedSentence:
        return encode(ex.text, ex.neighbors, ex.position_index, ex.n_sentences,
                      saliency_values, self.config, self.tokenizer)

    def predict_examples(self, examples: Sequence[SentenceExample]) -> list[Prediction]:
        cfg = self.config
        encs = [self._encode_example(ex) for ex in examples]
        probs = self.probabilities_for_encodings(encs)

        if cfg.variant == "saliency" and len(examples):
            final_encs = []
            for ex, row in zip(examples, probs):
                provisional = LABEL_CODES[int(np.argmax(row))]
                sal = saliency_mod.occlusion_saliency(self, ex.text, provisional)
                final_encs.append(self._encode_example(ex, saliency_values=sal.values))
            probs = self.probabilities_for_encodings(final_encs)

        return [Prediction(probabilities={c: float(row[LABEL_INDEX[c]]) for c in LABEL_CODES},
                           labels=decide_labels(row, cfg.decision_threshold),
                           scores_source=cfg.variant)
                for row in probs]

    def predict(self, sentence_text: str, neighbors: Sequence[str] = (),
                position_index: int = 0, n_sentences: int = 1,
                cfg: ModelConfig | None = None) -> Prediction:
        if cfg is not None and cfg.variant != self.config.variant:
            raise ConfigError(f"model was trained as {self.config.variant!r}, "
                              f"asked to predict as {cfg.variant!r}")
        ex = SentenceExample(id=None, text=sentence_text, neighbors=tuple(neighbors),
                             position_index=position_index, n_sentences=n_sentences)
        return self.predict_examples([ex])[0]

    def predict_abstract(self, abstract: Abstract,
                         seg_cfg: SegmenterConfig | None = None) -> Annotation:
        """Auto-annotate: one sentence-extent span per predicted label."""
        if not abstract.text.strip():
            warnings.warn(f"abstract {abstract.id!r} is empty; nothing to annotate")
            return Annotation()
        sents = segment_sentences(abstract.text, seg_cfg)
        k = self.config.context_window
        examples = []
        for s in sents:
            before = [x.text for x in sents[max(0, s.index - k):s.index]]
            after = [x.text for x in sents[s.index + 1:s.index + 1 + k]]
            examples.append(SentenceExample(
                id=(abstract.id, s.index), text=s.text,
                neighbors=tuple(before + after),
                position_index=s.index, n_sentences=len(sents)))
        preds = self.predict_examples(examples)
        spans = []
        for s, pred in zip(sents, preds):
            for code in sorted(pred.labels, key=LABEL_INDEX.get):
                spans.append(Span(s.start, s.end, code))
        spans.sort()
        return Annotation(spans=tuple(spans),
                          provenance=tuple("auto" for _ in spans),
                          model_version=self.model_version)

    # -- artifact I/O --

    def save(self, model_dir) -> None:
        """Write config.json, vocab.txt, weights.npz and a shape manifest."""
        model_dir = Path(model_dir)
        model_dir.mkdir(parents=True, exist_ok=True)
        cfg = asdict(self.config)
        cfg["labels"] = list(LABEL_CODES)
        cfg["model_version"] = self.model_version
        (model_dir / "config.json").write_text(
            json.dumps(cfg, indent=2) + "\n", encoding="utf-8")
        self.tokenizer.save(model_dir / "vocab.txt")
        np.savez(model_dir / "weights.npz", **self.params)
        manifest = {k: list(v.shape) for k, v in sorted(self.params.items())}
        (model_dir / "manifest.json").write_text(
            json.dumps(manifest, indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, model_dir) -> "MoveClassifier":
        model_dir = Path(model_dir)
        if not (model_dir / "config.json").exists():
            raise ConfigError(f"no model artifact at {model_dir}")
        cfg = json.loads((model_dir / "config.json").read_text(encoding="utf-8"))
        version = cfg.pop("model_version", "unversioned")
        stored_labels = cfg.pop("labels", list(LABEL_CODES))
        if stored_labels != list(LABEL_CODES):
            raise ConfigError("model artifact was trained with a different label set")
        cfg["encoder"] = EncoderConfig(**cfg["encoder"])
        config = ModelConfig(**cfg)
        tokenizer = Tokenizer.load(model_dir / "vocab.txt")
        with np.load(model_dir / "weights.npz") as npz:
            params = {k: npz[k].copy() for k in npz.files}
        manifest = json.loads((model_dir / "manifest.json").read_text(encoding="utf-8"))
        for k, shape in manifest.items():
            if k not in params or list(params[k].shape) != shape:
                raise ConfigError(f"weight tensor {k!r} missing or mis-shaped")
        return cls(tokenizer, config, params, model_version=version)


def weights_digest(params: dict) -> str:
    h = hashlib.sha256()
    for k in sorted(params):
        h.update(k.encode())
        h.update(np.ascontiguousarray(params[k]).tobytes())
    return h.hexdigest()[:8]


# -- training --

def _targets(examples: Sequence[SentenceExample]) -> np.ndarray:
    y = np.zeros((len(examples), N_LABELS))
    for i, ex in enumerate(examples):
        for code in ex.labels:
            y[i, LABEL_INDEX[code]] = 1.0
    return y


def _micro_f1(gold: Sequence[frozenset], pred: Sequence[frozenset]) -> float:
    tp = sum(len(g & p) for g, p in zip(gold, pred))
    fp = sum(len(p - g) for g, p in zip(gold, pred))
    fn = sum(len(g - p) for g, p in zip(gold, pred))
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)


def _teacher_saliency_label(ex: SentenceExample, prob_row: np.ndarray) -> str:
    """Gold label the training-time saliency is computed for: the gold
    label the current model already rates highest (canonical order ties)."""
    best, best_p = None, -1.0
    for code in sorted(ex.labels, key=LABEL_INDEX.get):
        p = prob_row[LABEL_INDEX[code]]
        if p > best_p:
            best, best_p = code, p
    return best


def train(train_examples: Sequence[SentenceExample], tc: TrainConfig, mc: ModelConfig,
          dev_examples: Sequence[SentenceExample] | None = None,
          tokenizer: Tokenizer | None = None) -> tuple[MoveClassifier, list[dict]]:
    """Train a model; returns (classifier, per-epoch metric records).

    Each metric record is ``{"epoch": e, "loss": l, "dev_micro_f1": f}``
    (dev value None without a dev set). When a dev set is given the
    returned weights are the best dev-F1 epoch's.
    """
    if not train_examples:
        raise TrainingError("empty training dataset")
    for ex in train_examples:
        if not ex.labels:
            raise TrainingError(f"example {ex.id!r} has an empty label set")
        unknown = [c for c in ex.labels if c not in LABEL_INDEX]
        if unknown:
            raise TrainingError(f"example {ex.id!r} has unknown labels {unknown}")
    seen = {c for ex in train_examples for c in ex.labels}
    missing = [c for c in LABEL_CODES if c not in seen]
    if missing:
        warnings.warn(f"labels never seen in training data: {missing}")

    if tokenizer is None:
        tokenizer = Tokenizer.train((ex.text for ex in train_examples),
                                    vocab_size=mc.encoder.vocab_size)
    clf = MoveClassifier(tokenizer, mc, params={}, model_version="training")
    clf.params = network.init_params(clf.net_config, seed=tc.seed)

    encs = [clf._encode_example(ex) for ex in train_examples]
    targets = _targets(train_examples)
    sal_values: list = [None] * len(train_examples)

    pos_weight = None
    if tc.class_weighting == "inverse-frequency":
        counts = targets.sum(axis=0)
        mean_count = counts.sum() / N_LABELS
        pos_weight = np.clip(mean_count / np.maximum(counts, 1.0), 1.0, 20.0)

    dev_gold = [ex.labels for ex in dev_examples] if dev_examples else None

    rng = np.random.default_rng(tc.seed)
    opt = network.Adam(clf.params, lr=tc.learning_rate)
    metrics: list[dict] = []
    best_f1, best_params, best_epoch = -1.0, None, -1
    since_improve = 0

    for epoch in range(1, tc.epochs + 1):
        if (mc.variant == "saliency" and epoch > tc.saliency_warmup_epochs
                and (epoch - tc.saliency_warmup_epochs - 1) % tc.saliency_refresh_epochs == 0):
            probs = clf.probabilities_for_encodings(
                [clf._encode_example(ex) for ex in train_examples])
            for i, ex in enumerate(train_examples):
                label = _teacher_saliency_label(ex, probs[i])
                sal_values[i] = saliency_mod.occlusion_saliency(clf, ex.text, label).values
                encs[i] = clf._encode_example(ex, saliency_values=sal_values[i])

        order = rng.permutation(len(train_examples))
        losses = []
        for i in range(0, len(order), tc.batch_size):
            idx = order[i:i + tc.batch_size]
            batch = make_batch([encs[j] for j in idx], tokenizer.pad_id,
                               saliency_mod.neutral_bucket(mc.saliency_buckets))
            loss, _, grads = network.loss_and_grads(
                clf.params, clf.net_config, batch, targets[idx], pos_weight)
            if not np.isfinite(loss):
                raise TrainingError(
                    f"loss became non-finite at epoch {epoch} "
                    f"(lr={tc.learning_rate}, batch={tc.batch_size})")
            opt.step(clf.params, grads)
            losses.append(loss)

        record = {"epoch": epoch, "loss": float(np.mean(losses)), "dev_micro_f1": None}
        if dev_examples:
            preds = clf.predict_examples(dev_examples)
            f1 = _micro_f1(dev_gold, [p.labels for p in preds])
            record["dev_micro_f1"] = f1
            if f1 > best_f1:
                best_f1, best_epoch = f1, epoch
                best_params = {k: v.copy() for k, v in clf.params.items()}
                since_improve = 0
            else:
                since_improve += 1
                if tc.patience and since_improve >= tc.patience:
                    metrics.append(record)
                    break
        metrics.append(record)

    if best_params is not None:
        clf.params = best_params
    clf.model_version = f"{mc.variant}-s{tc.seed}-{weights_digest(clf.params)}"
    return clf, metrics


def corpus_to_examples(corpus, seg_cfg: SegmenterConfig | None = None,
                       context_window: int = 1) -> list[SentenceExample]:
    """Per-sentence gold examples from annotated abstracts (sentence ids
    are (abstract_id, sentence_index); unlabeled abstracts are skipped)."""
    from .records import align_spans_to_sentences
    out: list[SentenceExample] = []
    k = context_window
    for aa in corpus:
        if not aa.annotation.spans:
            continue
        sents = segment_sentences(aa.abstract.text, seg_cfg)
        label_sets = align_spans_to_sentences(aa, sents)
        for s, labels in zip(sents, label_sets):
            before = [x.text for x in sents[max(0, s.index - k):s.index]]
            after = [x.text for x in sents[s.index + 1:s.index + 1 + k]]
            out.append(SentenceExample(
                id=(aa.abstract.id, s.index), text=s.text, labels=frozenset(labels),
                neighbors=tuple(before + after),
                position_index=s.index, n_sentences=len(sents)))
    return out
