"""Word-level occlusion saliency and bucketization into an id channel.

The attribution is leave-one-word-out: the saliency of a word for a
label is the drop in that label's probability when all of the word's
tokens are jointly replaced by the mask token. Values live in [-1, 1];
0 means the word did not matter.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .labels import LABEL_INDEX

_WORD = re.compile(r"\w+|[^\w\s]")


def word_units(text: str) -> list[str]:
    """Original-case word units, aligned 1:1 with split_words(text)."""
    return _WORD.findall(text)


@dataclass(frozen=True)
class SaliencyVector:
    words: tuple[str, ...]
    values: tuple[float, ...]
    label: str

    def __post_init__(self):
        if len(self.words) != len(self.values):
            raise ValueError("one saliency value per word required")

    def to_debug_json(self) -> str:
        return json.dumps({"words": list(self.words),
                           "values": [round(v, 6) for v in self.values],
                           "label": self.label}, ensure_ascii=False)


def bucketize(values, buckets: int) -> np.ndarray:
    """Uniform buckets over [-1, 1]: id = floor((v+1)/2 * B), clamped to B-1.

    For odd B, v=0 lands in the center bucket (B-1)/2. Values outside
    [-1, 1] are clipped with a warning. Monotone in v.
    """
    if buckets % 2 == 0 or buckets < 3:
        raise ConfigError(f"bucket count must be odd and >= 3, got {buckets}")
    v = np.asarray(values, dtype=float)
    if v.size and (v.max() > 1.0 or v.min() < -1.0):
        warnings.warn("saliency values outside [-1, 1] were clipped")
        v = np.clip(v, -1.0, 1.0)
    ids = np.floor((v + 1.0) / 2.0 * buckets).astype(int)
    return np.clip(ids, 0, buckets - 1)


def neutral_bucket(buckets: int) -> int:
    return (buckets - 1) // 2


def occlusion_saliency(clf, sentence_text: str, label: str) -> SaliencyVector:
    """Saliency of every word of ``sentence_text`` for ``label``.

    ``clf`` is a trained MoveClassifier; probabilities are computed with
    a neutral saliency channel, so the attribution never feeds itself.
    """
    if label not in LABEL_INDEX:
        raise KeyError(f"unknown label {label!r}")
    tokenizer = getattr(clf, "tokenizer", None)
    if tokenizer is None or not hasattr(tokenizer, "mask_id"):
        raise ConfigError("classifier has no tokenizer with a mask token")

    words = word_units(sentence_text)
    if not words:
        return SaliencyVector(words=(), values=(), label=label)
    token_ids, word_spans = tokenizer.encode_words([w.lower() for w in words])

    variants = [list(token_ids)]
    for start, end in word_spans:
        masked = list(token_ids)
        for i in range(start, end):
            masked[i] = tokenizer.mask_id
        variants.append(masked)

    probs = clf.probabilities_for_token_lists(variants)  # (n_words + 1, 8)
    col = LABEL_INDEX[label]
    full = probs[0, col]
    values = np.clip(full - probs[1:, col], -1.0, 1.0)
    return SaliencyVector(words=tuple(words), values=tuple(float(v) for v in values),
                          label=label)
