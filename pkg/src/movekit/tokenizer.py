"""Lowercased word tokenization with a trained subword vocabulary.

Words are whitespace/punctuation units; each word is greedily split
into vocabulary pieces (continuations carry a ``##`` prefix), falling
back to characters, so the word -> token alignment needed by word-level
saliency is always available.
"""

from __future__ import annotations

import re
from collections import Counter
from typing import Iterable, Sequence

PAD, UNK, CLS, SEP, MASK = "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"
SPECIALS = (PAD, UNK, CLS, SEP, MASK)

_WORD = re.compile(r"\w+|[^\w\s]")


def split_words(text: str) -> list[str]:
    """Lowercased word units: runs of letters/digits or single symbols."""
    return [w.lower() for w in _WORD.findall(text)]


class Tokenizer:
    def __init__(self, vocab: Sequence[str]):
        if tuple(vocab[:len(SPECIALS)]) != SPECIALS:
            raise ValueError("vocabulary must start with the special tokens")
        self.vocab = list(vocab)
        self.ids = {piece: i for i, piece in enumerate(self.vocab)}
        if len(self.ids) != len(self.vocab):
            raise ValueError("duplicate pieces in vocabulary")
        self.pad_id = self.ids[PAD]
        self.unk_id = self.ids[UNK]
        self.cls_id = self.ids[CLS]
        self.sep_id = self.ids[SEP]
        self.mask_id = self.ids[MASK]
        self._max_piece = max((len(p) for p in self.vocab), default=1)

    def __len__(self) -> int:
        return len(self.vocab)

    def encode_word(self, word: str) -> list[int]:
        """Greedy longest-match wordpiece split of one lowercased word."""
        if word in self.ids:
            return [self.ids[word]]
        pieces: list[int] = []
        i = 0
        while i < len(word):
            prefix = "" if i == 0 else "##"
            j = min(len(word), i + self._max_piece)
            while j > i:
                piece = prefix + word[i:j]
                if piece in self.ids:
                    pieces.append(self.ids[piece])
                    break
                j -= 1
            else:
                return [self.unk_id]  # unseen character somewhere in the word
            i = j
        return pieces

    def encode_words(self, words: Sequence[str]) -> tuple[list[int], list[tuple[int, int]]]:
        """Token ids for a word sequence plus per-word (first, last+1) token
        ranges -- the alignment map used for saliency masking."""
        ids: list[int] = []
        spans: list[tuple[int, int]] = []
        for w in words:
            start = len(ids)
            ids.extend(self.encode_word(w))
            spans.append((start, len(ids)))
        return ids, spans

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for piece in self.vocab:
                f.write(piece + "\n")

    @classmethod
    def load(cls, path) -> "Tokenizer":
        with open(path, encoding="utf-8") as f:
            return cls([line.rstrip("\n") for line in f if line.rstrip("\n")])

    @classmethod
    def train(cls, texts: Iterable[str], vocab_size: int = 2000) -> "Tokenizer":
        """Build a vocabulary: specials, then every seen character (with
        ``##`` continuation forms), then the most frequent whole words."""
        counts: Counter[str] = Counter()
        chars: set[str] = set()
        for text in texts:
            for w in split_words(text):
                counts[w] += 1
                chars.update(w)
        vocab = list(SPECIALS)
        for c in sorted(chars):
            vocab.append(c)
            vocab.append("##" + c)
        seen = set(vocab)
        for word, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
            if len(vocab) >= vocab_size:
                break
            if word not in seen:
                vocab.append(word)
                seen.add(word)
        return cls(vocab)
