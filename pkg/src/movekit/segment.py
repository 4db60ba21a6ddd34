"""Rule-based, offset-exact sentence segmentation for abstract prose.

The segmenter returns sentences as exact substrings of the input with
code-point offsets; everything between two sentences is whitespace, so
the input can always be reconstructed from the sentences plus the
skipped gaps. Terminators inside URLs, decimal numbers and known
abbreviations do not split.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .records import Abstract, Sentence

_TERMINATOR_RUN = re.compile(r"[.!?]+")
_URL = re.compile(r"(?:https?://|www\.)\S+")
_CLOSERS = ")]}\"'’”"
_OPENERS = "([{\"'‘“"
_TRAILING_PUNCT = ".,;:!?)\"']}"


def _load_list(name: str) -> frozenset[str]:
    path = resources.files("movekit").joinpath(f"data/{name}")
    entries = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.add(line.lower())
    return frozenset(entries)


@lru_cache(maxsize=1)
def default_abbreviations() -> frozenset[str]:
    return _load_list("abbreviations.txt")


@lru_cache(maxsize=1)
def default_terminal_abbreviations() -> frozenset[str]:
    return _load_list("terminal_abbreviations.txt")


@dataclass(frozen=True)
class SegmenterConfig:
    abbreviation_list: frozenset[str] = field(default_factory=default_abbreviations)
    terminal_abbreviations: frozenset[str] = field(default_factory=default_terminal_abbreviations)
    protect_urls: bool = True
    min_sentence_chars: int = 2

    def __post_init__(self):
        if self.min_sentence_chars < 1:
            raise ValueError("min_sentence_chars must be >= 1")
        for entry in list(self.abbreviation_list) + list(self.terminal_abbreviations):
            if not entry.endswith("."):
                raise ValueError(f"abbreviation entry {entry!r} does not end with '.'")


DEFAULT_CONFIG = SegmenterConfig()


def _mask_urls(text: str) -> str:
    """Replace URL characters with 'x' so their dots are invisible to the
    scanner; a sentence-final period after the URL is left exposed."""
    out = list(text)
    for m in _URL.finditer(text):
        end = m.end()
        while end > m.start() and text[end - 1] in _TRAILING_PUNCT:
            end -= 1
        for i in range(m.start(), end):
            out[i] = "x"
    return "".join(out)


def _token_before(text: str, dot_end: int) -> str:
    """Maximal non-space run ending at the terminator (inclusive),
    stripped of opening punctuation."""
    start = dot_end - 1
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start:dot_end].lstrip(_OPENERS)


def _is_sentence_start(ch: str) -> bool:
    return ch.isupper() or ch.isdigit() or ch in _OPENERS or ch in "$%#@&"


def segment_sentences(text: str, cfg: SegmenterConfig | None = None) -> list[Sentence]:
    """Split ``text`` into offset-exact sentences.

    Input with no usable terminator comes back as a single sentence;
    empty or whitespace-only input raises ValueError.
    """
    if cfg is None:
        cfg = DEFAULT_CONFIG
    if not text or not text.strip():
        raise ValueError("cannot segment empty text")

    scan = _mask_urls(text) if cfg.protect_urls else text
    n = len(text)
    boundaries: list[int] = []  # exclusive end offset of each completed sentence
    sent_start = 0

    for m in _TERMINATOR_RUN.finditer(scan):
        run_start, run_end = m.start(), m.end()
        run = scan[run_start:run_end]

        if run == ".":
            # decimal number: 3.5 stays intact
            if (run_start > 0 and scan[run_start - 1].isdigit()
                    and run_end < n and scan[run_end].isdigit()):
                continue
            raw_token = _token_before(scan, run_end)
            token = raw_token.lower()
            if token in cfg.abbreviation_list:
                continue
            is_terminal_abbrev = token in cfg.terminal_abbreviations
            # bare initial such as "J." in "J. Smith"
            if (not is_terminal_abbrev and len(raw_token) == 2
                    and raw_token[0].isalpha() and raw_token[0].isupper()
                    and run_end < n):
                continue
        else:
            is_terminal_abbrev = False

        end = run_end
        while end < n and scan[end] in _CLOSERS:
            end += 1

        if end < n:
            j = end
            while j < n and scan[j].isspace():
                j += 1
            if j == end:
                continue  # no whitespace after terminator: U.S.A., file.name
            if j < n:
                nxt = scan[j]
                if is_terminal_abbrev:
                    if not nxt.isupper():
                        continue
                elif not _is_sentence_start(nxt):
                    continue

        if len(text[sent_start:end].strip()) < cfg.min_sentence_chars:
            continue  # fragment too short: merge forward
        boundaries.append(end)
        sent_start = end
        if end >= n:
            break

    # whatever remains after the last boundary
    segments = []
    prev = 0
    for b in boundaries:
        segments.append((prev, b))
        prev = b
    tail = text[prev:]
    if tail.strip():
        if len(tail.strip()) < cfg.min_sentence_chars and segments:
            segments[-1] = (segments[-1][0], n)
        else:
            segments.append((prev, n))

    sentences: list[Sentence] = []
    for raw_start, raw_end in segments:
        start, end = raw_start, raw_end
        while start < end and text[start].isspace():
            start += 1
        while end > start and text[end - 1].isspace():
            end -= 1
        if start == end:
            continue
        sentences.append(Sentence(text=text[start:end], start=start, end=end,
                                  index=len(sentences)))
    return sentences


def emit_sentence_lines(abstract: Abstract, cfg: SegmenterConfig | None = None) -> str:
    """One segmented sentence per line, original punctuation preserved."""
    sents = segment_sentences(abstract.text, cfg)
    return "\n".join(s.text for s in sents) + "\n"


def reconstruct(text: str, sentences: list[Sentence]) -> str:
    """Rebuild the input from sentences plus the skipped gaps (test helper)."""
    parts = []
    cursor = 0
    for s in sentences:
        parts.append(text[cursor:s.start])
        parts.append(s.text)
        cursor = s.end
    parts.append(text[cursor:])
    return "".join(parts)
