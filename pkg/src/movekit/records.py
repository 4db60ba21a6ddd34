"""Canonical data model for annotated abstracts and their JSON wire format.

One corpus record is a single JSON object per line::

    {"id": 20, "data": "<abstract text>", "label": [[0, 31, "BAC"], ...]}

Offsets are Unicode code-point offsets into ``data`` (start inclusive,
end exclusive), labels are sorted by start on output. An optional
``meta`` key carries venue/discipline/year/title; records written by the
review service additionally carry ``provenance``, ``status`` and
``model_version``. Readers must tolerate all of these extras.

Spans never partially overlap. Two spans may share the exact same
extent when they carry different labels: that is how a multi-label
sentence is represented by the automatic annotator, which cannot place
a sub-sentence boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Sequence

from .errors import AlignmentError, ParseError, ValidationError
from .labels import is_valid_code

DISCIPLINES = ("NLP", "CV", "ME", "CE")
DISCIPLINE_FIELD = {"NLP": "AI", "CV": "AI", "ME": "Engineering", "CE": "Engineering"}

PROVENANCE_VALUES = ("manual", "auto", "corrected")
STATUS_VALUES = ("unlabeled", "auto", "reviewed")


@dataclass(frozen=True)
class Abstract:
    id: int | str
    text: str
    meta: dict = field(default_factory=dict)

    @property
    def discipline(self) -> str | None:
        return self.meta.get("discipline")

    @property
    def field_group(self) -> str | None:
        """AI for NLP/CV, Engineering for ME/CE, None when no discipline."""
        d = self.discipline
        return DISCIPLINE_FIELD.get(d) if d else None


@dataclass(frozen=True, order=True)
class Span:
    start: int
    end: int
    label: str

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end

    def same_extent(self, other: "Span") -> bool:
        return self.start == other.start and self.end == other.end

    def as_triple(self) -> list:
        return [self.start, self.end, self.label]


@dataclass(frozen=True)
class Annotation:
    spans: tuple[Span, ...] = ()
    provenance: tuple[str, ...] = ()
    model_version: str | None = None

    def __post_init__(self):
        if not self.provenance and self.spans:
            object.__setattr__(self, "provenance", tuple("manual" for _ in self.spans))

    @property
    def labels(self) -> set[str]:
        return {s.label for s in self.spans}

    def has_auto(self) -> bool:
        return any(p == "auto" for p in self.provenance)


@dataclass(frozen=True)
class AnnotatedAbstract:
    abstract: Abstract
    annotation: Annotation = field(default_factory=Annotation)
    status: str = "unlabeled"

    @property
    def id(self):
        return self.abstract.id


@dataclass(frozen=True)
class Sentence:
    text: str
    start: int
    end: int
    index: int


def derive_status(annotation: Annotation) -> str:
    if not annotation.spans:
        return "unlabeled"
    return "auto" if annotation.has_auto() else "reviewed"


# -- record-level validation --

def validate(aa: AnnotatedAbstract, include_warnings: bool = False) -> list[str]:
    """Return a list of invariant violations; empty iff the record is valid.

    Gaps between spans are legal and reported only when
    ``include_warnings`` is set (prefixed ``warning:``).
    """
    out: list[str] = []
    text = aa.abstract.text
    n = len(text)
    if not text.strip():
        out.append("abstract text is empty after trimming")
    d = aa.abstract.discipline
    if d is not None and d not in DISCIPLINES:
        out.append(f"unknown discipline {d!r} (expected one of {DISCIPLINES})")

    ann = aa.annotation
    spans = ann.spans
    if len(ann.provenance) != len(spans):
        out.append(f"provenance length {len(ann.provenance)} != span count {len(spans)}")
    for p in ann.provenance:
        if p not in PROVENANCE_VALUES:
            out.append(f"unknown provenance {p!r}")
    if ann.model_version is not None and spans and all(p == "manual" for p in ann.provenance):
        out.append("model_version set on an all-manual annotation")

    for i, s in enumerate(spans):
        if not is_valid_code(s.label):
            out.append(f"span {i} [{s.start},{s.end},{s.label!r}]: unknown label code")
        if s.start >= s.end:
            out.append(f"span {i} [{s.start},{s.end},{s.label!r}]: start >= end")
        elif s.start < 0 or s.end > n:
            out.append(f"span {i} [{s.start},{s.end},{s.label!r}]: end out of bounds (text length {n})")

    ordered = sorted(spans)
    for a, b in zip(ordered, ordered[1:]):
        if a.overlaps(b):
            if a.same_extent(b) and a.label != b.label:
                continue  # co-extensive multi-label sentence
            out.append(f"overlap between spans [{a.start},{a.end},{a.label}] and [{b.start},{b.end},{b.label}]")

    if aa.status not in STATUS_VALUES:
        out.append(f"unknown status {aa.status!r}")
    if (aa.status == "unlabeled") != (len(spans) == 0):
        out.append(f"status {aa.status!r} inconsistent with span count {len(spans)}")
    if aa.status == "reviewed" and ann.has_auto():
        out.append("status 'reviewed' but some spans still have provenance 'auto'")

    if include_warnings and not out:
        cursor = 0
        for s in ordered:
            gap = text[cursor:s.start]
            if gap.strip():
                out.append(f"warning: unannotated non-whitespace characters in [{cursor},{s.start})")
            cursor = max(cursor, s.end)
        if spans and text[cursor:].strip():
            out.append(f"warning: unannotated non-whitespace tail after offset {cursor}")
    return out


def _check(aa: AnnotatedAbstract) -> AnnotatedAbstract:
    problems = validate(aa)
    if problems:
        raise ValidationError("; ".join(problems))
    return aa


# -- doccano wire format --

_ALLOWED_EXTRAS = {"meta", "provenance", "status", "model_version"}


def parse_doccano_record(record_text: str) -> AnnotatedAbstract:
    """Parse one JSON record into a validated AnnotatedAbstract.

    Plain doccano exports carry only id/data/label; their spans default
    to provenance ``manual`` (they are treated as gold). Extended records
    written by this toolkit round-trip provenance/status/model_version.
    """
    try:
        obj = json.loads(record_text)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(obj, dict):
        raise ParseError(f"expected a JSON object, got {type(obj).__name__}")
    for key in ("id", "data", "label"):
        if key not in obj:
            raise ParseError(f"record is missing required key {key!r}")

    rid = obj["id"]
    if not isinstance(rid, (int, str)):
        raise ValidationError(f"id must be an integer or string, got {type(rid).__name__}")
    text = obj["data"]
    if not isinstance(text, str):
        raise ValidationError("data must be a string")

    triples = obj["label"]
    if not isinstance(triples, list):
        raise ValidationError("label must be a list of [start, end, code] triples")
    spans = []
    for t in triples:
        if (not isinstance(t, (list, tuple)) or len(t) != 3
                or not isinstance(t[0], int) or not isinstance(t[1], int)
                or not isinstance(t[2], str)):
            raise ValidationError(f"malformed label triple {t!r}")
        start, end, code = t
        if not is_valid_code(code):
            raise ValidationError(f"unknown label code in triple [{start}, {end}, {code!r}]")
        if start >= end:
            raise ValidationError(f"start >= end in triple [{start}, {end}, {code!r}]")
        spans.append(Span(start, end, code))
    spans.sort()

    provenance = obj.get("provenance")
    if provenance is not None:
        provenance = tuple(provenance)
    annotation = Annotation(
        spans=tuple(spans),
        provenance=provenance or (),
        model_version=obj.get("model_version"),
    )
    status = obj.get("status") or derive_status(annotation)
    aa = AnnotatedAbstract(
        abstract=Abstract(id=rid, text=text, meta=dict(obj.get("meta") or {})),
        annotation=annotation,
        status=status,
    )
    return _check(aa)


def serialize_doccano(aa: AnnotatedAbstract, extended: bool = False) -> str:
    """Serialize to one JSON line, keys in id/data/label order, spans by start.

    With ``extended`` the optional meta/provenance/status/model_version
    keys are appended after the three core keys.
    """
    _check(aa)
    order = sorted(range(len(aa.annotation.spans)), key=lambda i: aa.annotation.spans[i])
    spans = [aa.annotation.spans[i] for i in order]
    obj: dict = {
        "id": aa.abstract.id,
        "data": aa.abstract.text,
        "label": [s.as_triple() for s in spans],
    }
    if aa.abstract.meta:
        obj["meta"] = aa.abstract.meta
    if extended:
        if aa.annotation.provenance:
            obj["provenance"] = [aa.annotation.provenance[i] for i in order]
        obj["status"] = aa.status
        if aa.annotation.model_version is not None:
            obj["model_version"] = aa.annotation.model_version
    return json.dumps(obj, ensure_ascii=False)


def read_jsonl(lines: Iterable[str]) -> Iterator[AnnotatedAbstract]:
    """Parse a JSON-Lines corpus, skipping blank lines.

    Errors are re-raised with the 1-based line number prepended.
    """
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            yield parse_doccano_record(line)
        except (ParseError, ValidationError) as e:
            raise type(e)(f"line {lineno}: {e}") from e


def load_corpus(path) -> list[AnnotatedAbstract]:
    with open(path, encoding="utf-8") as f:
        return list(read_jsonl(f))


def save_corpus(records: Sequence[AnnotatedAbstract], path, extended: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for aa in records:
            f.write(serialize_doccano(aa, extended=extended) + "\n")


# -- span / sentence alignment --

def align_spans_to_sentences(aa: AnnotatedAbstract, sents: Sequence[Sentence]) -> list[set[str]]:
    """Label set per sentence: the labels of all spans overlapping it.

    Most sentences receive a singleton set; a sentence split across two
    moves receives both labels. A span that overlaps no sentence means
    the segmentation and the annotation disagree, which is an error.
    """
    sets: list[set[str]] = [set() for _ in sents]
    for s in aa.annotation.spans:
        hit = False
        for i, sent in enumerate(sents):
            if s.start < sent.end and sent.start < s.end:
                sets[i].add(s.label)
                hit = True
        if not hit:
            raise AlignmentError(
                f"span [{s.start},{s.end},{s.label}] overlaps no sentence "
                f"(abstract {aa.abstract.id!r})")
    return sets


def with_annotation(aa: AnnotatedAbstract, annotation: Annotation,
                    status: str | None = None) -> AnnotatedAbstract:
    """Copy of ``aa`` with a new annotation (status derived unless given)."""
    return replace(aa, annotation=annotation,
                   status=status if status is not None else derive_status(annotation))
