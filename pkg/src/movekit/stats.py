"""Corpus statistics: move frequency, per-abstract occurrence, aggregates.

Frequency counts every span as one move instance. Occurrence counts a
move once per abstract containing it, however many instances it has.
Aggregates report sentence/word totals and averages per partition.
Percentages and averages are rounded half-up to 2 decimals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Sequence

from .errors import ConfigError
from .labels import LABEL_CODES
from .records import AnnotatedAbstract
from .segment import SegmenterConfig, segment_sentences

PARTITION_KEYS = ("field", "discipline", "none")


def round2(value) -> float:
    return float(Decimal(str(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _pct(count: int, total: int) -> float:
    if total == 0:
        return 0.0
    return float((Decimal(count) * 100 / Decimal(total))
                 .quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _partition_of(aa: AnnotatedAbstract, key: str) -> str:
    if key == "none":
        return "all"
    if key == "discipline":
        return aa.abstract.discipline or "unknown"
    if key == "field":
        return aa.abstract.field_group or "unknown"
    raise ConfigError(f"partition key must be one of {PARTITION_KEYS}, got {key!r}")


@dataclass
class FrequencyTable:
    counts: dict = field(default_factory=dict)    # label -> instance count
    percents: dict = field(default_factory=dict)  # label -> % of all instances
    total: int = 0

    @property
    def empty(self) -> bool:
        return self.total == 0


@dataclass
class OccurrenceTable:
    # partition -> label -> (abstract count, % of partition's abstracts)
    partitions: dict = field(default_factory=dict)
    n_abstracts: dict = field(default_factory=dict)


@dataclass
class AggregateTable:
    # partition -> {n_abstracts, n_sentences, avg_sentences,
    #               n_words, avg_words, avg_move_types}
    partitions: dict = field(default_factory=dict)


@dataclass
class CorpusStats:
    frequency: FrequencyTable
    occurrence: OccurrenceTable
    aggregates: AggregateTable
    partition_key: str = "field"

    @property
    def empty(self) -> bool:
        return self.frequency.empty and not self.aggregates.partitions


def label_frequency(corpus: Sequence[AnnotatedAbstract]) -> FrequencyTable:
    table = FrequencyTable()
    for aa in corpus:
        for span in aa.annotation.spans:
            table.counts[span.label] = table.counts.get(span.label, 0) + 1
            table.total += 1
    table.counts = {c: table.counts.get(c, 0) for c in LABEL_CODES}
    table.percents = {c: _pct(n, table.total) for c, n in table.counts.items()}
    return table


def label_occurrence(corpus: Sequence[AnnotatedAbstract],
                     partition_key: str = "field") -> OccurrenceTable:
    table = OccurrenceTable()
    for aa in corpus:
        part = _partition_of(aa, partition_key)
        table.n_abstracts[part] = table.n_abstracts.get(part, 0) + 1
        rows = table.partitions.setdefault(part, {c: 0 for c in LABEL_CODES})
        for label in aa.annotation.labels:
            rows[label] += 1
    for part, rows in table.partitions.items():
        n = table.n_abstracts[part]
        table.partitions[part] = {c: (rows[c], _pct(rows[c], n)) for c in LABEL_CODES}
    return table


def abstract_aggregates(corpus: Sequence[AnnotatedAbstract],
                        seg_cfg: SegmenterConfig | None = None,
                        partition_key: str = "field") -> AggregateTable:
    table = AggregateTable()
    acc: dict[str, dict] = {}
    for aa in corpus:
        part = _partition_of(aa, partition_key)
        a = acc.setdefault(part, {"n_abstracts": 0, "n_sentences": 0,
                                  "n_words": 0, "move_types": 0})
        a["n_abstracts"] += 1
        a["n_sentences"] += len(segment_sentences(aa.abstract.text, seg_cfg))
        a["n_words"] += len(aa.abstract.text.split())
        a["move_types"] += len(aa.annotation.labels)
    for part, a in acc.items():
        n = a["n_abstracts"]
        table.partitions[part] = {
            "n_abstracts": n,
            "n_sentences": a["n_sentences"],
            "avg_sentences": round2(a["n_sentences"] / n),
            "n_words": a["n_words"],
            "avg_words": round2(a["n_words"] / n),
            "avg_move_types": round2(a["move_types"] / n),
        }
    return table


def compute_corpus_stats(corpus: Sequence[AnnotatedAbstract],
                         seg_cfg: SegmenterConfig | None = None,
                         partition_key: str = "field") -> CorpusStats:
    return CorpusStats(
        frequency=label_frequency(corpus),
        occurrence=label_occurrence(corpus, partition_key),
        aggregates=abstract_aggregates(corpus, seg_cfg, partition_key),
        partition_key=partition_key,
    )


# -- rendering --

def _rows_to_text(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    lines = ["  ".join(str(h).ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(str(c).ljust(w) for c, w in zip(r, widths)))
    return "\n".join(lines)


def stats_to_text(stats: CorpusStats) -> str:
    if stats.frequency.empty:
        return "(empty corpus: no annotated spans)"
    out = ["Move frequency (instances)"]
    rows = [[c, stats.frequency.counts[c], f"{stats.frequency.percents[c]:.2f}"]
            for c in LABEL_CODES]
    rows.append(["Total", stats.frequency.total, "100"])
    out.append(_rows_to_text(["Label", "Frequency", "%"], rows))

    parts = sorted(stats.occurrence.partitions)
    out.append("\nMove occurrence (abstracts containing the move)")
    header = ["Move"]
    for p in parts:
        header += [f"{p} #", f"{p} %"]
    rows = []
    for c in LABEL_CODES:
        row = [c]
        for p in parts:
            count, pct = stats.occurrence.partitions[p][c]
            row += [count, f"{pct:.2f}"]
        rows.append(row)
    out.append(_rows_to_text(header, rows))

    out.append("\nPer-abstract aggregates")
    header = ["Measure"] + parts
    measures = [("#Abstracts", "n_abstracts"), ("#Sent.", "n_sentences"),
                ("Average #Sent.", "avg_sentences"), ("#Words", "n_words"),
                ("Average #Words", "avg_words"),
                ("Average #Move types", "avg_move_types")]
    rows = [[name] + [stats.aggregates.partitions[p][key] for p in parts]
            for name, key in measures]
    out.append(_rows_to_text(header, rows))
    return "\n".join(out)


def stats_to_json_dict(stats: CorpusStats) -> dict:
    return {
        "partition_key": stats.partition_key,
        "frequency": {
            "total": stats.frequency.total,
            "labels": {c: {"count": stats.frequency.counts[c],
                           "percent": stats.frequency.percents[c]}
                       for c in LABEL_CODES},
        },
        "occurrence": {
            p: {"n_abstracts": stats.occurrence.n_abstracts[p],
                "labels": {c: {"count": rows[c][0], "percent": rows[c][1]}
                           for c in LABEL_CODES}}
            for p, rows in stats.occurrence.partitions.items()
        },
        "aggregates": stats.aggregates.partitions,
    }
