import json
import re

import pytest

from movekit.errors import ConfigError
from movekit.labels import LABEL_CODES
from movekit.records import Abstract, AnnotatedAbstract, Annotation, Span, load_corpus
from movekit.stats import (
    abstract_aggregates,
    compute_corpus_stats,
    label_frequency,
    label_occurrence,
    stats_to_json_dict,
    stats_to_text,
)

# hand-counted gold numbers for tests/fixtures/stats12.jsonl
HAND_FREQ = {"BAC": 9, "GAP": 5, "PUR": 12, "MTD": 15, "RST": 10, "CLN": 6,
             "IMP": 2, "CTN": 3}
HAND_FREQ_PCT = {"BAC": 14.52, "GAP": 8.06, "PUR": 19.35, "MTD": 24.19,
                 "RST": 16.13, "CLN": 9.68, "IMP": 3.23, "CTN": 4.84}
HAND_OCC = {
    "AI": {"BAC": 5, "GAP": 3, "PUR": 7, "MTD": 7, "RST": 6, "CLN": 3,
           "IMP": 1, "CTN": 2},
    "Engineering": {"BAC": 3, "GAP": 2, "PUR": 5, "MTD": 5, "RST": 3, "CLN": 3,
                    "IMP": 1, "CTN": 1},
}
HAND_AGG = {
    "AI": {"n_abstracts": 7, "n_sentences": 37, "avg_sentences": 5.29,
           "n_words": 306, "avg_words": 43.71, "avg_move_types": 4.86},
    "Engineering": {"n_abstracts": 5, "n_sentences": 25, "avg_sentences": 5.00,
                    "n_words": 207, "avg_words": 41.40, "avg_move_types": 4.60},
}


@pytest.fixture(scope="module")
def corpus12(fixtures_dir):
    return load_corpus(fixtures_dir / "stats12.jsonl")


class TestFrequency:
    def test_fixture_matches_hand_counts(self, corpus12):
        table = label_frequency(corpus12)
        assert table.counts == HAND_FREQ
        assert table.total == 62
        assert table.percents == HAND_FREQ_PCT

    def test_fixture_matches_raw_code_tally(self, corpus12, fixtures_dir):
        # independent oracle: count label codes straight off the raw JSONL
        raw = (fixtures_dir / "stats12.jsonl").read_text()
        table = label_frequency(corpus12)
        for code in LABEL_CODES:
            assert table.counts[code] == len(re.findall(f'"{code}"', raw))

    def test_percents_sum_to_100(self, corpus12):
        table = label_frequency(corpus12)
        assert abs(sum(table.percents.values()) - 100.0) <= 0.05

    def test_single_abstract_two_labels(self):
        aa = AnnotatedAbstract(
            abstract=Abstract(id=1, text="First bit here. Second bit there."),
            annotation=Annotation(spans=(Span(0, 15, "BAC"), Span(16, 33, "GAP")),
                                  provenance=("manual", "manual")),
            status="reviewed")
        table = label_frequency([aa])
        assert table.percents["BAC"] == 50.00
        assert table.percents["GAP"] == 50.00

    def test_empty_corpus_marker(self):
        table = label_frequency([])
        assert table.empty
        assert table.total == 0


class TestOccurrence:
    def test_fixture_matches_hand_counts(self, corpus12):
        table = label_occurrence(corpus12, "field")
        for part, rows in HAND_OCC.items():
            assert {c: table.partitions[part][c][0] for c in LABEL_CODES} == rows
        assert table.n_abstracts == {"AI": 7, "Engineering": 5}

    def test_fixture_matches_brute_force_union(self, corpus12):
        # oracle: per-abstract label-set union, tallied directly
        table = label_occurrence(corpus12, "field")
        tally = {}
        for aa in corpus12:
            part = aa.abstract.field_group
            for code in {s.label for s in aa.annotation.spans}:
                tally[(part, code)] = tally.get((part, code), 0) + 1
        for (part, code), count in tally.items():
            assert table.partitions[part][code][0] == count

    def test_occurrence_counts_once_per_abstract(self):
        text = "One method. Two method. Three method. Four method. Five method."
        spans = tuple(Span(i * 12, i * 12 + 11, "MTD") for i in range(5))
        aa = AnnotatedAbstract(
            abstract=Abstract(id=1, text=text),
            annotation=Annotation(spans=spans, provenance=("manual",) * 5),
            status="reviewed")
        table = label_occurrence([aa], "none")
        assert table.partitions["all"]["MTD"][0] == 1
        assert label_frequency([aa]).counts["MTD"] == 5

    def test_occurrence_never_exceeds_frequency_or_partition(self, corpus12):
        freq = label_frequency(corpus12)
        occ = label_occurrence(corpus12, "field")
        for part, rows in occ.partitions.items():
            for code in LABEL_CODES:
                assert rows[code][0] <= freq.counts[code]
                assert rows[code][0] <= occ.n_abstracts[part]

    def test_missing_partition_key_goes_to_unknown(self):
        aa = AnnotatedAbstract(
            abstract=Abstract(id=1, text="No discipline set here."),
            annotation=Annotation(spans=(Span(0, 23, "BAC"),),
                                  provenance=("manual",)),
            status="reviewed")
        table = label_occurrence([aa], "field")
        assert table.partitions["unknown"]["BAC"][0] == 1

    def test_unknown_partition_key_rejected(self, corpus12):
        with pytest.raises(ConfigError):
            label_occurrence(corpus12, "venue")


class TestAggregates:
    def test_fixture_matches_hand_counts(self, corpus12):
        table = abstract_aggregates(corpus12)
        assert table.partitions == HAND_AGG

    def test_fixture_matches_independent_word_count(self, corpus12, fixtures_dir):
        # oracle: whitespace word count from the raw JSONL data fields
        totals = {}
        for line in (fixtures_dir / "stats12.jsonl").read_text().splitlines():
            obj = json.loads(line)
            field = "AI" if obj["meta"]["discipline"] in ("NLP", "CV") else "Engineering"
            totals[field] = totals.get(field, 0) + len(obj["data"].split())
        table = abstract_aggregates(corpus12)
        for part, n_words in totals.items():
            assert table.partitions[part]["n_words"] == n_words

    def test_single_abstract_averages(self):
        text = ("Alpha beta gamma delta epsilon zeta eta theta iota kappa. "
                "Lambda mu nu xi omicron pi rho sigma tau upsilon.")
        aa = AnnotatedAbstract(
            abstract=Abstract(id=1, text=text),
            annotation=Annotation(spans=(Span(0, 58, "MTD"),), provenance=("manual",)),
            status="reviewed")
        table = abstract_aggregates([aa], partition_key="none")
        agg = table.partitions["all"]
        assert agg["avg_sentences"] == 2.00
        assert agg["avg_words"] == 20.00


class TestConsistencyAndRendering:
    def test_partition_frequency_consistency(self, corpus12):
        # per-partition span totals add up to the overall total
        by_part = {}
        for aa in corpus12:
            part = aa.abstract.field_group
            by_part[part] = by_part.get(part, 0) + len(aa.annotation.spans)
        assert sum(by_part.values()) == label_frequency(corpus12).total

    def test_text_and_json_rendering(self, corpus12):
        stats = compute_corpus_stats(corpus12)
        text = stats_to_text(stats)
        assert "Move frequency" in text
        assert "MTD" in text
        payload = stats_to_json_dict(stats)
        assert payload["frequency"]["total"] == 62
        assert payload["aggregates"]["AI"]["avg_sentences"] == 5.29
        json.dumps(payload)  # serializable
