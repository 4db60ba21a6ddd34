import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from movekit.records import Abstract
from movekit.segment import (
    SegmenterConfig,
    emit_sentence_lines,
    reconstruct,
    segment_sentences,
)


def load_cases(fixtures_dir):
    return json.loads((fixtures_dir / "segmentation30.json").read_text())


class TestFixture:
    def test_boundary_f1_is_100(self, fixtures_dir):
        pred_all, gold_all, matched = 0, 0, 0
        for case in load_cases(fixtures_dir):
            gold = {tuple(e) for e in case["sentences"]}
            pred = {(s.start, s.end) for s in segment_sentences(case["text"])}
            pred_all += len(pred)
            gold_all += len(gold)
            matched += len(gold & pred)
            assert pred == gold, case["text"]
        f1 = 2 * matched / (pred_all + gold_all)
        assert f1 == 1.0

    def test_example_first_boundary_at_31(self, fixtures_dir):
        case = load_cases(fixtures_dir)[0]
        sents = segment_sentences(case["text"])
        assert sents[0].end == 31
        assert sents[0].text == "Words can have multiple senses."

    def test_url_sentence_stays_whole(self):
        text = "We release source code for our models and experiments at https://github.com/xxx."
        sents = segment_sentences(text)
        assert len(sents) == 1
        assert sents[0].text == text

    def test_abbreviation_and_decimal_case(self):
        sents = segment_sentences("It rose by 3.5 % (e.g., in Fig. 2). It fell.")
        assert [s.text for s in sents] == \
            ["It rose by 3.5 % (e.g., in Fig. 2).", "It fell."]


class TestContracts:
    def test_offsets_are_exact_substrings(self, fixtures_dir):
        for case in load_cases(fixtures_dir):
            for s in segment_sentences(case["text"]):
                assert s.text == case["text"][s.start:s.end]

    def test_no_terminator_yields_one_sentence(self):
        sents = segment_sentences("no terminator anywhere in this text")
        assert len(sents) == 1

    def test_empty_text_rejected(self):
        with pytest.raises(ValueError):
            segment_sentences("   ")

    def test_determinism(self):
        text = "One sentence. Another one! A third? Done."
        assert segment_sentences(text) == segment_sentences(text)

    def test_offsets_strictly_increase_and_nonempty(self):
        text = "A first bit. Then more.  Finally this."
        sents = segment_sentences(text)
        for a, b in zip(sents, sents[1:]):
            assert a.end <= b.start
        assert all(s.text.strip() for s in sents)

    def test_min_sentence_chars_config(self):
        cfg = SegmenterConfig(min_sentence_chars=5)
        sents = segment_sentences("Hm. Then a longer sentence follows.", cfg)
        assert len(sents) == 1  # short fragment merged forward

    def test_config_invariants(self):
        with pytest.raises(ValueError):
            SegmenterConfig(min_sentence_chars=0)
        with pytest.raises(ValueError):
            SegmenterConfig(abbreviation_list=frozenset({"fig"}))


class TestReconstruction:
    @settings(max_examples=200, deadline=None)
    @given(st.text(
        alphabet=st.sampled_from("ab cd. EF! gh? ij2.5 (e.g. Dr. x)\n\""),
        min_size=1, max_size=200))
    def test_reconstruction_property(self, text):
        if not text.strip():
            return
        sents = segment_sentences(text)
        assert reconstruct(text, sents) == text
        # gaps between sentences are whitespace only
        cursor = 0
        for s in sents:
            assert text[cursor:s.start].strip() == ""
            cursor = s.end
        assert text[cursor:].strip() == ""

    def test_bulk_random_reconstruction(self):
        rng = random.Random(2024)
        alphabet = "abcdefgh   ..!?()\"'0123456789ABCD\ne.g.x"
        for _ in range(1500):
            n = rng.randint(1, 120)
            text = "".join(rng.choice(alphabet) for _ in range(n))
            if not text.strip():
                continue
            sents = segment_sentences(text)
            assert reconstruct(text, sents) == text


class TestEmitLines:
    def test_line_count_equals_sentence_count(self):
        abstract = Abstract(id=1, text="First one. Second one! Third one?")
        out = emit_sentence_lines(abstract)
        assert out.splitlines() == ["First one.", "Second one!", "Third one?"]

    def test_url_intact_on_one_line(self):
        abstract = Abstract(
            id=2, text="Intro sentence. Code at https://github.com/xxx.")
        lines = emit_sentence_lines(abstract).splitlines()
        assert lines == ["Intro sentence.", "Code at https://github.com/xxx."]

    def test_fixture_total_line_count(self, fixtures_dir):
        total = 0
        for case in load_cases(fixtures_dir):
            total += len(emit_sentence_lines(Abstract(id=0, text=case["text"])).splitlines())
        assert total == 30
