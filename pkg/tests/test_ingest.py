import re

import pytest

from movekit.errors import ConfigError, EmptyResultError, ParseError
from movekit.ingest import parse_bib, parse_tabular_export

SMALL_BIB = """
@article{one,
    title = {First Entry},
    journal = {Journal A},
    year = {2021},
    abstract = {Large-scale pretrained language models have achieved good results.},
}
@article{two,
    title = {Second Entry Without Abstract},
    journal = {Journal A},
    year = {2021},
}
@article{three,
    title = {Third Entry},
    journal = {Journal B},
    year = {2022},
    abstract = {A second usable abstract, spread
                over two lines.},
}
"""


class TestBib:
    def test_single_entry_text_extracted(self):
        result = parse_bib(SMALL_BIB)
        first = result.abstracts[0]
        assert first.id == "one"
        assert first.text.startswith("Large-scale pretrained")
        assert first.meta["venue"] == "Journal A"
        assert first.meta["year"] == "2021"

    def test_entry_without_abstract_skipped(self):
        result = parse_bib(SMALL_BIB)
        assert len(result.abstracts) == 2
        assert result.n_skipped == 1
        assert result.n_entries == 3

    def test_multiline_values_are_collapsed(self):
        result = parse_bib(SMALL_BIB)
        assert "over two lines" in result.abstracts[1].text
        assert "\n" not in result.abstracts[1].text

    def test_fixture_count_matches_line_scan(self, fixtures_dir):
        raw = (fixtures_dir / "library25.bib").read_text()
        # independent oracle: count raw 'abstract =' field occurrences
        expected = len(re.findall(r'^\s*abstract\s*=', raw, flags=re.MULTILINE))
        result = parse_bib(raw)
        assert expected == 25
        assert len(result.abstracts) == expected
        assert result.n_entries == 25
        titles = [a.meta["title"] for a in result.abstracts]
        assert titles[0] == "Improved methods for parsing (1)"
        assert len(set(titles)) == 25

    def test_unbalanced_braces_is_parse_error(self):
        broken = "@article{bad,\n  title = {Unclosed,\n  abstract = {text}\n"
        with pytest.raises(ParseError, match="bad"):
            parse_bib(broken)

    def test_zero_abstracts_is_explicit_error(self):
        with pytest.raises(EmptyResultError):
            parse_bib("@article{x,\n title = {No Abstract Here},\n}\n")

    def test_discipline_stamped(self):
        result = parse_bib(SMALL_BIB, discipline="NLP")
        assert all(a.meta["discipline"] == "NLP" for a in result.abstracts)
        with pytest.raises(ConfigError):
            parse_bib(SMALL_BIB, discipline="XXX")


class TestTabular:
    COLMAP = {"title": "Title", "abstract": "Abstract", "year": "Year"}

    def test_two_row_tsv(self):
        text = "Title\tAbstract\tYear\nA study\tSome abstract text.\t2020\n" \
               "B study\tMore abstract text.\t2021\n"
        result = parse_tabular_export(text, self.COLMAP)
        assert len(result.abstracts) == 2
        assert result.abstracts[0].meta["title"] == "A study"

    def test_empty_abstract_cell_skipped(self):
        text = "Title\tAbstract\tYear\nA\tSome text here.\t2020\nB\t\t2021\n"
        result = parse_tabular_export(text, self.COLMAP)
        assert len(result.abstracts) == 1
        assert result.n_skipped == 1

    def test_fixture_row_count(self, fixtures_dir):
        raw = (fixtures_dir / "export50.tsv").read_text()
        expected = len([l for l in raw.splitlines() if l.strip()]) - 1  # header
        result = parse_tabular_export(raw, self.COLMAP)
        assert expected == 50
        assert len(result.abstracts) == expected
        assert result.row_errors == []

    def test_missing_mapped_column(self):
        text = "Name\tBody\nA\tB\n"
        with pytest.raises(ConfigError, match="not in header"):
            parse_tabular_export(text, self.COLMAP)

    def test_ragged_row_collected_not_fatal(self):
        text = "Title\tAbstract\tYear\nA\tGood row text.\t2020\nB\tonly-two-fields\n"
        result = parse_tabular_export(text, self.COLMAP)
        assert len(result.abstracts) == 1
        assert len(result.row_errors) == 1
        assert "row 2" in result.row_errors[0]

    def test_comma_separated_auto_detected(self):
        text = 'Title,Abstract,Year\nA,"Comma, separated abstract.",2020\n'
        result = parse_tabular_export(text, self.COLMAP)
        assert result.abstracts[0].text == "Comma, separated abstract."

    def test_all_empty_is_error(self):
        with pytest.raises(EmptyResultError):
            parse_tabular_export("Title\tAbstract\tYear\nA\t\t2020\n", self.COLMAP)
