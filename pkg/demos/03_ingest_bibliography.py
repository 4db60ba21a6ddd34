"""From downloaded metadata files to an unlabeled corpus.

Two ingestion paths: bibliography files with braced fields, and
tab/comma exports with a header row. Both yield Abstract records that
serialize to unlabeled JSON-Lines ready for annotation.
"""

import tempfile
from pathlib import Path

from movekit import parse_bib, parse_tabular_export, save_corpus
from movekit.records import AnnotatedAbstract

BIB = """
@article{doe2022,
    title = {A Study of Heat Transfer},
    journal = {Journal of Examples},
    year = {2022},
    abstract = {Boiling heat transfer remains hard to predict. We measure
                bubble dynamics over structured surfaces. Results show a
                clear enhancement pattern.},
}
@inproceedings{roe2023,
    title = "Parsing Technical Abstracts",
    booktitle = "Proceedings of the Example Conference",
    year = "2023",
    abstract = "We present a parser for abstracts. It is fast and accurate.",
}
@article{nabstract,
    title = {This Entry Has No Abstract},
    year = {2021},
}
"""

result = parse_bib(BIB, discipline="NLP")
print("bibliography:", result.summary())
for a in result.abstracts:
    print(f"  {a.id}: {a.meta['title']!r} ({len(a.text.split())} words)")

TSV = (
    "Title\tAbstract\tYear\n"
    "Channel coding study\tWe analyse coding over noisy channels. Gains are shown.\t2020\n"
    "Beam design study\tA new beam design is proposed. It reduces weight.\t2021\n"
)
result2 = parse_tabular_export(TSV, {"title": "Title", "abstract": "Abstract",
                                     "year": "Year"}, discipline="CE")
print("\ntabular export:", result2.summary())

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "unlabeled.jsonl"
    records = [AnnotatedAbstract(abstract=a)
               for a in result.abstracts + result2.abstracts]
    save_corpus(records, out)
    print(f"\nwrote {len(records)} unlabeled records to {out.name}:")
    print(out.read_text().splitlines()[0][:90] + "...")
