"""Corpus statistics: frequency, occurrence, and per-abstract aggregates.

Frequency counts move instances (spans); occurrence counts a move once
per abstract containing it; aggregates average sentences, words and
distinct move types per abstract, partitioned by field.
"""

from pathlib import Path

from movekit import compute_corpus_stats, load_corpus
from movekit.stats import stats_to_json_dict, stats_to_text

fixture = Path(__file__).parent.parent / "tests" / "fixtures" / "stats12.jsonl"
corpus = load_corpus(fixture)
print(f"loaded {len(corpus)} annotated abstracts\n")

stats = compute_corpus_stats(corpus, partition_key="field")
print(stats_to_text(stats))

payload = stats_to_json_dict(stats)
print("\nmachine-readable keys:", sorted(payload))
print("AI aggregates:", payload["aggregates"]["AI"])
