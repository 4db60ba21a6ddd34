"""Working with annotation records: parse, validate, align, serialize.

The corpus interchange format is one JSON object per line with
character-offset span triples. This walk-through parses the kind of
record an annotation tool exports, checks its invariants, and shows how
spans map onto sentences.
"""

from movekit import (
    align_spans_to_sentences,
    parse_doccano_record,
    segment_sentences,
    serialize_doccano,
    validate,
)

RECORD = (
    '{"id": 20, "data": "Words can have multiple senses. Compositional '
    'distributional models of meaning have been argued to deal well with finer '
    'shades of meaning variation known as polysemy, but are not so well equipped '
    'to handle word senses that are etymologically unrelated, or homonymy.", '
    '"label": [[0, 31, "BAC"], [32, 265, "GAP"]]}')

record = parse_doccano_record(RECORD)
print(f"abstract {record.abstract.id}: {len(record.annotation.spans)} spans, "
      f"status {record.status}")
for span in record.annotation.spans:
    print(f"  [{span.start:>3},{span.end:>3}] {span.label}  "
          f"{record.abstract.text[span.start:span.end][:50]!r}")

print("\nvalidation:", validate(record) or "clean")

sentences = segment_sentences(record.abstract.text)
label_sets = align_spans_to_sentences(record, sentences)
print("\nper-sentence labels:")
for sent, labels in zip(sentences, label_sets):
    print(f"  sentence {sent.index} [{sent.start},{sent.end}]: {sorted(labels)}")

line = serialize_doccano(record)
assert parse_doccano_record(line).annotation.spans == record.annotation.spans
print("\nround-trip is exact; serialized line:")
print(line[:100] + "...")
