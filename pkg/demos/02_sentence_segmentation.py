"""Offset-exact sentence segmentation on tricky abstract prose.

URLs, decimals, abbreviations and initials must not split; the original
text is always reconstructable from the sentences plus the whitespace
between them.
"""

from movekit import SegmenterConfig, segment_sentences
from movekit.segment import reconstruct

SAMPLES = [
    "We release source code for our models and experiments at https://github.com/xxx.",
    "It rose by 3.5 % (e.g., in Fig. 2). It fell.",
    "Dr. Smith and Prof. J. Doe proposed a fix. It works vs. the baseline.",
    "Our method scales to corpora, lexicons, etc. It runs in under 2.5 hours.",
    "Can models learn U.S. spelling conventions? Prior work says yes!",
]

for text in SAMPLES:
    sentences = segment_sentences(text)
    print(f"\n{text!r}")
    for s in sentences:
        print(f"  [{s.start:>3},{s.end:>3}] {s.text!r}")
    assert reconstruct(text, sentences) == text

# the abbreviation lists are plain data and can be extended per corpus
custom = SegmenterConfig(
    abbreviation_list=frozenset({"approx.", "eq."}),
    terminal_abbreviations=frozenset({"etc."}),
)
text = "See eq. 4 for details. The result holds approx. everywhere."
print("\nwith a custom abbreviation list:")
for s in segment_sentences(text, custom):
    print(f"  {s.text!r}")
