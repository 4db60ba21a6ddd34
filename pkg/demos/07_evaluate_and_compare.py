"""Evaluation: micro/per-label PRF over (sentence, label) pairs, and the
three-variant comparison on a synthetic confounded corpus.

The confound corpus shares the word "results" between Result and
Conclusion sentences; position and neighbors disambiguate, so the
context variant should not trail the plain one.
"""

import warnings

from movekit import SplitSpec, compare_variants, micro_prf, per_label_prf
from movekit.classifier import EncoderConfig, ModelConfig, TrainConfig
from movekit.datasets import make_confound_corpus

warnings.simplefilter("ignore")

gold = {"A": {"PUR"}, "B": {"MTD"}}
pred = {"A": {"PUR", "MTD"}, "B": {"MTD"}}
m = micro_prf(gold, pred)
print(f"hand case: P {m.precision}  R {m.recall}  F1 {m.f1} "
      f"(tp={m.tp} fp={m.fp} fn={m.fn})")
table = per_label_prf(gold, pred)
print(f"per-label MTD: P {table['MTD'].precision}  support {table['MTD'].support}")

corpus = make_confound_corpus(40, seed=5, ambiguous_rate=0.5)
mc = ModelConfig(encoder=EncoderConfig(vocab_size=512, hidden=48, layers=1,
                                       heads=2, ff=96, max_len=48))
tc = TrainConfig(epochs=8, batch_size=32, learning_rate=2e-3, seed=5)
report = compare_variants(corpus, ("plain", "context"), SplitSpec(seed=5), tc, mc)
print("\n" + report.to_text())
