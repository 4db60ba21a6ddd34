"""Word-level occlusion saliency: which words drive a move label.

Each word's tokens are masked jointly; the probability drop for the
inspected label is that word's saliency. Bucketized values feed the
model's fourth input channel and the review UI's heatmap.
"""

import warnings

from movekit import ModelConfig, TrainConfig, bucketize, occlusion_saliency, train
from movekit.classifier import EncoderConfig
from movekit.datasets import make_keyword_dataset

warnings.simplefilter("ignore")

train_ex, _ = make_keyword_dataset(n_train=400, n_test=0, seed=2)
mc = ModelConfig(encoder=EncoderConfig(vocab_size=400, hidden=64, layers=2,
                                       heads=2, ff=128, max_len=32))
clf, _ = train(train_ex, TrainConfig(epochs=12, seed=2), mc)

SENTENCE = "The results show the model beats the baseline."
for label in ("RST", "BAC"):
    vec = occlusion_saliency(clf, SENTENCE, label)
    print(f"\nsaliency toward {label}:")
    for word, value in zip(vec.words, vec.values):
        bar = "#" * int(abs(value) * 40)
        print(f"  {word:<10} {value:+.3f} {bar}")

vec = occlusion_saliency(clf, SENTENCE, "RST")
ids = bucketize(vec.values, 11)
print("\nbucketized channel (11 buckets, 5 = neutral):")
print(" ", list(zip(vec.words, ids.tolist())))
print("\ndebug dump for the UI heatmap:")
print(" ", vec.to_debug_json())
