import warnings

import numpy as np
import pytest

from movekit.classifier import (
    EncodedSentence,
    EncoderConfig,
    ModelConfig,
    MoveClassifier,
    SentenceExample,
    TrainConfig,
    corpus_to_examples,
    decide_labels,
    encode,
    train,
)
from movekit.datasets import make_confound_corpus, make_keyword_dataset
from movekit.errors import ConfigError, TrainingError, ValidationError
from movekit.labels import LABEL_CODES
from movekit.records import validate
from movekit.tokenizer import Tokenizer


@pytest.fixture(scope="module")
def small_tok():
    return Tokenizer.train(
        ["we propose a model", "however results show gains",
         "the method uses data", "background on the task"], vocab_size=128)


def plain_cfg(**kw):
    return ModelConfig(encoder=EncoderConfig(vocab_size=128, hidden=16, layers=1,
                                             heads=2, ff=32, max_len=16), **kw)


class TestEncode:
    def test_plain_neutral_saliency_and_no_context(self, small_tok):
        cfg = plain_cfg()
        enc = encode("We propose a model.", ["ignored neighbor"], 3, 7, None,
                     cfg, small_tok)
        assert set(enc.saliency_bucket_ids.tolist()) == {5}
        assert set(enc.segment_ids.tolist()) == {0}
        assert enc.sentence_position_id == 0

    def test_context_two_segment_layout(self, small_tok):
        cfg = plain_cfg(variant="context")
        enc = encode("We propose a model.", ["the method uses data"], 0, 5, None,
                     cfg, small_tok)
        seg = enc.segment_ids.tolist()
        flip = seg.index(1)
        assert set(seg[:flip]) == {0}
        assert set(seg[flip:]) == {1}
        assert enc.sentence_position_id == 1  # first sentence, first bucket

    def test_channels_equal_length(self, small_tok):
        enc = encode("we propose", (), 0, 1, None, plain_cfg(), small_tok)
        n = len(enc.token_ids)
        assert len(enc.segment_ids) == len(enc.position_ids) == \
            len(enc.saliency_bucket_ids) == n

    def test_saliency_buckets_match_hand_bucketization(self, small_tok):
        cfg = plain_cfg(variant="saliency")
        enc = encode("we propose model", (), 0, 1, [0.9, 0.0, -0.2], cfg, small_tok)
        # words are single pieces here: positions 1..3 carry the buckets
        assert enc.saliency_bucket_ids[1:4].tolist() == [10, 5, 4]

    def test_saliency_length_mismatch_rejected(self, small_tok):
        with pytest.raises(ValidationError):
            encode("we propose model", (), 0, 1, [0.5], plain_cfg(variant="saliency"),
                   small_tok)

    def test_truncation_context_first(self, small_tok):
        cfg = plain_cfg(variant="context")
        long_neighbor = " ".join(["data"] * 40)
        enc = encode("we propose a model", [long_neighbor], 0, 2, None, cfg, small_tok)
        assert enc.truncated
        assert len(enc.token_ids) <= cfg.encoder.max_len
        assert enc.n_target_tokens == 4  # target survived intact

    def test_truncation_target_tail(self, small_tok):
        cfg = plain_cfg()
        enc = encode(" ".join(["model"] * 40), (), 0, 1, None, cfg, small_tok)
        assert enc.truncated
        assert len(enc.token_ids) == cfg.encoder.max_len

    def test_mismatched_channel_lengths_rejected(self):
        with pytest.raises(ValidationError):
            EncodedSentence(token_ids=np.array([1, 2]), segment_ids=np.array([0]),
                            position_ids=np.array([0, 1]),
                            saliency_bucket_ids=np.array([5, 5]))


class TestModelConfig:
    def test_threshold_bounds(self):
        with pytest.raises(ConfigError):
            plain_cfg(decision_threshold=0.0)

    def test_bucket_parity(self):
        with pytest.raises(ConfigError):
            plain_cfg(saliency_buckets=8)

    def test_negative_context_window(self):
        with pytest.raises(ConfigError):
            plain_cfg(context_window=-1)

    def test_unknown_variant(self):
        with pytest.raises(ConfigError):
            plain_cfg(variant="fancy")


class TestDecideLabels:
    def test_threshold_selection(self):
        row = np.array([0.9, 0.6, 0.1, 0.2, 0.3, 0.1, 0.1, 0.1])
        got = decide_labels(row, 0.5)
        assert got == frozenset({LABEL_CODES[0], LABEL_CODES[1]})

    def test_argmax_fallback(self):
        row = np.array([0.05, 0.1, 0.4, 0.2, 0.1, 0.1, 0.1, 0.1])
        assert decide_labels(row, 0.5) == frozenset({LABEL_CODES[2]})


class TestTraining:
    def test_loss_decreases_on_toy_memorization(self):
        examples = [
            SentenceExample(id=0, text="we propose a model", labels=frozenset({"PUR"})),
            SentenceExample(id=1, text="however results are weak",
                            labels=frozenset({"GAP"})),
        ]
        tc = TrainConfig(epochs=50, batch_size=2, learning_rate=5e-3, seed=3)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            _, metrics = train(examples, tc, plain_cfg())
        losses = [m["loss"] for m in metrics[:10]]
        assert all(b < a for a, b in zip(losses, losses[1:]))

    def test_fixed_seed_reproduces_metrics(self):
        train_ex, test_ex = make_keyword_dataset(60, 20, seed=2)
        tc = TrainConfig(epochs=4, batch_size=16, seed=9)
        mc = plain_cfg()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            _, m1 = train(train_ex, tc, mc, dev_examples=test_ex)
            _, m2 = train(train_ex, tc, mc, dev_examples=test_ex)
        assert m1 == m2

    def test_empty_dataset_rejected(self):
        with pytest.raises(TrainingError):
            train([], TrainConfig(), plain_cfg())

    def test_empty_label_set_rejected(self):
        bad = [SentenceExample(id=0, text="x", labels=frozenset())]
        with pytest.raises(TrainingError):
            train(bad, TrainConfig(epochs=1), plain_cfg())

    def test_missing_labels_warn(self):
        examples = [SentenceExample(id=i, text=f"sample text {i}",
                                    labels=frozenset({"PUR"})) for i in range(4)]
        with pytest.warns(UserWarning, match="never seen"):
            train(examples, TrainConfig(epochs=1, batch_size=2), plain_cfg())

    def test_metrics_log_schema(self, keyword_model, keyword_data):
        train_ex, test_ex = make_keyword_dataset(40, 10, seed=4)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            _, metrics = train(train_ex, TrainConfig(epochs=3, batch_size=16),
                               plain_cfg(), dev_examples=test_ex)
        assert [set(m) for m in metrics] == [{"epoch", "loss", "dev_micro_f1"}] * 3
        assert [m["epoch"] for m in metrics] == [1, 2, 3]


class TestPredict:
    def test_plain_invariant_to_context_bitwise(self, keyword_model):
        text = "We propose a new parsing model."
        base = keyword_model.predict(text)
        permuted = keyword_model.predict(text, neighbors=("totally different",
                                                          "neighbors here"),
                                         position_index=4, n_sentences=9)
        assert base.probabilities == permuted.probabilities
        assert base.labels == permuted.labels

    def test_paper_style_sentences_get_expected_moves(self, keyword_model):
        gap = keyword_model.predict(
            "However, they have been shown vulnerable to adversarial attacks.")
        assert "GAP" in gap.labels
        pur = keyword_model.predict(
            "In this work, we propose RoCBert: a pretrained Chinese Bert.")
        assert "PUR" in pur.labels

    def test_probabilities_cover_all_labels(self, keyword_model):
        pred = keyword_model.predict("The results show gains.")
        assert set(pred.probabilities) == set(LABEL_CODES)
        assert all(0.0 <= p <= 1.0 for p in pred.probabilities.values())

    def test_variant_mismatch_rejected(self, keyword_model):
        with pytest.raises(ConfigError):
            keyword_model.predict("text", cfg=plain_cfg(variant="context"))

    def test_every_sentence_gets_a_label(self, keyword_model):
        pred = keyword_model.predict("Entirely unrelated gibberish zzz qqq.")
        assert len(pred.labels) >= 1


@pytest.fixture(scope="module")
def saliency_model():
    train_ex, test_ex = make_keyword_dataset(120, 30, seed=6)
    mc = ModelConfig(encoder=EncoderConfig(vocab_size=256, hidden=32, layers=1,
                                           heads=2, ff=64, max_len=24),
                     variant="saliency")
    tc = TrainConfig(epochs=6, batch_size=16, seed=6,
                     saliency_warmup_epochs=2, saliency_refresh_epochs=2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        clf, _ = train(train_ex, tc, mc, dev_examples=test_ex)
    return clf


class TestSaliencyVariantProtocol:
    def test_pass1_equals_plain_encoding_probabilities(self, saliency_model):
        from movekit.tokenizer import split_words
        text = "We propose a clean approach."
        enc_neutral = saliency_model._encode_example(SentenceExample(id=0, text=text))
        probs_neutral = saliency_model.probabilities_for_encodings([enc_neutral])[0]
        pieces, _ = saliency_model.tokenizer.encode_words(split_words(text))
        probs_plain = saliency_model.probabilities_for_token_lists([pieces])[0]
        np.testing.assert_allclose(probs_neutral, probs_plain, atol=1e-6)

    def test_two_pass_prediction_runs(self, saliency_model):
        pred = saliency_model.predict("However the results show issues.")
        assert pred.scores_source == "saliency"
        assert len(pred.labels) >= 1


class TestPredictAbstract:
    def test_spans_cover_every_sentence(self, keyword_model):
        from movekit.records import Abstract
        text = ("The background of the task is broad. However the gap remains. "
                "We propose a fix. The method uses data. The results show gains.")
        annotation = keyword_model.predict_abstract(Abstract(id=71, text=text))
        assert len(annotation.spans) >= 5
        assert all(p == "auto" for p in annotation.provenance)
        assert annotation.model_version == keyword_model.model_version

    def test_output_validates_cleanly(self, keyword_model):
        from movekit.records import Abstract, AnnotatedAbstract, derive_status
        text = ("The background of the task is broad. We propose a fix. "
                "The results show gains.")
        annotation = keyword_model.predict_abstract(Abstract(id=72, text=text))
        aa = AnnotatedAbstract(abstract=Abstract(id=72, text=text),
                               annotation=annotation,
                               status=derive_status(annotation))
        assert validate(aa) == []

    def test_empty_abstract_warns(self, keyword_model):
        from movekit.records import Abstract
        with pytest.warns(UserWarning):
            annotation = keyword_model.predict_abstract(Abstract(id=73, text="   "))
        assert annotation.spans == ()

    def test_uniform_abstract_yields_uniform_labels(self, keyword_model):
        from movekit.records import Abstract
        text = ("The method of the model and the data. "
                "The method for the task and the system. "
                "The method on the corpus and the text.")
        annotation = keyword_model.predict_abstract(Abstract(id=74, text=text))
        assert [s.label for s in annotation.spans] == ["MTD"] * 3


class TestArtifactIO:
    def test_save_load_round_trip(self, keyword_model, tmp_path):
        keyword_model.save(tmp_path / "model")
        again = MoveClassifier.load(tmp_path / "model")
        assert again.model_version == keyword_model.model_version
        text = "We propose to check artifact io."
        np.testing.assert_array_equal(
            np.array(list(again.predict(text).probabilities.values())),
            np.array(list(keyword_model.predict(text).probabilities.values())))

    def test_manifest_mismatch_detected(self, keyword_model, tmp_path):
        import json
        keyword_model.save(tmp_path / "model")
        manifest_path = tmp_path / "model" / "manifest.json"
        manifest = json.loads(manifest_path.read_text())
        manifest["head_w"] = [1, 1]
        manifest_path.write_text(json.dumps(manifest))
        with pytest.raises(ConfigError):
            MoveClassifier.load(tmp_path / "model")

    def test_missing_artifact_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            MoveClassifier.load(tmp_path / "nothing")


class TestCorpusToExamples:
    def test_examples_carry_neighbors_and_positions(self):
        corpus = make_confound_corpus(3, seed=1)
        examples = corpus_to_examples(corpus, context_window=1)
        assert len(examples) == 3 * 6
        first = examples[0]
        assert first.position_index == 0
        assert first.n_sentences == 6
        assert len(first.neighbors) == 1  # only the following sentence
        middle = examples[2]
        assert len(middle.neighbors) == 2

    def test_unlabeled_abstracts_skipped(self):
        from movekit.records import Abstract, AnnotatedAbstract
        corpus = [AnnotatedAbstract(abstract=Abstract(id=1, text="Some text here."))]
        assert corpus_to_examples(corpus) == []
