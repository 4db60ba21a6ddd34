import pytest

from movekit.tokenizer import SPECIALS, Tokenizer, split_words


class TestSplitWords:
    def test_lowercases_and_splits_punctuation(self):
        assert split_words("We propose X-Net.") == \
            ["we", "propose", "x", "-", "net", "."]

    def test_digits_kept_together(self):
        assert split_words("rose 3.5 %") == ["rose", "3", ".", "5", "%"]


@pytest.fixture(scope="module")
def tok():
    return Tokenizer.train(["the model we propose", "a propose model x",
                            "the data we use"], vocab_size=64)


class TestTokenizer:
    def test_specials_first(self, tok):
        assert tuple(tok.vocab[:5]) == SPECIALS
        assert tok.pad_id == 0

    def test_known_word_single_piece(self, tok):
        assert tok.encode_word("propose") == [tok.ids["propose"]]

    def test_unknown_word_falls_back_to_characters(self, tok):
        pieces = tok.encode_word("dome")  # unseen word, seen characters
        assert len(pieces) > 1
        assert tok.unk_id not in pieces

    def test_unseen_character_is_unk(self, tok):
        assert tok.encode_word("étude") == [tok.unk_id]

    def test_word_alignment_spans(self, tok):
        ids, spans = tok.encode_words(["the", "dome", "model"])
        assert len(spans) == 3
        flat = []
        for a, b in spans:
            assert a < b
            flat.extend(range(a, b))
        assert flat == list(range(len(ids)))

    def test_round_trip_save_load(self, tok, tmp_path):
        tok.save(tmp_path / "vocab.txt")
        again = Tokenizer.load(tmp_path / "vocab.txt")
        assert again.vocab == tok.vocab
        assert again.encode_word("propose") == tok.encode_word("propose")

    def test_training_is_deterministic(self):
        texts = ["alpha beta gamma", "beta gamma delta", "gamma delta epsilon"]
        a = Tokenizer.train(texts, vocab_size=40)
        b = Tokenizer.train(texts, vocab_size=40)
        assert a.vocab == b.vocab
