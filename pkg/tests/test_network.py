import numpy as np
import pytest

from movekit import network


def tiny_setup(seed=1, batch_seed=2):
    cfg = network.NetConfig(vocab_size=30, hidden=16, layers=2, heads=2,
                            ff=32, max_len=12)
    params = network.init_params(cfg, seed=seed)
    rng = np.random.default_rng(batch_seed)
    b, t = 3, 9
    batch = {
        "tokens": rng.integers(0, cfg.vocab_size, (b, t)),
        "segments": rng.integers(0, 2, (b, t)),
        "positions": np.tile(np.arange(t), (b, 1)),
        "saliency": rng.integers(0, cfg.saliency_buckets, (b, t)),
        "sentpos": rng.integers(0, cfg.sentpos_buckets + 1, b),
        "mask": np.ones((b, t)),
    }
    batch["mask"][0, 6:] = 0.0
    batch["mask"][2, 4:] = 0.0
    targets = (rng.random((b, cfg.n_outputs)) < 0.3).astype(float)
    return cfg, params, batch, targets


def numeric_grad(params, cfg, batch, targets, pos_weight, key, idx, h=1e-5):
    orig = params[key][idx]

    def loss_at(value):
        params[key][idx] = value
        _, cache = network.forward(params, cfg, batch, want_cache=True)
        loss, _ = network.bce_loss(cache["logits"], targets, pos_weight)
        return loss

    plus, minus = loss_at(orig + h), loss_at(orig - h)
    params[key][idx] = orig
    return (plus - minus) / (2 * h)


class TestGradients:
    def test_central_difference_agreement(self):
        cfg, params, batch, targets = tiny_setup()
        pos_weight = np.linspace(1.0, 2.5, cfg.n_outputs)
        _, _, grads = network.loss_and_grads(params, cfg, batch, targets, pos_weight)
        rng = np.random.default_rng(7)
        keys = sorted(params)
        for _ in range(20):
            key = keys[rng.integers(0, len(keys))]
            idx = tuple(rng.integers(0, s) for s in params[key].shape)
            numeric = numeric_grad(params, cfg, batch, targets, pos_weight, key, idx)
            analytic = grads[key][idx]
            rel = abs(numeric - analytic) / max(1e-8, abs(numeric) + abs(analytic))
            assert rel < 1e-3, (key, idx, numeric, analytic, rel)

    def test_pad_token_embeddings_get_zero_gradient_via_attention(self):
        cfg, params, batch, targets = tiny_setup()
        _, _, grads = network.loss_and_grads(params, cfg, batch, targets)
        # padded positions are masked out of attention; the only nonzero
        # flow into their token embedding rows would be a bug
        padded_tokens = batch["tokens"][batch["mask"] == 0.0]
        live_tokens = batch["tokens"][batch["mask"] == 1.0]
        only_padded = set(padded_tokens.tolist()) - set(live_tokens.tolist())
        for tok in only_padded:
            assert np.allclose(grads["tok_emb"][tok], 0.0)


class TestForward:
    def test_probabilities_in_unit_interval(self):
        cfg, params, batch, _ = tiny_setup()
        probs, _ = network.forward(params, cfg, batch)
        assert probs.shape == (3, cfg.n_outputs)
        assert np.all(probs > 0.0) and np.all(probs < 1.0)

    def test_padding_content_does_not_change_output(self):
        cfg, params, batch, _ = tiny_setup()
        probs1, _ = network.forward(params, cfg, batch)
        batch2 = {k: (v.copy() if isinstance(v, np.ndarray) else v)
                  for k, v in batch.items()}
        batch2["tokens"][batch2["mask"] == 0.0] = 3  # arbitrary garbage
        probs2, _ = network.forward(params, cfg, batch2)
        np.testing.assert_array_equal(probs1, probs2)

    def test_forward_is_deterministic(self):
        cfg, params, batch, _ = tiny_setup()
        a, _ = network.forward(params, cfg, batch)
        b, _ = network.forward(params, cfg, batch)
        np.testing.assert_array_equal(a, b)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            network.NetConfig(vocab_size=10, hidden=10, heads=3)
        with pytest.raises(ValueError):
            network.NetConfig(vocab_size=10, saliency_buckets=4)


class TestTraining:
    def test_adam_reduces_loss_on_fixed_batch(self):
        cfg, params, batch, targets = tiny_setup()
        opt = network.Adam(params, lr=5e-3)
        losses = []
        for _ in range(30):
            loss, _, grads = network.loss_and_grads(params, cfg, batch, targets)
            opt.step(params, grads)
            losses.append(loss)
        assert losses[-1] < losses[0] * 0.5
