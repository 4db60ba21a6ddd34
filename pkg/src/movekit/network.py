"""Small transformer encoder with hand-written backprop, in float64 numpy.

The input is a sum of four embedding channels (token, segment, position,
saliency bucket) plus a sentence-position feature added at the [CLS]
slot. The pooled [CLS] vector feeds 8 independent logistic heads, one
per move label (one-vs-rest). Gradients are exact; the test suite checks
them against central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK_VALUE = -1e30  # additive attention mask for padded key positions


@dataclass(frozen=True)
class NetConfig:
    vocab_size: int
    hidden: int = 64
    layers: int = 2
    heads: int = 2
    ff: int = 128
    max_len: int = 64
    n_outputs: int = 8
    saliency_buckets: int = 11
    sentpos_buckets: int = 10  # learned ids 1..10; id 0 = feature disabled

    def __post_init__(self):
        if self.hidden % self.heads != 0:
            raise ValueError("hidden must be divisible by heads")
        if self.saliency_buckets % 2 == 0 or self.saliency_buckets < 3:
            raise ValueError("saliency_buckets must be odd and >= 3")


def init_params(cfg: NetConfig, seed: int) -> dict[str, np.ndarray]:
    rng = np.random.default_rng(seed)
    d, ff = cfg.hidden, cfg.ff

    def w(*shape):
        return rng.normal(0.0, 0.02, size=shape)

    p: dict[str, np.ndarray] = {
        "tok_emb": w(cfg.vocab_size, d),
        "seg_emb": w(2, d),
        "pos_emb": w(cfg.max_len, d),
        "sal_emb": w(cfg.saliency_buckets, d),
        "sentpos_emb": w(cfg.sentpos_buckets + 1, d),
        "lnf_g": np.ones(d), "lnf_b": np.zeros(d),
        "head_w": w(d, cfg.n_outputs), "head_b": np.zeros(cfg.n_outputs),
    }
    for l in range(cfg.layers):
        p[f"l{l}_ln1_g"] = np.ones(d)
        p[f"l{l}_ln1_b"] = np.zeros(d)
        for name in ("q", "k", "v", "o"):
            p[f"l{l}_w{name}"] = w(d, d)
            p[f"l{l}_b{name}"] = np.zeros(d)
        p[f"l{l}_ln2_g"] = np.ones(d)
        p[f"l{l}_ln2_b"] = np.zeros(d)
        p[f"l{l}_w1"] = w(d, ff)
        p[f"l{l}_b1"] = np.zeros(ff)
        p[f"l{l}_w2"] = w(ff, d)
        p[f"l{l}_b2"] = np.zeros(d)
    return p


def _ln_forward(x, g, b, eps=1e-5):
    mu = x.mean(axis=-1, keepdims=True)
    var = ((x - mu) ** 2).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (x - mu) * inv
    return xhat * g + b, (xhat, inv, g)


def _ln_backward(dy, cache):
    xhat, inv, g = cache
    dxhat = dy * g
    dg = (dy * xhat).sum(axis=tuple(range(dy.ndim - 1)))
    db = dy.sum(axis=tuple(range(dy.ndim - 1)))
    m1 = dxhat.mean(axis=-1, keepdims=True)
    m2 = (dxhat * xhat).mean(axis=-1, keepdims=True)
    dx = inv * (dxhat - m1 - xhat * m2)
    return dx, dg, db


def _split_heads(x, heads):
    b, t, d = x.shape
    return x.reshape(b, t, heads, d // heads).transpose(0, 2, 1, 3)


def _merge_heads(x):
    b, h, t, dh = x.shape
    return x.transpose(0, 2, 1, 3).reshape(b, t, h * dh)


def forward(params: dict, cfg: NetConfig, batch: dict, want_cache: bool = False):
    """Forward pass over a padded batch.

    ``batch`` holds int arrays ``tokens``, ``segments``, ``positions``,
    ``saliency`` of shape (B, T), ``sentpos`` of shape (B,), and a float
    ``mask`` (B, T) with 1.0 at real tokens. Returns (probs, cache).
    """
    tokens, segments = batch["tokens"], batch["segments"]
    positions, saliency = batch["positions"], batch["saliency"]
    sentpos, mask = batch["sentpos"], batch["mask"]

    x = (params["tok_emb"][tokens] + params["seg_emb"][segments]
         + params["pos_emb"][positions] + params["sal_emb"][saliency])
    x[:, 0, :] += params["sentpos_emb"][sentpos]

    attn_bias = (1.0 - mask)[:, None, None, :] * MASK_VALUE  # (B,1,1,T)
    scale = 1.0 / np.sqrt(cfg.hidden // cfg.heads)
    layer_caches = []

    for l in range(cfg.layers):
        a, ln1c = _ln_forward(x, params[f"l{l}_ln1_g"], params[f"l{l}_ln1_b"])
        q = a @ params[f"l{l}_wq"] + params[f"l{l}_bq"]
        k = a @ params[f"l{l}_wk"] + params[f"l{l}_bk"]
        v = a @ params[f"l{l}_wv"] + params[f"l{l}_bv"]
        qh, kh, vh = (_split_heads(t_, cfg.heads) for t_ in (q, k, v))
        scores = qh @ kh.transpose(0, 1, 3, 2) * scale + attn_bias
        scores -= scores.max(axis=-1, keepdims=True)
        e = np.exp(scores)
        p_attn = e / e.sum(axis=-1, keepdims=True)
        ctx = _merge_heads(p_attn @ vh)
        o = ctx @ params[f"l{l}_wo"] + params[f"l{l}_bo"]
        x1 = x + o

        a2, ln2c = _ln_forward(x1, params[f"l{l}_ln2_g"], params[f"l{l}_ln2_b"])
        h1 = a2 @ params[f"l{l}_w1"] + params[f"l{l}_b1"]
        hr = np.maximum(h1, 0.0)
        f = hr @ params[f"l{l}_w2"] + params[f"l{l}_b2"]
        x2 = x1 + f

        if want_cache:
            layer_caches.append((a, ln1c, qh, kh, vh, p_attn, ctx, x1, a2, ln2c, h1, hr))
        x = x2

    xf, lnfc = _ln_forward(x, params["lnf_g"], params["lnf_b"])
    cls = xf[:, 0, :]
    logits = cls @ params["head_w"] + params["head_b"]
    probs = 1.0 / (1.0 + np.exp(-logits))

    cache = None
    if want_cache:
        cache = {"batch": batch, "layers": layer_caches, "lnfc": lnfc,
                 "cls": cls, "logits": logits, "x_final": x}
    return probs, cache


def bce_loss(logits: np.ndarray, targets: np.ndarray,
             pos_weight: np.ndarray | None = None) -> tuple[float, np.ndarray]:
    """Mean binary cross-entropy over all (example, label) cells.

    Returns (loss, dloss/dlogits). Computed via softplus for stability.
    """
    z, y = logits, targets
    softplus_negz = np.logaddexp(0.0, -z)
    softplus_z = np.logaddexp(0.0, z)
    w = pos_weight if pos_weight is not None else 1.0
    cell = w * y * softplus_negz + (1.0 - y) * softplus_z
    loss = float(cell.mean())
    sig = 1.0 / (1.0 + np.exp(-z))
    dz = ((1.0 - y) * sig - w * y * (1.0 - sig)) / z.size
    return loss, dz


def backward(params: dict, cfg: NetConfig, cache: dict, dlogits: np.ndarray) -> dict:
    """Exact gradients of the scalar loss w.r.t. every parameter."""
    grads = {k: np.zeros_like(v) for k, v in params.items()}
    batch = cache["batch"]
    scale = 1.0 / np.sqrt(cfg.hidden // cfg.heads)

    grads["head_w"] = cache["cls"].T @ dlogits
    grads["head_b"] = dlogits.sum(axis=0)
    dcls = dlogits @ params["head_w"].T

    dxf = np.zeros_like(cache["x_final"])
    dxf[:, 0, :] = dcls
    dx, dg, db = _ln_backward(dxf, cache["lnfc"])
    grads["lnf_g"], grads["lnf_b"] = dg, db

    for l in range(cfg.layers - 1, -1, -1):
        a, ln1c, qh, kh, vh, p_attn, ctx, x1, a2, ln2c, h1, hr = cache["layers"][l]
        # FFN block: x2 = x1 + W2·relu(W1·LN2(x1))
        df = dx
        grads[f"l{l}_w2"] += np.einsum("btf,btd->fd", hr, df)
        grads[f"l{l}_b2"] += df.sum(axis=(0, 1))
        dhr = df @ params[f"l{l}_w2"].T
        dh1 = dhr * (h1 > 0.0)
        grads[f"l{l}_w1"] += np.einsum("btd,btf->df", a2, dh1)
        grads[f"l{l}_b1"] += dh1.sum(axis=(0, 1))
        da2 = dh1 @ params[f"l{l}_w1"].T
        dx1_ln, dg2, db2 = _ln_backward(da2, ln2c)
        grads[f"l{l}_ln2_g"], grads[f"l{l}_ln2_b"] = dg2, db2
        dx1 = dx + dx1_ln

        # attention block: x1 = x + Wo·attn(LN1(x))
        do = dx1
        grads[f"l{l}_wo"] += np.einsum("btd,bte->de", ctx, do)
        grads[f"l{l}_bo"] += do.sum(axis=(0, 1))
        dctx = do @ params[f"l{l}_wo"].T
        dch = _split_heads(dctx, cfg.heads)
        dp = dch @ vh.transpose(0, 1, 3, 2)
        dvh = p_attn.transpose(0, 1, 3, 2) @ dch
        ds = p_attn * (dp - (dp * p_attn).sum(axis=-1, keepdims=True))
        dqh = ds @ kh * scale
        dkh = ds.transpose(0, 1, 3, 2) @ qh * scale
        dq, dk, dv = _merge_heads(dqh), _merge_heads(dkh), _merge_heads(dvh)
        da = np.zeros_like(a)
        for name, dt in (("q", dq), ("k", dk), ("v", dv)):
            grads[f"l{l}_w{name}"] += np.einsum("btd,bte->de", a, dt)
            grads[f"l{l}_b{name}"] += dt.sum(axis=(0, 1))
            da += dt @ params[f"l{l}_w{name}"].T
        dx_ln, dg1, db1 = _ln_backward(da, ln1c)
        grads[f"l{l}_ln1_g"], grads[f"l{l}_ln1_b"] = dg1, db1
        dx = dx1 + dx_ln

    # embedding channels
    d = cfg.hidden
    flat = dx.reshape(-1, d)
    np.add.at(grads["tok_emb"], batch["tokens"].ravel(), flat)
    np.add.at(grads["seg_emb"], batch["segments"].ravel(), flat)
    np.add.at(grads["pos_emb"], batch["positions"].ravel(), flat)
    np.add.at(grads["sal_emb"], batch["saliency"].ravel(), flat)
    np.add.at(grads["sentpos_emb"], batch["sentpos"], dx[:, 0, :])
    return grads


def loss_and_grads(params: dict, cfg: NetConfig, batch: dict, targets: np.ndarray,
                   pos_weight: np.ndarray | None = None):
    probs, cache = forward(params, cfg, batch, want_cache=True)
    loss, dlogits = bce_loss(cache["logits"], targets, pos_weight)
    grads = backward(params, cfg, cache, dlogits)
    return loss, probs, grads


class Adam:
    def __init__(self, params: dict, lr: float = 1e-3,
                 betas: tuple[float, float] = (0.9, 0.999), eps: float = 1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, betas[0], betas[1], eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict, grads: dict) -> None:
        self.t += 1
        bc1 = 1.0 - self.b1 ** self.t
        bc2 = 1.0 - self.b2 ** self.t
        for k, g in grads.items():
            self.m[k] = self.b1 * self.m[k] + (1.0 - self.b1) * g
            self.v[k] = self.b2 * self.v[k] + (1.0 - self.b2) * g * g
            params[k] -= self.lr * (self.m[k] / bc1) / (np.sqrt(self.v[k] / bc2) + self.eps)
