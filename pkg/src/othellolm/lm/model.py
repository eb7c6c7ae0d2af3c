"""Decoder-only transformer in plain numpy, forward and backward.

GPT-2 family layout: learned token + position embeddings, pre-norm
residual blocks (causal multi-head attention, then a GELU MLP with a
4x hidden width), a final layer norm, and an untied output projection.
Attention and MLP projections carry no biases except the MLP's two.

Parameters live in a name -> array dict whose order is fixed by
:func:`param_shapes`; that order is also the checkpoint tensor order.
Training runs in float32; :func:`gradient_check` runs in float64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LN_EPS = 1e-5
INIT_STD = 0.02
_GELU_C = math.sqrt(2.0 / math.pi)
_GELU_A = 0.044715


class InvalidConfig(ValueError):
    pass


class SequenceTooLong(ValueError):
    pass


class BadToken(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    layers: int = 4
    heads: int = 4
    model_dim: int = 128
    context_len: int = 128
    vocab: int = 67
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("layers", "heads", "model_dim", "context_len", "vocab"):
            if getattr(self, name) <= 0:
                raise InvalidConfig(f"{name} must be positive")
        if self.model_dim % self.heads != 0:
            raise InvalidConfig("model_dim must be divisible by heads")
        if self.context_len < 128:
            raise InvalidConfig("context_len must be >= 128 (a game is up to 62 tokens plus pass slack)")


def param_shapes(cfg: ModelConfig) -> list[tuple[str, tuple[int, ...]]]:
    """Parameter names and shapes in their canonical (checkpoint) order."""
    d, dv, dc = cfg.model_dim, cfg.vocab, cfg.context_len
    shapes: list[tuple[str, tuple[int, ...]]] = [
        ("tok_emb", (dv, d)),
        ("pos_emb", (dc, d)),
    ]
    for i in range(cfg.layers):
        p = f"h{i}."
        shapes += [
            (p + "ln1.g", (d,)),
            (p + "ln1.b", (d,)),
            (p + "attn.wq", (d, d)),
            (p + "attn.wk", (d, d)),
            (p + "attn.wv", (d, d)),
            (p + "attn.wo", (d, d)),
            (p + "ln2.g", (d,)),
            (p + "ln2.b", (d,)),
            (p + "mlp.w1", (d, 4 * d)),
            (p + "mlp.b1", (4 * d,)),
            (p + "mlp.w2", (4 * d, d)),
            (p + "mlp.b2", (d,)),
        ]
    shapes += [("lnf.g", (d,)), ("lnf.b", (d,)), ("head", (d, dv))]
    return shapes


def param_count(cfg: ModelConfig) -> int:
    d = cfg.model_dim
    per_layer = 12 * d * d + 9 * d
    return cfg.vocab * d + cfg.context_len * d + cfg.layers * per_layer + 2 * d + d * cfg.vocab


@dataclass
class Model:
    cfg: ModelConfig
    params: dict[str, np.ndarray]

    @property
    def dtype(self) -> np.dtype:
        return self.params["tok_emb"].dtype

    def astype(self, dtype) -> "Model":
        return Model(self.cfg, {k: v.astype(dtype) for k, v in self.params.items()})

    def copy(self) -> "Model":
        return Model(self.cfg, {k: v.copy() for k, v in self.params.items()})

    def param_count(self) -> int:
        return sum(p.size for p in self.params.values())


def init_model(cfg: ModelConfig, dtype=np.float32) -> Model:
    """Seeded Gaussian weights (std 0.02), identity norms, zero biases."""
    rng = np.random.default_rng(cfg.seed)
    params: dict[str, np.ndarray] = {}
    for name, shape in param_shapes(cfg):
        leaf = name.rsplit(".", 1)[-1]
        if leaf in ("g",):
            p = np.ones(shape)
        elif leaf in ("b", "b1", "b2"):
            p = np.zeros(shape)
        else:
            p = rng.normal(0.0, INIT_STD, size=shape)
        params[name] = p.astype(dtype)
    return Model(cfg, params)


def _softmax(x: np.ndarray) -> np.ndarray:
    # Denominator accumulated in float64 so probability rows sum to 1
    # to within element rounding even in float32.
    m = np.max(x, axis=-1, keepdims=True)
    e = np.exp(x - m)
    s = np.sum(e, axis=-1, keepdims=True, dtype=np.float64)
    return np.asarray(e / s, dtype=x.dtype)


def _layer_norm(x, g, b):
    mu = x.mean(-1, keepdims=True)
    xc = x - mu
    var = (xc * xc).mean(-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + np.asarray(LN_EPS, dtype=x.dtype))
    xhat = xc * inv
    return xhat * g + b, (xhat, inv)


def _layer_norm_backward(dy, cache, g):
    xhat, inv = cache
    dg = (dy * xhat).sum(axis=(0, 1))
    db = dy.sum(axis=(0, 1))
    dxhat = dy * g
    dx = inv * (
        dxhat
        - dxhat.mean(-1, keepdims=True)
        - xhat * (dxhat * xhat).mean(-1, keepdims=True)
    )
    return dx, dg, db


def _gelu(x):
    t = np.tanh(_GELU_C * (x + _GELU_A * x**3))
    return 0.5 * x * (1.0 + t), t


def _gelu_backward(dy, x, t):
    du = _GELU_C * (1.0 + 3.0 * _GELU_A * x * x)
    return dy * (0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du)


def _split_heads(x, heads):
    b, t, d = x.shape
    return x.reshape(b, t, heads, d // heads).transpose(0, 2, 1, 3)


def _merge_heads(x):
    b, h, t, hd = x.shape
    return x.transpose(0, 2, 1, 3).reshape(b, t, h * hd)


def _forward(params, cfg: ModelConfig, ids: np.ndarray, want_cache: bool):
    b, t = ids.shape
    dtype = params["tok_emb"].dtype
    scale = np.asarray(1.0 / math.sqrt(cfg.model_dim // cfg.heads), dtype=dtype)
    causal = np.tril(np.ones((t, t), dtype=bool))

    x = params["tok_emb"][ids] + params["pos_emb"][:t]
    caches = [] if want_cache else None
    for i in range(cfg.layers):
        p = f"h{i}."
        xn1, ln1_cache = _layer_norm(x, params[p + "ln1.g"], params[p + "ln1.b"])
        qh = _split_heads(xn1 @ params[p + "attn.wq"], cfg.heads)
        kh = _split_heads(xn1 @ params[p + "attn.wk"], cfg.heads)
        vh = _split_heads(xn1 @ params[p + "attn.wv"], cfg.heads)
        scores = (qh @ kh.transpose(0, 1, 3, 2)) * scale
        scores = np.where(causal, scores, np.asarray(-np.inf, dtype=dtype))
        att = _softmax(scores)
        merged = _merge_heads(att @ vh)
        h = x + merged @ params[p + "attn.wo"]

        xn2, ln2_cache = _layer_norm(h, params[p + "ln2.g"], params[p + "ln2.b"])
        a = xn2 @ params[p + "mlp.w1"] + params[p + "mlp.b1"]
        hidden, tanh_cache = _gelu(a)
        x = h + hidden @ params[p + "mlp.w2"] + params[p + "mlp.b2"]
        if want_cache:
            caches.append(
                dict(
                    xn1=xn1, ln1=ln1_cache, qh=qh, kh=kh, vh=vh, att=att,
                    merged=merged, h=h, xn2=xn2, ln2=ln2_cache,
                    a=a, tanh=tanh_cache, hidden=hidden,
                )
            )
    xf, lnf_cache = _layer_norm(x, params["lnf.g"], params["lnf.b"])
    logits = xf @ params["head"]
    if not want_cache:
        return logits, None
    return logits, {"ids": ids, "layers": caches, "xf": xf, "lnf": lnf_cache, "scale": scale}


def _check_ids(cfg: ModelConfig, batch) -> np.ndarray:
    try:
        ids = np.asarray(batch, dtype=np.int64)
    except (ValueError, TypeError):
        raise ShapeMismatch("batch sequences must share one length") from None
    if ids.ndim == 1:
        ids = ids[None, :]
    if ids.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D token batch, got shape {ids.shape}")
    if ids.shape[1] > cfg.context_len:
        raise SequenceTooLong(f"length {ids.shape[1]} > context {cfg.context_len}")
    if ids.size and (ids.min() < 0 or ids.max() >= cfg.vocab):
        raise BadToken("token id outside the vocabulary")
    return ids


def forward(model: Model, batch) -> np.ndarray:
    """Causal logits, shape (batch, length, vocab)."""
    ids = _check_ids(model.cfg, batch)
    logits, _ = _forward(model.params, model.cfg, ids, want_cache=False)
    return logits


def loss(logits: np.ndarray, targets: np.ndarray, mask: np.ndarray | None = None) -> float:
    """Mean next-token cross-entropy over unmasked positions."""
    logits = np.asarray(logits)
    targets = np.asarray(targets)
    if logits.shape[:-1] != targets.shape:
        raise ShapeMismatch(f"logits {logits.shape} vs targets {targets.shape}")
    if mask is None:
        mask = np.ones(targets.shape, dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != targets.shape:
        raise ShapeMismatch(f"mask {mask.shape} vs targets {targets.shape}")
    n = int(mask.sum())
    if n == 0:
        raise ShapeMismatch("no unmasked positions: loss undefined")
    m = logits.max(axis=-1, keepdims=True)
    lse = m[..., 0] + np.log(np.sum(np.exp(logits - m), axis=-1, dtype=np.float64))
    picked = np.take_along_axis(logits, targets[..., None], axis=-1)[..., 0]
    nll = lse - picked
    return float(np.sum(nll, where=mask, dtype=np.float64) / n)


def loss_and_grads(model: Model, inputs, targets, mask=None):
    """Training loss and gradients for every parameter.

    ``targets`` are the inputs shifted by one; masked positions do not
    contribute.  Returns (loss, grads) with grads keyed like params.
    """
    cfg, params = model.cfg, model.params
    ids = _check_ids(cfg, inputs)
    targets = np.asarray(targets, dtype=np.int64)
    logits, cache = _forward(params, cfg, ids, want_cache=True)
    value = loss(logits, targets, mask)

    if mask is None:
        mask = np.ones(targets.shape, dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    n = int(mask.sum())
    dtype = logits.dtype

    dlogits = _softmax(logits)
    rows = np.arange(targets.shape[0])[:, None], np.arange(targets.shape[1])[None, :]
    dlogits[rows[0], rows[1], targets] -= 1.0
    dlogits *= (mask[..., None] / n).astype(dtype)

    grads: dict[str, np.ndarray] = {}
    b, t = ids.shape
    d = cfg.model_dim

    xf = cache["xf"]
    grads["head"] = xf.reshape(-1, d).T @ dlogits.reshape(-1, cfg.vocab)
    dxf = dlogits @ params["head"].T
    dx, grads["lnf.g"], grads["lnf.b"] = _layer_norm_backward(dxf, cache["lnf"], params["lnf.g"])

    scale = cache["scale"]
    for i in reversed(range(cfg.layers)):
        p = f"h{i}."
        c = cache["layers"][i]

        # MLP half: x_out = h + gelu(ln2(h) @ w1 + b1) @ w2 + b2
        dmo = dx
        grads[p + "mlp.w2"] = c["hidden"].reshape(-1, 4 * d).T @ dmo.reshape(-1, d)
        grads[p + "mlp.b2"] = dmo.sum(axis=(0, 1))
        dhidden = dmo @ params[p + "mlp.w2"].T
        da = _gelu_backward(dhidden, c["a"], c["tanh"])
        grads[p + "mlp.w1"] = c["xn2"].reshape(-1, d).T @ da.reshape(-1, 4 * d)
        grads[p + "mlp.b1"] = da.sum(axis=(0, 1))
        dxn2 = da @ params[p + "mlp.w1"].T
        dln2, grads[p + "ln2.g"], grads[p + "ln2.b"] = _layer_norm_backward(
            dxn2, c["ln2"], params[p + "ln2.g"]
        )
        dh = dx + dln2

        # attention half: h = x_in + merge(att @ v) @ wo
        grads[p + "attn.wo"] = c["merged"].reshape(-1, d).T @ dh.reshape(-1, d)
        dmerged = dh @ params[p + "attn.wo"].T
        dctx = _split_heads(dmerged, cfg.heads)
        datt = dctx @ c["vh"].transpose(0, 1, 3, 2)
        dvh = c["att"].transpose(0, 1, 3, 2) @ dctx
        ds = c["att"] * (datt - np.sum(datt * c["att"], axis=-1, keepdims=True))
        ds = ds * scale
        dqh = ds @ c["kh"]
        dkh = ds.transpose(0, 1, 3, 2) @ c["qh"]
        dq, dk, dv = _merge_heads(dqh), _merge_heads(dkh), _merge_heads(dvh)
        xn1_flat = c["xn1"].reshape(-1, d)
        grads[p + "attn.wq"] = xn1_flat.T @ dq.reshape(-1, d)
        grads[p + "attn.wk"] = xn1_flat.T @ dk.reshape(-1, d)
        grads[p + "attn.wv"] = xn1_flat.T @ dv.reshape(-1, d)
        dxn1 = dq @ params[p + "attn.wq"].T
        dxn1 += dk @ params[p + "attn.wk"].T
        dxn1 += dv @ params[p + "attn.wv"].T
        dln1, grads[p + "ln1.g"], grads[p + "ln1.b"] = _layer_norm_backward(
            dxn1, c["ln1"], params[p + "ln1.g"]
        )
        dx = dh + dln1

    grads["pos_emb"] = np.zeros_like(params["pos_emb"])
    grads["pos_emb"][:t] = dx.sum(axis=0)
    grads["tok_emb"] = np.zeros_like(params["tok_emb"])
    np.add.at(grads["tok_emb"], ids, dx)

    return value, {name: grads[name].astype(dtype, copy=False) for name, _ in param_shapes(cfg)}


def _loss_only(model: Model, inputs, targets, mask) -> float:
    logits, _ = _forward(model.params, model.cfg, np.asarray(inputs, dtype=np.int64), want_cache=False)
    return loss(logits, targets, mask)


def gradient_check(cfg: ModelConfig | None = None, h: float = 1e-5) -> float:
    """Max relative error of analytic gradients vs central differences.

    Runs a tiny double-precision model on a fixed seeded batch and
    perturbs every parameter.  The relative error denominator is
    floored at 1e-5 so exactly-zero gradients compare by absolute
    error instead of amplifying finite-difference noise.
    """
    if cfg is None:
        cfg = ModelConfig(layers=1, heads=2, model_dim=8, context_len=128, vocab=67, seed=0)
    model = init_model(cfg, dtype=np.float64)
    rng = np.random.default_rng(cfg.seed + 1)
    ids = rng.integers(0, cfg.vocab, size=(2, 10))
    inputs, targets = ids[:, :-1], ids[:, 1:]
    mask = np.ones_like(targets, dtype=bool)
    mask[1, -2:] = False  # exercise loss masking

    _, grads = loss_and_grads(model, inputs, targets, mask)
    worst = 0.0
    for name, _ in param_shapes(cfg):
        flat = model.params[name].reshape(-1)
        gflat = grads[name].reshape(-1)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + h
            up = _loss_only(model, inputs, targets, mask)
            flat[j] = orig - h
            down = _loss_only(model, inputs, targets, mask)
            flat[j] = orig
            fd = (up - down) / (2.0 * h)
            err = abs(gflat[j] - fd) / max(abs(gflat[j]), abs(fd), 1e-5)
            worst = max(worst, err)
    return worst
