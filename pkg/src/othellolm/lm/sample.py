"""Temperature / top-k sampling of game transcripts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import corpus
from .model import Model, _forward


class ContextFull(ValueError):
    pass


@dataclass(frozen=True)
class SampleConfig:
    temperature: float = 1.0
    top_k: int = 0  # 0 disables the filter
    max_tokens: int = 128
    seed: int = 0

    def __post_init__(self) -> None:
        if self.temperature <= 0:
            raise ValueError("temperature must be > 0")
        if self.top_k < 0:
            raise ValueError("top_k must be >= 0")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")


def next_token_probs(model: Model, context, scfg: SampleConfig) -> np.ndarray:
    """Sampling distribution over the next token (float64, sums to 1)."""
    context = list(context)
    if len(context) >= model.cfg.context_len:
        raise ContextFull(f"context length {len(context)} >= {model.cfg.context_len}")
    if scfg.max_tokens > model.cfg.context_len:
        raise ContextFull("max_tokens exceeds the model context")
    ids = np.asarray([context], dtype=np.int64)
    logits, _ = _forward(model.params, model.cfg, ids, want_cache=False)
    z = logits[0, -1].astype(np.float64) / scfg.temperature
    if scfg.top_k and scfg.top_k < z.size:
        cutoff = np.partition(z, -scfg.top_k)[-scfg.top_k]
        z = np.where(z >= cutoff, z, -np.inf)
    z -= z.max()
    p = np.exp(z)
    return p / p.sum()


def sample_next(model: Model, context, scfg: SampleConfig, rng: np.random.Generator) -> int:
    """Draw one token id from the temperature/top-k distribution."""
    p = next_token_probs(model, context, scfg)
    return int(rng.choice(p.size, p=p))


def generate_game(model: Model, scfg: SampleConfig, rng: np.random.Generator | None = None) -> str:
    """Sample one raw transcript: BOS, then tokens until EOS or max_tokens.

    No legality is enforced; the text is whatever the model emits,
    decoded to the compact transcript form.
    """
    if rng is None:
        rng = np.random.default_rng(scfg.seed)
    seq = [corpus.BOS_ID]
    while len(seq) < scfg.max_tokens:
        token = sample_next(model, seq, scfg, rng)
        seq.append(token)
        if token == corpus.EOS_ID:
            break
    return corpus.decode_tokens(seq)


def generate_games(model: Model, scfg: SampleConfig, n: int) -> list[str]:
    """n independent transcripts; per-game rngs spawn from scfg.seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    children = np.random.SeedSequence(scfg.seed).spawn(n)
    return [generate_game(model, scfg, np.random.default_rng(c)) for c in children]
