"""Training-corpus construction: game synthesis, tokenization, datasets.

Tokens are move-level: id 0 marks sequence start, id 1 sequence end,
id 2 a pass, and ids 3..66 the squares A1..H8 in index order (67 ids
total).  Every encoded game is ``[BOS, move tokens..., EOS]``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import board, notation
from .board import PASS, Move
from .notation import GameRecord

BOS_ID = 0
EOS_ID = 1
PASS_ID = 2
SQUARE_BASE = 3
VOCAB_SIZE = 67


class InsufficientRecords(ValueError):
    """Requested subsample exceeds the number of available records."""


class Vocabulary:
    """Fixed bijection between token ids and move/marker texts."""

    size = VOCAB_SIZE

    def __init__(self) -> None:
        texts = [notation.BOS_TEXT, notation.EOS_TEXT, notation.PASS_TEXT]
        texts += [notation.square_name(sq) for sq in range(64)]
        self._texts = texts
        self._ids = {t: i for i, t in enumerate(texts)}

    def id_for_move(self, move: Move) -> int:
        return PASS_ID if move == PASS else SQUARE_BASE + move

    def move_for_id(self, token: int) -> Move:
        if token == PASS_ID:
            return PASS
        if SQUARE_BASE <= token < VOCAB_SIZE:
            return token - SQUARE_BASE
        raise notation.Malformed(f"token id {token} is not a move")

    def text_for_id(self, token: int) -> str:
        if not 0 <= token < VOCAB_SIZE:
            raise notation.Malformed(f"unknown token id {token}")
        return self._texts[token]

    def id_for_text(self, text: str) -> int:
        try:
            return self._ids[text]
        except KeyError:
            raise notation.Malformed(f"unknown token text {text!r}") from None


VOCAB = Vocabulary()


def synthesize_games(n: int, seed: int) -> list[GameRecord]:
    """Uniform-random legal self-play games, complete and deterministic.

    Passes are recorded explicitly, so every record replays move for
    move without the auto-pass rule.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = random.Random(seed)
    records = []
    for i in range(n):
        pos = board.initial_position()
        moves: list[Move] = []
        while not board.is_terminal(pos):
            legal = sorted(board.bits(board.legal_mask(pos)))
            move = rng.choice(legal) if legal else PASS
            moves.append(move)
            pos = board.apply(pos, move)
        black, white = board.score(pos)
        records.append(
            GameRecord(
                headers=[
                    ("Event", "random self-play"),
                    ("Black", "rng"),
                    ("White", "rng"),
                    ("Result", f"{black}-{white}"),
                ],
                moves=moves,
            )
        )
    return records


def encode_moves(moves: list[Move]) -> list[int]:
    return [BOS_ID] + [VOCAB.id_for_move(m) for m in moves] + [EOS_ID]


def encode_game(rec: GameRecord) -> list[int]:
    """BOS + one token per move + EOS; length = len(moves) + 2."""
    return encode_moves(rec.moves)


def decode_moves(tokens) -> list[Move]:
    """Moves from a token sequence; see :func:`decode_tokens` for the rules."""
    tokens = list(tokens)
    start = tokens.index(BOS_ID) + 1 if BOS_ID in tokens else 0
    moves = []
    for token in tokens[start:]:
        token = int(token)
        if token == EOS_ID:
            break
        if not 0 <= token < VOCAB_SIZE:
            raise notation.Malformed(f"unknown token id {token}")
        if token == BOS_ID:
            continue
        moves.append(VOCAB.move_for_id(token))
    return moves


def decode_tokens(tokens) -> str:
    """Compact transcript of a token sequence.

    Decoding starts after the first BOS (if any) and stops at the first
    EOS; tokens outside that window are ignored, unknown ids inside it
    raise Malformed.
    """
    return notation.serialize_transcript(decode_moves(tokens))


@dataclass
class Dataset:
    """Encoded sequences plus a deterministic train/validation split."""

    sequences: list[list[int]]
    train_indices: list[int]
    val_indices: list[int]
    seed: int = 0

    def __post_init__(self) -> None:
        if set(self.train_indices) & set(self.val_indices):
            raise ValueError("train and validation indices overlap")
        for seq in self.sequences:
            if not seq or seq[0] != BOS_ID or seq[-1] != EOS_ID:
                raise ValueError("sequence must start with BOS and end with EOS")
            if any(not 0 <= t < VOCAB_SIZE for t in seq):
                raise ValueError("token id out of range")

    @property
    def train_sequences(self) -> list[list[int]]:
        return [self.sequences[i] for i in self.train_indices]

    @property
    def val_sequences(self) -> list[list[int]]:
        return [self.sequences[i] for i in self.val_indices]


def build_dataset(
    records: list[GameRecord],
    sample_n: int | None = None,
    val_fraction: float = 0.0,
    seed: int = 0,
) -> Dataset:
    """Subsample ``sample_n`` records without replacement, encode, split."""
    if sample_n is None:
        sample_n = len(records)
    if sample_n > len(records):
        raise InsufficientRecords(f"asked for {sample_n} of {len(records)} records")
    if not 0 <= val_fraction < 1:
        raise ValueError("val_fraction must be in [0, 1)")
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(records), size=sample_n, replace=False)
    sequences = [encode_game(records[int(i)]) for i in picked]
    order = rng.permutation(sample_n)
    n_val = int(round(sample_n * val_fraction))
    val = sorted(int(i) for i in order[:n_val])
    train = sorted(int(i) for i in order[n_val:])
    return Dataset(sequences=sequences, train_indices=train, val_indices=val, seed=seed)


def dataset_stats(ds: Dataset) -> dict:
    lengths = [len(s) for s in ds.sequences]
    total = sum(lengths)
    return {
        "games": len(lengths),
        "total_tokens": total,
        "mean_length": total / len(lengths) if lengths else 0.0,
        "max_length": max(lengths, default=0),
    }


def save_dataset(ds: Dataset, directory) -> None:
    """Persist as corpus lines plus a JSON sidecar with the split."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / "corpus.txt", "w", encoding="utf-8") as f:
        for seq in ds.sequences:
            f.write(notation.wrap_delimiters(decode_tokens(seq)))
            f.write("\n")
    meta = {
        "seed": ds.seed,
        "games": len(ds.sequences),
        "total_tokens": sum(len(s) for s in ds.sequences),
        "train_indices": ds.train_indices,
        "val_indices": ds.val_indices,
    }
    with open(directory / "meta.json", "w", encoding="utf-8") as f:
        json.dump(meta, f, indent=2)
        f.write("\n")


def load_dataset(directory) -> Dataset:
    directory = Path(directory)
    with open(directory / "meta.json", encoding="utf-8") as f:
        meta = json.load(f)
    sequences = []
    with open(directory / "corpus.txt", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            moves = notation.parse_transcript(line)
            sequences.append(encode_moves(moves))
    return Dataset(
        sequences=sequences,
        train_indices=meta["train_indices"],
        val_indices=meta["val_indices"],
        seed=meta["seed"],
    )
