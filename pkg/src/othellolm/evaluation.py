"""Replay transcripts through the rules engine and score their legality.

A transcript's moves are replayed from the starting position with the
auto-pass rule: whenever the side to move has no legal placement, a
pass is inserted before the next token is consumed (archives and model
output usually omit passes).  Replay stops at the first violation and
classifies it; completion is measured against the 60 placements of a
full game, matching the usual "43/60" style of reporting.
"""

from __future__ import annotations

import enum
import json
import math
import random
import re
import statistics
from dataclasses import dataclass

from . import board, notation
from .board import Player, Position

FULL_GAME_PLIES = 60
HISTOGRAM_BINS = 10

# Completion figures reported for the original large-model experiments,
# kept as reference constants only (never asserted against this model).
REFERENCE_COMPLETIONS = {"fine_tuned_best": 43 / 60, "few_shot_best": 27 / 60}

_NUMBER_RE = re.compile(r"^\d+\.$")

# The four center squares are occupied from the start, so 60 squares
# are ever playable; the uniform-random baseline draws from these.
PLAYABLE_SQUARES = [
    sq for sq in range(64)
    if sq not in (
        board.square_index(4, 4), board.square_index(5, 4),
        board.square_index(4, 5), board.square_index(5, 5),
    )
]


class FailureKind(enum.Enum):
    OCCUPIED_SQUARE = "occupied_square"
    NO_FLANK = "no_flank"
    BAD_TOKEN = "bad_token"
    OVERRUN = "overrun"


class EmptyInput(ValueError):
    """Aggregate statistics over zero reports are undefined."""


@dataclass(frozen=True)
class LegalityReport:
    """Replay verdict for one transcript.

    ``claimed_plies`` counts claimed placements: every move token that
    is not a pass, malformed or not.  Pass tokens are not placements,
    so an illegal explicit pass fails as BAD_TOKEN without entering
    the count.
    """

    legal_plies: int
    claimed_plies: int
    failure: FailureKind | None
    failure_ply: int | None
    final_position: Position
    completion_ratio: float
    accepted_ratio: float  # legal / claimed placements, 1.0 for empty-legal

    def to_json(self) -> dict:
        black, white = board.score(self.final_position)
        return {
            "legal_plies": self.legal_plies,
            "claimed_plies": self.claimed_plies,
            "failure": self.failure.value if self.failure else None,
            "failure_ply": self.failure_ply,
            "completion_ratio": self.completion_ratio,
            "accepted_ratio": self.accepted_ratio,
            "final_score": [black, white],
        }


@dataclass(frozen=True)
class TimelineEntry:
    ply: int
    black: int
    white: int
    leader: Player | None  # None = tie

    def to_json(self) -> dict:
        return {
            "ply": self.ply,
            "black": self.black,
            "white": self.white,
            "leader": self.leader.value if self.leader else "tie",
        }


@dataclass(frozen=True)
class AggregateReport:
    n_games: int
    completion_min: float
    completion_max: float
    completion_mean: float
    completion_median: float
    histogram: tuple[int, ...]  # 10 bins over [0, 1]
    failure_counts: dict[str, int]  # includes "none"
    full_games: int  # games with all 60 placements accepted

    def to_json(self) -> dict:
        return {
            "n_games": self.n_games,
            "completion": {
                "min": self.completion_min,
                "max": self.completion_max,
                "mean": self.completion_mean,
                "median": self.completion_median,
            },
            "histogram": list(self.histogram),
            "failure_counts": self.failure_counts,
            "full_games": self.full_games,
        }


def _leader(black: int, white: int) -> Player | None:
    if black > white:
        return Player.BLACK
    if white > black:
        return Player.WHITE
    return None


def _move_tokens(text: str) -> list[str]:
    """Whitespace tokens minus delimiters and move numbers, leniently."""
    stripped = notation.strip_delimiters(text.strip())
    return [t for t in stripped.split() if not _NUMBER_RE.match(t)]


def validate_transcript(text: str) -> LegalityReport:
    """Replay a transcript and report how far it stays legal.

    Rule violations are data, not errors: the report carries the kind
    of the first failure and the 1-based ply at which it happened.
    """
    tokens = _move_tokens(text)
    claimed = sum(1 for t in tokens if t != notation.PASS_TEXT)
    pos = board.initial_position()
    legal_plies = 0
    failure: FailureKind | None = None

    for token in tokens:
        if board.is_terminal(pos):
            failure = FailureKind.OVERRUN
            break
        if token == notation.PASS_TEXT:
            if board.legal_mask(pos):
                failure = FailureKind.BAD_TOKEN  # pass with placements available
                break
            pos = board.apply(pos, board.PASS)
            continue
        try:
            sq = notation.parse_square(token)
        except notation.Malformed:
            failure = FailureKind.BAD_TOKEN
            break
        if not board.legal_mask(pos):
            pos = board.apply(pos, board.PASS)  # auto-pass, then consume token
        sq_bit = 1 << sq
        if pos.occupied & sq_bit:
            failure = FailureKind.OCCUPIED_SQUARE
            break
        if not board.flips_for(pos, sq):
            failure = FailureKind.NO_FLANK
            break
        pos = board.apply(pos, sq)
        legal_plies += 1

    return LegalityReport(
        legal_plies=legal_plies,
        claimed_plies=claimed,
        failure=failure,
        failure_ply=legal_plies + 1 if failure else None,
        final_position=pos,
        completion_ratio=min(legal_plies / FULL_GAME_PLIES, 1.0),
        accepted_ratio=(legal_plies / claimed) if claimed else 1.0,
    )


def completion_stats(reports: list[LegalityReport]) -> AggregateReport:
    """Order statistics, histogram and failure taxonomy over reports."""
    if not reports:
        raise EmptyInput("no reports to aggregate")
    ratios = [r.completion_ratio for r in reports]
    histogram = [0] * HISTOGRAM_BINS
    for ratio in ratios:
        histogram[min(int(ratio * HISTOGRAM_BINS), HISTOGRAM_BINS - 1)] += 1
    failure_counts = {"none": 0}
    failure_counts.update({kind.value: 0 for kind in FailureKind})
    for r in reports:
        failure_counts[r.failure.value if r.failure else "none"] += 1
    return AggregateReport(
        n_games=len(reports),
        completion_min=min(ratios),
        completion_max=max(ratios),
        completion_mean=math.fsum(ratios) / len(ratios),
        completion_median=statistics.median(ratios),
        histogram=tuple(histogram),
        failure_counts=failure_counts,
        full_games=sum(1 for r in reports if r.legal_plies >= FULL_GAME_PLIES),
    )


def timeline(moves: list[board.Move]) -> tuple[list[TimelineEntry], float | None]:
    """Disc counts after every placement, plus the winner's trail fraction.

    ``trail_fraction`` is the fraction of plies at which the eventual
    winner holds strictly fewer discs; None when the game ends tied.
    """
    pos = board.initial_position()
    entries: list[TimelineEntry] = []
    for move in moves:
        if move != board.PASS and not board.legal_mask(pos) and not board.is_terminal(pos):
            pos = board.apply(pos, board.PASS)
        pos = board.apply(pos, move)
        if move == board.PASS:
            continue
        black, white = board.score(pos)
        entries.append(
            TimelineEntry(ply=pos.ply, black=black, white=white, leader=_leader(black, white))
        )
    if not entries:
        return entries, None
    winner = _leader(entries[-1].black, entries[-1].white)
    if winner is None:
        return entries, None
    trailing = sum(
        1
        for e in entries
        if (e.black < e.white if winner is Player.BLACK else e.white < e.black)
    )
    return entries, trailing / len(entries)


def random_baseline(n: int, seed: int) -> AggregateReport:
    """Legality statistics of uniform-random square transcripts (length 60)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = random.Random(seed)
    reports = []
    for _ in range(n):
        squares = [rng.choice(PLAYABLE_SQUARES) for _ in range(FULL_GAME_PLIES)]
        text = " ".join(notation.square_name(sq) for sq in squares)
        reports.append(validate_transcript(text))
    return completion_stats(reports)


def write_reports(reports: list[LegalityReport], f) -> None:
    """One JSON report per line."""
    for report in reports:
        f.write(json.dumps(report.to_json()))
        f.write("\n")
