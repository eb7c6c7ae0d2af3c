import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CHAMPIONSHIP_1977, sq
from othellolm import board, corpus, evaluation, notation
from othellolm.board import IllegalMove, Player
from othellolm.evaluation import (
    EmptyInput,
    FailureKind,
    completion_stats,
    random_baseline,
    timeline,
    validate_transcript,
)


def test_championship_game_validates(championship_moves):
    report = validate_transcript(CHAMPIONSHIP_1977)
    assert report.legal_plies == 60
    assert report.claimed_plies == 60
    assert report.failure is None
    assert report.failure_ply is None
    assert report.completion_ratio == 1.0
    assert board.is_terminal(report.final_position)


def test_occupied_square_detected():
    report = validate_transcript("1. F5 F5")
    assert report.legal_plies == 1
    assert report.failure is FailureKind.OCCUPIED_SQUARE
    assert report.failure_ply == 2
    assert report.completion_ratio == pytest.approx(1 / 60)


def test_no_flank_detected():
    report = validate_transcript("1. F5 A1")
    assert report.legal_plies == 1
    assert report.failure is FailureKind.NO_FLANK
    assert report.failure_ply == 2


def test_bad_token_detected():
    report = validate_transcript("F5 D6 Z9 C3")
    assert report.legal_plies == 2
    assert report.failure is FailureKind.BAD_TOKEN
    assert report.failure_ply == 3
    assert report.claimed_plies == 4  # Z9 still claims a placement slot


def test_overrun_detected(championship_moves):
    text = notation.serialize_transcript(championship_moves) + " A1"
    report = validate_transcript(text)
    assert report.legal_plies == 60
    assert report.failure is FailureKind.OVERRUN
    assert report.failure_ply == 61
    assert report.completion_ratio == 1.0


def test_illegal_explicit_pass_is_bad_token():
    report = validate_transcript("F5 --")
    assert report.legal_plies == 1
    assert report.failure is FailureKind.BAD_TOKEN


def test_failure_reapplies_with_same_kind():
    for text, kind in [
        ("1. F5 F5", board.Violation.OCCUPIED_SQUARE),
        ("1. F5 A1", board.Violation.NO_FLANK),
    ]:
        report = validate_transcript(text)
        failing = notation.parse_transcript(text)[report.legal_plies]
        with pytest.raises(IllegalMove) as exc:
            board.apply(report.final_position, failing)
        assert exc.value.kind is kind


def test_empty_transcript():
    report = validate_transcript("")
    assert report.legal_plies == 0
    assert report.claimed_plies == 0
    assert report.failure is None
    assert report.completion_ratio == 0.0
    assert report.accepted_ratio == 1.0


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_synthesized_games_validate_clean(seed):
    rec = corpus.synthesize_games(1, seed=seed)[0]
    text = notation.serialize_transcript(rec.moves)
    report = validate_transcript(text)
    assert report.failure is None
    placements = sum(1 for m in rec.moves if m != board.PASS)
    assert report.legal_plies == placements
    assert board.is_terminal(report.final_position)


def test_auto_pass_only_when_stuck():
    # pass-free serialization of a game that contains passes must still
    # validate: the auto-pass rule reinserts them, and only them
    recs = corpus.synthesize_games(200, seed=17)
    with_pass = [r for r in recs if board.PASS in r.moves]
    assert with_pass, "expected at least one random game with a pass"
    for rec in with_pass[:5]:
        placements = [m for m in rec.moves if m != board.PASS]
        text = notation.serialize_transcript(placements)
        report = validate_transcript(text)
        assert report.failure is None
        assert report.legal_plies == len(placements)


def test_completion_stats_reference_points():
    # synthetic reports at the reference completions, via replay prefixes
    recs = corpus.synthesize_games(2, seed=5)
    prefix43 = [m for m in recs[0].moves if m != board.PASS][:43]
    prefix27 = [m for m in recs[1].moves if m != board.PASS][:27]
    reports = [
        validate_transcript(notation.serialize_transcript(prefix43)),
        validate_transcript(notation.serialize_transcript(prefix27)),
    ]
    agg = completion_stats(reports)
    assert agg.completion_max == pytest.approx(43 / 60, abs=1e-9)
    assert agg.completion_min == pytest.approx(0.45, abs=1e-9)
    assert agg.n_games == 2
    assert sum(agg.failure_counts.values()) == 2


def test_completion_stats_all_legal():
    recs = corpus.synthesize_games(20, seed=3)
    reports = [
        validate_transcript(notation.serialize_transcript(r.moves)) for r in recs
    ]
    agg = completion_stats(reports)
    assert agg.failure_counts["none"] == 20
    assert sum(agg.histogram) == 20
    assert agg.completion_min <= agg.completion_median <= agg.completion_max


def test_completion_stats_empty():
    with pytest.raises(EmptyInput):
        completion_stats([])


def test_completion_stats_permutation_invariant():
    recs = corpus.synthesize_games(10, seed=8)
    reports = [
        validate_transcript(notation.serialize_transcript(r.moves[: k + 5]))
        for k, r in enumerate(recs)
    ]
    agg1 = completion_stats(reports)
    shuffled = reports[::-1]
    agg2 = completion_stats(shuffled)
    assert agg1 == agg2


def test_timeline_first_ply(championship_moves):
    entries, trail = timeline(championship_moves)
    assert entries[0].ply == 1
    assert (entries[0].black, entries[0].white) == (4, 1)
    assert entries[0].leader is Player.BLACK
    assert len(entries) == 60
    assert entries[-1].black + entries[-1].white <= 64
    for e in entries:
        assert e.black + e.white == 4 + e.ply
    assert trail is not None and 0.0 <= trail <= 1.0


def test_timeline_always_leading_winner():
    # Black opens F5 and stays ahead in this short crafted line
    entries, trail = timeline([sq("F5")])
    assert trail == 0.0


def test_timeline_rejects_illegal():
    with pytest.raises(IllegalMove):
        timeline([sq("F5"), sq("F5")])


def test_random_baseline_deterministic():
    a = random_baseline(200, seed=4)
    b = random_baseline(200, seed=4)
    assert a == b


def test_random_baseline_first_token_rate():
    # P(legal first token) = 4/60; check the Monte Carlo rate agrees
    rng = random.Random(0)
    n = 5000
    hits = 0
    for _ in range(n):
        s = rng.choice(evaluation.PLAYABLE_SQUARES)
        hits += s in board.legal_moves(board.initial_position())
    rate = hits / n
    assert rate == pytest.approx(4 / 60, abs=4 * (4 / 60 * 56 / 60 / n) ** 0.5)
    report = random_baseline(2000, seed=11)
    share_zero = report.histogram[0] / report.n_games
    assert share_zero > 0.8  # almost all random transcripts die immediately


def test_report_json_shape():
    report = validate_transcript("1. F5 F5")
    data = report.to_json()
    assert data["failure"] == "occupied_square"
    assert data["final_score"] == [4, 1]
    agg = completion_stats([report])
    data = agg.to_json()
    assert set(data) == {"n_games", "completion", "histogram", "failure_counts", "full_games"}
