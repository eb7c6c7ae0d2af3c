"""Bitboard Othello rules engine.

Squares are numbered 0..63 with A1 = 0, H1 = 7, A8 = 56, H8 = 63:
``index = (row - 1) * 8 + (column - 1)``, row 1 being the top rank.
The starting position puts White on D4/E5 and Black on D5/E4, with
Black to move; Black's four openings are then D3, C4, F5 and E6.

A :class:`Position` is an immutable value, so every operation here is a
pure function that returns a new position.  Passing is an explicit move
(:data:`PASS`); the engine never passes on a caller's behalf.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator

MASK64 = 0xFFFF_FFFF_FFFF_FFFF
FILE_A = 0x0101_0101_0101_0101
FILE_H = 0x8080_8080_8080_8080
NOT_FILE_A = MASK64 ^ FILE_A
NOT_FILE_H = MASK64 ^ FILE_H

# Explicit pass move; legal only when the mover has no placement.
PASS = -1

Move = int  # a square index 0..63, or PASS

MAX_PLY = 60  # the board fills after 60 placements (4 initial discs)


class Player(enum.Enum):
    BLACK = "black"
    WHITE = "white"

    @property
    def opponent(self) -> "Player":
        return Player.WHITE if self is Player.BLACK else Player.BLACK


class Violation(enum.Enum):
    OCCUPIED_SQUARE = "occupied_square"
    NO_FLANK = "no_flank"
    BAD_PASS = "bad_pass"


class IllegalMove(Exception):
    """Raised by :func:`apply` and :func:`flips_for` for rule violations."""

    def __init__(self, kind: Violation, move: Move, message: str | None = None):
        self.kind = kind
        self.move = move
        super().__init__(message or f"{kind.value} (move={move})")


@dataclass(frozen=True)
class Position:
    """Two disjoint occupancy masks plus side to move and placement count."""

    black: int
    white: int
    to_move: Player
    ply: int

    def __post_init__(self) -> None:
        if self.black & self.white:
            raise ValueError("black and white masks overlap")
        if (self.black | self.white) & ~MASK64:
            raise ValueError("occupancy extends past the 8x8 board")
        if not 0 <= self.ply <= MAX_PLY:
            raise ValueError(f"ply {self.ply} out of range 0..{MAX_PLY}")
        if self.black.bit_count() + self.white.bit_count() != 4 + self.ply:
            raise ValueError("disc count does not match ply (corrupt position)")

    def mask(self, player: Player) -> int:
        return self.black if player is Player.BLACK else self.white

    @property
    def occupied(self) -> int:
        return self.black | self.white

    @property
    def empties(self) -> int:
        return ~(self.black | self.white) & MASK64


def square_index(column: int, row: int) -> int:
    """Square index from 1-based column (A=1) and row numbers."""
    if not (1 <= column <= 8 and 1 <= row <= 8):
        raise ValueError(f"column/row out of range: {column},{row}")
    return (row - 1) * 8 + (column - 1)


def square_column(sq: int) -> int:
    return sq % 8 + 1


def square_row(sq: int) -> int:
    return sq // 8 + 1


def bits(mask: int) -> Iterator[int]:
    """Yield set bit indices of a 64-bit mask, lowest first."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# Directional single-step shifts.  East/west and the diagonals mask off
# the wrapping file before shifting; north/south fall off the board edge
# naturally once clipped to 64 bits.


def _east(b: int) -> int:
    return (b & NOT_FILE_H) << 1


def _west(b: int) -> int:
    return (b & NOT_FILE_A) >> 1


def _south(b: int) -> int:
    return (b << 8) & MASK64


def _north(b: int) -> int:
    return b >> 8


def _south_east(b: int) -> int:
    return ((b & NOT_FILE_H) << 9) & MASK64


def _south_west(b: int) -> int:
    return ((b & NOT_FILE_A) << 7) & MASK64


def _north_east(b: int) -> int:
    return (b & NOT_FILE_H) >> 7


def _north_west(b: int) -> int:
    return (b & NOT_FILE_A) >> 9


_SHIFTS = (
    _east,
    _west,
    _south,
    _north,
    _south_east,
    _south_west,
    _north_east,
    _north_west,
)


def initial_position() -> Position:
    white = (1 << square_index(4, 4)) | (1 << square_index(5, 5))  # D4, E5
    black = (1 << square_index(4, 5)) | (1 << square_index(5, 4))  # D5, E4
    return Position(black=black, white=white, to_move=Player.BLACK, ply=0)


def _legal_mask(me: int, opp: int) -> int:
    # Dumb7fill: extend runs of opponent discs away from own discs; a
    # candidate square is the first empty square past such a run.
    empty = ~(me | opp) & MASK64
    legal = 0
    for shift in _SHIFTS:
        run = shift(me) & opp
        run |= shift(run) & opp
        run |= shift(run) & opp
        run |= shift(run) & opp
        run |= shift(run) & opp
        run |= shift(run) & opp
        legal |= shift(run) & empty
    return legal


def legal_mask(pos: Position) -> int:
    """Bitmask of legal placement squares for the side to move."""
    me = pos.mask(pos.to_move)
    opp = pos.mask(pos.to_move.opponent)
    return _legal_mask(me, opp)


def legal_moves(pos: Position) -> set[int]:
    """Legal placement squares for the side to move (empty set = must pass)."""
    return set(bits(legal_mask(pos)))


def _flip_mask(me: int, opp: int, sq_bit: int) -> int:
    flips = 0
    for shift in _SHIFTS:
        run = 0
        cur = shift(sq_bit)
        while cur & opp:
            run |= cur
            cur = shift(cur)
        if cur & me:
            flips |= run
    return flips


def flips_for(pos: Position, sq: int) -> set[int]:
    """Opponent squares flipped by placing on ``sq``; empty set iff illegal."""
    if not 0 <= sq <= 63:
        raise ValueError(f"square index {sq} out of range")
    sq_bit = 1 << sq
    if pos.occupied & sq_bit:
        raise IllegalMove(Violation.OCCUPIED_SQUARE, sq)
    me = pos.mask(pos.to_move)
    opp = pos.mask(pos.to_move.opponent)
    return set(bits(_flip_mask(me, opp, sq_bit)))


def apply(pos: Position, move: Move) -> Position:
    """Apply a placement or an explicit pass, returning the new position."""
    if move == PASS:
        if legal_mask(pos):
            raise IllegalMove(Violation.BAD_PASS, move, "pass with legal placements available")
        return Position(pos.black, pos.white, pos.to_move.opponent, pos.ply)
    if not 0 <= move <= 63:
        raise ValueError(f"square index {move} out of range")
    sq_bit = 1 << move
    if pos.occupied & sq_bit:
        raise IllegalMove(Violation.OCCUPIED_SQUARE, move)
    me = pos.mask(pos.to_move)
    opp = pos.mask(pos.to_move.opponent)
    flips = _flip_mask(me, opp, sq_bit)
    if not flips:
        raise IllegalMove(Violation.NO_FLANK, move)
    me |= sq_bit | flips
    opp &= ~flips
    if pos.to_move is Player.BLACK:
        black, white = me, opp
    else:
        black, white = opp, me
    return Position(black, white, pos.to_move.opponent, pos.ply + 1)


def is_terminal(pos: Position) -> bool:
    """True iff neither side has a legal placement."""
    me = pos.mask(pos.to_move)
    opp = pos.mask(pos.to_move.opponent)
    return not _legal_mask(me, opp) and not _legal_mask(opp, me)


def score(pos: Position) -> tuple[int, int]:
    """(black count, white count)."""
    return pos.black.bit_count(), pos.white.bit_count()


def replay(moves: list[Move], auto_pass: bool = False) -> Position:
    """Fold :func:`apply` over ``moves`` from the initial position.

    With ``auto_pass`` a pass is inserted whenever the mover is stuck,
    which replays archives that omit explicit passes.
    """
    pos = initial_position()
    for move in moves:
        if auto_pass and move != PASS and not legal_mask(pos) and not is_terminal(pos):
            pos = apply(pos, PASS)
        pos = apply(pos, move)
    return pos


def perft(pos: Position, depth: int) -> int:
    """Count legal placement sequences of length ``depth``.

    Forced passes are not counted as plies; a finished game contributes
    no sequences at remaining depth > 0.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if depth == 0:
        return 1
    mask = legal_mask(pos)
    if not mask:
        nxt = apply(pos, PASS)
        if not legal_mask(nxt):
            return 0
        return perft(nxt, depth)
    total = 0
    for sq in bits(mask):
        total += perft(apply(pos, sq), depth - 1)
    return total


def render(pos: Position) -> str:
    """ASCII board, row 1 on top; B = black, W = white."""
    lines = ["  A B C D E F G H"]
    for row in range(1, 9):
        cells = []
        for col in range(1, 9):
            bit = 1 << square_index(col, row)
            if pos.black & bit:
                cells.append("B")
            elif pos.white & bit:
                cells.append("W")
            else:
                cells.append(".")
        lines.append(f"{row} " + " ".join(cells))
    black, white = score(pos)
    lines.append(f"black {black} - white {white}, {pos.to_move.value} to move")
    return "\n".join(lines)
