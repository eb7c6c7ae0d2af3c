"""Naive array-scan Othello engine used only as a test oracle.

Deliberately independent of the bitboard engine: the board is a flat
list of 64 cells and every rule is implemented by walking (row, col)
coordinates square by square.  Slow and obvious on purpose.
"""

from __future__ import annotations

import random

EMPTY, BLACK, WHITE = 0, 1, 2

# (row step, col step) for the 8 compass directions
DIRECTIONS = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]


def initial_board() -> list[int]:
    cells = [EMPTY] * 64
    cells[3 * 8 + 3] = WHITE  # D4
    cells[4 * 8 + 4] = WHITE  # E5
    cells[4 * 8 + 3] = BLACK  # D5
    cells[3 * 8 + 4] = BLACK  # E4
    return cells


def opponent(player: int) -> int:
    return WHITE if player == BLACK else BLACK


def flips(cells: list[int], sq: int, player: int) -> set[int]:
    if cells[sq] != EMPTY:
        raise ValueError("square occupied")
    row, col = divmod(sq, 8)
    opp = opponent(player)
    flipped: set[int] = set()
    for drow, dcol in DIRECTIONS:
        line: list[int] = []
        r, c = row + drow, col + dcol
        while 0 <= r < 8 and 0 <= c < 8 and cells[r * 8 + c] == opp:
            line.append(r * 8 + c)
            r, c = r + drow, c + dcol
        if line and 0 <= r < 8 and 0 <= c < 8 and cells[r * 8 + c] == player:
            flipped.update(line)
    return flipped


def legal_moves(cells: list[int], player: int) -> set[int]:
    return {
        sq for sq in range(64) if cells[sq] == EMPTY and flips(cells, sq, player)
    }


def apply_move(cells: list[int], sq: int, player: int) -> list[int]:
    flipped = flips(cells, sq, player)
    if not flipped:
        raise ValueError("illegal move")
    out = cells[:]
    out[sq] = player
    for f in flipped:
        out[f] = player
    return out


def is_over(cells: list[int]) -> bool:
    return not legal_moves(cells, BLACK) and not legal_moves(cells, WHITE)


def counts(cells: list[int]) -> tuple[int, int]:
    return cells.count(BLACK), cells.count(WHITE)


def replay(moves: list[int]) -> tuple[list[int], int]:
    """Replay square indices with auto-pass; returns (cells, legal plies)."""
    cells = initial_board()
    player = BLACK
    plies = 0
    for sq in moves:
        if not legal_moves(cells, player):
            if is_over(cells):
                raise ValueError(f"move {plies + 1} after game over")
            player = opponent(player)
        cells = apply_move(cells, sq, player)
        player = opponent(player)
        plies += 1
    return cells, plies


def perft(cells: list[int], player: int, depth: int) -> int:
    if depth == 0:
        return 1
    moves = legal_moves(cells, player)
    if not moves:
        if not legal_moves(cells, opponent(player)):
            return 0
        return perft(cells, opponent(player), depth)
    total = 0
    for sq in moves:
        total += perft(apply_move(cells, sq, player), opponent(player), depth - 1)
    return total


def random_playout(rng: random.Random) -> list[tuple[list[int], int]]:
    """Self-play with uniform random moves; returns (cells, to_move) snapshots."""
    cells = initial_board()
    player = BLACK
    snapshots = [(cells[:], player)]
    while not is_over(cells):
        moves = sorted(legal_moves(cells, player))
        if moves:
            cells = apply_move(cells, rng.choice(moves), player)
        player = opponent(player)
        snapshots.append((cells[:], player))
    return snapshots
