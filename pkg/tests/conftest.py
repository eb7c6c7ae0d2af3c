import random

import pytest

from othellolm import board

# Game 1 of the 1977 World Othello Championship (Black wins 40-24),
# 60 placements with no passes.  Used throughout as a known-good game.
CHAMPIONSHIP_1977 = (
    "1. F5 D6 2. C3 D3 3. C4 F4 4. F6 G5 5. E6 F7 "
    "6. C7 C5 7. G3 B5 8. E3 G4 9. B3 C6 10. D7 "
    "E7 11. B6 B4 12. F3 D8 13. A6 E2 14. F1 C8 "
    "15. A5 H3 16. F2 D2 17. C2 B2 18. G6 H5 "
    "19. A1 D1 20. E1 G1 21. H7 A3 22. A2 A4 "
    "23. B1 H6 24. G7 H8 25. E8 F8 26. H4 B7 "
    "27. B8 C1 28. H1 A8 29. A7 G8 30. H2 G2"
)


def sq(name: str) -> int:
    """Square index from a name like "F5" (test-local shorthand)."""
    col = ord(name[0].upper()) - ord("A") + 1
    row = int(name[1])
    return board.square_index(col, row)


def names(squares) -> set[str]:
    return {
        chr(ord("A") + s % 8) + str(s // 8 + 1) for s in squares
    }


@pytest.fixture
def championship_moves() -> list[int]:
    tokens = [t for t in CHAMPIONSHIP_1977.split() if not t.endswith(".")]
    return [sq(t) for t in tokens]


def random_position(rng: random.Random, max_plies: int = 60) -> board.Position:
    """A position reached by random legal self-play from the start."""
    pos = board.initial_position()
    target = rng.randrange(max_plies + 1)
    while pos.ply < target and not board.is_terminal(pos):
        mask = board.legal_mask(pos)
        if not mask:
            pos = board.apply(pos, board.PASS)
            continue
        moves = sorted(board.bits(mask))
        pos = board.apply(pos, rng.choice(moves))
    return pos
