"""Transcript and archive text formats.

Two transcript forms are supported: the numbered archive/display form
("1. F5 D6 2. C3 D3 ...") and the compact corpus form ("F5 D6 C3 D3 ...").
A pass serializes as ``--``.  Training-corpus lines wrap a compact
transcript in the start/end delimiter strings.

Archive files are UTF-8 text: per game, optional ``[Key "Value"]``
header lines followed by move text, games separated by blank lines.
"""

from __future__ import annotations

import enum
import io
import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO

from . import board
from .board import PASS, Move

log = logging.getLogger(__name__)

BOS_TEXT = "<|startoftext|>"
EOS_TEXT = "<|endoftext|>"
PASS_TEXT = "--"

# A pass-free 60-move compact line with delimiters is 207 characters;
# we enforce this bound rather than the historical 188-character budget,
# which is kept for reference only.
CORPUS_LINE_MAX = 208
CORPUS_LINE_REFERENCE_LIMIT = 188

_SQUARE_RE = re.compile(r"^[A-Ha-h][1-8]$")
_NUMBER_RE = re.compile(r"^(\d+)\.$")
_HEADER_RE = re.compile(r'^\[(\w+)\s+"([^"]*)"\]\s*$')
_RESULT_RE = re.compile(r"^(\d+)\s*-\s*(\d+)$")

RECOGNIZED_HEADERS = ("Event", "Black", "White", "Date", "Result")


class Malformed(ValueError):
    """Unparseable square, transcript, or archive entry."""


class TranscriptForm(enum.Enum):
    NUMBERED = "numbered"
    COMPACT = "compact"


def parse_square(text: str) -> int:
    """Case-insensitive square name ("F5" or "f5") to index 0..63."""
    if not _SQUARE_RE.match(text):
        raise Malformed(f"bad square name: {text!r}")
    col = ord(text[0].upper()) - ord("A") + 1
    row = int(text[1])
    return board.square_index(col, row)


def square_name(sq: int) -> str:
    """Canonical uppercase name of a square index."""
    if not 0 <= sq <= 63:
        raise ValueError(f"square index {sq} out of range")
    return chr(ord("A") + board.square_column(sq) - 1) + str(board.square_row(sq))


def move_token(move: Move) -> str:
    return PASS_TEXT if move == PASS else square_name(move)


def wrap_delimiters(text: str) -> str:
    return BOS_TEXT + text + EOS_TEXT


def strip_delimiters(text: str) -> str:
    if text.startswith(BOS_TEXT):
        text = text[len(BOS_TEXT):]
    if text.endswith(EOS_TEXT):
        text = text[: -len(EOS_TEXT)]
    return text


def parse_transcript(text: str) -> list[Move]:
    """Parse either transcript form into a move list, passes included.

    Move numbers, when present, must run 1, 2, 3, ... and sit between
    move pairs; delimiters are stripped if present.
    """
    tokens = strip_delimiters(text.strip()).split()
    moves: list[Move] = []
    expected = 1
    for tok in tokens:
        num = _NUMBER_RE.match(tok)
        if num:
            if int(num.group(1)) != expected or len(moves) != 2 * (expected - 1):
                raise Malformed(f"move number {tok!r} out of sequence")
            expected += 1
        elif tok == PASS_TEXT:
            moves.append(PASS)
        else:
            try:
                moves.append(parse_square(tok))
            except Malformed:
                raise Malformed(f"bad move token: {tok!r}") from None
    return moves


def serialize_transcript(moves: list[Move], form: TranscriptForm = TranscriptForm.COMPACT) -> str:
    if form is TranscriptForm.COMPACT:
        return " ".join(move_token(m) for m in moves)
    chunks = []
    for i in range(0, len(moves), 2):
        pair = " ".join(move_token(m) for m in moves[i : i + 2])
        chunks.append(f"{i // 2 + 1}. {pair}")
    return " ".join(chunks)


@dataclass
class GameRecord:
    """Header metadata plus an ordered move list (passes explicit)."""

    headers: list[tuple[str, str]] = field(default_factory=list)
    moves: list[Move] = field(default_factory=list)

    @property
    def result(self) -> tuple[int, int] | None:
        """(black, white) disc counts parsed from the Result header."""
        for key, value in self.headers:
            if key == "Result":
                m = _RESULT_RE.match(value)
                if not m:
                    raise Malformed(f"bad Result header: {value!r}")
                return int(m.group(1)), int(m.group(2))
        return None

    def header(self, key: str) -> str | None:
        for k, v in self.headers:
            if k == key:
                return v
        return None


def validate_record(rec: GameRecord) -> board.Position:
    """Replay a record (auto-passing) and check its Result header.

    Returns the final position; raises IllegalMove or Malformed.
    """
    pos = board.replay(rec.moves, auto_pass=True)
    result = rec.result
    if result is not None and result != board.score(pos):
        raise Malformed(f"Result header {result} != replay score {board.score(pos)}")
    return pos


def serialize_record(rec: GameRecord) -> str:
    lines = [f'[{key} "{value}"]' for key, value in rec.headers]
    lines.append(serialize_transcript(rec.moves, TranscriptForm.NUMBERED))
    return "\n".join(lines)


def write_archive(records: Iterable[GameRecord], f: TextIO) -> None:
    for i, rec in enumerate(records):
        if i:
            f.write("\n")
        f.write(serialize_record(rec))
        f.write("\n")


def serialize_archive(records: Iterable[GameRecord]) -> str:
    buf = io.StringIO()
    write_archive(records, buf)
    return buf.getvalue()


def parse_archive(stream: Iterable[str], strict: bool = False) -> Iterator[GameRecord]:
    """Yield records from archive text, one blank-line-separated game at a time.

    Malformed games are logged with their line numbers and skipped;
    with ``strict`` the first malformed game raises instead.
    """
    headers: list[tuple[str, str]] = []
    move_text: list[str] = []
    start_line = 1

    def flush(end_line: int) -> Iterator[GameRecord]:
        nonlocal headers, move_text
        if not headers and not move_text:
            return
        try:
            moves = parse_transcript(" ".join(move_text))
            yield GameRecord(headers=headers, moves=moves)
        except Malformed as exc:
            if strict:
                raise Malformed(f"game at lines {start_line}-{end_line}: {exc}") from None
            log.warning("skipping malformed game at lines %d-%d: %s", start_line, end_line, exc)
        finally:
            headers, move_text = [], []

    line_no = 0
    for line_no, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            yield from flush(line_no - 1)
            start_line = line_no + 1
            continue
        header = _HEADER_RE.match(line)
        if header:
            headers.append((header.group(1), header.group(2)))
        else:
            move_text.append(line)
    yield from flush(line_no)


def read_archive(path, strict: bool = False) -> list[GameRecord]:
    with open(path, encoding="utf-8") as f:
        return list(parse_archive(f, strict=strict))
