"""Othello as text: rules engine, transcripts, corpus, model, metrics."""

from . import board, corpus, evaluation, lm, notation

__all__ = ["board", "corpus", "evaluation", "lm", "notation"]
__version__ = "0.1.0"
