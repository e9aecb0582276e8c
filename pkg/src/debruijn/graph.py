"""Words on the binary de Bruijn graph and their transition tables.

A word of length ``m`` is a window of ``m`` consecutive letters from a binary
sequence, encoded as an integer in ``[0, 2**m)`` with the oldest letter in the
most significant bit (so the word ``10`` encodes to 2).  Appending a letter
``b`` shifts the window: word ``i`` moves to ``(2*i + b) mod 2**m``.  Each word
therefore has exactly two outgoing edges, and a process on the graph is fully
described by one append-1 probability per word.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Largest supported word length.  2**m parameters quickly become unestimable
# and dense 2**m x 2**m matrices unaffordable, so long words are rejected
# rather than silently attempted.
MAX_WORD_LENGTH = 10


def validate_word_length(m: int, max_m: int | None = None) -> int:
    """Return ``m`` if it is a usable word length, otherwise raise ValueError."""
    cap = MAX_WORD_LENGTH if max_m is None else max_m
    if not isinstance(m, (int, np.integer)):
        raise ValueError(f"word length must be an integer, got {m!r}")
    m = int(m)
    if m < 1 or m > cap:
        raise ValueError(f"word length must satisfy 1 <= m <= {cap}, got {m}")
    return m


def encode_word(letters: Iterable[int]) -> int:
    """Pack binary letters (oldest first) into a word index."""
    index = 0
    count = 0
    for letter in letters:
        if letter not in (0, 1):
            raise ValueError(f"letters must be 0 or 1, got {letter!r}")
        index = (index << 1) | int(letter)
        count += 1
    validate_word_length(count)
    return index


def decode_word(index: int, m: int) -> np.ndarray:
    """Unpack a word index into its ``m`` letters, oldest first."""
    m = validate_word_length(m)
    index = int(index)
    if not 0 <= index < (1 << m):
        raise ValueError(f"word index {index} out of range for m={m}")
    return np.array([(index >> (m - 1 - k)) & 1 for k in range(m)], dtype=np.int8)


def successors(index: int, m: int) -> tuple[int, int]:
    """Indices of the append-0 and append-1 successors of a word."""
    size = 1 << m
    if not 0 <= index < size:
        raise ValueError(f"word index {index} out of range for m={m}")
    shifted = (index << 1) % size
    return shifted, shifted | 1


@dataclass(frozen=True, eq=False)
class TransitionTable:
    """Append-1 probabilities, one per word of length ``m``.

    ``p[i]`` is the probability that word ``i`` is followed by the letter 1;
    the complementary append-0 edge implicitly carries ``1 - p[i]``.
    """

    m: int
    p: np.ndarray

    def __post_init__(self):
        m = validate_word_length(self.m)
        p = np.asarray(self.p, dtype=float).reshape(-1).copy()
        if p.shape[0] != (1 << m):
            raise ValueError(
                f"expected {1 << m} edge probabilities for m={m}, got {p.shape[0]}"
            )
        if not np.all(np.isfinite(p)) or np.any(p < 0.0) or np.any(p > 1.0):
            raise ValueError("edge probabilities must lie in [0, 1]")
        p.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "p", p)

    @property
    def n_words(self) -> int:
        return 1 << self.m

    def edge_probability(self, source: int, target: int) -> float:
        """Probability of the edge from ``source`` to ``target`` (0.0 if absent)."""
        lo, hi = successors(source, self.m)
        if target == hi:
            return float(self.p[source])
        if target == lo:
            return float(1.0 - self.p[source])
        if not 0 <= target < self.n_words:
            raise ValueError(f"word index {target} out of range for m={self.m}")
        return 0.0

    def transition_matrix(self) -> np.ndarray:
        """Dense row-stochastic matrix over words, rows indexed by source."""
        size = self.n_words
        matrix = np.zeros((size, size))
        idx = np.arange(size)
        lo = (idx << 1) % size
        matrix[idx, lo] = 1.0 - self.p
        matrix[idx, lo | 1] = self.p
        return matrix

    def __eq__(self, other) -> bool:
        if not isinstance(other, TransitionTable):
            return NotImplemented
        return self.m == other.m and np.array_equal(self.p, other.p)


def make_transition_table(m: int, p: Sequence[float] | np.ndarray) -> TransitionTable:
    """Validate and build a :class:`TransitionTable`."""
    return TransitionTable(m=m, p=np.asarray(p, dtype=float))
