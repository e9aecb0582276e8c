"""Exact distribution of finite observation windows.

The probability of observing letters ``x_1..x_n`` from a stationary chain is
obtained by summing over the latent word that precedes the window: start from
the stationary law over words, then push it through one edge per letter.
Every sum is finite, so the forward pass below is exact up to rounding.

``sequence_probability_indexed`` evaluates the same quantity through an
explicit sum over starting words with bit-arithmetic index bookkeeping.  It
exists as a structurally different second route for cross-checks rather than
for speed.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .graph import TransitionTable, encode_word
from .process import stationary_distribution
from .sequences import GAP, BinarySequence

PREDICTION_MODES = ("conditional", "marginal")


def _as_letters(x) -> np.ndarray:
    if isinstance(x, BinarySequence):
        if x.has_gaps:
            raise ValueError("joint probabilities require a gap-free sequence")
        return x.values.astype(np.int64)
    letters = np.asarray(list(x) if not isinstance(x, np.ndarray) else x)
    letters = letters.astype(np.int64).reshape(-1)
    if letters.size and not np.isin(letters, (0, 1)).all():
        raise ValueError("letters must be 0 or 1")
    return letters


def _forward(table: TransitionTable, letters: np.ndarray) -> np.ndarray:
    """Push the stationary word law through one edge per letter."""
    state = stationary_distribution(table)
    half = table.n_words >> 1
    for b in letters:
        weight = table.p if b else 1.0 - table.p
        merged = state[:half] * weight[:half] + state[half:] * weight[half:]
        nxt = np.zeros_like(state)
        nxt[int(b) :: 2] = merged
        state = nxt
    return state


def sequence_probability(table: TransitionTable, letters) -> float:
    """Probability that a stationary chain emits exactly these letters."""
    arr = _as_letters(letters)
    if arr.size == 0:
        return 1.0
    return float(_forward(table, arr).sum())


def log_sequence_probability(table: TransitionTable, letters) -> float:
    """Natural log of :func:`sequence_probability`, rescaled stepwise.

    Stays finite-precision for windows far longer than direct products
    allow; returns ``-inf`` for impossible sequences.
    """
    arr = _as_letters(letters)
    if arr.size == 0:
        return 0.0
    state = stationary_distribution(table)
    half = table.n_words >> 1
    log_total = 0.0
    for b in arr:
        weight = table.p if b else 1.0 - table.p
        merged = state[:half] * weight[:half] + state[half:] * weight[half:]
        nxt = np.zeros_like(state)
        nxt[int(b) :: 2] = merged
        mass = nxt.sum()
        if mass <= 0.0:
            return float("-inf")
        log_total += float(np.log(mass))
        state = nxt / mass
    return log_total


def sequence_probability_indexed(table: TransitionTable, n: int, index: int) -> float:
    """Probability of the length-``n`` sequence encoded as integer ``index``.

    The sequence's letters are the bits of ``index``, oldest letter in the
    most significant position.  Works directly on indices: the first ``m``
    steps blend the latent starting word with incoming letters, after which
    source and target words are plain sliding windows of ``index``.
    """
    m = table.m
    if n < m:
        raise ValueError(f"indexed form needs n >= m (n={n}, m={m})")
    if not 0 <= index < (1 << n):
        raise ValueError(f"sequence index {index} out of range for n={n}")
    pi = stationary_distribution(table)
    size = 1 << m
    total = 0.0
    for j in range(size):
        prob = float(pi[j])
        for k in range(m):
            source = ((j % (1 << (m - k))) << k) + ((index >> (n - k)) % size)
            target = ((j % (1 << (m - k - 1))) << (k + 1)) + (
                (index >> (n - k - 1)) % size
            )
            prob *= table.edge_probability(source, target)
            if prob == 0.0:
                break
        else:
            for s in range(m, n):
                source = (index >> (n - s)) % size
                target = (index >> (n - s - 1)) % size
                prob *= table.edge_probability(source, target)
                if prob == 0.0:
                    break
        total += prob
    return total


def full_distribution(table: TransitionTable, n: int) -> np.ndarray:
    """Probabilities of all ``2**n`` sequences, indexed like the indexed form.

    One shared forward pass over a growing (sequence, word) array; exact,
    but memory grows as ``2**n``, so keep ``n`` modest.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > 24:
        raise ValueError("full distribution over 2**n sequences needs n <= 24")
    size = table.n_words
    half = size >> 1
    state = stationary_distribution(table)[np.newaxis, :]  # (sequences, words)
    for _ in range(n):
        rows = state.shape[0]
        nxt = np.zeros((2 * rows, size))
        for b in (0, 1):
            weight = table.p if b else 1.0 - table.p
            merged = state[:, :half] * weight[:half] + state[:, half:] * weight[half:]
            nxt[b::2, int(b)::2] = merged
        state = nxt
    return state.sum(axis=1)


def empirical_letter_distribution(history: BinarySequence) -> np.ndarray:
    """Relative frequency of the letters (0, 1) among observed slots."""
    observed = history.observed
    p_one = float(np.mean(observed == 1))
    return np.array([1.0 - p_one, p_one])


def predict_next(
    table: TransitionTable,
    history,
    mode: str = "conditional",
    letter_dist: Sequence[float] | np.ndarray | None = None,
) -> float:
    """Probability that the next letter is 1 given the history.

    ``"conditional"`` conditions on the last ``m`` time slots, which must all
    be observed.  ``"marginal"`` fills every unobserved slot among the
    last ``m`` (gaps, or slots before the history starts) by averaging over a
    letter distribution — by default the empirical frequency of the observed
    letters — and conditions on the rest.  With a fully observed tail the two
    modes agree.
    """
    if mode not in PREDICTION_MODES:
        raise ValueError(f"mode must be one of {PREDICTION_MODES}, got {mode!r}")
    if not isinstance(history, BinarySequence):
        history = BinarySequence.from_letters(history)

    m = table.m
    tail = np.full(m, GAP, dtype=np.int64)
    take = min(m, len(history))
    if take:
        tail[m - take :] = history.values[len(history) - take :]
    missing = np.flatnonzero(tail == GAP)

    if mode == "conditional":
        if len(history) < m:
            raise ValueError(f"conditional prediction needs at least m={m} time slots")
        if missing.size:
            raise ValueError(
                "conditional prediction requires the last "
                f"{m} slots to be observed; missing at offsets {missing.tolist()}"
            )
        return float(table.p[encode_word(tail)])

    if letter_dist is None:
        dist = empirical_letter_distribution(history)
    else:
        dist = np.asarray(letter_dist, dtype=float).reshape(-1)
        if dist.shape[0] != 2 or np.any(dist < 0) or not np.isclose(dist.sum(), 1.0):
            raise ValueError("letter_dist must be two nonnegative weights summing to 1")

    total = 0.0
    for fill in range(1 << missing.size):
        word_letters = tail.copy()
        weight = 1.0
        for pos, slot in enumerate(missing):
            bit = (fill >> pos) & 1
            word_letters[slot] = bit
            weight *= float(dist[bit])
        total += weight * float(table.p[encode_word(word_letters)])
    return total
