"""Markov chain dynamics on the word graph: stationary law and simulation.

Random draws follow a fixed protocol so that runs are reproducible from a
seed: the generator is NumPy's default PCG64; a stationary or uniform initial
word consumes one uniform variate (inverse CDF over word indices), and every
emitted letter consumes one further uniform, compared against the current
word's append-1 probability.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .graph import TransitionTable, encode_word
from .sequences import BinarySequence

_POWER_TOL = 1e-13
_POWER_MAX_ITER = 1_000_000
_RESIDUAL_TOL = 1e-10


class NonUniqueStationaryError(ValueError):
    """The chain has several closed communicating classes.

    ``recurrent_classes`` lists the word indices of each closed class; a
    caller can still simulate from a fixed initial word.
    """

    def __init__(self, recurrent_classes):
        self.recurrent_classes = tuple(tuple(c) for c in recurrent_classes)
        classes = "; ".join(str(list(c)) for c in self.recurrent_classes)
        super().__init__(
            "stationary distribution is not unique: "
            f"chain has {len(self.recurrent_classes)} closed classes ({classes})"
        )


def _closed_classes(table: TransitionTable) -> list[np.ndarray]:
    """Closed communicating classes of the positive-probability word graph."""
    matrix = table.transition_matrix()
    adjacency = matrix > 0.0
    n_comp, labels = connected_components(adjacency, directed=True, connection="strong")
    closed = []
    for comp in range(n_comp):
        members = np.flatnonzero(labels == comp)
        reachable = adjacency[members].any(axis=0)
        if not np.any(reachable & (labels != comp)):
            closed.append(members)
    return closed


def stationary_distribution(table: TransitionTable) -> np.ndarray:
    """Stationary word distribution ``pi`` with ``pi @ P = pi``.

    Solves the balance equations directly (least squares with a normalisation
    row); falls back to power iteration if the solve degrades.  Raises
    :class:`NonUniqueStationaryError` when more than one closed class exists,
    reporting the classes found.
    """
    closed = _closed_classes(table)
    if len(closed) > 1:
        raise NonUniqueStationaryError(closed)

    matrix = table.transition_matrix()
    size = table.n_words
    system = np.vstack([matrix.T - np.eye(size), np.ones((1, size))])
    rhs = np.zeros(size + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(system, rhs, rcond=None)

    if not _acceptable(pi, matrix):
        pi = _power_iteration(matrix)
        if not _acceptable(pi, matrix):
            raise RuntimeError("stationary distribution failed to converge")

    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def _acceptable(pi: np.ndarray, matrix: np.ndarray) -> bool:
    if not np.all(np.isfinite(pi)) or np.any(pi < -1e-12):
        return False
    return float(np.max(np.abs(pi @ matrix - pi))) <= _RESIDUAL_TOL


def _power_iteration(matrix: np.ndarray) -> np.ndarray:
    pi = np.full(matrix.shape[0], 1.0 / matrix.shape[0])
    for _ in range(_POWER_MAX_ITER):
        nxt = pi @ matrix
        nxt /= nxt.sum()
        if float(np.max(np.abs(nxt - pi))) < _POWER_TOL:
            return nxt
        pi = nxt
    return pi


def stationary_letter_distribution(table: TransitionTable) -> np.ndarray:
    """Marginal probability of the letters (0, 1) under stationarity."""
    pi = stationary_distribution(table)
    p_one = float(pi[1::2].sum())
    return np.array([1.0 - p_one, p_one])


@dataclass(frozen=True)
class SimulationConfig:
    """How to run one simulation.

    ``init`` selects the initial word: ``"stationary"`` draws it from the
    stationary distribution, ``"uniform"`` uniformly at random, and an
    integer index or letter sequence fixes it.  Under a fixed word the first
    ``m`` output letters are the word itself; under a random word the initial
    word stays latent and all ``n`` letters are transition outputs.
    """

    n: int
    seed: int | None = None
    init: str | int | Sequence[int] = "stationary"


def _initial_weights(table: TransitionTable, init) -> np.ndarray | None:
    """Distribution of the latent initial word, or None for a fixed word."""
    if isinstance(init, str):
        if init == "stationary":
            return stationary_distribution(table)
        if init == "uniform":
            return np.full(table.n_words, 1.0 / table.n_words)
        raise ValueError(f"unknown init {init!r}")
    return None


def _fixed_word(table: TransitionTable, init) -> int:
    if isinstance(init, (int, np.integer)):
        word = int(init)
        if not 0 <= word < table.n_words:
            raise ValueError(f"initial word {word} out of range for m={table.m}")
        return word
    word = encode_word(init)
    if len(list(np.asarray(init).reshape(-1))) != table.m:
        raise ValueError(f"initial word must have exactly m={table.m} letters")
    return word


def simulate(
    table: TransitionTable,
    config: SimulationConfig,
    rng: np.random.Generator | None = None,
) -> BinarySequence:
    """Generate one gap-free sequence of ``config.n`` letters."""
    if config.n < 1:
        raise ValueError("sequence length must be >= 1")
    if rng is None:
        rng = np.random.default_rng(config.seed)

    weights = _initial_weights(table, config.init)
    letters = np.empty(config.n, dtype=np.int8)
    if weights is None:
        word = _fixed_word(table, config.init)
        emitted = min(table.m, config.n)
        for k in range(emitted):
            letters[k] = (word >> (table.m - 1 - k)) & 1
        produced = emitted
    else:
        cdf = np.cumsum(weights)
        word = int(np.searchsorted(cdf, rng.random(), side="right"))
        word = min(word, table.n_words - 1)
        produced = 0

    size = table.n_words
    p = table.p
    while produced < config.n:
        letter = 1 if rng.random() < p[word] else 0
        letters[produced] = letter
        word = ((word << 1) | letter) % size
        produced += 1
    return BinarySequence(letters)


def simulate_batch(
    table: TransitionTable,
    n: int,
    replicates: int,
    rng: np.random.Generator,
    init: str | int | Sequence[int] = "stationary",
) -> np.ndarray:
    """Simulate ``replicates`` sequences from one stream, vectorised.

    Returns an int8 array of shape ``(replicates, n)``.  Uniform variates are
    drawn as one ``(replicates, n + 1)`` block; within each row the
    consumption order matches :func:`simulate`.
    """
    if n < 1 or replicates < 1:
        raise ValueError("n and replicates must be >= 1")
    uniforms = rng.random((replicates, n + 1))
    return _drive(table, n, uniforms, init)


def simulate_replicates(
    table: TransitionTable,
    n: int,
    replicates: int,
    seed: int | None,
    init: str | int | Sequence[int] = "stationary",
) -> np.ndarray:
    """Independent replicate sequences with per-replicate derived streams.

    Row ``r`` reproduces ``simulate`` driven by the ``r``-th child of
    ``SeedSequence(seed)``, so any prefix of rows is stable as ``replicates``
    grows.  ``seed`` may also be a ``SeedSequence`` to chain spawning.
    """
    if n < 1 or replicates < 1:
        raise ValueError("n and replicates must be >= 1")
    if isinstance(seed, np.random.SeedSequence):
        root = seed
    else:
        root = np.random.SeedSequence(seed)
    children = root.spawn(replicates)
    uniforms = np.empty((replicates, n + 1))
    for r, child in enumerate(children):
        uniforms[r] = np.random.default_rng(child).random(n + 1)
    return _drive(table, n, uniforms, init)


def _drive(table: TransitionTable, n: int, uniforms: np.ndarray, init) -> np.ndarray:
    """Advance all replicate chains with pre-drawn uniforms.

    Column 0 feeds the initial-word draw when the init is random; a fixed
    word consumes no initial variate, so its letter draws start at column 0
    and any trailing columns go unused.
    """
    replicates = uniforms.shape[0]
    size = table.n_words
    weights = _initial_weights(table, init)
    letters = np.empty((replicates, n), dtype=np.int8)

    if weights is None:
        word = np.full(replicates, _fixed_word(table, init), dtype=np.int64)
        emitted = min(table.m, n)
        for k in range(emitted):
            letters[:, k] = (word >> (table.m - 1 - k)) & 1
        start = emitted
        column = 0
    else:
        cdf = np.cumsum(weights)
        word = np.minimum(
            np.searchsorted(cdf, uniforms[:, 0], side="right"), size - 1
        ).astype(np.int64)
        start = 0
        column = 1

    for t in range(start, n):
        letter = (uniforms[:, column] < table.p[word]).astype(np.int8)
        letters[:, t] = letter
        word = ((word << 1) | letter) % size
        column += 1
    return letters
