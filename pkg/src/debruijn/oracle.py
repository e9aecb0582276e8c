"""Slow, independent reference computations.

Everything in this module recomputes a quantity the main modules obtain in
closed or recursive form, using a structurally different method: explicit
enumeration over sequences, eigendecomposition, numerical quadrature, or
plain Monte Carlo.  These routes are deliberately kept free of the forward
pass and the conjugate algebra they are meant to check.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import betaln, logsumexp

from .graph import TransitionTable
from .inference import BetaPrior, TransitionCounts
from .process import simulate_batch


class BudgetExceededError(RuntimeError):
    """An enumeration or quadrature request is too large to run exactly."""


@dataclass(frozen=True)
class EnumerationBudget:
    """Size limits for exhaustive enumeration."""

    max_n: int = 12
    max_m: int = 4

    def check(self, n: int, m: int) -> None:
        if n > self.max_n or m > self.max_m:
            raise BudgetExceededError(
                f"enumeration budget exceeded: n={n}, m={m} "
                f"(limits n <= {self.max_n}, m <= {self.max_m})"
            )


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    std_error: float
    replicates: int


def eigen_stationary_distribution(table: TransitionTable) -> np.ndarray:
    """Stationary law via the left eigenvector with eigenvalue one."""
    matrix = table.transition_matrix()
    eigenvalues, eigenvectors = np.linalg.eig(matrix.T)
    lead = int(np.argmin(np.abs(eigenvalues - 1.0)))
    pi = np.real(eigenvectors[:, lead])
    pi = np.abs(pi)
    return pi / pi.sum()


def brute_force_distribution(
    table: TransitionTable, n: int, budget: EnumerationBudget | None = None
) -> np.ndarray:
    """Probability of every length-``n`` sequence by raw enumeration.

    Loops over all ``2**n`` sequences and all ``2**m`` latent starting
    words, multiplying edge probabilities one letter at a time.  Sequence
    ``index`` has its oldest letter in the most significant bit.
    """
    (budget or EnumerationBudget()).check(n, table.m)
    pi = eigen_stationary_distribution(table)
    size = table.n_words
    p = [float(v) for v in table.p]
    start_probs = [float(v) for v in pi]
    out = np.empty(1 << n)
    per_start = np.empty(size)
    for index in range(1 << n):
        letters = [(index >> (n - 1 - t)) & 1 for t in range(n)]
        for j in range(size):
            prob = start_probs[j]
            word = j
            for b in letters:
                prob *= p[word] if b else 1.0 - p[word]
                word = ((word << 1) | b) % size
            per_start[j] = prob
        out[index] = np.sum(per_start)
    return out


def brute_force_expected_count(
    table: TransitionTable, n: int, k: int, budget: EnumerationBudget | None = None
) -> float:
    """Expected traversals of edge ``k``: enumerate, scan, and weight.

    Counts literal occurrences of the edge's ``m + 1``-letter pattern in
    every sequence and weights them by the enumerated probabilities.
    """
    m = table.m
    if not 0 <= k < (1 << (m + 1)):
        raise ValueError(f"edge index {k} out of range for m={m}")
    if n <= m:
        return 0.0
    probs = brute_force_distribution(table, n, budget)
    width = m + 1
    mask = (1 << width) - 1
    total = 0.0
    for index in range(1 << n):
        count = 0
        for t in range(n - m):
            if (index >> (n - width - t)) & mask == k:
                count += 1
        if count:
            total += count * probs[index]
    return float(total)


def grid_evidence(
    counts: TransitionCounts, prior: BetaPrior, grid_points: int = 400
) -> float:
    """Log marginal likelihood by per-word Gauss-Legendre quadrature.

    Integrates each word's Bernoulli strand against its Beta prior
    numerically instead of via the Beta-function identity.  Restricted to
    m <= 2 and at least 200 nodes, where the quadrature is effectively exact.
    """
    if counts.m != prior.m:
        raise ValueError(f"counts have m={counts.m} but prior has m={prior.m}")
    if counts.m > 2:
        raise BudgetExceededError("grid evidence is restricted to m <= 2")
    if grid_points < 200:
        raise BudgetExceededError("grid evidence needs at least 200 nodes")
    nodes, weights = np.polynomial.legendre.leggauss(grid_points)
    x = 0.5 * (nodes + 1.0)
    log_w = np.log(0.5 * weights)
    total = 0.0
    for i in range(counts.n0.shape[0]):
        a = prior.alpha[i] + counts.n1[i]
        b = prior.beta[i] + counts.n0[i]
        log_f = (a - 1.0) * np.log(x) + (b - 1.0) * np.log1p(-x)
        log_f -= betaln(prior.alpha[i], prior.beta[i])
        total += float(logsumexp(log_f + log_w))
    return total


def _pattern_counts(letters: np.ndarray, pattern: list[int]) -> np.ndarray:
    """Occurrences of a literal letter pattern in each row of a matrix."""
    rows, n = letters.shape
    width = len(pattern)
    if n < width:
        return np.zeros(rows, dtype=np.int64)
    span = n - width + 1
    matches = np.ones((rows, span), dtype=bool)
    for offset, bit in enumerate(pattern):
        matches &= letters[:, offset : offset + span] == bit
    return matches.sum(axis=1)


def _edge_pattern(m: int, k: int) -> list[int]:
    width = m + 1
    return [(k >> (width - 1 - t)) & 1 for t in range(width)]


def monte_carlo_fisher(
    table: TransitionTable,
    n: int,
    k: int,
    replicates: int = 100_000,
    seed: int | None = None,
) -> MonteCarloEstimate:
    """Simulation estimate of the edge-probability information.

    Averages (traversals of edge k) / p_k**2 over simulated stationary
    sequences; the average converges to the closed-form information.  Edge
    traversals are counted by literal pattern scanning, not by the counting
    code under test.
    """
    if replicates < 10_000:
        raise ValueError("need at least 10_000 replicates for a stable estimate")
    m = table.m
    if not 0 <= k < (1 << (m + 1)):
        raise ValueError(f"edge index {k} out of range for m={m}")
    source, letter = k >> 1, k & 1
    prob = float(table.p[source] if letter else 1.0 - table.p[source])
    if prob == 0.0:
        raise ValueError(f"edge {k} has probability zero; its information is undefined")
    rng = np.random.default_rng(seed)
    letters = simulate_batch(table, n, replicates, rng)
    values = _pattern_counts(letters, _edge_pattern(m, k)) / prob**2
    return MonteCarloEstimate(
        value=float(values.mean()),
        std_error=float(values.std(ddof=1) / np.sqrt(replicates)),
        replicates=replicates,
    )


def monte_carlo_score_variance(
    table: TransitionTable,
    n: int,
    word: int,
    replicates: int = 100_000,
    seed: int | None = None,
) -> MonteCarloEstimate:
    """Simulation estimate of the variance of a word's score.

    The score of the free parameter p_word under the segment-conditional
    likelihood is n1/p - n0/(1 - p); its variance equals the free-parameter
    information, giving a second simulation route to Fisher information.
    The standard error uses the fourth-moment variance of a sample variance.
    """
    if replicates < 10_000:
        raise ValueError("need at least 10_000 replicates for a stable estimate")
    if not 0 <= word < table.n_words:
        raise ValueError(f"word index {word} out of range for m={table.m}")
    p = float(table.p[word])
    if p in (0.0, 1.0):
        raise ValueError("score variance diverges at p in {0, 1}")
    rng = np.random.default_rng(seed)
    letters = simulate_batch(table, n, replicates, rng)
    ones = _pattern_counts(letters, _edge_pattern(table.m, 2 * word + 1))
    zeros = _pattern_counts(letters, _edge_pattern(table.m, 2 * word))
    score = ones / p - zeros / (1.0 - p)
    variance = float(score.var(ddof=1))
    centered = score - score.mean()
    fourth = float(np.mean(centered**4))
    var_of_var = (fourth - variance**2 * (replicates - 3) / (replicates - 1)) / replicates
    return MonteCarloEstimate(
        value=variance,
        std_error=float(np.sqrt(max(var_of_var, 0.0))),
        replicates=replicates,
    )
