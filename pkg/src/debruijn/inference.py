"""Estimating transition probabilities from observed sequences.

Conditionally on the first word of each observed segment, the likelihood of a
transition table factorises across words into independent Bernoulli strands:
word ``i`` contributes ``(1 - p_i)**n0_i * p_i**n1_i`` where ``n0_i`` and
``n1_i`` count its append-0 and append-1 traversals.  Everything here —
maximum likelihood, Beta conjugate updates, model evidence, Bayes factors and
the random-walk posterior sampler — flows from that factorisation.

Transition windows are counted within contiguous observed segments only;
windows never bridge a gap.  Edges are indexed ``k = 2 * source + letter``
with ``k`` in ``[0, 2**(m+1))``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import betaln, xlogy
from scipy.stats import beta as beta_dist

from .graph import MAX_WORD_LENGTH, TransitionTable, validate_word_length
from .process import stationary_distribution
from .sequences import BinarySequence

SELECTION_TIE_TOL = 1e-9


# ---------------------------------------------------------------------------
# transition counts


@dataclass(frozen=True, eq=False)
class TransitionCounts:
    """Edge traversal counts for words of length ``m``.

    ``n0[i]`` and ``n1[i]`` count how often word ``i`` was followed by the
    letter 0 and 1 respectively.
    """

    m: int
    n0: np.ndarray
    n1: np.ndarray

    def __post_init__(self):
        m = validate_word_length(self.m)
        n0 = np.asarray(self.n0, dtype=np.int64).reshape(-1).copy()
        n1 = np.asarray(self.n1, dtype=np.int64).reshape(-1).copy()
        if n0.shape[0] != (1 << m) or n1.shape[0] != (1 << m):
            raise ValueError(f"counts must have length {1 << m} for m={m}")
        if np.any(n0 < 0) or np.any(n1 < 0):
            raise ValueError("counts must be nonnegative")
        n0.setflags(write=False)
        n1.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n0", n0)
        object.__setattr__(self, "n1", n1)

    @property
    def visits(self) -> np.ndarray:
        """Observed departures per word, ``n0 + n1``."""
        return self.n0 + self.n1

    @property
    def total(self) -> int:
        return int(self.n0.sum() + self.n1.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, TransitionCounts):
            return NotImplemented
        return (
            self.m == other.m
            and np.array_equal(self.n0, other.n0)
            and np.array_equal(self.n1, other.n1)
        )


def _segment_words(segment: np.ndarray, m: int) -> np.ndarray:
    """Word index of every length-``m`` window of a gap-free segment."""
    powers = 1 << np.arange(m - 1, -1, -1)
    windows = np.lib.stride_tricks.sliding_window_view(segment.astype(np.int64), m)
    return windows @ powers


def count_transitions(sequence, m: int, skip: int = 0) -> TransitionCounts:
    """Sliding-window transition counts at word length ``m``.

    Accepts a :class:`BinarySequence` or plain letters.  Segments shorter
    than ``m + skip + 1`` contribute nothing.

    ``skip`` drops the first ``skip`` transitions of every segment.  Its use
    is comparing word lengths on an identical footing: a length-``m`` model
    conditions away each segment's first ``m`` letters and explains the rest,
    so shorter words see more transitions from the same data.  Scoring word
    length ``m`` with ``skip = m_ref - m`` makes every candidate up to
    ``m_ref`` explain exactly the same letters.
    """
    m = validate_word_length(m)
    if skip < 0:
        raise ValueError("skip must be >= 0")
    if not isinstance(sequence, BinarySequence):
        sequence = BinarySequence.from_letters(sequence)
    edge_counts = np.zeros(1 << (m + 1), dtype=np.int64)
    for segment in sequence.segments:
        if segment.shape[0] < m + skip + 1:
            continue
        words = _segment_words(segment, m)
        edges = 2 * words[skip:-1] + segment[m + skip:].astype(np.int64)
        edge_counts += np.bincount(edges, minlength=1 << (m + 1))
    return TransitionCounts(m=m, n0=edge_counts[0::2], n1=edge_counts[1::2])


def batch_transition_counts(
    letters: np.ndarray, m: int, skip: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Per-row transition counts for a matrix of gap-free sequences.

    Returns ``(n0, n1)`` with shape ``(rows, 2**m)`` each.  ``skip`` drops
    the first ``skip`` transitions of every row, as in
    :func:`count_transitions`.
    """
    m = validate_word_length(m)
    if skip < 0:
        raise ValueError("skip must be >= 0")
    letters = np.asarray(letters, dtype=np.int64)
    rows, n = letters.shape
    width = 1 << (m + 1)
    if n < m + skip + 1:
        zeros = np.zeros((rows, 1 << m), dtype=np.int64)
        return zeros, zeros.copy()
    powers = 1 << np.arange(m - 1, -1, -1)
    words = np.lib.stride_tricks.sliding_window_view(letters, m, axis=1) @ powers
    edges = 2 * words[:, skip:-1] + letters[:, m + skip:]
    flat = (np.arange(rows)[:, None] * width + edges).reshape(-1)
    counts = np.bincount(flat, minlength=rows * width).reshape(rows, width)
    return counts[:, 0::2], counts[:, 1::2]


def empirical_word_distribution(sequence, m: int) -> np.ndarray:
    """Observed frequency of each length-``m`` word across the sequence.

    Every complete window inside a segment counts, including each segment's
    last (which starts no transition).  Raises when no segment is long
    enough to hold a window.
    """
    m = validate_word_length(m)
    if not isinstance(sequence, BinarySequence):
        sequence = BinarySequence.from_letters(sequence)
    counts = np.zeros(1 << m, dtype=np.int64)
    for segment in sequence.segments:
        if segment.shape[0] < m:
            continue
        counts += np.bincount(_segment_words(segment, m), minlength=1 << m)
    total = counts.sum()
    if total == 0:
        raise ValueError(f"no window of length {m} fits inside an observed segment")
    return counts / total


# ---------------------------------------------------------------------------
# likelihood and maximum likelihood


def log_likelihood(table: TransitionTable, counts: TransitionCounts) -> float:
    """Log of the transition likelihood given the segment-initial words.

    Returns ``-inf`` when a traversed edge has probability zero.
    """
    if table.m != counts.m:
        raise ValueError(f"table has m={table.m} but counts have m={counts.m}")
    terms = xlogy(counts.n1, table.p) + xlogy(counts.n0, 1.0 - table.p)
    return float(terms.sum())


@dataclass(frozen=True)
class MleResult:
    """Maximum-likelihood estimates with plug-in standard errors.

    Words that were never left have no information about their parameter;
    their entries are NaN and flagged in ``no_data``.
    """

    m: int
    estimate: np.ndarray
    std_error: np.ndarray
    no_data: np.ndarray


def mle(counts: TransitionCounts) -> MleResult:
    """Per-word append-1 frequencies with observed-information errors."""
    visits = counts.visits
    no_data = visits == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        estimate = np.where(no_data, np.nan, counts.n1 / np.maximum(visits, 1))
        variance = estimate * (1.0 - estimate) / np.maximum(visits, 1)
    std_error = np.where(no_data, np.nan, np.sqrt(variance))
    return MleResult(m=counts.m, estimate=estimate, std_error=std_error, no_data=no_data)


# ---------------------------------------------------------------------------
# expected counts and information


def _edge_components(table: TransitionTable, k: int) -> tuple[int, int, float]:
    """Source word, appended letter, and probability of edge index ``k``."""
    if not 0 <= k < (1 << (table.m + 1)):
        raise ValueError(f"edge index {k} out of range for m={table.m}")
    source, letter = k >> 1, k & 1
    prob = float(table.p[source] if letter else 1.0 - table.p[source])
    return source, letter, prob


def expected_transition_count(table: TransitionTable, n: int, k: int) -> float:
    """Expected traversals of edge ``k`` in a stationary length-``n`` sequence.

    Each of the ``n - m`` windows covers the edge's ``m + 1``-letter pattern
    with the same stationary probability, so the expectation is
    ``(n - m) * pi[source] * edge probability``.
    """
    source, _, prob = _edge_components(table, k)
    if n <= table.m:
        return 0.0
    pi = stationary_distribution(table)
    return float((n - table.m) * pi[source] * prob)


def expected_transition_count_indexed(table: TransitionTable, n: int, k: int) -> float:
    """Expected traversals of edge ``k`` summed explicitly over sequences.

    Walks every placement of the edge's pattern and every completion of the
    remaining letters, reading each completed sequence's probability from the
    full distribution.  Exponential in ``n``; cross-check use only.
    """
    _edge_components(table, k)
    m = table.m
    if n <= m:
        return 0.0
    if n > 20:
        raise ValueError("indexed expected count enumerates 2**n sequences; need n <= 20")
    from .distribution import full_distribution

    dist = full_distribution(table, n)
    free = n - m - 1
    total = 0.0
    for i in range(n - m):
        for j in range(1 << free):
            index = ((j >> i) << (m + 1 + i)) + (k << i) + (j % (1 << i))
            total += dist[index]
    return float(total)


def fisher_information(table: TransitionTable, n: int, k: int) -> float:
    """Information that a stationary length-``n`` sequence carries about the
    probability of edge ``k``, holding all other edges fixed.

    Equals the expected traversal count divided by the squared edge
    probability.  Undefined for an edge of probability zero.
    """
    _, _, prob = _edge_components(table, k)
    if prob == 0.0:
        raise ValueError(f"edge {k} has probability zero; its information is undefined")
    return expected_transition_count(table, n, k) / prob**2


def free_parameter_information(table: TransitionTable, n: int, word: int) -> float:
    """Fisher information about the append-1 probability of ``word``.

    Treats the two edges leaving ``word`` as one free parameter ``p`` (the
    complement edge carries ``1 - p``), so both traversal counts contribute.
    """
    if not 0 <= word < table.n_words:
        raise ValueError(f"word index {word} out of range for m={table.m}")
    p = float(table.p[word])
    if p in (0.0, 1.0):
        raise ValueError("free-parameter information diverges at p in {0, 1}")
    if n <= table.m:
        return 0.0
    pi = stationary_distribution(table)
    return float((n - table.m) * pi[word] / (p * (1.0 - p)))


# ---------------------------------------------------------------------------
# conjugate Bayesian updates


@dataclass(frozen=True, eq=False)
class BetaPrior:
    """Independent Beta(alpha, beta) priors, one per word."""

    m: int
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        m = validate_word_length(self.m)
        alpha = np.broadcast_to(np.asarray(self.alpha, dtype=float), (1 << m,)).copy()
        beta = np.broadcast_to(np.asarray(self.beta, dtype=float), (1 << m,)).copy()
        if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(beta))):
            raise ValueError("prior parameters must be finite")
        if np.any(alpha <= 0.0) or np.any(beta <= 0.0):
            raise ValueError("prior parameters must be positive")
        alpha.setflags(write=False)
        beta.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def uniform(cls, m: int) -> "BetaPrior":
        """Beta(1, 1) on every edge parameter."""
        return cls(m=m, alpha=np.ones(1 << m), beta=np.ones(1 << m))

    @classmethod
    def constant(cls, m: int, alpha: float, beta: float) -> "BetaPrior":
        """The same Beta(alpha, beta) on every edge parameter."""
        return cls(m=m, alpha=np.full(1 << m, float(alpha)), beta=np.full(1 << m, float(beta)))


@dataclass(frozen=True, eq=False)
class PosteriorSpec:
    """Per-word Beta posteriors after conjugate updating.

    ``no_data`` flags words whose posterior still equals the prior.
    """

    m: int
    alpha: np.ndarray
    beta: np.ndarray
    no_data: np.ndarray

    def mean(self) -> np.ndarray:
        return self.alpha / (self.alpha + self.beta)

    def mode(self) -> np.ndarray:
        """Posterior modes; NaN where the density has no interior mode."""
        with np.errstate(invalid="ignore", divide="ignore"):
            modes = (self.alpha - 1.0) / (self.alpha + self.beta - 2.0)
        interior = (self.alpha > 1.0) & (self.beta > 1.0)
        return np.where(interior, modes, np.nan)

    def interval(self, level: float = 0.95) -> tuple[np.ndarray, np.ndarray]:
        """Equal-tailed credible interval at the given level."""
        if not 0.0 < level < 1.0:
            raise ValueError("level must lie strictly between 0 and 1")
        tail = 0.5 * (1.0 - level)
        lower = beta_dist.ppf(tail, self.alpha, self.beta)
        upper = beta_dist.ppf(1.0 - tail, self.alpha, self.beta)
        return lower, upper


def posterior(counts: TransitionCounts, prior: BetaPrior) -> PosteriorSpec:
    """Conjugate per-word update: Beta(alpha + n1, beta + n0)."""
    if counts.m != prior.m:
        raise ValueError(f"counts have m={counts.m} but prior has m={prior.m}")
    return PosteriorSpec(
        m=counts.m,
        alpha=prior.alpha + counts.n1,
        beta=prior.beta + counts.n0,
        no_data=counts.visits == 0,
    )


def log_evidence(counts: TransitionCounts, prior: BetaPrior) -> float:
    """Log marginal likelihood of the counts under the Beta prior.

    The per-word Bernoulli strands integrate in closed form to ratios of
    Beta functions; words without data contribute exactly zero.
    """
    if counts.m != prior.m:
        raise ValueError(f"counts have m={counts.m} but prior has m={prior.m}")
    terms = betaln(prior.alpha + counts.n1, prior.beta + counts.n0)
    terms = terms - betaln(prior.alpha, prior.beta)
    return float(terms.sum())


PriorRule = Callable[[int], BetaPrior]


def log_bayes_factor(
    sequence,
    m1: int,
    m2: int,
    prior_rule: PriorRule | None = None,
    conditioning: str = "paired",
) -> float:
    """Log evidence ratio for word length ``m1`` over ``m2`` on one sequence.

    With ``conditioning="paired"`` (default) both models are scored on the
    transitions they can both explain: the shorter word skips the head of
    each segment until it lines up with the longer one.  ``"per-m"`` scores
    each model on all of its own transitions instead; that comparison is
    skewed because the shorter word then explains more of the data.
    """
    rule = BetaPrior.uniform if prior_rule is None else prior_rule
    if conditioning == "paired":
        deepest = max(m1, m2)
        skip1, skip2 = deepest - m1, deepest - m2
    elif conditioning == "per-m":
        skip1 = skip2 = 0
    else:
        raise ValueError(f"unknown conditioning {conditioning!r}")
    first = log_evidence(count_transitions(sequence, m1, skip1), rule(m1))
    second = log_evidence(count_transitions(sequence, m2, skip2), rule(m2))
    return first - second


@dataclass(frozen=True, eq=False)
class EvidenceReport:
    """Evidence comparison across candidate word lengths.

    ``log_evidence`` holds each candidate's evidence on all of its own
    transitions; ``pairwise[i, j]`` is the log Bayes factor of candidate i
    over candidate j under the report's conditioning scheme, and ``wins``
    counts each candidate's strict pairwise wins.  ``supported`` flags
    candidates with at least one observed transition; only those take part
    in the selection.
    """

    candidates: tuple[int, ...]
    log_evidence: np.ndarray
    transition_totals: np.ndarray
    supported: np.ndarray
    conditioning: str
    pairwise: np.ndarray
    wins: np.ndarray
    selected_m: int

    def log_bayes_factors(self) -> np.ndarray:
        """Matrix of pairwise log Bayes factors (NaN off the supported set)."""
        return self.pairwise


def select_word_length(
    sequence,
    m_max: int = MAX_WORD_LENGTH,
    prior_rule: PriorRule | None = None,
    conditioning: str = "paired",
) -> EvidenceReport:
    """Choose a word length by pairwise Bayes factors.

    Candidates run from 1 to ``m_max``.  Under ``conditioning="paired"``
    (default) every pair of candidates is compared on the transitions both
    can explain (the shorter word skips segment heads to line up with the
    longer; see :func:`count_transitions`); a candidate wins a pair when its
    log Bayes factor exceeds ``SELECTION_TIE_TOL``, and the shortest word
    among those with the most wins is selected.  The skips matter: raw
    evidences reward shorter words for explaining more transitions, not for
    fitting better, and that imbalance compounds across segment heads.

    ``conditioning="per-m"`` instead selects the straight evidence argmax,
    each candidate scored on all of its own transitions, near-ties (within
    ``SELECTION_TIE_TOL``) broken toward the shortest word.

    Candidates whose windows never fit inside an observed segment have no
    transitions, hence evidence exactly 1: comparing them would be vacuous,
    so they are excluded (and flagged); selection errors out if no candidate
    has data.
    """
    m_max = validate_word_length(m_max)
    if conditioning not in ("paired", "per-m"):
        raise ValueError(f"unknown conditioning {conditioning!r}")
    rule = BetaPrior.uniform if prior_rule is None else prior_rule
    if not isinstance(sequence, BinarySequence):
        sequence = BinarySequence.from_letters(sequence)

    candidates = tuple(range(1, m_max + 1))
    count = len(candidates)
    evidences = np.empty(count)
    totals = np.empty(count, dtype=np.int64)
    for idx, m in enumerate(candidates):
        counts = count_transitions(sequence, m)
        evidences[idx] = log_evidence(counts, rule(m))
        totals[idx] = counts.total
    supported = totals > 0
    if not np.any(supported):
        raise ValueError("no candidate word length has any observed transitions")

    pairwise = np.full((count, count), np.nan)
    np.fill_diagonal(pairwise, 0.0)
    if conditioning == "per-m":
        idx = np.flatnonzero(supported)
        pairwise[np.ix_(idx, idx)] = evidences[idx, None] - evidences[None, idx]
    else:
        cache: dict[tuple[int, int], float] = {}

        def conditioned(m: int, skip: int) -> float:
            key = (m, skip)
            if key not in cache:
                cache[key] = log_evidence(count_transitions(sequence, m, skip), rule(m))
            return cache[key]

        for i in range(count):
            if not supported[i]:
                continue
            for j in range(i + 1, count):
                if not supported[j]:
                    continue
                deepest = max(candidates[i], candidates[j])
                factor = conditioned(candidates[i], deepest - candidates[i])
                factor -= conditioned(candidates[j], deepest - candidates[j])
                pairwise[i, j] = factor
                pairwise[j, i] = -factor

    with np.errstate(invalid="ignore"):
        wins = np.nansum(pairwise > SELECTION_TIE_TOL, axis=1).astype(np.int64)
    wins[~supported] = -1
    if conditioning == "per-m":
        best = np.max(evidences[supported])
        selected = next(
            m
            for idx, m in enumerate(candidates)
            if supported[idx] and evidences[idx] >= best - SELECTION_TIE_TOL
        )
    else:
        selected = candidates[int(np.argmax(wins == wins.max()))]
    return EvidenceReport(
        candidates=candidates,
        log_evidence=evidences,
        transition_totals=totals,
        supported=supported,
        conditioning=conditioning,
        pairwise=pairwise,
        wins=wins,
        selected_m=selected,
    )


# ---------------------------------------------------------------------------
# random-walk posterior sampling


@dataclass(frozen=True, eq=False)
class MhResult:
    """Posterior samples from the random-walk sampler.

    ``samples[i]`` holds the retained draws for word ``i``'s parameter.
    """

    m: int
    samples: np.ndarray
    acceptance_rate: np.ndarray

    def mean(self) -> np.ndarray:
        return self.samples.mean(axis=1)

    def interval(self, level: float = 0.95) -> tuple[np.ndarray, np.ndarray]:
        """Equal-tailed interval from sample quantiles."""
        if not 0.0 < level < 1.0:
            raise ValueError("level must lie strictly between 0 and 1")
        tail = 0.5 * (1.0 - level)
        lower = np.quantile(self.samples, tail, axis=1)
        upper = np.quantile(self.samples, 1.0 - tail, axis=1)
        return lower, upper


def _reflect_unit(x: np.ndarray) -> np.ndarray:
    """Fold real values into [0, 1] by reflection at both ends."""
    return 1.0 - np.abs(1.0 - np.mod(x, 2.0))


def mh_sample_posterior(
    counts: TransitionCounts,
    prior: BetaPrior,
    iterations: int = 10_000,
    burn_in: int = 1_000,
    proposal_scale: float | np.ndarray | None = None,
    seed: int | None = None,
) -> MhResult:
    """Metropolis random walk targeting the per-word Beta posteriors.

    Each word's parameter runs its own chain: Gaussian proposals, reflected
    into [0, 1], accepted against the Beta(alpha + n1, beta + n0) density.
    Reflection keeps the proposal symmetric, so the plain Metropolis ratio
    applies.  The first ``burn_in`` iterations are discarded.

    ``proposal_scale`` may be a scalar, one value per word, or None; None
    picks 2.4 times each posterior's standard deviation, which keeps the
    acceptance rate near the efficient range whether the target is diffuse
    or sharply peaked.

    The conjugate :func:`posterior` gives the same distribution in closed
    form; the sampler exists as an independent route to the same answer and
    as a template for non-conjugate extensions.
    """
    if counts.m != prior.m:
        raise ValueError(f"counts have m={counts.m} but prior has m={prior.m}")
    if iterations <= burn_in:
        raise ValueError("iterations must exceed burn_in")
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")

    a = prior.alpha + counts.n1
    b = prior.beta + counts.n0
    size = a.shape[0]

    if proposal_scale is None:
        spread = np.sqrt(a * b / ((a + b) ** 2 * (a + b + 1.0)))
        proposal_scale = np.clip(2.4 * spread, 1e-3, 0.5)
    else:
        proposal_scale = np.broadcast_to(np.asarray(proposal_scale, dtype=float), (size,))
        if np.any(proposal_scale <= 0.0):
            raise ValueError("proposal_scale must be positive")

    def log_density(x: np.ndarray) -> np.ndarray:
        return xlogy(a - 1.0, x) + xlogy(b - 1.0, 1.0 - x)

    rng = np.random.default_rng(seed)
    kept = iterations - burn_in
    samples = np.empty((size, kept))
    accepted = np.zeros(size, dtype=np.int64)

    x = a / (a + b)
    current_logp = log_density(x)
    for t in range(iterations):
        proposal = _reflect_unit(x + rng.normal(0.0, proposal_scale, size))
        proposal_logp = log_density(proposal)
        take = np.log(rng.random(size)) < proposal_logp - current_logp
        x = np.where(take, proposal, x)
        current_logp = np.where(take, proposal_logp, current_logp)
        if t >= burn_in:
            samples[:, t - burn_in] = x
            accepted += take
    return MhResult(
        m=counts.m,
        samples=samples,
        acceptance_rate=accepted / kept,
    )
