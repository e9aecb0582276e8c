"""Correlated binary sequences via de Bruijn graph Markov chains.

Model a binary sequence as a Markov chain on its length-m suffix words:
words live on the binary de Bruijn graph, each with one free append-1
probability.  The package covers simulation, exact window distributions,
likelihood and conjugate Bayesian inference, evidence-based choice of the
word length, and slow independent oracles for verifying all of it.
"""
from .graph import (
    MAX_WORD_LENGTH,
    TransitionTable,
    decode_word,
    encode_word,
    make_transition_table,
    successors,
)
from .sequences import GAP, BinarySequence
from .process import (
    NonUniqueStationaryError,
    SimulationConfig,
    simulate,
    simulate_batch,
    simulate_replicates,
    stationary_distribution,
    stationary_letter_distribution,
)
from .distribution import (
    empirical_letter_distribution,
    full_distribution,
    log_sequence_probability,
    predict_next,
    sequence_probability,
    sequence_probability_indexed,
)
from .inference import (
    BetaPrior,
    EvidenceReport,
    MhResult,
    MleResult,
    PosteriorSpec,
    TransitionCounts,
    batch_transition_counts,
    count_transitions,
    empirical_word_distribution,
    expected_transition_count,
    expected_transition_count_indexed,
    fisher_information,
    free_parameter_information,
    log_bayes_factor,
    log_evidence,
    log_likelihood,
    mh_sample_posterior,
    mle,
    posterior,
    select_word_length,
)
from .seqio import (
    DataError,
    boat_race_path,
    load_boat_race,
    load_labeled_series,
    load_sequence,
    parse_sequence_text,
    save_sequence,
    sequence_to_text,
)

__version__ = "0.1.0"

__all__ = [
    "MAX_WORD_LENGTH",
    "GAP",
    "TransitionTable",
    "BinarySequence",
    "BetaPrior",
    "DataError",
    "EvidenceReport",
    "MhResult",
    "MleResult",
    "NonUniqueStationaryError",
    "PosteriorSpec",
    "SimulationConfig",
    "TransitionCounts",
    "batch_transition_counts",
    "boat_race_path",
    "count_transitions",
    "decode_word",
    "empirical_letter_distribution",
    "empirical_word_distribution",
    "encode_word",
    "expected_transition_count",
    "expected_transition_count_indexed",
    "fisher_information",
    "free_parameter_information",
    "full_distribution",
    "log_bayes_factor",
    "log_evidence",
    "log_likelihood",
    "load_boat_race",
    "load_labeled_series",
    "load_sequence",
    "log_sequence_probability",
    "make_transition_table",
    "mh_sample_posterior",
    "mle",
    "parse_sequence_text",
    "posterior",
    "predict_next",
    "save_sequence",
    "select_word_length",
    "sequence_to_text",
    "sequence_probability",
    "sequence_probability_indexed",
    "simulate",
    "simulate_batch",
    "simulate_replicates",
    "stationary_distribution",
    "stationary_letter_distribution",
    "successors",
    "__version__",
]
