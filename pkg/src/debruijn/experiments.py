"""Reproducible studies built on the library.

Each study simulates or loads data, runs the estimation machinery, and
writes three kinds of artifact into an output directory: a JSON run report,
CSV tables, and rendered figures.  Every reported number is computed from
library calls at run time.

Studies
-------
``teinf-left`` / ``teinf-right``
    Fit one simulated length-200 sequence (alternating m=2 table, clustered
    m=3 table) with the random-walk sampler; report per-word estimates and
    95% intervals.
``teinf2``
    Interval width against sequence length for the alternating table, 100
    replicates per length, conjugate posteriors.
``hist2i``
    Word-length selection histograms over 1000 simulated sequences from
    each example table.
``boatrace``
    The bundled Oxford–Cambridge series: word-length selection, posterior
    tables at m=2 and m=3, next-result predictions, and prior sensitivity.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import plots, report
from .graph import TransitionTable, make_transition_table
from .distribution import empirical_letter_distribution, predict_next
from .inference import (
    BetaPrior,
    TransitionCounts,
    batch_transition_counts,
    count_transitions,
    empirical_word_distribution,
    mh_sample_posterior,
    mle,
    posterior,
    select_word_length,
)
from .process import SimulationConfig, simulate, simulate_replicates
from .seqio import load_boat_race
from .sequences import BinarySequence

# The two running examples: an alternating process whose letters tend to
# flip (m=2) and a clustered process with long same-letter blocks broken by
# near-fair stretches (m=3).
ALTERNATING_EXAMPLE = make_transition_table(2, (0.9, 0.25, 0.75, 0.1))
CLUSTERED_EXAMPLE = make_transition_table(3, (0.1, 0.7, 0.5, 0.8, 0.2, 0.5, 0.3, 0.9))

EXAMPLE_LENGTH = 200
DEFAULT_SEEDS = {
    "teinf-left": 23,
    "teinf-right": 40,
    "teinf2": 101,
    "hist2i": 77,
    "boatrace": None,
}


def _word_labels(m: int) -> list[str]:
    return [format(w, f"0{m}b") for w in range(1 << m)]


def _thread_map(fn, items, threads: int | None):
    if threads is None:
        threads = min(8, os.cpu_count() or 1)
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _fit_one_sequence(table: TransitionTable, seed: int, iterations: int, burn_in: int):
    """Simulate once from ``table`` and fit its parameters by MH."""
    config = SimulationConfig(n=EXAMPLE_LENGTH, seed=seed)
    letters = simulate(table, config)
    counts = count_transitions(letters, table.m)
    prior = BetaPrior.uniform(table.m)
    chain = mh_sample_posterior(
        counts, prior, iterations=iterations, burn_in=burn_in, seed=seed
    )
    estimate = chain.mean()
    lower, upper = chain.interval(0.95)
    exact = posterior(counts, prior)
    return {
        "m": table.m,
        "n": EXAMPLE_LENGTH,
        "words": _word_labels(table.m),
        "true_p": table.p,
        "transition_counts": {"n0": counts.n0, "n1": counts.n1},
        "estimate": estimate,
        "lower": lower,
        "upper": upper,
        "acceptance_rate": chain.acceptance_rate,
        "conjugate_mean": exact.mean(),
        "mean_abs_error": float(np.mean(np.abs(estimate - table.p))),
        "true_inside_interval": (table.p >= lower) & (table.p <= upper),
        "mcmc": {"iterations": iterations, "burn_in": burn_in},
    }


def _write_fit_artifacts(results: dict, out_dir: Path, stem: str) -> list[Path]:
    rows = [
        (word, truth, est, lo, hi)
        for word, truth, est, lo, hi in zip(
            results["words"],
            results["true_p"],
            results["estimate"],
            results["lower"],
            results["upper"],
        )
    ]
    paths = [
        report.write_csv(
            out_dir / f"{stem}.csv",
            ["word", "true_p", "estimate", "lower_95", "upper_95"],
            rows,
        ),
        plots.estimate_errorbars(
            results["words"],
            results["true_p"],
            results["estimate"],
            results["lower"],
            results["upper"],
            out_dir / f"{stem}.png",
            title=f"m={results['m']} fit, n={results['n']}",
        ),
    ]
    return paths


def run_teinf_left(out_dir, seed=None, iterations=110_000, burn_in=10_000, **_):
    seed = DEFAULT_SEEDS["teinf-left"] if seed is None else seed
    results = _fit_one_sequence(ALTERNATING_EXAMPLE, seed, iterations, burn_in)
    return results, _write_fit_artifacts(results, Path(out_dir), "teinf_left"), seed


def run_teinf_right(out_dir, seed=None, iterations=110_000, burn_in=10_000, **_):
    seed = DEFAULT_SEEDS["teinf-right"] if seed is None else seed
    results = _fit_one_sequence(CLUSTERED_EXAMPLE, seed, iterations, burn_in)
    return results, _write_fit_artifacts(results, Path(out_dir), "teinf_right"), seed


def run_teinf2(
    out_dir,
    seed=None,
    replicates=100,
    lengths=(50, 100, 200, 500),
    threads=None,
    **_,
):
    """Average estimates and interval widths as the sequence grows."""
    seed = DEFAULT_SEEDS["teinf2"] if seed is None else seed
    table = ALTERNATING_EXAMPLE
    prior = BetaPrior.uniform(table.m)
    words = _word_labels(table.m)
    children = np.random.SeedSequence(seed).spawn(len(lengths))

    per_length = {}
    for n, child in zip(lengths, children):
        letters = simulate_replicates(table, n, replicates, seed=child)
        n0, n1 = batch_transition_counts(letters, table.m)

        def summarise(r):
            post = posterior(TransitionCounts(m=table.m, n0=n0[r], n1=n1[r]), prior)
            lower, upper = post.interval(0.95)
            return post.mean(), lower, upper

        summaries = _thread_map(summarise, range(replicates), threads)
        means = np.mean([s[0] for s in summaries], axis=0)
        lowers = np.mean([s[1] for s in summaries], axis=0)
        uppers = np.mean([s[2] for s in summaries], axis=0)
        per_length[n] = {
            "estimate": means,
            "lower": lowers,
            "upper": uppers,
            "width": uppers - lowers,
        }

    results = {
        "m": table.m,
        "true_p": table.p,
        "words": words,
        "replicates": replicates,
        "lengths": list(lengths),
        "by_length": {str(n): per_length[n] for n in lengths},
    }
    out_dir = Path(out_dir)
    rows = [
        (
            n,
            word,
            per_length[n]["estimate"][w],
            per_length[n]["lower"][w],
            per_length[n]["upper"][w],
            per_length[n]["width"][w],
        )
        for n in lengths
        for w, word in enumerate(words)
    ]
    widths = np.array([[per_length[n]["width"][w] for n in lengths] for w in range(len(words))])
    artifacts = [
        report.write_csv(
            out_dir / "teinf2.csv",
            ["n", "word", "avg_estimate", "avg_lower_95", "avg_upper_95", "avg_width"],
            rows,
        ),
        plots.interval_width_curves(
            lengths, widths, words, out_dir / "teinf2.png", title="interval width vs n"
        ),
    ]
    return results, artifacts, seed


def run_hist2i(out_dir, seed=None, replicates=1000, m_max=10, threads=None, **_):
    """Selection histograms for sequences simulated from both examples."""
    seed = DEFAULT_SEEDS["hist2i"] if seed is None else seed
    candidates = list(range(1, m_max + 1))
    tables = {
        "alternating_m2": ALTERNATING_EXAMPLE,
        "clustered_m3": CLUSTERED_EXAMPLE,
    }
    results = {"candidates": candidates, "replicates": replicates, "tables": {}}
    for name, table in tables.items():
        letters = simulate_replicates(table, EXAMPLE_LENGTH, replicates, seed=seed)

        def select(r):
            return select_word_length(letters[r], m_max=m_max).selected_m

        selections = np.array(_thread_map(select, range(replicates), threads))
        histogram = np.bincount(selections, minlength=m_max + 1)[1:]
        results["tables"][name] = {
            "true_m": table.m,
            "selected_counts": histogram,
            "selected_share": histogram / replicates,
        }

    out_dir = Path(out_dir)
    rows = [
        (
            m,
            results["tables"]["alternating_m2"]["selected_counts"][i],
            results["tables"]["clustered_m3"]["selected_counts"][i],
        )
        for i, m in enumerate(candidates)
    ]
    artifacts = [
        report.write_csv(
            out_dir / "hist2i.csv",
            ["m", "alternating_m2_count", "clustered_m3_count"],
            rows,
        ),
        plots.selection_histograms(
            candidates,
            [results["tables"][k]["selected_counts"] for k in tables],
            [f"{k} (true m={tables[k].m})" for k in tables],
            out_dir / "hist2i.png",
        ),
    ]
    return results, artifacts, seed


def _boatrace_fit(sequence: BinarySequence, m: int) -> dict:
    counts = count_transitions(sequence, m)
    prior = BetaPrior.uniform(m)
    post = posterior(counts, prior)
    lower, upper = post.interval(0.95)
    fit = mle(counts)
    mean = post.mean()
    table = TransitionTable(m=m, p=mean)
    return {
        "words": _word_labels(m),
        "transition_counts": {"n0": counts.n0, "n1": counts.n1},
        "posterior_mean": mean,
        "lower": lower,
        "upper": upper,
        "mle": fit.estimate,
        "word_marginals": empirical_word_distribution(sequence, m),
        "predicted_next_one": predict_next(table, sequence, mode="marginal"),
    }


def run_boatrace(out_dir, seed=None, m_max=10, **_):
    """The race series study: selection, fits, and next-result prediction."""
    sequence = load_boat_race()
    selection = select_word_length(sequence, m_max=m_max)
    letter_dist = empirical_letter_distribution(sequence)

    sensitivity = {}
    for strength in (0.5, 1.0, 2.0):
        rule = lambda m, s=strength: BetaPrior.constant(m, s, s)
        sensitivity[str(strength)] = select_word_length(
            sequence, m_max=m_max, prior_rule=rule
        ).selected_m

    results = {
        "timeline_slots": len(sequence),
        "results_observed": sequence.n_observed,
        "zeros": int((sequence.observed == 0).sum()),
        "ones": int((sequence.observed == 1).sum()),
        "letter_distribution": letter_dist,
        "selection": {
            "candidates": list(selection.candidates),
            "log_evidence": selection.log_evidence,
            "transition_totals": selection.transition_totals,
            "wins": selection.wins,
            "conditioning": selection.conditioning,
            "selected_m": selection.selected_m,
        },
        "fits": {"2": _boatrace_fit(sequence, 2), "3": _boatrace_fit(sequence, 3)},
        "prior_sensitivity_selected_m": sensitivity,
    }

    out_dir = Path(out_dir)
    artifacts = [
        report.write_csv(
            out_dir / "boatrace_selection.csv",
            ["m", "transitions", "log_evidence", "pairwise_wins"],
            list(
                zip(
                    selection.candidates,
                    selection.transition_totals,
                    selection.log_evidence,
                    selection.wins,
                )
            ),
        ),
        plots.sequence_strip(
            sequence, out_dir / "boatrace_series.png", title="race winners (0=first label)"
        ),
        plots.evidence_profile(
            selection.candidates,
            selection.log_evidence,
            selection.selected_m,
            out_dir / "boatrace_evidence.png",
            title="per-candidate evidence",
        ),
    ]
    for m_key, fit in results["fits"].items():
        rows = list(
            zip(
                fit["words"],
                fit["transition_counts"]["n0"],
                fit["transition_counts"]["n1"],
                fit["posterior_mean"],
                fit["lower"],
                fit["upper"],
                fit["mle"],
            )
        )
        artifacts.append(
            report.write_csv(
                out_dir / f"boatrace_fit_m{m_key}.csv",
                ["word", "n0", "n1", "posterior_mean", "lower_95", "upper_95", "mle"],
                rows,
            )
        )
        artifacts.append(
            plots.estimate_errorbars(
                fit["words"],
                None,
                fit["posterior_mean"],
                fit["lower"],
                fit["upper"],
                out_dir / f"boatrace_fit_m{m_key}.png",
                title=f"posterior means, m={m_key}",
            )
        )
    return results, artifacts, seed


STUDIES = {
    "teinf-left": run_teinf_left,
    "teinf-right": run_teinf_right,
    "teinf2": run_teinf2,
    "hist2i": run_hist2i,
    "boatrace": run_boatrace,
}


def run_experiment(name: str, out_dir, seed=None, **options) -> tuple[dict, list[Path]]:
    """Run a named study; returns the full report and written artifact paths.

    The report lands in ``<out_dir>/<name>.report.json`` next to the study's
    CSV tables and figures.
    """
    if name not in STUDIES:
        raise ValueError(f"unknown experiment {name!r}; choose from {sorted(STUDIES)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results, artifacts, seed_used = STUDIES[name](out_dir, seed=seed, **options)
    parameters = {"experiment": name, **{k: report.jsonable(v) for k, v in options.items()}}
    doc = report.build_report(
        command=f"experiment {name}",
        parameters=parameters,
        results=results,
        seed=seed_used,
    )
    path = report.write_report(doc, out_dir / f"{name}.report.json")
    return doc, [path, *artifacts]
