"""Command-line interface.

Each subcommand maps one-to-one onto a library operation and emits a run
report: JSON by default, or the command's primary table as CSV with
``--output csv``.  The ``experiment`` subcommand replays the named studies,
writing their reports, tables, and figures into the output directory
(``--out-dir``, or the ``DEBRUIJN_OUT_DIR`` environment variable).

Exit codes: 0 success, 1 usage error, 2 data error, 3 verification failure.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .distribution import (
    PREDICTION_MODES,
    full_distribution,
    log_sequence_probability,
    predict_next,
    sequence_probability,
    sequence_probability_indexed,
)
from .experiments import STUDIES, run_experiment
from .graph import MAX_WORD_LENGTH, TransitionTable, make_transition_table
from .inference import (
    BetaPrior,
    TransitionCounts,
    count_transitions,
    expected_transition_count,
    log_evidence,
    mh_sample_posterior,
    mle,
    posterior,
    select_word_length,
)
from .oracle import (
    BudgetExceededError,
    EnumerationBudget,
    brute_force_distribution,
    brute_force_expected_count,
    eigen_stationary_distribution,
    grid_evidence,
)
from .process import NonUniqueStationaryError, SimulationConfig, simulate, stationary_distribution
from .report import build_report, format_cell, report_to_json
from .seqio import DataError, load_sequence, parse_sequence_text, sequence_to_text
from .sequences import BinarySequence


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(self.exit_code_on_error(message))

    def exit_code_on_error(self, message) -> int:
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        return 1


def _structured_error(err: Exception) -> int:
    payload = {"type": type(err).__name__, "message": str(err)}
    if isinstance(err, DataError):
        payload["line"] = err.line
        payload["column"] = err.column
    import json

    print(json.dumps({"error": payload}), file=sys.stderr)
    return 2


# ---------------------------------------------------------------------------
# shared option plumbing


def _add_data_options(p):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--input", type=Path, help="sequence file (0/1/-, # comments)")
    group.add_argument("--sequence", help="inline sequence text")


def _add_prior_options(p):
    p.add_argument("--prior-alpha", default="1", help="Beta alpha: scalar or comma list")
    p.add_argument("--prior-beta", default="1", help="Beta beta: scalar or comma list")


def _add_output_options(p):
    p.add_argument("--output", choices=("json", "csv"), default="json")
    p.add_argument(
        "--out-dir",
        type=Path,
        default=Path(os.environ.get("DEBRUIJN_OUT_DIR", ".")),
        help="directory for written artifacts (default: $DEBRUIJN_OUT_DIR or .)",
    )


def _read_sequence(args) -> tuple[BinarySequence, list[Path]]:
    if args.input is not None:
        return load_sequence(args.input), [args.input]
    return parse_sequence_text(args.sequence), []


def _parse_values(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",") if v.strip() != ""])
    except ValueError:
        raise DataError(f"expected a number or comma-separated numbers, got {text!r}") from None


def _parse_table(args) -> TransitionTable:
    values = _parse_values(args.p)
    if values.size == 1:
        values = np.full(1 << args.m, values[0])
    return make_transition_table(args.m, values)


def _prior_for(args, m: int) -> BetaPrior:
    alpha = _parse_values(args.prior_alpha)
    beta = _parse_values(args.prior_beta)
    return BetaPrior(m=m, alpha=alpha if alpha.size > 1 else float(alpha[0]),
                     beta=beta if beta.size > 1 else float(beta[0]))


def _prior_rule(args):
    alpha = _parse_values(args.prior_alpha)
    beta = _parse_values(args.prior_beta)
    if alpha.size > 1 or beta.size > 1:
        raise DataError("per-word priors need a fixed --m; use scalars here")
    return lambda m: BetaPrior.constant(m, float(alpha[0]), float(beta[0]))


def _word_labels(m: int) -> list[str]:
    return [format(w, f"0{m}b") for w in range(1 << m)]


def _emit(args, command: str, parameters: dict, results: dict,
          table: tuple[list, list] | None, seed=None, inputs=()) -> int:
    """Print a run report (json) or the primary table (csv)."""
    if args.output == "csv" and table is not None:
        header, rows = table
        print(",".join(str(h) for h in header))
        for row in rows:
            print(",".join(format_cell(cell) for cell in row))
        return 0
    doc = build_report(command, parameters, results, seed=seed, input_paths=inputs)
    print(report_to_json(doc), end="")
    return 0


# ---------------------------------------------------------------------------
# subcommands


def _cmd_simulate(args) -> int:
    table = _parse_table(args)
    init = args.init
    if init not in ("stationary", "uniform"):
        if not set(init) <= {"0", "1"} or len(init) != args.m:
            raise DataError(
                f"--init must be 'stationary', 'uniform', or {args.m} bits, got {init!r}"
            )
        init = [int(c) for c in init]
    config = SimulationConfig(n=args.n, seed=args.seed, init=init)
    text = sequence_to_text(simulate(table, config))
    if args.output == "csv":
        print(text, end="")
        return 0
    results = {"n": args.n, "m": args.m, "letters": text.replace("\n", "")}
    return _emit(args, "simulate", {"p": table.p, "init": args.init, "n": args.n},
                 results, None, seed=args.seed)


def _cmd_prob(args) -> int:
    table = _parse_table(args)
    sequence, inputs = _read_sequence(args)
    if sequence.has_gaps:
        raise DataError("probability evaluation needs a gap-free sequence")
    letters = sequence.observed
    logp = log_sequence_probability(table, letters)
    prob = sequence_probability(table, letters)
    results = {"n": int(letters.size), "log_probability": logp, "probability": prob}
    table_out = (["quantity", "value"],
                 [("log_probability", logp), ("probability", prob)])
    return _emit(args, "prob", {"m": args.m, "p": table.p}, results, table_out, inputs=inputs)


def _cmd_counts(args) -> int:
    sequence, inputs = _read_sequence(args)
    counts = count_transitions(sequence, args.m, skip=args.skip)
    words = _word_labels(args.m)
    results = {"m": args.m, "skip": args.skip, "words": words,
               "n0": counts.n0, "n1": counts.n1, "total": counts.total}
    rows = list(zip(words, counts.n0, counts.n1))
    return _emit(args, "counts", {"m": args.m, "skip": args.skip}, results,
                 (["word", "n0", "n1"], rows), inputs=inputs)


def _cmd_fit_mle(args) -> int:
    sequence, inputs = _read_sequence(args)
    counts = count_transitions(sequence, args.m)
    fit = mle(counts)
    words = _word_labels(args.m)
    results = {"m": args.m, "estimate": fit.estimate, "std_error": fit.std_error,
               "no_data": fit.no_data, "n0": counts.n0, "n1": counts.n1}
    rows = list(zip(words, fit.estimate, fit.std_error, counts.n0, counts.n1))
    return _emit(args, "fit-mle", {"m": args.m}, results,
                 (["word", "estimate", "std_error", "n0", "n1"], rows), inputs=inputs)


def _cmd_fit_bayes(args) -> int:
    sequence, inputs = _read_sequence(args)
    counts = count_transitions(sequence, args.m)
    prior = _prior_for(args, args.m)
    post = posterior(counts, prior)
    lower, upper = post.interval(args.level)
    words = _word_labels(args.m)
    results = {"m": args.m, "level": args.level, "mean": post.mean(), "mode": post.mode(),
               "lower": lower, "upper": upper, "alpha": post.alpha, "beta": post.beta,
               "no_data": post.no_data}
    rows = list(zip(words, post.mean(), lower, upper, counts.n0, counts.n1))
    return _emit(args, "fit-bayes",
                 {"m": args.m, "prior_alpha": prior.alpha, "prior_beta": prior.beta,
                  "level": args.level},
                 results, (["word", "mean", "lower", "upper", "n0", "n1"], rows),
                 inputs=inputs)


def _cmd_mcmc(args) -> int:
    sequence, inputs = _read_sequence(args)
    counts = count_transitions(sequence, args.m)
    prior = _prior_for(args, args.m)
    scale = None if args.proposal_scale is None else _parse_values(args.proposal_scale)
    chain = mh_sample_posterior(counts, prior, iterations=args.iterations,
                                burn_in=args.burn_in, proposal_scale=scale, seed=args.seed)
    lower, upper = chain.interval(args.level)
    words = _word_labels(args.m)
    results = {"m": args.m, "iterations": args.iterations, "burn_in": args.burn_in,
               "mean": chain.mean(), "lower": lower, "upper": upper,
               "acceptance_rate": chain.acceptance_rate}
    rows = list(zip(words, chain.mean(), lower, upper, chain.acceptance_rate))
    return _emit(args, "mcmc",
                 {"m": args.m, "iterations": args.iterations, "burn_in": args.burn_in,
                  "prior_alpha": prior.alpha, "prior_beta": prior.beta},
                 results, (["word", "mean", "lower", "upper", "acceptance_rate"], rows),
                 seed=args.seed, inputs=inputs)


def _cmd_evidence(args) -> int:
    sequence, inputs = _read_sequence(args)
    rule = _prior_rule(args)
    rows = []
    results_rows = []
    for m in range(1, args.m_max + 1):
        counts = count_transitions(sequence, m)
        value = log_evidence(counts, rule(m))
        rows.append((m, counts.total, value))
        results_rows.append({"m": m, "transitions": counts.total, "log_evidence": value})
    return _emit(args, "evidence", {"m_max": args.m_max}, {"models": results_rows},
                 (["m", "transitions", "log_evidence"], rows), inputs=inputs)


def _cmd_select_m(args) -> int:
    sequence, inputs = _read_sequence(args)
    rule = _prior_rule(args)
    selection = select_word_length(sequence, m_max=args.m_max, prior_rule=rule,
                                   conditioning=args.conditioning)
    results = {
        "candidates": list(selection.candidates),
        "log_evidence": selection.log_evidence,
        "transition_totals": selection.transition_totals,
        "supported": selection.supported,
        "conditioning": selection.conditioning,
        "pairwise_log_bayes_factors": selection.pairwise,
        "wins": selection.wins,
        "selected_m": selection.selected_m,
    }
    rows = [
        (m, selection.transition_totals[i], selection.log_evidence[i],
         selection.wins[i], "*" if m == selection.selected_m else "")
        for i, m in enumerate(selection.candidates)
    ]
    return _emit(args, "select-m",
                 {"m_max": args.m_max, "conditioning": args.conditioning},
                 results, (["m", "transitions", "log_evidence", "wins", "selected"], rows),
                 inputs=inputs)


def _cmd_predict(args) -> int:
    sequence, inputs = _read_sequence(args)
    counts = count_transitions(sequence, args.m)
    prior = _prior_for(args, args.m)
    fitted = TransitionTable(m=args.m, p=posterior(counts, prior).mean())
    p_one = predict_next(fitted, sequence, mode=args.mode)
    results = {"m": args.m, "mode": args.mode, "p_next_0": 1.0 - p_one,
               "p_next_1": p_one, "fitted_p": fitted.p}
    rows = [(0, 1.0 - p_one), (1, p_one)]
    return _emit(args, "predict", {"m": args.m, "mode": args.mode},
                 results, (["next_letter", "probability"], rows), inputs=inputs)


def _cmd_experiment(args) -> int:
    options = {}
    for key in ("replicates", "iterations", "burn_in", "m_max", "threads", "lengths"):
        value = getattr(args, key, None)
        if value is not None:
            options[key] = value
    doc, paths = run_experiment(args.study, args.out_dir, seed=args.seed, **options)
    if args.output == "csv":
        for path in paths:
            print(path)
        return 0
    print(report_to_json(doc), end="")
    return 0


_VERIFY_CHECKS = (
    ("normalization", 1e-12),
    ("forward_vs_enumeration", 1e-12),
    ("indexed_vs_enumeration", 1e-12),
    ("stationary_vs_eigen", 1e-10),
    ("expected_count_vs_enumeration", 1e-10),
    ("evidence_vs_quadrature", 1e-6),
)


def _cmd_verify(args) -> int:
    """Cross-check the fast paths against the enumeration oracles."""
    budget = EnumerationBudget()
    budget.check(args.n, args.m)
    rng = np.random.default_rng(args.seed)
    worst = {name: 0.0 for name, _ in _VERIFY_CHECKS}

    for _ in range(args.trials):
        p = rng.uniform(0.05, 0.95, size=1 << args.m)
        table = make_transition_table(args.m, p)
        dist = full_distribution(table, args.n)
        enumerated = brute_force_distribution(table, args.n)
        worst["normalization"] = max(worst["normalization"], abs(dist.sum() - 1.0))
        worst["forward_vs_enumeration"] = max(
            worst["forward_vs_enumeration"], float(np.max(np.abs(dist - enumerated)))
        )
        for index in rng.integers(0, 1 << args.n, size=4):
            direct = sequence_probability_indexed(table, args.n, int(index))
            worst["indexed_vs_enumeration"] = max(
                worst["indexed_vs_enumeration"], abs(direct - enumerated[index])
            )
        pi = stationary_distribution(table)
        worst["stationary_vs_eigen"] = max(
            worst["stationary_vs_eigen"],
            float(np.max(np.abs(pi - eigen_stationary_distribution(table)))),
        )
        edge = int(rng.integers(0, 1 << (args.m + 1)))
        closed = expected_transition_count(table, args.n, edge)
        counted = brute_force_expected_count(table, args.n, edge)
        worst["expected_count_vs_enumeration"] = max(
            worst["expected_count_vs_enumeration"], abs(closed - counted)
        )
        if args.m <= 2:
            counts = TransitionCounts(
                m=args.m,
                n0=rng.integers(0, 21, size=1 << args.m),
                n1=rng.integers(0, 21, size=1 << args.m),
            )
            prior = BetaPrior.uniform(args.m)
            exact = log_evidence(counts, prior)
            quad = grid_evidence(counts, prior)
            scale = max(abs(exact), 1.0)
            worst["evidence_vs_quadrature"] = max(
                worst["evidence_vs_quadrature"], abs(exact - quad) / scale
            )

    checks = []
    failed = False
    for name, tolerance in _VERIFY_CHECKS:
        if name == "evidence_vs_quadrature" and args.m > 2:
            checks.append({"name": name, "max_deviation": None, "tolerance": tolerance,
                           "status": "skipped (m > 2)"})
            continue
        ok = worst[name] <= tolerance
        failed = failed or not ok
        checks.append({"name": name, "max_deviation": worst[name],
                       "tolerance": tolerance, "status": "ok" if ok else "FAIL"})

    if args.output == "json":
        doc = build_report("verify", {"m": args.m, "n": args.n, "trials": args.trials},
                           {"checks": checks, "passed": not failed}, seed=args.seed)
        print(report_to_json(doc), end="")
    else:
        for check in checks:
            deviation = check["max_deviation"]
            shown = "-" if deviation is None else f"{deviation:.3e}"
            print(f"{check['status']:>8}  {check['name']:<32} max {shown}  tol {check['tolerance']:.0e}")
    return 3 if failed else 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> _Parser:
    parser = _Parser(prog="debruijn", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="sample letters from a transition table")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p", required=True, help="append-1 probabilities, comma separated")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--init", default="stationary",
                   help="'stationary', 'uniform', or an m-bit starting word")
    _add_output_options(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("prob", help="exact probability of a gap-free sequence")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p", required=True)
    _add_data_options(p)
    _add_output_options(p)
    p.set_defaults(func=_cmd_prob)

    p = sub.add_parser("counts", help="sliding-window transition counts")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--skip", type=int, default=0)
    _add_data_options(p)
    _add_output_options(p)
    p.set_defaults(func=_cmd_counts)

    p = sub.add_parser("fit-mle", help="maximum-likelihood transition probabilities")
    p.add_argument("--m", type=int, required=True)
    _add_data_options(p)
    _add_output_options(p)
    p.set_defaults(func=_cmd_fit_mle)

    p = sub.add_parser("fit-bayes", help="conjugate posterior summary")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--level", type=float, default=0.95)
    _add_data_options(p)
    _add_prior_options(p)
    _add_output_options(p)
    p.set_defaults(func=_cmd_fit_bayes)

    p = sub.add_parser("mcmc", help="random-walk posterior sampling")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--iterations", type=int, default=11_000)
    p.add_argument("--burn-in", type=int, default=1_000)
    p.add_argument("--proposal-scale", help="scalar or comma list; default adaptive")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--seed", type=int)
    _add_data_options(p)
    _add_prior_options(p)
    _add_output_options(p)
    p.set_defaults(func=_cmd_mcmc)

    p = sub.add_parser("evidence", help="log evidence per candidate word length")
    p.add_argument("--m-max", type=int, default=MAX_WORD_LENGTH)
    _add_data_options(p)
    _add_prior_options(p)
    _add_output_options(p)
    p.set_defaults(func=_cmd_evidence)

    p = sub.add_parser("select-m", help="choose a word length by pairwise Bayes factors")
    p.add_argument("--m-max", type=int, default=MAX_WORD_LENGTH)
    p.add_argument("--conditioning", choices=("paired", "per-m"), default="paired")
    _add_data_options(p)
    _add_prior_options(p)
    _add_output_options(p)
    p.set_defaults(func=_cmd_select_m)

    p = sub.add_parser("predict", help="distribution of the next letter")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--mode", choices=PREDICTION_MODES, default="conditional")
    _add_data_options(p)
    _add_prior_options(p)
    _add_output_options(p)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("verify", help="cross-check fast paths against oracles")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    _add_output_options(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("experiment", help="replay a named study")
    p.add_argument("study", choices=sorted(STUDIES))
    p.add_argument("--seed", type=int)
    p.add_argument("--replicates", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--burn-in", type=int, dest="burn_in")
    p.add_argument("--m-max", type=int, dest="m_max")
    p.add_argument("--threads", type=int)
    _add_output_options(p)
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return exit_.code if isinstance(exit_.code, int) else 1
    try:
        return args.func(args)
    except DataError as err:
        return _structured_error(err)
    except (BudgetExceededError, NonUniqueStationaryError, ValueError, OSError) as err:
        return _structured_error(err)


if __name__ == "__main__":
    sys.exit(main())
