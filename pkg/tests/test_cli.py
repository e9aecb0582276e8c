import json

import numpy as np
import pytest

from debruijn import SimulationConfig, make_transition_table, simulate
from debruijn.cli import main
from debruijn.seqio import sequence_to_text

FAIR_ARGS = ["--m", "2", "--p", "0.5"]


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


# ---------------------------------------------------------------------------
# simulate / prob / counts


def test_simulate_json_is_deterministic(capsys):
    argv = ["simulate", "--m", "1", "--p", "0.3,0.8", "--n", "25", "--seed", "7"]
    first = run_json(capsys, *argv)
    second = run_json(capsys, *argv)
    assert first["results"]["letters"] == second["results"]["letters"]
    assert len(first["results"]["letters"]) == 25
    assert first["seed"] == 7
    assert first["schema"] == "debruijn.report/1"


def test_simulate_csv_prints_raw_text(capsys):
    code, out, _ = run(
        capsys,
        "simulate", "--m", "2", "--p", "1,0,1,0", "--n", "6",
        "--init", "01", "--output", "csv",
    )
    assert code == 0
    assert out == "010101\n"


def test_simulate_rejects_bad_init(capsys):
    code, _, err = run(
        capsys, "simulate", "--m", "2", "--p", "0.5", "--n", "5", "--init", "012"
    )
    assert code == 2
    assert json.loads(err)["error"]["type"] == "DataError"


def test_prob_fair_coin(capsys):
    doc = run_json(capsys, "prob", *FAIR_ARGS, "--sequence", "010")
    assert doc["results"]["probability"] == pytest.approx(0.125)
    assert doc["results"]["log_probability"] == pytest.approx(np.log(0.125))


def test_prob_csv(capsys):
    code, out, _ = run(
        capsys, "prob", *FAIR_ARGS, "--sequence", "010", "--output", "csv"
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "quantity,value"
    assert lines[2] == "probability,0.125"


def test_prob_rejects_gaps_with_structured_error(capsys):
    code, out, err = run(capsys, "prob", *FAIR_ARGS, "--sequence", "01-1")
    assert code == 2
    assert out == ""
    payload = json.loads(err)["error"]
    assert payload["type"] == "DataError"
    assert "gap-free" in payload["message"]


def test_bad_input_file_reports_position(tmp_path, capsys):
    path = tmp_path / "seq.txt"
    path.write_text("0101\n01x\n")
    code, _, err = run(capsys, "prob", *FAIR_ARGS, "--input", str(path))
    assert code == 2
    payload = json.loads(err)["error"]
    assert payload["line"] == 2
    assert payload["column"] == 3


def test_missing_input_file_is_a_data_error(tmp_path, capsys):
    code, _, err = run(
        capsys, "counts", "--m", "1", "--input", str(tmp_path / "absent.txt")
    )
    assert code == 2
    assert json.loads(err)["error"]["type"] in ("FileNotFoundError", "OSError")


def test_counts_csv(capsys):
    code, out, _ = run(
        capsys, "counts", "--m", "2", "--sequence", "00111", "--output", "csv"
    )
    assert code == 0
    assert out.splitlines() == ["word,n0,n1", "00,0,1", "01,0,1", "10,0,0", "11,0,1"]


def test_counts_json_includes_digest_for_files(tmp_path, capsys):
    path = tmp_path / "seq.txt"
    path.write_text("00111\n")
    doc = run_json(capsys, "counts", "--m", "1", "--input", str(path))
    assert doc["inputs"]["digests"][str(path)].startswith("sha256:")
    assert doc["results"]["total"] == 4


# ---------------------------------------------------------------------------
# estimation commands


def test_fit_mle_unvisited_word_serializes_as_null(capsys):
    doc = run_json(capsys, "fit-mle", "--m", "2", "--sequence", "00111")
    estimates = doc["results"]["estimate"]
    assert estimates[0b10] is None
    assert doc["results"]["no_data"][0b10] is True
    assert estimates[0b00] == pytest.approx(1.0)


def test_fit_bayes_scalar_prior(capsys):
    doc = run_json(
        capsys,
        "fit-bayes", "--m", "1", "--sequence", "00111",
        "--prior-alpha", "1", "--prior-beta", "1",
    )
    # word 0: n1=1, n0=1 -> Beta(2, 2); word 1: n1=2, n0=0 -> Beta(3, 1)
    assert doc["results"]["mean"] == [pytest.approx(1 / 2), pytest.approx(3 / 4)]
    assert doc["results"]["lower"][0] < 1 / 2 < doc["results"]["upper"][0]


def test_fit_bayes_per_word_prior(capsys):
    doc = run_json(
        capsys,
        "fit-bayes", "--m", "1", "--sequence", "00111",
        "--prior-alpha", "2,1", "--prior-beta", "4,1",
    )
    assert doc["results"]["alpha"] == [3.0, 3.0]
    assert doc["results"]["beta"] == [5.0, 1.0]
    assert doc["inputs"]["parameters"]["prior_alpha"] == [2.0, 1.0]


def test_mcmc_small_run(capsys):
    doc = run_json(
        capsys,
        "mcmc", "--m", "1", "--sequence", "0110100111",
        "--iterations", "600", "--burn-in", "100", "--seed", "5",
    )
    results = doc["results"]
    assert len(results["mean"]) == 2
    assert all(0 < rate <= 1 for rate in results["acceptance_rate"])
    assert results["iterations"] == 600


def test_evidence_lists_all_candidates(capsys):
    doc = run_json(capsys, "evidence", "--m-max", "3", "--sequence", "00110101")
    models = doc["results"]["models"]
    assert [row["m"] for row in models] == [1, 2, 3]
    assert [row["transitions"] for row in models] == [7, 6, 5]
    assert all(row["log_evidence"] < 0 for row in models)


def test_evidence_rejects_per_word_prior(capsys):
    code, _, err = run(
        capsys,
        "evidence", "--sequence", "0011", "--prior-alpha", "1,2",
    )
    assert code == 2
    assert "fixed --m" in json.loads(err)["error"]["message"]


def test_select_m_on_a_pinned_sample(capsys):
    table = make_transition_table(2, [0.9, 0.25, 0.75, 0.1])
    text = sequence_to_text(simulate(table, SimulationConfig(n=200, seed=3)))
    doc = run_json(
        capsys, "select-m", "--m-max", "6", "--sequence", text.replace("\n", "")
    )
    assert doc["results"]["selected_m"] == 2
    assert doc["results"]["conditioning"] == "paired"
    code, out, _ = run(
        capsys,
        "select-m", "--m-max", "6", "--sequence", text.replace("\n", ""),
        "--output", "csv",
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "m,transitions,log_evidence,wins,selected"
    starred = [line for line in lines[1:] if line.endswith(",*")]
    assert len(starred) == 1 and starred[0].startswith("2,")


def test_predict_hand_value(capsys):
    doc = run_json(capsys, "predict", "--m", "1", "--sequence", "0101-1")
    # last letter 1; word-1 counts n1=0, n0=1 -> posterior mean 1/3
    assert doc["results"]["p_next_1"] == pytest.approx(1 / 3)
    assert doc["results"]["p_next_0"] == pytest.approx(2 / 3)
    assert doc["results"]["mode"] == "conditional"
    # with a one-letter word the marginal mode conditions on the same letter
    also = run_json(
        capsys, "predict", "--m", "1", "--mode", "marginal", "--sequence", "0101-1"
    )
    assert also["results"]["p_next_1"] == pytest.approx(1 / 3)


def test_predict_conditional_needs_observed_tail(capsys):
    code, _, err = run(
        capsys,
        "predict", "--m", "2", "--mode", "conditional", "--sequence", "011-1",
    )
    assert code == 2
    assert json.loads(err)["error"]["type"] == "ValueError"


# ---------------------------------------------------------------------------
# verify


def test_verify_passes_on_small_case(capsys):
    code, out, _ = run(
        capsys,
        "verify", "--m", "1", "--n", "6", "--trials", "2", "--seed", "0",
        "--output", "csv",
    )
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 6
    assert all(line.lstrip().startswith("ok") for line in lines)


def test_verify_json_reports_checks(capsys):
    doc = run_json(
        capsys, "verify", "--m", "1", "--n", "5", "--trials", "1", "--seed", "1"
    )
    assert doc["results"]["passed"] is True
    names = {check["name"] for check in doc["results"]["checks"]}
    assert "forward_vs_enumeration" in names
    assert "stationary_vs_eigen" in names


def test_verify_skips_quadrature_for_large_m(capsys):
    doc = run_json(
        capsys, "verify", "--m", "3", "--n", "6", "--trials", "1", "--seed", "2"
    )
    by_name = {check["name"]: check for check in doc["results"]["checks"]}
    assert by_name["evidence_vs_quadrature"]["status"].startswith("skipped")


def test_verify_detects_a_broken_oracle(capsys, monkeypatch):
    import debruijn.cli as cli_module
    from debruijn.oracle import brute_force_distribution as real

    def skewed(table, n, budget=None):
        dist = real(table, n) if budget is None else real(table, n, budget=budget)
        return dist + 1e-6

    monkeypatch.setattr(cli_module, "brute_force_distribution", skewed)
    code, _, _ = run(
        capsys, "verify", "--m", "1", "--n", "5", "--trials", "1", "--seed", "0"
    )
    assert code == 3


def test_verify_respects_budget(capsys):
    code, _, err = run(capsys, "verify", "--m", "1", "--n", "30", "--trials", "1")
    assert code == 2
    assert json.loads(err)["error"]["type"] == "BudgetExceededError"


# ---------------------------------------------------------------------------
# usage errors


def test_no_arguments_is_a_usage_error(capsys):
    code, _, err = run(capsys)
    assert code == 1
    assert "usage" in err


def test_unknown_flag_is_a_usage_error(capsys):
    code, _, _ = run(capsys, "prob", *FAIR_ARGS, "--sequence", "010", "--wat")
    assert code == 1


def test_missing_required_option_is_a_usage_error(capsys):
    code, _, _ = run(capsys, "prob", "--p", "0.5", "--sequence", "010")
    assert code == 1


def test_unparseable_probability_is_a_data_error(capsys):
    code, _, err = run(capsys, "prob", "--m", "1", "--p", "half", "--sequence", "010")
    assert code == 2
    assert "comma-separated" in json.loads(err)["error"]["message"]


def test_invalid_probability_value_is_a_data_error(capsys):
    code, _, err = run(capsys, "prob", "--m", "1", "--p", "1.5", "--sequence", "010")
    assert code == 2
    assert json.loads(err)["error"]["type"] == "ValueError"


# ---------------------------------------------------------------------------
# experiment plumbing


def test_experiment_writes_artifacts(tmp_path, capsys):
    code, out, _ = run(
        capsys,
        "experiment", "teinf-left",
        "--iterations", "1500", "--burn-in", "300",
        "--out-dir", str(tmp_path), "--output", "csv",
    )
    assert code == 0
    paths = out.splitlines()
    assert paths[0].endswith("teinf-left.report.json")
    names = {p.rsplit("/", 1)[-1] for p in paths}
    assert names == {"teinf-left.report.json", "teinf_left.csv", "teinf_left.png"}
    for p in paths:
        assert (tmp_path / p.rsplit("/", 1)[-1]).exists()
    report = json.loads((tmp_path / "teinf-left.report.json").read_text())
    assert report["command"] == "experiment teinf-left"
    assert report["inputs"]["parameters"]["iterations"] == 1500


def test_experiment_json_output_is_the_report(tmp_path, capsys):
    doc = run_json(
        capsys,
        "experiment", "teinf-left",
        "--iterations", "1200", "--burn-in", "200", "--seed", "4",
        "--out-dir", str(tmp_path),
    )
    assert doc["seed"] == 4
    assert len(doc["results"]["estimate"]) == 4


def test_experiment_honors_out_dir_env_var(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("DEBRUIJN_OUT_DIR", str(tmp_path))
    code, _, _ = run(
        capsys,
        "experiment", "teinf-left", "--iterations", "1200", "--burn-in", "200",
    )
    assert code == 0
    assert (tmp_path / "teinf-left.report.json").exists()


def test_experiment_unknown_study_is_a_usage_error(capsys):
    code, _, _ = run(capsys, "experiment", "nope")
    assert code == 1
