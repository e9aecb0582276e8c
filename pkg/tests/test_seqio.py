import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from debruijn import BinarySequence, empirical_word_distribution
from debruijn.sequences import GAP
from debruijn.seqio import (
    BOAT_RACE_ONES,
    BOAT_RACE_RESULTS,
    BOAT_RACE_ZEROS,
    DataError,
    LabeledSeries,
    boat_race_path,
    load_boat_race,
    load_labeled_series,
    load_sequence,
    parse_sequence_text,
    read_labeled_series,
    save_sequence,
    sequence_to_text,
    series_to_sequence,
)


# ---------------------------------------------------------------------------
# sequence text


def test_parse_basic_segments():
    seq = parse_sequence_text("0011-01")
    assert [list(s) for s in seq.segments] == [[0, 0, 1, 1], [0, 1]]


def test_parse_skips_whitespace_and_comments():
    seq = parse_sequence_text("# header comment\n01 10\n")
    assert list(seq.values) == [0, 1, 1, 0]


def test_parse_rejects_all_gaps():
    with pytest.raises(DataError, match="no observed letters"):
        parse_sequence_text("--")


def test_parse_reports_position_of_bad_character():
    with pytest.raises(DataError) as info:
        parse_sequence_text("0101\n01x0\n")
    assert info.value.line == 2
    assert info.value.column == 3
    assert "line 2, column 3" in str(info.value)


def test_parse_position_skips_comment_lines():
    with pytest.raises(DataError) as info:
        parse_sequence_text("# note\n0101\n 2\n")
    assert info.value.line == 3
    assert info.value.column == 2


slot_strategy = st.lists(
    st.sampled_from([0, 1, GAP]), min_size=1, max_size=150
).filter(lambda slots: any(s != GAP for s in slots))


@given(slot_strategy, st.integers(1, 80))
@settings(max_examples=80)
def test_text_round_trip(slots, width):
    seq = BinarySequence(np.array(slots, dtype=np.int8))
    text = sequence_to_text(seq, width=width)
    assert text.endswith("\n")
    assert max(len(line) for line in text.splitlines()) <= width
    assert parse_sequence_text(text) == seq


def test_sequence_to_text_width_validation():
    seq = parse_sequence_text("01")
    with pytest.raises(ValueError):
        sequence_to_text(seq, width=0)


def test_save_and_load_files(tmp_path):
    seq = parse_sequence_text("0011-01-")
    path = tmp_path / "seq.txt"
    save_sequence(seq, path, width=3)
    assert path.read_text() == "001\n1-0\n1-\n"
    assert load_sequence(path) == seq


# ---------------------------------------------------------------------------
# labeled series


def write_csv(tmp_path, text):
    path = tmp_path / "series.csv"
    path.write_text(text)
    return path


def test_read_labeled_series_basic(tmp_path):
    path = write_csv(tmp_path, "year,winner\n2000,A\n2001,B\n2003,A\n")
    series = read_labeled_series(path)
    assert series.years == (2000, 2001, 2003)
    assert series.winners == ("A", "B", "A")


def test_read_labeled_series_header_case_and_comments(tmp_path):
    path = write_csv(tmp_path, "# source: somewhere\nYear, Winner\n1990,x\n")
    series = read_labeled_series(path)
    assert series.years == (1990,)


def test_read_labeled_series_blank_winner_is_none(tmp_path):
    path = write_csv(tmp_path, "year,winner\n2000,A\n2001,\n")
    assert read_labeled_series(path).winners == ("A", None)


def test_read_labeled_series_rejections(tmp_path):
    with pytest.raises(DataError, match="header"):
        read_labeled_series(write_csv(tmp_path, "season,winner\n2000,A\n"))
    with pytest.raises(DataError, match="strictly increasing"):
        read_labeled_series(write_csv(tmp_path, "year,winner\n2001,A\n2001,B\n"))
    with pytest.raises(DataError, match="invalid year") as info:
        read_labeled_series(write_csv(tmp_path, "year,winner\nMMI,A\n"))
    assert info.value.line == 2
    with pytest.raises(DataError, match="two columns"):
        read_labeled_series(write_csv(tmp_path, "year,winner\n2000\n"))
    with pytest.raises(DataError, match="no data rows"):
        read_labeled_series(write_csv(tmp_path, "year,winner\n"))
    with pytest.raises(DataError, match="header"):
        read_labeled_series(write_csv(tmp_path, ""))


def test_series_to_sequence_places_gaps():
    series = LabeledSeries(years=(2000, 2001, 2003, 2004), winners=("A", None, "B", "A"))
    seq = series_to_sequence(series, "A", "B", exclude_years=[2004])
    # timeline 2000..2004: A, blank, absent, B, excluded
    assert list(seq.values) == [0, GAP, GAP, 1, GAP]


def test_series_to_sequence_rejects_unknown_label():
    series = LabeledSeries(years=(2000,), winners=("C",))
    with pytest.raises(DataError, match="unknown label"):
        series_to_sequence(series, "A", "B")


def test_series_to_sequence_rejects_equal_labels():
    series = LabeledSeries(years=(2000,), winners=("A",))
    with pytest.raises(ValueError, match="differ"):
        series_to_sequence(series, "A", "A")


def test_series_to_sequence_needs_a_usable_result():
    series = LabeledSeries(years=(2000, 2001), winners=(None, "A"))
    with pytest.raises(DataError, match="no usable"):
        series_to_sequence(series, "A", "B", exclude_years=[2001])


def test_load_labeled_series_round_trip(tmp_path):
    path = write_csv(tmp_path, "year,winner\n2000,A\n2002,B\n")
    seq = load_labeled_series(path, "A", "B")
    assert list(seq.values) == [0, GAP, 1]


# ---------------------------------------------------------------------------
# bundled dataset


def test_boat_race_totals():
    seq = load_boat_race()
    observed = seq.observed
    assert observed.size == BOAT_RACE_RESULTS == 164
    assert int((observed == 0).sum()) == BOAT_RACE_ZEROS == 79
    assert int((observed == 1).sum()) == BOAT_RACE_ONES == 85


def test_boat_race_timeline():
    seq = load_boat_race()
    # yearly slots from 1829 through 2021, with the 1877 dead heat a gap
    assert len(seq.values) == 193
    assert seq.values[1877 - 1829] == GAP
    assert seq.has_gaps


def test_boat_race_word_marginals():
    seq = load_boat_race()
    np.testing.assert_allclose(
        empirical_word_distribution(seq, 1), [0.482, 0.518], atol=5e-4
    )
    np.testing.assert_allclose(
        empirical_word_distribution(seq, 2),
        [0.303, 0.191, 0.184, 0.322],
        atol=6e-4,
    )


def test_boat_race_provenance_check(tmp_path):
    tampered = tmp_path / "boat_race.csv"
    lines = boat_race_path().read_text().splitlines()
    assert lines[-1].endswith(("Oxford", "Cambridge"))
    year = lines[-1].split(",")[0]
    flipped = "Oxford" if lines[-1].endswith("Cambridge") else "Cambridge"
    tampered.write_text("\n".join(lines[:-1] + [f"{year},{flipped}"]) + "\n")
    with pytest.raises(DataError, match="provenance"):
        load_boat_race(tampered)
