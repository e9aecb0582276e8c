import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from debruijn import GAP, BinarySequence

segments_strategy = st.lists(
    st.lists(st.integers(0, 1), min_size=1, max_size=12),
    min_size=1,
    max_size=5,
)


def test_gap_is_minus_one():
    assert GAP == -1


def test_from_letters():
    seq = BinarySequence.from_letters([0, 1, 1, 0])
    assert len(seq) == 4
    assert not seq.has_gaps
    assert np.array_equal(seq.observed, [0, 1, 1, 0])


def test_from_letters_rejects_non_binary():
    with pytest.raises(ValueError):
        BinarySequence.from_letters([0, 1, 2])


def test_values_validation_names_the_bad_slot():
    with pytest.raises(ValueError, match="slot 2"):
        BinarySequence(np.array([0, 1, 5], dtype=np.int8))


def test_all_gaps_rejected():
    with pytest.raises(ValueError, match="no observed letters"):
        BinarySequence(np.array([GAP, GAP], dtype=np.int8))


def test_segments_split_at_gaps():
    # timeline 0011-01: two observed runs separated by one missing slot
    seq = BinarySequence(np.array([0, 0, 1, 1, GAP, 0, 1], dtype=np.int8))
    segs = seq.segments
    assert len(segs) == 2
    assert np.array_equal(segs[0], [0, 0, 1, 1])
    assert np.array_equal(segs[1], [0, 1])
    assert seq.has_gaps
    assert seq.n_observed == 6


def test_segments_gap_free():
    seq = BinarySequence.from_letters([1, 0, 1])
    assert len(seq.segments) == 1
    assert np.array_equal(seq.segments[0], [1, 0, 1])


def test_from_segments_default_single_gap():
    seq = BinarySequence.from_segments([[0, 0], [1]])
    assert np.array_equal(seq.values, [0, 0, GAP, 1])


def test_from_segments_explicit_gap_lengths():
    seq = BinarySequence.from_segments([[1], [0], [1]], gap_lengths=[2, 1])
    assert np.array_equal(seq.values, [1, GAP, GAP, 0, GAP, 1])


def test_from_segments_validates_gap_lengths():
    with pytest.raises(ValueError):
        BinarySequence.from_segments([[1], [0]], gap_lengths=[1, 1])
    with pytest.raises(ValueError):
        BinarySequence.from_segments([[1], [0]], gap_lengths=[0])


@given(segments_strategy)
def test_from_segments_roundtrips_through_segments(segments):
    seq = BinarySequence.from_segments(segments)
    recovered = [list(s) for s in seq.segments]
    assert recovered == segments


def test_values_are_read_only():
    seq = BinarySequence.from_letters([0, 1])
    with pytest.raises(ValueError):
        seq.values[0] = 1


def test_equality():
    a = BinarySequence.from_letters([0, 1])
    b = BinarySequence.from_letters([0, 1])
    assert a == b
    assert a != BinarySequence.from_letters([0, 1, 1])
    assert a != [0, 1]
