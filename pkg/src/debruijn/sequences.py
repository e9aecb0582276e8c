"""Binary observation sequences, possibly with missing stretches.

A sequence is stored on its full timeline: one slot per time step holding 0,
1, or :data:`GAP` (-1) for a missing observation.  Keeping the gaps in place
matters twice over: transition windows must never bridge a gap, and recent
missing slots change what a prediction may condition on.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

GAP = -1


@dataclass(frozen=True, eq=False)
class BinarySequence:
    """Timeline of binary observations with optional gaps.

    ``values`` holds one int8 per time slot: 0, 1, or ``GAP`` (-1).
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int8).reshape(-1).copy()
        bad = ~np.isin(values, (0, 1, GAP))
        if np.any(bad):
            raise ValueError(
                f"timeline values must be 0, 1, or {GAP}; "
                f"found {values[bad][0]} at slot {int(np.flatnonzero(bad)[0])}"
            )
        if not np.any(values != GAP):
            raise ValueError("sequence contains no observed letters")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_letters(cls, letters: Iterable[int]) -> "BinarySequence":
        """Build a gap-free sequence from binary letters."""
        arr = np.asarray(list(letters), dtype=np.int8)
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("letters must be 0 or 1")
        return cls(arr)

    @classmethod
    def from_segments(
        cls,
        segments: Sequence[Sequence[int]],
        gap_lengths: Sequence[int] | None = None,
    ) -> "BinarySequence":
        """Join observed segments, inserting gaps between them.

        ``gap_lengths[i]`` slots separate segment ``i`` from segment ``i + 1``
        (default: a single missing slot between consecutive segments).
        """
        segments = [np.asarray(seg, dtype=np.int8) for seg in segments]
        if gap_lengths is None:
            gap_lengths = [1] * max(len(segments) - 1, 0)
        if len(gap_lengths) != max(len(segments) - 1, 0):
            raise ValueError("need exactly one gap length between consecutive segments")
        if any(g < 1 for g in gap_lengths):
            raise ValueError("gap lengths must be >= 1")
        parts: list[np.ndarray] = []
        for i, seg in enumerate(segments):
            parts.append(seg)
            if i < len(gap_lengths):
                parts.append(np.full(gap_lengths[i], GAP, dtype=np.int8))
        return cls(np.concatenate(parts) if parts else np.array([], dtype=np.int8))

    def __len__(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinarySequence):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    @property
    def observed(self) -> np.ndarray:
        """The observed letters with gaps removed."""
        return self.values[self.values != GAP]

    @property
    def n_observed(self) -> int:
        return int(np.count_nonzero(self.values != GAP))

    @property
    def has_gaps(self) -> bool:
        return bool(np.any(self.values == GAP))

    @property
    def segments(self) -> tuple[np.ndarray, ...]:
        """Maximal runs of consecutive observed letters, in timeline order."""
        observed_mask = self.values != GAP
        padded = np.concatenate(([False], observed_mask, [False]))
        edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
        starts, stops = edges[::2], edges[1::2]
        return tuple(self.values[a:b] for a, b in zip(starts, stops))
