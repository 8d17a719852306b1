"""Inter-annotator agreement and consensus over context transcripts.

Krippendorff's alpha with the nominal difference function, computed on
the coincidence matrix of pairable values, plus per-variable majority
consensus with deterministic tie-breaking.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

from .context import SLOT_NAMES, ContextState, task_spec
from .errors import (
    FewerThanTwoTranscripts,
    MisalignedTranscripts,
    NoPairableUnits,
)
from .transcripts import ContextTranscript


def nominal_distance(a, b) -> int:
    """0 if the labels are equal, 1 otherwise."""
    return 0 if a == b else 1


@dataclass(frozen=True)
class AnnotationMatrix:
    """Nominal labels per (unit, labeler); None marks a missing cell."""

    labelers: tuple[str, ...]
    units: tuple
    values: tuple[tuple, ...]  # one row per unit, one column per labeler

    def __post_init__(self):
        for row in self.values:
            if len(row) != len(self.labelers):
                raise ValueError("each unit row needs one cell per labeler")
        if len(self.values) != len(self.units):
            raise ValueError("one row per unit required")

    def unit_value_lists(self) -> list[list]:
        return [[v for v in row if v is not None] for row in self.values]

    def pairable_unit_count(self) -> int:
        return sum(1 for vs in self.unit_value_lists() if len(vs) >= 2)


def krippendorff_alpha(matrix: AnnotationMatrix) -> Optional[float]:
    """Alpha = 1 - Do/De over pairable units; None when De is zero.

    Units with fewer than two values are excluded, so they cannot move
    the score.
    """
    unit_lists = [vs for vs in matrix.unit_value_lists() if len(vs) >= 2]
    if not unit_lists:
        raise NoPairableUnits("no unit was annotated by two or more labelers")
    coincidence: Counter = Counter()
    n = 0
    for values in unit_lists:
        m = len(values)
        n += m
        counts = Counter(values)
        weight = 1.0 / (m - 1)
        for c, nc in counts.items():
            for k, nk in counts.items():
                pairs = nc * (nc - 1) if c == k else nc * nk
                if pairs:
                    coincidence[(c, k)] += pairs * weight
    marginals: Counter = Counter()
    for (c, _k), count in coincidence.items():
        marginals[c] += count
    observed = (
        sum(count * nominal_distance(c, k) for (c, k), count in coincidence.items())
        / n
    )
    expected = sum(
        marginals[c] * marginals[k] * nominal_distance(c, k)
        for c in marginals
        for k in marginals
    ) / (n * (n - 1))
    if expected == 0:
        return None
    return 1.0 - observed / expected


def interpret_alpha(alpha: float) -> str:
    """Agreement band: above 0.8 near-perfect, 0.6 to 0.8 substantial."""
    if alpha > 0.8:
        return "near-perfect"
    if alpha >= 0.6:
        return "substantial"
    if alpha > 0:
        return "weak"
    if alpha == 0:
        return "chance"
    return "pronounced disagreement"


def _dense_values(transcript: ContextTranscript, grid: Sequence[int]) -> list:
    """Hold each state until the next label; None outside the labeled span."""
    entries = transcript.entries
    out = []
    idx = 0
    current = None
    first, last = entries[0][0], entries[-1][0]
    for frame in grid:
        while idx < len(entries) and entries[idx][0] <= frame:
            current = entries[idx][1]
            idx += 1
        out.append(current if first <= frame <= last else None)
    return out


def matrix_from_transcripts(
    transcripts: Sequence[ContextTranscript],
    labeler_ids: Optional[Sequence[str]] = None,
    slot: Optional[int] = None,
) -> AnnotationMatrix:
    """Units are the union of labeled frames; values are rendered states.

    With `slot` set, the value is that single state variable instead of
    the whole five-digit state.
    """
    if labeler_ids is None:
        labeler_ids = [f"annotator{i + 1}" for i in range(len(transcripts))]
    grid = sorted({frame for t in transcripts for frame in t.frames})
    columns = [_dense_values(t, grid) for t in transcripts]
    rows = []
    for i in range(len(grid)):
        row = []
        for col in columns:
            state = col[i]
            if state is None:
                row.append(None)
            elif slot is None:
                row.append(state.render())
            else:
                row.append(state[slot])
        rows.append(tuple(row))
    return AnnotationMatrix(tuple(labeler_ids), tuple(grid), tuple(rows))


def whole_state_alpha(transcripts: Sequence[ContextTranscript]) -> Optional[float]:
    return krippendorff_alpha(matrix_from_transcripts(transcripts))


def per_variable_alpha(
    transcripts: Sequence[ContextTranscript],
) -> tuple[Optional[float], dict]:
    """Alpha per state variable plus their unweighted mean.

    Variables with undefined alpha (a constant column, so zero expected
    disagreement) are reported as None and left out of the mean.
    """
    per_slot = {}
    for slot, name in enumerate(SLOT_NAMES):
        per_slot[name] = krippendorff_alpha(
            matrix_from_transcripts(transcripts, slot=slot)
        )
    defined = [a for a in per_slot.values() if a is not None]
    mean = sum(defined) / len(defined) if defined else None
    return mean, per_slot


def weighted_alpha(results: Sequence[tuple[Optional[float], int]]) -> Optional[float]:
    """Frame-count-weighted mean alpha across tasks; None entries skipped."""
    total = sum(frames for alpha, frames in results if alpha is not None)
    if total == 0:
        return None
    return (
        sum(alpha * frames for alpha, frames in results if alpha is not None) / total
    )


def align_to_union(
    transcripts: Sequence[ContextTranscript],
) -> list[ContextTranscript]:
    """Densify each transcript onto the union frame grid.

    States hold until the next label; frames before a transcript's first
    label are backfilled with its first state, frames after its last
    carry the last state forward.
    """
    grid = sorted({frame for t in transcripts for frame in t.frames})
    aligned = []
    for t in transcripts:
        dense = _dense_values(t, grid)
        first_state = t.entries[0][1]
        last_state = t.entries[-1][1]
        filled = []
        for frame, state in zip(grid, dense):
            if state is None:
                state = first_state if frame < t.entries[0][0] else last_state
            filled.append((frame, state))
        aligned.append(ContextTranscript(t.task, tuple(filled), t.label_rate))
    return aligned


def consensus_detailed(
    transcripts: Sequence[ContextTranscript],
) -> tuple[ContextTranscript, list[str]]:
    """Per-frame, per-variable majority vote across aligned transcripts.

    Ties keep the previous consensus value for that variable when it is
    among the tied candidates, otherwise the smallest code wins.
    """
    if len(transcripts) < 2:
        raise FewerThanTwoTranscripts("consensus needs at least two transcripts")
    task = transcripts[0].task
    if any(t.task is not task for t in transcripts):
        raise MisalignedTranscripts("transcripts are for different tasks")
    frames = transcripts[0].frames
    if any(t.frames != frames for t in transcripts):
        raise MisalignedTranscripts(
            "transcripts must share one frame grid; align_to_union can fix this"
        )
    spec = task_spec(task)
    warnings: list[str] = []
    entries = []
    previous: Optional[ContextState] = None
    for i, frame in enumerate(frames):
        values = []
        for slot in range(5):
            votes = Counter(t.entries[i][1][slot] for t in transcripts)
            top = max(votes.values())
            tied = sorted(v for v, c in votes.items() if c == top)
            if len(tied) == 1:
                values.append(tied[0])
            elif previous is not None and previous[slot] in tied:
                values.append(previous[slot])
            else:
                values.append(tied[0])
        state = ContextState(*values)
        if not spec.is_valid(state):
            warnings.append(f"frame {frame}: consensus state {state.render()} is invalid")
        previous = state
        entries.append((frame, state))
    return ContextTranscript(task, tuple(entries), transcripts[0].label_rate), warnings


def consensus(transcripts: Sequence[ContextTranscript]) -> ContextTranscript:
    return consensus_detailed(transcripts)[0]
