import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import alpha_brute_force

from compass.agreement import (
    AnnotationMatrix,
    align_to_union,
    consensus,
    consensus_detailed,
    interpret_alpha,
    krippendorff_alpha,
    matrix_from_transcripts,
    nominal_distance,
    per_variable_alpha,
    weighted_alpha,
    whole_state_alpha,
)
from compass.context import TaskId, parse_state
from compass.errors import (
    FewerThanTwoTranscripts,
    MisalignedTranscripts,
    NoPairableUnits,
)
from compass.fsm import random_walk
from compass.transcripts import ContextTranscript

S = TaskId.SUTURING


def matrix(rows, labelers=None):
    labelers = labelers or tuple(f"a{i}" for i in range(len(rows[0])))
    units = tuple(range(len(rows)))
    return AnnotationMatrix(tuple(labelers), units, tuple(tuple(r) for r in rows))


def test_nominal_distance():
    assert nominal_distance("20000", "20000") == 0
    assert nominal_distance("20000", "20001") == 1
    for a, b in [(1, 2), ("x", "y"), (0, 0)]:
        assert nominal_distance(a, b) == nominal_distance(b, a)


def test_alpha_fixture_two_labelers_three_units():
    # frozen from the brute-force oracle: alpha = 4/9
    rows = [(1, 1), (1, 2), (2, 2)]
    expected = alpha_brute_force([list(r) for r in rows])
    assert expected == pytest.approx(4 / 9, abs=1e-12)
    assert krippendorff_alpha(matrix(rows)) == pytest.approx(expected, abs=1e-9)


def test_alpha_identical_labelers():
    rows = [(1, 1), (2, 2), (3, 3), (1, 1)]
    assert krippendorff_alpha(matrix(rows)) == pytest.approx(1.0, abs=1e-12)


def test_alpha_undefined_when_all_values_identical():
    rows = [(1, 1), (1, 1)]
    assert krippendorff_alpha(matrix(rows)) is None


def test_alpha_requires_pairable_units():
    rows = [(1, None), (None, 2)]
    with pytest.raises(NoPairableUnits):
        krippendorff_alpha(matrix(rows))


def test_single_labeler_units_are_inert():
    rows = [(1, 1), (1, 2), (2, 2)]
    base = krippendorff_alpha(matrix(rows))
    extended = rows + [(1, None), (None, 2), (2, None)]
    assert krippendorff_alpha(matrix(extended)) == pytest.approx(base, abs=1e-12)


def test_alpha_matches_oracle_with_missing_cells():
    rng = random.Random(5)
    for _ in range(100):
        labelers = rng.randint(2, 5)
        units = rng.randint(2, 30)
        rows = []
        for _ in range(units):
            rows.append(
                tuple(
                    rng.choice([None, 1, 2, 3]) if rng.random() < 0.3 else rng.randint(1, 3)
                    for _ in range(labelers)
                )
            )
        unit_lists = [[v for v in row if v is not None] for row in rows]
        if not any(len(vs) >= 2 for vs in unit_lists):
            continue
        expected = alpha_brute_force(unit_lists)
        got = krippendorff_alpha(matrix(rows))
        if expected is None:
            assert got is None
        else:
            assert got == pytest.approx(expected, abs=1e-9)


@st.composite
def fixed_width_rows(draw):
    width = draw(st.integers(2, 4))
    return draw(
        st.lists(
            st.lists(st.integers(1, 4), min_size=width, max_size=width),
            min_size=2,
            max_size=12,
        )
    )


@given(fixed_width_rows(), st.randoms())
@settings(max_examples=40)
def test_alpha_invariances(rows, rnd):
    base = krippendorff_alpha(matrix(rows))
    mapping = {1: "w", 2: "x", 3: "y", 4: "z"}
    relabeled = [[mapping[v] for v in row] for row in rows]
    shuffled_units = list(rows)
    rnd.shuffle(shuffled_units)
    for variant in (relabeled, shuffled_units):
        got = krippendorff_alpha(matrix(variant))
        if base is None:
            assert got is None
        else:
            assert got == pytest.approx(base, abs=1e-9)


def test_alpha_labeler_permutation_invariance():
    rows = [(1, 2, 1), (2, 2, None), (1, None, 3), (3, 3, 3)]
    permuted = [(r[2], r[0], r[1]) for r in rows]
    assert krippendorff_alpha(matrix(rows)) == pytest.approx(
        krippendorff_alpha(matrix(permuted)), abs=1e-12
    )


def test_interpret_alpha_bands():
    assert interpret_alpha(0.92) == "near-perfect"
    assert interpret_alpha(0.84) == "near-perfect"
    assert interpret_alpha(0.7) == "substantial"
    assert interpret_alpha(0.6) == "substantial"
    assert interpret_alpha(0.3) == "weak"
    assert interpret_alpha(0.0) == "chance"
    assert interpret_alpha(-0.3) == "pronounced disagreement"


def test_weighted_alpha():
    assert weighted_alpha([(0.8, 100), (0.6, 300)]) == pytest.approx(0.65)
    assert weighted_alpha([(None, 50), (0.5, 50)]) == pytest.approx(0.5)
    assert weighted_alpha([(None, 10)]) is None


def transcript(states, task=S, frames=None):
    parsed = [parse_state(s, task) for s in states]
    if frames is None:
        frames = range(len(parsed))
    return ContextTranscript(task, tuple(zip(frames, parsed)))


def test_matrix_from_transcripts_uses_hold_and_missing():
    a = transcript(["00000", "02000"], frames=[0, 2])
    b = transcript(["00000", "02000", "20000"], frames=[0, 2, 3])
    m = matrix_from_transcripts([a, b])
    assert m.units == (0, 2, 3)
    # a has no frame 3 label: outside its span, missing
    assert m.values[2] == (None, "20000")


def test_whole_state_alpha_identical_transcripts():
    t = transcript(["00000", "02000", "20000"])
    assert whole_state_alpha([t, t]) == pytest.approx(1.0)
    mean, per_slot = per_variable_alpha([t, t])
    assert mean == pytest.approx(1.0)


def test_modes_differ_on_single_variable_disagreement():
    # disagreement confined to right_contact while left_contact varies in
    # lockstep: per-variable credits the agreeing slot, whole-state does not
    a = transcript(["00000", "02030", "00000", "02020"])
    b = transcript(["00000", "02020", "00000", "02030"])
    whole = whole_state_alpha([a, b])
    mean, per_slot = per_variable_alpha([a, b])
    expected_whole = alpha_brute_force(
        [["00000", "00000"], ["02030", "02020"], ["00000", "00000"], ["02020", "02030"]]
    )
    assert whole == pytest.approx(expected_whole, abs=1e-9)
    expected_rc = alpha_brute_force([[0, 0], [3, 2], [0, 0], [2, 3]])
    assert per_slot["right_contact"] == pytest.approx(expected_rc, abs=1e-9)
    assert per_slot["left_contact"] == pytest.approx(1.0, abs=1e-12)
    assert mean == pytest.approx((1.0 + expected_rc) / 2, abs=1e-9)
    assert whole != mean


def test_constant_slot_never_lowers_per_variable_mean():
    # progress is constant for both annotators: its alpha is undefined and
    # must be excluded from the mean rather than dragging it down
    a = transcript(["00000", "02000", "00000", "03000"])
    b = transcript(["00000", "02000", "00000", "02000"])
    mean, per_slot = per_variable_alpha([a, b])
    assert per_slot["progress"] is None
    defined = [v for v in per_slot.values() if v is not None]
    assert mean == pytest.approx(sum(defined) / len(defined), abs=1e-12)


def test_consensus_majority_per_variable():
    a = transcript(["20000"])
    b = transcript(["20000"])
    c = transcript(["00000"])
    result = consensus([a, b, c])
    assert result.states[0].render() == "20000"


def test_consensus_unanimous():
    t = transcript(["02000", "20000"])
    assert consensus([t, t, t]) == t


def test_consensus_three_way_tie_keeps_previous():
    a = transcript(["02000", "02000"])
    b = transcript(["02000", "03000"])
    c = transcript(["02000", "04000"])
    result = consensus([a, b, c])
    # frame 1 left_contact votes 2/3/4 tie; previous consensus was 2
    assert result.states[1].render() == "02000"


def test_consensus_tie_without_previous_takes_smallest():
    a = transcript(["03000"])
    b = transcript(["02000"])
    result = consensus([a, b])
    assert result.states[0].render() == "02000"


def test_consensus_duplicated_transcript_is_identity():
    walk = random_walk(TaskId.PEG_TRANSFER, 15, 9)
    assert consensus([walk, walk]) == walk


def test_consensus_needs_two_transcripts():
    with pytest.raises(FewerThanTwoTranscripts):
        consensus([transcript(["00000"])])


def test_consensus_rejects_misaligned_frames():
    a = transcript(["00000", "02000"])
    b = transcript(["00000", "02000"], frames=[0, 5])
    with pytest.raises(MisalignedTranscripts):
        consensus([a, b])


def test_consensus_rejects_mixed_tasks():
    a = transcript(["00000"])
    b = transcript(["00000"], task=TaskId.KNOT_TYING)
    with pytest.raises(MisalignedTranscripts):
        consensus([a, b])


def test_align_to_union_backfills_and_holds():
    a = transcript(["02000", "20000"], frames=[2, 4])
    b = transcript(["00000", "03000"], frames=[0, 3])
    aligned = align_to_union([a, b])
    assert aligned[0].frames == (0, 2, 3, 4)
    assert [s.render() for s in aligned[0].states] == [
        "02000", "02000", "02000", "20000",
    ]
    assert [s.render() for s in aligned[1].states] == [
        "00000", "00000", "03000", "03000",
    ]
    result, warnings = consensus_detailed(aligned)
    assert warnings == []
