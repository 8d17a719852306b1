import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import side_projection

from compass.context import IDLE_MP, TaskId, Verb, parse_state
from compass.errors import IncompatibleRates, Undecomposable
from compass.fsm import random_walk
from compass.transcripts import ContextTranscript, MPInterval, MPTranscript
from compass.translator import (
    per_sample_labels,
    split_sides,
    translate,
    upsample_hold,
)

S = TaskId.SUTURING


def st_(text, task=S):
    return parse_state(text, task)


def transcript(task, *pairs):
    return ContextTranscript(
        task, tuple((f, st_(s, task)) for f, s in pairs)
    )


def test_single_change_leading():
    t = transcript(S, (0, "00000"), (1, "02000"))
    out = translate(t, 30, "leading")
    rendered = [iv.render() for iv in out.entries]
    assert rendered == ["0 10 Touch(L, Needle)", "10 20 Idle"]


def test_single_entry_is_all_idle():
    t = transcript(S, (0, "00000"))
    out = translate(t, 30, "leading")
    assert [iv.render() for iv in out.entries] == ["0 10 Idle"]


def test_no_change_pair_extends_interval():
    t = transcript(S, (0, "00000"), (1, "00000"), (2, "02000"))
    out = translate(t, 30, "leading")
    assert [iv.render() for iv in out.entries] == [
        "0 20 Touch(L, Needle)",
        "20 30 Idle",
    ]


def test_trailing_mode_spans():
    t = transcript(S, (0, "00000"), (1, "00000"), (2, "02000"))
    out = translate(t, 30, "trailing")
    assert [iv.render() for iv in out.entries] == [
        "0 20 Idle",
        "20 30 Touch(L, Needle)",
    ]


def test_same_side_chain_subdivides_gap():
    t = transcript(S, (0, "00000"), (1, "20000"))
    out = translate(t, 30, "leading")
    assert [iv.render() for iv in out.entries] == [
        "0 5 Touch(L, Needle)",
        "5 10 Grasp(L, Needle)",
        "10 20 Idle",
    ]


def test_subdivision_remainder_goes_to_last():
    # 3 Hz to 33 Hz is ratio 11, which does not split evenly in two
    t = ContextTranscript(S, ((0, st_("00000")), (1, st_("20000"))))
    out = translate(t, 33, "leading")
    starts_ends = [(iv.start, iv.end) for iv in out.non_idle()]
    assert starts_ends == [(0, 5), (5, 11)]


def test_different_sides_share_the_gap():
    t = transcript(S, (0, "02000"), (1, "20030"))
    out = translate(t, 30, "leading")
    non_idle = [iv.render() for iv in out.non_idle()]
    assert non_idle == ["0 10 Grasp(L, Needle)", "0 10 Touch(R, Thread)"]


def test_translate_rejects_incompatible_rate():
    t = transcript(S, (0, "00000"))
    with pytest.raises(IncompatibleRates):
        translate(t, 20)


def test_translate_propagates_undecomposable_with_frame():
    t = transcript(S, (0, "00000"), (5, "22222"))
    with pytest.raises(Undecomposable) as err:
        translate(t, 30)
    assert err.value.frame == 5
    assert "frames 0->5" in str(err.value)


def test_leading_and_trailing_share_mp_multiset():
    for seed in range(5):
        walk = random_walk(TaskId.PEA_ON_A_PEG, 30, seed)
        lead = translate(walk, 30, "leading")
        trail = translate(walk, 30, "trailing")
        as_multiset = lambda t: sorted(iv.mp.render() for iv in t.non_idle())
        assert as_multiset(lead) == as_multiset(trail)


def test_split_sides_fills_idle():
    combined = MPTranscript(
        (MPInterval(0, 10, translate_mp("Touch(L, Needle)")),), 30
    )
    left, right = split_sides(combined, 20)
    assert [iv.render() for iv in left.entries] == [
        "0 10 Touch(L, Needle)",
        "10 20 Idle",
    ]
    assert [iv.render() for iv in right.entries] == ["0 20 Idle"]


def translate_mp(text):
    from compass.context import parse_mp

    return parse_mp(text)


def test_split_all_idle():
    combined = MPTranscript((MPInterval(0, 30, IDLE_MP),), 30)
    left, right = split_sides(combined, 30)
    assert [iv.render() for iv in left.entries] == ["0 30 Idle"]
    assert [iv.render() for iv in right.entries] == ["0 30 Idle"]


def _assert_tiles(transcript, total):
    cursor = 0
    for iv in transcript.entries:
        if iv.start == iv.end:
            continue
        assert iv.start == cursor
        cursor = iv.end
    assert cursor == total


@given(st.sampled_from(list(TaskId)), st.integers(0, 500))
@settings(max_examples=30)
def test_split_tiling_on_walks(task, seed):
    walk = random_walk(task, 25, seed)
    combined = translate(walk, 30, "leading")
    total = combined.total_samples
    left, right = split_sides(combined, total)
    _assert_tiles(left, total)
    _assert_tiles(right, total)
    # non-Idle multiset preserved across the split
    combined_mps = sorted(iv.render() for iv in combined.non_idle())
    split_mps = sorted(
        iv.render() for t in (left, right) for iv in t.non_idle()
    )
    assert combined_mps == split_mps
    # per-sample projection: each side covers each sample exactly once
    projection = side_projection(combined.entries, total)
    for side, side_t in (("L", left), ("R", right)):
        occupancy = side_projection(side_t.entries, total)
        for k in range(total):
            labels = occupancy[side][k]
            idle = sum(
                1
                for iv in side_t.entries
                if iv.mp.verb is Verb.IDLE and iv.start <= k < iv.end
            )
            assert len(labels) + idle == 1
            assert labels == projection[side][k]


def test_upsample_single_label():
    t = transcript(S, (0, "02000"))
    out = upsample_hold(t, 30)
    assert len(out) == 10
    assert all(s == st_("02000") for s in out)


def test_upsample_holds_until_next_label():
    t = transcript(S, (0, "00000"), (1, "02000"))
    out = upsample_hold(t, 30)
    assert [s.render() for s in out[:10]] == ["00000"] * 10
    assert [s.render() for s in out[10:]] == ["02000"] * 10


def test_upsample_backfills_before_first_frame():
    t = transcript(S, (2, "02000"), (3, "20000"))
    out = upsample_hold(t, 30)
    assert len(out) == 40
    assert out[0].render() == "02000"


@given(st.sampled_from(list(TaskId)), st.integers(0, 500))
@settings(max_examples=20)
def test_upsample_downsamples_back(task, seed):
    walk = random_walk(task, 12, seed)
    out = upsample_hold(walk, 30)
    for frame, state in walk.entries:
        assert out[frame * 10] == state


@given(st.sampled_from(list(TaskId)), st.integers(0, 500))
@settings(max_examples=20)
def test_split_preserves_per_sample_non_idle_counts(task, seed):
    walk = random_walk(task, 15, seed)
    combined = translate(walk, 30, "leading")
    total = combined.total_samples
    left, right = split_sides(combined, total)
    combined_proj = side_projection(combined.entries, total)
    for k in range(total):
        combined_count = len(combined_proj["L"][k]) + len(combined_proj["R"][k])
        split_count = sum(
            1
            for t in (left, right)
            for iv in t.non_idle()
            if iv.start <= k < iv.end
        )
        assert combined_count == split_count


def test_per_sample_labels_merges_overlaps():
    t = transcript(S, (0, "02000"), (1, "20030"))
    combined = translate(t, 30, "leading")
    labels = per_sample_labels(combined)
    assert labels[0] == "Grasp(L, Needle)+Touch(R, Thread)"
    assert labels[-1] == "Idle"


def test_translate_deterministic():
    walk = random_walk(TaskId.KNOT_TYING, 40, 11)
    a = translate(walk, 30, "leading")
    b = translate(walk, 30, "leading")
    assert a == b
