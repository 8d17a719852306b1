"""Context transcripts to motion-primitive transcripts.

A context change observed between two label frames is explained by the
FSM decomposition; the resulting MPs are laid out over kinematic samples
either leading up to the change or trailing it, and left/right
transcripts are split out with Idle fill.
"""
from __future__ import annotations

from collections import OrderedDict
from typing import Optional

from .context import ContextState, IDLE_MP, MotionPrimitive, Side, Verb
from .errors import IncompatibleRates, Undecomposable
from .fsm import decompose_detailed
from .transcripts import ContextTranscript, MPInterval, MPTranscript

SPAN_MODES = ("leading", "trailing")


def _rate_ratio(transcript: ContextTranscript, sample_rate: int) -> int:
    if sample_rate % transcript.label_rate != 0 or sample_rate < transcript.label_rate:
        raise IncompatibleRates(
            f"sample rate {sample_rate} not divisible by label rate "
            f"{transcript.label_rate}"
        )
    return sample_rate // transcript.label_rate


def translate(
    transcript: ContextTranscript,
    sample_rate: int = 30,
    span_mode: str = "leading",
) -> MPTranscript:
    """Translate context labels into an MP transcript at sample rate.

    In `leading` mode an MP interval covers the samples from the
    previous change up to the change it causes; in `trailing` mode it
    covers the samples from its change to the next. Samples not covered
    by any change are Idle. When one gap holds several MPs of the same
    side they share the gap equally, in order, with remainder samples
    going to the last.
    """
    if span_mode not in SPAN_MODES:
        raise ValueError(f"span_mode must be one of {SPAN_MODES}")
    ratio = _rate_ratio(transcript, sample_rate)
    entries = transcript.entries
    if not entries:
        return MPTranscript((), sample_rate)
    total = (transcript.last_frame + 1) * ratio

    changes: list[tuple[int, tuple[MotionPrimitive, ...]]] = []
    for (f0, s0), (f1, s1) in zip(entries, entries[1:]):
        if s0 == s1:
            continue
        try:
            result = decompose_detailed(s0, s1, transcript.task)
        except Undecomposable as exc:
            raise Undecomposable(
                f"frames {f0}->{f1}: {exc}", frame=f1
            ) from exc
        changes.append((f1 * ratio, result.mps))

    intervals: list[MPInterval] = []
    if not changes:
        return MPTranscript((MPInterval(0, total, IDLE_MP),), sample_rate)

    for idx, (sample, mps) in enumerate(changes):
        if span_mode == "leading":
            start = changes[idx - 1][0] if idx > 0 else 0
            end = sample
        else:
            start = sample
            end = changes[idx + 1][0] if idx + 1 < len(changes) else total
        intervals.extend(_lay_out(mps, start, end))

    if span_mode == "leading":
        tail = changes[-1][0]
        if tail < total:
            intervals.append(MPInterval(tail, total, IDLE_MP))
    else:
        head = changes[0][0]
        if head > 0:
            intervals.append(MPInterval(0, head, IDLE_MP))
    return MPTranscript(tuple(intervals), sample_rate)


def _lay_out(
    mps: tuple[MotionPrimitive, ...], start: int, end: int
) -> list[MPInterval]:
    """Subdivide one gap among the MPs of a change, per side."""
    by_side: "OrderedDict[Side, list[MotionPrimitive]]" = OrderedDict()
    for mp in mps:
        by_side.setdefault(mp.side, []).append(mp)
    out = []
    for side_mps in by_side.values():
        count = len(side_mps)
        width = (end - start) // count
        cursor = start
        for i, mp in enumerate(side_mps):
            stop = end if i == count - 1 else cursor + width
            out.append(MPInterval(cursor, stop, mp))
            cursor = stop
    return out


def split_sides(
    transcript: MPTranscript, total_samples: int
) -> tuple[MPTranscript, MPTranscript]:
    """Separate left and right MPs, filling each side's gaps with Idle."""
    return (
        _one_side(transcript, Side.LEFT, total_samples),
        _one_side(transcript, Side.RIGHT, total_samples),
    )


def _one_side(transcript: MPTranscript, side: Side, total: int) -> MPTranscript:
    kept = [iv for iv in transcript.entries if iv.mp.side is side]
    kept.sort(key=lambda iv: (iv.start, iv.end))
    out: list[MPInterval] = []
    cursor = 0
    for iv in kept:
        if iv.start < cursor:
            raise ValueError(
                f"overlapping {side.value}-side intervals at sample {iv.start}"
            )
        if iv.start > cursor:
            out.append(MPInterval(cursor, iv.start, IDLE_MP))
        out.append(iv)
        cursor = max(cursor, iv.end)
    if cursor < total:
        out.append(MPInterval(cursor, total, IDLE_MP))
    return MPTranscript(tuple(out), transcript.sample_rate)


def upsample_hold(
    transcript: ContextTranscript, sample_rate: int = 30
) -> list[ContextState]:
    """Piecewise-constant per-sample states; labels persist until the next.

    Samples before the first label are backfilled with its state. Output
    length is (last_frame + 1) times the rate ratio.
    """
    ratio = _rate_ratio(transcript, sample_rate)
    entries = transcript.entries
    total = (transcript.last_frame + 1) * ratio
    out: list[ContextState] = []
    for idx, (frame, state) in enumerate(entries):
        if idx == 0 and frame > 0:
            out.extend([state] * (frame * ratio))
        stop = entries[idx + 1][0] * ratio if idx + 1 < len(entries) else total
        out.extend([state] * (stop - len(out)))
    return out


def per_sample_labels(
    transcript: MPTranscript, total_samples: Optional[int] = None
) -> list[str]:
    """One label per sample; overlapping sides merge into a joint label.

    Samples covered by nothing (possible only in malformed inputs)
    render as Idle.
    """
    total = transcript.total_samples if total_samples is None else total_samples
    active: list[list[str]] = [[] for _ in range(total)]
    for iv in transcript.entries:
        if iv.mp.verb is Verb.IDLE:
            continue
        for sample in range(iv.start, min(iv.end, total)):
            active[sample].append(iv.mp.render())
    return ["+".join(sorted(labels)) if labels else "Idle" for labels in active]
