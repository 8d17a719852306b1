"""Sequence comparison metrics for label transcripts."""
from __future__ import annotations

from typing import Sequence

from .errors import EmptyTruth, LengthMismatch


def accuracy(truth: Sequence, pred: Sequence) -> float:
    """Ratio of exactly matching samples."""
    if len(truth) != len(pred):
        raise LengthMismatch(f"lengths differ: {len(truth)} vs {len(pred)}")
    if not truth:
        raise LengthMismatch("empty label sequences")
    hits = sum(1 for t, p in zip(truth, pred) if t == p)
    return hits / len(truth)


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Edit distance: insertions, deletions, and replacements."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, item_a in enumerate(a, start=1):
        current = [i]
        for j, item_b in enumerate(b, start=1):
            if item_a == item_b:
                current.append(previous[j - 1])
            else:
                current.append(1 + min(previous[j - 1], previous[j], current[-1]))
        previous = current
    return previous[-1]


def collapse_segments(labels: Sequence) -> list:
    """Merge consecutive duplicate labels into one segment label each."""
    out = []
    for label in labels:
        if not out or out[-1] != label:
            out.append(label)
    return out


def edit_score(truth: Sequence, pred: Sequence) -> float:
    """100 * (1 - d / max(|G|, |P|)) over duplicate-collapsed segments."""
    if not truth:
        raise EmptyTruth("ground truth sequence is empty")
    g = collapse_segments(truth)
    p = collapse_segments(pred)
    distance = levenshtein(g, p)
    return 100.0 * (1.0 - distance / max(len(g), len(p)))
