"""Timestamped label sequences.

Context transcripts index states by frame at the label rate (3 Hz);
MP transcripts are half-open sample intervals at the kinematic sample
rate (30 Hz).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .context import ContextState, MotionPrimitive, Side, TaskId, Verb, task_spec, valid_states
from .errors import NonMonotonicFrames


@dataclass(frozen=True)
class ContextTranscript:
    task: TaskId
    entries: tuple[tuple[int, ContextState], ...]
    label_rate: int = 3

    def __post_init__(self):
        prev = None
        states = valid_states(self.task)
        for frame, state in self.entries:
            if prev is not None and frame <= prev:
                raise NonMonotonicFrames(
                    f"frame {frame} not greater than previous frame {prev}"
                )
            prev = frame
            if state not in states:
                task_spec(self.task).validate_values(tuple(state))

    @property
    def frames(self) -> tuple[int, ...]:
        return tuple(f for f, _ in self.entries)

    @property
    def states(self) -> tuple[ContextState, ...]:
        return tuple(s for _, s in self.entries)

    @property
    def last_frame(self) -> int:
        return self.entries[-1][0]

    def render_lines(self) -> list[str]:
        return [f"{frame} {state.render()}" for frame, state in self.entries]

    @staticmethod
    def from_states(
        task: TaskId,
        states: Iterable[ContextState],
        start_frame: int = 0,
        label_rate: int = 3,
    ) -> "ContextTranscript":
        entries = tuple(
            (start_frame + i, state) for i, state in enumerate(states)
        )
        return ContextTranscript(task, entries, label_rate)


@dataclass(frozen=True)
class MPInterval:
    start: int
    end: int  # exclusive
    mp: MotionPrimitive

    def render(self) -> str:
        return f"{self.start} {self.end} {self.mp.render()}"


def _interval_sort_key(iv: MPInterval) -> tuple:
    side = iv.mp.side
    side_rank = 0 if side is Side.LEFT else 1 if side is Side.RIGHT else 2
    return (iv.start, iv.end, side_rank, iv.mp.render())


@dataclass(frozen=True)
class MPTranscript:
    entries: tuple[MPInterval, ...]
    sample_rate: int = 30

    def __post_init__(self):
        object.__setattr__(
            self, "entries", tuple(sorted(self.entries, key=_interval_sort_key))
        )

    @property
    def total_samples(self) -> int:
        return max((iv.end for iv in self.entries), default=0)

    def side_entries(self, side: Optional[Side]) -> tuple[MPInterval, ...]:
        if side is None:
            return tuple(iv for iv in self.entries if iv.mp.verb is Verb.IDLE)
        return tuple(iv for iv in self.entries if iv.mp.side is side)

    def non_idle(self) -> tuple[MPInterval, ...]:
        return tuple(iv for iv in self.entries if iv.mp.verb is not Verb.IDLE)

    def render_lines(self) -> list[str]:
        return [iv.render() for iv in self.entries]
