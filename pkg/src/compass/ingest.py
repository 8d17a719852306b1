"""Dataset plumbing: trial naming, transcript and kinematics IO, resampling.

On-disk layout is `<root>/<Task>/<kind>/<TrialId>.<ext>` with kinds
kinematics (csv), context, motion_primitives, and gestures (txt). Frame
images for the labeling service live under `<root>/<Task>/frames/<TrialId>/`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .context import TaskId, parse_mp, parse_state
from .errors import (
    IncompatibleRates,
    MalformedName,
    SeriesTooShort,
    TranscriptParseError,
)
from .transcripts import ContextTranscript, MPInterval, MPTranscript

KINDS = ("kinematics", "context", "motion_primitives", "gestures")
EXTENSIONS = {
    "kinematics": ".csv",
    "context": ".txt",
    "motion_primitives": ".txt",
    "gestures": ".txt",
}


class TrialId(NamedTuple):
    task: TaskId
    subject: int
    trial: int

    def render(self) -> str:
        return format_trial_id(self)

    @property
    def sort_key(self) -> tuple:
        return (self.task.value, self.subject, self.trial)


_TRIAL_RE = re.compile(r"^(?P<task>[A-Za-z_]+)_S(?P<subject>\d{2,})_T(?P<trial>\d{2,})$")


def format_trial_id(trial: TrialId) -> str:
    return f"{trial.task.file_name}_S{trial.subject:02d}_T{trial.trial:02d}"


def parse_trial_id(name: str) -> TrialId:
    m = _TRIAL_RE.match(name)
    if m is None:
        raise MalformedName(f"trial name {name!r} is not <Task>_S<nn>_T<nn>")
    task_name = m.group("task")
    for task in TaskId:
        if task.file_name == task_name:
            return TrialId(task, int(m.group("subject")), int(m.group("trial")))
    raise MalformedName(f"trial name {name!r} names no known task")


# ---------------------------------------------------------------------------
# Transcript files


def load_context_transcript(
    path: Path, task: TaskId, label_rate: int = 3
) -> ContextTranscript:
    """Read `<frame> <5-digit-state>` lines; frames must strictly increase."""
    entries = []
    prev = None
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise TranscriptParseError(f"expected '<frame> <state>', got {raw!r}", lineno)
        try:
            frame = int(parts[0])
        except ValueError:
            raise TranscriptParseError(f"bad frame index {parts[0]!r}", lineno) from None
        if prev is not None and frame <= prev:
            raise TranscriptParseError(
                f"frame {frame} does not increase past {prev}", lineno
            )
        prev = frame
        try:
            state = parse_state(parts[1], task)
        except Exception as exc:
            raise TranscriptParseError(str(exc), lineno) from exc
        entries.append((frame, state))
    if not entries:
        raise TranscriptParseError("no entries in context transcript")
    return ContextTranscript(task, tuple(entries), label_rate)


def save_context_transcript(transcript: ContextTranscript, path: Path) -> None:
    Path(path).write_text("\n".join(transcript.render_lines()) + "\n")


def load_mp_transcript(path: Path, sample_rate: int = 30) -> MPTranscript:
    """Read `<start> <end> <MP>` lines with exclusive end samples."""
    intervals = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(maxsplit=2)
        if len(parts) != 3:
            raise TranscriptParseError(f"expected '<start> <end> <MP>', got {raw!r}", lineno)
        try:
            start, end = int(parts[0]), int(parts[1])
        except ValueError:
            raise TranscriptParseError(f"bad sample bounds in {raw!r}", lineno) from None
        if end < start:
            raise TranscriptParseError(f"end {end} before start {start}", lineno)
        try:
            mp = parse_mp(parts[2])
        except TranscriptParseError as exc:
            raise TranscriptParseError(str(exc), lineno) from exc
        intervals.append(MPInterval(start, end, mp))
    return MPTranscript(tuple(intervals), sample_rate)


def save_mp_transcript(transcript: MPTranscript, path: Path) -> None:
    Path(path).write_text("\n".join(transcript.render_lines()) + "\n")


def load_gesture_transcript(path: Path) -> list[tuple[int, int, str]]:
    """JIGSAWS-style `<start> <end> <label>` rows."""
    rows = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(maxsplit=2)
        if len(parts) != 3:
            raise TranscriptParseError(f"expected '<start> <end> <label>', got {raw!r}", lineno)
        try:
            rows.append((int(parts[0]), int(parts[1]), parts[2]))
        except ValueError:
            raise TranscriptParseError(f"bad bounds in {raw!r}", lineno) from None
    return rows


def save_gesture_transcript(rows: list[tuple[int, int, str]], path: Path) -> None:
    Path(path).write_text(
        "\n".join(f"{a} {b} {label}" for a, b, label in rows) + "\n"
    )


# ---------------------------------------------------------------------------
# Kinematics

ARMS = ("left", "right")
_CHANNELS = (
    "pos_x", "pos_y", "pos_z",
    "vel_x", "vel_y", "vel_z",
    "rot_x", "rot_y", "rot_z", "rot_w",
    "gripper",
)
CHANNEL_NAMES = tuple(f"{arm}_{ch}" for arm in ARMS for ch in _CHANNELS)


@dataclass
class ArmKinematics:
    position: np.ndarray  # (n, 3)
    velocity: np.ndarray  # (n, 3)
    orientation: np.ndarray  # (n, 4) quaternion, unit norm
    gripper: np.ndarray  # (n,)

    def __len__(self) -> int:
        return len(self.position)

    def as_columns(self) -> np.ndarray:
        return np.column_stack(
            [self.position, self.velocity, self.orientation, self.gripper]
        )


@dataclass
class KinematicSeries:
    sample_rate: int
    left: ArmKinematics
    right: ArmKinematics

    def __post_init__(self):
        lengths = {
            len(arm.position): None for arm in (self.left, self.right)
        } | {len(arm.velocity): None for arm in (self.left, self.right)} | {
            len(arm.orientation): None for arm in (self.left, self.right)
        } | {len(arm.gripper): None for arm in (self.left, self.right)}
        if len(lengths) != 1:
            raise ValueError("all kinematic channels must have equal length")

    def __len__(self) -> int:
        return len(self.left)


def _normalize_quaternions(q: np.ndarray, lineno_hint: str) -> np.ndarray:
    norms = np.linalg.norm(q, axis=1)
    if np.any(norms == 0):
        raise TranscriptParseError(f"zero-norm quaternion in {lineno_hint}")
    return q / norms[:, None]


def save_kinematics(series: KinematicSeries, path: Path) -> None:
    table = np.column_stack([series.left.as_columns(), series.right.as_columns()])
    np.savetxt(
        path,
        table,
        delimiter=",",
        header=",".join(CHANNEL_NAMES),
        comments="",
        fmt="%.9g",
    )


def load_kinematics(path: Path, sample_rate: int = 30) -> KinematicSeries:
    """Read the comma-separated table; quaternions are normalized on load."""
    path = Path(path)
    with open(path) as fh:
        header = fh.readline().strip()
    if tuple(header.split(",")) != CHANNEL_NAMES:
        raise TranscriptParseError(f"unexpected kinematics header in {path.name}", 1)
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if table.shape[1] != len(CHANNEL_NAMES):
        raise TranscriptParseError(
            f"expected {len(CHANNEL_NAMES)} columns, found {table.shape[1]}"
        )
    arms = []
    for i, arm in enumerate(ARMS):
        block = table[:, i * 11 : (i + 1) * 11]
        arms.append(
            ArmKinematics(
                position=block[:, 0:3],
                velocity=block[:, 3:6],
                orientation=_normalize_quaternions(block[:, 6:10], f"{path.name} ({arm})"),
                gripper=block[:, 10],
            )
        )
    return KinematicSeries(sample_rate, arms[0], arms[1])


def resample(series: KinematicSeries, out_rate: int) -> KinematicSeries:
    """Integer-stride decimation down to out_rate."""
    if out_rate > series.sample_rate or series.sample_rate % out_rate != 0:
        raise IncompatibleRates(
            f"cannot resample {series.sample_rate} Hz to {out_rate} Hz by decimation"
        )
    stride = series.sample_rate // out_rate

    def pick(arm: ArmKinematics) -> ArmKinematics:
        return ArmKinematics(
            position=arm.position[::stride],
            velocity=arm.velocity[::stride],
            orientation=arm.orientation[::stride],
            gripper=arm.gripper[::stride],
        )

    return KinematicSeries(out_rate, pick(series.left), pick(series.right))


def derive_velocity(
    position: np.ndarray, rate: float, window: int = 5
) -> np.ndarray:
    """Velocity from position: central differences smoothed by a rolling
    average over `window` samples (shrunken at the edges)."""
    if window < 2 or window % 2 == 0:
        raise ValueError("window must be odd and at least 3")
    position = np.asarray(position, dtype=float)
    n = len(position)
    if n < window:
        raise SeriesTooShort(f"need at least {window} samples, got {n}")
    velocity = np.empty_like(position)
    velocity[1:-1] = (position[2:] - position[:-2]) * (rate / 2.0)
    velocity[0] = (position[1] - position[0]) * rate
    velocity[-1] = (position[-1] - position[-2]) * rate

    half = window // 2
    padded = np.concatenate([np.zeros((1,) + velocity.shape[1:]), np.cumsum(velocity, axis=0)])
    lo = np.maximum(np.arange(n) - half, 0)
    hi = np.minimum(np.arange(n) + half + 1, n)
    sums = padded[hi] - padded[lo]
    widths = (hi - lo).reshape((n,) + (1,) * (velocity.ndim - 1))
    return sums / widths


# ---------------------------------------------------------------------------
# Dataset scanning


@dataclass
class DatasetIndex:
    root: Path
    trials: dict = field(default_factory=dict)  # TrialId -> {kind: Path}
    findings: list = field(default_factory=list)

    def by_task(self) -> dict:
        out: dict[TaskId, list[TrialId]] = {}
        for trial in sorted(self.trials, key=lambda t: t.sort_key):
            out.setdefault(trial.task, []).append(trial)
        return out


def scan_dataset(root: Path) -> DatasetIndex:
    """Walk the layout and cross-link files by trial id.

    Findings cover unparseable names, trials filed under the wrong task
    directory, and label files with no kinematics (or vice versa).
    """
    root = Path(root)
    index = DatasetIndex(root=root)
    if not root.is_dir():
        index.findings.append(f"data root {root} is not a directory")
        return index
    task_dirs = {task.file_name: task for task in TaskId}
    for task_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        if task_dir.name == "sessions":
            continue
        task = task_dirs.get(task_dir.name)
        if task is None:
            index.findings.append(f"unknown task directory {task_dir.name}")
            continue
        for kind_dir in sorted(p for p in task_dir.iterdir() if p.is_dir()):
            if kind_dir.name == "frames":
                continue
            if kind_dir.name not in KINDS:
                index.findings.append(
                    f"{task_dir.name}: unknown kind directory {kind_dir.name}"
                )
                continue
            for file in sorted(kind_dir.iterdir()):
                if file.is_dir():
                    continue
                try:
                    trial = parse_trial_id(file.stem)
                except MalformedName:
                    index.findings.append(
                        f"{task_dir.name}/{kind_dir.name}: malformed trial name {file.name}"
                    )
                    continue
                if trial.task is not task:
                    index.findings.append(
                        f"{task_dir.name}/{kind_dir.name}: {file.stem} filed under wrong task"
                    )
                    continue
                index.trials.setdefault(trial, {})[kind_dir.name] = file
    for trial in sorted(index.trials, key=lambda t: t.sort_key):
        kinds = index.trials[trial]
        if "kinematics" in kinds and "context" not in kinds:
            index.findings.append(f"{trial.render()}: kinematics without context labels")
        if "context" in kinds and "kinematics" not in kinds:
            index.findings.append(f"{trial.render()}: context labels without kinematics")
    return index


def trial_path(root: Path, trial: TrialId, kind: str) -> Path:
    return (
        Path(root)
        / trial.task.file_name
        / kind
        / f"{trial.render()}{EXTENSIONS[kind]}"
    )
