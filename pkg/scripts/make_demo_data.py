#!/usr/bin/env python3
"""Build a synthetic dataset tree for trying the CLI and labeling service.

Creates context transcripts from random walks, their MP translations,
matching synthetic kinematics, and placeholder frame images, laid out as
`<root>/<Task>/<kind>/<TrialId>.<ext>` plus `<root>/<Task>/frames/<TrialId>/`.

Usage: python3 scripts/make_demo_data.py [root] [--trials 2] [--frames 30]
"""
import argparse
from pathlib import Path

import numpy as np

from compass.context import TaskId
from compass.fsm import random_walk
from compass.ingest import (
    ArmKinematics,
    KinematicSeries,
    TrialId,
    save_context_transcript,
    save_kinematics,
    save_mp_transcript,
    trial_path,
)
from compass.translator import translate

# 1x1 gray PNG; stands in for extracted video frames
PNG = bytes.fromhex(
    "89504e470d0a1a0a0000000d4948445200000001000000010806000000"
    "1f15c4890000000d49444154789c6260606060000000050001a5f645400000"
    "000049454e44ae426082"
)


def synth_kinematics(samples: int, seed: int) -> KinematicSeries:
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, samples / 30.0, samples)

    def arm(phase: float) -> ArmKinematics:
        position = np.column_stack(
            [np.sin(t + phase), np.cos(t + phase), 0.1 * t]
        ) + 0.01 * rng.normal(size=(samples, 3))
        velocity = np.gradient(position, axis=0) * 30.0
        orientation = rng.normal(size=(samples, 4)) + 2.0
        gripper = (np.sin(3 * t + phase) > 0).astype(float)
        return ArmKinematics(position, velocity, orientation, gripper)

    return KinematicSeries(30, arm(0.0), arm(1.0))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("root", nargs="?", type=Path, default=Path("demo_data"))
    parser.add_argument("--trials", type=int, default=2)
    parser.add_argument("--frames", type=int, default=30)
    args = parser.parse_args()

    for task in TaskId:
        for trial_num in range(1, args.trials + 1):
            trial = TrialId(task, 1, trial_num)
            seed = hash((task.value, trial_num)) % (2**31)
            walk = random_walk(task, args.frames, seed)

            ctx_path = trial_path(args.root, trial, "context")
            ctx_path.parent.mkdir(parents=True, exist_ok=True)
            save_context_transcript(walk, ctx_path)

            mpt = translate(walk, 30, "leading")
            mp_path = trial_path(args.root, trial, "motion_primitives")
            mp_path.parent.mkdir(parents=True, exist_ok=True)
            save_mp_transcript(mpt, mp_path)

            kin_path = trial_path(args.root, trial, "kinematics")
            kin_path.parent.mkdir(parents=True, exist_ok=True)
            save_kinematics(synth_kinematics(mpt.total_samples, seed), kin_path)

            frames_dir = args.root / task.file_name / "frames" / trial.render()
            frames_dir.mkdir(parents=True, exist_ok=True)
            for k in range(args.frames):
                (frames_dir / f"frame_{k:05d}.png").write_bytes(PNG)
    print(f"demo data written under {args.root}")


if __name__ == "__main__":
    main()
