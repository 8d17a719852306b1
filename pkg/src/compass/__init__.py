"""Finite-state modeling and labeling toolkit for dry-lab surgical tasks.

Six benchtop tasks are modeled as finite state machines over a
five-variable context encoding. Context transcripts translate into
motion-primitive transcripts, annotator sets reduce to consensus with
Krippendorff's alpha agreement, and a local HTTP service hosts the
frame-by-frame labeling workflow.
"""

from .agreement import (
    AnnotationMatrix,
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
from .context import (
    ContextState,
    MotionPrimitive,
    ObjectCode,
    Side,
    TaskId,
    TaskSpec,
    TransitionRule,
    Verb,
    parse_mp,
    parse_state,
    parse_task,
    render_state,
    task_spec,
)
from .errors import CompassError
from .evaluation import accuracy, collapse_segments, edit_score, levenshtein
from .fsm import (
    ValidationReport,
    apply,
    decompose,
    decompose_detailed,
    random_walk,
    validate_transcript,
)
from .ingest import (
    KinematicSeries,
    TrialId,
    derive_velocity,
    format_trial_id,
    parse_trial_id,
    resample,
    scan_dataset,
)
from .transcripts import ContextTranscript, MPInterval, MPTranscript
from .translator import per_sample_labels, split_sides, translate, upsample_hold

__version__ = "0.1.0"

__all__ = [
    "AnnotationMatrix",
    "CompassError",
    "ContextState",
    "ContextTranscript",
    "KinematicSeries",
    "MPInterval",
    "MPTranscript",
    "MotionPrimitive",
    "ObjectCode",
    "Side",
    "TaskId",
    "TaskSpec",
    "TransitionRule",
    "TrialId",
    "ValidationReport",
    "Verb",
    "accuracy",
    "apply",
    "collapse_segments",
    "consensus",
    "consensus_detailed",
    "decompose",
    "decompose_detailed",
    "derive_velocity",
    "edit_score",
    "format_trial_id",
    "interpret_alpha",
    "krippendorff_alpha",
    "levenshtein",
    "matrix_from_transcripts",
    "nominal_distance",
    "parse_mp",
    "parse_state",
    "parse_task",
    "parse_trial_id",
    "per_sample_labels",
    "per_variable_alpha",
    "random_walk",
    "render_state",
    "resample",
    "scan_dataset",
    "split_sides",
    "task_spec",
    "translate",
    "upsample_hold",
    "validate_transcript",
    "weighted_alpha",
    "whole_state_alpha",
]
