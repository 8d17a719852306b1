"""Context encoding and task models for six dry-lab surgical tasks.

A context state is five digits: what the left grasper holds and touches,
what the right grasper holds and touches, and a task-progress value.
Each task has an object vocabulary, a progress domain, and a table of
transition rules. Together these define the task as a finite state
machine whose transition labels are motion primitives.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from itertools import product
from typing import NamedTuple, Optional

from .errors import CodeOutOfVocabulary, MalformedState, TranscriptParseError, UnknownTask

LEFT_HOLD, LEFT_CONTACT, RIGHT_HOLD, RIGHT_CONTACT, PROGRESS = range(5)
SLOT_NAMES = ("left_hold", "left_contact", "right_hold", "right_contact", "progress")

# Subject marker for rules where the acting tool is the grasper itself.
GRASPER = "grasper"

# Wildcard slot in a pattern ("X" in the rule tables).
ANY = None
# Constrained wildcard: any value greater than zero ("b" in the rule tables).
POSITIVE = "b"


class TaskId(Enum):
    SUTURING = "Suturing"
    NEEDLE_PASSING = "Needle_Passing"
    KNOT_TYING = "Knot_Tying"
    PEG_TRANSFER = "Peg_Transfer"
    POST_AND_SLEEVE = "Post_and_Sleeve"
    PEA_ON_A_PEG = "Pea_on_a_Peg"

    @property
    def file_name(self) -> str:
        return self.value

    @property
    def abbrev(self) -> str:
        return _ABBREVS[self]


_ABBREVS = {
    TaskId.SUTURING: "S",
    TaskId.NEEDLE_PASSING: "NP",
    TaskId.KNOT_TYING: "KT",
    TaskId.PEG_TRANSFER: "PT",
    TaskId.POST_AND_SLEEVE: "PaS",
    TaskId.PEA_ON_A_PEG: "PoaP",
}


def parse_task(text: str) -> TaskId:
    """Resolve a task from its file name, abbreviation, or enum name."""
    for task in TaskId:
        if text in (task.value, task.abbrev, task.name):
            return task
    lowered = text.lower().replace(" ", "_").replace("-", "_")
    for task in TaskId:
        if lowered in (task.value.lower(), task.abbrev.lower(), task.name.lower()):
            return task
    raise UnknownTask(f"unknown task {text!r}")


class ContextState(NamedTuple):
    """Five-variable context snapshot; renders as five digit characters."""

    left_hold: int
    left_contact: int
    right_hold: int
    right_contact: int
    progress: int

    def render(self) -> str:
        return "".join(str(v) for v in self)


class ObjectCode(NamedTuple):
    code: int
    name: str


NOTHING = ObjectCode(0, "nothing")


class Verb(Enum):
    TOUCH = "Touch"
    UNTOUCH = "Untouch"
    GRASP = "Grasp"
    RELEASE = "Release"
    PUSH = "Push"
    PULL = "Pull"
    IDLE = "Idle"


class Side(Enum):
    LEFT = "L"
    RIGHT = "R"


def _title(name: str) -> str:
    return name[:1].upper() + name[1:]


@dataclass(frozen=True)
class MotionPrimitive:
    """One atomic action: verb, acting side, acting subject, and target.

    `subject` is the acting tool: the literal GRASPER, or the name of a
    held object for task rules where that object does the touching or
    pushing. Idle carries no side, subject, or target. `constraints`
    (functional and safety requirements on execution) is carried for
    interface completeness and is always empty here; constraint checking
    is out of scope.
    """

    verb: Verb
    side: Optional[Side] = None
    subject: Optional[str] = None
    target: Optional[str] = None
    constraints: tuple = ()

    def render(self) -> str:
        if self.verb is Verb.IDLE:
            return "Idle"
        name = _title(self.target or "")
        if self.side is None:
            return f"{self.verb.value}({name})"
        return f"{self.verb.value}({self.side.value}, {name})"

    def same_action(self, other: "MotionPrimitive") -> bool:
        """Equality on the rendered fields only (verb, side, target)."""
        return (
            self.verb is other.verb
            and self.side is other.side
            and self.target == other.target
        )


IDLE_MP = MotionPrimitive(Verb.IDLE)

_MP_RE = re.compile(
    r"^(Touch|Untouch|Grasp|Release|Push|Pull)\((?:(L|R), )?([A-Za-z]+)\)$"
)


def parse_mp(text: str) -> MotionPrimitive:
    """Parse the rendered form, e.g. ``Grasp(L, Needle)`` or ``Idle``."""
    if text == "Idle":
        return IDLE_MP
    m = _MP_RE.match(text)
    if m is None:
        raise TranscriptParseError(f"malformed motion primitive {text!r}")
    side = Side(m.group(2)) if m.group(2) else None
    return MotionPrimitive(Verb(m.group(1)), side, None, m.group(3).lower())


def parse_pattern(text: str) -> tuple:
    """Turn a table pattern like ``X0XX`` or ``1XXXb`` into a 5-slot tuple.

    Four-character patterns (general rules) leave the progress slot as a
    wildcard.
    """
    if len(text) == 4:
        text += "X"
    if len(text) != 5:
        raise ValueError(f"pattern must have 4 or 5 slots: {text!r}")
    slots = []
    for ch in text:
        if ch == "X":
            slots.append(ANY)
        elif ch == "b":
            slots.append(POSITIVE)
        else:
            slots.append(int(ch))
    return tuple(slots)


def render_pattern(pattern: tuple) -> str:
    return "".join(
        "X" if p is ANY else "b" if p is POSITIVE else str(p) for p in pattern
    )


@dataclass(frozen=True)
class TransitionRule:
    """One directed transition of a task FSM.

    `before`/`after` use ANY as the wildcard; POSITIVE in `before`
    matches any nonzero value. Slots that are wildcards in `after` pass
    through unchanged. Table rows printed with a two-headed arrow become
    two directed rules (direction 1 is the reversed copy). Rows that
    label a transition with two simultaneous primitives keep both in
    `mps`.
    """

    mps: tuple[MotionPrimitive, ...]
    before: tuple
    after: tuple
    table: str  # "general" or "task"
    row: int  # row index within its table
    object_code: int = 0  # instantiated object for general rows
    direction: int = 0
    subject_code: Optional[int] = None  # derive MP sides from this held object

    def matches(self, state) -> bool:
        for pat, val in zip(self.before, state):
            if pat is ANY:
                continue
            if pat is POSITIVE:
                if val <= 0:
                    return False
            elif pat != val:
                return False
        return True

    def apply_to(self, state) -> ContextState:
        return ContextState(
            *(val if pat is ANY else pat for pat, val in zip(self.after, state))
        )

    def change_signatures(self, progress_values) -> list[tuple]:
        """Concrete (slot, from, to) signatures this rule can produce.

        POSITIVE slots expand over every nonzero progress value so the
        signatures can key an exact-match index.
        """
        fixed = []
        expand_slot = None
        for slot in range(5):
            if self.after[slot] is ANY:
                continue
            frm = self.before[slot]
            if frm is POSITIVE:
                expand_slot = slot
            elif frm != self.after[slot]:
                # slots the after pattern merely re-asserts are not changes
                fixed.append((slot, frm, self.after[slot]))
        if expand_slot is None:
            return [tuple(fixed)]
        sigs = []
        for frm in sorted(v for v in progress_values if v > 0):
            sig = sorted(fixed + [(expand_slot, frm, self.after[expand_slot])])
            sigs.append(tuple(sig))
        return sigs

    def resolve_mps(self, state) -> tuple[tuple[MotionPrimitive, ...], list[str]]:
        """Concrete MPs for an application at `state`.

        Rules whose acting tool is a held object (subject_code set) get
        their side from whichever hold slot carries that object, falling
        back to contact slots and finally to the left side with a
        warning.
        """
        if self.subject_code is None:
            return self.mps, []
        code = self.subject_code
        warnings = []
        if state[LEFT_HOLD] == code and state[RIGHT_HOLD] == code:
            side = Side.LEFT
            warnings.append(
                f"both graspers hold object {code} at {ContextState(*state).render()}; "
                f"side of {self.mps[0].verb.value} defaulted to L"
            )
        elif state[LEFT_HOLD] == code:
            side = Side.LEFT
        elif state[RIGHT_HOLD] == code:
            side = Side.RIGHT
        elif state[LEFT_CONTACT] == code:
            side = Side.LEFT
        elif state[RIGHT_CONTACT] == code:
            side = Side.RIGHT
        else:
            side = Side.LEFT
            warnings.append(
                f"no grasper holds object {code} at {ContextState(*state).render()}; "
                f"side of {self.mps[0].verb.value} defaulted to L"
            )
        return tuple(replace(mp, side=side) for mp in self.mps), warnings

    @property
    def group(self) -> int:
        """Ordering group: 0 left-hand, 1 right-hand, 2 progress rules."""
        if self.after[PROGRESS] is not ANY:
            return 2
        return 0 if self.mps[0].side is Side.LEFT else 1

    @property
    def sort_key(self) -> tuple:
        return (
            self.group,
            0 if self.table == "general" else 1,
            self.row,
            self.object_code,
            self.direction,
        )

    def describe(self) -> str:
        mps = " ".join(mp.render() for mp in self.mps)
        return f"{mps}: {render_pattern(self.before)} -> {render_pattern(self.after)}"


@dataclass(frozen=True, eq=False)
class TaskSpec:
    """Object vocabulary, progress domain, and full directed rule set."""

    task: TaskId
    vocabulary: tuple[ObjectCode, ...]
    progress_domain: dict
    rules: tuple[TransitionRule, ...]

    def __post_init__(self):
        codes = frozenset(obj.code for obj in self.vocabulary) | {0}
        slot_values = (
            codes,
            codes,
            codes,
            codes,
            frozenset(self.progress_domain),
        )
        object.__setattr__(self, "slot_values", slot_values)
        names = {0: NOTHING.name}
        names.update({obj.code: obj.name for obj in self.vocabulary})
        object.__setattr__(self, "_names", names)

    def object_name(self, code: int) -> str:
        return self._names[code]

    def progress_name(self, value: int) -> str:
        return self.progress_domain[value]

    @property
    def general_rules(self) -> tuple[TransitionRule, ...]:
        return tuple(r for r in self.rules if r.table == "general")

    @property
    def task_rules(self) -> tuple[TransitionRule, ...]:
        return tuple(r for r in self.rules if r.table == "task")

    @property
    def general_row_count(self) -> int:
        return len({r.row for r in self.general_rules})

    @property
    def task_row_count(self) -> int:
        return len({r.row for r in self.task_rules})

    def is_valid(self, state) -> bool:
        return state in valid_states(self.task)

    def validate_values(self, values: tuple) -> ContextState:
        for slot, value in enumerate(values):
            if value not in self.slot_values[slot]:
                raise CodeOutOfVocabulary(
                    f"value {value} not valid for {SLOT_NAMES[slot]} in "
                    f"{self.task.value}",
                    slot=SLOT_NAMES[slot],
                    value=value,
                )
        return ContextState(*values)


def parse_state(text: str, task: TaskId) -> ContextState:
    """Parse a five-digit context string, validating against the task."""
    if len(text) != 5 or any(ch not in "0123456789" for ch in text):
        raise MalformedState(f"expected exactly 5 digits, got {text!r}")
    return task_spec(task).validate_values(tuple(int(ch) for ch in text))


def render_state(state: ContextState) -> str:
    return state.render()


ALL_NONE = ContextState(0, 0, 0, 0, 0)


# ---------------------------------------------------------------------------
# Rule tables.
#
# The object-code assignment below is a configuration table, not ground
# truth: 0 always means "nothing", and 1=block/sleeve/pea, 2=needle,
# 3=thread, 4=fabric, 5=ring. Renumbering or extending a task's object
# set only touches these dicts.

_VOCABULARIES = {
    TaskId.SUTURING: (ObjectCode(2, "needle"), ObjectCode(3, "thread"), ObjectCode(4, "fabric")),
    TaskId.NEEDLE_PASSING: (ObjectCode(2, "needle"), ObjectCode(3, "thread"), ObjectCode(5, "ring")),
    TaskId.KNOT_TYING: (ObjectCode(2, "needle"), ObjectCode(3, "thread")),
    TaskId.PEG_TRANSFER: (ObjectCode(1, "block"),),
    TaskId.POST_AND_SLEEVE: (ObjectCode(1, "sleeve"),),
    TaskId.PEA_ON_A_PEG: (ObjectCode(1, "pea"),),
}

_PROGRESS_DOMAINS = {
    TaskId.SUTURING: {0: "not touching", 1: "touching", 2: "in"},
    TaskId.NEEDLE_PASSING: {0: "not touching", 1: "touching", 2: "in"},
    TaskId.KNOT_TYING: {0: "none", 1: "wrapped", 2: "loose", 3: "tight"},
    TaskId.PEG_TRANSFER: {0: "off", 1: "on"},
    TaskId.POST_AND_SLEEVE: {0: "off", 1: "on"},
    TaskId.PEA_ON_A_PEG: {0: "none", 1: "in cup", 2: "stuck", 3: "not stuck", 4: "on peg"},
}

# General rules, one row per (verb, side), instantiated per vocabulary
# object. The operational grasp/release patterns pin the contact slot:
# grasping zeroes the contact (hold subsumes contact) and releasing
# restores it, which keeps every rule's wildcard slots aligned between
# before and after and makes replay deterministic.
_GENERAL_ROWS = (
    (Verb.TOUCH, Side.LEFT, "X0XX", "XaXX"),
    (Verb.TOUCH, Side.RIGHT, "XXX0", "XXXa"),
    (Verb.GRASP, Side.LEFT, "0aXX", "a0XX"),
    (Verb.GRASP, Side.RIGHT, "XX0a", "XXa0"),
    (Verb.RELEASE, Side.LEFT, "a0XX", "0aXX"),
    (Verb.RELEASE, Side.RIGHT, "XXa0", "XX0a"),
    (Verb.UNTOUCH, Side.LEFT, "XaXX", "X0XX"),
    (Verb.UNTOUCH, Side.RIGHT, "XXXa", "XXX0"),
)


class _TaskRow(NamedTuple):
    mps: tuple
    before: str
    after: str
    bidirectional: bool = False
    subject_code: Optional[int] = None


def _mp(verb, side, subject, target):
    return MotionPrimitive(verb, side, subject, target)


def _needle_driver_rows(target: str) -> tuple[_TaskRow, ...]:
    # Suturing and Needle Passing share one block; the needle (2) is the
    # acting tool and the target is the fabric or the ring.
    return (
        _TaskRow((_mp(Verb.TOUCH, Side.LEFT, "needle", target),), "2XXX0", "2XXX1"),
        _TaskRow((_mp(Verb.TOUCH, Side.RIGHT, "needle", target),), "XX2X0", "XX2X1"),
        _TaskRow((_mp(Verb.PUSH, Side.LEFT, "needle", target),), "2XXX1", "2XXX2"),
        _TaskRow((_mp(Verb.PUSH, Side.RIGHT, "needle", target),), "XX2X1", "XX2X2"),
        _TaskRow((_mp(Verb.PULL, Side.LEFT, "needle", "thread"),), "2XXX2", "2XXX0"),
        _TaskRow((_mp(Verb.PULL, Side.RIGHT, "needle", "thread"),), "XX2X2", "XX2X0"),
    )


def _knot_tying_rows() -> tuple[_TaskRow, ...]:
    pull_l = _mp(Verb.PULL, Side.LEFT, GRASPER, "thread")
    pull_r = _mp(Verb.PULL, Side.RIGHT, GRASPER, "thread")
    return (
        _TaskRow((pull_l,), "3XXX0", "3XXX1", bidirectional=True),
        _TaskRow((pull_r,), "XX3X0", "XX3X1", bidirectional=True),
        _TaskRow((pull_l, pull_r), "3X3X1", "3X3X2"),
        _TaskRow((pull_l, pull_r), "3X3X2", "3X3X3"),
    )


def _peg_board_rows(obj: str) -> tuple[_TaskRow, ...]:
    # Peg Transfer and Post and Sleeve: the held block or sleeve touches
    # the post; the acting side follows the hold slots at runtime.
    return (
        _TaskRow((_mp(Verb.TOUCH, None, obj, "post"),), "XXXX0", "XXXX1", subject_code=1),
        _TaskRow((_mp(Verb.UNTOUCH, None, obj, "post"),), "XXXX1", "XXXX0", subject_code=1),
    )


def _pea_on_a_peg_rows() -> tuple[_TaskRow, ...]:
    return (
        _TaskRow((_mp(Verb.GRASP, Side.LEFT, GRASPER, "pea"),), "0XXX0", "1XXX1"),
        _TaskRow((_mp(Verb.GRASP, Side.RIGHT, GRASPER, "pea"),), "XX0X0", "XX1X1"),
        _TaskRow((_mp(Verb.PULL, Side.LEFT, GRASPER, "pea"),), "1XXX1", "1XXX2"),
        _TaskRow((_mp(Verb.PULL, Side.RIGHT, GRASPER, "pea"),), "XX1X1", "XX1X2"),
        _TaskRow((_mp(Verb.PULL, Side.LEFT, GRASPER, "pea"),), "1XXX1", "1XXX3"),
        _TaskRow((_mp(Verb.PULL, Side.RIGHT, GRASPER, "pea"),), "XX1X1", "XX1X3"),
        _TaskRow((_mp(Verb.TOUCH, None, "pea", "pea"),), "XXXX3", "XXXX2", subject_code=1),
        _TaskRow((_mp(Verb.UNTOUCH, None, "pea", "pea"),), "XXXX2", "XXXX3", subject_code=1),
        _TaskRow((_mp(Verb.TOUCH, None, "pea", "peg"),), "XXXX3", "XXXX4", subject_code=1),
        _TaskRow((_mp(Verb.UNTOUCH, None, "pea", "peg"),), "XXXX4", "XXXX3", subject_code=1),
        _TaskRow((_mp(Verb.RELEASE, Side.LEFT, GRASPER, "pea"),), "1XXXb", "0XXX0"),
        _TaskRow((_mp(Verb.RELEASE, Side.RIGHT, GRASPER, "pea"),), "XX1Xb", "XX0X0"),
        _TaskRow((_mp(Verb.PUSH, Side.LEFT, GRASPER, "pea"),), "1XXX2", "1XXX1"),
        _TaskRow((_mp(Verb.PUSH, Side.RIGHT, GRASPER, "pea"),), "XX1X2", "XX1X1"),
    )


def _task_rows(task: TaskId) -> tuple[_TaskRow, ...]:
    if task is TaskId.SUTURING:
        return _needle_driver_rows("fabric")
    if task is TaskId.NEEDLE_PASSING:
        return _needle_driver_rows("ring")
    if task is TaskId.KNOT_TYING:
        return _knot_tying_rows()
    if task is TaskId.PEG_TRANSFER:
        return _peg_board_rows("block")
    if task is TaskId.POST_AND_SLEEVE:
        return _peg_board_rows("sleeve")
    return _pea_on_a_peg_rows()


def _build_rules(task: TaskId) -> tuple[TransitionRule, ...]:
    rules = []
    for row_idx, (verb, side, before, after) in enumerate(_GENERAL_ROWS):
        for obj in _VOCABULARIES[task]:
            digit = str(obj.code)
            rules.append(
                TransitionRule(
                    mps=(_mp(verb, side, GRASPER, obj.name),),
                    before=parse_pattern(before.replace("a", digit)),
                    after=parse_pattern(after.replace("a", digit)),
                    table="general",
                    row=row_idx,
                    object_code=obj.code,
                )
            )
    for row_idx, row in enumerate(_task_rows(task)):
        before = parse_pattern(row.before)
        after = parse_pattern(row.after)
        rules.append(
            TransitionRule(
                mps=row.mps,
                before=before,
                after=after,
                table="task",
                row=row_idx,
                subject_code=row.subject_code,
            )
        )
        if row.bidirectional:
            rules.append(
                TransitionRule(
                    mps=row.mps,
                    before=after,
                    after=before,
                    table="task",
                    row=row_idx,
                    direction=1,
                    subject_code=row.subject_code,
                )
            )
    return tuple(sorted(rules, key=lambda r: r.sort_key))


@lru_cache(maxsize=None)
def task_spec(task: TaskId) -> TaskSpec:
    """The full instantiated specification for one task; cached."""
    return TaskSpec(
        task=task,
        vocabulary=_VOCABULARIES[task],
        progress_domain=dict(_PROGRESS_DOMAINS[task]),
        rules=_build_rules(task),
    )


@lru_cache(maxsize=None)
def valid_states(task: TaskId) -> frozenset:
    """Every slot-wise valid state of a task (a few hundred per task)."""
    spec = task_spec(task)
    codes = sorted(spec.slot_values[0])
    progress = sorted(spec.slot_values[PROGRESS])
    return frozenset(
        ContextState(*values)
        for values in product(codes, codes, codes, codes, progress)
    )


def enumerate_states(task: TaskId) -> list[ContextState]:
    return sorted(valid_states(task))
