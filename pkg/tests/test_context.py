import pytest
from hypothesis import given
from hypothesis import strategies as st

from compass.context import (
    ContextState,
    GRASPER,
    MotionPrimitive,
    Side,
    TaskId,
    Verb,
    enumerate_states,
    parse_mp,
    parse_pattern,
    parse_state,
    parse_task,
    render_pattern,
    render_state,
    task_spec,
)
from compass.errors import CodeOutOfVocabulary, MalformedState, UnknownTask

ALL_TASKS = list(TaskId)


def test_paper_example_state():
    state = parse_state("50202", TaskId.NEEDLE_PASSING)
    spec = task_spec(TaskId.NEEDLE_PASSING)
    assert spec.object_name(state.left_hold) == "ring"
    assert state.left_contact == 0
    assert spec.object_name(state.right_hold) == "needle"
    assert state.right_contact == 0
    assert spec.progress_name(state.progress) == "in"


def test_all_none_state():
    assert parse_state("00000", TaskId.SUTURING) == ContextState(0, 0, 0, 0, 0)


def test_out_of_vocabulary_digit():
    with pytest.raises(CodeOutOfVocabulary) as err:
        parse_state("90000", TaskId.SUTURING)
    assert err.value.slot == "left_hold"


def test_progress_out_of_domain():
    # 3 is a fine object slot code nowhere near Suturing's progress domain
    with pytest.raises(CodeOutOfVocabulary) as err:
        parse_state("00003", TaskId.SUTURING)
    assert err.value.slot == "progress"


@pytest.mark.parametrize("bad", ["5020", "502022", "5020x", "50 02", ""])
def test_malformed_state(bad):
    with pytest.raises(MalformedState):
        parse_state(bad, TaskId.SUTURING)


@pytest.mark.parametrize("task", ALL_TASKS)
def test_parse_render_bijection(task):
    # brute-force enumeration of the whole (small) state space
    seen = set()
    for state in enumerate_states(task):
        text = render_state(state)
        assert len(text) == 5
        assert parse_state(text, task) == state
        seen.add(text)
    assert len(seen) == len(enumerate_states(task))


def test_round_trip_examples():
    for text, task in [("50202", TaskId.NEEDLE_PASSING), ("20002", TaskId.SUTURING)]:
        assert render_state(parse_state(text, task)) == text


def test_progress_domains_match_task_semantics():
    assert set(task_spec(TaskId.SUTURING).progress_domain) == {0, 1, 2}
    assert set(task_spec(TaskId.NEEDLE_PASSING).progress_domain) == {0, 1, 2}
    assert set(task_spec(TaskId.KNOT_TYING).progress_domain) == {0, 1, 2, 3}
    assert set(task_spec(TaskId.PEG_TRANSFER).progress_domain) == {0, 1}
    assert set(task_spec(TaskId.POST_AND_SLEEVE).progress_domain) == {0, 1}
    assert set(task_spec(TaskId.PEA_ON_A_PEG).progress_domain) == {0, 1, 2, 3, 4}


def test_task_parse_accepts_aliases():
    assert parse_task("Pea_on_a_Peg") is TaskId.PEA_ON_A_PEG
    assert parse_task("PoaP") is TaskId.PEA_ON_A_PEG
    assert parse_task("suturing") is TaskId.SUTURING
    assert parse_task("NP") is TaskId.NEEDLE_PASSING
    with pytest.raises(UnknownTask):
        parse_task("Stapling")


def test_suturing_spec_contains_push_rule():
    spec = task_spec(TaskId.SUTURING)
    push = [
        r
        for r in spec.task_rules
        if r.mps[0].verb is Verb.PUSH and render_pattern(r.before) == "2XXX1"
    ]
    assert len(push) == 1
    assert render_pattern(push[0].after) == "2XXX2"


def test_peg_transfer_spec_contains_post_touch():
    spec = task_spec(TaskId.PEG_TRANSFER)
    touch = [r for r in spec.task_rules if r.mps[0].verb is Verb.TOUCH]
    assert len(touch) == 1
    assert render_pattern(touch[0].before) == "XXXX0"
    assert render_pattern(touch[0].after) == "XXXX1"
    assert touch[0].mps[0].target == "post"


@pytest.mark.parametrize("task", ALL_TASKS)
def test_eight_general_rows_everywhere(task):
    assert task_spec(task).general_row_count == 8


@pytest.mark.parametrize(
    "task,rows",
    [
        (TaskId.SUTURING, 6),
        (TaskId.NEEDLE_PASSING, 6),
        (TaskId.KNOT_TYING, 4),
        (TaskId.PEG_TRANSFER, 2),
        (TaskId.POST_AND_SLEEVE, 2),
        (TaskId.PEA_ON_A_PEG, 14),
    ],
)
def test_task_specific_row_counts(task, rows):
    assert task_spec(task).task_row_count == rows


@pytest.mark.parametrize("task", ALL_TASKS)
def test_rules_preserve_validity(task):
    spec = task_spec(task)
    states = enumerate_states(task)
    valid = set(states)
    for rule in spec.rules:
        for state in states:
            if rule.matches(state):
                assert rule.apply_to(state) in valid, rule.describe()


@pytest.mark.parametrize("task", ALL_TASKS)
def test_rule_set_is_deterministic(task):
    # no two rules share identical before/after patterns with different MPs
    seen = {}
    for rule in task_spec(task).rules:
        key = (rule.before, rule.after)
        if key in seen:
            assert seen[key] == rule.mps
        seen[key] = rule.mps


def test_pattern_round_trip():
    for text in ["X0XX", "2XXX1", "1XXXb", "XXXX0"]:
        rendered = render_pattern(parse_pattern(text))
        expected = text if len(text) == 5 else text + "X"
        assert rendered == expected


def test_mp_render_and_parse():
    mp = MotionPrimitive(Verb.GRASP, Side.LEFT, GRASPER, "needle")
    assert mp.render() == "Grasp(L, Needle)"
    parsed = parse_mp("Grasp(L, Needle)")
    assert parsed.same_action(mp)
    assert parse_mp("Idle").verb is Verb.IDLE


@given(st.sampled_from(ALL_TASKS), st.data())
def test_round_trip_property(task, data):
    state = data.draw(st.sampled_from(enumerate_states(task)))
    assert parse_state(render_state(state), task) == state
