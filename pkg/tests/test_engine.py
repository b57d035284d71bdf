from __future__ import annotations

import random
from itertools import permutations

import pytest

from phrasequest.domain import OutcomeThresholds, PracticeSet
from phrasequest.engine import (
    advance_classroom_turn,
    advance_rpg_turn,
    build_classroom_reply,
    classroom_prompt,
    compute_outcome,
    create_session,
)
from phrasequest.errors import (
    IllegalTransition,
    InvalidHero,
    InvalidPracticeSet,
    MissingPhaseValue,
    SessionFinished,
)
from phrasequest.gamemaster import parse_gm_response

from .helpers import DEFAULT_PRACTICE, legal_response, play_full_rpg, raw_reply


@pytest.fixture
def rpg(config, practice):
    return create_session("rpg", practice, config, hero_id="ranger")


@pytest.fixture
def classroom(config, practice):
    return create_session("classroom", practice, config)


# --- creation ----------------------------------------------------------------

def test_create_rpg_initial_state(rpg, config):
    assert rpg.turn_index == 0
    assert rpg.phase == 1
    assert rpg.location == config.start_location
    assert rpg.status == "active"
    assert all(s.count == 0 for s in rpg.usage.values())
    assert rpg.checkpoint_values == {1: 0, 2: 0, 3: 0}


def test_create_classroom_builds_plan(classroom, practice):
    plan = classroom.plan
    assert plan.word_order == practice.phrase_ids
    kinds = [plan.kind_for_turn(t) for t in range(1, 13)]
    assert kinds[0] == ("intro", None)
    assert kinds[-1] == ("outro", None)


def test_create_rejects_unknown_hero(config, practice):
    with pytest.raises(InvalidHero):
        create_session("rpg", practice, config, hero_id="zeus-not-configured")


def test_create_rejects_bad_practice_set(config):
    with pytest.raises(InvalidPracticeSet):
        create_session("rpg", PracticeSet(phrase_ids=("wing-it",) * 5), config, hero_id="bard")
    with pytest.raises(InvalidPracticeSet):
        create_session(
            "rpg",
            PracticeSet(phrase_ids=("wing-it", "shake-off", "hang-out", "catch-up", "nope")),
            config,
            hero_id="bard",
        )


def test_rpg_requires_hero_and_classroom_forbids_it(config, practice):
    with pytest.raises(InvalidHero):
        create_session("rpg", practice, config)
    with pytest.raises(InvalidHero):
        create_session("classroom", practice, config, hero_id="ranger")


# --- rpg turns ---------------------------------------------------------------

def advance_to_turn(state, config, upto: int, seed=1):
    rng = random.Random(seed)
    for _ in range(upto):
        response = legal_response(state, config, rng)
        state, _ = advance_rpg_turn(state, "we press on together", response, config)
    return state


def test_phase_boundary_accepts_checkpoint(rpg, config):
    state = advance_to_turn(rpg, config, 3)
    raw = raw_reply("You reach the tower at dusk.", "watchtower")
    response = parse_gm_response(raw, state, config)
    state, record = advance_rpg_turn(state, "let's climb up", response, config)
    assert state.turn_index == 4
    assert state.location == "watchtower"
    assert state.phase == 1
    # the next committed turn moves into phase 2
    state = advance_to_turn(state, config, 1)
    assert state.phase == 2


def test_phase_boundary_rejects_non_checkpoint(rpg, config):
    from phrasequest.gamemaster import GMResponse

    state = advance_to_turn(rpg, config, 3)
    rogue = GMResponse(
        narrative="You wander to the market instead.",
        next_state="market",
        speaking_npc="scout",
        scene="auto",
    )
    with pytest.raises(IllegalTransition):
        advance_rpg_turn(state, "i go shopping", rogue, config)


def test_location_outside_phase_rejected(rpg, config):
    from phrasequest.gamemaster import GMResponse

    rogue = GMResponse(
        narrative="A portal to the citadel!",
        next_state="citadel-hall",
        speaking_npc="scout",
        scene="auto",
    )
    with pytest.raises(IllegalTransition):
        advance_rpg_turn(rpg, "i jump through", rogue, config)


def test_turn_applies_detections_and_history(rpg, config):
    raw = raw_reply("Odo nods at your confidence.", "tavern")
    response = parse_gm_response(raw, rpg, config)
    state, record = advance_rpg_turn(
        rpg, "No plan at all, I will just wing it!", response, config
    )
    assert state.usage["wing-it"].count == 1
    assert state.usage["wing-it"].color == "red"
    assert state.decision_history == [(1, "No plan at all, I will just wing it!")]
    assert record.scene_id == "gilded-fox-common-room"
    assert record.speaking_npc_id == "scout"


def test_party_and_checkpoints_accumulate(rpg, config):
    raw = raw_reply("Rella joins you.", "market", party_delta=["scout"], checkpoint_delta=2)
    response = parse_gm_response(raw, rpg, config)
    state, _ = advance_rpg_turn(rpg, "come with us", response, config)
    assert state.party == {"scout"}
    assert state.checkpoint_values[1] == 2


def test_full_session_finishes_with_outcome(config):
    state, records = play_full_rpg(config, seed=3)
    assert state.status == "finished"
    assert state.turn_index == 12
    assert len(records) == 12
    assert state.outcome is not None
    assert state.outcome.checkpoint_total == sum(state.checkpoint_values.values())


def test_finished_session_rejects_turns(config):
    from phrasequest.gamemaster import GMResponse

    state, _ = play_full_rpg(config, seed=4)
    extra = GMResponse(
        narrative="Encore!", next_state="citadel-hall", speaking_npc="elder", scene="auto"
    )
    with pytest.raises(SessionFinished):
        advance_rpg_turn(state, "more!", extra, config)


def test_advance_is_pure(config, rpg):
    raw = raw_reply("Onward.", "market")
    response = parse_gm_response(raw, rpg, config)
    before = rpg.turn_index, dict(rpg.usage), list(rpg.decision_history)
    advance_rpg_turn(rpg, "to the market, and i'll wing it", response, config)
    assert (rpg.turn_index, dict(rpg.usage), list(rpg.decision_history)) == before


def test_replaying_identical_inputs_reproduces_state(config):
    a, _ = play_full_rpg(config, seed=11)
    b, _ = play_full_rpg(config, seed=11)
    assert a == b


def test_reminder_recorded_on_schedule(config, practice):
    state = create_session("rpg", practice, config, hero_id="bard")
    rng = random.Random(9)
    reminders = {}
    for turn in range(1, 13):
        response = legal_response(state, config, rng)
        state, record = advance_rpg_turn(state, "just looking around", response, config)
        reminders[turn] = record.reminder
    assert all(reminders[t] is None for t in (1, 2, 3, 4, 5, 7, 8, 10, 11))
    for t in (6, 9, 12):
        assert reminders[t] is not None
        assert 1 <= len(reminders[t].phrase_ids) <= 2


# --- outcome -----------------------------------------------------------------

def test_compute_outcome_triumphant():
    out = compute_outcome({1: 2, 2: 3, 3: 3}, "bold throughout", OutcomeThresholds(7, 4))
    assert out.ending_label == "triumphant"
    assert out.checkpoint_total == 8
    assert out.master_assessment == "bold throughout"


def test_compute_outcome_floor():
    out = compute_outcome({1: 0, 2: 0, 3: 0}, "", OutcomeThresholds(7, 4))
    assert out.ending_label == "setback"
    assert out.checkpoint_total == 0


def test_compute_outcome_mixed_band():
    assert compute_outcome({1: 2, 2: 2, 3: 0}, "", OutcomeThresholds(7, 4)).ending_label == "mixed"


def test_compute_outcome_missing_phase():
    with pytest.raises(MissingPhaseValue):
        compute_outcome({1: 2, 2: 3}, "", OutcomeThresholds(7, 4))


def test_outcome_label_ignores_assessment_text():
    a = compute_outcome({1: 3, 2: 3, 3: 3}, "barely made it", OutcomeThresholds(7, 4))
    b = compute_outcome({1: 3, 2: 3, 3: 3}, "a legend is born", OutcomeThresholds(7, 4))
    assert a.ending_label == b.ending_label == "triumphant"


# --- classroom ---------------------------------------------------------------

def test_classroom_prompt_sequence(classroom, config, practice):
    assert classroom_prompt(classroom).kind == "intro"
    state = classroom
    prompts = []
    for turn in range(1, 13):
        prompt = classroom_prompt(state, learner_sentence="my try")
        prompts.append(prompt)
        reply = build_classroom_reply(prompt, state, config)
        state, _ = advance_classroom_turn(state, "my try", reply, config)
    kinds = [p.kind for p in prompts]
    assert kinds[0] == "intro"
    assert kinds[-1] == "outro"
    assert kinds[1:11] == [
        "introduce_word", "feedback_on_sentence",
    ] * 5
    covered = [p.phrase_id for p in prompts if p.phrase_id]
    assert covered == [pid for pid in practice.phrase_ids for _ in range(2)]
    assert state.status == "finished"


def test_classroom_prompt_at_turn_two_is_feedback_for_word_one(classroom, config, practice):
    state = classroom
    for _ in range(2):
        prompt = classroom_prompt(state, learner_sentence="hello")
        reply = build_classroom_reply(prompt, state, config)
        state, _ = advance_classroom_turn(state, "hello", reply, config)
    prompt = classroom_prompt(state, learner_sentence="I can wing it")
    assert prompt.kind == "feedback_on_sentence"
    assert prompt.phrase_id == practice.phrase_ids[0]
    assert prompt.sentence == "I can wing it"


def test_classroom_counts_usage(classroom, config):
    state, _ = advance_classroom_turn(
        classroom, "honestly this is a piece of cake", "welcome!", config
    )
    assert state.usage["piece-of-cake"].count == 1


def test_classroom_schedule_covers_all_permutations(config):
    base = DEFAULT_PRACTICE
    for perm in permutations(base):
        state = create_session("classroom", PracticeSet(phrase_ids=perm), config)
        plan = state.plan
        seen: dict[str, list[int]] = {pid: [] for pid in perm}
        for turn in range(2, 12):
            kind, word = plan.kind_for_turn(turn)
            seen[word].append(turn)
        for pid, turns in seen.items():
            assert len(turns) == 2
            assert turns[1] == turns[0] + 1
            assert turns[0] % 2 == 0
        assert plan.kind_for_turn(1) == ("intro", None)
        assert plan.kind_for_turn(12) == ("outro", None)


def test_classroom_finished_guard(classroom, config):
    state = classroom
    for _ in range(12):
        state, _ = advance_classroom_turn(state, "ok", "reply", config)
    with pytest.raises(SessionFinished):
        advance_classroom_turn(state, "one more", "reply", config)
    with pytest.raises(SessionFinished):
        classroom_prompt(state)


def test_classroom_reply_mentions_meaning(classroom, config):
    prompt = classroom_prompt(classroom)
    intro = build_classroom_reply(prompt, classroom, config)
    assert "wing it" in intro
    state, _ = advance_classroom_turn(classroom, "hi", intro, config)
    prompt2 = classroom_prompt(state, learner_sentence=None)
    reply2 = build_classroom_reply(prompt2, state, config)
    assert "improvise" in reply2
