"""Session state machines for both interaction conditions.

The RPG condition runs three phases over twelve turns with enforced
convergence at each phase's checkpoint; the classroom condition runs the same
twelve turns on a fixed intro / five word-pairs / outro schedule. All
transition functions are pure: they return a new state and never mutate their
input, so replaying a log reproduces a session exactly.
"""

from __future__ import annotations

import copy
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .domain import TOTAL_TURNS, GameConfig, OutcomeThresholds, PracticeSet, resolve_scene
from .errors import (
    IllegalTransition,
    InvalidHero,
    InvalidPracticeSet,
    MissingPhaseValue,
    SessionFinished,
)
from .gamemaster import GMResponse
from .tracker import (
    DetectionResult,
    ReminderDecision,
    UsageState,
    apply_detections,
    contains_phrase,
    detect,
    initial_usage,
    reminder_due,
)

MODE_RPG = "rpg"
MODE_CLASSROOM = "classroom"

STATUS_ACTIVE = "active"
STATUS_FINISHED = "finished"

ENDING_TRIUMPHANT = "triumphant"
ENDING_MIXED = "mixed"
ENDING_SETBACK = "setback"

# How much of a transcript survives into the decision history.
_SUMMARY_CHARS = 120


@dataclass(frozen=True)
class Outcome:
    ending_label: str
    checkpoint_total: int
    master_assessment: str


@dataclass(frozen=True)
class ClassroomPlan:
    """Turn schedule for the classroom condition.

    Turn 1 introduces the teacher; word k (1-based) occupies turns 2k and
    2k+1 (introduce, then feedback); turn 12 wraps up.
    """

    word_order: tuple[str, ...]

    def kind_for_turn(self, turn: int) -> tuple[str, str | None]:
        if turn == 1:
            return "intro", None
        if turn == TOTAL_TURNS:
            return "outro", None
        word = self.word_order[(turn - 2) // 2]
        if turn % 2 == 0:
            return "introduce_word", word
        return "feedback_on_sentence", word


@dataclass(frozen=True)
class PromptSpec:
    kind: str  # intro | introduce_word | feedback_on_sentence | outro
    phrase_id: str | None = None
    sentence: str | None = None


@dataclass(frozen=True)
class TurnRecord:
    turn_index: int
    learner_transcript: str
    detections: tuple[DetectionResult, ...]
    gm_narrative: str
    speaking_npc_id: str | None
    scene_id: str | None
    reminder: ReminderDecision | None
    timestamp: str


@dataclass
class SessionState:
    session_id: str
    mode: str
    practice: PracticeSet
    hero_id: str | None
    turn_index: int
    phase: int | None
    location: str | None
    party: set[str]
    decision_history: list[tuple[int, str]]
    checkpoint_values: dict[int, int]
    usage: dict[str, UsageState]
    status: str
    outcome: Outcome | None = None
    plan: ClassroomPlan | None = None


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


def _summarize(transcript: str) -> str:
    squeezed = " ".join(transcript.split())
    if len(squeezed) <= _SUMMARY_CHARS:
        return squeezed
    return squeezed[: _SUMMARY_CHARS - 1] + "…"


def create_session(
    mode: str,
    practice: PracticeSet,
    config: GameConfig,
    hero_id: str | None = None,
    session_id: str | None = None,
) -> SessionState:
    """Build the turn-zero state for either condition."""
    if mode not in (MODE_RPG, MODE_CLASSROOM):
        raise ValueError(f"unknown mode {mode!r}")
    ids = practice.phrase_ids
    if len(ids) != 5 or len(set(ids)) != 5:
        raise InvalidPracticeSet("practice set must be 5 distinct phrase ids")
    for pid in ids:
        if pid not in config.inventory:
            raise InvalidPracticeSet(f"phrase {pid!r} not in inventory")

    if mode == MODE_RPG:
        if hero_id is None:
            raise InvalidHero("rpg sessions require a hero")
        try:
            config.hero(hero_id)
        except KeyError:
            raise InvalidHero(f"unknown hero {hero_id!r}") from None
    elif hero_id is not None:
        raise InvalidHero("classroom sessions take no hero")

    return SessionState(
        session_id=session_id or uuid.uuid4().hex[:12],
        mode=mode,
        practice=practice,
        hero_id=hero_id if mode == MODE_RPG else None,
        turn_index=0,
        phase=1 if mode == MODE_RPG else None,
        location=config.start_location if mode == MODE_RPG else None,
        party=set(),
        decision_history=[],
        checkpoint_values={1: 0, 2: 0, 3: 0} if mode == MODE_RPG else {},
        usage=initial_usage(practice, config.inventory),
        status=STATUS_ACTIVE,
        plan=ClassroomPlan(word_order=ids) if mode == MODE_CLASSROOM else None,
    )


def advance_rpg_turn(
    state: SessionState,
    learner_transcript: str,
    gm_response: GMResponse,
    config: GameConfig,
    timestamp: str | None = None,
) -> tuple[SessionState, TurnRecord]:
    """Commit one RPG turn.

    The engine revalidates the transition even though the orchestrator already
    checked the response: nothing that violates phase membership or checkpoint
    convergence may enter a session, whatever produced it.
    """
    if state.status == STATUS_FINISHED:
        raise SessionFinished(state.session_id)
    if state.mode != MODE_RPG:
        raise ValueError("advance_rpg_turn on a non-rpg session")

    turn = state.turn_index + 1
    spec = config.phase_for_turn(turn)
    if gm_response.next_state not in spec.locations:
        raise IllegalTransition(
            f"{gm_response.next_state!r} is not reachable in phase {spec.phase_number}"
        )
    if turn == spec.final_turn and gm_response.next_state != spec.checkpoint_state:
        raise IllegalTransition(
            f"turn {turn} must converge at {spec.checkpoint_state!r}, "
            f"got {gm_response.next_state!r}"
        )
    roster = config.npc_ids()
    for npc_id in gm_response.party_delta:
        if npc_id not in roster:
            raise IllegalTransition(f"party_delta names unknown npc {npc_id!r}")

    new = copy.deepcopy(state)
    detections = tuple(detect(learner_transcript, state.practice, config.inventory))
    new.usage = apply_detections(new.usage, list(detections))
    new.turn_index = turn
    new.phase = spec.phase_number
    new.location = gm_response.next_state
    new.party |= set(gm_response.party_delta)
    new.checkpoint_values[spec.phase_number] = (
        new.checkpoint_values.get(spec.phase_number, 0) + gm_response.checkpoint_delta
    )
    new.decision_history.append((turn, _summarize(learner_transcript)))

    reminder = reminder_due(new.usage, turn, config.reminder_policy)
    scene_id = (
        gm_response.scene
        if gm_response.scene != "auto"
        else resolve_scene(gm_response.next_state, config).id
    )
    record = TurnRecord(
        turn_index=turn,
        learner_transcript=learner_transcript,
        detections=detections,
        gm_narrative=gm_response.narrative,
        speaking_npc_id=gm_response.speaking_npc,
        scene_id=scene_id,
        reminder=reminder if reminder else None,
        timestamp=timestamp or _now_iso(),
    )

    if turn == TOTAL_TURNS:
        new.outcome = compute_outcome(
            new.checkpoint_values,
            gm_response.master_assessment or "",
            config.outcome_thresholds,
        )
        new.status = STATUS_FINISHED
    return new, record


def classroom_prompt(state: SessionState, learner_sentence: str | None = None) -> PromptSpec:
    """What the classroom agent should do with the next learner turn."""
    if state.status == STATUS_FINISHED:
        raise SessionFinished(state.session_id)
    if state.mode != MODE_CLASSROOM or state.plan is None:
        raise ValueError("classroom_prompt on a non-classroom session")
    kind, word = state.plan.kind_for_turn(state.turn_index + 1)
    sentence = learner_sentence if kind == "feedback_on_sentence" else None
    return PromptSpec(kind=kind, phrase_id=word, sentence=sentence)


def advance_classroom_turn(
    state: SessionState,
    learner_transcript: str,
    agent_reply: str,
    config: GameConfig,
    timestamp: str | None = None,
) -> tuple[SessionState, TurnRecord]:
    if state.status == STATUS_FINISHED:
        raise SessionFinished(state.session_id)
    if state.mode != MODE_CLASSROOM:
        raise ValueError("advance_classroom_turn on a non-classroom session")

    turn = state.turn_index + 1
    new = copy.deepcopy(state)
    detections = tuple(detect(learner_transcript, state.practice, config.inventory))
    new.usage = apply_detections(new.usage, list(detections))
    new.turn_index = turn
    new.decision_history.append((turn, _summarize(learner_transcript)))
    record = TurnRecord(
        turn_index=turn,
        learner_transcript=learner_transcript,
        detections=detections,
        gm_narrative=agent_reply,
        speaking_npc_id=None,
        scene_id=None,
        reminder=None,
        timestamp=timestamp or _now_iso(),
    )
    if turn == TOTAL_TURNS:
        new.status = STATUS_FINISHED
    return new, record


def compute_outcome(
    checkpoint_values: dict[int, int],
    master_assessment_text: str,
    thresholds: OutcomeThresholds,
) -> Outcome:
    """Sum the per-phase checkpoint values and pick the ending.

    The assessment text rides along verbatim; only the numeric total decides
    the label.
    """
    for phase in (1, 2, 3):
        if phase not in checkpoint_values:
            raise MissingPhaseValue(f"no checkpoint value for phase {phase}")
    total = sum(checkpoint_values[p] for p in (1, 2, 3))
    if total >= thresholds.triumphant:
        label = ENDING_TRIUMPHANT
    elif total >= thresholds.mixed:
        label = ENDING_MIXED
    else:
        label = ENDING_SETBACK
    return Outcome(
        ending_label=label,
        checkpoint_total=total,
        master_assessment=master_assessment_text,
    )


def build_classroom_reply(
    prompt: PromptSpec, state: SessionState, config: GameConfig
) -> str:
    """Deterministic template for the classroom agent's next utterance.

    Offline stand-in for a generative teacher: introduces each word with its
    meaning and example, checks the learner's sentence for the word, and
    wraps up with per-word usage counts.
    """
    if prompt.kind == "intro":
        words = ", ".join(
            f"'{config.inventory.get(pid).canonical}'" for pid in state.plan.word_order
        )
        return (
            f"{config.classroom_persona.strip()} Our five expressions today: {words}. "
            "Say hello when you're ready and we'll begin."
        )
    if prompt.kind == "introduce_word":
        phrase = config.inventory.get(prompt.phrase_id)
        return (
            f"Next up: '{phrase.canonical}'. It means: {phrase.meaning}. "
            f"For example: {phrase.example} Now you try — "
            f"please use '{phrase.canonical}' in a sentence of your own."
        )
    if prompt.kind == "feedback_on_sentence":
        phrase = config.inventory.get(prompt.phrase_id)
        sentence = (prompt.sentence or "").strip()
        used = contains_phrase(sentence, phrase.variants)
        if not sentence:
            return (
                f"I didn't catch a sentence there. Remember, '{phrase.canonical}' "
                f"means: {phrase.meaning}. Let's move on to the next word."
            )
        if used:
            return (
                f"Good — you worked '{phrase.canonical}' into your sentence. "
                f"Keep in mind it means: {phrase.meaning}. On to the next word."
            )
        return (
            f"I heard your sentence, but not '{phrase.canonical}' itself. "
            f"It means: {phrase.meaning} — for instance: {phrase.example} "
            "We'll continue with the next word."
        )
    if prompt.kind == "outro":
        parts = []
        for pid, usage in state.usage.items():
            phrase = config.inventory.get(pid)
            parts.append(f"'{phrase.canonical}' {usage.count}x")
        return (
            "That's our session! Here's how often I heard each expression: "
            + ", ".join(parts)
            + ". Nice work today — keep using them in real conversations."
        )
    raise ValueError(f"unknown prompt kind {prompt.kind!r}")
