"""Shared builders for scripted game-master replies and full sessions."""

from __future__ import annotations

import json
import random

from phrasequest.domain import TOTAL_TURNS, GameConfig
from phrasequest.engine import SessionState, advance_rpg_turn, create_session
from phrasequest.gamemaster import GMResponse, parse_gm_response

DEFAULT_PRACTICE = (
    "wing-it",
    "shake-off",
    "piece-of-cake",
    "break-the-ice",
    "call-it-a-day",
)


def raw_reply(
    narrative: str,
    next_state: str,
    speaking_npc: str = "scout",
    scene: str = "auto",
    recast: list[str] | None = None,
    checkpoint_delta: int = 1,
    party_delta: list[str] | None = None,
    master_assessment: str | None = None,
) -> str:
    block: dict = {
        "next_state": next_state,
        "speaking_npc": speaking_npc,
        "scene": scene,
        "recast_phrases": recast or [],
        "checkpoint_delta": checkpoint_delta,
        "party_delta": party_delta or [],
    }
    if master_assessment is not None:
        block["master_assessment"] = master_assessment
    return narrative + "\n```json\n" + json.dumps(block) + "\n```\n"


def legal_response(
    state: SessionState,
    config: GameConfig,
    rng: random.Random,
    narrative: str = "The path winds on.",
) -> GMResponse:
    """A random reply that satisfies every response invariant for this turn."""
    turn = state.turn_index + 1
    spec = config.phase_for_turn(turn)
    if turn == spec.final_turn:
        next_state = spec.checkpoint_state
    else:
        next_state = rng.choice(sorted(spec.locations))
    npc = rng.choice([n.id for n in config.npcs])
    party = [npc] if rng.random() < 0.3 else []
    raw = raw_reply(
        narrative,
        next_state,
        speaking_npc=npc,
        checkpoint_delta=rng.randint(0, 3),
        party_delta=party,
        master_assessment="A steady hand in the storm." if turn == TOTAL_TURNS else None,
    )
    return parse_gm_response(raw, state, config)


def play_full_rpg(
    config: GameConfig,
    practice_ids: tuple[str, ...] = DEFAULT_PRACTICE,
    seed: int = 0,
    transcripts: list[str] | None = None,
    session_id: str | None = None,
):
    """Drive a session through all 12 turns with random legal replies."""
    from phrasequest.domain import PracticeSet

    rng = random.Random(seed)
    state = create_session(
        "rpg",
        PracticeSet(phrase_ids=practice_ids),
        config,
        hero_id="ranger",
        session_id=session_id or f"seeded-{seed}",
    )
    records = []
    for turn in range(1, TOTAL_TURNS + 1):
        transcript = (
            transcripts[turn - 1]
            if transcripts
            else f"I head onward and talk to whoever is there, turn {turn}."
        )
        response = legal_response(state, config, rng)
        state, record = advance_rpg_turn(state, transcript, response, config)
        records.append(record)
    return state, records
