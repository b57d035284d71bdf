"""Narrative-provider orchestration: request assembly, reply validation, retry.

The provider contract is text in, text out. A reply is free narrative prose
followed by one fenced ```json block carrying the machine fields; nothing the
provider says becomes game state until every invariant checks out, so an
invalid reply can never corrupt a session. On violation the provider is
re-asked with the reason attached, up to a bounded number of attempts.
"""

from __future__ import annotations

import json
import logging
import os
import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Protocol

from .domain import TOTAL_TURNS, GameConfig
from .errors import (
    ContractViolation,
    MalformedResponse,
    ProviderFailure,
    TransportError,
)
from .tracker import detect_in_text

if TYPE_CHECKING:
    from .engine import SessionState

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 3
CHECKPOINT_DELTA_MAX = 3
SCENE_AUTO = "auto"

_FENCED_BLOCK = re.compile(r"```(?:json)?\s*\n(.*?)```", re.DOTALL)


@dataclass(frozen=True)
class GMRequest:
    """Everything the narrative provider sees for one turn."""

    session_id: str
    turn_index: int  # the turn about to be completed (1-based)
    phase_number: int
    phase_title: str
    phase_goal: str
    location: str
    possible_locations: tuple[str, ...]
    required_checkpoint: str | None  # set when this turn must converge
    encounters: tuple[str, ...]
    npc_roster: tuple[tuple[str, str], ...]  # (id, description)
    hero_id: str
    hero_abilities: tuple[str, ...]
    decision_history: tuple[tuple[int, str], ...]
    target_phrases: tuple[tuple[str, str], ...]  # (canonical, meaning)
    usage_snapshot: tuple[tuple[str, int], ...]  # (phrase_id, count)
    final_turn: bool

    def to_prompt(self) -> str:
        lines = [
            "You are the game master of a spoken, turn-based practice adventure.",
            "Advance the story from the player's reply, stay in-world, and keep it to a few sentences.",
            "Work the target phrases below into your own dialogue when it fits naturally,",
            "pairing them with a synonym or enough context to make the meaning clear.",
            "",
            f"Turn {self.turn_index} of {TOTAL_TURNS}.",
            f"Phase {self.phase_number}: {self.phase_title} — {self.phase_goal}",
            f"Current location: {self.location}",
            f"Locations in play: {', '.join(self.possible_locations)}",
        ]
        if self.required_checkpoint:
            lines.append(
                f"This turn MUST end at the checkpoint location: {self.required_checkpoint}"
            )
        if self.encounters:
            lines.append("Possible encounters: " + " | ".join(self.encounters))
        lines.append("")
        lines.append("NPCs:")
        for npc_id, description in self.npc_roster:
            lines.append(f"- {npc_id}: {description}")
        lines.append(f"Hero: {self.hero_id} (abilities: {', '.join(self.hero_abilities)})")
        if self.decision_history:
            lines.append("Decisions so far:")
            for turn, summary in self.decision_history:
                lines.append(f"  {turn}. {summary}")
        lines.append("Target phrases (learner's use count so far):")
        for (canonical, meaning), (_, count) in zip(
            self.target_phrases, self.usage_snapshot
        ):
            lines.append(f"- {canonical}: {meaning} [used {count}x]")
        lines.append("")
        lines.append("Reply with the narrative text, then exactly one fenced block:")
        lines.append("```json")
        schema = (
            '{"next_state": "<location>", "speaking_npc": "<npc id>", '
            '"scene": "auto", "recast_phrases": ["<phrase ids you used>"], '
            '"checkpoint_delta": 0, "party_delta": []'
        )
        if self.final_turn:
            schema += ', "master_assessment": "<one-sentence verdict on the player>"'
        schema += "}"
        lines.append(schema)
        lines.append("```")
        return "\n".join(lines)


@dataclass(frozen=True)
class GMResponse:
    narrative: str
    next_state: str
    speaking_npc: str
    scene: str  # concrete asset id, or "auto"
    recast_phrases: tuple[str, ...] = ()
    checkpoint_delta: int = 0
    party_delta: tuple[str, ...] = ()
    master_assessment: str | None = None


class NarrativeProvider(Protocol):
    def complete(
        self, prompt: str, *, session_id: str, turn_index: int, attempt: int
    ) -> str:
        ...


def build_gm_request(state: "SessionState", config: GameConfig) -> GMRequest:
    """Deterministic request for the turn about to be played.

    The same session state always renders a byte-identical prompt; every list
    follows configuration order.
    """
    turn = state.turn_index + 1
    spec = config.phase_for_turn(turn)
    inventory = config.inventory
    target = tuple(
        (inventory.get(pid).canonical, inventory.get(pid).meaning)
        for pid in state.usage
    )
    hero = config.hero(state.hero_id)
    return GMRequest(
        session_id=state.session_id,
        turn_index=turn,
        phase_number=spec.phase_number,
        phase_title=spec.title,
        phase_goal=spec.goal_text,
        location=state.location or config.start_location,
        possible_locations=tuple(sorted(spec.locations)),
        required_checkpoint=spec.checkpoint_state if turn == spec.final_turn else None,
        encounters=spec.encounters,
        npc_roster=tuple((n.id, n.description) for n in config.npcs),
        hero_id=hero.id,
        hero_abilities=hero.abilities,
        decision_history=tuple(state.decision_history),
        target_phrases=target,
        usage_snapshot=tuple((pid, s.count) for pid, s in state.usage.items()),
        final_turn=turn == TOTAL_TURNS,
    )


def parse_gm_response(raw: str, state: "SessionState", config: GameConfig) -> GMResponse:
    """Parse and fully validate a raw provider reply for this session turn.

    Raises MalformedResponse when the structured block is missing or
    untyped, ContractViolation when a well-formed reply breaks a game rule.
    A returned GMResponse satisfies every response invariant.
    """
    matches = list(_FENCED_BLOCK.finditer(raw))
    if not matches:
        raise MalformedResponse("no fenced machine block found in reply")
    last = matches[-1]
    try:
        data = json.loads(last.group(1))
    except json.JSONDecodeError as exc:
        raise MalformedResponse(f"machine block is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedResponse("machine block must be a JSON object")

    narrative = raw[: last.start()].strip()
    if not narrative:
        raise MalformedResponse("reply carries no narrative text")

    for key in ("next_state", "speaking_npc"):
        if not isinstance(data.get(key), str) or not data[key].strip():
            raise MalformedResponse(f"missing or non-string field {key!r}")

    delta_raw = data.get("checkpoint_delta", 0)
    if isinstance(delta_raw, bool) or not isinstance(delta_raw, int):
        raise MalformedResponse("checkpoint_delta must be an integer")
    delta = max(0, min(CHECKPOINT_DELTA_MAX, delta_raw))

    recast = data.get("recast_phrases", [])
    party = data.get("party_delta", [])
    for name, value in (("recast_phrases", recast), ("party_delta", party)):
        if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
            raise MalformedResponse(f"{name} must be a list of strings")

    scene = data.get("scene", SCENE_AUTO)
    if not isinstance(scene, str) or not scene.strip():
        raise MalformedResponse("scene must be a non-empty string")

    assessment = data.get("master_assessment")
    if assessment is not None and not isinstance(assessment, str):
        raise MalformedResponse("master_assessment must be a string")

    turn = state.turn_index + 1
    spec = config.phase_for_turn(turn)
    next_state = data["next_state"].strip()
    if next_state not in spec.locations:
        raise ContractViolation(
            f"illegal next_state {next_state!r}: phase {spec.phase_number} allows "
            + ", ".join(sorted(spec.locations))
        )
    if turn == spec.final_turn and next_state != spec.checkpoint_state:
        raise ContractViolation(
            f"turn {turn} ends phase {spec.phase_number}; next_state must be the "
            f"checkpoint {spec.checkpoint_state!r}"
        )

    npc = data["speaking_npc"].strip()
    if npc not in config.npc_ids():
        raise ContractViolation(f"unknown npc {npc!r}")
    for member in party:
        if member not in config.npc_ids():
            raise ContractViolation(f"party_delta names unknown npc {member!r}")

    if scene != SCENE_AUTO and scene not in {s.id for s in config.scenes}:
        raise ContractViolation(f"unknown scene {scene!r}")

    practiced = set(state.practice.phrase_ids)
    for pid in recast:
        if pid not in practiced:
            raise ContractViolation(f"recast phrase {pid!r} outside the practice set")
    present = recast_coverage(narrative, state.practice, config)
    for pid in recast:
        if pid not in present:
            raise ContractViolation(
                f"recast not present: {pid!r} claimed but absent from narrative"
            )

    if turn == TOTAL_TURNS and not (assessment or "").strip():
        raise ContractViolation("final turn reply must include master_assessment")
    if turn != TOTAL_TURNS and assessment is not None:
        raise ContractViolation("master_assessment only belongs on the final turn")

    return GMResponse(
        narrative=narrative,
        next_state=next_state,
        speaking_npc=npc,
        scene=scene.strip(),
        recast_phrases=tuple(recast),
        checkpoint_delta=delta,
        party_delta=tuple(party),
        master_assessment=assessment,
    )


def recast_coverage(narrative: str, practice, config: GameConfig) -> set[str]:
    """Practiced phrase ids actually present in narrative text."""
    return detect_in_text(narrative, practice, config.inventory)


def request_with_retry(
    provider: NarrativeProvider,
    request: GMRequest,
    state: "SessionState",
    config: GameConfig,
    max_attempts: int = MAX_ATTEMPTS,
) -> GMResponse:
    """Ask the provider until a reply validates, re-prompting with the reason.

    Raises ProviderFailure with every failed (raw, reason) pair after
    ``max_attempts`` invalid replies. Transport problems propagate untouched:
    a repair hint cannot fix the network.
    """
    if max_attempts < 1:
        raise ValueError("max_attempts must be at least 1")
    attempts: list[tuple[str, str]] = []
    prompt = request.to_prompt()
    for attempt in range(1, max_attempts + 1):
        raw = provider.complete(
            prompt,
            session_id=request.session_id,
            turn_index=request.turn_index,
            attempt=attempt,
        )
        try:
            return parse_gm_response(raw, state, config)
        except (MalformedResponse, ContractViolation) as exc:
            reason = str(exc)
            attempts.append((raw, reason))
            logger.warning(
                "gm reply rejected (session=%s turn=%s attempt=%s): %s",
                request.session_id,
                request.turn_index,
                attempt,
                reason,
            )
            prompt = (
                request.to_prompt()
                + "\n\nYour previous reply was rejected: "
                + reason
                + "\nPlease answer again and fix exactly that."
            )
    raise ProviderFailure(
        f"provider failed {max_attempts} attempts for turn {request.turn_index}",
        attempts=attempts,
    )


class ScriptedProvider:
    """Deterministic provider backed by a fixture table.

    The fixture maps (session_id, turn_index, attempt) to raw reply text;
    a session key of "*" matches any session, which is how packaged demo
    scripts work before session ids exist. Unknown keys raise TransportError.
    """

    def __init__(self, replies: dict[tuple[str, int, int], str]):
        self._replies = dict(replies)

    @classmethod
    def from_fixture_file(cls, path) -> "ScriptedProvider":
        import yaml

        with open(path, encoding="utf-8") as handle:
            doc = yaml.safe_load(handle)
        if not isinstance(doc, dict) or "replies" not in doc:
            raise TransportError(f"fixture {path} has no 'replies' list")
        return cls.from_entries(doc["replies"])

    @classmethod
    def from_entries(cls, entries: list[dict]) -> "ScriptedProvider":
        replies = {}
        for entry in entries:
            key = (
                str(entry.get("session", "*")),
                int(entry["turn"]),
                int(entry.get("attempt", 1)),
            )
            replies[key] = entry["text"]
        return cls(replies)

    def complete(
        self, prompt: str, *, session_id: str, turn_index: int, attempt: int
    ) -> str:
        for key in ((session_id, turn_index, attempt), ("*", turn_index, attempt)):
            if key in self._replies:
                return self._replies[key]
        raise TransportError(
            f"scripted fixture has no reply for session={session_id!r} "
            f"turn={turn_index} attempt={attempt}"
        )


class ChatCompletionProvider:
    """External chat-completion binding.

    Posts the prompt as a single user message; the API key comes from the
    environment and is redacted from logs.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key_env: str = "LLM_API_KEY",
        timeout: float = 60.0,
        transport=None,
    ):
        key = os.environ.get(api_key_env, "")
        if not key:
            raise TransportError(f"environment variable {api_key_env} is not set")
        self._endpoint = endpoint
        self._model = model
        self._key = key
        self._timeout = timeout
        self._transport = transport

    def complete(
        self, prompt: str, *, session_id: str, turn_index: int, attempt: int
    ) -> str:
        import httpx

        body = {
            "model": self._model,
            "messages": [{"role": "user", "content": prompt}],
        }
        logger.info(
            "llm request session=%s turn=%s attempt=%s body=%s auth=%s",
            session_id,
            turn_index,
            attempt,
            json.dumps(body)[:2000],
            "Bearer [redacted]",
        )
        try:
            with httpx.Client(timeout=self._timeout, transport=self._transport) as client:
                response = client.post(
                    self._endpoint,
                    json=body,
                    headers={"Authorization": f"Bearer {self._key}"},
                )
                response.raise_for_status()
                payload = response.json()
        except httpx.HTTPError as exc:
            raise TransportError(f"chat completion call failed: {exc}") from exc
        logger.info("llm response session=%s turn=%s body=%s", session_id, turn_index,
                    json.dumps(payload)[:2000])
        try:
            return payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"unexpected chat completion shape: {exc}") from exc
