"""Append-only session event log and replay.

One JSONL file per session, one schema-versioned event per line, seq numbers
contiguous from 1. The log is the source of truth: folding it back through
the engine reproduces the live session's final state field for field, which
is what the replay verifier checks.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from .config import dump_config, load_config
from .domain import GameConfig, PracticeSet
from .engine import (
    MODE_RPG,
    STATUS_FINISHED,
    SessionState,
    TurnRecord,
    advance_classroom_turn,
    advance_rpg_turn,
    create_session,
)
from .errors import CorruptLog, PhraseQuestError
from .gamemaster import GMResponse
from .tracker import DetectionResult, ReminderDecision

EVENT_SCHEMA = "session-event@1"

KIND_CREATED = "created"
KIND_PRETEST_ITEM = "pretest_item"
KIND_TURN_COMPLETED = "turn_completed"
KIND_REMINDER_SHOWN = "reminder_shown"
KIND_FEEDBACK_BUILT = "feedback_built"
KIND_POSTTEST_ITEM = "posttest_item"
KIND_SURVEY_RECORDED = "survey_recorded"
KIND_FINISHED = "finished"

ALL_KINDS = (
    KIND_CREATED,
    KIND_PRETEST_ITEM,
    KIND_TURN_COMPLETED,
    KIND_REMINDER_SHOWN,
    KIND_FEEDBACK_BUILT,
    KIND_POSTTEST_ITEM,
    KIND_SURVEY_RECORDED,
    KIND_FINISHED,
)


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    session_id: str
    timestamp: str
    kind: str
    payload: dict[str, Any]

    def to_line(self) -> str:
        return json.dumps(
            {
                "schema": EVENT_SCHEMA,
                "seq": self.seq,
                "session_id": self.session_id,
                "timestamp": self.timestamp,
                "kind": self.kind,
                "payload": self.payload,
            },
            ensure_ascii=False,
        )


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


class EventLog:
    """Single-writer, append-only log for one session."""

    def __init__(self, path: Path, session_id: str):
        self.path = Path(path)
        self.session_id = session_id
        self._next_seq = 1

    def append(self, kind: str, payload: dict[str, Any]) -> SessionEvent:
        return self.append_many([(kind, payload)])[0]

    def append_many(self, items: list[tuple[str, dict[str, Any]]]) -> list[SessionEvent]:
        """Write several events as one flush so a failed turn leaves no partials."""
        events = []
        lines = []
        for kind, payload in items:
            if kind not in ALL_KINDS:
                raise ValueError(f"unknown event kind {kind!r}")
            event = SessionEvent(
                seq=self._next_seq,
                session_id=self.session_id,
                timestamp=_now_iso(),
                kind=kind,
                payload=payload,
            )
            self._next_seq += 1
            events.append(event)
            lines.append(event.to_line())
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as handle:
            handle.write("\n".join(lines) + "\n")
            handle.flush()
        return events


def read_events(path: str | Path) -> list[SessionEvent]:
    events = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorruptLog(f"line {lineno} is not valid JSON: {exc}") from exc
        if raw.get("schema") != EVENT_SCHEMA:
            raise CorruptLog(f"line {lineno} has unknown schema {raw.get('schema')!r}")
        events.append(
            SessionEvent(
                seq=raw["seq"],
                session_id=raw["session_id"],
                timestamp=raw["timestamp"],
                kind=raw["kind"],
                payload=raw["payload"],
            )
        )
    return events


# --- payload serialization ----------------------------------------------------

def detection_to_dict(d: DetectionResult) -> dict:
    return {
        "phrase_id": d.phrase_id,
        "occurrences": d.occurrences,
        "spans": [list(span) for span in d.spans],
    }


def record_to_dict(record: TurnRecord) -> dict:
    return {
        "turn_index": record.turn_index,
        "learner_transcript": record.learner_transcript,
        "detections": [detection_to_dict(d) for d in record.detections],
        "gm_narrative": record.gm_narrative,
        "speaking_npc_id": record.speaking_npc_id,
        "scene_id": record.scene_id,
        "reminder": (
            {
                "turn_index": record.reminder.turn_index,
                "phrase_ids": list(record.reminder.phrase_ids),
            }
            if record.reminder
            else None
        ),
        "timestamp": record.timestamp,
    }


def record_from_dict(data: dict) -> TurnRecord:
    return TurnRecord(
        turn_index=data["turn_index"],
        learner_transcript=data["learner_transcript"],
        detections=tuple(
            DetectionResult(
                phrase_id=d["phrase_id"],
                occurrences=d["occurrences"],
                spans=tuple(tuple(span) for span in d["spans"]),
            )
            for d in data["detections"]
        ),
        gm_narrative=data["gm_narrative"],
        speaking_npc_id=data["speaking_npc_id"],
        scene_id=data["scene_id"],
        reminder=(
            ReminderDecision(
                turn_index=data["reminder"]["turn_index"],
                phrase_ids=tuple(data["reminder"]["phrase_ids"]),
            )
            if data["reminder"]
            else None
        ),
        timestamp=data["timestamp"],
    )


def created_payload(state: SessionState, config: GameConfig) -> dict:
    # The full config rides along so a log replays with no external inputs.
    return {
        "mode": state.mode,
        "practice": list(state.practice.phrase_ids),
        "hero_id": state.hero_id,
        "config": dump_config(config),
    }


def rpg_turn_payload(record: TurnRecord, response: GMResponse) -> dict:
    return {
        "record": record_to_dict(record),
        "response": {
            "next_state": response.next_state,
            "scene": response.scene,
            "recast_phrases": list(response.recast_phrases),
            "checkpoint_delta": response.checkpoint_delta,
            "party_delta": list(response.party_delta),
            "master_assessment": response.master_assessment,
        },
    }


def classroom_turn_payload(record: TurnRecord) -> dict:
    return {"record": record_to_dict(record)}


# --- replay ---------------------------------------------------------------------

@dataclass
class ReplayResult:
    state: SessionState
    config: GameConfig
    events: list[SessionEvent]
    pretest_items: list[dict] = field(default_factory=list)
    posttest_items: list[dict] = field(default_factory=list)
    surveys: list[dict] = field(default_factory=list)
    feedback: dict | None = None


def replay(path: str | Path) -> ReplayResult:
    """Fold a session log back into its final state.

    Raises CorruptLog on a seq gap, a lifecycle violation, or any event the
    engine itself would have refused live.
    """
    return replay_events(read_events(path))


def replay_events(events: list[SessionEvent]) -> ReplayResult:
    if not events:
        raise CorruptLog("missing created event (log is empty)")
    for position, event in enumerate(events, start=1):
        if event.seq != position:
            raise CorruptLog(f"seq gap: expected {position}, found {event.seq}")
    if events[0].kind != KIND_CREATED:
        raise CorruptLog(f"first event must be created, found {events[0].kind!r}")
    for event in events[1:]:
        if event.kind == KIND_CREATED:
            raise CorruptLog("duplicate created event")
    for event in events[:-1]:
        if event.kind == KIND_FINISHED:
            raise CorruptLog("events appended after finished")

    head = events[0]
    try:
        config = load_config(head.payload["config"])
    except PhraseQuestError as exc:
        raise CorruptLog(f"embedded config does not validate: {exc}") from exc
    state = create_session(
        head.payload["mode"],
        PracticeSet(phrase_ids=tuple(head.payload["practice"])),
        config,
        hero_id=head.payload["hero_id"],
        session_id=head.session_id,
    )
    result = ReplayResult(state=state, config=config, events=events)

    for event in events[1:]:
        if event.kind == KIND_TURN_COMPLETED:
            record = record_from_dict(event.payload["record"])
            if record.turn_index != result.state.turn_index + 1:
                raise CorruptLog(
                    f"turn {record.turn_index} follows turn {result.state.turn_index}"
                )
            try:
                if result.state.mode == MODE_RPG:
                    response_data = event.payload["response"]
                    response = GMResponse(
                        narrative=record.gm_narrative,
                        next_state=response_data["next_state"],
                        speaking_npc=record.speaking_npc_id,
                        scene=response_data["scene"],
                        recast_phrases=tuple(response_data["recast_phrases"]),
                        checkpoint_delta=response_data["checkpoint_delta"],
                        party_delta=tuple(response_data["party_delta"]),
                        master_assessment=response_data["master_assessment"],
                    )
                    result.state, _ = advance_rpg_turn(
                        result.state,
                        record.learner_transcript,
                        response,
                        config,
                        timestamp=record.timestamp,
                    )
                else:
                    result.state, _ = advance_classroom_turn(
                        result.state,
                        record.learner_transcript,
                        record.gm_narrative,
                        config,
                        timestamp=record.timestamp,
                    )
            except PhraseQuestError as exc:
                raise CorruptLog(f"turn {record.turn_index} does not replay: {exc}") from exc
        elif event.kind == KIND_PRETEST_ITEM:
            if result.state.turn_index != 0:
                raise CorruptLog("pretest_item after the session started")
            result.pretest_items.append(event.payload)
        elif event.kind == KIND_POSTTEST_ITEM:
            _require_finished(result.state, event.kind)
            result.posttest_items.append(event.payload)
        elif event.kind == KIND_SURVEY_RECORDED:
            _require_finished(result.state, event.kind)
            result.surveys.append(event.payload)
        elif event.kind == KIND_FEEDBACK_BUILT:
            _require_finished(result.state, event.kind)
            result.feedback = event.payload
        elif event.kind == KIND_REMINDER_SHOWN:
            if result.state.turn_index == 0:
                raise CorruptLog("reminder_shown before any turn")
        elif event.kind == KIND_FINISHED:
            _require_finished(result.state, event.kind)
        else:
            raise CorruptLog(f"unknown event kind {event.kind!r}")
    return result


def _require_finished(state: SessionState, kind: str) -> None:
    if state.status != STATUS_FINISHED:
        raise CorruptLog(f"{kind} before the session finished")
