"""Session hosting: the core service object and its HTTP/JSON facade.

One ``SessionService`` owns many sessions. Per session, turns are strictly
serialized (a second submit while one is in flight gets Busy) and atomic: the
whole pipeline (transcription, detection, narrative advance, synthesis, log
append) either commits together or leaves no trace, so a provider failure can
never leave a half-played turn behind. Reads always serve the last committed
snapshot.
"""

import copy
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .assessment import (
    Elicitation,
    FamiliarityRating,
    FeedbackGrader,
    FeedbackReport,
    Grader,
    KeywordGrader,
    build_feedback_report,
    run_posttest,
    run_pretest,
)
from .domain import GameConfig, PracticeSet, resolve_scene
from .engine import (
    MODE_CLASSROOM,
    MODE_RPG,
    STATUS_FINISHED,
    SessionState,
    TurnRecord,
    advance_classroom_turn,
    advance_rpg_turn,
    build_classroom_reply,
    classroom_prompt,
    create_session,
)
from .errors import (
    Busy,
    NotFound,
    SessionFinished,
    SessionNotFinished,
)
from .events import (
    KIND_CREATED,
    KIND_FEEDBACK_BUILT,
    KIND_FINISHED,
    KIND_POSTTEST_ITEM,
    KIND_PRETEST_ITEM,
    KIND_REMINDER_SHOWN,
    KIND_SURVEY_RECORDED,
    KIND_TURN_COMPLETED,
    EventLog,
    classroom_turn_payload,
    created_payload,
    rpg_turn_payload,
)
from .gamemaster import NarrativeProvider, build_gm_request, request_with_retry
from .speech import SilentTts, Synthesizer, TextPassthroughAsr, Transcriber, decode_audio_payload
from .tracker import apply_detections, detect, practice_box_view


@dataclass
class SessionRuntime:
    state: SessionState
    log: EventLog
    records: list[TurnRecord] = field(default_factory=list)
    turn_lock: threading.Lock = field(default_factory=threading.Lock)
    view: dict = field(default_factory=dict)
    last_audio_ref: str | None = None
    pretest_done: bool = False
    posttest_done: bool = False
    feedback: FeedbackReport | None = None
    closed: bool = False  # survey recorded; log sealed with `finished`


class SessionService:
    def __init__(
        self,
        config: GameConfig,
        provider: NarrativeProvider,
        log_dir: str | Path,
        asr: Transcriber | None = None,
        tts: Synthesizer | None = None,
        grader: Grader | None = None,
        feedback_grader: FeedbackGrader | None = None,
    ):
        self.config = config
        self.provider = provider
        self.log_dir = Path(log_dir)
        self.asr = asr or TextPassthroughAsr()
        self.tts = tts or SilentTts()
        default_grader = KeywordGrader()
        self.grader = grader or default_grader
        self.feedback_grader = feedback_grader or default_grader
        self._sessions: dict[str, SessionRuntime] = {}
        self._registry_lock = threading.Lock()

    # -- lifecycle -------------------------------------------------------------

    def create(
        self, mode: str, practice_ids: list[str], hero_id: str | None = None
    ) -> dict:
        state = create_session(
            mode, PracticeSet(phrase_ids=tuple(practice_ids)), self.config, hero_id
        )
        log = EventLog(self.log_dir / f"{state.session_id}.jsonl", state.session_id)
        runtime = SessionRuntime(state=state, log=log)
        log.append(KIND_CREATED, created_payload(state, self.config))
        runtime.view = self._build_view(runtime)
        with self._registry_lock:
            self._sessions[state.session_id] = runtime
        return runtime.view

    def _get(self, session_id: str) -> SessionRuntime:
        with self._registry_lock:
            runtime = self._sessions.get(session_id)
        if runtime is None:
            raise NotFound(f"no session {session_id!r}")
        return runtime

    def get_view(self, session_id: str) -> dict:
        return self._get(session_id).view

    def session_ids(self) -> list[str]:
        with self._registry_lock:
            return list(self._sessions)

    # -- turns -------------------------------------------------------------------

    def submit_turn(
        self,
        session_id: str,
        transcript: str | None = None,
        audio: dict | None = None,
    ) -> dict:
        runtime = self._get(session_id)
        if not runtime.turn_lock.acquire(blocking=False):
            raise Busy(f"a turn for session {session_id!r} is already in flight")
        try:
            return self._run_turn(runtime, transcript, audio)
        finally:
            runtime.turn_lock.release()

    def _run_turn(
        self, runtime: SessionRuntime, transcript: str | None, audio: dict | None
    ) -> dict:
        state = runtime.state
        if state.status == STATUS_FINISHED:
            raise SessionFinished(state.session_id)
        if (transcript is None) == (audio is None):
            raise ValueError("provide exactly one of transcript or audio")
        if audio is not None:
            audio_bytes, sidecar = decode_audio_payload(audio)
            transcript = self.asr.transcribe(audio_bytes, sidecar)
        assert transcript is not None

        if state.mode == MODE_RPG:
            request = build_gm_request(state, self.config)
            response = request_with_retry(
                self.provider, request, state, self.config
            )
            new_state, record = advance_rpg_turn(
                state, transcript, response, self.config
            )
            events = [(KIND_TURN_COMPLETED, rpg_turn_payload(record, response))]
        else:
            prompt = classroom_prompt(state, learner_sentence=transcript)
            preview = copy.deepcopy(state)
            preview.usage = apply_detections(
                preview.usage,
                detect(transcript, state.practice, self.config.inventory),
            )
            reply = build_classroom_reply(prompt, preview, self.config)
            new_state, record = advance_classroom_turn(
                state, transcript, reply, self.config
            )
            events = [(KIND_TURN_COMPLETED, classroom_turn_payload(record))]

        if record.reminder:
            events.append(
                (
                    KIND_REMINDER_SHOWN,
                    {
                        "turn_index": record.reminder.turn_index,
                        "phrase_ids": list(record.reminder.phrase_ids),
                    },
                )
            )
        audio_ref = self.tts.synthesize(
            record.gm_narrative, state.session_id, record.turn_index
        )

        # Commit point: everything above may fail without side effects.
        runtime.log.append_many(events)
        runtime.state = new_state
        runtime.records.append(record)
        runtime.last_audio_ref = audio_ref
        runtime.view = self._build_view(runtime)
        return runtime.view

    # -- assessment flows -----------------------------------------------------------

    def submit_pretest(self, session_id: str, items: list[dict]) -> dict:
        runtime = self._get(session_id)
        if runtime.state.turn_index > 0:
            raise ValueError("pretest must precede the first turn")
        ratings = {}
        elicited = {}
        for item in items:
            pid = item["phrase_id"]
            ratings[pid] = FamiliarityRating(pid, item["level"])
            if item.get("definition") or item.get("sentence"):
                elicited[pid] = Elicitation(
                    definition_text=item.get("definition", ""),
                    sentence_text=item.get("sentence", ""),
                )
        assessed, d_total, s_total = run_pretest(
            runtime.state.practice.phrase_ids,
            ratings,
            elicited,
            self.grader,
            self.config,
        )
        payloads = []
        for item in assessed:
            payloads.append(
                (
                    KIND_PRETEST_ITEM,
                    {
                        "phrase_id": item.phrase_id,
                        "level": ratings[item.phrase_id].level,
                        "definition_text": item.definition_text,
                        "sentence_text": item.sentence_text,
                        "definition_score": item.definition_score,
                        "sentence_score": item.sentence_score,
                        "rationale": item.grader_rationale,
                    },
                )
            )
        runtime.log.append_many(payloads)
        runtime.pretest_done = True
        return {
            "definition_total": d_total.total,
            "sentence_total": s_total.total,
            "items": [p for _, p in payloads],
        }

    def get_feedback(self, session_id: str) -> dict:
        runtime = self._get(session_id)
        if runtime.state.status != STATUS_FINISHED:
            raise SessionNotFinished(session_id)
        if runtime.feedback is None:
            report = build_feedback_report(
                runtime.state, runtime.records, self.feedback_grader, self.config
            )
            payload = _feedback_to_dict(report)
            if not runtime.closed:
                runtime.log.append(KIND_FEEDBACK_BUILT, payload)
            runtime.feedback = report
        return _feedback_to_dict(runtime.feedback)

    def submit_posttest(self, session_id: str, responses: list[dict]) -> dict:
        runtime = self._get(session_id)
        if runtime.state.status != STATUS_FINISHED:
            raise SessionNotFinished(session_id)
        if runtime.closed:
            raise SessionFinished("session record already closed by the survey")
        answers = {
            r["phrase_id"]: Elicitation(
                definition_text=r.get("definition", ""),
                sentence_text=r.get("sentence", ""),
            )
            for r in responses
        }
        items, d_total, s_total, feedback = run_posttest(
            runtime.state.practice, answers, self.grader, self.config
        )
        payloads = []
        for item in items:
            payloads.append(
                (
                    KIND_POSTTEST_ITEM,
                    {
                        "phrase_id": item.phrase_id,
                        "definition_text": item.definition_text,
                        "sentence_text": item.sentence_text,
                        "definition_score": item.definition_score,
                        "sentence_score": item.sentence_score,
                        "rationale": item.grader_rationale,
                        "feedback": feedback[item.phrase_id],
                    },
                )
            )
        runtime.log.append_many(payloads)
        runtime.posttest_done = True
        return {
            "definition_total": d_total.total,
            "sentence_total": s_total.total,
            "items": [p for _, p in payloads],
        }

    def submit_survey(self, session_id: str, answers: list[int]) -> dict:
        """Record the 4-question engagement survey and seal the session log."""
        runtime = self._get(session_id)
        if runtime.state.status != STATUS_FINISHED:
            raise SessionNotFinished(session_id)
        if runtime.closed:
            raise SessionFinished("survey already recorded")
        if not runtime.posttest_done:
            raise SessionNotFinished("survey comes after the post-test")
        if len(answers) != 4 or not all(1 <= a <= 5 for a in answers):
            raise ValueError("survey needs four answers, each 1..5")
        group = "rpg" if runtime.state.mode == MODE_RPG else "control"
        outcome = runtime.state.outcome
        runtime.log.append_many(
            [
                (
                    KIND_SURVEY_RECORDED,
                    {
                        "participant_id": session_id,
                        "group": group,
                        "answers": list(answers),
                    },
                ),
                (
                    KIND_FINISHED,
                    {
                        "outcome": (
                            {
                                "ending_label": outcome.ending_label,
                                "checkpoint_total": outcome.checkpoint_total,
                                "master_assessment": outcome.master_assessment,
                            }
                            if outcome
                            else None
                        )
                    },
                ),
            ]
        )
        runtime.closed = True
        return {"recorded": True}

    # -- views ---------------------------------------------------------------------

    def _build_view(self, runtime: SessionRuntime) -> dict:
        state = runtime.state
        last = runtime.records[-1] if runtime.records else None
        view = {
            "session_id": state.session_id,
            "mode": state.mode,
            "status": state.status,
            "turn_index": state.turn_index,
            "narrative": last.gm_narrative if last else "",
            "subtitle": last.gm_narrative if last else "",
            "audio_ref": runtime.last_audio_ref,
            "practice_box": practice_box_view(state.usage, self.config),
            "reminder": (
                {
                    "turn_index": last.reminder.turn_index,
                    "phrase_ids": list(last.reminder.phrase_ids),
                }
                if last and last.reminder
                else None
            ),
            "outcome": (
                {
                    "ending_label": state.outcome.ending_label,
                    "checkpoint_total": state.outcome.checkpoint_total,
                    "master_assessment": state.outcome.master_assessment,
                }
                if state.outcome
                else None
            ),
        }
        if state.mode == MODE_RPG:
            scene_id = (
                last.scene_id if last else resolve_scene(state.location, self.config).id
            )
            scene = next(s for s in self.config.scenes if s.id == scene_id)
            npc = self.config.npc(last.speaking_npc_id) if last else None
            view.update(
                {
                    "phase": state.phase,
                    "location": state.location,
                    "hero_id": state.hero_id,
                    "party": sorted(state.party),
                    "intro_video_ref": self.config.intro_video_ref,
                    "scene": {"id": scene.id, "image_ref": scene.image_ref},
                    "speaking_npc": (
                        {
                            "id": npc.id,
                            "name": npc.name,
                            "portrait_asset": npc.portrait_asset,
                        }
                        if npc
                        else None
                    ),
                }
            )
        else:
            if state.status == STATUS_FINISHED:
                pending = None
            else:
                spec = classroom_prompt(state)
                pending = {"kind": spec.kind, "phrase_id": spec.phrase_id}
            view["prompt"] = pending
        return view


def _feedback_to_dict(report: FeedbackReport) -> dict:
    return {
        "general": dict(report.general),
        "specific": [
            {
                "sentence": s.sentence,
                "correction": s.correction,
                "explanation": s.explanation,
                "category": s.category,
            }
            for s in report.specific
        ],
        "formative": [
            {
                "phrase_id": f.phrase_id,
                "used": f.used,
                "count": f.count,
                "correctness": f.correctness,
                "appropriateness": f.appropriateness,
                "revised_example": f.revised_example,
            }
            for f in report.formative
        ],
    }


# --- HTTP facade -------------------------------------------------------------------


def create_app(service: SessionService):
    """FastAPI application exposing the service over HTTP/JSON."""
    from fastapi import FastAPI
    from fastapi.responses import JSONResponse
    from pydantic import BaseModel, Field

    from .errors import (
        AsrFailure,
        ContractViolation,
        GraderFailure,
        IllegalTransition,
        IncompleteResponses,
        InvalidHero,
        InvalidPracticeSet,
        MissingElicitation,
        PhraseQuestError,
        ProviderFailure,
        TransportError,
        WrongSelectionCount,
    )

    app = FastAPI(title="phrasequest", version="0.1.0")

    class CreateSessionBody(BaseModel):
        mode: str
        practice: list[str]
        hero_id: str | None = None

    class AudioPayload(BaseModel):
        data_b64: str = ""
        sidecar_text: str | None = None

    class TurnBody(BaseModel):
        transcript: str | None = None
        audio: AudioPayload | None = None

    class PretestItem(BaseModel):
        phrase_id: str
        level: str
        definition: str | None = None
        sentence: str | None = None

    class PretestBody(BaseModel):
        items: list[PretestItem]

    class PosttestItem(BaseModel):
        phrase_id: str
        definition: str
        sentence: str

    class PosttestBody(BaseModel):
        responses: list[PosttestItem]

    class SurveyBody(BaseModel):
        answers: list[int] = Field(min_length=4, max_length=4)

    status_map = [
        (NotFound, 404),
        (Busy, 409),
        (SessionFinished, 409),
        (SessionNotFinished, 409),
        (ProviderFailure, 502),
        (TransportError, 502),
        (GraderFailure, 502),
        (IllegalTransition, 502),
        (ContractViolation, 502),
        (AsrFailure, 422),
        (InvalidHero, 422),
        (InvalidPracticeSet, 422),
        (WrongSelectionCount, 422),
        (MissingElicitation, 422),
        (IncompleteResponses, 422),
    ]

    @app.exception_handler(PhraseQuestError)
    async def _handle_domain_error(request, exc: PhraseQuestError):
        for klass, status in status_map:
            if isinstance(exc, klass):
                return JSONResponse(
                    status_code=status,
                    content={"error": type(exc).__name__, "detail": str(exc)},
                )
        return JSONResponse(
            status_code=500,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.exception_handler(ValueError)
    async def _handle_value_error(request, exc: ValueError):
        return JSONResponse(
            status_code=422, content={"error": "ValueError", "detail": str(exc)}
        )

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/config")
    def config_route():
        config = service.config
        return {
            "inventory": [
                {
                    "id": p.id,
                    "canonical": p.canonical,
                    "meaning": p.meaning,
                    "example": p.example,
                }
                for p in config.inventory.phrases
            ],
            "heroes": [
                {
                    "id": h.id,
                    "name": h.name,
                    "description": h.description,
                    "portrait_asset": h.portrait_asset,
                }
                for h in config.heroes
            ],
            "intro_video_ref": config.intro_video_ref,
        }

    @app.post("/sessions", status_code=201)
    def create_session_route(body: CreateSessionBody):
        return service.create(body.mode, body.practice, body.hero_id)

    @app.get("/sessions/{session_id}")
    def get_session_route(session_id: str):
        return service.get_view(session_id)

    @app.post("/sessions/{session_id}/turns")
    def submit_turn_route(session_id: str, body: TurnBody):
        audio = body.audio.model_dump() if body.audio is not None else None
        return service.submit_turn(session_id, body.transcript, audio)

    @app.post("/sessions/{session_id}/pretest")
    def pretest_route(session_id: str, body: PretestBody):
        return service.submit_pretest(
            session_id, [item.model_dump() for item in body.items]
        )

    @app.post("/sessions/{session_id}/posttest")
    def posttest_route(session_id: str, body: PosttestBody):
        return service.submit_posttest(
            session_id, [item.model_dump() for item in body.responses]
        )

    @app.get("/sessions/{session_id}/feedback")
    def feedback_route(session_id: str):
        return service.get_feedback(session_id)

    @app.post("/sessions/{session_id}/survey")
    def survey_route(session_id: str, body: SurveyBody):
        return service.submit_survey(session_id, body.answers)

    return app
