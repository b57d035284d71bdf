"""Operational entry points: serve, simulate, replay, analyze."""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .analytics import (
    AssessmentSummary,
    GroupReport,
    SurveyResponse,
    build_group_report,
    render_tables,
)
from .config import load_config, load_config_file
from .domain import GameConfig
from .errors import CorruptLog, PhraseQuestError, TransportError
from .events import replay
from .gamemaster import ChatCompletionProvider, ScriptedProvider
from .service import SessionService
from .speech import HttpAsr, HttpTts, SilentTts, TextPassthroughAsr

DEFAULT_PRACTICE = [
    "wing-it",
    "shake-off",
    "piece-of-cake",
    "break-the-ice",
    "call-it-a-day",
]

RPG_TRANSCRIPTS = [
    "I'd rather not wing it, let's gather the facts before we leave.",
    "Breaking the ice with Rella should help, I ask her about the trail.",
    "Buying rope sounds like a piece of cake, I haggle with Botho.",
    "Let's call it a day in the village and regroup at the watchtower.",
    "I shake off my doubts and step onto the forest path.",
    "If the ford is flooded we just wing it with a rope bridge.",
    "A riddle? Piece of cake. I answer it out loud.",
    "We shake off the cold and march for the gate.",
    "I break the ice with the nervous scouts by sharing my rations.",
    "We won't call it a day yet, we fortify the camp first.",
    "I rally everyone around the fire for the final push.",
    "We stand together and I lead the charge into the hall.",
]

CLASSROOM_TRANSCRIPTS = [
    "Hello, I'm ready to start.",
    "Okay, I think I understand the first one.",
    "When I forget my notes, I just wing it.",
    "Got it, next word please.",
    "A hot shower helps me shake off the stress.",
    "Alright, I see what that means.",
    "That exam was a piece of cake for my roommate.",
    "Sure, let's continue.",
    "I break the ice at parties, you break the ice at work.",
    "Understood, one more to go.",
    "We finished the lab report and decided to call it a day.",
    "Thanks, this was helpful.",
]

POSTTEST_RESPONSES = [
    {
        "phrase_id": "wing-it",
        "definition": "to improvise when you have no preparation",
        "sentence": "My slides were gone, so I had to wing it and improvise.",
    },
    {
        "phrase_id": "shake-off",
        "definition": "to get rid of stress and recover from something",
        "sentence": "A long run helps me shake off the stress.",
    },
    {
        "phrase_id": "piece-of-cake",
        "definition": "something very easy that takes no effort",
        "sentence": "The setup was a piece of cake, really easy.",
    },
    {
        "phrase_id": "break-the-ice",
        "definition": "to ease the tension when people first meet",
        "sentence": "I told a story to break the ice and cut the tension.",
    },
    {
        "phrase_id": "call-it-a-day",
        "definition": "to stop working and finish for the day",
        "sentence": "We were exhausted, so we chose to call it a day and stop.",
    },
]


def packaged_config_text() -> str:
    return resources.files("phrasequest").joinpath("data/game.yaml").read_text("utf-8")


def packaged_demo_provider() -> ScriptedProvider:
    import yaml

    text = resources.files("phrasequest").joinpath("data/gm_demo.yaml").read_text("utf-8")
    return ScriptedProvider.from_entries(yaml.safe_load(text)["replies"])


def _load_config(path: str | None) -> GameConfig:
    if path:
        return load_config_file(path)
    return load_config(packaged_config_text())


def _build_provider(args, config: GameConfig):
    if args.provider == "scripted":
        if args.gm_fixture:
            return ScriptedProvider.from_fixture_file(args.gm_fixture)
        return packaged_demo_provider()
    llm = config.llm
    if llm is None or not llm.endpoint or not llm.model:
        raise TransportError(
            "external provider needs an 'llm: {endpoint, model}' config section"
        )
    return ChatCompletionProvider(llm.endpoint, llm.model)


def cmd_serve(args) -> int:
    config = _load_config(args.config)
    try:
        provider = _build_provider(args, config)
        asr = (
            HttpAsr(args.asr_endpoint)
            if args.asr == "external"
            else TextPassthroughAsr()
        )
        tts = (
            HttpTts(args.tts_endpoint, Path(args.logs) / "media")
            if args.tts == "external"
            else SilentTts()
        )
    except TransportError as exc:
        print(f"startup error: {exc}", file=sys.stderr)
        return 2
    service = SessionService(config, provider, log_dir=args.logs, asr=asr, tts=tts)
    from .service import create_app

    app = create_app(service)
    if args.frontend:
        from starlette.staticfiles import StaticFiles

        app.mount("/app", StaticFiles(directory=args.frontend, html=True), name="app")
    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def run_simulation(config: GameConfig, provider, out_dir: str | Path) -> dict:
    """Play one full RPG and one full classroom session end to end.

    Both sessions run through the same service layer the HTTP API uses, so
    their logs are real production logs: pretest, twelve turns, feedback,
    post-test, survey.
    """
    service = SessionService(config, provider, log_dir=out_dir)
    summary = {}
    for mode, transcripts, survey in (
        ("rpg", RPG_TRANSCRIPTS, [5, 5, 5, 4]),
        ("classroom", CLASSROOM_TRANSCRIPTS, [4, 4, 3, 4]),
    ):
        view = service.create(
            mode, DEFAULT_PRACTICE, hero_id="ranger" if mode == "rpg" else None
        )
        sid = view["session_id"]
        service.submit_pretest(
            sid,
            [
                {"phrase_id": pid, "level": "completely_unfamiliar"}
                for pid in DEFAULT_PRACTICE
            ],
        )
        for transcript in transcripts:
            view = service.submit_turn(sid, transcript=transcript)
        service.get_feedback(sid)
        service.submit_posttest(sid, POSTTEST_RESPONSES)
        service.submit_survey(sid, survey)
        summary[mode] = {
            "session_id": sid,
            "log": str(Path(out_dir) / f"{sid}.jsonl"),
            "status": view["status"],
            "outcome": view["outcome"],
        }
    return summary


def cmd_simulate(args) -> int:
    config = _load_config(args.config)
    provider = (
        ScriptedProvider.from_fixture_file(args.gm_fixture)
        if args.gm_fixture
        else packaged_demo_provider()
    )
    summary = run_simulation(config, provider, args.out)
    print(json.dumps(summary, indent=2))
    return 0


def cmd_replay(args) -> int:
    try:
        result = replay(args.log)
    except CorruptLog as exc:
        print(f"corrupt log: {exc}", file=sys.stderr)
        return 1
    state = result.state
    print(
        json.dumps(
            {
                "session_id": state.session_id,
                "mode": state.mode,
                "turn_index": state.turn_index,
                "status": state.status,
                "location": state.location,
                "party": sorted(state.party),
                "checkpoint_values": state.checkpoint_values,
                "usage": {pid: u.count for pid, u in state.usage.items()},
                "outcome": (
                    {
                        "ending_label": state.outcome.ending_label,
                        "checkpoint_total": state.outcome.checkpoint_total,
                    }
                    if state.outcome
                    else None
                ),
            },
            indent=2,
        )
    )
    return 0


def analyze_logs(log_dir: str | Path) -> GroupReport:
    """Replay every session log in a directory and aggregate the cohort."""
    paths = sorted(Path(log_dir).glob("*.jsonl"))
    if not paths:
        raise FileNotFoundError(f"no .jsonl session logs under {log_dir}")
    sessions = []
    assessments = []
    surveys = []
    for path in paths:
        result = replay(path)
        if result.state.status != "finished":
            continue
        sessions.append(result.state)
        if result.pretest_items and result.posttest_items:
            assessments.append(
                AssessmentSummary(
                    participant_id=result.state.session_id,
                    pre_definition=sum(
                        i["definition_score"] for i in result.pretest_items
                    ),
                    pre_sentence=sum(i["sentence_score"] for i in result.pretest_items),
                    post_definition=sum(
                        i["definition_score"] for i in result.posttest_items
                    ),
                    post_sentence=sum(
                        i["sentence_score"] for i in result.posttest_items
                    ),
                )
            )
        for record in result.surveys:
            surveys.append(
                SurveyResponse(
                    participant_id=record["participant_id"],
                    group=record["group"],
                    answers=tuple(record["answers"]),
                )
            )
    return build_group_report(assessments, sessions, surveys)


def cmd_analyze(args) -> int:
    try:
        report = analyze_logs(args.logs)
    except (FileNotFoundError, CorruptLog, PhraseQuestError) as exc:
        print(f"analyze failed: {exc}", file=sys.stderr)
        return 1
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(report.to_json(), encoding="utf-8")
    print(render_tables(report))
    print(f"report written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phrasequest",
        description="Slang-practice sessions: serve the API, simulate, replay, analyze.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP/JSON session API")
    serve.add_argument("--config", help="game config YAML (default: packaged fixture)")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--provider", choices=["scripted", "external"], default="scripted")
    serve.add_argument("--gm-fixture", help="scripted replies YAML for --provider scripted")
    serve.add_argument("--asr", choices=["stub", "external"], default="stub")
    serve.add_argument("--asr-endpoint", default="")
    serve.add_argument("--tts", choices=["stub", "external"], default="stub")
    serve.add_argument("--tts-endpoint", default="")
    serve.add_argument("--logs", default="logs")
    serve.add_argument("--frontend", help="directory with the built browser client")
    serve.set_defaults(func=cmd_serve)

    simulate = sub.add_parser(
        "simulate", help="play one scripted RPG and one classroom session, writing logs"
    )
    simulate.add_argument("--config")
    simulate.add_argument("--gm-fixture")
    simulate.add_argument("--out", default="logs")
    simulate.set_defaults(func=cmd_simulate)

    replay_cmd = sub.add_parser("replay", help="rebuild a session from its event log")
    replay_cmd.add_argument("log")
    replay_cmd.set_defaults(func=cmd_replay)

    analyze = sub.add_parser("analyze", help="aggregate session logs into a group report")
    analyze.add_argument("--logs", required=True)
    analyze.add_argument("--out", required=True)
    analyze.set_defaults(func=cmd_analyze)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
