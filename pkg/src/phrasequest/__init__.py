"""Slang practice sessions: a game-master RPG condition, a turn-scheduled AI
classroom, and the surrounding assessment, feedback, and analytics pipeline."""

from .analytics import (
    AssessmentSummary,
    GroupReport,
    SurveyResponse,
    build_group_report,
    growth_rate,
    likert_means,
    mean_usage,
)
from .config import dump_config, load_config, load_config_file
from .domain import GameConfig, PracticeSet, resolve_scene
from .engine import (
    SessionState,
    advance_classroom_turn,
    advance_rpg_turn,
    classroom_prompt,
    compute_outcome,
    create_session,
)
from .events import EventLog, replay
from .gamemaster import (
    ChatCompletionProvider,
    GMRequest,
    GMResponse,
    ScriptedProvider,
    build_gm_request,
    parse_gm_response,
    recast_coverage,
    request_with_retry,
)
from .service import SessionService, create_app
from .tracker import apply_detections, detect, normalize, reminder_due

__all__ = [
    "AssessmentSummary",
    "ChatCompletionProvider",
    "EventLog",
    "GMRequest",
    "GMResponse",
    "GameConfig",
    "GroupReport",
    "PracticeSet",
    "ScriptedProvider",
    "SessionService",
    "SessionState",
    "SurveyResponse",
    "advance_classroom_turn",
    "advance_rpg_turn",
    "apply_detections",
    "build_gm_request",
    "build_group_report",
    "classroom_prompt",
    "compute_outcome",
    "create_app",
    "create_session",
    "detect",
    "dump_config",
    "growth_rate",
    "likert_means",
    "load_config",
    "load_config_file",
    "mean_usage",
    "normalize",
    "parse_gm_response",
    "recast_coverage",
    "reminder_due",
    "replay",
    "request_with_retry",
    "resolve_scene",
]

__version__ = "0.1.0"
