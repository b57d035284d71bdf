"""Cohort analytics over finished sessions, assessments, and surveys.

Computes the ceiling-adjusted growth rate (post minus pre over headroom),
mean in-activity target-phrase usage, and per-question survey means, then
renders them as the report tables. All math is plain batch arithmetic over
participant records; nothing here mutates session state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .engine import MODE_RPG, STATUS_FINISHED, SessionState
from .errors import DegeneratePre, EmptyGroup, InconsistentIds

MAX_SCORE = 5.0

GROUP_CONTROL = "control"
GROUP_RPG = "rpg"
GROUP_LABELS = {GROUP_CONTROL: "Control Group", GROUP_RPG: "RPG Group"}

SURVEY_QUESTIONS = ("q1", "q2", "q3", "q4")


@dataclass(frozen=True)
class SurveyResponse:
    participant_id: str
    group: str
    answers: tuple[int, int, int, int]

    def __post_init__(self):
        for value in self.answers:
            if not 1 <= value <= 5:
                raise ValueError(f"survey answer {value} outside the 1..5 scale")
        if self.group not in GROUP_LABELS:
            raise ValueError(f"unknown group {self.group!r}")


@dataclass(frozen=True)
class AssessmentSummary:
    """Per-participant task totals (each 0..5) for both stages."""

    participant_id: str
    pre_definition: float
    pre_sentence: float
    post_definition: float
    post_sentence: float


@dataclass
class GroupMetrics:
    n_sessions: int = 0
    growth_definition: float | None = None
    growth_sentence: float | None = None
    mean_usage: float | None = None
    likert: dict[str, float] | None = None
    notes: list[str] = field(default_factory=list)


@dataclass
class GroupReport:
    groups: dict[str, GroupMetrics]

    def to_json(self) -> str:
        payload = {
            "schema": "group-report@1",
            "groups": {
                name: {
                    "n_sessions": m.n_sessions,
                    "growth_definition": m.growth_definition,
                    "growth_sentence": m.growth_sentence,
                    "mean_usage": m.mean_usage,
                    "likert": m.likert,
                    "notes": m.notes,
                }
                for name, m in self.groups.items()
            },
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GroupReport":
        payload = json.loads(text)
        groups = {}
        for name, m in payload["groups"].items():
            groups[name] = GroupMetrics(
                n_sessions=m["n_sessions"],
                growth_definition=m["growth_definition"],
                growth_sentence=m["growth_sentence"],
                mean_usage=m["mean_usage"],
                likert=m["likert"],
                notes=list(m["notes"]),
            )
        return cls(groups=groups)


def growth_rate(pre: float, post: float, max_score: float = MAX_SCORE) -> float:
    """(post - pre) / (max - pre): gain normalized by the available headroom.

    Negative when the post score regresses; that is reported as-is. A pre
    score already at the maximum has no headroom and raises DegeneratePre so
    callers can report "already at ceiling" instead of a number.
    """
    if not 0 <= pre <= max_score:
        raise ValueError(f"pre score {pre} outside 0..{max_score}")
    if not 0 <= post <= max_score:
        raise ValueError(f"post score {post} outside 0..{max_score}")
    if pre == max_score:
        raise DegeneratePre("pre score already at ceiling; growth is undefined")
    return (post - pre) / (max_score - pre)


def mean_usage(sessions: list[SessionState]) -> float:
    """Mean total detected target-phrase uses per participant."""
    if not sessions:
        raise EmptyGroup("no sessions to average")
    totals = []
    for session in sessions:
        if session.status != STATUS_FINISHED:
            raise ValueError(f"session {session.session_id} is not finished")
        totals.append(sum(u.count for u in session.usage.values()))
    return sum(totals) / len(totals)


def likert_means(responses: list[SurveyResponse], group: str) -> tuple[float, ...]:
    """Per-question mean rating for one group, in q1..q4 order."""
    picked = [r for r in responses if r.group == group]
    if not picked:
        raise EmptyGroup(f"no survey responses for group {group!r}")
    n = len(picked)
    return tuple(sum(r.answers[i] for r in picked) / n for i in range(4))


def _group_of(session: SessionState) -> str:
    return GROUP_RPG if session.mode == MODE_RPG else GROUP_CONTROL


def build_group_report(
    assessments: list[AssessmentSummary],
    sessions: list[SessionState],
    surveys: list[SurveyResponse],
) -> GroupReport:
    """Cross-check ids, then compute every metric per group.

    Growth applies the rate formula to group-mean pre/post task scores. An
    empty group (or a ceiling pre-score) surfaces as a note on that metric
    while the rest of the report still computes.
    """
    session_group = {s.session_id: _group_of(s) for s in sessions}
    for summary in assessments:
        if summary.participant_id not in session_group:
            raise InconsistentIds(
                f"assessment participant {summary.participant_id!r} has no session"
            )
    for survey in surveys:
        if survey.participant_id not in session_group:
            raise InconsistentIds(
                f"survey participant {survey.participant_id!r} has no session"
            )
        if survey.group != session_group[survey.participant_id]:
            raise InconsistentIds(
                f"survey participant {survey.participant_id!r} tagged "
                f"{survey.group!r} but their session is "
                f"{session_group[survey.participant_id]!r}"
            )

    report = GroupReport(groups={})
    for group in (GROUP_CONTROL, GROUP_RPG):
        metrics = GroupMetrics()
        group_sessions = [s for s in sessions if _group_of(s) == group]
        metrics.n_sessions = len(group_sessions)

        try:
            metrics.mean_usage = mean_usage(group_sessions)
        except EmptyGroup:
            metrics.notes.append("mean_usage: EmptyGroup")

        group_assessments = [
            a for a in assessments if session_group[a.participant_id] == group
        ]
        if not group_assessments:
            metrics.notes.append("growth: EmptyGroup")
        else:
            n = len(group_assessments)
            for task, pre_attr, post_attr in (
                ("definition", "pre_definition", "post_definition"),
                ("sentence", "pre_sentence", "post_sentence"),
            ):
                pre = sum(getattr(a, pre_attr) for a in group_assessments) / n
                post = sum(getattr(a, post_attr) for a in group_assessments) / n
                try:
                    value = growth_rate(pre, post)
                except DegeneratePre:
                    metrics.notes.append(f"growth_{task}: already at ceiling")
                    value = None
                if task == "definition":
                    metrics.growth_definition = value
                else:
                    metrics.growth_sentence = value

        try:
            means = likert_means(surveys, group)
            metrics.likert = dict(zip(SURVEY_QUESTIONS, means))
        except EmptyGroup:
            metrics.notes.append("likert: EmptyGroup")

        report.groups[group] = metrics
    return report


def render_tables(report: GroupReport) -> str:
    """Human-readable tables mirroring the report's row/column layout."""

    def cell(value: float | None, digits: int) -> str:
        return f"{value:.{digits}f}" if value is not None else "n/a"

    control = report.groups.get(GROUP_CONTROL, GroupMetrics())
    rpg = report.groups.get(GROUP_RPG, GroupMetrics())
    lines = [
        "Normalized Growth Rate by Group and Task",
        f"{'Assessment Task':<30}{'Control Group':>15}{'RPG Group':>12}",
        f"{'Definition Accuracy':<30}{cell(control.growth_definition, 3):>15}"
        f"{cell(rpg.growth_definition, 3):>12}",
        f"{'Correct Sentence Generation':<30}{cell(control.growth_sentence, 3):>15}"
        f"{cell(rpg.growth_sentence, 3):>12}",
        "",
        "Mean Frequency of Target Vocabulary Usage",
        f"{'Group':<30}{'Mean Usage Count':>18}",
        f"{GROUP_LABELS[GROUP_CONTROL]:<30}{cell(control.mean_usage, 2):>18}",
        f"{GROUP_LABELS[GROUP_RPG]:<30}{cell(rpg.mean_usage, 2):>18}",
        "",
        "Engagement Survey (mean rating, 1-5)",
        f"{'Question':<10}{'Control Group':>15}{'RPG Group':>12}",
    ]
    for q in SURVEY_QUESTIONS:
        c = control.likert.get(q) if control.likert else None
        g = rpg.likert.get(q) if rpg.likert else None
        lines.append(f"{q.upper():<10}{cell(c, 3):>15}{cell(g, 3):>12}")
    notes = [
        f"[{name}] {note}"
        for name, metrics in report.groups.items()
        for note in metrics.notes
    ]
    if notes:
        lines.append("")
        lines.extend(notes)
    return "\n".join(lines) + "\n"
