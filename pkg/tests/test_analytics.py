from __future__ import annotations

import random

import pytest

from phrasequest.analytics import (
    AssessmentSummary,
    GroupReport,
    SurveyResponse,
    build_group_report,
    growth_rate,
    likert_means,
    mean_usage,
    render_tables,
)
from phrasequest.engine import SessionState
from phrasequest.errors import DegeneratePre, EmptyGroup, InconsistentIds
from phrasequest.tracker import UsageState

from .helpers import DEFAULT_PRACTICE

# Back-solved (pre, post) pairs reproducing the published growth-rate table:
# post = rate * (5 - pre) + pre, using the reported group pre-test means
# 1.12 (control) and 1.50 (rpg). Hand checks:
#   (4.309 - 1.12) / (5 - 1.12) = 3.189 / 3.88 = 0.82190...
#   (4.580 - 1.50) / (5 - 1.50) = 3.080 / 3.50 = 0.88
#   (4.686 - 1.12) / (5 - 1.12) = 3.566 / 3.88 = 0.91907...
#   (4.832 - 1.50) / (5 - 1.50) = 3.332 / 3.50 = 0.952
GROWTH_FIXTURES = [
    ("control", "definition", 1.12, 4.309, 0.822),
    ("rpg", "definition", 1.50, 4.580, 0.880),
    ("control", "sentence", 1.12, 4.686, 0.919),
    ("rpg", "sentence", 1.50, 4.832, 0.952),
]

# Documented synthetic cohorts for the usage table. Hand means:
#   rpg: (10+10+10+10+10+11+10) / 7 = 71 / 7 = 10.142857...
#   control: (6+6+6+6+6+6+6+7) / 8 = 49 / 8 = 6.125
USAGE_TOTALS = {
    "rpg": [10, 10, 10, 10, 10, 11, 10],
    "control": [6, 6, 6, 6, 6, 6, 6, 7],
}
USAGE_EXPECTED = {"rpg": 10.14, "control": 6.12}

# Survey cohorts whose per-question sums reproduce the plotted group means.
#   control sums (29, 33, 31, 33) over n=8 -> 3.625, 4.125, 3.875, 4.125
#   rpg sums (30, 32, 33, 33) over n=7 -> 4.285714..., 4.571428..., 4.714285... x2
CONTROL_ANSWERS = [
    (4, 5, 4, 5), (4, 4, 4, 4), (4, 4, 4, 4), (4, 4, 4, 4),
    (4, 4, 4, 4), (3, 4, 4, 4), (3, 4, 4, 4), (3, 4, 3, 4),
]
RPG_ANSWERS = [
    (5, 5, 5, 5), (5, 5, 5, 5), (4, 5, 5, 5), (4, 5, 5, 5),
    (4, 4, 5, 5), (4, 4, 4, 4), (4, 4, 4, 4),
]
LIKERT_EXPECTED = {
    "control": (3.625, 4.125, 3.875, 4.125),
    "rpg": (4.285714, 4.571428, 4.714285, 4.714285),
}


def finished_session(sid: str, mode: str, usage_total: int) -> SessionState:
    base, rem = divmod(usage_total, 5)
    counts = [base + (1 if i < rem else 0) for i in range(5)]
    return SessionState(
        session_id=sid,
        mode=mode,
        practice=None,
        hero_id="ranger" if mode == "rpg" else None,
        turn_index=12,
        phase=3 if mode == "rpg" else None,
        location="citadel-hall" if mode == "rpg" else None,
        party=set(),
        decision_history=[],
        checkpoint_values={1: 2, 2: 2, 3: 2} if mode == "rpg" else {},
        usage={
            pid: UsageState(pid, count)
            for pid, count in zip(DEFAULT_PRACTICE, counts)
        },
        status="finished",
    )


def usage_cohort(group: str) -> list[SessionState]:
    mode = "rpg" if group == "rpg" else "classroom"
    return [
        finished_session(f"{group}-{i}", mode, total)
        for i, total in enumerate(USAGE_TOTALS[group])
    ]


def survey_cohort() -> list[SurveyResponse]:
    out = [
        SurveyResponse(f"control-{i}", "control", answers)
        for i, answers in enumerate(CONTROL_ANSWERS)
    ]
    out += [
        SurveyResponse(f"rpg-{i}", "rpg", answers)
        for i, answers in enumerate(RPG_ANSWERS)
    ]
    return out


# --- growth rate ----------------------------------------------------------------

@pytest.mark.parametrize("group,task,pre,post,expected", GROWTH_FIXTURES)
def test_growth_rate_reproduces_published_values(group, task, pre, post, expected):
    assert growth_rate(pre, post) == pytest.approx(expected, abs=1e-3)


def test_growth_rate_zero_gain_on_grid():
    for step in range(10):  # 0.0 .. 4.5
        pre = step * 0.5
        assert growth_rate(pre, pre) == 0.0


def test_growth_rate_full_gain_on_grid():
    for step in range(10):
        pre = step * 0.5
        assert growth_rate(pre, 5.0) == 1.0


def test_growth_rate_strictly_increasing_in_post():
    for pre_step in range(10):
        pre = pre_step * 0.5
        values = [growth_rate(pre, post_step * 0.5) for post_step in range(11)]
        assert all(a < b for a, b in zip(values, values[1:]))


def test_growth_rate_regression_goes_negative():
    assert growth_rate(3.0, 2.0) == pytest.approx(-0.5)


def test_growth_rate_ceiling_pre_is_degenerate():
    with pytest.raises(DegeneratePre):
        growth_rate(5.0, 5.0)


def test_growth_rate_bounds_checked():
    with pytest.raises(ValueError):
        growth_rate(-0.5, 2)
    with pytest.raises(ValueError):
        growth_rate(1, 5.5)


# --- usage ------------------------------------------------------------------------

def test_mean_usage_reproduces_published_rpg_value():
    assert mean_usage(usage_cohort("rpg")) == pytest.approx(10.14, abs=0.01)


def test_mean_usage_reproduces_published_control_value():
    assert mean_usage(usage_cohort("control")) == pytest.approx(6.12, abs=0.01)


def test_mean_usage_single_silent_session():
    assert mean_usage([finished_session("s", "rpg", 0)]) == 0.0


def test_mean_usage_empty_group():
    with pytest.raises(EmptyGroup):
        mean_usage([])


def test_mean_usage_rejects_unfinished():
    session = finished_session("s", "rpg", 5)
    session.status = "active"
    with pytest.raises(ValueError):
        mean_usage([session])


def test_mean_usage_permutation_invariant():
    cohort = usage_cohort("rpg")
    shuffled = cohort[:]
    random.Random(3).shuffle(shuffled)
    assert mean_usage(cohort) == mean_usage(shuffled)


# --- likert -------------------------------------------------------------------------

def test_likert_means_reproduce_plotted_control_values():
    means = likert_means(survey_cohort(), "control")
    for got, expected in zip(means, LIKERT_EXPECTED["control"]):
        assert got == pytest.approx(expected, abs=1e-3)


def test_likert_means_reproduce_plotted_rpg_values():
    means = likert_means(survey_cohort(), "rpg")
    for got, expected in zip(means, LIKERT_EXPECTED["rpg"]):
        assert got == pytest.approx(expected, abs=1e-3)


def test_likert_all_threes():
    responses = [SurveyResponse(f"p{i}", "rpg", (3, 3, 3, 3)) for i in range(5)]
    assert likert_means(responses, "rpg") == (3.0, 3.0, 3.0, 3.0)


def test_likert_empty_group():
    with pytest.raises(EmptyGroup):
        likert_means(survey_cohort(), "nonexistent")


def test_likert_permutation_invariant():
    cohort = survey_cohort()
    shuffled = cohort[:]
    random.Random(9).shuffle(shuffled)
    assert likert_means(cohort, "rpg") == likert_means(shuffled, "rpg")


def test_survey_response_validates_scale():
    with pytest.raises(ValueError):
        SurveyResponse("p", "rpg", (0, 3, 3, 3))
    with pytest.raises(ValueError):
        SurveyResponse("p", "rpg", (1, 3, 3, 6))


# --- group report ---------------------------------------------------------------------

def full_inputs():
    sessions = usage_cohort("control") + usage_cohort("rpg")
    surveys = survey_cohort()
    assessments = []
    for group, pre_d, post_d, pre_s, post_s in (
        ("control", 1.12, 4.309, 1.12, 4.686),
        ("rpg", 1.50, 4.580, 1.50, 4.832),
    ):
        n = len(USAGE_TOTALS[group])
        for i in range(n):
            assessments.append(
                AssessmentSummary(f"{group}-{i}", pre_d, pre_s, post_d, post_s)
            )
    return assessments, sessions, surveys


def test_group_report_composes_all_metrics():
    report = build_group_report(*full_inputs())
    control = report.groups["control"]
    rpg = report.groups["rpg"]
    assert control.growth_definition == pytest.approx(0.822, abs=1e-3)
    assert control.growth_sentence == pytest.approx(0.919, abs=1e-3)
    assert rpg.growth_definition == pytest.approx(0.880, abs=1e-3)
    assert rpg.growth_sentence == pytest.approx(0.952, abs=1e-3)
    assert control.mean_usage == pytest.approx(6.12, abs=0.01)
    assert rpg.mean_usage == pytest.approx(10.14, abs=0.01)
    assert control.likert["q1"] == pytest.approx(3.625, abs=1e-3)
    assert rpg.likert["q4"] == pytest.approx(4.714285, abs=1e-3)


def test_group_report_tolerates_one_empty_group():
    assessments, sessions, surveys = full_inputs()
    only_rpg_sessions = [s for s in sessions if s.mode == "rpg"]
    only_rpg = [a for a in assessments if a.participant_id.startswith("rpg")]
    only_rpg_surveys = [s for s in surveys if s.group == "rpg"]
    report = build_group_report(only_rpg, only_rpg_sessions, only_rpg_surveys)
    control = report.groups["control"]
    assert control.mean_usage is None
    assert "mean_usage: EmptyGroup" in control.notes
    assert report.groups["rpg"].mean_usage == pytest.approx(10.14, abs=0.01)


def test_group_report_flags_ceiling_pre():
    sessions = [finished_session("p0", "rpg", 10)]
    assessments = [AssessmentSummary("p0", 5.0, 2.0, 5.0, 4.0)]
    report = build_group_report(assessments, sessions, [])
    assert report.groups["rpg"].growth_definition is None
    assert "growth_definition: already at ceiling" in report.groups["rpg"].notes


def test_group_report_rejects_unknown_survey_participant():
    assessments, sessions, surveys = full_inputs()
    surveys.append(SurveyResponse("stranger", "rpg", (5, 5, 5, 5)))
    with pytest.raises(InconsistentIds):
        build_group_report(assessments, sessions, surveys)


def test_group_report_rejects_group_mismatch():
    assessments, sessions, surveys = full_inputs()
    surveys[0] = SurveyResponse("control-0", "rpg", (4, 4, 4, 4))
    with pytest.raises(InconsistentIds):
        build_group_report(assessments, sessions, surveys)


def test_report_json_round_trip():
    report = build_group_report(*full_inputs())
    assert GroupReport.from_json(report.to_json()) == report


def test_rendered_tables_round_to_reporting_precision():
    text = render_tables(build_group_report(*full_inputs()))
    assert "0.822" in text
    assert "0.952" in text
    assert "6.12" in text
    assert "10.14" in text
    assert "3.625" in text
