"""Pre/post testing, the three-step scoring rubric, and the feedback report.

Scores are quantized to {0, 0.5, 1.0}: full credit for a correct and complete
answer, half for partial, none otherwise. Graders are pluggable; anything a
grader returns outside that set is rejected outright rather than clamped,
because a clamp would silently launder bad grader output into real scores.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Protocol

from .domain import GameConfig, PracticeSet, TargetPhrase
from .engine import STATUS_FINISHED, SessionState, TurnRecord
from .errors import (
    GraderFailure,
    IncompleteResponses,
    MissingElicitation,
    SessionNotFinished,
    WrongSelectionCount,
)
from .tracker import contains_phrase, normalize

VALID_SCORES = (0.0, 0.5, 1.0)

STAGE_PRE = "pre"
STAGE_POST = "post"
TASK_DEFINITION = "definition"
TASK_SENTENCE = "sentence"

LEVEL_UNFAMILIAR = "completely_unfamiliar"
LEVEL_SOMEWHAT = "somewhat_familiar"
LEVEL_CAN_GUESS = "can_guess"
FAMILIARITY_LEVELS = (LEVEL_UNFAMILIAR, LEVEL_SOMEWHAT, LEVEL_CAN_GUESS)

ERROR_CATEGORIES = ("grammar", "word-choice", "phrase-misuse")


@dataclass(frozen=True)
class FamiliarityRating:
    phrase_id: str
    level: str

    def __post_init__(self):
        if self.level not in FAMILIARITY_LEVELS:
            raise ValueError(f"unknown familiarity level {self.level!r}")


@dataclass(frozen=True)
class Elicitation:
    definition_text: str
    sentence_text: str


@dataclass
class AssessmentItem:
    phrase_id: str
    stage: str
    definition_text: str | None = None
    sentence_text: str | None = None
    definition_score: float | None = None
    sentence_score: float | None = None
    grader_rationale: str = ""


@dataclass(frozen=True)
class TaskScore:
    stage: str
    task: str
    total: float


@dataclass(frozen=True)
class SpecificFeedback:
    sentence: str
    correction: str
    explanation: str
    category: str


@dataclass(frozen=True)
class FormativeEntry:
    phrase_id: str
    used: bool
    count: int
    correctness: str
    appropriateness: str
    revised_example: str | None = None


@dataclass
class FeedbackReport:
    general: dict[str, int]
    specific: list[SpecificFeedback]
    formative: list[FormativeEntry]


class Grader(Protocol):
    """Scores a single definition or sentence for one target phrase."""

    def score(
        self, item_kind: str, phrase: TargetPhrase, learner_text: str
    ) -> tuple[float, str]:
        ...


class FeedbackGrader(Protocol):
    """Produces sentence-level corrections and per-phrase quality verdicts."""

    def find_errors(self, transcripts: list[str]) -> list[SpecificFeedback]:
        ...

    def assess_phrase_use(
        self, phrase: TargetPhrase, excerpts: list[str]
    ) -> tuple[str, str, str | None]:
        ...


class KeywordGrader:
    """Deterministic grader driven by each phrase's configured keywords.

    Definitions: 1.0 with two or more keyword hits, 0.5 with exactly one,
    else 0. Sentences must actually contain the phrase to score at all;
    phrase presence then counts as one hit on top of any keyword hits, so a
    bare-but-correct usage earns 0.5 and usage plus one keyword earns 1.0.
    """

    def score(
        self, item_kind: str, phrase: TargetPhrase, learner_text: str
    ) -> tuple[float, str]:
        hits = self._keyword_hits(phrase, learner_text)
        if item_kind == TASK_SENTENCE:
            if not contains_phrase(learner_text, phrase.variants):
                return 0.0, f"the sentence never uses '{phrase.canonical}'"
            hits += 1
        matched = f"{hits} meaning cue(s) matched"
        if hits >= 2:
            return 1.0, matched
        if hits == 1:
            return 0.5, matched
        return 0.0, matched

    def find_errors(self, transcripts: list[str]) -> list[SpecificFeedback]:
        return []

    def assess_phrase_use(
        self, phrase: TargetPhrase, excerpts: list[str]
    ) -> tuple[str, str, str | None]:
        if not excerpts:
            return "not applicable", "not applicable", phrase.example
        best = max(self._keyword_hits(phrase, text) for text in excerpts)
        if best >= 1:
            return "correct", "appropriate", None
        return "correct", "plausible but unsupported by context", phrase.example

    @staticmethod
    def _keyword_hits(phrase: TargetPhrase, text: str) -> int:
        tokens = normalize(text)
        hits = 0
        for keyword in phrase.meaning_keywords:
            kw_tokens = normalize(keyword)
            if not kw_tokens:
                continue
            for start in range(len(tokens) - len(kw_tokens) + 1):
                if tokens[start : start + len(kw_tokens)] == kw_tokens:
                    hits += 1
                    break
        return hits


class ChatCompletionGrader:
    """External rubric grader sharing the chat-completion transport.

    Prompts ask for a bare score in {0, 0.5, 1} plus one line of rationale;
    anything else comes back as GraderFailure.
    """

    PROMPT = (
        "Grade this learner {kind} for the expression '{phrase}' "
        "(meaning: {meaning}). Prioritize whether the intended meaning and the "
        "situational use are right; ignore grammar slips that do not block "
        "understanding. Answer with one line: a score of 0, 0.5 or 1, then a "
        "colon, then a short reason.\nLearner text: {text}"
    )

    def __init__(self, provider):
        self._provider = provider

    def score(
        self, item_kind: str, phrase: TargetPhrase, learner_text: str
    ) -> tuple[float, str]:
        prompt = self.PROMPT.format(
            kind=item_kind,
            phrase=phrase.canonical,
            meaning=phrase.meaning,
            text=learner_text,
        )
        try:
            raw = self._provider.complete(
                prompt, session_id="grader", turn_index=0, attempt=1
            )
        except Exception as exc:
            raise GraderFailure(f"grader call failed: {exc}") from exc
        head, _, rationale = raw.strip().partition(":")
        try:
            value = float(head.strip())
        except ValueError as exc:
            raise GraderFailure(f"unparseable grader output {raw!r}") from exc
        return value, rationale.strip()


def grade(
    item_kind: str, phrase: TargetPhrase, learner_text: str, grader: Grader
) -> tuple[float, str]:
    """Run one grading call and enforce the score set."""
    if item_kind not in (TASK_DEFINITION, TASK_SENTENCE):
        raise ValueError(f"unknown item kind {item_kind!r}")
    if not learner_text or not learner_text.strip():
        raise ValueError("learner_text must be non-empty")
    score, rationale = grader.score(item_kind, phrase, learner_text)
    if score not in VALID_SCORES:
        raise GraderFailure(
            f"grader returned {score!r}, outside the allowed set {VALID_SCORES}"
        )
    return score, rationale


def run_pretest(
    selections: tuple[str, ...],
    ratings: dict[str, FamiliarityRating],
    elicited: dict[str, Elicitation],
    grader: Grader,
    config: GameConfig,
) -> tuple[list[AssessmentItem], TaskScore, TaskScore]:
    """Score the initial assessment.

    Phrases rated completely unfamiliar score 0/0 with nothing elicited;
    any claim of partial knowledge must come with a definition and a sentence,
    which are graded like post-test answers.
    """
    if len(selections) != 5 or len(set(selections)) != 5:
        raise WrongSelectionCount(f"expected 5 distinct selections, got {len(selections)}")
    items = []
    for phrase_id in selections:
        if phrase_id not in ratings:
            raise MissingElicitation(f"no familiarity rating for {phrase_id!r}")
        phrase = config.inventory.get(phrase_id)
        rating = ratings[phrase_id]
        if rating.level == LEVEL_UNFAMILIAR:
            if phrase_id in elicited:
                raise MissingElicitation(
                    f"elicitation supplied for unfamiliar phrase {phrase_id!r}"
                )
            items.append(
                AssessmentItem(
                    phrase_id=phrase_id,
                    stage=STAGE_PRE,
                    definition_score=0.0,
                    sentence_score=0.0,
                    grader_rationale="rated completely unfamiliar; scored 0 by rule",
                )
            )
            continue
        if phrase_id not in elicited:
            raise MissingElicitation(
                f"phrase {phrase_id!r} rated {rating.level} but nothing elicited"
            )
        texts = elicited[phrase_id]
        d_score, d_why = grade(TASK_DEFINITION, phrase, texts.definition_text, grader)
        s_score, s_why = grade(TASK_SENTENCE, phrase, texts.sentence_text, grader)
        items.append(
            AssessmentItem(
                phrase_id=phrase_id,
                stage=STAGE_PRE,
                definition_text=texts.definition_text,
                sentence_text=texts.sentence_text,
                definition_score=d_score,
                sentence_score=s_score,
                grader_rationale=f"definition: {d_why}; sentence: {s_why}",
            )
        )
    return (
        items,
        TaskScore(STAGE_PRE, TASK_DEFINITION, sum(i.definition_score for i in items)),
        TaskScore(STAGE_PRE, TASK_SENTENCE, sum(i.sentence_score for i in items)),
    )


def run_posttest(
    practice: PracticeSet,
    responses: dict[str, Elicitation],
    grader: Grader,
    config: GameConfig,
) -> tuple[list[AssessmentItem], TaskScore, TaskScore, dict[str, str]]:
    """Grade the immediate post-test: all ten answers, plus brief feedback."""
    for phrase_id in practice.phrase_ids:
        response = responses.get(phrase_id)
        if (
            response is None
            or not response.definition_text.strip()
            or not response.sentence_text.strip()
        ):
            raise IncompleteResponses(f"missing post-test answers for {phrase_id!r}")
    items = []
    feedback: dict[str, str] = {}
    for phrase_id in practice.phrase_ids:
        phrase = config.inventory.get(phrase_id)
        response = responses[phrase_id]
        d_score, d_why = grade(TASK_DEFINITION, phrase, response.definition_text, grader)
        s_score, s_why = grade(TASK_SENTENCE, phrase, response.sentence_text, grader)
        items.append(
            AssessmentItem(
                phrase_id=phrase_id,
                stage=STAGE_POST,
                definition_text=response.definition_text,
                sentence_text=response.sentence_text,
                definition_score=d_score,
                sentence_score=s_score,
                grader_rationale=f"definition: {d_why}; sentence: {s_why}",
            )
        )
        feedback[phrase_id] = (
            f"Definition {d_score:g}/1 ({d_why}); sentence {s_score:g}/1 ({s_why})."
        )
    return (
        items,
        TaskScore(STAGE_POST, TASK_DEFINITION, sum(i.definition_score for i in items)),
        TaskScore(STAGE_POST, TASK_SENTENCE, sum(i.sentence_score for i in items)),
        feedback,
    )


def build_feedback_report(
    state: SessionState,
    records: list[TurnRecord],
    grader: FeedbackGrader,
    config: GameConfig,
) -> FeedbackReport:
    """Assemble the post-interaction report from a finished session.

    The formative used?/count facts come straight from the tracker state;
    the grader only ever judges quality, so a confused or adversarial grader
    cannot misreport what the learner actually said.
    """
    if state.status != STATUS_FINISHED:
        raise SessionNotFinished(state.session_id)

    transcripts = [r.learner_transcript for r in records]
    specific = list(grader.find_errors(transcripts))
    for entry in specific:
        if entry.category not in ERROR_CATEGORIES:
            raise GraderFailure(f"unknown error category {entry.category!r}")
    general = Counter(entry.category for entry in specific)

    formative = []
    for phrase_id, usage in state.usage.items():
        phrase = config.inventory.get(phrase_id)
        excerpts = [
            r.learner_transcript
            for r in records
            if any(d.phrase_id == phrase_id and d.occurrences for d in r.detections)
        ]
        if usage.count == 0:
            formative.append(
                FormativeEntry(
                    phrase_id=phrase_id,
                    used=False,
                    count=0,
                    correctness="not applicable",
                    appropriateness="not applicable",
                    revised_example=phrase.example,
                )
            )
            continue
        correctness, appropriateness, revised = grader.assess_phrase_use(
            phrase, excerpts
        )
        formative.append(
            FormativeEntry(
                phrase_id=phrase_id,
                used=True,
                count=usage.count,
                correctness=correctness,
                appropriateness=appropriateness,
                revised_example=revised,
            )
        )
    return FeedbackReport(
        general={cat: general.get(cat, 0) for cat in ERROR_CATEGORIES},
        specific=specific,
        formative=formative,
    )
