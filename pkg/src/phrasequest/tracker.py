"""Target-phrase detection and Practice Box state.

Detection runs only on learner speech, never on narrative text the learner
merely heard (narrative text goes through :func:`detect` separately when the
orchestrator verifies its own output, but those matches never touch usage
counts).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from .domain import GameConfig, PhraseInventory, PracticeSet, ReminderPolicy
from .errors import UnknownPhrase

NEUTRAL = "neutral"
RED = "red"
GREEN = "green"

# A phrase counts as practiced once it has been used this many times.
PRACTICE_TARGET = 2


def color_for_count(count: int) -> str:
    if count <= 0:
        return NEUTRAL
    if count == 1:
        return RED
    return GREEN


@dataclass(frozen=True)
class UsageState:
    phrase_id: str
    count: int = 0

    @property
    def color(self) -> str:
        return color_for_count(self.count)


@dataclass(frozen=True)
class DetectionResult:
    phrase_id: str
    occurrences: int
    spans: tuple[tuple[int, int], ...]  # half-open token-index intervals


@dataclass(frozen=True)
class ReminderDecision:
    turn_index: int
    phrase_ids: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.phrase_ids)


_NON_TOKEN = re.compile(r"[^a-z0-9'\s]+")
_LONE_APOSTROPHE = re.compile(r"(?<![a-z0-9])'|'(?![a-z0-9])")


def normalize(text: str) -> list[str]:
    """Lowercase, strip punctuation, split on whitespace.

    Apostrophes inside a word survive ("it's" stays one token); every other
    punctuation mark becomes a separator.
    """
    lowered = text.lower()
    spaced = _NON_TOKEN.sub(" ", lowered)
    spaced = _LONE_APOSTROPHE.sub(" ", spaced)
    return spaced.split()


def _variant_token_lists(phrase_variants: tuple[str, ...]) -> list[list[str]]:
    out = []
    for variant in phrase_variants:
        tokens = normalize(variant)
        if tokens:
            out.append(tokens)
    return out


def _scan(tokens: list[str], variants: list[list[str]]) -> tuple[tuple[int, int], ...]:
    """Greedy left-to-right scan; at each position the longest variant wins."""
    spans: list[tuple[int, int]] = []
    i = 0
    n = len(tokens)
    while i < n:
        best = 0
        for vt in variants:
            k = len(vt)
            if k > best and tokens[i : i + k] == vt:
                best = k
        if best:
            spans.append((i, i + best))
            i += best
        else:
            i += 1
    return tuple(spans)


def detect(
    transcript: str, practice: PracticeSet, inventory: PhraseInventory
) -> list[DetectionResult]:
    """Count each practiced phrase in a transcript.

    A match is any authored variant appearing as a contiguous token run of the
    normalized transcript; matches for one phrase are non-overlapping and
    claimed greedily left to right. Distinct phrases may overlap each other.
    Every practiced phrase gets a result, zero-occurrence ones included.
    """
    tokens = normalize(transcript)
    results = []
    for phrase_id in practice.phrase_ids:
        phrase = inventory.get(phrase_id)
        spans = _scan(tokens, _variant_token_lists(phrase.variants))
        results.append(
            DetectionResult(phrase_id=phrase_id, occurrences=len(spans), spans=spans)
        )
    return results


def detect_in_text(
    text: str, practice: PracticeSet, inventory: PhraseInventory
) -> set[str]:
    """Ids of practiced phrases present in arbitrary text (narrative checks)."""
    return {
        r.phrase_id for r in detect(text, practice, inventory) if r.occurrences > 0
    }


def contains_phrase(text: str, variants: tuple[str, ...]) -> bool:
    """True when any variant occurs in the text under detection rules."""
    return bool(_scan(normalize(text), _variant_token_lists(variants)))


def apply_detections(
    states: dict[str, UsageState], detections: list[DetectionResult]
) -> dict[str, UsageState]:
    """Fold detections into the per-phrase usage map (returns a new map)."""
    updated = dict(states)
    for det in detections:
        if det.phrase_id not in updated:
            raise UnknownPhrase(f"detection for untracked phrase {det.phrase_id!r}")
        prior = updated[det.phrase_id]
        updated[det.phrase_id] = replace(prior, count=prior.count + det.occurrences)
    return updated


def reminder_due(
    states: dict[str, UsageState],
    turn_index: int,
    policy: ReminderPolicy = ReminderPolicy(),
) -> ReminderDecision:
    """Decide whether this turn pops a reminder and for which phrases.

    Fires only on the policy's scheduled turns, nudging at most
    ``policy.max_phrases`` of the least-used phrases still short of the
    two-use target. Ties break by the order of ``states`` (inventory order as
    built by the session engine), so the decision is deterministic.
    """
    if turn_index not in policy.turns:
        return ReminderDecision(turn_index=turn_index)
    lagging = [s for s in states.values() if s.count < PRACTICE_TARGET]
    lagging.sort(key=lambda s: s.count)  # stable: preserves states order on ties
    chosen = tuple(s.phrase_id for s in lagging[: policy.max_phrases])
    return ReminderDecision(turn_index=turn_index, phrase_ids=chosen)


def initial_usage(
    practice: PracticeSet, inventory: PhraseInventory
) -> dict[str, UsageState]:
    """Fresh usage map for a session, keyed in inventory order."""
    ordered = [pid for pid in inventory.ids() if pid in practice.phrase_ids]
    return {pid: UsageState(phrase_id=pid) for pid in ordered}


def practice_box_view(
    states: dict[str, UsageState], config: GameConfig
) -> list[dict]:
    """The Practice Box rows exactly as the UI must render them."""
    rows = []
    for state in states.values():
        phrase = config.inventory.get(state.phrase_id)
        rows.append(
            {
                "phrase_id": phrase.id,
                "phrase": phrase.canonical,
                "meaning": phrase.meaning,
                "example": phrase.example,
                "count": state.count,
                "color": state.color,
            }
        )
    return rows
