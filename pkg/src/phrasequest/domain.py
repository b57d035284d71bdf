"""Static game content model: phrases, heroes, NPCs, scenes, phases.

Everything here is immutable after ``config.load_config`` returns, so a single
``GameConfig`` can be shared freely across sessions and threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnknownState

INVENTORY_SIZE = 12
PRACTICE_SIZE = 5
HERO_COUNT = 4
PHASE_COUNT = 3
TOTAL_TURNS = 12


@dataclass(frozen=True)
class TargetPhrase:
    """One slang expression the learner may choose to practice.

    ``variants`` are the authored surface forms (inflections, contractions)
    used for detection; the canonical form is always among them.
    ``meaning_keywords`` feed the deterministic grader.
    """

    id: str
    canonical: str
    meaning: str
    example: str
    variants: tuple[str, ...]
    meaning_keywords: tuple[str, ...] = ()


@dataclass(frozen=True)
class PhraseInventory:
    phrases: tuple[TargetPhrase, ...]

    def get(self, phrase_id: str) -> TargetPhrase:
        for p in self.phrases:
            if p.id == phrase_id:
                return p
        raise KeyError(phrase_id)

    def ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.phrases)

    def __contains__(self, phrase_id: str) -> bool:
        return any(p.id == phrase_id for p in self.phrases)


@dataclass(frozen=True)
class PracticeSet:
    """The learner's chosen five phrase ids, in selection order."""

    phrase_ids: tuple[str, ...]


@dataclass(frozen=True)
class Hero:
    id: str
    name: str
    description: str
    abilities: tuple[str, ...]
    portrait_asset: str


@dataclass(frozen=True)
class Npc:
    id: str
    name: str
    description: str
    portrait_asset: str


@dataclass(frozen=True)
class SceneAsset:
    id: str
    image_ref: str
    state_tags: frozenset[str]


@dataclass(frozen=True)
class PhaseSpec:
    phase_number: int
    title: str
    goal_text: str
    turn_range: tuple[int, int]  # inclusive
    checkpoint_state: str
    locations: frozenset[str]
    encounters: tuple[str, ...] = ()

    def contains_turn(self, turn: int) -> bool:
        return self.turn_range[0] <= turn <= self.turn_range[1]

    @property
    def final_turn(self) -> int:
        return self.turn_range[1]


@dataclass(frozen=True)
class OutcomeThresholds:
    """Minimum checkpoint totals for each ending, best first."""

    triumphant: int = 7
    mixed: int = 4


@dataclass(frozen=True)
class ReminderPolicy:
    turns: tuple[int, ...] = (6, 9, 12)
    max_phrases: int = 2


@dataclass(frozen=True)
class LlmBinding:
    """Chat-completion endpoint settings for the external provider/grader."""

    endpoint: str = ""
    model: str = ""


@dataclass(frozen=True)
class GameConfig:
    config_version: int
    inventory: PhraseInventory
    heroes: tuple[Hero, ...]
    npcs: tuple[Npc, ...]
    scenes: tuple[SceneAsset, ...]
    phases: tuple[PhaseSpec, ...]
    start_location: str
    intro_video_ref: str
    classroom_persona: str
    outcome_thresholds: OutcomeThresholds = field(default_factory=OutcomeThresholds)
    reminder_policy: ReminderPolicy = field(default_factory=ReminderPolicy)
    llm: LlmBinding | None = None

    def hero(self, hero_id: str) -> Hero:
        for h in self.heroes:
            if h.id == hero_id:
                return h
        raise KeyError(hero_id)

    def npc(self, npc_id: str) -> Npc:
        for n in self.npcs:
            if n.id == npc_id:
                return n
        raise KeyError(npc_id)

    def npc_ids(self) -> frozenset[str]:
        return frozenset(n.id for n in self.npcs)

    def phase_for_turn(self, turn: int) -> PhaseSpec:
        for spec in self.phases:
            if spec.contains_turn(turn):
                return spec
        raise ValueError(f"turn {turn} outside all phase ranges")

    def all_locations(self) -> frozenset[str]:
        labels: set[str] = set()
        for spec in self.phases:
            labels |= spec.locations
        return frozenset(labels)


def resolve_scene(state_label: str, config: GameConfig) -> SceneAsset:
    """Pick the scene asset for a game-state label.

    Deterministic: the first asset in configuration order whose tags contain
    the label wins, so replays always see the same visuals.
    """
    for asset in config.scenes:
        if state_label in asset.state_tags:
            return asset
    raise UnknownState(f"no scene asset configured for state {state_label!r}")
