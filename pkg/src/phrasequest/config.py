"""Config loading and eager validation.

The config is one UTF-8 YAML document (see ``data/game.yaml`` for the shipped
fixture). ``load_config`` either returns a fully validated ``GameConfig`` or
raises a typed error; no partially validated value ever escapes.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import Any, IO

import yaml

from .domain import (
    HERO_COUNT,
    INVENTORY_SIZE,
    PHASE_COUNT,
    TOTAL_TURNS,
    GameConfig,
    Hero,
    LlmBinding,
    Npc,
    OutcomeThresholds,
    PhaseSpec,
    PhraseInventory,
    ReminderPolicy,
    SceneAsset,
    TargetPhrase,
)
from .errors import ConfigParseError, ValidationError

SUPPORTED_CONFIG_VERSION = 1


def load_config(source: str | IO[str]) -> GameConfig:
    """Parse and validate a config document (text or readable stream)."""
    text = source if isinstance(source, str) else source.read()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigParseError(f"config is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigParseError("config document must be a mapping")
    return _build(raw)


def load_config_file(path: str | Path) -> GameConfig:
    return load_config(Path(path).read_text(encoding="utf-8"))


def dump_config(config: GameConfig) -> str:
    """Serialize a config so that ``load_config`` round-trips it exactly."""
    doc: dict[str, Any] = {
        "config_version": config.config_version,
        "inventory": [
            {
                "id": p.id,
                "canonical": p.canonical,
                "meaning": p.meaning,
                "example": p.example,
                "variants": list(p.variants),
                "meaning_keywords": list(p.meaning_keywords),
            }
            for p in config.inventory.phrases
        ],
        "heroes": [
            {
                "id": h.id,
                "name": h.name,
                "description": h.description,
                "abilities": list(h.abilities),
                "portrait_asset": h.portrait_asset,
            }
            for h in config.heroes
        ],
        "npcs": [
            {
                "id": n.id,
                "name": n.name,
                "description": n.description,
                "portrait_asset": n.portrait_asset,
            }
            for n in config.npcs
        ],
        "scenes": [
            {
                "id": s.id,
                "image_ref": s.image_ref,
                "state_tags": sorted(s.state_tags),
            }
            for s in config.scenes
        ],
        "phases": [
            {
                "number": ph.phase_number,
                "title": ph.title,
                "goal": ph.goal_text,
                "turns": list(ph.turn_range),
                "checkpoint": ph.checkpoint_state,
                "locations": sorted(ph.locations),
                "encounters": list(ph.encounters),
            }
            for ph in config.phases
        ],
        "start_location": config.start_location,
        "intro_video_ref": config.intro_video_ref,
        "classroom_persona": config.classroom_persona,
        "outcome_thresholds": {
            "triumphant": config.outcome_thresholds.triumphant,
            "mixed": config.outcome_thresholds.mixed,
        },
        "reminders": {
            "turns": list(config.reminder_policy.turns),
            "max_phrases": config.reminder_policy.max_phrases,
        },
    }
    if config.llm is not None:
        doc["llm"] = {"endpoint": config.llm.endpoint, "model": config.llm.model}
    buf = io.StringIO()
    yaml.safe_dump(doc, buf, sort_keys=False, allow_unicode=True)
    return buf.getvalue()


def _require(raw: dict, key: str) -> Any:
    if key not in raw:
        raise ValidationError(f"missing required config key {key!r}")
    return raw[key]


def _build(raw: dict) -> GameConfig:
    version = _require(raw, "config_version")
    if version != SUPPORTED_CONFIG_VERSION:
        raise ValidationError(
            f"config_version {version!r} unsupported, expected {SUPPORTED_CONFIG_VERSION}"
        )

    inventory = _build_inventory(_require(raw, "inventory"))
    heroes = _build_heroes(_require(raw, "heroes"))
    npcs = _build_npcs(_require(raw, "npcs"))
    scenes = _build_scenes(_require(raw, "scenes"))
    phases = _build_phases(_require(raw, "phases"))

    start = _require(raw, "start_location")
    phase1 = phases[0]
    if start not in phase1.locations:
        raise ValidationError(f"start_location {start!r} not in phase 1 locations")

    _check_scene_coverage(phases, scenes)

    thresholds = OutcomeThresholds(**raw.get("outcome_thresholds", {}))
    if thresholds.triumphant <= thresholds.mixed:
        raise ValidationError("outcome threshold for triumphant must exceed mixed")

    rem = raw.get("reminders", {})
    policy = ReminderPolicy(
        turns=tuple(rem.get("turns", ReminderPolicy.turns)),
        max_phrases=rem.get("max_phrases", ReminderPolicy.max_phrases),
    )
    for t in policy.turns:
        if not 1 <= t <= TOTAL_TURNS:
            raise ValidationError(f"reminder turn {t} outside 1..{TOTAL_TURNS}")

    llm = None
    if "llm" in raw and raw["llm"] is not None:
        llm = LlmBinding(
            endpoint=raw["llm"].get("endpoint", ""),
            model=raw["llm"].get("model", ""),
        )

    return GameConfig(
        config_version=version,
        inventory=inventory,
        heroes=heroes,
        npcs=npcs,
        scenes=scenes,
        phases=phases,
        start_location=start,
        intro_video_ref=_require(raw, "intro_video_ref"),
        classroom_persona=_require(raw, "classroom_persona"),
        outcome_thresholds=thresholds,
        reminder_policy=policy,
        llm=llm,
    )


def _build_inventory(entries: list) -> PhraseInventory:
    if not isinstance(entries, list):
        raise ValidationError("inventory must be a list of phrase entries")
    if len(entries) != INVENTORY_SIZE:
        raise ValidationError(f"inventory size {len(entries)} != {INVENTORY_SIZE}")
    phrases = []
    seen: set[str] = set()
    for entry in entries:
        pid = _require(entry, "id")
        if pid in seen:
            raise ValidationError(f"phrase id {pid!r} duplicated")
        seen.add(pid)
        canonical = _require(entry, "canonical")
        if not canonical.strip():
            raise ValidationError(f"phrase {pid!r} has an empty canonical form")
        variants = tuple(entry.get("variants", ()))
        if not variants:
            raise ValidationError(f"phrase {pid!r} has no variants")
        if canonical not in variants:
            raise ValidationError(
                f"phrase {pid!r}: canonical form missing from variants"
            )
        phrases.append(
            TargetPhrase(
                id=pid,
                canonical=canonical,
                meaning=_require(entry, "meaning"),
                example=_require(entry, "example"),
                variants=variants,
                meaning_keywords=tuple(entry.get("meaning_keywords", ())),
            )
        )
    return PhraseInventory(phrases=tuple(phrases))


def _build_heroes(entries: list) -> tuple[Hero, ...]:
    if len(entries) != HERO_COUNT:
        raise ValidationError(f"hero count {len(entries)} != {HERO_COUNT}")
    heroes = []
    seen: set[str] = set()
    for entry in entries:
        hid = _require(entry, "id")
        if hid in seen:
            raise ValidationError(f"hero id {hid!r} duplicated")
        seen.add(hid)
        heroes.append(
            Hero(
                id=hid,
                name=_require(entry, "name"),
                description=_require(entry, "description"),
                abilities=tuple(entry.get("abilities", ())),
                portrait_asset=_require(entry, "portrait_asset"),
            )
        )
    return tuple(heroes)


def _build_npcs(entries: list) -> tuple[Npc, ...]:
    npcs = []
    seen: set[str] = set()
    for entry in entries:
        nid = _require(entry, "id")
        if nid in seen:
            raise ValidationError(f"npc id {nid!r} duplicated")
        seen.add(nid)
        description = _require(entry, "description")
        if not description.strip():
            raise ValidationError(f"npc {nid!r} has an empty description")
        npcs.append(
            Npc(
                id=nid,
                name=_require(entry, "name"),
                description=description,
                portrait_asset=_require(entry, "portrait_asset"),
            )
        )
    return tuple(npcs)


def _build_scenes(entries: list) -> tuple[SceneAsset, ...]:
    scenes = []
    seen: set[str] = set()
    for entry in entries:
        sid = _require(entry, "id")
        if sid in seen:
            raise ValidationError(f"scene id {sid!r} duplicated")
        seen.add(sid)
        scenes.append(
            SceneAsset(
                id=sid,
                image_ref=_require(entry, "image_ref"),
                state_tags=frozenset(_require(entry, "state_tags")),
            )
        )
    return tuple(scenes)


def _build_phases(entries: list) -> tuple[PhaseSpec, ...]:
    if len(entries) != PHASE_COUNT:
        raise ValidationError(f"phase count {len(entries)} != {PHASE_COUNT}")
    specs = []
    for entry in entries:
        turns = _require(entry, "turns")
        if len(turns) != 2:
            raise ValidationError("phase turns must be a [first, last] pair")
        checkpoint = _require(entry, "checkpoint")
        locations = frozenset(_require(entry, "locations"))
        if checkpoint not in locations:
            raise ValidationError(
                f"phase checkpoint {checkpoint!r} not in its own location set"
            )
        specs.append(
            PhaseSpec(
                phase_number=_require(entry, "number"),
                title=_require(entry, "title"),
                goal_text=_require(entry, "goal"),
                turn_range=(int(turns[0]), int(turns[1])),
                checkpoint_state=checkpoint,
                locations=locations,
                encounters=tuple(entry.get("encounters", ())),
            )
        )
    specs.sort(key=lambda s: s.phase_number)
    if [s.phase_number for s in specs] != list(range(1, PHASE_COUNT + 1)):
        raise ValidationError("phase numbers must be exactly 1, 2, 3")

    # The three ranges must partition turns 1..12 with no gap or overlap.
    cursor = 1
    for spec in specs:
        lo, hi = spec.turn_range
        if lo > hi:
            raise ValidationError(f"phase {spec.phase_number} turn range is inverted")
        if lo < cursor:
            raise ValidationError(f"turn ranges overlap at {lo}")
        if lo > cursor:
            raise ValidationError(f"turn ranges leave a gap at {cursor}")
        cursor = hi + 1
    if cursor != TOTAL_TURNS + 1:
        raise ValidationError(f"turn ranges must cover 1..{TOTAL_TURNS}")
    return tuple(specs)


def _check_scene_coverage(
    phases: tuple[PhaseSpec, ...], scenes: tuple[SceneAsset, ...]
) -> None:
    tagged: set[str] = set()
    for scene in scenes:
        tagged |= scene.state_tags
    for spec in phases:
        for label in sorted(spec.locations):
            if label not in tagged:
                raise ValidationError(f"scene missing for location {label!r}")
