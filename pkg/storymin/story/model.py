"""Stories: characters, scenes with closed time intervals, and lifespans."""

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterable, List, Tuple, Union

from jsonschema import Draft7Validator

from storymin.errors import StoryError, ValidationReport
from storymin.schemas import load_schema

logger = logging.getLogger(__name__)

TimeLike = Union[int, Fraction, Tuple[int, int], List[int]]


def to_time(value: TimeLike) -> Fraction:
    if isinstance(value, (list, tuple)):
        num, den = value
        return Fraction(num, den)
    return Fraction(value)


def time_record(value: Fraction) -> Union[int, List[int]]:
    if value.denominator == 1:
        return value.numerator
    return [value.numerator, value.denominator]


@dataclass(frozen=True)
class Scene:
    id: str
    members: FrozenSet[str]
    begin: Fraction
    end: Fraction

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        object.__setattr__(self, "begin", to_time(self.begin))
        object.__setattr__(self, "end", to_time(self.end))

    def intersects(self, other: "Scene") -> bool:
        # Closed intervals: touching at a boundary counts.
        return self.begin <= other.end and other.begin <= self.end

    def active_at(self, t: Fraction) -> bool:
        return self.begin <= t <= self.end


@dataclass(frozen=True)
class Lifespan:
    character: str
    begin: Fraction
    end: Fraction

    def contains(self, t: Fraction) -> bool:
        return self.begin <= t <= self.end


@dataclass(frozen=True)
class Story:
    characters: Tuple[str, ...]
    scenes: Tuple[Scene, ...]

    def __post_init__(self):
        object.__setattr__(self, "characters", tuple(self.characters))
        object.__setattr__(self, "scenes", tuple(self.scenes))

    def scenes_of(self, character: str) -> List[Scene]:
        return [s for s in self.scenes if character in s.members]

    def lifespans(self) -> Dict[str, Lifespan]:
        """Lifespans of every character that appears in at least one scene."""
        spans: Dict[str, Lifespan] = {}
        for scene in self.scenes:
            for c in scene.members:
                span = spans.get(c)
                if span is None:
                    spans[c] = Lifespan(c, scene.begin, scene.end)
                else:
                    spans[c] = Lifespan(
                        c, min(span.begin, scene.begin), max(span.end, scene.end)
                    )
        return spans


def lifespan(story: Story, c: str) -> Lifespan:
    if c not in story.characters:
        raise StoryError("unknown_character", f"unknown character {c}")
    scenes = story.scenes_of(c)
    if not scenes:
        raise StoryError("unused_character", f"character {c} appears in no scene")
    return Lifespan(c, min(s.begin for s in scenes), max(s.end for s in scenes))


def _pointer(path: Iterable[Any]) -> str:
    return "/" + "/".join(str(p) for p in path)


def parse_story(text: str, book_mode: bool = False) -> Story:
    """Read a story file.

    In book mode the scene times are ignored and scene ``k`` (0-based, file
    order) gets the degenerate interval ``[k, k]``, which yields one layer per
    scene.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise StoryError("syntax", e.msg, f"{e.lineno}:{e.colno}") from e

    errors = sorted(
        Draft7Validator(load_schema("story")).iter_errors(doc),
        key=lambda err: [str(p) for p in err.absolute_path],
    )
    if errors:
        err = errors[0]
        raise StoryError("schema", err.message, _pointer(err.absolute_path))

    characters: List[str] = []
    seen = set()
    for i, c in enumerate(doc["characters"]):
        if c in seen:
            raise StoryError(
                "duplicate_character", f"duplicate character {c}", f"/characters/{i}"
            )
        seen.add(c)
        characters.append(c)

    scenes = []
    for k, raw in enumerate(doc["scenes"]):
        for m, member in enumerate(raw["members"]):
            if member not in seen:
                raise StoryError(
                    "unknown_member",
                    f"unknown member {member} in scene {raw['id']}",
                    f"/scenes/{k}/members/{m}",
                )
        if book_mode:
            begin = end = Fraction(k)
        else:
            if "begin" not in raw or "end" not in raw:
                raise StoryError(
                    "schema",
                    "scene needs begin and end outside book mode",
                    f"/scenes/{k}",
                )
            begin, end = to_time(raw["begin"]), to_time(raw["end"])
        scenes.append(Scene(raw["id"], frozenset(raw["members"]), begin, end))

    story = Story(tuple(characters), tuple(scenes))
    logger.debug("parsed story: %d characters, %d scenes", len(characters), len(scenes))
    return story


def story_record(story: Story) -> Dict[str, Any]:
    order = {c: i for i, c in enumerate(story.characters)}
    return {
        "characters": list(story.characters),
        "scenes": [
            {
                "id": s.id,
                "members": sorted(
                    s.members, key=lambda m: (order.get(m, len(order)), m)
                ),
                "begin": time_record(s.begin),
                "end": time_record(s.end),
            }
            for s in story.scenes
        ],
    }


def dump_story(story: Story) -> str:
    return json.dumps(story_record(story), indent=2)


def validate_story(story: Story) -> ValidationReport:
    report = ValidationReport()

    seen = set()
    for i, c in enumerate(story.characters):
        if c in seen:
            where = f"/characters/{i}"
            report.add("duplicate_character", f"duplicate character {c}", where)
        seen.add(c)

    ids = set()
    used = set()
    for k, scene in enumerate(story.scenes):
        where = f"/scenes/{k}"
        if scene.id in ids:
            report.add("duplicate_scene", f"duplicate scene id {scene.id}", where)
        ids.add(scene.id)
        if not scene.members:
            report.add("empty_scene", f"scene {scene.id} has no members", where)
        if scene.begin > scene.end:
            report.add(
                "interval_order", f"scene {scene.id} ends before it begins", where
            )
        for member in sorted(scene.members):
            if member not in seen:
                report.add(
                    "unknown_member",
                    f"unknown member {member} in scene {scene.id}",
                    where,
                )
        used.update(scene.members)

    ordered = sorted(story.scenes, key=lambda s: (s.begin, s.end))
    for a_idx, a in enumerate(ordered):
        for b in ordered[a_idx + 1 :]:
            if b.begin > a.end:
                break
            for member in sorted(a.members & b.members):
                report.add(
                    "overlapping_scenes",
                    f"overlapping scenes {a.id} and {b.id} share member {member}",
                    f"{a.id},{b.id}",
                )

    for c in story.characters:
        if c not in used:
            report.add("unused_character", f"character {c} appears in no scene", c)

    return report
