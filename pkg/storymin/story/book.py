"""Book-style stories: an ordered list of scenes without times.

Scene ``k`` is placed at the degenerate interval ``[k, k]`` so that the story
to instance construction creates exactly one layer per scene.
"""

import logging
import re
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from storymin.errors import StoryError
from storymin.story.model import Scene, Story

logger = logging.getLogger(__name__)

_CODE = re.compile(r"^([A-Za-z0-9]{2})\s+(.*)$")


def book_story(
    characters: Sequence[str],
    member_lists: Iterable[Iterable[str]],
    ids: Optional[Sequence[str]] = None,
) -> Story:
    scenes = []
    for k, members in enumerate(member_lists):
        scene_id = ids[k] if ids is not None else f"s{k + 1}"
        scenes.append(Scene(scene_id, frozenset(members), Fraction(k), Fraction(k)))
    return Story(tuple(characters), tuple(scenes))


def _logical_lines(text: str) -> List[Tuple[int, str]]:
    lines: List[Tuple[int, str]] = []
    pending = ""
    start = 0
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not pending:
            start = number
        if line.endswith("&"):
            pending += line[:-1]
            continue
        lines.append((start, pending + line))
        pending = ""
    if pending:
        lines.append((start, pending))
    return lines


def parse_sgb(text: str, parts: Optional[Iterable[int]] = None) -> Story:
    """Read a Stanford GraphBase book file.

    The file lists character codes (``XX description``) up to the first blank
    line, followed by one line per chapter, ``chapter:clique;clique;...`` with
    comma-separated codes per clique. Every clique becomes one scene.

    ``parts`` selects chapters by the leading component of the chapter number
    (``(3,)`` is the third part; ``(1, 2, 3)`` the first three). Characters that
    do not appear in a selected clique are left out.
    """
    wanted = set(parts) if parts is not None else None
    declared: List[str] = []
    members: List[List[str]] = []
    ids: List[str] = []
    in_header = True

    for number, line in _logical_lines(text):
        if line.startswith("*"):
            continue
        if in_header:
            if not line.strip():
                if declared:
                    in_header = False
                continue
            match = _CODE.match(line)
            if match is None:
                raise StoryError(
                    "syntax", "expected a character code line", f"{number}:1"
                )
            declared.append(match.group(1))
            continue
        if not line.strip():
            continue

        chapter, sep, body = line.partition(":")
        if not sep:
            raise StoryError("syntax", "expected 'chapter:cliques'", f"{number}:1")
        chapter = chapter.strip()
        try:
            part = int(chapter.split(".")[0])
        except ValueError:
            raise StoryError("syntax", f"bad chapter number {chapter}", f"{number}:1")
        if wanted is not None and part not in wanted:
            continue
        for k, clique in enumerate(c for c in body.split(";") if c.strip()):
            codes = [code.strip() for code in clique.split(",") if code.strip()]
            for code in codes:
                if code not in declared:
                    raise StoryError(
                        "unknown_member",
                        f"unknown character code {code}",
                        f"{number}:1",
                    )
            members.append(sorted(set(codes), key=declared.index))
            ids.append(f"{chapter}#{k + 1}")

    used = {c for m in members for c in m}
    characters = [c for c in declared if c in used]
    logger.info("read %d scenes over %d characters", len(members), len(characters))
    return book_story(characters, members, ids)
