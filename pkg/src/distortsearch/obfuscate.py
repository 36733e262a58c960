"""Obfuscated query assembly from query-type permutation patterns.

A pattern is an ordered arrangement of distinct query-type categories
(e.g. ``NITP``). The user's real intent occupies the slot matching its own
category; every other slot is filled with a decoy keyword drawn from the
lexicon. If the intent's category is absent from the pattern, the intent is
appended as a trailing segment and flagged.
"""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from itertools import permutations
from pathlib import Path
from random import Random
from typing import Iterable, Sequence

from .lexicon import (
    SEGMENT_SEPARATOR,
    Keyword,
    Lexicon,
    QueryCategory,
    decoy_candidates,
    related_verbs,
)

logger = logging.getLogger(__name__)

#: The 15 arrangement patterns used by the batch generator by default.
DEFAULT_PATTERN_SET = "I,IT,IP,TP,IL,NI,NIT,NIP,IPL,ITP,NITP,ITPL,NIPL,NITL,NITPL"

_YEAR_RE = re.compile(r"\b(?:19|20)\d{2}\b")
_DOMAIN_RE = re.compile(
    r"(?:^www\.)|(?:\.(?:com|org|net|edu|gov|io|co)(?:/|$))", re.IGNORECASE
)
_QUESTION_WORDS = frozenset(
    "who what when where why how which is are can could does do did will should".split()
)


def count_permutations(n: int, k: int) -> int:
    """Number of ordered arrangements of ``k`` items drawn from ``n``.

    Computed as n!/(n-k)!. ``n`` is capped at 20 to keep the result inside
    the range where the arithmetic is obviously exact and enumeration stays
    tractable.
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be non-negative")
    if n > 20:
        raise ValueError("n must be <= 20")
    if k > n:
        raise ValueError("k must be <= n")
    result = 1
    for i in range(n - k + 1, n + 1):
        result *= i
    return result


def enumerate_arrangements(
    categories: Sequence[QueryCategory], k: int
) -> list[tuple[QueryCategory, ...]]:
    """All ordered ``k``-arrangements of ``categories``, lexicographic by tag."""
    if len(set(categories)) != len(categories):
        raise ValueError("categories must be distinct")
    if not 0 <= k <= len(categories):
        raise ValueError("k must be between 0 and len(categories)")
    ordered = sorted(categories, key=lambda c: c.tag)
    return list(permutations(ordered, k))


def parse_pattern(text: str) -> tuple[QueryCategory, ...]:
    """Parse one pattern string such as ``NITP`` into category tuples."""
    text = text.strip()
    if not text:
        raise ValueError("pattern must be non-empty")
    cats = tuple(QueryCategory.from_tag(ch) for ch in text)
    if len(set(cats)) != len(cats):
        raise ValueError(f"pattern {text!r} repeats a category")
    return cats


def parse_pattern_set(text: str) -> list[tuple[QueryCategory, ...]]:
    """Parse a comma-separated list of patterns, rejecting duplicates."""
    parts = [p.strip() for p in text.split(",")]
    parts = [p for p in parts if p]
    if not parts:
        raise ValueError("pattern set must contain at least one pattern")
    patterns = [parse_pattern(p) for p in parts]
    seen: set[tuple[QueryCategory, ...]] = set()
    for part, pat in zip(parts, patterns):
        if pat in seen:
            raise ValueError(f"duplicate pattern {part!r} in pattern set")
        seen.add(pat)
    return patterns


def pattern_tag(pattern: Sequence[QueryCategory]) -> str:
    return "".join(c.tag for c in pattern)


def categorize(text: str, lexicon: Lexicon) -> QueryCategory:
    """Assign a query-type category to free text.

    An exact (case-insensitive) lexicon match wins. Otherwise structural
    rules apply in order: domain-looking text is navigational; text opening
    with a known verb is transactional; text containing a four-digit year is
    temporal; question-word openers or long phrases are natural-language;
    anything left is informational.
    """
    stripped = text.strip()
    if not stripped:
        raise ValueError("cannot categorize empty text")
    hit = lexicon.find(stripped)
    if hit is not None:
        return hit.category
    tokens = stripped.casefold().split()
    if any(_DOMAIN_RE.search(tok) for tok in tokens):
        return QueryCategory.NAVIGATIONAL
    if tokens[0] in lexicon.verbs:
        return QueryCategory.TRANSACTIONAL
    if _YEAR_RE.search(stripped):
        return QueryCategory.TEMPORAL
    if tokens[0] in _QUESTION_WORDS or len(tokens) >= 5:
        return QueryCategory.NATURAL_LANGUAGE
    return QueryCategory.INFORMATIONAL


@dataclass(frozen=True)
class ObfuscatedQuery:
    """One assembled query: ordered segments with the intent's position."""

    id: str
    pattern: str
    segments: tuple[str, ...]
    intent_index: int

    def __post_init__(self) -> None:
        if not 0 <= self.intent_index < len(self.segments):
            raise ValueError("intent_index out of range")

    @property
    def text(self) -> str:
        return SEGMENT_SEPARATOR.join(self.segments)

    @property
    def intent(self) -> str:
        return self.segments[self.intent_index]

    @property
    def intent_appended(self) -> bool:
        """True when the intent did not fit the pattern and trails it."""
        return self.intent_index >= len(self.pattern)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "pattern": self.pattern,
            "segments": list(self.segments),
            "intent_index": self.intent_index,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> ObfuscatedQuery:
        return cls(
            id=str(raw["id"]),
            pattern=str(raw["pattern"]),
            segments=tuple(str(s) for s in raw["segments"]),
            intent_index=int(raw["intent_index"]),
        )


def _verb_substitutes(
    intent: str, lexicon: Lexicon, count: int, max_degree: int
) -> list[str]:
    head, _, rest = intent.strip().partition(" ")
    root = head.casefold()
    if root not in lexicon.verbs or not rest:
        return []
    subs = related_verbs(lexicon, root, max_degree)
    return [f"{v} {rest}" for v in subs[:count]]


def assemble_query(
    intent: str,
    pattern: Sequence[QueryCategory] | str,
    lexicon: Lexicon,
    rng: Random,
    query_id: str = "Q1",
    verb_decoys: int = 0,
    max_verb_degree: int = 2,
) -> ObfuscatedQuery:
    """Build one obfuscated query for ``intent`` under ``pattern``.

    Decoys are drawn per category from the lexicon (visibility-weighted,
    without replacement, never equal to the intent text). When
    ``verb_decoys`` > 0 and the intent sits inside the pattern, up to that
    many extra segments are inserted right after the intent, each a copy of
    the intent with its leading verb swapped for a graph neighbour within
    ``max_verb_degree`` hops.
    """
    if isinstance(pattern, str):
        pattern = parse_pattern(pattern)
    if not pattern:
        raise ValueError("pattern must contain at least one category")
    intent = intent.strip()
    if not intent:
        raise ValueError("intent must be non-empty")
    if SEGMENT_SEPARATOR in intent:
        raise ValueError(f"intent must not contain {SEGMENT_SEPARATOR!r}")

    intent_category = categorize(intent, lexicon)
    exclude = frozenset({intent})

    segments: list[str] = []
    intent_index = -1
    for slot, category in enumerate(pattern):
        if category is intent_category and intent_index < 0:
            segments.append(intent)
            intent_index = slot
        else:
            (decoy,) = decoy_candidates(lexicon, category, 1, rng, exclude=exclude)
            exclude = exclude | {decoy.text}
            segments.append(decoy.text)

    if intent_index < 0:
        segments.append(intent)
        intent_index = len(segments) - 1
        logger.debug(
            "intent category %s not in pattern %s; appended intent as trailing segment",
            intent_category.tag,
            pattern_tag(pattern),
        )
    elif verb_decoys > 0:
        subs = _verb_substitutes(intent, lexicon, verb_decoys, max_verb_degree)
        segments[intent_index + 1 : intent_index + 1] = subs

    return ObfuscatedQuery(
        id=query_id,
        pattern=pattern_tag(pattern),
        segments=tuple(segments),
        intent_index=intent_index,
    )


def generate_batch(
    intent: str,
    lexicon: Lexicon,
    seed: int,
    patterns: Iterable[Sequence[QueryCategory]] | None = None,
    per_pattern: int = 8,
    include_original: bool = True,
    verb_decoys: int = 0,
    max_verb_degree: int = 2,
) -> list[ObfuscatedQuery]:
    """Generate the full obfuscated batch for one intent.

    Every pattern yields ``per_pattern`` independently sampled queries; with
    ``include_original`` the bare intent is appended as the final query. The
    default 15 patterns at 8 per pattern plus the original give 121 queries,
    ids ``Q1``..``Q121`` in generation order.
    """
    if per_pattern < 1:
        raise ValueError("per_pattern must be >= 1")
    if patterns is None:
        patterns = parse_pattern_set(DEFAULT_PATTERN_SET)
    else:
        patterns = [parse_pattern(p) if isinstance(p, str) else tuple(p) for p in patterns]
    master = Random(seed)
    batch: list[ObfuscatedQuery] = []
    counter = 0
    for pattern in patterns:
        for _ in range(per_pattern):
            counter += 1
            child = Random(master.getrandbits(64))
            batch.append(
                assemble_query(
                    intent,
                    pattern,
                    lexicon,
                    child,
                    query_id=f"Q{counter}",
                    verb_decoys=verb_decoys,
                    max_verb_degree=max_verb_degree,
                )
            )
    if include_original:
        counter += 1
        tag = categorize(intent, lexicon).tag
        batch.append(
            ObfuscatedQuery(
                id=f"Q{counter}",
                pattern=tag,
                segments=(intent.strip(),),
                intent_index=0,
            )
        )
    return batch


def write_batch(batch: Iterable[ObfuscatedQuery], path: str | Path) -> None:
    """Write queries as JSONL, one object per line."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for query in batch:
            fh.write(json.dumps(query.to_dict(), ensure_ascii=False) + "\n")


def read_batch(path: str | Path) -> list[ObfuscatedQuery]:
    """Read queries from a JSONL batch file."""
    path = Path(path)
    queries: list[ObfuscatedQuery] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                queries.append(ObfuscatedQuery.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad batch record: {exc}") from exc
    return queries
