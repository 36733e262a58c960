"""Keyword pools and the verb-synonym graph behind obfuscated query assembly.

A lexicon bundles decoy keywords, tagged by query-type category and weighted
by how prominently they surface in search results, together with an
undirected verb-synonym graph used to derive near-synonyms of an intent's
root verb.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from random import Random

SEGMENT_SEPARATOR = ", "


class LexiconError(ValueError):
    """Raised when a lexicon file is missing, malformed, or inconsistent."""


class QueryCategory(Enum):
    """The five query-type categories: navigational, informational,
    transactional, natural-language, and temporal."""

    NAVIGATIONAL = "N"
    INFORMATIONAL = "I"
    TRANSACTIONAL = "T"
    NATURAL_LANGUAGE = "L"
    TEMPORAL = "P"

    @property
    def tag(self) -> str:
        return self.value

    @classmethod
    def from_tag(cls, tag: str) -> QueryCategory:
        try:
            return cls(tag)
        except ValueError:
            raise ValueError(
                f"unknown query category tag {tag!r}; expected one of N, I, T, L, P"
            ) from None

    def __lt__(self, other: QueryCategory) -> bool:
        return self.value < other.value


@dataclass(frozen=True)
class Keyword:
    """A decoy phrase with its category, prominence weight, and topic label."""

    text: str
    category: QueryCategory
    visibility: float
    topic: str = ""

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("keyword text must be non-empty")
        if SEGMENT_SEPARATOR in self.text:
            raise ValueError(
                f"keyword {self.text!r} must not contain the segment separator"
            )
        if self.visibility < 0:
            raise ValueError(f"keyword {self.text!r}: visibility must be >= 0")


class VerbGraph:
    """Simple undirected graph over verb lemmas; edges link near-synonyms."""

    def __init__(self) -> None:
        self._adj: dict[str, set[str]] = {}

    def add_node(self, verb: str) -> None:
        self._adj.setdefault(verb, set())

    def add_edge(self, a: str, b: str) -> None:
        if a == b:
            raise ValueError(f"self-loop edge ({a!r}, {b!r}) not allowed")
        if b in self._adj.get(a, ()):
            raise ValueError(f"duplicate edge ({a!r}, {b!r})")
        self._adj.setdefault(a, set()).add(b)
        self._adj.setdefault(b, set()).add(a)

    def __contains__(self, verb: str) -> bool:
        return verb in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    def neighbors(self, verb: str) -> set[str]:
        return set(self._adj[verb])

    def distances_from(self, root: str, max_degree: int) -> dict[str, int]:
        """Shortest-path hop counts from ``root`` up to ``max_degree``."""
        if root not in self._adj:
            raise KeyError(f"unknown verb {root!r}")
        dist = {root: 0}
        queue = deque([root])
        while queue:
            cur = queue.popleft()
            if dist[cur] >= max_degree:
                continue
            for nxt in self._adj[cur]:
                if nxt not in dist:
                    dist[nxt] = dist[cur] + 1
                    queue.append(nxt)
        return dist


@dataclass
class Lexicon:
    """Immutable-after-load container of category keyword pools and verbs."""

    keywords: dict[QueryCategory, tuple[Keyword, ...]]
    verbs: VerbGraph = field(default_factory=VerbGraph)

    def pool(self, category: QueryCategory) -> tuple[Keyword, ...]:
        pool = self.keywords.get(category, ())
        if not pool:
            raise LookupError(f"lexicon has no keywords for category {category.tag}")
        return pool

    def categories(self) -> list[QueryCategory]:
        return sorted(c for c, pool in self.keywords.items() if pool)

    def find(self, text: str) -> Keyword | None:
        """Case-insensitive exact lookup over every category pool."""
        needle = text.strip().casefold()
        for category in QueryCategory:
            for kw in self.keywords.get(category, ()):
                if kw.text.casefold() == needle:
                    return kw
        return None


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise LexiconError(message)


def load_lexicon(path: str | Path) -> Lexicon:
    """Load and validate a lexicon JSON file.

    The file holds ``keywords`` (objects with text/category/visibility/topic)
    and ``verbs`` (undirected ``{a, b}`` edge pairs). Violations are reported
    with the offending field.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"lexicon file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise LexiconError(f"lexicon file {path} is not valid JSON: {exc}") from exc

    _require(isinstance(raw, dict), "top-level value must be an object")
    _require("keywords" in raw, "missing top-level field 'keywords'")
    _require("verbs" in raw, "missing top-level field 'verbs'")
    _require(isinstance(raw["keywords"], list), "'keywords' must be an array")
    _require(isinstance(raw["verbs"], list), "'verbs' must be an array")

    pools: dict[QueryCategory, list[Keyword]] = {c: [] for c in QueryCategory}
    seen: dict[QueryCategory, set[str]] = {c: set() for c in QueryCategory}
    for i, item in enumerate(raw["keywords"]):
        where = f"keywords[{i}]"
        _require(isinstance(item, dict), f"{where}: must be an object")
        for fname in ("text", "category", "visibility"):
            _require(fname in item, f"{where}.{fname}: missing")
        text = item["text"]
        _require(isinstance(text, str) and text.strip() != "", f"{where}.text: must be a non-empty string")
        # ", " is reserved as the query segment separator
        _require(SEGMENT_SEPARATOR not in text, f"{where}.text: must not contain {SEGMENT_SEPARATOR!r}")
        try:
            category = QueryCategory.from_tag(item["category"])
        except ValueError as exc:
            raise LexiconError(f"{where}.category: {exc}") from None
        vis = item["visibility"]
        _require(isinstance(vis, (int, float)) and not isinstance(vis, bool), f"{where}.visibility: must be a number")
        _require(vis >= 0, f"{where}.visibility: must be >= 0")
        topic = item.get("topic", "")
        _require(isinstance(topic, str), f"{where}.topic: must be a string")
        key = text.strip().casefold()
        _require(
            key not in seen[category],
            f"{where}.text: duplicate keyword {text.strip()!r} in category {category.tag}",
        )
        seen[category].add(key)
        pools[category].append(Keyword(text.strip(), category, float(vis), topic))

    graph = VerbGraph()
    for i, edge in enumerate(raw["verbs"]):
        where = f"verbs[{i}]"
        _require(isinstance(edge, dict), f"{where}: must be an object")
        for fname in ("a", "b"):
            _require(fname in edge, f"{where}.{fname}: missing")
            _require(
                isinstance(edge[fname], str) and edge[fname].strip() != "",
                f"{where}.{fname}: must be a non-empty string",
            )
        try:
            graph.add_edge(edge["a"].strip(), edge["b"].strip())
        except ValueError as exc:
            raise LexiconError(f"{where}: {exc}") from None

    return Lexicon(keywords={c: tuple(p) for c, p in pools.items()}, verbs=graph)


def related_verbs(lexicon: Lexicon, root: str, max_degree: int) -> list[str]:
    """Verbs within ``max_degree`` hops of ``root``, nearest first.

    Ties at the same distance break lexicographically; the root itself is
    excluded.
    """
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    dist = lexicon.verbs.distances_from(root, max_degree)
    found = [(d, v) for v, d in dist.items() if v != root]
    found.sort()
    return [v for _, v in found]


def weighted_sample_without_replacement(
    items: list[Keyword], weights: list[float], count: int, rng: Random
) -> list[Keyword]:
    """Draw ``count`` distinct items, probability proportional to weight.

    An all-zero weight vector falls back to a uniform draw.
    """
    pool = list(items)
    w = list(weights)
    chosen: list[Keyword] = []
    for _ in range(count):
        total = sum(w)
        if total <= 0:
            idx = rng.randrange(len(pool))
        else:
            r = rng.random() * total
            acc = 0.0
            idx = len(pool) - 1
            for j, wj in enumerate(w):
                acc += wj
                if r < acc:
                    idx = j
                    break
        chosen.append(pool.pop(idx))
        w.pop(idx)
    return chosen


def decoy_candidates(
    lexicon: Lexicon,
    category: QueryCategory,
    count: int,
    rng: Random,
    exclude: frozenset[str] | set[str] = frozenset(),
) -> list[Keyword]:
    """Pick ``count`` distinct decoys from one category pool.

    Selection probability is proportional to each keyword's visibility
    weight; draws are without replacement and deterministic for a seeded
    ``rng``. ``exclude`` filters keyword texts (case-insensitive) out of the
    pool before drawing.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    pool = lexicon.pool(category)
    excluded = {e.casefold() for e in exclude}
    available = [kw for kw in pool if kw.text.casefold() not in excluded]
    if count > len(available):
        raise ValueError(
            f"requested {count} decoys from category {category.tag} "
            f"but only {len(available)} available"
        )
    return weighted_sample_without_replacement(
        available, [kw.visibility for kw in available], count, rng
    )
