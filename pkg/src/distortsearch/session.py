"""Click sessions: strategic k-anonymized clicks and the pseudo-profile.

A session executes obfuscated queries, clicks k >= 2 mixed targets per
result page (intent-relevant and decoy), folds ad impressions into the
evolving interest profile, and reports how much of the served ad stream
addressed the specific intent.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from random import Random
from typing import Sequence

from .obfuscate import ObfuscatedQuery
from .searchsim import Ad, ScoredDoc, SearchIndex, sample_ads
from .textmine import normalize_tokens

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClickPolicy:
    """How many clicks per page and how many of them land on decoys."""

    k_clicks: int = 2
    decoy_fraction: float = 0.5
    include_ads: bool = True

    def __post_init__(self) -> None:
        if self.k_clicks < 2:
            raise ValueError("k_clicks must be >= 2")
        if not 0.0 <= self.decoy_fraction <= 1.0:
            raise ValueError("decoy_fraction must be in [0, 1]")


@dataclass(frozen=True)
class ClickEvent:
    session_id: str
    query_id: str
    target: str
    target_kind: str  # "result" or "ad"
    categories: tuple[str, ...]
    timestamp: int

    def to_dict(self) -> dict:
        return {
            "type": "click",
            "session_id": self.session_id,
            "query_id": self.query_id,
            "target": self.target,
            "target_kind": self.target_kind,
            "categories": list(self.categories),
            "timestamp": self.timestamp,
        }


@dataclass(frozen=True)
class PseudoProfile:
    """Category histogram a tracker would infer from clicks/impressions."""

    category_weights: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if any(w < 0 for w in self.category_weights.values()):
            raise ValueError("profile weights must be non-negative")

    @property
    def total(self) -> int:
        return sum(self.category_weights.values())

    def to_dict(self) -> dict:
        return {c: self.category_weights[c] for c in sorted(self.category_weights)}


@dataclass(frozen=True)
class ExposureReport:
    """Served-ad tally split into specific-intent and conceptual buckets."""

    total_ads: int
    specific_ads: int
    conceptual_breakdown: dict[str, int]

    def __post_init__(self) -> None:
        if self.total_ads < 1:
            raise ValueError("exposure is undefined without served ads")
        if not 0 <= self.specific_ads <= self.total_ads:
            raise ValueError("specific_ads must be between 0 and total_ads")

    @property
    def exposure(self) -> float:
        return self.specific_ads / self.total_ads

    def to_dict(self) -> dict:
        return {
            "total_ads": self.total_ads,
            "specific_ads": self.specific_ads,
            "conceptual_breakdown": {
                c: self.conceptual_breakdown[c] for c in sorted(self.conceptual_breakdown)
            },
            "exposure": self.exposure,
        }


def _round_half_up(x: float) -> int:
    return int(x + 0.5)


def plan_clicks(
    page: Sequence[ScoredDoc],
    index: SearchIndex,
    intent_phrase: str,
    policy: ClickPolicy,
    rng: Random,
    session_id: str = "S1",
    query_id: str = "Q1",
    seq_start: int = 0,
    relevance_mode: str = "all",
) -> list[ClickEvent]:
    """Choose which result hits to click on one page.

    ``round(k_clicks * decoy_fraction)`` clicks go to non-intent-relevant
    hits, the rest to intent-relevant hits; when either pool is too small
    the deficit shifts to the other pool (logged). Chosen hits are emitted
    in page-rank order with sequence-number timestamps.
    """
    if not page:
        raise ValueError("cannot click on an empty result page")
    if policy.k_clicks > len(page):
        raise ValueError(
            f"page has {len(page)} hits but policy wants {policy.k_clicks} clicks"
        )
    intent_tokens = normalize_tokens(intent_phrase, index.stopwords)
    doc_row = {doc.id: row for row, doc in enumerate(index.docs)}
    relevant: list[int] = []
    decoys: list[int] = []
    for pos, hit in enumerate(page):
        tokens = set(index.doc_tokens[doc_row[hit.doc.id]])
        needles = set(intent_tokens)
        hit_is_relevant = bool(needles & tokens) if relevance_mode == "any" else needles <= tokens
        (relevant if hit_is_relevant else decoys).append(pos)

    want_decoy = _round_half_up(policy.k_clicks * policy.decoy_fraction)
    want_relevant = policy.k_clicks - want_decoy
    if want_decoy > len(decoys):
        shifted = want_decoy - len(decoys)
        logger.debug(
            "query %s: decoy pool short by %d; shifting to relevant clicks",
            query_id,
            shifted,
        )
        want_decoy -= shifted
        want_relevant += shifted
    if want_relevant > len(relevant):
        shifted = want_relevant - len(relevant)
        logger.debug(
            "query %s: relevant pool short by %d; shifting to decoy clicks",
            query_id,
            shifted,
        )
        want_relevant -= shifted
        want_decoy += shifted

    picked = sorted(rng.sample(decoys, want_decoy) + rng.sample(relevant, want_relevant))
    events: list[ClickEvent] = []
    for offset, pos in enumerate(picked):
        doc = page[pos].doc
        events.append(
            ClickEvent(
                session_id=session_id,
                query_id=query_id,
                target=doc.id,
                target_kind="result",
                categories=doc.categories,
                timestamp=seq_start + offset,
            )
        )
    return events


def update_profile(profile: PseudoProfile, events: Sequence[ClickEvent]) -> PseudoProfile:
    """Fold events into a new profile; the input profile is not mutated."""
    weights = dict(profile.category_weights)
    for event in events:
        for category in event.categories:
            weights[category] = weights.get(category, 0) + 1
    return PseudoProfile(category_weights=weights)


def exposure_report(
    ads_served: Sequence[Ad],
    intent_phrase: str,
    stopwords: frozenset[str] = frozenset(),
) -> ExposureReport:
    """Summarize how directly the served ads addressed the intent.

    An ad is *specific* when any of its tags, normalized, is fully contained
    in the normalized intent tokens; everything else only touches the intent
    at the conceptual (category) level.
    """
    if not ads_served:
        raise ValueError("cannot report exposure over an empty ad list")
    intent_tokens = set(normalize_tokens(intent_phrase, stopwords))
    specific = 0
    breakdown: dict[str, int] = {}
    for ad in ads_served:
        breakdown[ad.category] = breakdown.get(ad.category, 0) + 1
        for tag in ad.specific_tags:
            tag_tokens = set(normalize_tokens(tag, stopwords))
            if tag_tokens and tag_tokens <= intent_tokens:
                specific += 1
                break
    return ExposureReport(
        total_ads=len(ads_served),
        specific_ads=specific,
        conceptual_breakdown=breakdown,
    )


def run_session(
    intent: str,
    queries: Sequence[ObfuscatedQuery],
    index: SearchIndex,
    inventory: Sequence[Ad],
    policy: ClickPolicy,
    days: int,
    ads_per_day: int,
    rng: Random,
    top_k: int = 100,
    session_id: str = "S1",
    relevance_mode: str = "all",
) -> tuple[PseudoProfile, ExposureReport, list[dict]]:
    """Run one simulated browsing session end to end.

    Every query is executed and clicked per ``policy``; afterwards
    ``days * ads_per_day`` ad impressions are drawn against the evolving
    profile (impressions feed back into it when ``policy.include_ads``).
    Returns the final profile, the exposure report over all served ads, and
    the append-only event log.
    """
    if not queries:
        raise ValueError("need at least one query")
    if days < 1 or ads_per_day < 1:
        raise ValueError("days and ads_per_day must be >= 1")

    profile = PseudoProfile()
    log: list[dict] = []
    seq = 0
    for query in queries:
        page = index.execute(query.text, top_k=top_k)
        events = plan_clicks(
            page,
            index,
            intent,
            policy,
            rng,
            session_id=session_id,
            query_id=query.id,
            seq_start=seq,
            relevance_mode=relevance_mode,
        )
        seq += len(events)
        profile = update_profile(profile, events)
        log.extend(e.to_dict() for e in events)

    served: list[Ad] = []
    for day in range(1, days + 1):
        todays = sample_ads(inventory, profile.category_weights, ads_per_day, rng)
        served.extend(todays)
        impressions = [
            ClickEvent(
                session_id=session_id,
                query_id="",
                target=ad.id,
                target_kind="ad",
                categories=(ad.category,),
                timestamp=seq + i,
            )
            for i, ad in enumerate(todays)
        ]
        seq += len(impressions)
        for event, _ad in zip(impressions, todays):
            record = event.to_dict()
            record["type"] = "ad_impression"
            record["day"] = day
            log.append(record)
        if policy.include_ads:
            profile = update_profile(profile, impressions)

    report = exposure_report(served, intent, index.stopwords)
    return profile, report, log
