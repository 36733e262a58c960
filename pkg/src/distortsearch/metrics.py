"""Retrieval quality metrics.

Precision and recall are kept honest about their undefined corners: a query
that retrieves nothing has *no* precision (``None``), which is a distinct
outcome from precision 0.0, and likewise recall is ``None`` when the corpus
holds no relevant document.
"""
from __future__ import annotations

from dataclasses import dataclass
from statistics import median


def _check_counts(relevant_retrieved: int, retrieved: int, relevant_total: int | None = None) -> None:
    if retrieved < 0 or relevant_retrieved < 0:
        raise ValueError("counts must be non-negative")
    if relevant_retrieved > retrieved:
        raise ValueError(
            f"relevant_retrieved ({relevant_retrieved}) cannot exceed retrieved ({retrieved})"
        )
    if relevant_total is not None:
        if relevant_total < 0:
            raise ValueError("counts must be non-negative")
        if relevant_retrieved > relevant_total:
            raise ValueError(
                f"relevant_retrieved ({relevant_retrieved}) cannot exceed relevant_total ({relevant_total})"
            )


def precision(relevant_retrieved: int, retrieved: int) -> float | None:
    """Fraction of retrieved documents that are relevant.

    Returns ``None`` for the no-results case (nothing retrieved), which
    callers must treat as its own outcome rather than as zero.
    """
    _check_counts(relevant_retrieved, retrieved)
    if retrieved == 0:
        return None
    return relevant_retrieved / retrieved


def recall(relevant_retrieved: int, relevant_total: int) -> float | None:
    """Fraction of relevant documents that were retrieved; ``None`` when
    the corpus contains no relevant document."""
    _check_counts(relevant_retrieved, relevant_retrieved, relevant_total)
    if relevant_total == 0:
        return None
    return relevant_retrieved / relevant_total


@dataclass(frozen=True)
class QueryOutcome:
    """Per-query retrieval bookkeeping for one executed query."""

    query_id: str
    retrieved: int
    relevant_retrieved: int
    relevant_total: int

    def __post_init__(self) -> None:
        _check_counts(self.relevant_retrieved, self.retrieved, self.relevant_total)

    @property
    def no_results(self) -> bool:
        return self.retrieved == 0

    @property
    def precision(self) -> float | None:
        return precision(self.relevant_retrieved, self.retrieved)

    @property
    def recall(self) -> float | None:
        return recall(self.relevant_retrieved, self.relevant_total)

    def to_dict(self) -> dict:
        return {
            "query_id": self.query_id,
            "retrieved": self.retrieved,
            "relevant_retrieved": self.relevant_retrieved,
            "relevant_total": self.relevant_total,
            "precision": self.precision,
            "recall": self.recall,
            "no_results": self.no_results,
        }


def median_precision(outcomes: list[QueryOutcome]) -> float | None:
    """Median precision over queries that retrieved at least one document."""
    values = [o.precision for o in outcomes if o.precision is not None]
    if not values:
        return None
    return float(median(values))
