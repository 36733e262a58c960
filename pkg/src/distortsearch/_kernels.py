"""Hot numeric kernels: pairwise distances and posting-list accumulation.

Both kernels ship in two interchangeable builds: a numba ``@njit`` version
and a pure-numpy version. The numpy build is selected when numba is not
importable or when ``DISTORTSEARCH_NO_NUMBA=1`` is set. Both builds perform
floating-point accumulation in the same left-to-right order (no fastmath,
no reassociation), so their outputs are bit-identical.
"""
from __future__ import annotations

import logging
import os

import numpy as np

logger = logging.getLogger(__name__)

_ENV_FLAG = "DISTORTSEARCH_NO_NUMBA"


def _numba_disabled() -> bool:
    return os.environ.get(_ENV_FLAG, "").strip() not in ("", "0")


def _pairwise_sq_dists_np(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.empty((a.shape[0], b.shape[0]), dtype=np.float64)
    for i in range(a.shape[0]):
        diff = a[i] - b
        sq = diff * diff
        # cumulative sum fixes the same left-to-right accumulation order
        # as the scalar loop in the numba build
        out[i] = np.cumsum(sq, axis=1)[:, -1] if sq.shape[1] else 0.0
    return out


def _accumulate_scores_np(
    scores: np.ndarray, doc_idx: np.ndarray, weights: np.ndarray
) -> None:
    np.add.at(scores, doc_idx, weights)


_using_numba = False
if not _numba_disabled():
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - depends on environment
        logger.info("numba not importable; using numpy kernels")
    else:
        @njit(cache=True)
        def _pairwise_sq_dists_nb(a, b):  # pragma: no cover - compiled
            out = np.empty((a.shape[0], b.shape[0]), dtype=np.float64)
            for i in range(a.shape[0]):
                for j in range(b.shape[0]):
                    acc = 0.0
                    for k in range(a.shape[1]):
                        d = a[i, k] - b[j, k]
                        acc += d * d
                    out[i, j] = acc
            return out

        @njit(cache=True)
        def _accumulate_scores_nb(scores, doc_idx, weights):  # pragma: no cover
            for p in range(doc_idx.shape[0]):
                scores[doc_idx[p]] += weights[p]

        _using_numba = True

USING_NUMBA = _using_numba


def backend_name() -> str:
    return "numba" if USING_NUMBA else "numpy"


def pairwise_sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between all row pairs of ``a`` and ``b``.

    Returns a ``(len(a), len(b))`` float64 matrix. Accumulation over the
    feature axis is strictly left to right in both builds.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("inputs must be 2-D")
    if a.shape[1] != b.shape[1]:
        raise ValueError(
            f"feature dimensions differ: {a.shape[1]} vs {b.shape[1]}"
        )
    if USING_NUMBA:
        return _pairwise_sq_dists_nb(a, b)
    return _pairwise_sq_dists_np(a, b)


def accumulate_scores(
    scores: np.ndarray, doc_idx: np.ndarray, weights: np.ndarray
) -> None:
    """Add ``weights[p]`` into ``scores[doc_idx[p]]`` for every posting.

    Postings are applied in array order; ``scores`` is updated in place.
    """
    if scores.dtype != np.float64:
        raise ValueError("scores must be float64")
    doc_idx = np.ascontiguousarray(doc_idx, dtype=np.int64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if doc_idx.shape != weights.shape or doc_idx.ndim != 1:
        raise ValueError("doc_idx and weights must be 1-D and equal length")
    if doc_idx.size and (doc_idx.min() < 0 or doc_idx.max() >= scores.shape[0]):
        raise IndexError("doc index out of range")
    if USING_NUMBA:
        _accumulate_scores_nb(scores, doc_idx, weights)
    else:
        _accumulate_scores_np(scores, doc_idx, weights)
