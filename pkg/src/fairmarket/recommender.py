"""Item-kNN scoring and top-k slate construction.

This is the purely user-centered baseline the fairness layers modify:
cosine item-item similarity over the binary train matrix, score by
summing similarities to a consumer's train items, then cut a top-N
candidate pool and a top-k slate.  Ties break by ascending item id
everywhere, which keeps every downstream artifact deterministic.
"""

import bisect
from array import array
from dataclasses import dataclass

from fairmarket import kernels
from fairmarket.marketplace import Marketplace


@dataclass(frozen=True)
class ScoredCandidate:
    item_id: int
    base_score: float
    quality: float  # min-max normalized base_score within the pool


@dataclass(frozen=True)
class Slate:
    """Ordered top-k list for one consumer, drawn from a top-N pool.

    pool is ordered by (base_score desc, item_id asc); entries hold the
    k delivered candidates in presentation order.
    """

    consumer_id: int
    entries: tuple
    pool: tuple


class ItemSimilarity:
    """Symmetric item-item cosine table in CSR form (unit diagonal).

    Items with no train interactions are similar only to themselves.
    """

    def __init__(self, indptr, indices, values, n_items):
        self.indptr = indptr
        self.indices = indices
        self.values = values
        self.n_items = n_items

    def value(self, i, j):
        lo, hi = self.indptr[i], self.indptr[i + 1]
        pos = bisect.bisect_left(self.indices, j, lo, hi)
        if pos < hi and self.indices[pos] == j:
            return self.values[pos]
        return 0.0


def item_similarity(marketplace: Marketplace) -> ItemSimilarity:
    """Cosine similarity between item columns of the binary train matrix."""
    n_items = len(marketplace.items)
    flat = array("q")
    offsets = array("q", [0])
    for items in marketplace.train_by_consumer:
        flat.extend(items)
        offsets.append(len(flat))
    if len(flat) == 0:
        raise ValueError("train interactions are empty")
    indptr, indices, values = kernels.similarity_csr(flat, offsets, n_items)
    return ItemSimilarity(indptr, indices, values, n_items)


def _popularity(marketplace: Marketplace):
    counts = array("d", bytes(8 * len(marketplace.items)))
    for items in marketplace.train_by_consumer:
        for i in items:
            counts[i] += 1.0
    return counts


def _score_array(consumer_id, marketplace, similarity):
    """Scores for all items plus the consumer's excluded train items.

    Consumers with an empty train set fall back to popularity counts.
    """
    train = marketplace.train_by_consumer[consumer_id]
    if len(train) == 0:
        return _popularity(marketplace), train
    scores = kernels.accumulate_scores(
        train,
        similarity.indptr,
        similarity.indices,
        similarity.values,
        similarity.n_items,
    )
    return scores, train


def score(consumer_id, marketplace, similarity):
    """Base score for every non-train item, as {item_id: score}."""
    scores, train = _score_array(consumer_id, marketplace, similarity)
    excluded = set(int(i) for i in train)
    return {
        i: scores[i] for i in range(similarity.n_items) if i not in excluded
    }


def _make_slate(consumer_id, ids, vals, k):
    lo = min(vals)
    hi = max(vals)
    span = hi - lo
    if span == 0.0:
        pool = tuple(
            ScoredCandidate(int(i), v, 1.0) for i, v in zip(ids, vals)
        )
    else:
        pool = tuple(
            ScoredCandidate(int(i), v, (v - lo) / span)
            for i, v in zip(ids, vals)
        )
    return Slate(consumer_id=consumer_id, entries=pool[:k], pool=pool)


def top_k(scores, k, n_pool, consumer_id=0) -> Slate:
    """Cut a slate from a {item_id: score} mapping.

    pool = the n_pool highest-scoring items (clamped to what exists),
    entries = its first k; quality is min-max normalized within the
    pool, all-1.0 when the pool scores are constant.
    """
    if k < 1 or n_pool < k:
        raise ValueError("need 1 <= k <= n_pool")
    if len(scores) < k:
        raise ValueError(
            f"only {len(scores)} scorable items for k={k}; "
            "experiment configuration invalid"
        )
    ranked = sorted(scores, key=lambda i: (-scores[i], i))[:n_pool]
    ids = array("q", ranked)
    vals = array("d", [scores[i] for i in ranked])
    return _make_slate(consumer_id, ids, vals, k)


def build_slate(consumer_id, marketplace, similarity, k, n_pool) -> Slate:
    """Fused score-and-cut path; identical output to top_k(score(...))."""
    scores, train = _score_array(consumer_id, marketplace, similarity)
    n_scorable = similarity.n_items - len(train)
    if n_scorable < k:
        raise ValueError(
            f"only {n_scorable} scorable items for k={k}; "
            "experiment configuration invalid"
        )
    ids, vals = kernels.top_n_by_score(scores, train, n_pool)
    return _make_slate(consumer_id, ids, vals, k)
