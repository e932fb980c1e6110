"""Frequent-itemset mining over a transaction database.

The miner is a level-wise Apriori: candidates of size k are produced by
joining frequent (k-1)-itemsets that share a (k-2)-prefix, pruned by
downward closure, then counted with one pass over the transactions.
Support ratios are always derived from exact integer counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .transactions import TransactionDatabase


@dataclass(frozen=True)
class FrequentItemset:
    """A pattern: sorted item ids with exact occurrence count and ratio."""

    items: tuple[int, ...]
    support_count: int
    support_ratio: float


@dataclass(frozen=True)
class FrequencyGrid:
    """Per-position occurrence counts over all transactions of one database."""

    grid_h: int
    grid_w: int
    counts: np.ndarray  # int64, shape (grid_h, grid_w)
    n_transactions: int

    @property
    def ratios(self) -> np.ndarray:
        if self.n_transactions == 0:
            return np.zeros((self.grid_h, self.grid_w), dtype=np.float64)
        return self.counts / self.n_transactions


def _check_ids(db: TransactionDatabase, itemset) -> tuple[int, ...]:
    items = tuple(sorted(set(int(i) for i in itemset)))
    for item in items:
        if item < 0 or item >= db.item_universe_size:
            raise ValueError(
                f"item id {item} outside universe [0, {db.item_universe_size})"
            )
    return items


def support(db: TransactionDatabase, itemset) -> float:
    """Fraction of transactions containing the whole itemset.

    The empty itemset is contained in every transaction, so its support is 1.
    """
    if db.n == 0:
        raise ValueError("support is undefined on an empty database")
    items = _check_ids(db, itemset)
    target = frozenset(items)
    count = sum(1 for t in db.transactions if target.issubset(t))
    return count / db.n


def item_frequencies(db: TransactionDatabase) -> FrequencyGrid:
    """Count, for every grid position, how many transactions contain it."""
    counts = np.zeros(db.item_universe_size, dtype=np.int64)
    for t in db.transactions:
        if t:
            counts[np.asarray(t, dtype=np.intp)] += 1
    return FrequencyGrid(
        grid_h=db.grid_h,
        grid_w=db.grid_w,
        counts=counts.reshape(db.grid_h, db.grid_w),
        n_transactions=db.n,
    )


def mine_frequent(
    db: TransactionDatabase,
    alpha: float,
    max_len: int | None = None,
) -> list[FrequentItemset]:
    """All itemsets with support ratio >= alpha, up to max_len items each.

    Output is sorted by (size, lexicographic items) and satisfies downward
    closure: every subset of a reported itemset is itself reported (within
    the size cap).
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if max_len is not None and max_len < 1:
        raise ValueError(f"max_len must be >= 1, got {max_len}")
    n = db.n
    if n == 0:
        return []

    sets = [frozenset(t) for t in db.transactions]

    # level 1 from direct counts
    counts: dict[tuple[int, ...], int] = {}
    for t in db.transactions:
        for item in t:
            key = (item,)
            counts[key] = counts.get(key, 0) + 1
    current = sorted(k for k, c in counts.items() if c / n >= alpha)
    result: dict[tuple[int, ...], int] = {k: counts[k] for k in current}

    k = 2
    while current and (max_len is None or k <= max_len):
        frequent_prev = set(current)
        candidates = []
        for a, b in _prefix_join_pairs(current):
            cand = a + (b[-1],)
            if all(
                tuple(sub) in frequent_prev for sub in combinations(cand, k - 1)
            ):
                candidates.append(cand)
        if not candidates:
            break
        cand_counts = {c: 0 for c in candidates}
        cand_sets = {c: frozenset(c) for c in candidates}
        for t in sets:
            if len(t) < k:
                continue
            for c in candidates:
                if cand_sets[c] <= t:
                    cand_counts[c] += 1
        current = sorted(c for c, cnt in cand_counts.items() if cnt / n >= alpha)
        for c in current:
            result[c] = cand_counts[c]
        k += 1

    ordered = sorted(result, key=lambda items: (len(items), items))
    return [
        FrequentItemset(items=c, support_count=result[c], support_ratio=result[c] / n)
        for c in ordered
    ]


def _prefix_join_pairs(frequent: list[tuple[int, ...]]):
    """Pairs (a, b) of frequent k-itemsets sharing their first k-1 items,
    with a < b lexicographically. Joining appends b's last item to a."""
    pairs = []
    i = 0
    while i < len(frequent):
        j = i + 1
        prefix = frequent[i][:-1]
        while j < len(frequent) and frequent[j][:-1] == prefix:
            j += 1
        for a in range(i, j):
            for b in range(a + 1, j):
                pairs.append((frequent[a], frequent[b]))
        i = j
    return pairs


def load_transaction_file(path) -> TransactionDatabase:
    """Plain-text loader: one transaction per line, space-separated item ids.

    The universe is modeled as a single-row grid sized by the largest id.
    """
    transactions = []
    max_id = -1
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                transactions.append(())
                continue
            try:
                ids = sorted(set(int(tok) for tok in line.split()))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-integer item id") from exc
            if ids and ids[0] < 0:
                raise ValueError(f"{path}:{lineno}: negative item id {ids[0]}")
            if ids:
                max_id = max(max_id, ids[-1])
            transactions.append(tuple(ids))
    return TransactionDatabase(
        grid_h=1, grid_w=max(max_id + 1, 1), transactions=tuple(transactions)
    )
