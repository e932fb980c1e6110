"""Turn a feature stack into a transaction database.

Each channel becomes one transaction; the items are the grid positions whose
activation strictly exceeds that channel's mean of positive values. Item ids
are row-major: id = y * grid_w + x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensors import FeatureStack


@dataclass(frozen=True)
class TransactionDatabase:
    """N transactions over an item universe of grid_h * grid_w position ids.

    Transactions are strictly sorted, duplicate-free tuples. Empty
    transactions are kept so that N always equals the source channel count.
    """

    grid_h: int
    grid_w: int
    transactions: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.transactions)

    @property
    def item_universe_size(self) -> int:
        return self.grid_h * self.grid_w


def channel_threshold(channel: np.ndarray) -> float | None:
    """Mean of the strictly positive values of one channel.

    Returns None when the channel has no positive value; such a channel
    yields an empty transaction.
    """
    values = np.asarray(channel, dtype=np.float64).reshape(-1)
    positive = values[values > 0.0]
    if positive.size == 0:
        return None
    return float(positive.mean())


def build_transactions(stack: FeatureStack) -> TransactionDatabase:
    """One transaction per channel: ids of positions strictly above the
    channel's threshold. Scaling a channel by a positive constant scales the
    threshold identically, so its transaction is scale-invariant.
    """
    stack.validate()
    h, w = stack.height, stack.width
    rows = []
    for channel in stack.data:
        flat = np.asarray(channel, dtype=np.float64).reshape(-1)
        beta = channel_threshold(flat)
        if beta is None:
            rows.append(())
        else:
            rows.append(tuple(int(i) for i in np.flatnonzero(flat > beta)))
    return TransactionDatabase(grid_h=h, grid_w=w, transactions=tuple(rows))
