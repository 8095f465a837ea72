"""Connected components of the bipartite row/column graph of a 0-1 pattern.

Rows and columns are separate node sets; ``M[i, j] = 1`` is an edge between
row ``i`` and column ``j``.  Isolated nodes form their own components, so a
zero row of ``M`` is a component with rows and no columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

__all__ = ["BlockPartition", "components", "is_connected", "partition_from_labels"]


@dataclass(frozen=True)
class BlockPartition:
    """Components ordered by (smallest row, smallest column); the one holding row n is last."""

    row_labels: np.ndarray
    col_labels: np.ndarray
    K: int
    row_groups: list = field(repr=False)
    col_groups: list = field(repr=False)

    @property
    def last_has_row_n(self) -> bool:
        return bool(self.row_labels[-1] == self.K - 1)

    @property
    def n(self) -> int:
        return self.row_labels.size

    def block_shapes(self) -> list[tuple[int, int]]:
        return [(len(r), len(c)) for r, c in zip(self.row_groups, self.col_groups)]


def partition_from_labels(row_labels, col_labels) -> BlockPartition:
    """Canonicalize arbitrary component labels into a :class:`BlockPartition`."""
    row_labels = np.asarray(row_labels)
    col_labels = np.asarray(col_labels)
    n = row_labels.size
    _, inv = np.unique(np.concatenate([row_labels, col_labels]), return_inverse=True)
    raw_r, raw_c = inv[:n], inv[n:]
    k = int(inv.max()) + 1 if inv.size else 0

    big = 2 * n + 1
    min_row = np.full(k, big)
    min_col = np.full(k, big)
    np.minimum.at(min_row, raw_r, np.arange(n))
    np.minimum.at(min_col, raw_c, np.arange(n))
    last = raw_r[n - 1]
    key_primary = np.where(np.arange(k) == last, 1, 0)
    order = np.lexsort((min_col, min_row, key_primary))
    new_id = np.empty(k, dtype=np.intp)
    new_id[order] = np.arange(k)

    rl = new_id[raw_r]
    cl = new_id[raw_c]
    rows_sorted = np.argsort(rl, kind="stable")
    cols_sorted = np.argsort(cl, kind="stable")
    row_groups = np.split(rows_sorted, np.searchsorted(rl[rows_sorted], np.arange(1, k)))
    col_groups = np.split(cols_sorted, np.searchsorted(cl[cols_sorted], np.arange(1, k)))
    return BlockPartition(row_labels=rl, col_labels=cl, K=k, row_groups=row_groups, col_groups=col_groups)


def components(M) -> BlockPartition:
    """Connected components of the bipartite graph with reduced adjacency ``M``."""
    M = np.asarray(M)
    n = M.shape[0]
    ii, jj = np.nonzero(M)
    adj = sp.csr_matrix((np.ones(ii.size, dtype=np.int8), (ii, jj + n)), shape=(2 * n, 2 * n))
    _, labels = connected_components(adj, directed=False)
    return partition_from_labels(labels[:n], labels[n:])


def is_connected(M) -> bool:
    """True iff all 2n row and column nodes lie in one component."""
    M = np.asarray(M)
    if M.size == 0:
        return False
    if not (M.any(axis=0).all() and M.any(axis=1).all()):
        return False
    return components(M).K == 1
