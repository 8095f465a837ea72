import time

import numpy as np
import pytest

from dsproj.graph import components, is_connected, partition_from_labels


def _check_partition(M, part):
    n = M.shape[0]
    rows = np.concatenate(part.row_groups) if part.row_groups else np.array([])
    cols = np.concatenate(part.col_groups) if part.col_groups else np.array([])
    assert sorted(rows.tolist()) == list(range(n))
    assert sorted(cols.tolist()) == list(range(n))
    for k in range(part.K):
        for l in range(part.K):
            if k != l and part.row_groups[k].size and part.col_groups[l].size:
                assert not M[np.ix_(part.row_groups[k], part.col_groups[l])].any()
    assert part.last_has_row_n
    assert (n - 1) in part.row_groups[-1]


def test_identity_two_components():
    part = components(np.eye(2, dtype=int))
    assert part.K == 2
    assert part.row_groups[0].tolist() == [0] and part.col_groups[0].tolist() == [0]
    assert part.row_groups[1].tolist() == [1] and part.col_groups[1].tolist() == [1]
    assert part.last_has_row_n


def test_full_and_path_connected():
    assert components(np.ones((4, 4), dtype=int)).K == 1
    assert components(np.array([[1, 1], [0, 1]])).K == 1
    assert is_connected(np.ones((3, 3)))
    assert not is_connected(np.eye(2))


def test_zero_column_is_isolated_node():
    M = np.ones((3, 3), dtype=int)
    M[:, 1] = 0
    part = components(M)
    assert part.K == 2
    assert not is_connected(M)
    shapes = part.block_shapes()
    assert (0, 1) in shapes and shapes[-1] == (3, 2)


def test_zero_row_is_isolated_node():
    M = np.ones((3, 3), dtype=int)
    M[2] = 0
    part = components(M)
    assert part.K == 2
    assert part.block_shapes()[-1] == (1, 0)
    assert part.row_groups[-1].tolist() == [2]


def test_zero_matrix():
    part = components(np.zeros((3, 3), dtype=int))
    assert part.K == 6
    _check_partition(np.zeros((3, 3)), part)


def test_one_by_one():
    assert is_connected(np.ones((1, 1)))
    assert not is_connected(np.zeros((1, 1)))


def test_deterministic_ordering():
    # blocks {rows 2, cols 0}, {rows 0, cols 2}, {rows 1, cols 1}; row n = 2 goes last
    M = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
    part = components(M)
    assert [g.tolist() for g in part.row_groups] == [[0], [1], [2]]
    assert [g.tolist() for g in part.col_groups] == [[2], [1], [0]]


def test_random_partitions_valid(rng):
    for _ in range(200):
        n = int(rng.integers(1, 9))
        M = (rng.random((n, n)) < rng.uniform(0.05, 0.5)).astype(int)
        part = components(M)
        _check_partition(M, part)
        assert is_connected(M) == (part.K == 1 and all(r.size and c.size for r, c in zip(part.row_groups, part.col_groups)))


def test_permutation_equivariance(rng):
    for _ in range(50):
        n = int(rng.integers(2, 9))
        M = (rng.random((n, n)) < 0.25).astype(int)
        p, q = rng.permutation(n), rng.permutation(n)
        base = components(M)
        perm = components(M[np.ix_(p, q)])
        assert perm.K == base.K
        # row i of the permuted matrix is row p[i] of M
        same_rows = base.row_labels[p]
        same_cols = base.col_labels[q]
        mapping = {}
        for a, b in zip(np.concatenate([perm.row_labels, perm.col_labels]), np.concatenate([same_rows, same_cols])):
            assert mapping.setdefault(a, b) == b


def test_partition_from_labels_canonical():
    part = partition_from_labels(np.array([7, 3, 3]), np.array([3, 7, 3]))
    assert part.K == 2
    assert part.row_labels.tolist() == [0, 1, 1]
    assert part.col_labels.tolist() == [1, 0, 1]


def test_components_quadratic_time(rng):
    sizes = [256, 512, 1024]
    times = []
    for n in sizes:
        M = (rng.random((n, n)) < 0.01).astype(np.int8)
        components(M)
        best = min(_timed(components, M) for _ in range(3))
        times.append(best)
    # best fit of t = a n^2 through the data, then every point within 5x
    a = sum(t * n**2 for t, n in zip(times, sizes)) / sum(n**4 for n in sizes)
    for t, n in zip(times, sizes):
        assert t <= 5 * a * n**2 + 2e-3


def _timed(f, *args):
    t = time.perf_counter()
    f(*args)
    return time.perf_counter() - t
