import numpy as np
import pytest

from dsproj.core import (
    DualPoint,
    ProblemInstance,
    constraint_matrix,
    default_tol_pattern,
    dual_to_Y,
    kkt_report,
    matricize,
    residual,
    sign_split,
    support_pattern,
    vectorize,
)
from dsproj.errors import DimensionError
from dsproj.generators import gen_normal
from dsproj.solver import modified_newton


def _random_dual(rng, n, scale=1.0):
    return DualPoint(scale * rng.standard_normal(n), scale * rng.standard_normal(n - 1))


def test_vectorize_column_major():
    np.testing.assert_array_equal(vectorize([[1, 3], [2, 4]]), [1, 2, 3, 4])
    np.testing.assert_array_equal(vectorize([[5]]), [5])


def test_vectorize_roundtrip(rng):
    X = rng.standard_normal((3, 3))
    np.testing.assert_array_equal(matricize(vectorize(X)), X)
    for n in range(1, 7):
        X = rng.standard_normal((n, n))
        np.testing.assert_array_equal(matricize(vectorize(X)), X)


def test_vectorize_dimension_errors():
    with pytest.raises(DimensionError):
        vectorize(np.zeros((2, 3)))
    with pytest.raises(DimensionError):
        matricize(np.zeros(5))
    with pytest.raises(DimensionError):
        matricize(np.zeros((2, 2)))


def test_instance_xhat_index_convention(rng):
    X = rng.standard_normal((4, 4))
    inst = ProblemInstance(X)
    n = inst.n
    for i in range(n):
        for j in range(n):
            assert inst.xhat[j * n + i] == X[i, j]


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_instance_rejects_nonfinite(bad):
    X = np.eye(3)
    X[1, 2] = bad
    with pytest.raises(ValueError, match="non-finite"):
        ProblemInstance(X)


def test_instance_rejects_nonsquare():
    with pytest.raises(DimensionError):
        ProblemInstance(np.zeros((2, 3)))
    with pytest.raises(DimensionError):
        ProblemInstance(np.zeros((0, 0)))


def test_instance_is_immutable():
    X = np.eye(2)
    inst = ProblemInstance(X)
    X[0, 0] = 7.0
    assert inst.Xhat[0, 0] == 1.0
    with pytest.raises(ValueError):
        inst.Xhat[0, 0] = 3.0


def test_dual_point_layout():
    y = DualPoint([1, 2, 3], [4, 5])
    np.testing.assert_array_equal(y.flat, [1, 2, 3, 4, 5])
    y2 = DualPoint.from_flat(y.flat)
    np.testing.assert_array_equal(y2.c, y.c)
    np.testing.assert_array_equal(y2.r, y.r)
    np.testing.assert_array_equal(y.row_multipliers(), [4, 5, 0])
    with pytest.raises(DimensionError):
        DualPoint([1, 2], [1, 2])
    with pytest.raises(DimensionError):
        DualPoint.from_flat([1, 2])


def test_dual_to_Y_examples():
    inst = ProblemInstance(np.eye(2))
    np.testing.assert_array_equal(dual_to_Y(inst, inst.zero_dual()), np.eye(2))
    np.testing.assert_array_equal(dual_to_Y(inst, DualPoint([1, 0], [0])), [[2, 0], [1, 1]])


def test_dual_to_Y_matches_explicit_operator(rng):
    for n in (1, 2, 5, 8):
        inst = ProblemInstance(rng.standard_normal((n, n)))
        y = _random_dual(rng, n)
        A = constraint_matrix(n)
        expected = matricize(inst.xhat + A.T @ y.flat)
        np.testing.assert_allclose(dual_to_Y(inst, y), expected, rtol=0, atol=1e-14)


def test_dual_to_Y_size_mismatch():
    with pytest.raises(DimensionError):
        dual_to_Y(ProblemInstance(np.eye(3)), DualPoint.zeros(2))


def test_constraint_matrix_shape():
    A = constraint_matrix(3).toarray()
    assert A.shape == (5, 9)
    # first row sums column 1, the 4th row sums row 1
    np.testing.assert_array_equal(A[0], [1, 1, 1, 0, 0, 0, 0, 0, 0])
    np.testing.assert_array_equal(A[3], [1, 0, 0, 1, 0, 0, 1, 0, 0])


def test_sign_split_examples():
    s = sign_split(np.array([[2.0, 0.0], [-1.0, 1.0]]), tol_pattern=0.0)
    np.testing.assert_array_equal(s.X, [[2, 0], [0, 1]])
    np.testing.assert_array_equal(s.Z, [[0, 0], [1, 0]])
    np.testing.assert_array_equal(s.M, [[1, 1], [0, 1]])

    s = sign_split(np.zeros((3, 3)))
    assert not s.X.any() and not s.Z.any()
    np.testing.assert_array_equal(s.M, np.ones((3, 3)))


def test_sign_split_tolerance_band():
    Y = np.array([[1.0, -0.5e-6], [-1.0, 1.0]])
    s = sign_split(Y, tol_pattern=1e-6)
    assert s.M[0, 1] == 1 and s.X[0, 1] == 0.0
    assert sign_split(Y, tol_pattern=0.0).M[0, 1] == 0


def test_sign_split_invariants(rng):
    for _ in range(20):
        Y = rng.standard_normal((6, 6))
        Y[rng.random((6, 6)) < 0.2] = 0.0
        s = sign_split(Y)
        np.testing.assert_array_equal(s.X - s.Z, Y)
        assert np.all(s.X >= 0) and np.all(s.Z >= 0)
        assert not np.any(s.X * s.Z)
        assert np.all(s.M[s.X > 0] == 1)
        np.testing.assert_array_equal(s.X, np.maximum(Y, 0.0))


def test_default_tol_pattern_scale():
    assert default_tol_pattern(np.array([[3.0, -9.0]])) == pytest.approx(1e-10)


def test_support_pattern_band():
    Y = np.array([[1.0, 1e-16], [0.0, -2.0]])
    np.testing.assert_array_equal(support_pattern(Y), [[1, 0], [0, 0]])
    np.testing.assert_array_equal(support_pattern(Y, 0.0), [[1, 1], [0, 0]])


def test_residual_examples():
    for n in (1, 2, 5):
        F, nrm = residual(ProblemInstance(np.full((n, n), 1.0 / n)), DualPoint.zeros(n))
        assert nrm <= 1e-15 and F.shape == (2 * n - 1,)
    F, nrm = residual(ProblemInstance(np.ones((2, 2))), DualPoint.zeros(2))
    np.testing.assert_array_equal(F, [1, 1, 1])
    assert nrm == pytest.approx(np.sqrt(3))


def test_residual_matches_explicit_operator(rng):
    for _ in range(100):
        n = int(rng.integers(1, 9))
        inst = ProblemInstance(rng.standard_normal((n, n)))
        y = _random_dual(rng, n)
        A = constraint_matrix(n)
        expected = A @ np.maximum(inst.xhat + A.T @ y.flat, 0.0) - 1.0
        F, nrm = residual(inst, y)
        scale = 1.0 + np.max(np.abs(expected))
        assert np.max(np.abs(F - expected)) <= 1e-12 * scale
        assert nrm == pytest.approx(np.linalg.norm(expected), rel=1e-12, abs=1e-14)


def test_kkt_report_exact_solution():
    k = kkt_report(ProblemInstance(np.full((4, 4), 0.25)), DualPoint.zeros(4))
    assert k.primal == k.dual == k.complementarity == 0.0
    assert k.total == 0.0
    assert set(k.as_dict()) == {"primal", "dual", "complementarity", "total"}


def test_kkt_dual_and_complementarity_vanish_everywhere(rng):
    for _ in range(50):
        n = int(rng.integers(1, 9))
        inst = ProblemInstance(10 * rng.standard_normal((n, n)))
        y = _random_dual(rng, n, scale=5.0)
        k = kkt_report(inst, y)
        xn = np.linalg.norm(inst.xhat)
        assert k.dual <= 1e-13 * (1 + xn)
        assert k.complementarity <= 1e-13 * (1 + xn**2)


def test_kkt_total_at_converged_n100():
    rep = modified_newton(gen_normal(100, 11))
    assert rep.converged
    assert rep.kkt.total <= 1e-12
