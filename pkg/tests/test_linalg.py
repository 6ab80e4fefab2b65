import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from plspath.errors import (
    ConstantVector,
    NegativeAlpha,
    NotSymmetric,
    OverlappingSubspaces,
)
from plspath.linalg import (
    Dataset,
    oblique_component,
    ols,
    project_span,
    standardize,
    sym_eig,
    sym_power,
)

RNG = np.random.default_rng(20240817)


def random_block(n, p, rng=RNG):
    return np.column_stack([standardize(rng.normal(size=n)) for _ in range(p)])


class TestStandardize:
    def test_closed_form(self):
        out = standardize([1.0, 2.0, 3.0])
        expected = np.array([-1.0, 0.0, 1.0]) / np.sqrt(2.0)
        np.testing.assert_allclose(out, expected, atol=1e-15)

    def test_idempotent(self):
        v = standardize(RNG.normal(size=23))
        np.testing.assert_allclose(standardize(v), v, atol=1e-14)

    def test_constant_vector_raises(self):
        with pytest.raises(ConstantVector):
            standardize([5.0, 5.0, 5.0])

    def test_direction_preserved(self):
        v = RNG.normal(size=15)
        out = standardize(v)
        centered = v - v.mean()
        np.testing.assert_allclose(out, centered / np.linalg.norm(centered), atol=1e-14)

    @given(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=40))
    @settings(max_examples=60, deadline=None)
    def test_invariants_property(self, values):
        v = np.asarray(values)
        if np.ptp(v) <= 1e-12:
            return
        out = standardize(v)
        assert abs(out.mean()) < 1e-10
        assert abs(np.linalg.norm(out) - 1.0) < 1e-10


class TestProjectSpan:
    def test_axis_projection(self):
        X = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
        np.testing.assert_allclose(project_span(X, [1.0, 2.0, 3.0]), [1.0, 2.0, 0.0], atol=1e-14)

    def test_vector_in_span_fixed(self):
        X = random_block(12, 3)
        y = X @ np.array([0.3, -1.2, 0.5])
        np.testing.assert_allclose(project_span(X, y), y, atol=1e-12)

    def test_rank_deficient_matches_pinv_oracle(self):
        # duplicated direction: X = [e1, 2 e1] in R^2
        X = np.array([[1.0, 2.0], [0.0, 0.0]])
        y = np.array([3.0, 4.0])
        out = project_span(X, y)
        oracle = X @ np.linalg.pinv(X.T @ X) @ X.T @ y
        np.testing.assert_allclose(out, oracle, atol=1e-12)
        np.testing.assert_allclose(out, [3.0, 0.0], atol=1e-12)

    def test_idempotent_and_self_adjoint(self):
        for _ in range(10):
            X = RNG.normal(size=(15, 4))
            y = RNG.normal(size=15)
            x2 = RNG.normal(size=15)
            Py = project_span(X, y)
            assert np.linalg.norm(project_span(X, Py) - Py) <= 1e-8
            lhs = float(project_span(X, x2) @ y)
            rhs = float(x2 @ Py)
            assert abs(lhs - rhs) <= 1e-8

    def test_empty_block(self):
        out = project_span(np.zeros((4, 0)), [1.0, 2.0, 3.0, 4.0])
        np.testing.assert_allclose(out, 0.0)


class TestObliqueComponent:
    def test_empty_parallel_is_projection(self):
        X = RNG.normal(size=(10, 3))
        y = RNG.normal(size=10)
        np.testing.assert_allclose(
            oblique_component(X, np.zeros((10, 0)), y), project_span(X, y), atol=1e-12
        )

    def test_vector_inside_parallel_maps_to_zero(self):
        X = random_block(20, 3)
        Z = random_block(20, 2)
        y = Z @ np.array([1.5, -0.5])
        np.testing.assert_allclose(oblique_component(X, Z, y), 0.0, atol=1e-10)

    def test_oblique_geometry(self):
        # a, b orthonormal; c mixes all three axes; y = e2 + e3 decomposes
        # as 1*a + 0*b + sqrt(3)*c, so the [a,b]-part is exactly a.
        a = np.array([1.0, 0.0, 0.0])
        b = np.array([0.0, 1.0, 0.0])
        c = np.array([-1.0, 1.0, 1.0]) / np.sqrt(3.0)
        y = np.array([0.0, 1.0, 1.0])
        X = np.column_stack([a, b])
        Z = c.reshape(-1, 1)
        out = oblique_component(X, Z, y)
        np.testing.assert_allclose(out, a, atol=1e-12)
        # least-squares oracle: coefficient split of the joint regression
        coef = np.linalg.lstsq(np.column_stack([a, b, c]), y, rcond=None)[0]
        np.testing.assert_allclose(out, coef[0] * a + coef[1] * b, atol=1e-12)

    def test_decomposition_property(self):
        for _ in range(10):
            X = RNG.normal(size=(18, 4))
            Z = RNG.normal(size=(18, 3))
            y = RNG.normal(size=18)
            both = oblique_component(X, Z, y) + oblique_component(Z, X, y)
            joint = project_span(np.hstack([X, Z]), y)
            assert np.linalg.norm(both - joint) <= 1e-8

    def test_overlap_raises(self):
        X = RNG.normal(size=(12, 3))
        Z = np.column_stack([X[:, 0], RNG.normal(size=12)])
        with pytest.raises(OverlappingSubspaces):
            oblique_component(X, Z, RNG.normal(size=12))


class TestSymEig:
    def test_diagonal(self):
        es = sym_eig(np.diag([2.0, 1.0]))
        np.testing.assert_allclose(es.eigenvalues, [2.0, 1.0])
        np.testing.assert_allclose(np.abs(es.eigenvectors), np.eye(2), atol=1e-14)

    def test_two_by_two_closed_form(self):
        es = sym_eig(np.array([[1.0, 0.5], [0.5, 1.0]]))
        np.testing.assert_allclose(es.eigenvalues, [1.5, 0.5], atol=1e-14)
        np.testing.assert_allclose(np.abs(es.eigenvectors[:, 0]), np.full(2, 1 / np.sqrt(2)), atol=1e-12)
        np.testing.assert_allclose(np.abs(es.eigenvectors[:, 1]), np.full(2, 1 / np.sqrt(2)), atol=1e-12)

    def test_zero_matrix(self):
        es = sym_eig(np.zeros((3, 3)))
        np.testing.assert_allclose(es.eigenvalues, 0.0)

    def test_not_symmetric(self):
        with pytest.raises(NotSymmetric):
            sym_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_reconstruction_and_orthonormality(self):
        for _ in range(8):
            A = RNG.normal(size=(6, 6))
            S = A @ A.T
            es = sym_eig(S)
            V = es.eigenvectors
            np.testing.assert_allclose(V.T @ V, np.eye(6), atol=1e-8)
            recon = (V * es.eigenvalues) @ V.T
            assert np.linalg.norm(recon - S) <= 1e-8 * np.linalg.norm(S)
            assert np.all(np.diff(es.eigenvalues) <= 1e-12)

    def test_sign_fix_deterministic(self):
        S = RNG.normal(size=(5, 5))
        S = S @ S.T
        es1, es2 = sym_eig(S), sym_eig(S.copy())
        np.testing.assert_array_equal(es1.eigenvectors, es2.eigenvectors)
        for k in range(5):
            v = es1.eigenvectors[:, k]
            assert v[np.argmax(np.abs(v))] > 0


class TestSymPower:
    def test_sqrt_diagonal(self):
        np.testing.assert_allclose(sym_power(np.diag([4.0, 1.0]), 0.5), np.diag([2.0, 1.0]), atol=1e-12)

    def test_alpha_one_identity(self):
        A = RNG.normal(size=(4, 4))
        S = A @ A.T
        np.testing.assert_allclose(sym_power(S, 1.0), S, atol=1e-10)

    def test_half_power_closed_form(self):
        out = sym_power(np.array([[1.0, 0.5], [0.5, 1.0]]), 0.5)
        expected = np.array([[0.9659258262890683, 0.2588190451025207],
                             [0.2588190451025207, 0.9659258262890683]])
        np.testing.assert_allclose(out, expected, atol=1e-12)

    def test_zero_power_is_range_projector(self):
        X = RNG.normal(size=(6, 2))
        S = X @ X.T  # rank 2
        P = sym_power(S, 0.0)
        np.testing.assert_allclose(P @ P, P, atol=1e-10)
        np.testing.assert_allclose(P @ S, S, atol=1e-9)
        assert abs(np.trace(P) - 2.0) < 1e-8

    def test_negative_alpha(self):
        with pytest.raises(NegativeAlpha):
            sym_power(np.eye(2), -0.5)

    def test_power_addition(self):
        for _ in range(6):
            A = RNG.normal(size=(5, 5))
            S = A @ A.T
            for a, b in [(0.5, 0.5), (0.5, 1.0), (1.0, 2.0), (0.5, 2.0)]:
                lhs = sym_power(S, a) @ sym_power(S, b)
                rhs = sym_power(S, a + b)
                assert np.linalg.norm(lhs - rhs) <= 1e-7 * np.linalg.norm(rhs)


class TestOls:
    def test_exact_line(self):
        x = RNG.normal(size=30)
        x -= x.mean()
        fit = ols(x.reshape(-1, 1), 2.0 * x)
        np.testing.assert_allclose(fit.coefficients, [2.0], atol=1e-12)
        assert abs(fit.r_squared - 1.0) < 1e-12

    def test_orthogonal_gives_zero(self):
        x = standardize(RNG.normal(size=40))
        y = RNG.normal(size=40)
        y -= y.mean()
        y -= (y @ x) * x
        fit = ols(x.reshape(-1, 1), y)
        assert abs(fit.coefficients[0]) < 1e-10
        assert abs(fit.r_squared) < 1e-10

    def test_duplicate_predictor_minimal_norm(self):
        x = standardize(RNG.normal(size=25))
        y = 3.0 * x
        X = np.column_stack([x, x])
        fit = ols(X, y)
        oracle = np.linalg.pinv(X) @ y
        np.testing.assert_allclose(fit.coefficients, oracle, atol=1e-10)
        np.testing.assert_allclose(fit.coefficients, [1.5, 1.5], atol=1e-10)
        np.testing.assert_allclose(fit.fitted, y, atol=1e-10)

    def test_fit_invariants(self):
        X = RNG.normal(size=(30, 4))
        X -= X.mean(axis=0)
        y = RNG.normal(size=30)
        y -= y.mean()
        fit = ols(X, y)
        np.testing.assert_allclose(fit.fitted + fit.residuals, y, atol=1e-12)
        assert np.max(np.abs(X.T @ fit.residuals)) <= 1e-8
        rss = float(fit.residuals @ fit.residuals)
        tss = float(y @ y)
        assert abs(fit.r_squared - (1 - rss / tss)) < 1e-12
        assert 0.0 <= fit.r_squared <= 1.0


class TestDataset:
    def test_standardized_columns(self):
        ds = Dataset(RNG.normal(size=(10, 3)) * 7 + 3, ("a", "b", "c"))
        std = ds.standardized()
        for j in range(3):
            col = std.values[:, j]
            assert abs(col.mean()) < 1e-10
            assert abs(np.linalg.norm(col) - 1.0) < 1e-10

    def test_requires_two_rows(self):
        with pytest.raises(Exception):
            Dataset(np.ones((1, 2)), ("a", "b"))
