"""Deterministic dense linear algebra for factor estimation.

Everything operates on plain float64 numpy arrays. Score vectors are kept
*standardized*: zero mean and unit Euclidean norm. Under that convention
the dot product of two standardized vectors is exactly their correlation,
and regression coefficients between them match the coefficients one would
get for conventionally standardized (unit-variance) variables.

Rank decisions are deterministic everywhere: eigenvalues or singular
values below ``RANK_RTOL`` times the largest one are treated as exact
zeros, and eigenvector signs are fixed so the entry of largest magnitude
is positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ConstantVector,
    DimensionMismatch,
    NegativeAlpha,
    NotSymmetric,
    OverlappingSubspaces,
)

# Relative cutoff below which eigen/singular values count as zero.
RANK_RTOL = 1e-10
# Looser relative cutoff (on squared singular values) for the
# subspace-overlap test: near-intersections are flagged early.
OVERLAP_RTOL = 1e-8

#: A standardized score vector: zero mean, unit Euclidean norm.
FactorScores = np.ndarray


@dataclass(frozen=True)
class Dataset:
    """An observation matrix with named columns.

    Parameters
    ----------
    values : (n, J) ndarray
        Numeric observations, no missing entries.
    column_names : tuple of str
        One name per column, unique.
    row_labels : tuple of str, optional
        Cosmetic row identifiers (never used in computations).
    """

    values: np.ndarray
    column_names: tuple[str, ...]
    row_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "column_names", tuple(self.column_names))
        if values.ndim != 2:
            raise DimensionMismatch("dataset values must be a 2-d matrix")
        if values.shape[0] < 2:
            raise DimensionMismatch("a dataset needs at least two observations")
        if values.shape[1] != len(self.column_names):
            raise DimensionMismatch(
                f"{len(self.column_names)} column names for {values.shape[1]} columns"
            )
        if len(set(self.column_names)) != len(self.column_names):
            raise DimensionMismatch("column names must be unique")
        if not np.all(np.isfinite(values)):
            raise DimensionMismatch("dataset contains non-finite values")
        if self.row_labels is not None:
            object.__setattr__(self, "row_labels", tuple(self.row_labels))
            if len(self.row_labels) != values.shape[0]:
                raise DimensionMismatch("one row label per observation required")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def n_columns(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.column_names.index(name)]

    def columns(self, names) -> np.ndarray:
        idx = [self.column_names.index(name) for name in names]
        return self.values[:, idx]

    def standardized(self) -> "Dataset":
        """Return a copy with every column standardized."""
        cols = [standardize(self.values[:, j]) for j in range(self.n_columns)]
        return Dataset(np.column_stack(cols), self.column_names, self.row_labels)


@dataclass(frozen=True)
class EigenSystem:
    """Symmetric eigendecomposition with descending non-negative eigenvalues.

    ``eigenvectors[:, k]`` is the orthonormal eigenvector for
    ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class RegressionFit:
    """Least-squares fit: minimal-norm coefficients, fitted values, residuals."""

    coefficients: np.ndarray
    fitted: np.ndarray
    residuals: np.ndarray
    r_squared: float


def standardize(v: np.ndarray) -> FactorScores:
    """Center ``v`` and scale it to unit Euclidean norm.

    The direction of ``v - mean(v)`` is preserved. Standardizing an
    already standardized vector returns it unchanged.

    Raises
    ------
    ConstantVector
        If all entries are equal within 1e-12.
    """
    v = np.asarray(v, dtype=float).ravel()
    if np.ptp(v) <= 1e-12:
        raise ConstantVector("cannot standardize a constant vector")
    centered = v - v.mean()
    return centered / np.linalg.norm(centered)


def is_standardized(v: np.ndarray, tol: float = 1e-10) -> bool:
    """Check the standardization invariants: zero mean, unit norm."""
    v = np.asarray(v, dtype=float)
    return abs(v.mean()) <= tol and abs(np.linalg.norm(v) - 1.0) <= tol


def lstsq_minnorm(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Minimal-norm least-squares solution with the package rank cutoff."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    coef, _, _, _ = np.linalg.lstsq(A, np.asarray(b, dtype=float), rcond=RANK_RTOL)
    return coef


def orthonormal_basis(X: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the column span, rank decided by ``RANK_RTOL``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] == 0:
        return X.reshape(X.shape[0], 0)
    U, s, _ = np.linalg.svd(X, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        return U[:, :0]
    return U[:, s > RANK_RTOL * s[0]]


def project_span(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Orthogonally project ``y`` onto the column span of ``X``.

    Rank-deficient blocks are handled through the singular-value cutoff,
    so duplicated or collinear columns are harmless. An empty block
    projects everything to zero.
    """
    y = np.asarray(y, dtype=float).ravel()
    U = orthonormal_basis(X)
    if U.shape[1] == 0:
        return np.zeros_like(y)
    return U @ (U.T @ y)


def subspace_overlaps(X: np.ndarray, Z: np.ndarray, rtol: float = OVERLAP_RTOL) -> bool:
    """True when ``span(X)`` and ``span(Z)`` intersect non-trivially.

    The spans intersect exactly when the rank of the juxtaposed block
    falls short of the two ranks combined, i.e. when some principal
    angle between the spans is zero. The angle formulation is the
    numerically stable way to evaluate that predicate: the test fires
    when the squared sine of the smallest principal angle drops below
    ``rtol``.
    """
    UX = orthonormal_basis(X)
    UZ = orthonormal_basis(Z)
    if UX.shape[1] == 0 or UZ.shape[1] == 0:
        return False
    cosines = np.linalg.svd(UX.T @ UZ, compute_uv=False)
    return bool(cosines.size and cosines[0] ** 2 > 1.0 - rtol)


def oblique_component(X: np.ndarray, Z: np.ndarray, y: np.ndarray) -> np.ndarray:
    """The ``X``-part of the projection of ``y`` onto ``span(X) + span(Z)``.

    ``y`` is regressed on the juxtaposed block ``[X, Z]`` and only the
    fitted contribution of the ``X`` columns is kept. Adding the
    ``Z``-part (``oblique_component(Z, X, y)``) recovers the orthogonal
    projection onto the joint span. The split is the projection onto
    ``span(X)`` *parallel to* ``span(Z)``, which is what turns a marginal
    relation into a partial one.

    Parameters
    ----------
    X, Z : (n, p), (n, q) ndarray
        Column blocks. ``Z`` may be empty, in which case this is the
        plain orthogonal projection onto ``span(X)``.
    y : (n,) ndarray

    Raises
    ------
    OverlappingSubspaces
        If ``span(X)`` and ``span(Z)`` intersect non-trivially (the split
        would not be unique).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if Z is None:
        Z = np.zeros((X.shape[0], 0))
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    if Z.shape[1] == 0:
        return project_span(X, y)
    if subspace_overlaps(X, Z):
        raise OverlappingSubspaces(
            "column blocks span overlapping subspaces; partial effects "
            "cannot be separated"
        )
    coef = lstsq_minnorm(np.hstack([X, Z]), y)
    return X @ coef[: X.shape[1]]


def sym_eig(S: np.ndarray) -> EigenSystem:
    """Eigendecomposition of a symmetric PSD matrix.

    Eigenvalues come out in descending order; tiny negatives from
    round-off (above ``-RANK_RTOL * max``) are clamped to zero. Each
    eigenvector's sign is fixed so its largest-magnitude entry is
    positive, which makes repeated runs reproducible.

    Raises
    ------
    NotSymmetric
        If ``S`` differs from its transpose beyond 1e-10 (relative).
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise NotSymmetric("expected a square matrix")
    scale = max(1.0, float(np.max(np.abs(S))) if S.size else 0.0)
    if float(np.max(np.abs(S - S.T)) if S.size else 0.0) > 1e-10 * scale:
        raise NotSymmetric("matrix is not symmetric within tolerance")
    lam, vec = scipy.linalg.eigh(S)
    order = np.argsort(lam)[::-1]
    lam = lam[order]
    vec = vec[:, order]
    lam_max = lam[0] if lam.size else 0.0
    # Clamp round-off negatives; anything clearly negative is a caller bug.
    lam[(lam < 0.0) & (lam >= -RANK_RTOL * max(lam_max, 0.0))] = 0.0
    lam[np.abs(lam) < np.finfo(float).tiny] = 0.0
    for k in range(vec.shape[1]):
        j = int(np.argmax(np.abs(vec[:, k])))
        if vec[j, k] < 0:
            vec[:, k] = -vec[:, k]
    return EigenSystem(lam, vec)


def sym_power(S: np.ndarray, alpha: float) -> np.ndarray:
    """Fractional power of a symmetric PSD matrix via its eigensystem.

    Eigenvalues below the rank cutoff are treated as zero, so
    ``sym_power(S, 0)`` is the orthogonal projector onto ``range(S)``
    and negative round-off noise can never produce complex output.

    Raises
    ------
    NegativeAlpha
        If ``alpha < 0``.
    """
    if alpha < 0:
        raise NegativeAlpha(f"alpha must be non-negative, got {alpha}")
    es = sym_eig(S)
    lam = es.eigenvalues.copy()
    lam_max = lam[0] if lam.size else 0.0
    if lam.size and lam[-1] < -RANK_RTOL * max(lam_max, 0.0):
        raise NegativeAlpha("matrix is not positive semidefinite")
    keep = lam > RANK_RTOL * max(lam_max, 0.0)
    powered = np.zeros_like(lam)
    powered[keep] = lam[keep] ** alpha
    V = es.eigenvectors
    return (V * powered) @ V.T


def ols(predictors: np.ndarray, y: np.ndarray) -> RegressionFit:
    """Least-squares regression of ``y`` on a column block.

    Uses the minimal-norm solution, so rank-deficient designs (duplicate
    or collinear predictors) are fine: fitted values stay unique and the
    coefficient mass is split evenly across duplicates. ``r_squared`` is
    measured against the centered response.
    """
    X = np.atleast_2d(np.asarray(predictors, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatch(
            f"{X.shape[0]} predictor rows for {y.shape[0]} responses"
        )
    if X.shape[1] == 0:
        raise DimensionMismatch("at least one predictor is required")
    coef = lstsq_minnorm(X, y)
    fitted = X @ coef
    residuals = y - fitted
    tss = float(np.sum((y - y.mean()) ** 2))
    rss = float(np.sum(residuals**2))
    r2 = 0.0 if tss == 0.0 else 1.0 - rss / tss
    return RegressionFit(coef, fitted, residuals, r2)


def sign_align(v: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Flip ``v`` if it points away from ``reference``."""
    return -v if float(v @ reference) < 0.0 else v
