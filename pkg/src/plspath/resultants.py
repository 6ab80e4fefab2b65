"""Resultant operators used for external estimation.

The resultant of a vector ``y`` on a weighted column block ``X`` is
``X M X' y``. Its direction locates the correlation structure of ``X``
that ``y`` agrees with; its norm measures the strength of that link, so
nothing here is normalized — callers standardize when they need scores.

Three dials control how strongly structure attracts ``y``:

* ``alpha`` powers the operator, pulling ``y`` towards heavy principal
  components (``alpha = 0`` is the plain orthogonal projection).
* the metric ``M`` weighs sub-groups: an inverse-Gram block metric wipes
  out within-sub-group correlation structure (the natural choice for
  dummy-coded categorical variables), while MFA-style weights rescale
  each sub-group by its leading eigenvalue.
* the order ``k`` adds a bonus to closeness: each sub-space's projection
  is weighted by its squared cosine with ``y`` raised to ``k``, which
  lets nearby variable bundles win over globally heavy ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BadPartition,
    DimensionMismatch,
    EmptySubgroup,
    NegativeAlpha,
    NonOrthogonalFactors,
)
from .linalg import RANK_RTOL, FactorScores, project_span, sym_eig, sym_power

METRIC_KINDS = ("identity", "block_inverse_gram", "mfa_weights", "custom")


@dataclass(frozen=True)
class Metric:
    """A symmetric PSD weight matrix for a column block.

    ``partition`` records the sub-group column indices for block-diagonal
    kinds; ``None`` means the metric treats the block as one piece.
    """

    matrix: np.ndarray
    kind: str = "custom"
    partition: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=float))
        if self.kind not in METRIC_KINDS:
            raise BadPartition(f"unknown metric kind {self.kind!r}")
        if self.partition is not None:
            object.__setattr__(
                self, "partition", tuple(tuple(p) for p in self.partition)
            )


@dataclass(frozen=True)
class ResultantConfig:
    """Dial settings for a resultant operator."""

    alpha: float = 1.0
    order_k: int = 0
    metric: Metric | None = None

    def __post_init__(self):
        if self.alpha < 0:
            raise NegativeAlpha(f"alpha must be non-negative, got {self.alpha}")
        if self.order_k < 0 or int(self.order_k) != self.order_k:
            raise BadPartition(f"order k must be a non-negative integer, got {self.order_k}")


def _as_block(X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] == 0:
        raise DimensionMismatch("column block is empty")
    return X


def check_partition(partition, n_columns: int) -> tuple[tuple[int, ...], ...]:
    """Validate that ``partition`` disjointly covers ``range(n_columns)``.

    ``None`` means singleton sub-groups, one per column.
    """
    if partition is None:
        return tuple((j,) for j in range(n_columns))
    parts = tuple(tuple(int(j) for j in p) for p in partition)
    seen: list[int] = []
    for p in parts:
        if len(p) == 0:
            raise EmptySubgroup("a partition sub-group is empty")
        seen.extend(p)
    if sorted(seen) != list(range(n_columns)):
        raise BadPartition(
            "partition must disjointly cover all columns "
            f"(got indices {sorted(seen)} for {n_columns} columns)"
        )
    return parts


def _pinv_psd(S: np.ndarray) -> np.ndarray:
    es = sym_eig(S)
    lam = es.eigenvalues
    lam_max = lam[0] if lam.size else 0.0
    keep = lam > RANK_RTOL * max(lam_max, 0.0)
    inv = np.zeros_like(lam)
    inv[keep] = 1.0 / lam[keep]
    V = es.eigenvectors
    return (V * inv) @ V.T


def build_metric(kind: str, X, partition=None) -> Metric:
    """Construct one of the named block metrics for ``X``.

    ``identity`` ignores the partition. ``block_inverse_gram`` places the
    pseudo-inverse of each sub-group's Gram matrix on the diagonal, so
    the resultant becomes a sum of per-sub-group projections.
    ``mfa_weights`` weighs each sub-group by the inverse of its leading
    Gram eigenvalue, balancing sub-group contributions.
    """
    X = _as_block(X)
    J = X.shape[1]
    if kind == "identity":
        return Metric(np.eye(J), "identity", None)
    if kind not in ("block_inverse_gram", "mfa_weights"):
        raise BadPartition(f"unknown metric kind {kind!r}")
    if partition is None and kind == "mfa_weights":
        raise BadPartition("mfa_weights requires an explicit partition")
    parts = check_partition(partition, J)
    M = np.zeros((J, J))
    for p in parts:
        block = X[:, p]
        gram = block.T @ block
        if kind == "block_inverse_gram":
            M[np.ix_(p, p)] = _pinv_psd(gram)
        else:
            lam1 = float(sym_eig(gram).eigenvalues[0])
            if lam1 <= 0.0:
                raise EmptySubgroup("sub-group carries no variance")
            M[np.ix_(p, p)] = np.eye(len(p)) / lam1
    return Metric(M, kind, parts)


def linear_resultant(X, metric, y, alpha: float = 1.0) -> np.ndarray:
    """``(X M X')^alpha y`` — the powered, weighted resultant of ``y`` on ``X``.

    Expanding on the principal components of ``X`` under ``M``, each
    component of ``y`` is weighted by its eigenvalue to the power
    ``alpha``; ``alpha = 0`` therefore returns the orthogonal projection
    onto the block's span and large ``alpha`` collapses onto the heaviest
    component correlated with ``y``. The output is left unnormalized.
    """
    X = _as_block(X)
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != X.shape[0]:
        raise DimensionMismatch(f"y has length {y.shape[0]}, block has {X.shape[0]} rows")
    if alpha < 0:
        raise NegativeAlpha(f"alpha must be non-negative, got {alpha}")
    if metric is None:
        M = np.eye(X.shape[1])
    elif isinstance(metric, Metric):
        M = metric.matrix
    else:
        M = np.asarray(metric, dtype=float)
    if M.shape != (X.shape[1], X.shape[1]):
        raise DimensionMismatch(
            f"metric is {M.shape}, expected {(X.shape[1], X.shape[1])}"
        )
    if alpha == 1.0:
        return X @ (M @ (X.T @ y))
    return sym_power(X @ M @ X.T, alpha) @ y


def nl_resultant_grouped(X, partition, k: int, y) -> np.ndarray:
    """Sum of sub-space projections of ``y``, each weighted by closeness.

    Every sub-group contributes its orthogonal projection of ``y``
    multiplied by the squared projection norm raised to ``k`` (cosines,
    when ``y`` is standardized). ``k = 0`` recovers the linear resultant
    of the block-inverse-Gram metric; large ``k`` leaves only the
    sub-space closest to ``y``. With singleton sub-groups of standardized
    columns this is the classic correlation-powered sum
    ``sum_j <y|x_j>^(2k+1) x_j``.
    """
    X = _as_block(X)
    y = np.asarray(y, dtype=float).ravel()
    parts = check_partition(partition, X.shape[1])
    out = np.zeros_like(y)
    for p in parts:
        proj = project_span(X[:, p], y)
        out += float(proj @ proj) ** k * proj
    return out


def local_metric(X, partition, k: int, y) -> Metric:
    """The y-dependent block metric whose resultant equals the grouped sum.

    Each sub-group's inverse-Gram block is scaled by that sub-group's
    closeness bonus ``||proj_r(y)||^(2k)``, so
    ``X @ M @ X.T @ y == nl_resultant_grouped(X, partition, k, y)``.
    """
    X = _as_block(X)
    y = np.asarray(y, dtype=float).ravel()
    parts = check_partition(partition, X.shape[1])
    J = X.shape[1]
    M = np.zeros((J, J))
    for p in parts:
        block = X[:, p]
        proj = project_span(block, y)
        weight = float(proj @ proj) ** k
        M[np.ix_(p, p)] = weight * _pinv_psd(block.T @ block)
    return Metric(M, "custom", parts)


def powered_local_resultant(X, partition, k: int, alpha: float, y) -> np.ndarray:
    """Apply the powered local operator ``(X M_{X,y,k} X')^alpha`` to ``y``.

    The local metric is frozen at the input ``y``: the non-linearity
    enters only through the closeness weights, after which the operator
    is powered like any linear resultant. ``alpha = 0`` projects onto the
    span of the weighted block; ``alpha = 1`` reproduces
    ``nl_resultant_grouped`` exactly.
    """
    if alpha < 0:
        raise NegativeAlpha(f"alpha must be non-negative, got {alpha}")
    metric = local_metric(X, partition, k, y)
    return linear_resultant(X, metric, y, alpha)


def quartimax_criterion(X, factors: list[FactorScores], k: int = 2) -> float:
    """Even-power cosine criterion between columns of ``X`` and factors.

    For mutually orthogonal standardized factors this evaluates
    ``sum_h sum_j cos^(2k)(x_j, F_h)``; rotations that maximize it align
    factors with variable bundles. The same number equals the sum of
    ``<S_{X,k-1}(F_h) | F_h>`` over the factors, tying the criterion to
    the order-``(k-1)`` non-linear resultant.

    Only the criterion value is computed here; no rotation is performed.
    """
    X = _as_block(X)
    if k < 2 or int(k) != k:
        raise ValueError(f"the criterion is defined for integer k >= 2, got {k}")
    F = np.column_stack([np.asarray(f, dtype=float).ravel() for f in factors])
    if F.shape[0] != X.shape[0]:
        raise DimensionMismatch("factors and block have different lengths")
    gram = F.T @ F
    off = gram - np.diag(np.diag(gram))
    if F.shape[1] > 1 and float(np.max(np.abs(off))) > 1e-8:
        raise NonOrthogonalFactors("factors are not mutually orthogonal")
    cos = X.T @ F
    return float(np.sum(cos ** (2 * k)))
