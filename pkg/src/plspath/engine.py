"""Estimation engine: initialization, internal and external updates, orchestration.

Two internal-estimation schemes are provided. ``lohmoller`` updates every
factor from the previous iteration's values (regression prediction for a
dependent variable, correlation-weighted sums for predictors). ``tcpm``
replaces the predictor update by an oblique projection: the dependent
factor is projected onto each predictor's own column span *parallel to*
the other predictors' factors, so the update carries partial rather than
marginal information, and uses the freshest factor values as it sweeps
an equation. Interactive predictors get an extra inner loop in which the
effect modulation is estimated and divided back out.

External estimation draws each factor towards strong correlation
structure inside its own group through the powered local resultant; it
can be skipped entirely, in which case the algorithm maximizes the
latent-model fit alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.stats

from .errors import (
    DegenerateGroup,
    IsolatedLV,
    ValidationError,
    ZeroResultant,
)
from .linalg import (
    Dataset,
    FactorScores,
    lstsq_minnorm,
    ols,
    oblique_component,
    project_span,
    sign_align,
    standardize,
    sym_eig,
)
from .model import (
    Equation,
    EstimationConfig,
    GroupBinding,
    ModelSpec,
    validate_model,
)
from .resultants import build_metric, linear_resultant, powered_local_resultant
from .report import EquationReport, FactorTable, Report

_TINY = 1e-12

# Estimation blocks are denoised by truncated SVD at this relative cutoff.
# Bundled survey data is recorded to about three significant digits, so
# span directions thinner than 1e-3 of a block's leading scale are
# quantization residue (e.g. percentages rounded to 0.1 that no longer sum
# to exactly 100). Such weak dimensions carry no information but make the
# oblique splits ill-conditioned, so they are discarded up front; loadings
# and weights are always reported against the original columns.
BLOCK_NOISE_RTOL = 1e-3


@dataclass
class EstimationState:
    """Mutable loop state: current factors plus progress bookkeeping."""

    factors: dict[str, FactorScores]
    iteration: int = 0
    last_change: float = float("inf")
    r_squared_trace: list = field(default_factory=list)


@dataclass(frozen=True)
class InnerStep:
    """One pass of the interactive inner loop (for trace/diagnostics)."""

    equation: int
    lv: str
    r2_step1: float
    r2_step2: float
    n_clipped: int


@dataclass(frozen=True)
class IterationRecord:
    """Everything observed during one outer iteration."""

    iteration: int
    last_change: float
    equation_r2: tuple[float, ...]
    internal_r2: tuple[tuple[float, ...], ...]
    inner_steps: tuple[InnerStep, ...] = ()
    internal_factors: dict | None = None
    external_factors: dict | None = None


@dataclass(frozen=True)
class EquationFit:
    """Final per-equation regression on the estimated factors."""

    dependent: str
    terms: tuple[str, ...]
    coefficients: np.ndarray
    r_squared: float
    residuals: np.ndarray


@dataclass(frozen=True)
class EstimationResult:
    factors: dict[str, FactorScores]
    equations: tuple[EquationFit, ...]
    loadings: dict[str, dict[str, float]]
    weights: dict[str, dict[str, float]]
    trace: tuple[IterationRecord, ...]
    converged: bool

    @property
    def iterations(self) -> int:
        return len(self.trace)


@dataclass(frozen=True)
class _Block:
    lv: str
    X: np.ndarray  # block used for estimation (PCA-reduced if configured)
    partition: tuple[tuple[int, ...], ...] | None
    metric_kind: str
    original: np.ndarray  # standardized original columns
    columns: tuple[str, ...]


def factor_product(fa: FactorScores, fb: FactorScores) -> np.ndarray:
    """Centered elementwise product of two factors, on the coefficient scale.

    Factors are unit-norm; multiplying by sqrt(n) puts the product on the
    same effective scale as the factors themselves, so its regression
    coefficient is comparable with the marginal ones. The mean is removed
    (products of centered variables need not be centered); the product is
    deliberately not re-standardized.
    """
    fa = np.asarray(fa, dtype=float)
    prod = fa * np.asarray(fb, dtype=float) * np.sqrt(fa.shape[0])
    return prod - prod.mean()


def _reduce_block(X: np.ndarray, threshold: float) -> np.ndarray:
    es = sym_eig(X @ X.T)
    lam = es.eigenvalues
    if lam.size == 0 or lam[0] <= 0.0:
        raise DegenerateGroup("group carries no variance")
    keep = np.flatnonzero(lam >= (threshold - 1e-9) * lam[0])
    keep = keep[lam[keep] > _TINY * lam[0]]
    # Score columns keep their singular-value scale so the block's
    # covariance operator is preserved on the retained span.
    return es.eigenvectors[:, keep] * np.sqrt(lam[keep])


def pca_reduce(group: GroupBinding, threshold: float, data: Dataset) -> np.ndarray:
    """Replace a group's columns by its leading principal-component scores.

    Components with eigenvalue at least ``threshold`` times the top one
    are kept (``threshold = 1`` keeps only the leading component, plus
    exact ties). Scores retain their variance scale, so the group's
    covariance operator restricted to the kept span is unchanged.
    """
    if not (0.0 < threshold <= 1.0):
        raise ValueError("threshold must lie in (0, 1]")
    X = np.column_stack([standardize(data.column(c)) for c in group.columns])
    return _reduce_block(X, threshold)


def _denoise(X: np.ndarray, rtol: float = BLOCK_NOISE_RTOL) -> np.ndarray:
    # Truncated-SVD reconstruction: same columns, weak directions removed.
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        return X
    keep = s > rtol * s[0]
    return (U[:, keep] * s[keep]) @ Vt[keep]


def _prepare(spec: ModelSpec, data: Dataset, cfg: EstimationConfig) -> dict[str, _Block]:
    std = data.standardized()
    blocks: dict[str, _Block] = {}
    for g in spec.groups:
        original = std.columns(g.columns)
        partition = g.partition_indices()
        if cfg.pca_reduce_threshold is not None:
            X = _reduce_block(original, cfg.pca_reduce_threshold)
            partition = None  # PCA scores are plain columns
        else:
            X = _denoise(original)
        blocks[g.lv_name] = _Block(g.lv_name, X, partition, g.metric_kind, original, g.columns)
    return blocks


def _init_factor(block: _Block) -> FactorScores:
    if block.metric_kind == "identity":
        S = block.X @ block.X.T
    else:
        partition = block.partition
        if partition is None:
            partition = (tuple(range(block.X.shape[1])),)
        metric = build_metric(block.metric_kind, block.X, partition)
        S = block.X @ metric.matrix @ block.X.T
    es = sym_eig(S)
    if es.eigenvalues.size == 0 or es.eigenvalues[0] <= _TINY:
        raise DegenerateGroup(f"group {block.lv!r} carries no variance")
    f = standardize(es.eigenvectors[:, 0])
    loadings = block.original.T @ f
    j = int(np.argmax(np.abs(loadings)))
    return -f if loadings[j] < 0 else f


def init_factors(
    spec: ModelSpec, data: Dataset, cfg: EstimationConfig | None = None
) -> dict[str, FactorScores]:
    """Start every factor at its group's (metric-weighted) first principal
    component, sign-fixed so the strongest loading is positive."""
    blocks = _prepare(spec, data, cfg or EstimationConfig())
    return {lv: _init_factor(b) for lv, b in blocks.items()}


def _external_core(block: _Block, k: int, alpha: float, phi: FactorScores) -> FactorScores:
    r = powered_local_resultant(block.X, block.partition, k, alpha, phi)
    if float(np.linalg.norm(r)) <= _TINY:
        raise ZeroResultant(f"resultant vanished for group {block.lv!r}")
    return sign_align(standardize(r), phi)


def external_estimate(
    group: GroupBinding, phi: FactorScores, cfg: EstimationConfig, data: Dataset
) -> FactorScores:
    """Draw ``phi`` towards its group's correlation structure.

    Applies the powered local resultant of order ``cfg.resultant_order_k``
    with exponent ``cfg.alpha`` over the group's sub-group partition
    (singleton columns when none is declared), then standardizes; the
    output is sign-aligned with the input. Order 0, exponent 1 on plain
    columns is the classic correlation-weighted sum of variables.
    """
    X = np.column_stack([standardize(data.column(c)) for c in group.columns])
    block = _Block(group.lv_name, X, group.partition_indices(), group.metric_kind, X, group.columns)
    return _external_core(block, cfg.resultant_order_k, cfg.alpha, phi)


def _lohmoller_core(lv: str, spec: ModelSpec, factors: dict[str, FactorScores]) -> FactorScores:
    total = np.zeros_like(factors[lv])
    touched = False
    for eq in spec.equations:
        if eq.dependent == lv:
            design = np.column_stack([factors[t] for t in eq.predictors])
            total += ols(design, factors[lv]).fitted
            touched = True
        elif lv in eq.predictors:
            dep = factors[eq.dependent]
            total += float(factors[lv] @ dep) * dep
            touched = True
    if not touched:
        raise IsolatedLV(f"no equation touches {lv!r}")
    if float(np.linalg.norm(total)) <= _TINY:
        raise ZeroResultant(f"internal estimate vanished for {lv!r}")
    return sign_align(standardize(total), factors[lv])


def lohmoller_internal(lv: str, spec: ModelSpec, state: EstimationState) -> FactorScores:
    """Classic internal estimate of ``lv`` from the previous iteration.

    Where ``lv`` is a dependent variable its regression prediction is
    used; where it is a predictor, each dependent factor enters weighted
    by its plain correlation with ``lv``. Contributions from all
    equations touching ``lv`` are summed before standardizing.
    """
    return _lohmoller_core(lv, spec, state.factors)


def _other_products(
    eq: Equation, t: str, factors: dict[str, FactorScores]
) -> list[np.ndarray]:
    return [
        factor_product(factors[a], factors[b])
        for a, b in eq.product_pairs()
        if t not in (a, b)
    ]


def _explanatory_core(
    block: _Block,
    eq: Equation,
    t: str,
    factors: dict[str, FactorScores],
    with_interactions: bool,
    include_products: bool = True,
) -> FactorScores:
    y = factors[eq.dependent]
    parallel = [factors[u] for u in eq.predictors if u != t]
    if with_interactions and include_products:
        parallel.extend(_other_products(eq, t, factors))
    Z = np.column_stack(parallel) if parallel else None
    comp = oblique_component(block.X, Z, y)
    if float(np.linalg.norm(comp)) <= _TINY:
        raise ZeroResultant(f"oblique component vanished for {t!r}")
    return sign_align(standardize(comp), factors[t])


def tcpm_internal_explanatory(
    eq: Equation,
    t: str,
    spec: ModelSpec,
    state: EstimationState,
    data: Dataset,
    cfg: EstimationConfig | None = None,
) -> FactorScores:
    """Partial-relation update of the explanatory factor ``t``.

    The dependent factor is regressed on ``t``'s own column block jointly
    with the other predictors' factors, and only the block's share of the
    fitted value is kept — the projection onto ``span(X_t)`` parallel to
    the other factors. A combination of the other factors therefore maps
    to zero, which is exactly the effect-separating behaviour wanted.
    """
    cfg = cfg or EstimationConfig()
    blocks = _prepare(spec, data, cfg)
    return _explanatory_core(blocks[t], eq, t, state.factors, cfg.with_interactions)


def _dependent_core(
    block: _Block,
    eq: Equation,
    factors: dict[str, FactorScores],
    with_interactions: bool,
) -> FactorScores:
    y = factors[eq.dependent]
    cols = [factors[u] for u in eq.predictors]
    if with_interactions:
        cols.extend(factor_product(factors[a], factors[b]) for a, b in eq.product_pairs())
    v = project_span(np.column_stack(cols), y)
    u = project_span(block.X, v)
    if float(np.linalg.norm(u)) <= _TINY:
        raise ZeroResultant(f"double projection annihilated {eq.dependent!r}")
    return sign_align(standardize(u), y)


def tcpm_internal_dependent(
    eq: Equation,
    spec: ModelSpec,
    state: EstimationState,
    data: Dataset,
    cfg: EstimationConfig | None = None,
) -> FactorScores:
    """Dependent-factor update: project onto the predictors' span, then back
    onto the group's own span, keeping the estimate inside ``span(X_r)`` so
    external estimation can be skipped."""
    cfg = cfg or EstimationConfig()
    blocks = _prepare(spec, data, cfg)
    return _dependent_core(blocks[eq.dependent], eq, state.factors, cfg.with_interactions)


def synthesize_internal(
    estimates: list[FactorScores], previous: FactorScores, alpha: float = 1.0
) -> FactorScores:
    """Blend several per-equation estimates of one factor into a single one.

    The previous factor is passed through the powered resultant of the
    estimate block: each estimate pulls proportionally to its agreement
    with where the factor already was. The result is standardized and
    sign-aligned with ``previous``.
    """
    if not estimates:
        raise ZeroResultant("no internal estimates to synthesize")
    omega = np.column_stack([np.asarray(e, dtype=float) for e in estimates])
    r = linear_resultant(omega, None, previous, alpha)
    if float(np.linalg.norm(r)) <= _TINY:
        raise ZeroResultant("synthesis resultant vanished")
    return sign_align(standardize(r), previous)


def _interactive_core(
    block: _Block,
    eq: Equation,
    eq_index: int,
    t: str,
    factors: dict[str, FactorScores],
    cfg: EstimationConfig,
    log: list | None = None,
) -> tuple[FactorScores, dict]:
    y = factors[eq.dependent]
    n = y.shape[0]
    X = block.X
    others = [u for u in eq.predictors if u != t]
    other_cols = [factors[u] for u in others]
    partners = eq.partners(t)
    other_prods = _other_products(eq, t, factors)

    # Initialize as if the modulation coefficients were all zero.
    phi = _explanatory_core(block, eq, t, factors, with_interactions=False)

    beta_t = 0.0
    deltas = np.zeros(len(partners))
    ones = np.ones(n)
    for _ in range(cfg.inner_max_iter):
        t_prods = [factor_product(factors[r], phi) for r in partners]
        design1 = np.column_stack([phi, *other_cols, *t_prods, *other_prods])
        fit1 = ols(design1, y)
        beta_t = float(fit1.coefficients[0])
        base = 1 + len(other_cols)
        deltas = fit1.coefficients[base : base + len(partners)]

        # Effect modulation at each observation; factors are unit-norm, so
        # sqrt(n) puts them back on the coefficient scale.
        m = beta_t + np.sqrt(n) * sum(
            d * factors[r] for d, r in zip(deltas, partners)
        )
        small = np.abs(m) < 1e-6
        n_clipped = int(np.count_nonzero(small))
        if n_clipped:
            m = m.copy()
            m[small] = np.where(m[small] >= 0.0, 1e-6, -1e-6)

        modulated = X * m[:, None]
        parallel = np.column_stack([ones, *other_cols, *other_prods])
        G = oblique_component(modulated, parallel, y)
        fit2 = ols(np.hstack([modulated, parallel]), y)
        if log is not None:
            log.append(InnerStep(eq_index, t, fit1.r_squared, fit2.r_squared, n_clipped))

        ratio = G / m
        if float(np.linalg.norm(ratio)) <= _TINY:
            raise ZeroResultant(f"modulated component vanished for {t!r}")
        phi_new = sign_align(standardize(ratio), phi)
        change = min(
            float(np.linalg.norm(phi_new - phi)), float(np.linalg.norm(phi_new + phi))
        )
        phi = phi_new
        if change < cfg.tolerance:
            break
    coef = {"beta": beta_t, "delta": {r: float(d) for r, d in zip(partners, deltas)}}
    return phi, coef


def interactive_internal(
    eq: Equation,
    t: str,
    spec: ModelSpec,
    state: EstimationState,
    data: Dataset,
    cfg: EstimationConfig | None = None,
) -> tuple[FactorScores, dict]:
    """Inner-loop update of a predictor whose effect is modulated by others.

    Starting from the no-interaction oblique estimate, each pass first
    regresses the dependent factor on the predictors plus the product
    terms involving ``t`` (estimating the base effect and the modulation
    coefficients), then rebuilds ``t``'s column block scaled row-wise by
    the estimated modulation, re-extracts the block's oblique component
    and divides the modulation back out. Modulation entries below 1e-6
    in magnitude are clipped (keeping their sign, with 0 counted as
    positive) before the division.

    Returns the new factor and the last ``beta``/``delta`` estimates.
    """
    cfg = cfg or EstimationConfig()
    blocks = _prepare(spec, data, cfg)
    eq_index = list(spec.equations).index(eq)
    return _interactive_core(blocks[t], eq, eq_index, t, state.factors, cfg)


def _equation_r2(
    eq: Equation, factors: dict[str, FactorScores], with_products: bool
) -> float:
    cols = [factors[u] for u in eq.predictors]
    if with_products:
        cols.extend(factor_product(factors[a], factors[b]) for a, b in eq.product_pairs())
    return ols(np.column_stack(cols), factors[eq.dependent]).r_squared


def _equation_fit(eq: Equation, factors: dict[str, FactorScores]) -> EquationFit:
    # The reported regression always carries the declared product terms,
    # whether or not they were used during estimation, so variants can be
    # compared on the same term set.
    terms = list(eq.predictors)
    cols = [factors[u] for u in eq.predictors]
    for a, b in eq.product_pairs():
        terms.append(f"{a}*{b}")
        cols.append(factor_product(factors[a], factors[b]))
    fit = ols(np.column_stack(cols), factors[eq.dependent])
    return EquationFit(eq.dependent, tuple(terms), fit.coefficients, fit.r_squared, fit.residuals)


def run_estimation(
    spec: ModelSpec,
    data: Dataset,
    cfg: EstimationConfig | None = None,
    initial_factors: dict[str, FactorScores] | None = None,
    history: bool = False,
) -> EstimationResult:
    """Run the full alternating estimation until the factors stabilize.

    Per outer iteration: in ``tcpm`` mode the equations are swept in
    topological order, updating each predictor (obliquely, or through the
    interactive inner loop when it takes part in a product term and
    ``with_interactions`` is on) and then the dependent factor, always
    using the freshest values; a latent variable estimated by several
    equations has its estimates synthesized against its previous value.
    In ``lohmoller`` mode all internal estimates are computed from the
    previous iteration's factors at once. Unless ``skip_external`` is
    set, every factor is then drawn back into its own group by the
    resultant operator. Convergence is reached when no factor moved more
    than ``cfg.tolerance`` (sign flips do not count as movement); hitting
    ``max_iter`` first is reported via ``converged=False``, not an error.

    ``initial_factors`` overrides the principal-component start, and
    ``history=True`` stores per-phase factor snapshots in the trace.
    """
    cfg = cfg or EstimationConfig()
    issues = validate_model(spec, data, cfg)
    hard = [i for i in issues if i.severity == "error"]
    if hard:
        raise ValidationError("; ".join(str(i) for i in hard))

    blocks = _prepare(spec, data, cfg)
    if initial_factors is None:
        factors = {lv: _init_factor(b) for lv, b in blocks.items()}
    else:
        factors = {lv: standardize(initial_factors[lv]) for lv in blocks}

    order = spec.topological_equation_indices()
    trace: list[IterationRecord] = []
    converged = False

    for p in range(1, cfg.max_iter + 1):
        prev = dict(factors)
        internal_r2: list[list[float]] = [[] for _ in spec.equations]
        inner_steps: list[InnerStep] = []

        if cfg.mode == "lohmoller":
            phi: dict[str, FactorScores] = {}
            for lv in blocks:
                try:
                    phi[lv] = _lohmoller_core(lv, spec, prev)
                except IsolatedLV:
                    phi[lv] = prev[lv]
            for i, eq in enumerate(spec.equations):
                internal_r2[i].append(_equation_r2(eq, phi, False))
            internal_snapshot = {lv: f.copy() for lv, f in phi.items()} if history else None
            if cfg.skip_external:
                factors = phi
            else:
                factors = {
                    lv: _external_core(blocks[lv], cfg.resultant_order_k, cfg.alpha, phi[lv])
                    for lv in blocks
                }
        else:
            # Sweep the equations with the freshest *finished* factors:
            # each internal estimate is drawn back into its group before
            # later updates see it (unless external estimation is off,
            # where the raw estimate is already final). Raw estimates are
            # kept so a latent variable touched by several equations gets
            # synthesized once, against its value at the iteration start.
            work = dict(factors)
            raw: dict[str, list[FactorScores]] = {lv: [] for lv in blocks}

            def _finish(lv: str, estimate: FactorScores) -> FactorScores:
                if cfg.skip_external:
                    return estimate
                return _external_core(blocks[lv], cfg.resultant_order_k, cfg.alpha, estimate)

            for i in order:
                eq = spec.equations[i]
                for t in eq.predictors:
                    if cfg.with_interactions and eq.partners(t):
                        new_t, _ = _interactive_core(
                            blocks[t], eq, i, t, work, cfg, inner_steps
                        )
                    else:
                        new_t = _explanatory_core(
                            blocks[t], eq, t, work, cfg.with_interactions
                        )
                    raw[t].append(new_t)
                    work[t] = _finish(t, new_t)
                    internal_r2[i].append(_equation_r2(eq, work, cfg.with_interactions))
                new_dep = _dependent_core(blocks[eq.dependent], eq, work, cfg.with_interactions)
                raw[eq.dependent].append(new_dep)
                work[eq.dependent] = _finish(eq.dependent, new_dep)
                internal_r2[i].append(_equation_r2(eq, work, cfg.with_interactions))

            internal_snapshot = None
            if history:
                internal_snapshot = {}
                for lv in blocks:
                    ests = raw[lv]
                    if len(ests) > 1:
                        internal_snapshot[lv] = synthesize_internal(
                            ests, prev[lv], cfg.synthesis_alpha
                        ).copy()
                    else:
                        internal_snapshot[lv] = (ests[0] if ests else work[lv]).copy()
            factors = {}
            for lv in blocks:
                ests = raw[lv]
                if len(ests) > 1:
                    blend = synthesize_internal(ests, prev[lv], cfg.synthesis_alpha)
                    factors[lv] = _finish(lv, blend)
                else:
                    factors[lv] = work[lv]

        last_change = max(
            min(
                float(np.linalg.norm(factors[lv] - prev[lv])),
                float(np.linalg.norm(factors[lv] + prev[lv])),
            )
            for lv in blocks
        )
        trace.append(
            IterationRecord(
                iteration=p,
                last_change=last_change,
                equation_r2=tuple(_equation_fit(eq, factors).r_squared for eq in spec.equations),
                internal_r2=tuple(tuple(r) for r in internal_r2),
                inner_steps=tuple(inner_steps),
                internal_factors=internal_snapshot,
                external_factors={lv: f.copy() for lv, f in factors.items()} if history else None,
            )
        )
        if last_change < cfg.tolerance:
            converged = True
            break

    loadings = {
        lv: {
            col: float(blocks[lv].original[:, j] @ factors[lv])
            for j, col in enumerate(blocks[lv].columns)
        }
        for lv in blocks
    }
    weights = {}
    for lv in blocks:
        w = lstsq_minnorm(blocks[lv].original, factors[lv])
        weights[lv] = {col: float(w[j]) for j, col in enumerate(blocks[lv].columns)}

    return EstimationResult(
        factors=factors,
        equations=tuple(_equation_fit(eq, factors) for eq in spec.equations),
        loadings=loadings,
        weights=weights,
        trace=tuple(trace),
        converged=converged,
    )


def factor_correlation(a: FactorScores, b: FactorScores) -> float:
    """Absolute correlation between two score vectors (sign-aligned)."""
    return abs(float(standardize(a) @ standardize(b)))


def fit_report(result: EstimationResult, spec: ModelSpec, data: Dataset) -> Report:
    """Assemble the report tables: per-equation coefficients with
    descriptive two-sided p-values, per-group loadings and weights.

    The p-values come from plain t statistics on the factor regression
    and are meant as descriptive indicators only — the factors were
    themselves fitted to these data.
    """
    n = data.n
    equations = []
    for eq_fit in result.equations:
        eq = next(e for e in spec.equations if e.dependent == eq_fit.dependent)
        cols = [result.factors[u] for u in eq.predictors]
        for a, b in eq.product_pairs():
            cols.append(factor_product(result.factors[a], result.factors[b]))
        Z = np.column_stack(cols)
        q = Z.shape[1]
        dof = n - q - 1
        if dof > 0:
            sigma2 = float(eq_fit.residuals @ eq_fit.residuals) / dof
            cov = sigma2 * np.linalg.pinv(Z.T @ Z, rcond=1e-10)
            se = np.sqrt(np.maximum(np.diag(cov), 0.0))
            with np.errstate(divide="ignore", invalid="ignore"):
                tstat = np.where(se > 0, eq_fit.coefficients / se, np.inf)
            p = 2.0 * scipy.stats.t.sf(np.abs(tstat), dof)
        else:
            p = np.full(q, np.nan)
        equations.append(
            EquationReport(
                dependent=eq_fit.dependent,
                terms=eq_fit.terms,
                coefficients=np.asarray(eq_fit.coefficients, dtype=float),
                p_values=np.asarray(p, dtype=float),
                r_squared=eq_fit.r_squared,
            )
        )
    loadings = [
        FactorTable(lv, tuple(vals.keys()), np.array(list(vals.values())))
        for lv, vals in result.loadings.items()
    ]
    weights = [
        FactorTable(lv, tuple(vals.keys()), np.array(list(vals.values())))
        for lv, vals in result.weights.items()
    ]
    return Report(
        equations=tuple(equations),
        loadings=tuple(loadings),
        weights=tuple(weights),
        converged=result.converged,
        iterations=result.iterations,
        last_change=result.trace[-1].last_change if result.trace else float("nan"),
    )
