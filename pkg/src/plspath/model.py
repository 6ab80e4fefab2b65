"""Declarative description of a latent-variable path model.

A model binds each latent variable to a named column group and links the
latent variables through regression equations, optionally with pairwise
interaction terms. Models can be built in code or parsed from a JSON
document (see ``parse_model_config``); parsing is strict — unknown keys
are errors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .errors import ValidationError, ParseError
from .linalg import Dataset

MODES = ("lohmoller", "tcpm")
GROUP_METRIC_KINDS = ("identity", "block_inverse_gram", "mfa_weights")


@dataclass(frozen=True)
class GroupBinding:
    """Binds a latent variable name to an ordered block of data columns.

    ``partition`` optionally splits the columns into sub-groups (for
    dummy-coded categorical blocks); ``metric_kind`` selects the weight
    matrix used when the group is treated as a whole.
    """

    lv_name: str
    columns: tuple[str, ...]
    partition: tuple[tuple[str, ...], ...] | None = None
    metric_kind: str = "identity"

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        if not self.columns:
            raise ValidationError("a group needs at least one column", f"groups[{self.lv_name}]")
        if len(set(self.columns)) != len(self.columns):
            raise ValidationError("duplicate column in group", f"groups[{self.lv_name}]")
        if self.metric_kind not in GROUP_METRIC_KINDS:
            raise ValidationError(
                f"metric must be one of {GROUP_METRIC_KINDS}, got {self.metric_kind!r}",
                f"groups[{self.lv_name}]",
            )
        if self.partition is not None:
            parts = tuple(tuple(p) for p in self.partition)
            object.__setattr__(self, "partition", parts)
            flat = [c for p in parts for c in p]
            if sorted(flat) != sorted(self.columns):
                raise ValidationError(
                    "partition must disjointly cover the group's columns",
                    f"groups[{self.lv_name}].partition",
                )
            if any(len(p) == 0 for p in parts):
                raise ValidationError(
                    "empty partition sub-group", f"groups[{self.lv_name}].partition"
                )

    def partition_indices(self) -> tuple[tuple[int, ...], ...] | None:
        """Partition as column indices into this group's block."""
        if self.partition is None:
            return None
        pos = {c: j for j, c in enumerate(self.columns)}
        return tuple(tuple(pos[c] for c in p) for p in self.partition)


@dataclass(frozen=True)
class Interaction:
    """One interactive predictor and the predictors modulating its effect."""

    effect: str
    moderators: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "moderators", tuple(self.moderators))


@dataclass(frozen=True)
class Equation:
    """A structural equation: ``dependent ~ predictors`` plus interactions."""

    dependent: str
    predictors: tuple[str, ...]
    interactions: tuple[Interaction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "predictors", tuple(self.predictors))
        object.__setattr__(self, "interactions", tuple(self.interactions))
        where = f"equations[{self.dependent}]"
        if not self.predictors:
            raise ValidationError("an equation needs at least one predictor", where)
        if len(set(self.predictors)) != len(self.predictors):
            raise ValidationError("duplicate predictor", where)
        if self.dependent in self.predictors:
            raise ValidationError("dependent cannot predict itself", where)
        for inter in self.interactions:
            if inter.effect not in self.predictors:
                raise ValidationError(
                    f"interaction effect {inter.effect!r} is not a predictor", where
                )
            if not inter.moderators:
                raise ValidationError("interaction needs at least one moderator", where)
            for m in inter.moderators:
                if m == inter.effect:
                    raise ValidationError("a predictor cannot moderate itself", where)
                if m not in self.predictors:
                    raise ValidationError(
                        f"moderator {m!r} is not a predictor", where
                    )

    def product_pairs(self) -> tuple[tuple[str, str], ...]:
        """Declared interaction terms flattened into (effect, moderator) pairs."""
        pairs: list[tuple[str, str]] = []
        for inter in self.interactions:
            for m in inter.moderators:
                pair = (inter.effect, m)
                if pair not in pairs:
                    pairs.append(pair)
        return tuple(pairs)

    def partners(self, lv: str) -> tuple[str, ...]:
        """Predictors whose product with ``lv`` appears in this equation."""
        out: list[str] = []
        for a, b in self.product_pairs():
            if a == lv and b not in out:
                out.append(b)
            elif b == lv and a not in out:
                out.append(a)
        return tuple(out)


@dataclass(frozen=True)
class ModelSpec:
    """A full path model: group bindings plus structural equations.

    Local consistency (unique bindings, every referenced latent variable
    bound) is enforced at construction. Graph-level checks — acyclicity
    and data compatibility — are the job of ``validate_model``.
    """

    groups: tuple[GroupBinding, ...]
    equations: tuple[Equation, ...]

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))
        object.__setattr__(self, "equations", tuple(self.equations))
        names = [g.lv_name for g in self.groups]
        if len(set(names)) != len(names):
            raise ValidationError("each latent variable may be bound only once", "groups")
        bound = set(names)
        for eq in self.equations:
            for lv in (eq.dependent, *eq.predictors):
                if lv not in bound:
                    raise ValidationError(
                        f"equation references unbound latent variable {lv!r}",
                        f"equations[{eq.dependent}]",
                    )

    @property
    def lv_names(self) -> tuple[str, ...]:
        return tuple(g.lv_name for g in self.groups)

    def group(self, lv_name: str) -> GroupBinding:
        for g in self.groups:
            if g.lv_name == lv_name:
                return g
        raise KeyError(lv_name)

    def dependency_cycles(self) -> list[list[str]]:
        """All predictor -> dependent cycles, empty if the graph is a DAG."""
        edges: dict[str, set[str]] = {name: set() for name in self.lv_names}
        for eq in self.equations:
            for t in eq.predictors:
                edges[t].add(eq.dependent)
        cycles: list[list[str]] = []
        state = {name: 0 for name in self.lv_names}  # 0 new, 1 active, 2 done
        stack: list[str] = []

        def visit(node: str):
            state[node] = 1
            stack.append(node)
            for nxt in sorted(edges[node]):
                if state[nxt] == 1:
                    cycles.append(stack[stack.index(nxt):] + [nxt])
                elif state[nxt] == 0:
                    visit(nxt)
            stack.pop()
            state[node] = 2

        for name in self.lv_names:
            if state[name] == 0:
                visit(name)
        return cycles

    def topological_equation_indices(self) -> tuple[int, ...]:
        """Equation indices ordered so upstream dependents come first.

        Stable: equations at equal depth keep their declaration order.
        """
        if self.dependency_cycles():
            raise ValidationError("latent-variable graph contains a cycle", "equations")
        depth: dict[str, int] = {}

        def lv_depth(lv: str) -> int:
            if lv in depth:
                return depth[lv]
            depth[lv] = 0  # break ties while recursing
            feeding = [eq for eq in self.equations if eq.dependent == lv]
            d = 0
            for eq in feeding:
                d = max(d, 1 + max(lv_depth(t) for t in eq.predictors))
            depth[lv] = d
            return d

        return tuple(
            sorted(range(len(self.equations)), key=lambda i: lv_depth(self.equations[i].dependent))
        )

    def topological_equations(self) -> tuple[Equation, ...]:
        """Equations ordered so upstream dependents are estimated first."""
        return tuple(self.equations[i] for i in self.topological_equation_indices())


@dataclass(frozen=True)
class EstimationConfig:
    """Estimation options.

    ``mode`` picks the internal-estimation scheme; ``resultant_order_k``
    and ``alpha`` shape the external operator; ``skip_external`` runs the
    pure latent-model fit. ``tolerance`` bounds the per-factor change at
    convergence (factors are unit-norm, so 1e-3 means 1/1000).
    """

    mode: str = "tcpm"
    resultant_order_k: int = 0
    alpha: float = 1.0
    skip_external: bool = False
    synthesis_alpha: float = 1.0
    with_interactions: bool = False
    tolerance: float = 1e-3
    max_iter: int = 100
    inner_max_iter: int = 25
    pca_reduce_threshold: float | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}", "estimation.mode")
        if self.resultant_order_k < 0 or int(self.resultant_order_k) != self.resultant_order_k:
            raise ValidationError(
                "resultant_order_k must be a non-negative integer",
                "estimation.resultant_order_k",
            )
        if self.alpha < 0:
            raise ValidationError("alpha must be non-negative", "estimation.alpha")
        if self.synthesis_alpha < 0:
            raise ValidationError("synthesis_alpha must be non-negative", "estimation.synthesis_alpha")
        if not self.tolerance > 0:
            raise ValidationError("tolerance must be positive", "estimation.tolerance")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be at least 1", "estimation.max_iter")
        if self.inner_max_iter < 1:
            raise ValidationError("inner_max_iter must be at least 1", "estimation.inner_max_iter")
        if self.pca_reduce_threshold is not None and not (0.0 < self.pca_reduce_threshold <= 1.0):
            raise ValidationError(
                "pca_reduce_threshold must lie in (0, 1]",
                "estimation.pca_reduce_threshold",
            )


@dataclass(frozen=True)
class ValidationIssue:
    """One finding from ``validate_model``."""

    severity: str  # "error" | "warning"
    code: str
    message: str
    where: str

    def __str__(self):
        return f"{self.severity} [{self.code}] {self.where}: {self.message}"


def _require_keys(obj: dict, allowed: set[str], required: set[str], path: str):
    unknown = set(obj) - allowed
    if unknown:
        raise ValidationError(f"unknown key(s) {sorted(unknown)}", path)
    missing = required - set(obj)
    if missing:
        raise ValidationError(f"missing key(s) {sorted(missing)}", path)


def _string_list(value, path: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ValidationError("expected a list of strings", path)
    return tuple(value)


def parse_model_config(text: str) -> tuple[ModelSpec, EstimationConfig]:
    """Parse a JSON model document into a spec plus estimation options.

    The document has three top-level keys: ``groups`` (required),
    ``equations`` (required) and ``estimation`` (optional overrides of
    the ``EstimationConfig`` defaults, lower_snake_case). Anything else
    is rejected with the offending path in the error message.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("document root must be an object", "$")
    _require_keys(doc, {"groups", "equations", "estimation"}, {"groups", "equations"}, "$")

    if not isinstance(doc["groups"], list):
        raise ValidationError("expected a list", "groups")
    groups = []
    for i, g in enumerate(doc["groups"]):
        path = f"groups[{i}]"
        if not isinstance(g, dict):
            raise ValidationError("expected an object", path)
        _require_keys(g, {"name", "columns", "partition", "metric"}, {"name", "columns"}, path)
        if not isinstance(g["name"], str):
            raise ValidationError("name must be a string", path)
        partition = None
        if "partition" in g:
            if not isinstance(g["partition"], list):
                raise ValidationError("partition must be a list of column lists", f"{path}.partition")
            partition = tuple(
                _string_list(p, f"{path}.partition[{j}]") for j, p in enumerate(g["partition"])
            )
        groups.append(
            GroupBinding(
                lv_name=g["name"],
                columns=_string_list(g["columns"], f"{path}.columns"),
                partition=partition,
                metric_kind=g.get("metric", "identity"),
            )
        )

    if not isinstance(doc["equations"], list):
        raise ValidationError("expected a list", "equations")
    equations = []
    for i, e in enumerate(doc["equations"]):
        path = f"equations[{i}]"
        if not isinstance(e, dict):
            raise ValidationError("expected an object", path)
        _require_keys(e, {"dependent", "predictors", "interactions"}, {"dependent", "predictors"}, path)
        interactions = []
        for j, inter in enumerate(e.get("interactions", [])):
            ipath = f"{path}.interactions[{j}]"
            if not isinstance(inter, dict):
                raise ValidationError("expected an object", ipath)
            _require_keys(inter, {"effect", "moderators"}, {"effect", "moderators"}, ipath)
            interactions.append(
                Interaction(inter["effect"], _string_list(inter["moderators"], f"{ipath}.moderators"))
            )
        equations.append(
            Equation(
                dependent=e["dependent"],
                predictors=_string_list(e["predictors"], f"{path}.predictors"),
                interactions=tuple(interactions),
            )
        )

    spec = ModelSpec(tuple(groups), tuple(equations))
    cycles = spec.dependency_cycles()
    if cycles:
        raise ValidationError(
            f"latent-variable graph contains a cycle: {' -> '.join(cycles[0])}", "equations"
        )

    cfg = EstimationConfig()
    if "estimation" in doc:
        est = doc["estimation"]
        if not isinstance(est, dict):
            raise ValidationError("expected an object", "estimation")
        allowed = {
            "mode", "resultant_order_k", "alpha", "skip_external", "synthesis_alpha",
            "with_interactions", "tolerance", "max_iter", "inner_max_iter",
            "pca_reduce_threshold",
        }
        _require_keys(est, allowed, set(), "estimation")
        cfg = replace(cfg, **est)
    return spec, cfg


def serialize_model_config(spec: ModelSpec, config: EstimationConfig | None = None) -> str:
    """Render a spec (and optionally options) back to the JSON schema."""
    doc: dict = {"groups": [], "equations": []}
    for g in spec.groups:
        entry: dict = {"name": g.lv_name, "columns": list(g.columns)}
        if g.partition is not None:
            entry["partition"] = [list(p) for p in g.partition]
        if g.metric_kind != "identity":
            entry["metric"] = g.metric_kind
        doc["groups"].append(entry)
    for e in spec.equations:
        entry = {"dependent": e.dependent, "predictors": list(e.predictors)}
        if e.interactions:
            entry["interactions"] = [
                {"effect": i.effect, "moderators": list(i.moderators)} for i in e.interactions
            ]
        doc["equations"].append(entry)
    if config is not None:
        defaults = EstimationConfig()
        overrides = {
            name: getattr(config, name)
            for name in (
                "mode", "resultant_order_k", "alpha", "skip_external", "synthesis_alpha",
                "with_interactions", "tolerance", "max_iter", "inner_max_iter",
                "pca_reduce_threshold",
            )
            if getattr(config, name) != getattr(defaults, name)
        }
        if overrides:
            doc["estimation"] = overrides
    return json.dumps(doc, indent=2)


def validate_model(
    spec: ModelSpec, data: Dataset, config: EstimationConfig | None = None
) -> list[ValidationIssue]:
    """Check a model against a dataset; an empty list means all clear.

    Errors: missing columns, dependency cycles, latent variables that no
    equation touches are reported as warnings, as is any group with more
    columns than observations when no PCA reduction is configured (the
    oblique split needs the group spans to stay separable).
    """
    issues: list[ValidationIssue] = []
    available = set(data.column_names)
    for g in spec.groups:
        missing = [c for c in g.columns if c not in available]
        if missing:
            issues.append(
                ValidationIssue(
                    "error", "missing_column",
                    f"column(s) {missing} not in dataset",
                    f"groups[{g.lv_name}]",
                )
            )
        if len(g.columns) > data.n and (config is None or config.pca_reduce_threshold is None):
            issues.append(
                ValidationIssue(
                    "warning", "overparameterized_group",
                    f"group has {len(g.columns)} columns for {data.n} observations; "
                    "consider pca_reduce_threshold",
                    f"groups[{g.lv_name}]",
                )
            )
    for cycle in spec.dependency_cycles():
        issues.append(
            ValidationIssue(
                "error", "cycle",
                "latent-variable graph contains a cycle: " + " -> ".join(cycle),
                "equations",
            )
        )
    touched = {lv for eq in spec.equations for lv in (eq.dependent, *eq.predictors)}
    for g in spec.groups:
        if g.lv_name not in touched:
            issues.append(
                ValidationIssue(
                    "warning", "isolated_lv",
                    "no equation touches this latent variable",
                    f"groups[{g.lv_name}]",
                )
            )
    return issues
