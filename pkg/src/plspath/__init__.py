"""Latent-variable path modelling with flexible external and internal estimation.

The library estimates one factor per themed variable group so that the
factors both reflect strong correlation structure inside their groups
and satisfy a declared system of structural equations, optionally with
pairwise interaction effects between predictors.
"""

from .linalg import (
    Dataset,
    EigenSystem,
    FactorScores,
    RegressionFit,
    oblique_component,
    ols,
    project_span,
    standardize,
    sym_eig,
    sym_power,
)
from .resultants import (
    Metric,
    ResultantConfig,
    build_metric,
    linear_resultant,
    local_metric,
    nl_resultant_grouped,
    powered_local_resultant,
    quartimax_criterion,
)
from .model import (
    Equation,
    EstimationConfig,
    GroupBinding,
    Interaction,
    ModelSpec,
    ValidationIssue,
    parse_model_config,
    serialize_model_config,
    validate_model,
)
from .engine import (
    EstimationResult,
    EstimationState,
    external_estimate,
    factor_correlation,
    factor_product,
    fit_report,
    init_factors,
    interactive_internal,
    lohmoller_internal,
    pca_reduce,
    run_estimation,
    synthesize_internal,
    tcpm_internal_dependent,
    tcpm_internal_explanatory,
)
from .data import (
    BundledDataset,
    SimSpec,
    generate_interaction_sim,
    generate_mode_contrast_scenario,
    load_builtin_model,
    load_bundled_dataset,
    read_csv_dataset,
    sim_model,
    write_report,
)
from .report import Report

__version__ = "0.1.0"

__all__ = [
    "Dataset", "EigenSystem", "FactorScores", "RegressionFit",
    "oblique_component", "ols", "project_span", "standardize", "sym_eig", "sym_power",
    "Metric", "ResultantConfig", "build_metric", "linear_resultant", "local_metric",
    "nl_resultant_grouped", "powered_local_resultant", "quartimax_criterion",
    "Equation", "EstimationConfig", "GroupBinding", "Interaction", "ModelSpec",
    "ValidationIssue", "parse_model_config", "serialize_model_config", "validate_model",
    "EstimationResult", "EstimationState", "external_estimate", "factor_correlation",
    "factor_product", "fit_report", "init_factors", "interactive_internal",
    "lohmoller_internal", "pca_reduce", "run_estimation", "synthesize_internal",
    "tcpm_internal_dependent", "tcpm_internal_explanatory",
    "BundledDataset", "SimSpec", "generate_interaction_sim",
    "generate_mode_contrast_scenario", "load_builtin_model", "load_bundled_dataset",
    "read_csv_dataset", "sim_model", "write_report",
    "Report",
]
