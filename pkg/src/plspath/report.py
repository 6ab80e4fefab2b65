"""Report tables and their text/CSV renderers.

Rendering is fully deterministic: fixed float formats, no timestamps,
stable ordering. Identical estimation results produce identical bytes.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EquationReport:
    """Coefficient table for one structural equation."""

    dependent: str
    terms: tuple[str, ...]
    coefficients: np.ndarray
    p_values: np.ndarray
    r_squared: float


@dataclass(frozen=True)
class FactorTable:
    """One value per observed column of a group (loadings or weights)."""

    lv: str
    columns: tuple[str, ...]
    values: np.ndarray


@dataclass(frozen=True)
class Report:
    equations: tuple[EquationReport, ...]
    loadings: tuple[FactorTable, ...]
    weights: tuple[FactorTable, ...]
    converged: bool
    iterations: int
    last_change: float


def _fmt(x: float) -> str:
    if np.isnan(x):
        return "      nan"
    return f"{x:9.4f}"


def render_text(report: Report) -> str:
    out = io.StringIO()
    status = "yes" if report.converged else "no"
    out.write(
        f"converged: {status}   iterations: {report.iterations}"
        f"   last_change: {report.last_change:.2e}\n"
    )
    for eq in report.equations:
        preds = " + ".join(eq.terms)
        out.write(f"\nequation {eq.dependent} ~ {preds}\n")
        out.write(f"  R2 = {eq.r_squared:.4f}\n")
        width = max(len(t) for t in eq.terms)
        out.write(f"  {'term'.ljust(width)}      coef    p-value\n")
        for term, coef, p in zip(eq.terms, eq.coefficients, eq.p_values):
            out.write(f"  {term.ljust(width)} {_fmt(coef)}  {_fmt(p)}\n")
    for title, tables in (("loadings", report.loadings), ("weights", report.weights)):
        for table in tables:
            out.write(f"\n{title} {table.lv}\n")
            width = max(len(c) for c in table.columns)
            for col, val in zip(table.columns, table.values):
                out.write(f"  {col.ljust(width)} {_fmt(val)}\n")
    return out.getvalue()


def _csv_row(cells) -> str:
    return ",".join(str(c) for c in cells) + "\r\n"


def render_csv_tables(report: Report) -> list[tuple[str, str]]:
    """One (filename, content) pair per table; all cells below the header
    are numeric so the files read back as datasets."""
    files: list[tuple[str, str]] = []
    summary_header = ["converged", "iterations", "last_change"] + [
        f"r_squared_{eq.dependent}" for eq in report.equations
    ]
    summary_row = [int(report.converged), report.iterations, f"{report.last_change:.12g}"] + [
        f"{eq.r_squared:.12g}" for eq in report.equations
    ]
    files.append(("summary.csv", _csv_row(summary_header) + _csv_row(summary_row)))
    for eq in report.equations:
        content = _csv_row(eq.terms)
        content += _csv_row(f"{c:.12g}" for c in eq.coefficients)
        content += _csv_row(f"{p:.12g}" for p in eq.p_values)
        files.append((f"equation_{eq.dependent}.csv", content))
    for title, tables in (("loadings", report.loadings), ("weights", report.weights)):
        for table in tables:
            content = _csv_row(table.columns)
            content += _csv_row(f"{v:.12g}" for v in table.values)
            files.append((f"{title}_{table.lv}.csv", content))
    return files
