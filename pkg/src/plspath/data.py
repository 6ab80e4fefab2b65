"""Dataset ingestion, bundled example data, and deterministic generators.

Two real datasets ship with the package as frozen CSV assets:

* ``senegal`` — 30 Senegalese departments: socio-economic indicators,
  ethnic/religious composition, and the departmental scores of both
  ballots of the 2000 presidential election.
* ``dakar_rent`` — 41 houses let for rent in Dakar: monthly rent plus
  size, building-quality and area-quality characteristics.

Each comes with its default path model. A handful of appendix labels
were normalized when the assets were frozen (DIORBEL/DIOURBEL,
SEDHIU/SEDHIOU, Niassel/Niasse1, Wadel/Wade1, NHPT/NHPI,
PctAgrInc/PctAgriInc, PctMoslims/Moslims, Wprivate/WPrivate); row
identity is positional, so nothing numeric changed.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateHeader,
    EmptyData,
    MissingValue,
    ParseError,
    UnknownDataset,
)
from .linalg import Dataset, standardize
from .model import Equation, GroupBinding, Interaction, ModelSpec

BUNDLED_NAMES = ("senegal", "dakar_rent")

SENEGAL_GROUPS = {
    "socio_economic": (
        "NHPI", "PctAgriInc", "IncActivePers", "ActivePop", "Scol",
        "Malnutrition", "DrinkWater", "Rural", "Urban", "PopDensity",
        "HouseholdSize", "Pop0_14", "Pop15_60", "PopOver60", "WIndep",
        "WPublic", "WPrivate", "WApprentice", "OEmployed", "OUnemployed",
        "OStudent", "OHouseWife", "ORetired", "ASPrim", "ASSec", "ASTer",
    ),
    "ethnicity_religion": ("Wolof", "Sereer", "Joola", "Pulaar", "Manding", "Moslims"),
    "ballot1": (
        "Thiam1", "Niasse1", "Ka1", "Wade1", "Dieye1", "Sock1", "Fall1",
        "Diouf1", "Abstention1",
    ),
    "ballot2": ("Diouf2", "Wade2", "Abstention2"),
}

RENT_GROUPS = {
    "size": (
        "PlotSurface", "BuiltSurface", "BuiltSurfPerRoom", "NrRooms",
        "NrResidRooms", "NrBathrooms", "NrBedrooms", "NrLivingrooms",
        "NrWC", "NrKitchens",
    ),
    "building_quality": (
        "DetachedHouse", "Standing", "Condition", "Garden", "Backyard",
        "Pool", "Garage", "HighTech",
    ),
    "area_quality": (
        "DistToTC", "ShoppingArea", "Beach", "HotelBusiness", "MainRoad",
        "AreaStanding", "BusinessArea",
    ),
    "rent": ("MonthlyRent",),
}


@dataclass(frozen=True)
class BundledDataset:
    """A shipped dataset together with its default path model."""

    name: str
    dataset: Dataset
    default_model: ModelSpec


@dataclass(frozen=True)
class SimSpec:
    """Settings for the seeded interaction simulation."""

    seed: int
    n: int = 100
    group_sizes: tuple[int, int] = (10, 10)

    def __post_init__(self):
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.n < 4:
            raise ValueError("at least 4 observations are required")
        if min(self.group_sizes) < 2:
            raise ValueError("each simulated group needs at least 2 variables")


def _split_cell(raw: str, row: int, col: int) -> float:
    cell = raw.strip()
    if cell == "":
        raise MissingValue(f"empty cell at row {row}, column {col}")
    try:
        return float(cell)
    except ValueError:
        raise ParseError(f"non-numeric cell {cell!r} at row {row}, column {col}") from None


def read_csv_dataset(source) -> Dataset:
    """Read a numeric CSV (first row = headers, '.' decimals) into a Dataset.

    Row and column positions in error messages are 1-based, counting the
    header as row 1.
    """
    import csv as _csv

    if hasattr(source, "read"):
        fh = source
        close = False
    else:
        fh = open(source, "r", newline="")
        close = True
    try:
        reader = _csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyData("no header row") from None
        header = [h.strip() for h in header]
        if len(set(header)) != len(header):
            dupes = sorted({h for h in header if header.count(h) > 1})
            raise DuplicateHeader(f"duplicate column name(s): {dupes}")
        rows = []
        for i, raw in enumerate(reader, start=2):
            if not raw:
                continue
            if len(raw) != len(header):
                raise ParseError(
                    f"row {i} has {len(raw)} cells, expected {len(header)}"
                )
            rows.append([_split_cell(cell, i, j + 1) for j, cell in enumerate(raw)])
        if not rows:
            raise EmptyData("file contains headers but no observations")
        return Dataset(np.array(rows, dtype=float), tuple(header))
    finally:
        if close:
            fh.close()


def _load_asset(filename: str) -> tuple[Dataset, tuple[str, ...]]:
    text = resources.files("plspath.datasets").joinpath(filename).read_text()
    import csv as _csv

    rows = list(_csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    labels = tuple(r[0] for r in body)
    values = np.array([[float(x) for x in r[1:]] for r in body])
    return Dataset(values, tuple(header[1:]), labels), labels


def _senegal_model(equations: str = "ab") -> ModelSpec:
    groups = [GroupBinding(name, cols) for name, cols in SENEGAL_GROUPS.items()]
    eq_a = Equation("ballot1", ("socio_economic", "ethnicity_religion"))
    eq_b = Equation("ballot2", ("ballot1",))
    eqs = {"a": (eq_a,), "b": (eq_b,), "ab": (eq_a, eq_b)}[equations]
    used = {lv for eq in eqs for lv in (eq.dependent, *eq.predictors)}
    return ModelSpec(tuple(g for g in groups if g.lv_name in used), eqs)


def _rent_model() -> ModelSpec:
    groups = [GroupBinding(name, cols) for name, cols in RENT_GROUPS.items()]
    eq = Equation(
        "rent",
        ("size", "building_quality", "area_quality"),
        (Interaction("size", ("building_quality", "area_quality")),),
    )
    return ModelSpec(tuple(groups), (eq,))


def load_bundled_dataset(name: str) -> BundledDataset:
    """Load one of the shipped datasets by name, with its default model."""
    if name == "senegal":
        ds, _ = _load_asset("senegal.csv")
        return BundledDataset(name, ds, _senegal_model("ab"))
    if name == "dakar_rent":
        ds, _ = _load_asset("dakar_rent.csv")
        return BundledDataset(name, ds, _rent_model())
    raise UnknownDataset(f"unknown bundled dataset {name!r}; available: {BUNDLED_NAMES}")


BUILTIN_MODELS = ("senegal_a", "senegal_b", "senegal_joint", "dakar_rent")


def load_builtin_model(name: str) -> ModelSpec:
    """Resolve a built-in model name (used by the CLI as ``builtin:NAME``)."""
    if name == "senegal_a":
        return _senegal_model("a")
    if name == "senegal_b":
        return _senegal_model("b")
    if name == "senegal_joint":
        return _senegal_model("ab")
    if name == "dakar_rent":
        return _rent_model()
    raise UnknownDataset(f"unknown builtin model {name!r}; available: {BUILTIN_MODELS}")


# SplitMix64: the state advances by a fixed odd constant and each state is
# scrambled independently, so the whole stream can be generated in one
# vectorized pass. Bit-exact across platforms.
_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def splitmix64_stream(seed: int, count: int) -> np.ndarray:
    """First ``count`` outputs of the SplitMix64 generator for ``seed``."""
    idx = np.arange(1, count + 1, dtype=np.uint64)
    z = (np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + _GAMMA * idx) & _MASK
    z = ((z ^ (z >> np.uint64(30))) * _MIX1) & _MASK
    z = ((z ^ (z >> np.uint64(27))) * _MIX2) & _MASK
    return z ^ (z >> np.uint64(31))


def uniform_stream(seed: int, count: int) -> np.ndarray:
    """Deterministic uniforms on [-1, 1): top 53 bits of each u64 output."""
    bits = splitmix64_stream(seed, count)
    return (bits >> np.uint64(11)).astype(float) * 2.0**-53 * 2.0 - 1.0


def generate_interaction_sim(spec: SimSpec) -> Dataset:
    """Simulate two independent uniform groups plus an interaction-driven response.

    Columns ``a1..a{p}`` and ``b1..b{q}`` are i.i.d. uniform on [-1, 1),
    drawn column-major (all of a1, then a2, ...). The response mixes a
    weak marginal pair with a dominant product term::

        c = 0.2 (a1 + b1) / sqrt(2/3)
          + 0.8 (a2/10 + b2/10 + a2*b2) / sqrt(53/450)

    Both mixed-in components have unit variance, so marginal-only methods
    should latch onto a1/b1 while interaction-aware ones find a2/b2.
    Output is bit-exact for a given seed on every platform.
    """
    p, q = spec.group_sizes
    n = spec.n
    draws = uniform_stream(spec.seed, n * (p + q))
    cols = draws.reshape(p + q, n)  # column-major generation order
    a = cols[:p].T
    b = cols[p:].T
    c = 0.2 * (a[:, 0] + b[:, 0]) / np.sqrt(2.0 / 3.0) + 0.8 * (
        a[:, 1] / 10.0 + b[:, 1] / 10.0 + a[:, 1] * b[:, 1]
    ) / np.sqrt(53.0 / 450.0)
    names = (
        [f"a{i + 1}" for i in range(p)]
        + [f"b{i + 1}" for i in range(q)]
        + ["c"]
    )
    values = np.column_stack([a, b, c])
    return Dataset(values, tuple(names))


def sim_model(spec: SimSpec) -> ModelSpec:
    """The two-predictor interaction model matching the simulated columns."""
    p, q = spec.group_sizes
    return ModelSpec(
        (
            GroupBinding("A", tuple(f"a{i + 1}" for i in range(p))),
            GroupBinding("B", tuple(f"b{i + 1}" for i in range(q))),
            GroupBinding("C", ("c",)),
        ),
        (
            Equation("C", ("A", "B"), (Interaction("A", ("B",)),)),
        ),
    )


def generate_mode_contrast_scenario() -> tuple[Dataset, ModelSpec]:
    """A four-observation geometry separating marginal from partial estimation.

    The predictor block ``g1`` holds two orthonormal columns ``a`` and
    ``b``; block ``g2`` holds a single column ``c``; the target ``y``
    lies in the plane of ``a`` and ``c`` but its orthogonal projection
    onto ``g1`` is exactly ``b``. Estimators driven by marginal
    correlation therefore pick ``b`` as g1's factor, while projecting
    parallel to ``c`` (the partial route) picks ``a`` — the direction
    that actually helps predict ``y`` once ``c`` is accounted for.

    Columns are built on an orthonormal basis of the zero-mean subspace
    so that standardization leaves the geometry untouched.
    """
    u1 = np.array([1.0, -1.0, 0.0, 0.0]) / np.sqrt(2.0)
    u2 = np.array([1.0, 1.0, -2.0, 0.0]) / np.sqrt(6.0)
    u3 = np.array([1.0, 1.0, 1.0, -3.0]) / np.sqrt(12.0)
    a = u1
    b = u2
    c = (-u1 + u2 + u3) / np.sqrt(3.0)
    y = standardize(u2 + u3)
    ds = Dataset(np.column_stack([a, b, c, y]), ("a", "b", "c", "y"))
    spec = ModelSpec(
        (
            GroupBinding("g1", ("a", "b")),
            GroupBinding("g2", ("c",)),
            GroupBinding("target", ("y",)),
        ),
        (Equation("target", ("g1", "g2")),),
    )
    return ds, spec


def write_report(report, format: str, destination) -> None:
    """Serialize report tables as text (one stream) or CSV (one file per table).

    ``destination`` is a path or file-like object for ``text``, and a
    directory for ``csv``. CSV tables are purely numeric under their
    header row, so they read back through ``read_csv_dataset``.
    """
    from .report import render_csv_tables, render_text

    if format == "text":
        text = render_text(report)
        if hasattr(destination, "write"):
            destination.write(text)
        else:
            Path(destination).write_text(text)
        return
    if format == "csv":
        outdir = Path(destination)
        outdir.mkdir(parents=True, exist_ok=True)
        for filename, content in render_csv_tables(report):
            (outdir / filename).write_text(content)
        return
    raise ValueError(f"unknown report format {format!r}")
