"""Report models shared by the command line and the table builder.

Reports are pydantic models, so JSON output can be read back with
``model_validate_json``. Infinite floats are written as the strings
"Infinity" / "-Infinity".
"""

import csv
import math
import sys
from typing import Any, Literal, TextIO

from pydantic import BaseModel, ConfigDict
from rich.console import Console
from rich.table import Table

from .ensembles import EnsembleSpec, Interval
from .exact_psi import PsiResult
from .utils import round_significant

__all__ = [
    "OutputFormat",
    "VALUE_FLOOR",
    "RunMeta",
    "ReportModel",
    "EnsembleParams",
    "PsiReport",
    "EdgesReport",
    "McReport",
    "TableCell",
    "TableRow",
    "TableReport",
    "ConcentrationRow",
    "CsReport",
    "RicReport",
    "probability_fields",
    "log10_of",
    "emit",
]


OutputFormat = Literal["json", "csv", "plain"]

# smallest probability also printed as a plain decimal
VALUE_FLOOR = 1e-300


def log10_of(x: float) -> float:
    return math.log10(x) if x > 0 else -math.inf


def probability_fields(result: PsiResult) -> dict[str, Any]:
    return {
        "value": result.value if result.value >= VALUE_FLOOR else None,
        "log10_value": round_significant(result.log10_value),
        "precision_bits_used": result.precision_bits_used,
        "converged": result.converged,
    }


class RunMeta(BaseModel):
    model_config = ConfigDict(frozen=True)

    version: str
    wall_time_ms: float


class ReportModel(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    meta: RunMeta | None = None

    def is_converged(self) -> bool:
        return getattr(self, "converged", True)

    def table(self) -> tuple[list[str], list[list[Any]]]:
        """Header and rows of the csv and plain renderings."""

        header, row = [], []

        for name in type(self).model_fields:
            if name == "meta":
                continue
            value = getattr(self, name)
            header.append(name)
            row.append(value.describe() if isinstance(value, EnsembleParams) else value)

        return header, [row]


class EnsembleParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: str
    p: int
    m: float | None = None
    n_beta: float | None = None
    sigma: tuple[float, ...] | None = None

    @classmethod
    def from_spec(cls, spec: EnsembleSpec) -> "EnsembleParams":
        sigma = spec.sigma or spec.sigma_pair
        return cls(kind=spec.kind.value, p=spec.p, m=spec.m, n_beta=spec.n_beta, sigma=sigma)

    def describe(self) -> str:
        parts = [f"p={self.p}"]
        if self.m is not None:
            parts.append(f"m={self.m:g}")
        if self.n_beta is not None:
            parts.append(f"n_beta={self.n_beta:g}")
        if self.sigma is not None:
            parts.append("sigma=" + ",".join(f"{s:g}" for s in self.sigma))
        return f"{self.kind}(" + " ".join(parts) + ")"


class PsiReport(ReportModel):
    quantity: Literal["psi", "cdf-max", "cdf-min", "approx"]
    ensemble: EnsembleParams
    interval: tuple[float, float]
    value: float | None
    log10_value: float
    precision_bits_used: int | None = None
    converged: bool = True

    @classmethod
    def from_result(
        cls,
        quantity: str,
        spec: EnsembleSpec,
        interval: Interval,
        result: PsiResult,
        meta: RunMeta | None = None,
    ) -> "PsiReport":
        return cls(
            quantity=quantity,
            ensemble=EnsembleParams.from_spec(spec),
            interval=tuple(interval),
            meta=meta,
            **probability_fields(result),
        )


class EdgesReport(ReportModel):
    ensemble: EnsembleParams
    mu_plus: float
    sigma_plus: float
    mu_minus: float
    sigma_minus: float
    limiting_support: tuple[float, float]
    support_probability_limit: float
    support_probability_nominal: float


class McReport(ReportModel):
    ensemble: EnsembleParams
    interval: tuple[float, float]
    estimate: float
    std_err: float
    trials: int
    seed: int
    exact_value: float | None
    exact_log10_value: float
    z_score: float
    converged: bool = True


class TableCell(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    column: str
    computed: float | None = None
    computed_log10: float | None = None
    reference: str | None = None
    reference_log10: float | None = None
    converged: bool = True


class TableRow(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    key: str
    cells: list[TableCell]

    def cell(self, column: str) -> TableCell:
        return next(cell for cell in self.cells if cell.column == column)


class TableReport(ReportModel):
    table_id: str
    columns: list[str]
    rows: list[TableRow]

    @property
    def converged(self) -> bool:
        return all(cell.converged for row in self.rows for cell in row.cells)

    def row(self, key: str) -> TableRow:
        return next(row for row in self.rows if row.key == key)

    def table(self) -> tuple[list[str], list[list[Any]]]:
        header = ["key"]
        for column in self.columns:
            header += [column, f"{column}_reference"]

        rows = []
        for row in self.rows:
            line: list[Any] = [row.key]
            for cell in row.cells:
                line += [
                    cell.computed if cell.computed is not None else cell.computed_log10,
                    cell.reference,
                ]
            rows.append(line)

        return header, rows


class ConcentrationRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    t: float
    upper_tail_bound: float
    lower_tail_bound: float
    exact_upper: float
    exact_lower: float
    approx_upper: float
    approx_lower: float | None = None
    converged: bool = True


class CsReport(ReportModel):
    s: int
    m: int
    records: list[ConcentrationRow]

    @property
    def converged(self) -> bool:
        return all(record.converged for record in self.records)

    def table(self) -> tuple[list[str], list[list[Any]]]:
        header = list(ConcentrationRow.model_fields)
        return header, [list(record.model_dump().values()) for record in self.records]


class RicReport(ReportModel):
    s: int
    m: int
    delta: float
    interval: tuple[float, float]
    value: float | None
    log10_value: float
    precision_bits_used: int
    converged: bool
    approx: float | None


def _cell_text(value: Any) -> str:
    match value:
        case None:
            return ""
        case bool():
            return "true" if value else "false"
        case float():
            return repr(value)
        case tuple() | list():
            return " ".join(_cell_text(x) for x in value)
        case _:
            return str(value)


def emit(report: ReportModel, format: OutputFormat = "json", stream: TextIO | None = None):
    """Write `report` to `stream` (stdout by default)."""

    stream = stream or sys.stdout

    match format:
        case "json":
            stream.write(report.model_dump_json(indent=2) + "\n")

        case "csv":
            header, rows = report.table()
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(header)
            writer.writerows([_cell_text(x) for x in row] for row in rows)

        case "plain":
            header, rows = report.table()
            table = Table(*header, box=None, show_edge=False)
            for row in rows:
                table.add_row(*(_cell_text(x) for x in row))

            console = Console(file=stream, highlight=False, width=200, color_system=None)
            console.print(table)
            if report.meta is not None:
                console.print(
                    f"eigen-interval {report.meta.version}, "
                    f"{report.meta.wall_time_ms:.1f} ms"
                )

        case _:
            raise ValueError(f"Unknown output format {format!r}.")
