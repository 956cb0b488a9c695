"""Published reference tables and their recomputation.

Reference entries are kept as the printed strings; they are parsed with
mpmath so values far below the double range (e.g. 2.85E-29904) keep their
log10.
"""

from fractions import Fraction
import logging
import math
from typing import Callable

from frozendict import frozendict
from mpmath import mp

from .asymptotics import (
    EDGE_PROB_NOMINAL,
    TW_GAMMA_PARAMS,
    edge_prob_limit,
    goe_negativity_approx,
    mp_support,
)
from .ensembles import EnsembleSpec, Interval
from .exact_psi import PsiResult, psi
from .exceptions import PsiDomainError
from .options import PsiOptions
from .report import TableCell, TableReport, TableRow, VALUE_FLOOR
from .utils import round_significant

__all__ = [
    "TABLE_IDS",
    "GOE_NEGATIVE",
    "WISHART_MID",
    "MP_RATIOS",
    "MP_EDGES",
    "MP_EDGE_LIMIT",
    "reference_log10",
    "build_table",
    "support_limit_table",
]


logger = logging.getLogger(__name__)


# psi(-inf, 0) for the n×n GOE: exact, two asymptotic approximations and the
# large-deviation value reported alongside them
GOE_NEGATIVE = frozendict(
    {
        2: frozendict(exact="0.146", basic="0.333", large_deviation="0.322", corrected="0.155"),
        5: frozendict(exact="1.40E-4", basic="1.04E-3", large_deviation="1.91E-3", corrected="1.53E-4"),
        10: frozendict(exact="2.27E-14", basic="1.18E-12", large_deviation="1.23E-12", corrected="2.54E-14"),
        50: frozendict(exact="2.43E-307", basic="6.30E-299", large_deviation="3.31E-304", corrected="2.92E-307"),
        100: frozendict(exact="2.72E-1210", basic="1.57E-1193", large_deviation="1.49E-1206", corrected="3.39E-1210"),
        500: frozendict(exact="2.85E-29904", basic="8.35E-29821", large_deviation="3.88E-29899", corrected="3.87E-29904"),
    }
)

# psi(0, p) for the real Wishart W_p(p, I)
WISHART_MID = frozendict(
    {
        2: frozendict(exact="0.315", large_deviation="0.491"),
        5: frozendict(exact="3.71E-3", large_deviation="1.18E-2"),
        10: frozendict(exact="1.90E-9", large_deviation="1.95E-8"),
        50: frozendict(exact="1.70E-198", large_deviation="1.81E-193"),
        100: frozendict(exact="10.2E-781", large_deviation="1.07E-771"),
        500: frozendict(exact="7.33E-19325", large_deviation="6.22E-19275"),
    }
)

MP_RATIOS = frozendict(
    {
        "2/3": Fraction(2, 3),
        "1/2": Fraction(1, 2),
        "1/5": Fraction(1, 5),
        "1/10": Fraction(1, 10),
    }
)

# psi over the Marchenko-Pastur support of W_p(p / ratio, I)
MP_EDGES = frozendict(
    {
        10: frozendict({"2/3": ".7678", "1/2": ".7645", "1/5": ".7625", "1/10": ".7624"}),
        20: frozendict({"2/3": ".7499", "1/2": ".7483", "1/5": ".7476", "1/10": ".7477"}),
        50: frozendict({"2/3": ".7332", "1/2": ".7326", "1/5": ".7327", "1/10": ".7329"}),
        100: frozendict({"2/3": ".7239", "1/2": ".7238", "1/5": ".7242", "1/10": ".7244"}),
        200: frozendict({"2/3": ".7169", "1/2": ".7171", "1/5": ".7175", "1/10": ".7177"}),
        500: frozendict({"2/3": ".7101", "1/2": ".7103", "1/5": ".7108", "1/10": ".7109"}),
    }
)

MP_EDGE_LIMIT = ".6921"

TABLE_IDS = ("goe-negative", "wishart-mid", "mp-edges", "tw-params", "support-limits")


def reference_log10(text: str) -> float:
    """log10 of a printed reference value, exact for any exponent."""
    return float(mp.log10(mp.mpf(text)))


def _reference_cell(column: str, text: str | None) -> dict:
    if text is None:
        return {"column": column}
    return {"column": column, "reference": text, "reference_log10": reference_log10(text)}


def _exact_cell(column: str, result: PsiResult, reference: str | None) -> TableCell:
    return TableCell(
        computed=result.value if result.value >= VALUE_FLOOR else None,
        computed_log10=round_significant(result.log10_value),
        converged=result.converged,
        **_reference_cell(column, reference),
    )


def _log_cell(column: str, log_value: float, reference: str | None) -> TableCell:
    log10 = log_value / math.log(10)
    return TableCell(
        computed=math.exp(log_value) if log10 > math.log10(VALUE_FLOOR) else None,
        computed_log10=round_significant(log10),
        **_reference_cell(column, reference),
    )


def _float_cell(column: str, value: float, reference: str | None) -> TableCell:
    return TableCell(
        computed=value,
        computed_log10=round_significant(math.log10(value)) if value > 0 else -math.inf,
        **_reference_cell(column, reference),
    )


def _keep(dim: int, max_dim: int | None) -> bool:
    return max_dim is None or dim <= max_dim


def _goe_negative(options: PsiOptions | None, max_dim: int | None) -> TableReport:
    rows = []

    for n, reference in GOE_NEGATIVE.items():
        if not _keep(n, max_dim):
            continue

        logger.info("Computing GOE negativity row n=%d.", n)
        exact = psi(EnsembleSpec.goe(n), Interval(-math.inf, 0.0), options)

        cells = [
            _exact_cell("exact", exact, reference["exact"]),
            _log_cell("basic", goe_negativity_approx(n, "basic"), reference["basic"]),
            TableCell(**_reference_cell("large_deviation", reference["large_deviation"])),
            _log_cell("corrected", goe_negativity_approx(n, "corrected"), reference["corrected"]),
        ]
        rows.append(TableRow(key=f"n={n}", cells=cells))

    return TableReport(
        table_id="goe-negative",
        columns=["exact", "basic", "large_deviation", "corrected"],
        rows=rows,
    )


def _wishart_mid(options: PsiOptions | None, max_dim: int | None) -> TableReport:
    rows = []

    for p, reference in WISHART_MID.items():
        if not _keep(p, max_dim):
            continue

        logger.info("Computing Wishart row p=%d.", p)
        exact = psi(EnsembleSpec.real_wishart(p, p), Interval(0.0, float(p)), options)

        cells = [
            _exact_cell("exact", exact, reference["exact"]),
            TableCell(**_reference_cell("large_deviation", reference["large_deviation"])),
        ]
        rows.append(TableRow(key=f"p={p}", cells=cells))

    return TableReport(
        table_id="wishart-mid", columns=["exact", "large_deviation"], rows=rows
    )


def _mp_edges(options: PsiOptions | None, max_dim: int | None) -> TableReport:
    rows = []

    for p, references in MP_EDGES.items():
        if not _keep(p, max_dim):
            continue

        cells = []
        for label, ratio in MP_RATIOS.items():
            m = int(p / ratio)
            logger.info("Computing Marchenko-Pastur edge cell p=%d, m=%d.", p, m)
            exact = psi(EnsembleSpec.real_wishart(p, m), mp_support(p, m), options)
            cells.append(_exact_cell(label, exact, references[label]))

        rows.append(TableRow(key=f"p={p}", cells=cells))

    limit = edge_prob_limit("real")
    rows.append(
        TableRow(
            key="p=inf",
            cells=[_float_cell(label, limit, MP_EDGE_LIMIT) for label in MP_RATIOS],
        )
    )

    return TableReport(table_id="mp-edges", columns=list(MP_RATIOS), rows=rows)


def _tw_params() -> TableReport:
    rows = [
        TableRow(
            key=f"beta={beta}",
            cells=[
                TableCell(column=name, computed=getattr(params, name), reference=repr(getattr(params, name)))
                for name in ("k", "theta", "alpha")
            ],
        )
        for beta, params in TW_GAMMA_PARAMS.items()
    ]

    return TableReport(table_id="tw-params", columns=["k", "theta", "alpha"], rows=rows)


def support_limit_table() -> TableReport:
    """Large-p support probabilities: gamma surrogate next to the nominal limits."""

    rows = [
        TableRow(
            key=kind,
            cells=[_float_cell("limit", edge_prob_limit(kind), str(nominal))],
        )
        for kind, nominal in EDGE_PROB_NOMINAL.items()
    ]

    return TableReport(table_id="support-limits", columns=["limit"], rows=rows)


def build_table(
    table_id: str,
    options: PsiOptions | None = None,
    max_dim: int | None = None,
) -> TableReport:
    """Recompute a reference table, skipping rows whose dimension exceeds `max_dim`."""

    builders: dict[str, Callable[[], TableReport]] = {
        "goe-negative": lambda: _goe_negative(options, max_dim),
        "wishart-mid": lambda: _wishart_mid(options, max_dim),
        "mp-edges": lambda: _mp_edges(options, max_dim),
        "tw-params": _tw_params,
        "support-limits": support_limit_table,
    }

    try:
        builder = builders[table_id]
    except KeyError:
        raise PsiDomainError(
            f"Unknown table {table_id!r}, expected one of {', '.join(TABLE_IDS)}."
        ) from None

    return builder()
