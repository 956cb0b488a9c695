"""Command-line front end.

Data goes to stdout in the selected format; diagnostics go to stderr through
a rich log handler. Exit codes: 0 success, 2 invalid input, 3 a result did not
converge, 4 the ensemble parameters cannot be sampled.
"""

import argparse
import logging
import math
import sys
import time
from typing import Literal, Sequence

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from rich.console import Console
from rich.logging import RichHandler

from . import __version__
from .asymptotics import (
    EDGE_PROB_NOMINAL,
    cs_concentration_bounds,
    edge_prob_limit,
    edge_scaling,
    isometry_probability,
    limiting_support,
    psi_approx,
)
from .ensembles import EnsembleKind, EnsembleSpec, Interval, support
from .exact_psi import cdf_largest, cdf_smallest, psi
from .exceptions import (
    EigenIntervalError,
    InternalConsistencyError,
    PsiConvergenceError,
    PsiDomainError,
    UnsupportedSamplingError,
    get_exception_chain,
)
from .options import PsiOptions, SamplingOptions
from .report import (
    ConcentrationRow,
    CsReport,
    EdgesReport,
    EnsembleParams,
    McReport,
    PsiReport,
    ReportModel,
    RicReport,
    RunMeta,
    emit,
    log10_of,
    probability_fields,
)
from .sampling import mc_psi
from .tables import TABLE_IDS, build_table
from .utils import is_integral, parse_bound, round_significant

__all__ = [
    "EXIT_OK",
    "EXIT_USAGE",
    "EXIT_NOT_CONVERGED",
    "EXIT_UNSUPPORTED_SAMPLING",
    "RunConfig",
    "build_parser",
    "spec_from_config",
    "run",
    "main",
]


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3
EXIT_UNSUPPORTED_SAMPLING = 4


class RunConfig(BaseModel):
    """Validated command-line configuration."""

    model_config = ConfigDict(frozen=True)

    command: Literal["psi", "cdf-max", "cdf-min", "approx", "edges", "table", "mc", "cs", "ric"]
    ensemble: str | None = None
    p: int | None = Field(None, ge=1)
    m: float | None = None
    n: int | None = Field(None, ge=1)
    n_beta: float | None = None
    sigma: tuple[float, ...] | None = None
    interval: tuple[str, str] | None = None
    at: float | None = None
    precision: int = Field(0, ge=0)
    format: Literal["json", "csv", "plain"] = "json"
    seed: int = Field(0, ge=0, lt=2**64)
    trials: int = Field(100_000, ge=1)
    no_meta: bool = False
    table: str | None = None
    max_dim: int | None = Field(None, ge=1)
    t_start: float = Field(0.0, ge=0)
    t_stop: float = Field(1.0, ge=0)
    t_step: float = Field(0.01, gt=0)
    delta: float | None = Field(None, gt=0)
    verbose: bool = False

    @model_validator(mode="after")
    def check_command_arguments(self) -> "RunConfig":
        match self.command:
            case "psi" | "cdf-max" | "cdf-min" | "approx" | "edges" | "mc":
                if self.ensemble is None:
                    raise ValueError(f"{self.command} requires --ensemble.")
        match self.command:
            case "cdf-max" | "cdf-min" if self.at is None:
                raise ValueError(f"{self.command} requires --at.")
            case "table" if self.table not in TABLE_IDS:
                raise ValueError(f"table requires one of {', '.join(TABLE_IDS)}.")
            case "cs" | "ric" if self.p is None or self.m is None:
                raise ValueError(f"{self.command} requires -s and -m.")
            case "ric" if self.delta is None:
                raise ValueError("ric requires --delta.")
            case "cs" if self.t_stop < self.t_start:
                raise ValueError("--t-stop must not be below --t-start.")
        if 0 < self.precision < 64:
            raise ValueError("--precision must be at least 64 bits.")
        return self

    @property
    def psi_options(self) -> PsiOptions:
        return PsiOptions(precision=self.precision)

    def t_grid(self) -> list[float]:
        count = math.floor((self.t_stop - self.t_start) / self.t_step + 1e-9) + 1
        return [round(self.t_start + i * self.t_step, 12) for i in range(count)]


def _sigma_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(token) for token in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid comma-separated list {text!r}") from None


class BoundParser(argparse.ArgumentParser):
    """Argument parser that reads "-inf" as a value, not as an option."""

    def _parse_optional(self, arg_string):
        if arg_string.lower() in ("-inf", "-infinity"):
            return None
        return super()._parse_optional(arg_string)


def build_parser() -> argparse.ArgumentParser:
    parser = BoundParser(
        prog="eigen-interval",
        description="Probability that all eigenvalues of a random matrix lie in an interval.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = BoundParser(add_help=False)
    common.add_argument("--ensemble", help="ensemble kind, e.g. real-wishart, goe, gue")
    common.add_argument("-p", "-s", dest="p", type=int, help="matrix dimension")
    common.add_argument("-m", type=float, help="degrees of freedom or beta exponent m")
    common.add_argument("-n", type=int, help="dimension of GOE/GUE matrices")
    common.add_argument("--n-beta", dest="n_beta", type=float, help="beta exponent n")
    common.add_argument(
        "--sigma",
        type=_sigma_list,
        help="covariance eigenvalues, or sigma1,sigma2 for the spiked case",
    )
    common.add_argument("--interval", nargs=2, metavar=("LO", "HI"))
    common.add_argument("--at", type=parse_bound, metavar="X")
    common.add_argument("--precision", type=int, default=0, metavar="BITS")
    common.add_argument("--format", choices=("json", "csv", "plain"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=100_000)
    common.add_argument("--no-meta", dest="no_meta", action="store_true")
    common.add_argument("--max-dim", dest="max_dim", type=int)
    common.add_argument("--t-start", dest="t_start", type=float, default=0.0)
    common.add_argument("--t-stop", dest="t_stop", type=float, default=1.0)
    common.add_argument("--t-step", dest="t_step", type=float, default=0.01)
    common.add_argument("--delta", type=float)
    common.add_argument("-v", "--verbose", action="store_true")

    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("psi", parents=[common], help="exact psi(a, b)")
    commands.add_parser("cdf-max", parents=[common], help="P(largest eigenvalue <= X)")
    commands.add_parser("cdf-min", parents=[common], help="P(smallest eigenvalue <= X)")
    commands.add_parser("approx", parents=[common], help="Tracy-Widom approximation of psi")
    commands.add_parser("edges", parents=[common], help="edge centering and scaling")

    table = commands.add_parser("table", parents=[common], help="recompute a reference table")
    table.add_argument("table", choices=TABLE_IDS)

    commands.add_parser("mc", parents=[common], help="Monte Carlo estimate of psi")
    commands.add_parser("cs", parents=[common], help="compressed-sensing concentration bounds")
    commands.add_parser("ric", parents=[common], help="restricted isometry probability")

    return parser


def spec_from_config(config: RunConfig) -> EnsembleSpec:
    kind = EnsembleKind.parse(config.ensemble or "")

    match kind:
        case EnsembleKind.GOE | EnsembleKind.GUE:
            n = config.n or config.p
            if n is None:
                raise PsiDomainError(f"{kind.value} requires -n.")
            return EnsembleSpec(kind=kind, p=n)

        case EnsembleKind.ComplexWishartCorrelated:
            sigma = config.sigma or ()
            if config.p is not None and config.p != len(sigma):
                raise PsiDomainError(
                    f"-p {config.p} does not match the {len(sigma)} values of --sigma."
                )
            return EnsembleSpec.complex_wishart_correlated(_required(config.m, "-m"), sigma)

        case EnsembleKind.ComplexWishartSpiked:
            if config.sigma is None or len(config.sigma) != 2:
                raise PsiDomainError("complex-wishart-spiked requires --sigma SIGMA1,SIGMA2.")
            return EnsembleSpec(
                kind=kind,
                p=_required(config.p, "-p"),
                m=_required(config.m, "-m"),
                sigma_pair=config.sigma,
            )

        case EnsembleKind.RealBeta | EnsembleKind.ComplexBeta:
            return EnsembleSpec(
                kind=kind,
                p=_required(config.p, "-s"),
                m=_required(config.m, "-m"),
                n_beta=_required(config.n_beta, "--n-beta"),
            )

        case _:
            return EnsembleSpec(kind=kind, p=_required(config.p, "-p"), m=_required(config.m, "-m"))


def _required(value, flag: str):
    if value is None:
        raise PsiDomainError(f"Missing required option {flag}.")
    return value


def _interval(config: RunConfig, spec: EnsembleSpec) -> Interval:
    if config.interval is None:
        return support(spec)
    return Interval.parse(*config.interval)


def _cmd_psi(config: RunConfig, spec: EnsembleSpec) -> ReportModel:
    interval = _interval(config, spec)
    result = psi(spec, interval, config.psi_options)
    return PsiReport.from_result("psi", spec, interval, result)


def _cmd_cdf_max(config: RunConfig, spec: EnsembleSpec) -> ReportModel:
    interval = Interval(support(spec).lo, max(config.at, support(spec).lo))
    result = cdf_largest(spec, config.at, config.psi_options)
    return PsiReport.from_result("cdf-max", spec, interval, result)


def _cmd_cdf_min(config: RunConfig, spec: EnsembleSpec) -> ReportModel:
    interval = Interval(min(config.at, support(spec).hi), support(spec).hi)
    result = cdf_smallest(spec, config.at, config.psi_options)
    return PsiReport.from_result("cdf-min", spec, interval, result)


def _cmd_approx(config: RunConfig, spec: EnsembleSpec) -> ReportModel:
    interval = _interval(config, spec)
    value = psi_approx(spec, interval)
    return PsiReport(
        quantity="approx",
        ensemble=EnsembleParams.from_spec(spec),
        interval=tuple(interval),
        value=value,
        log10_value=round_significant(log10_of(value)),
    )


def _cmd_edges(config: RunConfig, spec: EnsembleSpec) -> ReportModel:
    scaling = edge_scaling(spec)
    symmetry = "real" if spec.kind.is_real else "complex"
    return EdgesReport(
        ensemble=EnsembleParams.from_spec(spec),
        mu_plus=scaling.mu_plus,
        sigma_plus=scaling.sigma_plus,
        mu_minus=scaling.mu_minus,
        sigma_minus=scaling.sigma_minus,
        limiting_support=tuple(limiting_support(spec)),
        support_probability_limit=edge_prob_limit(symmetry),
        support_probability_nominal=EDGE_PROB_NOMINAL[symmetry],
    )


def _cmd_mc(config: RunConfig, spec: EnsembleSpec) -> ReportModel:
    interval = _interval(config, spec)
    estimate = mc_psi(spec, interval, config.trials, config.seed, SamplingOptions())
    exact = psi(spec, interval, config.psi_options)
    fields = probability_fields(exact)

    return McReport(
        ensemble=EnsembleParams.from_spec(spec),
        interval=tuple(interval),
        estimate=estimate.estimate,
        std_err=estimate.std_err,
        trials=estimate.count,
        seed=estimate.seed,
        exact_value=fields["value"],
        exact_log10_value=fields["log10_value"],
        z_score=estimate.z_score(exact.value),
        converged=exact.converged,
    )


def _cs_dimensions(config: RunConfig) -> tuple[int, int]:
    if not is_integral(config.m):
        raise PsiDomainError(
            f"Measurements -m must be an integer, got {config.m}."
        )
    return config.p, int(config.m)


def _cmd_cs(config: RunConfig) -> ReportModel:
    s, m = _cs_dimensions(config)
    records = cs_concentration_bounds(s, m, config.t_grid(), config.psi_options)
    return CsReport(
        s=s,
        m=m,
        records=[ConcentrationRow(**vars(record)) for record in records],
    )


def _cmd_ric(config: RunConfig) -> ReportModel:
    s, m = _cs_dimensions(config)
    result = isometry_probability(s, m, config.delta, config.psi_options)
    return RicReport(
        s=s,
        m=m,
        delta=config.delta,
        interval=tuple(result.interval),
        approx=result.approx,
        **probability_fields(result.exact),
    )


def _report(config: RunConfig) -> ReportModel:
    match config.command:
        case "table":
            return build_table(config.table, config.psi_options, config.max_dim)
        case "cs":
            return _cmd_cs(config)
        case "ric":
            return _cmd_ric(config)

    spec = spec_from_config(config)

    match config.command:
        case "psi":
            return _cmd_psi(config, spec)
        case "cdf-max":
            return _cmd_cdf_max(config, spec)
        case "cdf-min":
            return _cmd_cdf_min(config, spec)
        case "approx":
            return _cmd_approx(config, spec)
        case "edges":
            return _cmd_edges(config, spec)
        case "mc":
            return _cmd_mc(config, spec)

    raise PsiDomainError(f"Unknown command {config.command!r}.")


def run(config: RunConfig) -> int:
    """Execute one command and write its report; returns the exit code."""

    started = time.perf_counter()

    try:
        report = _report(config)
    except UnsupportedSamplingError as exc:
        logger.error("%s", exc)
        return EXIT_UNSUPPORTED_SAMPLING
    except PsiConvergenceError as exc:
        logger.error("%s", exc)
        return EXIT_NOT_CONVERGED
    except InternalConsistencyError as exc:
        for error in get_exception_chain(exc):
            logger.error("%s", error)
        return EXIT_ERROR
    except EigenIntervalError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE

    if not config.no_meta:
        elapsed = (time.perf_counter() - started) * 1000
        report = report.model_copy(update={"meta": RunMeta(version=__version__, wall_time_ms=elapsed)})

    emit(report, config.format, sys.stdout)

    if not report.is_converged():
        logger.warning("Some values did not converge; the best estimates were reported.")
        return EXIT_NOT_CONVERGED

    return EXIT_OK


def configure_logging(verbose: bool):
    handler = RichHandler(
        console=Console(stderr=True),
        show_time=False,
        show_path=False,
    )
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[handler],
        force=True,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    arguments = vars(parser.parse_args(argv))

    configure_logging(arguments.get("verbose", False))

    try:
        config = RunConfig.model_validate(arguments)
    except ValidationError as exc:
        for error in exc.errors():
            logger.error("%s", error["msg"])
        return EXIT_USAGE

    return run(config)
