"""Exact probability that every eigenvalue lies in an interval.

All entry points share one adaptive loop: the kernel is evaluated at a
starting precision q, checked at q plus `PsiOptions.guard_bits`, and then at
2q, 4q, ... until two consecutive values of ln psi agree to
`PsiOptions.tolerance`.
"""

from dataclasses import dataclass
import logging
import math
from typing import Iterable

from mpmath import mpf

from .ensembles import EnsembleKind, EnsembleSpec, Interval, support
from .exceptions import InternalConsistencyError
from .hp_math import BigReal, HighPrecision, LogScaled
from .kernels import (
    DetKernel,
    SkewKernel,
    complex_beta_kernel,
    complex_wishart_correlated_kernel,
    complex_wishart_spiked_kernel,
    complex_wishart_white_kernel,
    goe_kernel,
    gue_kernel,
    real_beta_kernel,
    real_wishart_kernel,
)
from .options import PsiOptions, psi_options

__all__ = [
    "PsiResult",
    "IntervalLike",
    "as_interval",
    "build_kernel",
    "precision_rungs",
    "psi",
    "psi_real_wishart",
    "psi_goe",
    "psi_real_beta",
    "psi_complex_wishart_white",
    "psi_complex_wishart_correlated",
    "psi_complex_wishart_spiked",
    "psi_complex_beta",
    "psi_gue",
    "cdf_largest",
    "cdf_smallest",
]


logger = logging.getLogger(__name__)

IntervalLike = Interval | tuple[float | str, float | str]


@dataclass(frozen=True)
class PsiResult:
    """Probability with its natural log, which stays finite where `value` underflows."""

    value: float
    log_value: BigReal
    precision_bits_used: int
    converged: bool = True

    @classmethod
    def zero(cls, precision_bits: int) -> "PsiResult":
        return cls(0.0, mpf("-inf"), precision_bits)

    @classmethod
    def one(cls, precision_bits: int) -> "PsiResult":
        return cls(1.0, mpf(0), precision_bits)

    @classmethod
    def from_log_scaled(
        cls, psi: LogScaled, precision_bits: int, converged: bool
    ) -> "PsiResult":
        if psi.is_zero:
            return cls(0.0, psi.log_magnitude, precision_bits, converged)

        log_value = min(psi.log_magnitude, mpf(0))
        return cls(
            LogScaled(log_value).to_float(), log_value, precision_bits, converged
        )

    @property
    def is_zero(self) -> bool:
        return math.isinf(self.log_value) and self.log_value < 0

    @property
    def log10_value(self) -> float:
        if self.is_zero:
            return -math.inf
        return float(self.log_value) / math.log(10)

    def complement(self) -> "PsiResult":
        """1 - psi, formed as -expm1(ln psi) to keep small tails."""

        if self.is_zero:
            return PsiResult(1.0, mpf(0), self.precision_bits_used, self.converged)

        hp = HighPrecision(self.precision_bits_used)
        rest = -hp.ctx.expm1(hp.mpf(self.log_value))
        return PsiResult.from_log_scaled(
            LogScaled.from_value(hp, rest), self.precision_bits_used, self.converged
        )


def as_interval(iv: IntervalLike) -> Interval:
    if isinstance(iv, Interval):
        return iv
    lo, hi = iv
    return Interval.parse(lo, hi)


def build_kernel(
    spec: EnsembleSpec, precision: HighPrecision, lo: float, hi: float
) -> SkewKernel | DetKernel:
    """Kernel of `spec` on [lo, hi], which must already lie inside the support."""

    logger.debug(
        "Building %s kernel of dimension %d at %d bits.",
        spec.kind.value,
        spec.dim,
        precision.precision_bits,
    )

    match spec.kind:
        case EnsembleKind.RealWishart:
            return real_wishart_kernel(precision, spec.p, int(spec.m), lo, hi)
        case EnsembleKind.GOE:
            return goe_kernel(precision, spec.p, lo, hi)
        case EnsembleKind.RealBeta:
            return real_beta_kernel(precision, spec.p, spec.m, spec.n_beta, lo, hi)
        case EnsembleKind.ComplexWishartWhite:
            return complex_wishart_white_kernel(precision, spec.p, int(spec.m), lo, hi)
        case EnsembleKind.ComplexWishartCorrelated:
            return complex_wishart_correlated_kernel(
                precision, int(spec.m), spec.sigma, lo, hi
            )
        case EnsembleKind.ComplexWishartSpiked:
            sigma1, sigma2 = spec.sigma_pair
            return complex_wishart_spiked_kernel(
                precision, spec.p, int(spec.m), sigma1, sigma2, lo, hi
            )
        case EnsembleKind.ComplexBeta:
            return complex_beta_kernel(precision, spec.p, spec.m, spec.n_beta, lo, hi)
        case EnsembleKind.GUE:
            return gue_kernel(precision, spec.p, lo, hi)


def _evaluate(spec: EnsembleSpec, precision_bits: int, lo: float, hi: float) -> LogScaled:
    return build_kernel(spec, HighPrecision(precision_bits), lo, hi).psi()


def _start_precision(spec: EnsembleSpec, options: PsiOptions) -> int:
    start = options.start_precision(spec.dim)

    if spec.kind is EnsembleKind.ComplexWishartCorrelated and spec.p > 1:
        sigma = spec.sigma
        ratio = min(a - b for a, b in zip(sigma, sigma[1:])) / sigma[0]

        if ratio < options.degenerate_sigma_ratio:
            extra = spec.p * math.ceil(-math.log2(ratio))
            logger.warning(
                "Covariance eigenvalues are nearly degenerate (relative gap %.3g), "
                "adding %d bits of working precision.",
                ratio,
                extra,
            )
            start += extra

    return start


def _check_normalization(spec: EnsembleSpec, precision_bits: int, options: PsiOptions):
    bounds = support(spec)
    total = _evaluate(spec, precision_bits, bounds.lo, bounds.hi)
    deviation = abs(float(total.log_magnitude)) if not total.is_zero else math.inf

    if deviation > options.normalization_tolerance:
        raise InternalConsistencyError(
            f"Normalization check failed for {spec.kind.value} (p={spec.p}): "
            f"ln psi over the support is {float(total.log_magnitude):.6g}."
        )


def _agrees(previous: LogScaled, current: LogScaled, tolerance: float) -> bool:
    if previous.is_zero or current.is_zero:
        return previous.is_zero and current.is_zero
    return abs(float(current.log_magnitude - previous.log_magnitude)) <= tolerance


def psi(
    spec: EnsembleSpec, iv: IntervalLike, options: PsiOptions | None = None
) -> PsiResult:
    """Probability that all eigenvalues of `spec` lie in `iv`."""

    options = psi_options(options)
    iv = as_interval(iv)

    start = _start_precision(spec, options)

    if iv.is_degenerate:
        return PsiResult.zero(start)

    lo, hi = iv.clip(support(spec))
    if lo == hi:
        return PsiResult.zero(start)

    if spec.kind is EnsembleKind.ComplexWishartSpiked:
        _check_normalization(spec, start, options)

    cap = max(options.precision_cap(spec.dim), 2 * start)
    rungs = iter(precision_rungs(start, options.guard_bits, cap, options.precision > 0))

    previous = _evaluate(spec, next(rungs), lo, hi)

    for precision in rungs:
        logger.debug("Checking at %d bits.", precision)
        current = _evaluate(spec, precision, lo, hi)

        if _agrees(previous, current, options.tolerance):
            logger.debug("Converged at %d bits.", precision)
            return _finish(spec, current, precision, True, options)

        previous = current

    logger.warning(
        "%s psi on [%s, %s] did not converge by %d bits; returning the "
        "highest-precision estimate.",
        spec.kind.value,
        lo,
        hi,
        precision,
    )
    return _finish(spec, current, precision, False, options)


def precision_rungs(start: int, guard: int, cap: int, fixed: bool = False) -> list[int]:
    """Working precisions tried in order: start, start + guard, then doublings.

    A fixed precision stops after the guard rung. Doublings stop at `cap`.
    """

    rungs = [start, start + guard]
    if fixed:
        return rungs

    precision = 2 * start
    while precision <= cap:
        rungs.append(precision)
        precision *= 2

    return rungs


def _finish(
    spec: EnsembleSpec,
    value: LogScaled,
    precision_bits: int,
    converged: bool,
    options: PsiOptions,
) -> PsiResult:
    if not value.is_zero and converged:
        excess = float(value.log_magnitude)
        if excess > options.normalization_tolerance:
            raise InternalConsistencyError(
                f"{spec.kind.value} psi exceeds 1 (ln psi = {excess:.6g})."
            )

    return PsiResult.from_log_scaled(value, precision_bits, converged)


def psi_real_wishart(
    p: int, m: int, iv: IntervalLike, options: PsiOptions | None = None
) -> PsiResult:
    return psi(EnsembleSpec.real_wishart(p, m), iv, options)


def psi_goe(n: int, iv: IntervalLike, options: PsiOptions | None = None) -> PsiResult:
    return psi(EnsembleSpec.goe(n), iv, options)


def psi_real_beta(
    s: int,
    m: float,
    n_beta: float,
    iv: IntervalLike,
    options: PsiOptions | None = None,
) -> PsiResult:
    return psi(EnsembleSpec.real_beta(s, m, n_beta), iv, options)


def psi_complex_wishart_white(
    p: int, m: int, iv: IntervalLike, options: PsiOptions | None = None
) -> PsiResult:
    return psi(EnsembleSpec.complex_wishart(p, m), iv, options)


def psi_complex_wishart_correlated(
    p: int,
    m: int,
    sigma: Iterable[float],
    iv: IntervalLike,
    options: PsiOptions | None = None,
) -> PsiResult:
    spec = EnsembleSpec(
        kind=EnsembleKind.ComplexWishartCorrelated, p=p, m=m, sigma=tuple(sigma)
    )
    return psi(spec, iv, options)


def psi_complex_wishart_spiked(
    p: int,
    m: int,
    sigma1: float,
    sigma2: float,
    iv: IntervalLike,
    options: PsiOptions | None = None,
) -> PsiResult:
    return psi(EnsembleSpec.complex_wishart_spiked(p, m, sigma1, sigma2), iv, options)


def psi_complex_beta(
    s: int,
    m: float,
    n_beta: float,
    iv: IntervalLike,
    options: PsiOptions | None = None,
) -> PsiResult:
    return psi(EnsembleSpec.complex_beta(s, m, n_beta), iv, options)


def psi_gue(n: int, iv: IntervalLike, options: PsiOptions | None = None) -> PsiResult:
    return psi(EnsembleSpec.gue(n), iv, options)


def cdf_largest(
    spec: EnsembleSpec, b: float, options: PsiOptions | None = None
) -> PsiResult:
    """P(λmax <= b)."""

    lo = support(spec).lo
    if b <= lo:
        return PsiResult.zero(psi_options(options).start_precision(spec.dim))

    return psi(spec, Interval(lo, b), options)


def cdf_smallest(
    spec: EnsembleSpec, a: float, options: PsiOptions | None = None
) -> PsiResult:
    """P(λmin <= a) = 1 - psi(a, support.hi)."""

    hi = support(spec).hi
    if a >= hi:
        return PsiResult.one(psi_options(options).start_precision(spec.dim))

    return psi(spec, Interval(a, hi), options).complement()
