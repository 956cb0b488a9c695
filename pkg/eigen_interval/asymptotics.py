"""Large-matrix approximations of psi.

The Tracy-Widom law of order beta is replaced by a shifted gamma law,
TW_beta ~ Gamma(k, theta) - alpha. Largest and smallest eigenvalues are taken
to be independent, so psi(a, b) is the product of two edge factors.
"""

from dataclasses import dataclass
import logging
import math
from typing import Iterable, Literal

from frozendict import frozendict
from scipy import special

from .ensembles import EnsembleKind, EnsembleSpec, Interval, support
from .exact_psi import IntervalLike, PsiResult, as_interval, cdf_largest, cdf_smallest, psi
from .exceptions import PsiDomainError, UnsupportedEnsembleError
from .options import PsiOptions

__all__ = [
    "TWGammaParams",
    "TW_GAMMA_PARAMS",
    "EDGE_PROB_NOMINAL",
    "EdgeScaling",
    "ConcentrationRecord",
    "IsometryProbability",
    "tw_params",
    "tw_cdf",
    "tw_sf",
    "tw_beta",
    "upper_edge",
    "lower_edge",
    "edge_scaling",
    "psi_approx",
    "mp_support",
    "semicircle_support",
    "limiting_support",
    "edge_prob_limit",
    "deviation_prob",
    "goe_negativity_approx",
    "cs_concentration_bounds",
    "isometry_probability",
]


logger = logging.getLogger(__name__)

SymmetryClass = Literal["real", "complex"]
DeviationForm = Literal["containment", "exceedance"]
GoeVariant = Literal["basic", "corrected"]

GAUSSIAN_SIGMA0 = 1 / math.sqrt(2)


@dataclass(frozen=True)
class TWGammaParams:
    beta: int
    k: float
    theta: float
    alpha: float


TW_GAMMA_PARAMS = frozendict(
    {
        1: TWGammaParams(beta=1, k=46.446, theta=0.186054, alpha=9.84801),
        2: TWGammaParams(beta=2, k=79.6595, theta=0.101037, alpha=9.81961),
        4: TWGammaParams(beta=4, k=146.021, theta=0.0595445, alpha=11.0016),
    }
)

EDGE_PROB_NOMINAL = frozendict({"real": 0.6921, "complex": 0.9397})


@dataclass(frozen=True)
class EdgeScaling:
    """Centering and scaling of both spectral edges."""

    mu_plus: float
    sigma_plus: float
    mu_minus: float
    sigma_minus: float


@dataclass(frozen=True)
class ConcentrationRecord:
    t: float
    upper_tail_bound: float
    lower_tail_bound: float
    exact_upper: float
    exact_lower: float
    approx_upper: float
    approx_lower: float | None
    converged: bool = True


@dataclass(frozen=True)
class IsometryProbability:
    """Probability that one s-column submatrix is a delta-isometry."""

    s: int
    m: int
    delta: float
    interval: Interval
    exact: PsiResult
    approx: float | None


def tw_params(beta: int) -> TWGammaParams:
    try:
        return TW_GAMMA_PARAMS[beta]
    except KeyError:
        raise PsiDomainError(f"Tracy-Widom order must be 1, 2 or 4, got {beta!r}.") from None


def _gamma_argument(params: TWGammaParams, x: float) -> float:
    return max(0.0, x + params.alpha) / params.theta


def tw_cdf(beta: int, x: float) -> float:
    """Gamma surrogate of the Tracy-Widom distribution function."""

    params = tw_params(beta)
    return float(special.gammainc(params.k, _gamma_argument(params, x)))


def tw_sf(beta: int, x: float) -> float:
    """1 - tw_cdf(beta, x) without cancellation in the right tail."""

    params = tw_params(beta)
    return float(special.gammaincc(params.k, _gamma_argument(params, x)))


def tw_beta(spec: EnsembleSpec) -> int:
    return 1 if spec.kind.is_real else 2


def _wishart_dims(spec: EnsembleSpec) -> tuple[int, int]:
    return spec.p, int(spec.m)


def _unsupported_scaling(spec: EnsembleSpec) -> UnsupportedEnsembleError:
    return UnsupportedEnsembleError(
        f"No edge scaling for {spec.kind.value}; only white Wishart, GOE "
        "and GUE ensembles are supported."
    )


def upper_edge(spec: EnsembleSpec) -> tuple[float, float]:
    """Centering and scale (mu_plus, sigma_plus) of the largest eigenvalue."""

    match spec.kind:
        case EnsembleKind.RealWishart | EnsembleKind.ComplexWishartWhite:
            p, m = _wishart_dims(spec)
            mu_plus = (math.sqrt(m) + math.sqrt(p)) ** 2
            return mu_plus, math.sqrt(mu_plus) * (1 / math.sqrt(p) + 1 / math.sqrt(m)) ** (1 / 3)

        case EnsembleKind.GOE | EnsembleKind.GUE:
            n = spec.p
            return 2 * GAUSSIAN_SIGMA0 * math.sqrt(n), GAUSSIAN_SIGMA0 * n ** (-1 / 6)

        case _:
            raise _unsupported_scaling(spec)


def lower_edge(spec: EnsembleSpec) -> tuple[float, float]:
    """Centering and scale (mu_minus, sigma_minus) of the smallest eigenvalue."""

    match spec.kind:
        case EnsembleKind.RealWishart | EnsembleKind.ComplexWishartWhite:
            p, m = _wishart_dims(spec)
            if m <= p:
                raise PsiDomainError(
                    f"Edge scaling of the smallest eigenvalue requires m > p, "
                    f"got p={p}, m={m}."
                )

            mu_minus = (math.sqrt(m) - math.sqrt(p)) ** 2
            return mu_minus, math.sqrt(mu_minus) * (1 / math.sqrt(p) - 1 / math.sqrt(m)) ** (1 / 3)

        case EnsembleKind.GOE | EnsembleKind.GUE:
            mu, sigma = upper_edge(spec)
            return -mu, sigma

        case _:
            raise _unsupported_scaling(spec)


def edge_scaling(spec: EnsembleSpec) -> EdgeScaling:
    return EdgeScaling(*upper_edge(spec), *lower_edge(spec))


def psi_approx(spec: EnsembleSpec, iv: IntervalLike) -> float:
    """psi(a, b) ~ F(upper edge) * F(lower edge) with the gamma surrogate.

    An edge at the support boundary contributes a factor of 1, so a square
    Wishart matrix needs no lower-edge scaling for intervals starting at 0.
    """

    iv = as_interval(iv)
    beta = tw_beta(spec)
    bounds = support(spec)
    mu_plus, sigma_plus = upper_edge(spec)

    result = 1.0
    if iv.hi < bounds.hi:
        result *= tw_cdf(beta, (iv.hi - mu_plus) / sigma_plus)
    if iv.lo > bounds.lo:
        mu_minus, sigma_minus = lower_edge(spec)
        result *= tw_cdf(beta, -(iv.lo - mu_minus) / sigma_minus)

    return result


def mp_support(p: int, m: int) -> Interval:
    """Limiting spectral support of W_p(m, I)."""

    if not 1 <= p <= m:
        raise PsiDomainError(f"Marchenko-Pastur support requires 1 <= p <= m, got p={p}, m={m}.")

    return Interval((math.sqrt(m) - math.sqrt(p)) ** 2, (math.sqrt(m) + math.sqrt(p)) ** 2)


def semicircle_support(n: int) -> Interval:
    if n < 1:
        raise PsiDomainError(f"Semicircle support requires n >= 1, got {n}.")

    edge = math.sqrt(2 * n)
    return Interval(-edge, edge)


def limiting_support(spec: EnsembleSpec) -> Interval:
    match spec.kind:
        case EnsembleKind.RealWishart | EnsembleKind.ComplexWishartWhite:
            return mp_support(spec.p, int(spec.m))
        case EnsembleKind.GOE | EnsembleKind.GUE:
            return semicircle_support(spec.p)
        case _:
            raise UnsupportedEnsembleError(
                f"No limiting spectral support for {spec.kind.value}."
            )


def edge_prob_limit(kind: SymmetryClass) -> float:
    """Large-p probability that the spectrum lies in its limiting support."""

    match kind:
        case "real":
            return tw_cdf(1, 0.0) ** 2
        case "complex":
            return tw_cdf(2, 0.0) ** 2
        case _:
            raise PsiDomainError(f"Unknown symmetry class {kind!r}, expected real or complex.")


def deviation_prob(beta: int, t: float, form: DeviationForm = "containment") -> float:
    """Probability for the edges widened by t edge-scales on both sides.

    "containment" is F(t)^2, the chance both edges stay inside; "exceedance"
    is (1 - F(t))^2, the chance both leave.
    """

    match form:
        case "containment":
            return tw_cdf(beta, t) ** 2
        case "exceedance":
            return tw_sf(beta, t) ** 2
        case _:
            raise PsiDomainError(
                f"Unknown deviation form {form!r}, expected containment or exceedance."
            )


def goe_negativity_approx(n: int, variant: GoeVariant = "corrected") -> float:
    """Natural log of the approximate probability that an n×n GOE matrix is negative definite."""

    if n < 1:
        raise PsiDomainError(f"GOE dimension must be positive, got {n}.")

    basic = -(n**2) * math.log(3) / 4

    match variant:
        case "basic":
            return basic
        case "corrected":
            return basic - n * math.log(10) / 6
        case _:
            raise PsiDomainError(f"Unknown variant {variant!r}, expected basic or corrected.")


def _check_cs_dimensions(s: int, m: int):
    if s < 1:
        raise PsiDomainError(f"Sparsity s must be positive, got {s}.")
    if m < s:
        raise PsiDomainError(f"Measurements m must be at least s, got s={s}, m={m}.")


def _lower_tail_approx(lower: tuple[float, float] | None, threshold: float) -> float | None:
    if lower is None:
        return None
    mu_minus, sigma_minus = lower
    return tw_sf(1, -(threshold - mu_minus) / sigma_minus)


def cs_concentration_bounds(
    s: int,
    m: int,
    t_grid: Iterable[float],
    options: PsiOptions | None = None,
) -> list[ConcentrationRecord]:
    """Concentration bounds on the extreme eigenvalues of W_s(m, I) next to their exact values."""

    _check_cs_dimensions(s, m)

    spec = EnsembleSpec.real_wishart(s, m)
    mu_plus, sigma_plus = upper_edge(spec)
    # the smallest-eigenvalue scaling degenerates for square matrices
    lower = lower_edge(spec) if m > s else None
    root_m, root_s = math.sqrt(m), math.sqrt(s)

    records = []

    for t in t_grid:
        t = float(t)
        if not t >= 0:
            raise PsiDomainError(f"Deviation t must be non-negative, got {t}.")

        upper_threshold = (root_m + root_s + t * root_m) ** 2
        lower_threshold = max(0.0, root_m - root_s - t * root_m) ** 2
        bound = math.exp(-m * t * t / 2)

        largest = cdf_largest(spec, upper_threshold, options)
        smallest = cdf_smallest(spec, lower_threshold, options)

        logger.debug("Concentration record at t=%g.", t)

        records.append(
            ConcentrationRecord(
                t=t,
                upper_tail_bound=bound,
                lower_tail_bound=bound,
                exact_upper=largest.complement().value,
                exact_lower=smallest.value,
                approx_upper=tw_sf(1, (upper_threshold - mu_plus) / sigma_plus),
                approx_lower=_lower_tail_approx(lower, lower_threshold),
                converged=largest.converged and smallest.converged,
            )
        )

    return records


def isometry_probability(
    s: int, m: int, delta: float, options: PsiOptions | None = None
) -> IsometryProbability:
    """Probability that an m×s matrix with N(0, 1/m) entries is a delta-isometry.

    This is the event that all eigenvalues of W_s(m, I) lie in
    [m(1 - delta), m(1 + delta)].
    """

    _check_cs_dimensions(s, m)
    if not delta > 0:
        raise PsiDomainError(f"Isometry constant delta must be positive, got {delta}.")

    spec = EnsembleSpec.real_wishart(s, m)
    interval = Interval(m * (1 - delta), m * (1 + delta))

    approx = psi_approx(spec, interval) if m > s else None

    return IsometryProbability(
        s=s,
        m=m,
        delta=delta,
        interval=interval,
        exact=psi(spec, interval, options),
        approx=approx,
    )
