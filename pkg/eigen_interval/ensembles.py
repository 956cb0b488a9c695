from dataclasses import dataclass
from enum import Enum
import math
from typing import Iterable

from .exceptions import PsiDomainError, UnsupportedSamplingError
from .utils import is_integral, parse_bound

__all__ = [
    "EnsembleKind",
    "EnsembleSpec",
    "Interval",
    "support",
    "beta_params_from_dims",
    "beta_dims_from_params",
]


class EnsembleKind(Enum):
    RealWishart = "real-wishart"
    GOE = "goe"
    RealBeta = "real-beta"
    ComplexWishartWhite = "complex-wishart"
    ComplexWishartCorrelated = "complex-wishart-correlated"
    ComplexWishartSpiked = "complex-wishart-spiked"
    ComplexBeta = "complex-beta"
    GUE = "gue"

    @property
    def is_real(self) -> bool:
        return self in (EnsembleKind.RealWishart, EnsembleKind.GOE, EnsembleKind.RealBeta)

    @property
    def is_wishart(self) -> bool:
        return self in WISHART_KINDS

    @property
    def is_beta(self) -> bool:
        return self in (EnsembleKind.RealBeta, EnsembleKind.ComplexBeta)

    @property
    def is_gaussian(self) -> bool:
        return self in (EnsembleKind.GOE, EnsembleKind.GUE)

    @classmethod
    def parse(cls, name: str) -> "EnsembleKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            choices = ", ".join(kind.value for kind in cls)
            raise PsiDomainError(
                f"Unknown ensemble {name!r}, expected one of {choices}."
            ) from None


WISHART_KINDS = frozenset(
    {
        EnsembleKind.RealWishart,
        EnsembleKind.ComplexWishartWhite,
        EnsembleKind.ComplexWishartCorrelated,
        EnsembleKind.ComplexWishartSpiked,
    }
)


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi]; endpoints may be -inf / +inf."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)

        if math.isnan(lo) or math.isnan(hi):
            raise PsiDomainError("Interval endpoints must not be NaN.")
        if lo > hi:
            raise PsiDomainError(f"Interval requires lo <= hi, got [{lo}, {hi}].")

        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def parse(cls, lo: str | float, hi: str | float) -> "Interval":
        try:
            return cls(parse_bound(lo), parse_bound(hi))
        except ValueError as exc:
            if isinstance(exc, PsiDomainError):
                raise
            raise PsiDomainError(str(exc)) from exc

    @classmethod
    def everything(cls) -> "Interval":
        return cls(-math.inf, math.inf)

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def contains(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def clip(self, bounds: "Interval") -> "Interval":
        """Intersect with `bounds`; disjoint intervals are a domain error."""

        lo, hi = max(self.lo, bounds.lo), min(self.hi, bounds.hi)

        if lo > hi:
            raise PsiDomainError(
                f"Interval [{self.lo}, {self.hi}] lies outside the support "
                f"[{bounds.lo}, {bounds.hi}]."
            )

        return Interval(lo, hi)

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __str__(self) -> str:
        left = "(" if math.isinf(self.lo) else "["
        right = ")" if math.isinf(self.hi) else "]"
        return f"{left}{self.lo}, {self.hi}{right}"


@dataclass(frozen=True, kw_only=True)
class EnsembleSpec:
    """One of the eight supported ensembles with its parameters.

    `p` is the matrix dimension (the number of variates for Wishart kinds, `s`
    for beta kinds, `n` for GOE/GUE). For Wishart kinds `m` is the number of
    degrees of freedom; for beta kinds `m` and `n_beta` are the exponents of
    x^m (1-x)^n_beta in the joint density.
    """

    kind: EnsembleKind
    p: int
    m: float | None = None
    n_beta: float | None = None
    sigma: tuple[float, ...] | None = None
    sigma_pair: tuple[float, float] | None = None

    def __post_init__(self):
        if self.sigma is not None:
            object.__setattr__(self, "sigma", tuple(self.sigma))
        if self.sigma_pair is not None:
            object.__setattr__(self, "sigma_pair", tuple(self.sigma_pair))

        if not (isinstance(self.p, int) and self.p >= 1):
            raise PsiDomainError(f"Dimension must be a positive integer, got {self.p!r}.")

        match self.kind:
            case EnsembleKind.GOE | EnsembleKind.GUE:
                self._forbid("m", "n_beta", "sigma", "sigma_pair")
            case EnsembleKind.RealBeta | EnsembleKind.ComplexBeta:
                self._forbid("sigma", "sigma_pair")
                self._check_beta_exponents()
            case EnsembleKind.RealWishart | EnsembleKind.ComplexWishartWhite:
                self._forbid("n_beta", "sigma", "sigma_pair")
                self._check_degrees_of_freedom()
            case EnsembleKind.ComplexWishartCorrelated:
                self._forbid("n_beta", "sigma_pair")
                self._check_degrees_of_freedom()
                self._check_sigma()
            case EnsembleKind.ComplexWishartSpiked:
                self._forbid("n_beta", "sigma")
                self._check_degrees_of_freedom()
                self._check_sigma_pair()

    def _forbid(self, *names: str):
        for name in names:
            if getattr(self, name) is not None:
                raise PsiDomainError(
                    f"Parameter {name!r} does not apply to {self.kind.value}."
                )

    def _check_degrees_of_freedom(self):
        if self.m is None or not is_integral(self.m):
            raise PsiDomainError(
                f"{self.kind.value} requires an integer number of degrees of "
                f"freedom m, got {self.m!r}."
            )
        object.__setattr__(self, "m", int(self.m))
        if self.m < self.p:
            raise PsiDomainError(
                f"{self.kind.value} requires m >= p, got p={self.p}, m={self.m}."
            )

    def _check_beta_exponents(self):
        for name in ("m", "n_beta"):
            value = getattr(self, name)
            if value is None or not math.isfinite(value) or value <= -1:
                raise PsiDomainError(
                    f"{self.kind.value} requires exponent {name} > -1, got {value!r}."
                )
            object.__setattr__(self, name, float(value))

    def _check_sigma(self):
        sigma = self.sigma
        if sigma is None or len(sigma) != self.p:
            raise PsiDomainError(
                f"Correlated complex Wishart requires {self.p} covariance "
                f"eigenvalues, got {sigma!r}."
            )
        if any(not (math.isfinite(s) and s > 0) for s in sigma):
            raise PsiDomainError(f"Covariance eigenvalues must be positive, got {sigma}.")
        if len(set(sigma)) != len(sigma):
            raise PsiDomainError(
                "Covariance eigenvalues must be distinct; use complex-wishart for "
                "a white covariance or complex-wishart-spiked for a single spike."
            )
        if any(a <= b for a, b in zip(sigma, sigma[1:])):
            raise PsiDomainError(
                f"Covariance eigenvalues must be strictly decreasing, got {sigma}."
            )
        object.__setattr__(self, "sigma", tuple(float(s) for s in sigma))

    def _check_sigma_pair(self):
        if self.p < 2:
            raise PsiDomainError(
                "Spiked complex Wishart requires p >= 2; use complex-wishart-"
                "correlated with a single covariance eigenvalue for p = 1."
            )
        if self.sigma_pair is None or len(self.sigma_pair) != 2:
            raise PsiDomainError("Spiked complex Wishart requires (sigma1, sigma2).")

        sigma1, sigma2 = (float(s) for s in self.sigma_pair)
        if not (math.isfinite(sigma1) and sigma1 > sigma2 > 0):
            raise PsiDomainError(
                f"Spiked complex Wishart requires sigma1 > sigma2 > 0, got "
                f"({sigma1}, {sigma2})."
            )
        object.__setattr__(self, "sigma_pair", (sigma1, sigma2))

    @property
    def dim(self) -> int:
        return self.p

    @property
    def covariance(self) -> tuple[float, ...]:
        """Covariance spectrum of the complex Wishart kinds."""

        match self.kind:
            case EnsembleKind.ComplexWishartCorrelated:
                return self.sigma or ()
            case EnsembleKind.ComplexWishartSpiked:
                sigma1, sigma2 = self.sigma_pair or (1.0, 1.0)
                return (sigma1,) + (sigma2,) * (self.p - 1)
            case _:
                return (1.0,) * self.p

    @classmethod
    def real_wishart(cls, p: int, m: int) -> "EnsembleSpec":
        return cls(kind=EnsembleKind.RealWishart, p=p, m=m)

    @classmethod
    def goe(cls, n: int) -> "EnsembleSpec":
        return cls(kind=EnsembleKind.GOE, p=n)

    @classmethod
    def real_beta(cls, s: int, m: float, n_beta: float) -> "EnsembleSpec":
        return cls(kind=EnsembleKind.RealBeta, p=s, m=m, n_beta=n_beta)

    @classmethod
    def complex_wishart(cls, p: int, m: int) -> "EnsembleSpec":
        return cls(kind=EnsembleKind.ComplexWishartWhite, p=p, m=m)

    @classmethod
    def complex_wishart_correlated(
        cls, m: int, sigma: Iterable[float]
    ) -> "EnsembleSpec":
        sigma = tuple(sigma)
        return cls(
            kind=EnsembleKind.ComplexWishartCorrelated, p=len(sigma), m=m, sigma=sigma
        )

    @classmethod
    def complex_wishart_spiked(
        cls, p: int, m: int, sigma1: float, sigma2: float
    ) -> "EnsembleSpec":
        return cls(
            kind=EnsembleKind.ComplexWishartSpiked,
            p=p,
            m=m,
            sigma_pair=(sigma1, sigma2),
        )

    @classmethod
    def complex_beta(cls, s: int, m: float, n_beta: float) -> "EnsembleSpec":
        return cls(kind=EnsembleKind.ComplexBeta, p=s, m=m, n_beta=n_beta)

    @classmethod
    def gue(cls, n: int) -> "EnsembleSpec":
        return cls(kind=EnsembleKind.GUE, p=n)


def support(spec: EnsembleSpec) -> Interval:
    """Range the eigenvalues of the ensemble live in."""

    if spec.kind.is_wishart:
        return Interval(0.0, math.inf)
    if spec.kind.is_beta:
        return Interval(0.0, 1.0)
    return Interval.everything()


def beta_params_from_dims(p_hat: int, m_hat: int, n_hat: int) -> tuple[int, float, float]:
    """Map double Wishart dimensions to (s, m, n_beta) density exponents.

    `m_hat` and `n_hat` are the degrees of freedom of A = XX^T and B = YY^T; the
    eigenvalues of (A+B)^-1 B then follow x^m (1-x)^n_beta.
    """

    if p_hat < 1 or m_hat < p_hat or n_hat < p_hat:
        raise PsiDomainError(
            f"Double Wishart dimensions require m_hat, n_hat >= p_hat >= 1, got "
            f"p_hat={p_hat}, m_hat={m_hat}, n_hat={n_hat}."
        )

    return p_hat, (n_hat - p_hat - 1) / 2, (m_hat - p_hat - 1) / 2


def beta_dims_from_params(
    s: int, m: float, n_beta: float, complex: bool = False
) -> tuple[int, int, int]:
    """Inverse of `beta_params_from_dims`: (p_hat, m_hat, n_hat) for sampling.

    The complex double Wishart has exponents n_hat - s and m_hat - s instead of
    (n_hat - s - 1)/2 and (m_hat - s - 1)/2.
    """

    if complex:
        n_hat, m_hat = m + s, n_beta + s
    else:
        n_hat, m_hat = 2 * m + s + 1, 2 * n_beta + s + 1

    if not (is_integral(n_hat) and is_integral(m_hat)) or min(n_hat, m_hat) < s:
        kind = "complex" if complex else "real"
        raise UnsupportedSamplingError(
            f"Exponents m={m}, n_beta={n_beta} of the {kind} beta ensemble with "
            f"s={s} do not correspond to integer matrix dimensions."
        )

    return s, int(m_hat), int(n_hat)
