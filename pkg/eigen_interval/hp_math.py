"""Arbitrary-precision scalars and the special functions the psi formulas use.

Values are mpmath ``mpf`` numbers created by a `HighPrecision` instance. Each
instance owns a private mpmath context, so evaluations at different working
precisions never touch the global ``mpmath.mp`` nor each other. A context
belongs to one evaluation at a time; do not share it between threads that
compute concurrently.

Dense linear algebra runs on MPFR numbers from ``gmpy2`` at the same
precision; `HighPrecision.mpfr_context` and the conversion helpers move values
between the two representations without rounding.
"""

from contextlib import contextmanager
from dataclasses import dataclass, field
import math
from typing import Any, Iterator, TypeAlias

import gmpy2
from mpmath import MPContext, mpf
from mpmath.libmp.libmpf import to_man_exp

from .exceptions import PsiConvergenceError, PsiDomainError

__all__ = [
    "BigReal",
    "Real",
    "MIN_PRECISION",
    "DEFAULT_PRECISION",
    "HighPrecision",
    "LogScaled",
]


BigReal: TypeAlias = mpf
Real: TypeAlias = "BigReal | float | int"

MIN_PRECISION = 64
DEFAULT_PRECISION = 256

# relative width under which P(a;x,y) is integrated directly
SHORT_INTERVAL = 1e-3


@dataclass(frozen=True)
class HighPrecision:
    """Factory and special-function toolbox at a fixed working precision."""

    precision_bits: int = DEFAULT_PRECISION
    ctx: MPContext = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.precision_bits < MIN_PRECISION:
            raise PsiDomainError(
                f"Working precision must be at least {MIN_PRECISION} bits, "
                f"got {self.precision_bits}."
            )

        ctx = MPContext()
        ctx.prec = self.precision_bits
        object.__setattr__(self, "ctx", ctx)

    @property
    def eps(self) -> BigReal:
        """Relative stopping threshold of the series, 2^(8 - precision)."""
        return self.ctx.ldexp(self.ctx.one, 8 - self.precision_bits)

    @property
    def inf(self) -> BigReal:
        return self.ctx.inf

    @property
    def zero(self) -> BigReal:
        return self.ctx.zero

    @property
    def one(self) -> BigReal:
        return self.ctx.one

    def mpf(self, x: Any) -> BigReal:
        return self.ctx.mpf(x)

    def is_inf(self, x: Real) -> bool:
        return self.ctx.isinf(x)

    def exp(self, x: Real) -> BigReal:
        return self.ctx.exp(x)

    def log(self, x: Real) -> BigReal:
        return self.ctx.log(x)

    def sqrt(self, x: Real) -> BigReal:
        return self.ctx.sqrt(x)

    @property
    def pi(self) -> BigReal:
        return +self.ctx.pi

    @property
    def ln2(self) -> BigReal:
        return +self.ctx.ln2

    # MPFR interop

    @contextmanager
    def mpfr_context(self) -> Iterator[None]:
        """Run gmpy2 arithmetic of the current thread at this precision."""

        context = gmpy2.get_context()
        saved = context.precision
        context.precision = self.precision_bits
        try:
            yield
        finally:
            context.precision = saved

    def to_mpfr(self, x: Real) -> "gmpy2.mpfr":
        """Exact copy of `x` as an MPFR number; call inside `mpfr_context`."""

        man, exp = to_man_exp(self.mpf(x)._mpf_)
        return gmpy2.mul_2exp(gmpy2.mpfr(man), int(exp))

    def from_mpfr(self, x: "gmpy2.mpfr") -> BigReal:
        man, exp = x.as_mantissa_exp()
        return self.ctx.ldexp(self.ctx.mpf(int(man)), int(exp))

    def _max_iterations(self) -> int:
        return 10 * self.precision_bits + 1000

    # Gamma family

    def log_gamma(self, a: Real) -> BigReal:
        """ln Γ(a) for a > 0."""

        a = self.mpf(a)
        if not a > 0 or self.is_inf(a):
            raise PsiDomainError(f"log_gamma requires a finite a > 0, got {a}.")

        return self.ctx.loggamma(a)

    def _check_gamma_args(self, a: Real, x: Real) -> tuple[BigReal, BigReal]:
        a, x = self.mpf(a), self.mpf(x)

        if not a > 0 or self.is_inf(a):
            raise PsiDomainError(f"Incomplete gamma requires a finite a > 0, got {a}.")
        if not x >= 0:
            raise PsiDomainError(f"Incomplete gamma requires x >= 0, got {x}.")

        return a, x

    def _gamma_prefactor(self, a: BigReal, x: BigReal) -> BigReal:
        """x^a e^{-x} / Γ(a), formed in the log domain."""
        return self.ctx.exp(a * self.ctx.log(x) - x - self.ctx.loggamma(a))

    def _gamma_series(self, a: BigReal, x: BigReal) -> BigReal:
        eps = self.eps
        denom = a
        term = total = 1 / a

        for _ in range(self._max_iterations()):
            denom += 1
            term *= x / denom
            total += term
            if abs(term) < abs(total) * eps:
                return total * self._gamma_prefactor(a, x)

        raise PsiConvergenceError(
            f"Gamma series for P({a}, {x}) did not converge at "
            f"{self.precision_bits} bits."
        )

    def _gamma_fraction(self, a: BigReal, x: BigReal) -> BigReal:
        """Q(a,x) by the modified Lentz evaluation of the Legendre fraction."""

        ctx = self.ctx
        eps = self.eps
        tiny = ctx.ldexp(ctx.one, -4 * self.precision_bits)

        b = x + 1 - a
        c = 1 / tiny
        d = 1 / b
        h = d

        for i in range(1, self._max_iterations()):
            an = -i * (i - a)
            b += 2
            d = an * d + b
            if abs(d) < tiny:
                d = tiny
            c = b + an / c
            if abs(c) < tiny:
                c = tiny
            d = 1 / d
            delta = d * c
            h *= delta
            if abs(delta - 1) < eps:
                return h * self._gamma_prefactor(a, x)

        raise PsiConvergenceError(
            f"Gamma continued fraction for Q({a}, {x}) did not converge at "
            f"{self.precision_bits} bits."
        )

    def reg_lower_gamma(self, a: Real, x: Real) -> BigReal:
        """Regularized lower incomplete gamma P(a, x), with P(a, +inf) = 1."""

        a, x = self._check_gamma_args(a, x)

        if x == 0:
            return self.zero
        if self.is_inf(x):
            return self.one
        if x < a + 1:
            return self._gamma_series(a, x)

        return 1 - self._gamma_fraction(a, x)

    def reg_upper_gamma(self, a: Real, x: Real) -> BigReal:
        """Q(a, x) = 1 - P(a, x) without cancellation in the upper tail."""

        a, x = self._check_gamma_args(a, x)

        if x == 0:
            return self.one
        if self.is_inf(x):
            return self.zero
        if x < a + 1:
            return 1 - self._gamma_series(a, x)

        return self._gamma_fraction(a, x)

    def reg_gamma_interval(self, a: Real, x: Real, y: Real) -> BigReal:
        """P(a; x, y) = P(a, y) - P(a, x) for 0 <= x <= y <= +inf."""

        a, x = self._check_gamma_args(a, x)
        y = self.mpf(y)

        if y < x:
            raise PsiDomainError(f"P(a; x, y) requires x <= y, got x={x}, y={y}.")
        if x == y:
            return self.zero
        if self.is_inf(y):
            return self.reg_upper_gamma(a, x)
        if (y - x) / max(x, self.one) < SHORT_INTERVAL:
            return self._gamma_quadrature(a, x, y)
        if x >= a + 1:
            return self._gamma_fraction(a, x) - self._gamma_fraction(a, y)

        return self.reg_lower_gamma(a, y) - self.reg_lower_gamma(a, x)

    def _gamma_quadrature(self, a: BigReal, x: BigReal, y: BigReal) -> BigReal:
        ctx = self.ctx
        log_norm = ctx.loggamma(a)

        def density(t: BigReal) -> BigReal:
            if t == 0:
                return ctx.zero
            return ctx.exp((a - 1) * ctx.log(t) - t - log_norm)

        return ctx.quad(density, [x, y])

    def lower_gamma_interval(
        self, a: Real, x: Real, y: Real, scale: Real = 1
    ) -> BigReal:
        """∫_x^y t^(a-1) e^(-t/scale) dt = scale^a Γ(a) P(a; x/scale, y/scale)."""

        scale = self.mpf(scale)
        if not scale > 0:
            raise PsiDomainError(f"Gamma scale must be positive, got {scale}.")

        log_front = self.log_gamma(a)
        if scale != 1:
            log_front += self.mpf(a) * self.ctx.log(scale)

        return self.ctx.exp(log_front) * self.reg_gamma_interval(
            a, self.mpf(x) / scale, self.mpf(y) / scale
        )

    def gamma_shift(self, a: Real, n: int, x: Real, P_ax: Real) -> BigReal:
        """P(a+n, x) from P(a, x) through the finite-sum recursion.

        Falls back to evaluating P(a+n, x) directly when the subtraction would
        lose relative accuracy.
        """

        a, x = self._check_gamma_args(a, x)
        if n < 0:
            raise PsiDomainError(f"gamma_shift requires n >= 0, got {n}.")

        result = self.mpf(P_ax)
        if n == 0 or x == 0 or self.is_inf(x):
            return result

        ctx = self.ctx
        log_x = ctx.log(x)
        terms = [
            ctx.exp((a + k) * log_x - x - ctx.loggamma(a + k + 1)) for k in range(n)
        ]

        shifted = result - ctx.fsum(terms)

        # more than four bits cancelled: sum the series of P(a+n, x) instead
        if 16 * shifted < result:
            return self.reg_lower_gamma(a + n, x)
        return shifted

    # Beta family

    def inc_beta(self, x: Real, y: Real, a: Real, b: Real) -> BigReal:
        """Unregularized incomplete beta ∫_x^y t^(a-1) (1-t)^(b-1) dt."""

        x, y, a, b = self.mpf(x), self.mpf(y), self.mpf(a), self.mpf(b)

        if not (0 <= x <= y <= 1):
            raise PsiDomainError(
                f"Incomplete beta requires 0 <= x <= y <= 1, got x={x}, y={y}."
            )
        if not (a > 0 and b > 0):
            raise PsiDomainError(
                f"Incomplete beta requires a, b > 0, got a={a}, b={b}."
            )
        if x == y:
            return self.zero

        return self.ctx.betainc(a, b, x, y)

    def beta_shift(self, x: Real, a: Real, b: Real, B_ax: Real) -> BigReal:
        """𝓑(0, x; a+1, b) from 𝓑(0, x; a, b)."""

        x, a, b = self.mpf(x), self.mpf(a), self.mpf(b)

        if not 0 <= x <= 1:
            raise PsiDomainError(f"beta_shift requires 0 <= x <= 1, got {x}.")

        boundary = self.zero if x in (0, 1) else x**a * (1 - x) ** b
        return (a * self.mpf(B_ax) - boundary) / (a + b)

    # Error function

    def erf_erfc(self, x: Real) -> tuple[BigReal, BigReal]:
        x = self.mpf(x)
        if self.is_inf(x) or self.ctx.isnan(x):
            raise PsiDomainError(f"erf_erfc requires a finite x, got {x}.")

        return self.ctx.erf(x), self.ctx.erfc(x)

    def erf_diff(self, x: Real, y: Real) -> BigReal:
        """erf(y) - erf(x), using erfc on one-signed ranges; endpoints may be infinite."""

        ctx = self.ctx
        x, y = self.mpf(x), self.mpf(y)

        if x >= 0:
            return ctx.erfc(x) - ctx.erfc(y)
        if y <= 0:
            return ctx.erfc(-y) - ctx.erfc(-x)

        return ctx.erf(y) - ctx.erf(x)


@dataclass(frozen=True)
class LogScaled:
    """A real number stored as sign and natural-log magnitude."""

    log_magnitude: BigReal
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"Invalid sign {self.sign}.")

    @classmethod
    def zero(cls) -> "LogScaled":
        return cls(mpf("-inf"), 0)

    @classmethod
    def one(cls) -> "LogScaled":
        return cls(mpf(0), 1)

    @classmethod
    def from_log(cls, log_magnitude: BigReal, sign: int = 1) -> "LogScaled":
        return cls(log_magnitude, sign) if sign else cls.zero()

    @classmethod
    def from_value(cls, precision: HighPrecision, x: Real) -> "LogScaled":
        x = precision.mpf(x)
        if x == 0:
            return cls.zero()
        return cls(precision.log(abs(x)), 1 if x > 0 else -1)

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def __mul__(self, other: "LogScaled") -> "LogScaled":
        if self.is_zero or other.is_zero:
            return LogScaled.zero()
        return LogScaled(
            self.log_magnitude + other.log_magnitude, self.sign * other.sign
        )

    def __truediv__(self, other: "LogScaled") -> "LogScaled":
        if other.is_zero:
            raise ZeroDivisionError("Division by a zero LogScaled value.")
        if self.is_zero:
            return LogScaled.zero()
        return LogScaled(
            self.log_magnitude - other.log_magnitude, self.sign * other.sign
        )

    def sqrt(self) -> "LogScaled":
        if self.sign < 0:
            raise ValueError("Square root of a negative LogScaled value.")
        if self.is_zero:
            return LogScaled.zero()
        return LogScaled(self.log_magnitude / 2, 1)

    def value(self, precision: HighPrecision) -> BigReal:
        if self.is_zero:
            return precision.zero
        return self.sign * precision.exp(self.log_magnitude)

    def to_float(self) -> float:
        """Value as a double; underflows to 0.0 and overflows to inf."""

        if self.is_zero:
            return 0.0

        log_magnitude = float(self.log_magnitude)
        if log_magnitude > 709.78:
            return self.sign * math.inf

        return self.sign * math.exp(log_magnitude)

    def log10(self) -> float:
        if self.is_zero:
            return -math.inf
        return float(self.log_magnitude) / math.log(10)
