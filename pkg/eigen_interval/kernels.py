"""Kernel matrices whose (square-root) determinant gives psi(a, b).

Real ensembles produce a skew-symmetric `SkewKernel` with
psi = K' * sqrt(det A); complex ensembles produce a `DetKernel` with
psi = K * det A. Builders take the interval already clipped to the ensemble
support, so `lo` and `hi` may be infinite only where the support is.
"""

from dataclasses import dataclass
from functools import cache
import logging
from typing import Any, Sequence

import gmpy2

from .exceptions import InternalConsistencyError
from .hp_math import BigReal, HighPrecision, LogScaled, Real

__all__ = [
    "Matrix",
    "SkewKernel",
    "DetKernel",
    "log_det",
    "log_pfaffian",
    "log_sqrt_det_skew",
    "log_det_kernel",
    "log_multigamma",
    "gaussian_moment",
    "real_wishart_kernel",
    "goe_kernel",
    "real_beta_kernel",
    "complex_wishart_white_kernel",
    "complex_wishart_correlated_kernel",
    "complex_wishart_spiked_kernel",
    "complex_beta_kernel",
    "gue_kernel",
]


logger = logging.getLogger(__name__)

Matrix = list[list[BigReal]]

# a negative determinant this many bits below the Hadamard bound is rounding noise
NOISE_MARGIN_BITS = 16


@dataclass(frozen=True, eq=False)
class SkewKernel:
    entries: Matrix
    log_const: LogScaled
    precision: HighPrecision

    def __post_init__(self):
        if self.dim % 2:
            raise InternalConsistencyError(
                f"Skew kernel must have even dimension, got {self.dim}."
            )

    @property
    def dim(self) -> int:
        return len(self.entries)

    def is_skew_symmetric(self) -> bool:
        return all(
            self.entries[i][j] == -self.entries[j][i]
            for i in range(self.dim)
            for j in range(i, self.dim)
        )

    def psi(self) -> LogScaled:
        return self.log_const * log_sqrt_det_skew(self)


@dataclass(frozen=True, eq=False)
class DetKernel:
    entries: Matrix
    log_const: LogScaled
    precision: HighPrecision

    @property
    def dim(self) -> int:
        return len(self.entries)

    def psi(self) -> LogScaled:
        return self.log_const * log_det_kernel(self)


def log_det(precision: HighPrecision, matrix: Sequence[Sequence[BigReal]]) -> LogScaled:
    """Sign and log-magnitude of det(matrix) by partially pivoted elimination."""

    with precision.mpfr_context():
        rows = [[precision.to_mpfr(x) for x in row] for row in matrix]
        n = len(rows)

        sign = 1
        log_abs = gmpy2.mpfr(0)

        for k in range(n):
            pivot_row = max(range(k, n), key=lambda r: abs(rows[r][k]))
            pivot = rows[pivot_row][k]

            if pivot == 0:
                return LogScaled.zero()

            if pivot_row != k:
                rows[k], rows[pivot_row] = rows[pivot_row], rows[k]
                sign = -sign
            if pivot < 0:
                sign = -sign

            log_abs += gmpy2.log(abs(pivot))

            tail = rows[k][k + 1 :]
            for r in range(k + 1, n):
                row = rows[r]
                factor = -row[k] / pivot
                if factor:
                    row[k + 1 :] = [
                        gmpy2.fma(factor, y, x) for x, y in zip(row[k + 1 :], tail)
                    ]

        return LogScaled(precision.from_mpfr(log_abs), sign)


def _swap_index(rows: list[list[Any]], i: int, j: int, start: int):
    """Swap rows and columns i and j of a square matrix, columns from `start` on."""

    rows[i], rows[j] = rows[j], rows[i]
    for row in rows[start:]:
        row[i], row[j] = row[j], row[i]


def log_pfaffian(
    precision: HighPrecision, matrix: Sequence[Sequence[BigReal]]
) -> LogScaled:
    """Sign and log-magnitude of Pf(matrix) by the Parlett-Reid reduction.

    Each step eliminates a pair of rows with one rank-2 update of the trailing
    block; only its upper triangle is computed and mirrored.
    """

    with precision.mpfr_context():
        rows = [[precision.to_mpfr(x) for x in row] for row in matrix]
        n = len(rows)

        if n % 2:
            return LogScaled.zero()

        sign = 1
        log_abs = gmpy2.mpfr(0)

        for k in range(0, n - 1, 2):
            head = rows[k]
            pivot_index = max(range(k + 1, n), key=lambda j: abs(head[j]))

            if pivot_index != k + 1:
                _swap_index(rows, k + 1, pivot_index, k)
                sign = -sign

            head = rows[k]
            pivot = head[k + 1]

            if pivot == 0:
                return LogScaled.zero()
            if pivot < 0:
                sign = -sign

            log_abs += gmpy2.log(abs(pivot))

            if k + 2 == n:
                break

            tau = [x / pivot for x in head[k + 2 :]]
            u = rows[k + 1][k + 2 :]

            for offset in range(len(tau) - 1):
                i = k + 2 + offset
                row = rows[i]
                tau_i, u_i = tau[offset], u[offset]

                updated = [
                    gmpy2.fma(u_i, t, gmpy2.fma(-tau_i, w, x))
                    for x, t, w in zip(row[i + 1 :], tau[offset + 1 :], u[offset + 1 :])
                ]
                row[i + 1 :] = updated

                for j, value in enumerate(updated, i + 1):
                    rows[j][i] = -value

        return LogScaled(precision.from_mpfr(log_abs), sign)


def _log_hadamard_bound(precision: HighPrecision, matrix: Matrix) -> BigReal:
    ctx = precision.ctx
    total = precision.zero

    for row in matrix:
        norm2 = ctx.fsum(row, squared=True)
        if norm2:
            total += ctx.log(norm2) / 2

    return total


def _nonnegative(precision: HighPrecision, det: LogScaled, matrix: Matrix) -> LogScaled:
    """Clamp a rounding-level negative determinant to zero, reject real ones."""

    if det.sign >= 0:
        return det

    floor = _log_hadamard_bound(precision, matrix) - (
        precision.precision_bits - NOISE_MARGIN_BITS
    ) * precision.ln2

    if det.log_magnitude <= floor:
        logger.debug(
            "Negative determinant below the noise floor at %d bits, treated as 0.",
            precision.precision_bits,
        )
        return LogScaled.zero()

    raise InternalConsistencyError(
        f"Kernel determinant is negative (log|det| = {float(det.log_magnitude):.6g}) "
        f"above the noise floor at {precision.precision_bits} bits."
    )


def log_sqrt_det_skew(kernel: SkewKernel) -> LogScaled:
    """Half the log-determinant of a skew-symmetric kernel, i.e. log |Pf|.

    det = Pf² is nonnegative by construction, so the sign of Pf is dropped.
    """

    pfaffian = log_pfaffian(kernel.precision, kernel.entries)
    if pfaffian.is_zero:
        return pfaffian
    return LogScaled(pfaffian.log_magnitude)


def log_det_kernel(kernel: DetKernel) -> LogScaled:
    det = log_det(kernel.precision, kernel.entries)
    return _nonnegative(kernel.precision, det, kernel.entries)


def _zeros(dim: int, precision: HighPrecision) -> Matrix:
    return [[precision.zero] * dim for _ in range(dim)]


def _antisymmetrize(matrix: Matrix) -> Matrix:
    for i in range(len(matrix)):
        for j in range(i + 1, len(matrix)):
            matrix[j][i] = -matrix[i][j]
    return matrix


def _padded_dim(p: int) -> int:
    return p + p % 2


def log_multigamma(precision: HighPrecision, p: int, a: Real) -> BigReal:
    """ln Γ_p(a) = p(p-1)/4 ln π + Σ_{i=1}^p ln Γ(a - (i-1)/2)."""

    a = precision.mpf(a)
    total = precision.mpf(p * (p - 1)) / 4 * precision.log(precision.pi)

    for i in range(1, p + 1):
        total += precision.log_gamma(a - precision.mpf(i - 1) / 2)

    return total


def gaussian_moment(precision: HighPrecision, k: int, x: Real, y: Real) -> BigReal:
    """(1/Γ(k/2)) ∫_x^y t^(k-1) e^(-t²) dt for integer k >= 1 and x <= y.

    One-signed ranges map onto a single P(k/2; ., .); ranges straddling zero
    are split there.
    """

    x, y = precision.mpf(x), precision.mpf(y)
    half_k = precision.mpf(k) / 2
    odd = -1 if (k - 1) % 2 else 1

    if x >= 0:
        return precision.reg_gamma_interval(half_k, x * x, y * y) / 2
    if y <= 0:
        return odd * precision.reg_gamma_interval(half_k, y * y, x * x) / 2

    upper = precision.reg_lower_gamma(half_k, y * y)
    lower = precision.reg_lower_gamma(half_k, x * x)
    return (upper + odd * lower) / 2


def real_wishart_kernel(
    precision: HighPrecision, p: int, m: int, lo: Real, hi: Real
) -> SkewKernel:
    """Skew kernel of the real white Wishart W_p(m, I)."""

    hp = precision
    ctx = hp.ctx

    a, b = hp.mpf(lo), hp.mpf(hi)
    a_half, b_half = a / 2, b / 2

    alpha = hp.mpf(m - p - 1) / 2
    alphas = [alpha + l for l in range(p + 1)]
    log_gamma = [ctx.loggamma(x) if x > 0 else None for x in alphas]
    log_gamma_next = [ctx.loggamma(x + 1) for x in alphas]

    @cache
    def pair_term(k: int) -> BigReal:
        # Γ(α_i+α_j) 2^(1-α_i-α_j) P(α_i+α_j; a, b) only depends on i + j
        shape = alpha * 2 + k
        weight = ctx.exp(ctx.loggamma(shape) + (1 - shape) * hp.ln2)
        return weight * hp.reg_gamma_interval(shape, a, b)

    @cache
    def half_mass(i: int) -> BigReal:
        return hp.reg_gamma_interval(alphas[i], a_half, b_half)

    def weight(j: int, x: BigReal) -> BigReal:
        # g(α_j, x) / Γ(α_j + 1)
        if x == 0 or hp.is_inf(x):
            return hp.zero
        return ctx.exp(alphas[j] * ctx.log(x) - x - log_gamma_next[j])

    boundary = [hp.zero] + [weight(j, a_half) + weight(j, b_half) for j in range(1, p + 1)]
    inverse_gamma_next = [ctx.exp(-x) for x in log_gamma_next]

    dim = _padded_dim(p)
    A = _zeros(dim, hp)

    for i in range(1, p):
        row = A[i - 1]
        inverse_gamma = ctx.exp(-log_gamma[i])
        drift = half_mass(i)
        for j in range(i, p):
            coefficient = inverse_gamma * inverse_gamma_next[j]
            row[j] = row[j - 1] + coefficient * pair_term(i + j) - boundary[j] * drift

    if p % 2:
        for i in range(1, p + 1):
            A[i - 1][p] = half_mass(i)

    log_k = (
        hp.mpf(p * p) / 2 * hp.log(hp.pi)
        - hp.mpf(p * m) / 2 * hp.ln2
        - log_multigamma(hp, p, hp.mpf(m) / 2)
        - log_multigamma(hp, p, hp.mpf(p) / 2)
    )
    log_const = (
        log_k
        + (alpha * p + hp.mpf(p * (p + 1)) / 2) * hp.ln2
        + ctx.fsum(log_gamma[1:])
    )

    return SkewKernel(_antisymmetrize(A), LogScaled(log_const), hp)


def goe_kernel(precision: HighPrecision, n: int, lo: Real, hi: Real) -> SkewKernel:
    """Skew kernel of the n×n GOE (diagonal variance 1, off-diagonal 1/2)."""

    hp = precision
    ctx = hp.ctx

    a, b = hp.mpf(lo), hp.mpf(hi)
    root2 = ctx.sqrt(2)
    a_scaled, b_scaled = a / root2, b / root2

    @cache
    def pair_term(k: int) -> BigReal:
        # Γ(k/2) 2^(-k/2) F_k(a, b) with unscaled endpoints
        half_k = hp.mpf(k) / 2
        weight = ctx.exp(ctx.loggamma(half_k) - half_k * hp.ln2)
        return weight * gaussian_moment(hp, k, a, b)

    @cache
    def scaled_mass(k: int) -> BigReal:
        return gaussian_moment(hp, k, a_scaled, b_scaled)

    @cache
    def inverse_gamma_half(i: int) -> BigReal:
        return ctx.exp(-ctx.loggamma(hp.mpf(i) / 2))

    @cache
    def inverse_gamma_next(j: int) -> BigReal:
        return ctx.exp(-ctx.loggamma(hp.mpf(j) / 2 + 1))

    def q(j: int, x: BigReal) -> BigReal:
        if x == 0 or hp.is_inf(x):
            return hp.zero
        magnitude = ctx.exp(j * ctx.log(abs(x)) - x * x)
        return -magnitude if x < 0 and j % 2 else magnitude

    @cache
    def boundary(j: int) -> BigReal:
        return (q(j, a_scaled) + q(j, b_scaled)) * inverse_gamma_next(j) / 2

    def step(i: int, j: int, a_ij: BigReal) -> BigReal:
        """a_{i,j+2} from a_{i,j}."""

        coefficient = inverse_gamma_half(i) * inverse_gamma_next(j)
        return a_ij + coefficient * pair_term(i + j) - boundary(j) * scaled_mass(i)

    dim = _padded_dim(n)
    A = _zeros(dim, hp)

    if n >= 2:
        exp_sum = ctx.exp(-a * a / 2) + ctx.exp(-b * b / 2)
        A[0][1] = hp.erf_diff(a, b) / (2 * root2) - exp_sum * hp.erf_diff(
            a_scaled, b_scaled
        ) / 4

    for i in range(1, n - 1):
        row = A[i - 1]
        for j in range(i, n - 1):
            row[j + 1] = step(i, j, row[j - 1])

        # zig-zag: a_{i+1,i} = -a_{i,i+1} seeds a_{i+1,i+2}
        A[i][i + 1] = step(i + 1, i, -A[i - 1][i])

    if n % 2:
        for i in range(1, n + 1):
            A[i - 1][n] = scaled_mass(i)

    log_const = hp.mpf(n * (n - 1)) / 4 * hp.ln2

    return SkewKernel(_antisymmetrize(A), LogScaled(log_const), hp)


def real_beta_kernel(
    precision: HighPrecision, s: int, m: Real, n_beta: Real, lo: Real, hi: Real
) -> SkewKernel:
    """Skew kernel of the real multivariate beta density x^m (1-x)^n_beta."""

    hp = precision
    ctx = hp.ctx

    a, b = hp.mpf(lo), hp.mpf(hi)
    m, n = hp.mpf(m), hp.mpf(n_beta)

    log_k = [None] + [
        ctx.loggamma(m + n + l + 1) - ctx.loggamma(m + l) for l in range(1, s + 1)
    ]
    k = [None] + [ctx.exp(x) for x in log_k[1:]]

    @cache
    def row_mass(i: int) -> BigReal:
        return hp.inc_beta(a, b, m + i, n + 1)

    @cache
    def pair_mass(t: int) -> BigReal:
        return hp.inc_beta(a, b, 2 * m + t, 2 * n + 2)

    def g(l: int, x: BigReal) -> BigReal:
        # x^(m+l-1) (1-x)^(n+1) k_l / (m+n+l), zero at both ends for l >= 2
        if x == 0 or x == 1:
            return hp.zero
        return ctx.exp(
            (m + l - 1) * ctx.log(x) + (n + 1) * ctx.log(1 - x) + log_k[l]
        ) / (m + n + l)

    edge = [None, None] + [g(l, a) + g(l, b) for l in range(2, s + 1)]
    pair_weight = [None] + [2 * k[l + 1] / (m + n + l + 1) for l in range(1, s)]

    dim = _padded_dim(s)
    A = _zeros(dim, hp)

    for i in range(1, s):
        row = A[i - 1]
        for j in range(i, s):
            row[j] = row[j - 1] + k[i] * (
                pair_weight[j] * pair_mass(i + j) - edge[j + 1] * row_mass(i)
            )

    if s % 2:
        for i in range(1, s + 1):
            A[i - 1][s] = k[i] * row_mass(i)

    log_const = hp.mpf(s) / 2 * hp.log(hp.pi)
    for i in range(1, s + 1):
        log_const += (
            ctx.loggamma((i + 2 * m + 2 * n + s + 2) / 2)
            - ctx.loggamma(hp.mpf(i) / 2)
            - ctx.loggamma((i + 2 * m + 1) / 2)
            - ctx.loggamma((i + 2 * n + 1) / 2)
            - log_k[i]
        )

    return SkewKernel(_antisymmetrize(A), LogScaled(log_const), hp)


def complex_wishart_white_kernel(
    precision: HighPrecision, p: int, m: int, lo: Real, hi: Real
) -> DetKernel:
    hp = precision
    a, b = hp.mpf(lo), hp.mpf(hi)

    @cache
    def entry(order: int) -> BigReal:
        return hp.lower_gamma_interval(order, a, b)

    A = [[entry(m + p - i - j + 1) for j in range(1, p + 1)] for i in range(1, p + 1)]

    log_const = -hp.ctx.fsum(
        hp.log_gamma(m - i + 1) + hp.log_gamma(p - i + 1) for i in range(1, p + 1)
    )

    return DetKernel(A, LogScaled(log_const), hp)


def complex_wishart_correlated_kernel(
    precision: HighPrecision, m: int, sigma: Sequence[float], lo: Real, hi: Real
) -> DetKernel:
    """Kernel of CW_p(m, Σ) for a covariance with distinct eigenvalues `sigma`."""

    hp = precision
    a, b = hp.mpf(lo), hp.mpf(hi)
    sigma = [hp.mpf(s) for s in sigma]
    p = len(sigma)

    A = [
        [hp.lower_gamma_interval(m - i + 1, a, b, sigma[j]) for j in range(p)]
        for i in range(1, p + 1)
    ]

    log_inverse = hp.zero
    for i in range(p):
        for j in range(i + 1, p):
            log_inverse += hp.log(sigma[i] - sigma[j])
    for i in range(1, p + 1):
        log_inverse += (m - p + 1) * hp.log(sigma[i - 1]) + hp.log_gamma(m - i + 1)

    return DetKernel(A, LogScaled(-log_inverse), hp)


def complex_wishart_spiked_kernel(
    precision: HighPrecision,
    p: int,
    m: int,
    sigma1: float,
    sigma2: float,
    lo: Real,
    hi: Real,
) -> DetKernel:
    """Kernel of CW_p(m, Σ) with Σ = diag(σ1, σ2, ..., σ2), σ1 > σ2."""

    hp = precision
    a, b = hp.mpf(lo), hp.mpf(hi)
    s1, s2 = hp.mpf(sigma1), hp.mpf(sigma2)

    @cache
    def bulk(order: int) -> BigReal:
        return hp.lower_gamma_interval(order, a, b, s2)

    A = [
        [hp.lower_gamma_interval(m - i + 1, a, b, s1)]
        + [bulk(m + p - i - j + 1) for j in range(2, p + 1)]
        for i in range(1, p + 1)
    ]

    log_inverse = (
        (m - p + 1) * hp.log(s1)
        + (m - 1) * (p - 1) * hp.log(s2)
        + (p - 1) * hp.log(s1 - s2)
    )
    for i in range(1, p + 1):
        log_inverse += hp.log_gamma(m - i + 1)
    for l in range(2, p - 1):
        log_inverse += hp.log_gamma(l + 1)

    return DetKernel(A, LogScaled(-log_inverse), hp)


def complex_beta_kernel(
    precision: HighPrecision, s: int, m: Real, n_beta: Real, lo: Real, hi: Real
) -> DetKernel:
    hp = precision
    ctx = hp.ctx
    a, b = hp.mpf(lo), hp.mpf(hi)
    m, n = hp.mpf(m), hp.mpf(n_beta)

    @cache
    def entry(t: int) -> BigReal:
        return hp.inc_beta(a, b, m + t - 1, n + 1)

    A = [[entry(i + j) for j in range(1, s + 1)] for i in range(1, s + 1)]

    log_const = ctx.fsum(
        ctx.loggamma(m + n + s + i)
        - ctx.loggamma(i)
        - ctx.loggamma(i + m)
        - ctx.loggamma(i + n)
        for i in range(1, s + 1)
    )

    return DetKernel(A, LogScaled(log_const), hp)


def gue_kernel(precision: HighPrecision, n: int, lo: Real, hi: Real) -> DetKernel:
    """Kernel of the n×n GUE with joint density ∝ exp(-Σ x_i²)."""

    hp = precision
    a, b = hp.mpf(lo), hp.mpf(hi)

    @cache
    def entry(k: int) -> BigReal:
        # ∫_a^b t^(k-1) e^(-t²) dt
        return hp.exp(hp.log_gamma(hp.mpf(k) / 2)) * gaussian_moment(hp, k, a, b)

    A = [[entry(i + j - 1) for j in range(1, n + 1)] for i in range(1, n + 1)]

    log_const = (
        hp.mpf(n * (n - 1)) / 2 * hp.ln2
        - hp.mpf(n) / 2 * hp.log(hp.pi)
        - hp.ctx.fsum(hp.log_gamma(i) for i in range(1, n + 1))
    )

    return DetKernel(A, LogScaled(log_const), hp)
