"""Monte Carlo oracle: eigenvalues of sampled matrices.

Draws are split into shards of `SamplingOptions.shard_size`. Shard `k` uses
its own generator seeded from ``SeedSequence(seed, spawn_key=(k,))``, and
shard results are merged in shard order, so a run only depends on
``(spec, count, seed, shard_size)``, never on the number of workers.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import logging
import math
from typing import Callable, Iterator, TypeVar

import numpy as np
from numpy.random import PCG64, Generator, SeedSequence
from scipy import linalg

from .ensembles import EnsembleKind, EnsembleSpec, Interval, beta_dims_from_params, support
from .exceptions import PsiDomainError
from .options import SamplingOptions, sampling_options

__all__ = [
    "SampleBatch",
    "McEstimate",
    "MIN_TRIALS",
    "sample",
    "mc_psi",
]


logger = logging.getLogger(__name__)

T = TypeVar("T")

MIN_TRIALS = 100
MAX_SEED = 2**64


@dataclass(frozen=True)
class SampleBatch:
    """Sorted eigenvalues of `count` independent draws, one row per draw."""

    eigenvalue_sets: np.ndarray
    seed: int

    @property
    def count(self) -> int:
        return len(self.eigenvalue_sets)

    @property
    def largest(self) -> np.ndarray:
        return self.eigenvalue_sets[:, -1]

    @property
    def smallest(self) -> np.ndarray:
        return self.eigenvalue_sets[:, 0]


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    std_err: float
    count: int
    seed: int

    def z_score(self, exact: float) -> float:
        """Distance of `exact` from the estimate in standard errors."""

        if self.std_err == 0:
            return 0.0 if exact == self.estimate else math.copysign(math.inf, exact - self.estimate)
        return (exact - self.estimate) / self.std_err


def _complex_normal(rng: Generator, shape: tuple[int, ...]) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _wishart(rng: Generator, count: int, p: int, m: int, sigma=None, complex=False):
    if complex:
        x = _complex_normal(rng, (count, p, m))
    else:
        x = rng.standard_normal((count, p, m))

    if sigma is not None:
        x = np.sqrt(np.asarray(sigma, dtype=float))[None, :, None] * x

    return x @ np.conj(np.swapaxes(x, -1, -2))


def _gaussian(rng: Generator, count: int, n: int, complex=False) -> np.ndarray:
    if complex:
        g = _complex_normal(rng, (count, n, n))
    else:
        g = rng.standard_normal((count, n, n))
    return (g + np.conj(np.swapaxes(g, -1, -2))) / 2


def _beta(rng: Generator, count: int, spec: EnsembleSpec) -> np.ndarray:
    complex = spec.kind is EnsembleKind.ComplexBeta
    s, m_hat, n_hat = beta_dims_from_params(spec.p, spec.m, spec.n_beta, complex)

    a = _wishart(rng, count, s, m_hat, complex=complex)
    b = _wishart(rng, count, s, n_hat, complex=complex)

    return np.stack(
        [linalg.eigh(b[k], a[k] + b[k], eigvals_only=True) for k in range(count)]
    )


def _draw(spec: EnsembleSpec, rng: Generator, count: int) -> np.ndarray:
    match spec.kind:
        case EnsembleKind.RealWishart:
            matrices = _wishart(rng, count, spec.p, int(spec.m))
        case EnsembleKind.GOE:
            matrices = _gaussian(rng, count, spec.p)
        case EnsembleKind.GUE:
            matrices = _gaussian(rng, count, spec.p, complex=True)
        case (
            EnsembleKind.ComplexWishartWhite
            | EnsembleKind.ComplexWishartCorrelated
            | EnsembleKind.ComplexWishartSpiked
        ):
            matrices = _wishart(
                rng, count, spec.p, int(spec.m), spec.covariance, complex=True
            )
        case EnsembleKind.RealBeta | EnsembleKind.ComplexBeta:
            return _beta(rng, count, spec)

    return np.linalg.eigvalsh(matrices)


def _shards(count: int, shard_size: int) -> Iterator[tuple[int, int]]:
    for index, start in enumerate(range(0, count, shard_size)):
        yield index, min(shard_size, count - start)


def _check_request(spec: EnsembleSpec, count: int, seed: int):
    if count < 1:
        raise PsiDomainError(f"Sample count must be positive, got {count}.")
    if not 0 <= seed < MAX_SEED:
        raise PsiDomainError(f"Seed must be an unsigned 64-bit integer, got {seed}.")

    if spec.kind.is_beta:
        # fail before any worker starts
        beta_dims_from_params(
            spec.p, spec.m, spec.n_beta, spec.kind is EnsembleKind.ComplexBeta
        )


def _map_shards(
    spec: EnsembleSpec,
    count: int,
    seed: int,
    options: SamplingOptions,
    reduce: Callable[[np.ndarray], T],
) -> list[T]:
    bounds = support(spec)

    def run(shard: tuple[int, int]) -> T:
        index, size = shard
        rng = Generator(PCG64(SeedSequence(seed, spawn_key=(index,))))
        eigenvalues = np.clip(_draw(spec, rng, size), bounds.lo, bounds.hi)
        return reduce(eigenvalues)

    shards = list(_shards(count, options.shard_size))
    logger.debug(
        "Sampling %d draws of %s in %d shards on %d workers.",
        count,
        spec.kind.value,
        len(shards),
        options.workers,
    )

    if len(shards) == 1 or options.workers == 1:
        return [run(shard) for shard in shards]

    with ThreadPoolExecutor(max_workers=options.workers) as executor:
        return list(executor.map(run, shards))


def sample(
    spec: EnsembleSpec,
    count: int,
    seed: int,
    options: SamplingOptions | None = None,
) -> SampleBatch:
    """Draw `count` matrices of `spec` and return their sorted eigenvalues."""

    _check_request(spec, count, seed)
    options = sampling_options(options)

    parts = _map_shards(spec, count, seed, options, lambda eigenvalues: eigenvalues)
    return SampleBatch(np.concatenate(parts), seed)


def mc_psi(
    spec: EnsembleSpec,
    iv: Interval,
    count: int,
    seed: int,
    options: SamplingOptions | None = None,
) -> McEstimate:
    """Fraction of draws with every eigenvalue in `iv`, with its standard error."""

    if count < MIN_TRIALS:
        raise PsiDomainError(
            f"Monte Carlo needs at least {MIN_TRIALS} trials, got {count}."
        )

    _check_request(spec, count, seed)
    options = sampling_options(options)

    def hits(eigenvalues: np.ndarray) -> int:
        inside = (eigenvalues[:, 0] >= iv.lo) & (eigenvalues[:, -1] <= iv.hi)
        return int(np.count_nonzero(inside))

    total = sum(_map_shards(spec, count, seed, options, hits))
    estimate = total / count

    return McEstimate(
        estimate=estimate,
        std_err=math.sqrt(estimate * (1 - estimate) / count),
        count=count,
        seed=seed,
    )
