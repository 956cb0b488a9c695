import math

import numpy as np
import pytest
from scipy import stats

from eigen_interval import (
    EnsembleSpec,
    Interval,
    PsiDomainError,
    SamplingOptions,
    UnsupportedSamplingError,
    mc_psi,
    psi,
    sample,
)


def test_same_seed_same_draws(sampling: SamplingOptions):
    spec = EnsembleSpec.goe(3)

    first = sample(spec, 1200, 7, sampling)
    second = sample(spec, 1200, 7, sampling)

    assert first.count == 1200
    assert np.array_equal(first.eigenvalue_sets, second.eigenvalue_sets)
    assert not np.array_equal(first.eigenvalue_sets, sample(spec, 1200, 8, sampling).eigenvalue_sets)


def test_worker_count_does_not_change_draws():
    spec = EnsembleSpec.complex_wishart(3, 5)

    serial = sample(spec, 2000, 11, SamplingOptions(shard_size=300, workers=1))
    threaded = sample(spec, 2000, 11, SamplingOptions(shard_size=300, workers=4))

    assert np.array_equal(serial.eigenvalue_sets, threaded.eigenvalue_sets)


def test_eigenvalues_are_sorted_and_inside_the_support(sampling: SamplingOptions):
    wishart = sample(EnsembleSpec.real_wishart(4, 6), 500, 3, sampling)
    beta = sample(EnsembleSpec.real_beta(3, 0.5, 1), 500, 3, sampling)

    assert wishart.eigenvalue_sets.shape == (500, 4)
    assert np.all(np.diff(wishart.eigenvalue_sets, axis=1) >= 0)
    assert np.all(wishart.smallest >= 0)
    assert np.all((beta.smallest >= 0) & (beta.largest <= 1))


@pytest.mark.parametrize(
    "spec, interval",
    [
        (EnsembleSpec.goe(2), Interval(-math.inf, 0)),
        (EnsembleSpec.goe(4), Interval(-1.5, 2)),
        (EnsembleSpec.real_wishart(2, 2), Interval(0, 2)),
        (EnsembleSpec.real_wishart(3, 6), Interval(0.5, 12)),
        (EnsembleSpec.gue(3), Interval(-2, 1.5)),
        (EnsembleSpec.complex_wishart(2, 3), Interval(0.2, 6)),
        (EnsembleSpec.complex_wishart_correlated(4, [2.5, 1]), Interval(0, 8)),
        (EnsembleSpec.complex_wishart_spiked(3, 4, 3, 1), Interval(0, 10)),
        (EnsembleSpec.real_beta(2, 0.5, 1), Interval(0, 0.5)),
        (EnsembleSpec.complex_beta(2, 1, 2), Interval(0.05, 0.7)),
    ],
    ids=lambda value: getattr(getattr(value, "kind", None), "value", None),
)
def test_monte_carlo_agrees_with_exact(sampling: SamplingOptions, spec, interval):
    estimate = mc_psi(spec, interval, 20_000, 2024, sampling)
    exact = psi(spec, interval).value

    assert estimate.count == 20_000
    assert abs(estimate.z_score(exact)) < 4


def test_goe_edges_mirror_each_other(sampling: SamplingOptions):
    spec = EnsembleSpec.goe(5)

    largest = sample(spec, 5000, 101, sampling).largest
    smallest = sample(spec, 5000, 202, sampling).smallest

    assert stats.ks_2samp(largest, -smallest).pvalue > 0.01


def test_too_few_trials():
    with pytest.raises(PsiDomainError):
        mc_psi(EnsembleSpec.goe(2), Interval(-1, 1), 50, 0)


def test_invalid_seed():
    with pytest.raises(PsiDomainError):
        sample(EnsembleSpec.goe(2), 10, -1)
    with pytest.raises(PsiDomainError):
        sample(EnsembleSpec.goe(2), 10, 2**64)


def test_fractional_beta_dimensions_cannot_be_sampled():
    with pytest.raises(UnsupportedSamplingError):
        mc_psi(EnsembleSpec.real_beta(2, 0.25, 1), Interval(0, 0.5), 1000, 0)


def test_standard_error():
    estimate = mc_psi(EnsembleSpec.goe(1), Interval(-math.inf, 0), 10_000, 5)

    assert estimate.std_err == pytest.approx(
        math.sqrt(estimate.estimate * (1 - estimate.estimate) / 10_000)
    )
    assert estimate.estimate == pytest.approx(0.5, abs=0.02)


def random_case(kind: str, rng: np.random.Generator) -> EnsembleSpec:
    p = int(rng.integers(1, 6))
    extra = int(rng.integers(0, 5))

    match kind:
        case "real-wishart":
            return EnsembleSpec.real_wishart(p, p + extra)
        case "goe":
            return EnsembleSpec.goe(p)
        case "gue":
            return EnsembleSpec.gue(p)
        case "complex-wishart":
            return EnsembleSpec.complex_wishart(p, p + extra)
        case "complex-wishart-correlated":
            gaps = 0.5 + rng.uniform(0, 1.5, p)
            sigma = sorted(np.cumsum(gaps), reverse=True)
            return EnsembleSpec.complex_wishart_correlated(p + extra, sigma)
        case "complex-wishart-spiked":
            return EnsembleSpec.complex_wishart_spiked(
                max(p, 2), max(p, 2) + extra, 1.5 + rng.uniform(0, 3), 1
            )
        case "real-beta":
            s = min(p, 4)
            n_hat, m_hat = s + extra, s + int(rng.integers(0, 5))
            return EnsembleSpec.real_beta(s, (n_hat - s - 1) / 2, (m_hat - s - 1) / 2)
        case "complex-beta":
            return EnsembleSpec.complex_beta(min(p, 4), extra, int(rng.integers(0, 5)))


@pytest.mark.slow
@pytest.mark.parametrize(
    "kind",
    [
        "real-wishart",
        "goe",
        "real-beta",
        "complex-wishart",
        "complex-wishart-correlated",
        "complex-wishart-spiked",
        "complex-beta",
        "gue",
    ],
)
def test_monte_carlo_agrees_on_random_cases(sampling: SamplingOptions, kind):
    rng = np.random.default_rng(sum(map(ord, kind)))
    agreeing = 0

    for case in range(20):
        spec = random_case(kind, rng)
        pilot = sample(spec, 2000, 1000 + case, sampling)
        interval = Interval(
            float(np.quantile(pilot.smallest, rng.uniform(0.05, 0.3))),
            float(np.quantile(pilot.largest, rng.uniform(0.7, 0.95))),
        )

        estimate = mc_psi(spec, interval, 20_000, 5000 + case, sampling)
        exact = psi(spec, interval).value

        agreeing += abs(estimate.z_score(exact)) <= 4

    assert agreeing >= 19
