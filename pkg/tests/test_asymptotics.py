import math

import pytest

from eigen_interval import (
    EDGE_PROB_NOMINAL,
    EnsembleSpec,
    Interval,
    PsiDomainError,
    UnsupportedEnsembleError,
    cs_concentration_bounds,
    deviation_prob,
    edge_prob_limit,
    edge_scaling,
    goe_negativity_approx,
    isometry_probability,
    limiting_support,
    mp_support,
    psi,
    psi_approx,
    semicircle_support,
    tw_cdf,
    tw_params,
    tw_sf,
)
from eigen_interval.asymptotics import lower_edge, upper_edge


def test_tw_surrogate_at_zero():
    assert tw_cdf(1, 0) == pytest.approx(0.8312, abs=2e-3)
    assert tw_cdf(2, 0) == pytest.approx(0.96945, abs=2e-3)


def test_tw_surrogate_shape():
    assert tw_cdf(1, -10) == 0
    assert tw_cdf(1, -2) < tw_cdf(1, 0) < tw_cdf(1, 2)
    assert tw_cdf(4, 8) == pytest.approx(1)
    assert tw_cdf(2, 1.5) + tw_sf(2, 1.5) == pytest.approx(1)
    assert 0 < tw_sf(1, 12) < 1e-8


def test_tw_params():
    assert tw_params(2).k == 79.6595

    with pytest.raises(PsiDomainError):
        tw_params(3)


def test_wishart_edge_scaling():
    scaling = edge_scaling(EnsembleSpec.real_wishart(10, 40))

    assert scaling.mu_plus == pytest.approx(90)
    assert scaling.mu_minus == pytest.approx(10)
    assert scaling.sigma_plus == pytest.approx(math.sqrt(90) * (10**-0.5 + 40**-0.5) ** (1 / 3))
    assert scaling.sigma_minus == pytest.approx(math.sqrt(10) * (10**-0.5 - 40**-0.5) ** (1 / 3))


def test_gaussian_edge_scaling():
    scaling = edge_scaling(EnsembleSpec.gue(8))

    assert scaling.mu_plus == pytest.approx(math.sqrt(2 * 8))
    assert scaling.mu_minus == -scaling.mu_plus
    assert scaling.sigma_plus == pytest.approx(8 ** (-1 / 6) / math.sqrt(2))


def test_edge_scaling_errors():
    with pytest.raises(PsiDomainError):
        edge_scaling(EnsembleSpec.real_wishart(3, 3))
    with pytest.raises(UnsupportedEnsembleError):
        edge_scaling(EnsembleSpec.real_beta(3, 1, 1))
    with pytest.raises(UnsupportedEnsembleError):
        psi_approx(EnsembleSpec.complex_wishart_spiked(3, 5, 2, 1), (0, 10))


def test_square_wishart_edges():
    spec = EnsembleSpec.real_wishart(10, 10)
    mu_plus, sigma_plus = upper_edge(spec)

    assert mu_plus == pytest.approx(40)
    assert sigma_plus == pytest.approx(math.sqrt(40) * (2 / math.sqrt(10)) ** (1 / 3))

    with pytest.raises(PsiDomainError):
        lower_edge(spec)


def test_psi_approx_square_from_zero():
    spec = EnsembleSpec.real_wishart(10, 10)
    mu_plus, sigma_plus = upper_edge(spec)

    assert psi_approx(spec, (0, 40)) == pytest.approx(tw_cdf(1, (40 - mu_plus) / sigma_plus))
    assert 0 < psi_approx(spec, (0, 40)) < 1

    with pytest.raises(PsiDomainError):
        psi_approx(spec, (1, 40))


def test_psi_approx_on_the_whole_support():
    assert psi_approx(EnsembleSpec.goe(5), Interval.everything()) == 1
    assert psi_approx(EnsembleSpec.real_wishart(3, 6), (0, math.inf)) == 1


def test_psi_approx_on_the_limiting_support():
    real = psi_approx(EnsembleSpec.real_wishart(10, 15), mp_support(10, 15))
    complex = psi_approx(EnsembleSpec.complex_wishart(10, 15), mp_support(10, 15))

    assert real == pytest.approx(0.691, abs=2e-3)
    assert complex == pytest.approx(0.9398, abs=2e-3)
    assert real == pytest.approx(edge_prob_limit("real"))


def test_edge_prob_limit():
    assert edge_prob_limit("real") == pytest.approx(EDGE_PROB_NOMINAL["real"], abs=3e-3)
    assert edge_prob_limit("complex") == pytest.approx(EDGE_PROB_NOMINAL["complex"], abs=3e-3)

    with pytest.raises(PsiDomainError):
        edge_prob_limit("quaternion")


def test_deviation_prob():
    assert deviation_prob(1, 0) == pytest.approx(edge_prob_limit("real"))
    assert deviation_prob(2, 3) > deviation_prob(2, 0)
    assert deviation_prob(1, 3, "exceedance") == pytest.approx(tw_sf(1, 3) ** 2)

    with pytest.raises(PsiDomainError):
        deviation_prob(1, 0, "both")


def test_goe_negativity_approx():
    assert math.exp(goe_negativity_approx(10, "basic")) == pytest.approx(1.18e-12, rel=1e-2)
    assert math.exp(goe_negativity_approx(10)) == pytest.approx(2.54e-14, rel=1e-2)
    assert math.exp(goe_negativity_approx(2)) == pytest.approx(0.155, abs=1e-3)

    with pytest.raises(PsiDomainError):
        goe_negativity_approx(0)


@pytest.mark.parametrize("n", [2, 5, 10])
def test_corrected_negativity_is_close_to_exact(n):
    exact = float(psi(EnsembleSpec.goe(n), (-math.inf, 0)).log_value)

    assert abs(goe_negativity_approx(n) - exact) < math.log(10)


def test_supports():
    lo, hi = mp_support(10, 40)
    assert (lo, hi) == (pytest.approx(10), pytest.approx(90))
    assert semicircle_support(8) == Interval(-4, 4)
    assert limiting_support(EnsembleSpec.gue(8)) == Interval(-4, 4)

    with pytest.raises(PsiDomainError):
        mp_support(5, 3)
    with pytest.raises(UnsupportedEnsembleError):
        limiting_support(EnsembleSpec.complex_beta(2, 1, 1))


def test_concentration_bounds_dominate_exact_tails():
    records = cs_concentration_bounds(10, 400, [0.02, 0.05, 0.1])

    assert [record.t for record in records] == [0.02, 0.05, 0.1]

    for record in records:
        assert record.converged
        assert 0 <= record.exact_upper <= record.upper_tail_bound
        assert 0 <= record.exact_lower <= record.lower_tail_bound
        assert record.upper_tail_bound == record.lower_tail_bound == math.exp(-400 * record.t**2 / 2)

    assert records[0].approx_upper == pytest.approx(records[0].exact_upper, abs=0.05)
    assert records[0].approx_lower == pytest.approx(records[0].exact_lower, abs=0.05)
    assert records[-1].exact_upper < records[0].exact_upper


def test_concentration_bounds_over_the_deviation_grid():
    t_grid = [round(0.05 * k, 2) for k in range(1, 11)]
    records = cs_concentration_bounds(10, 400, t_grid)

    assert [record.t for record in records] == t_grid

    for record in records:
        assert record.exact_upper <= record.upper_tail_bound
        assert record.exact_lower <= record.lower_tail_bound
        assert abs(record.approx_upper - record.exact_upper) <= 0.03


def test_concentration_bounds_square():
    (record,) = cs_concentration_bounds(5, 5, [0.1])

    assert record.approx_lower is None
    assert 0 < record.approx_upper < 1
    assert record.exact_upper <= record.upper_tail_bound


def test_concentration_bounds_errors():
    with pytest.raises(PsiDomainError):
        cs_concentration_bounds(10, 5, [0.1])
    with pytest.raises(PsiDomainError):
        cs_concentration_bounds(3, 20, [-0.1])


def test_isometry_probability():
    result = isometry_probability(5, 50, 0.5)

    assert result.interval == Interval(25, 75)
    assert 0 < result.exact.value < 1
    assert result.approx is not None and 0 < result.approx < 1


def test_isometry_probability_square():
    result = isometry_probability(3, 3, 0.9)

    assert result.approx is None
    assert 0 < result.exact.value < 1

    with pytest.raises(PsiDomainError):
        isometry_probability(3, 10, 0)
