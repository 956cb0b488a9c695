import logging
import math

import pytest
from mpmath import MPContext

from eigen_interval import (
    EnsembleSpec,
    Interval,
    PsiDomainError,
    PsiOptions,
    cdf_largest,
    cdf_smallest,
    psi,
    psi_complex_beta,
    psi_complex_wishart_correlated,
    psi_complex_wishart_spiked,
    psi_complex_wishart_white,
    psi_goe,
    psi_gue,
    psi_real_beta,
    precision_rungs,
    psi_real_wishart,
)

INF = math.inf


@pytest.fixture(scope="module")
def ref():
    ctx = MPContext()
    ctx.prec = 128
    return ctx


def test_real_wishart_one_by_one_is_chi_square(ref):
    result = psi_real_wishart(1, 1, (0, 2))

    assert result.converged
    assert result.value == pytest.approx(float(ref.erf(1)), rel=1e-14)


def test_real_wishart_small_table_values():
    assert psi_real_wishart(2, 2, (0, 2)).value == pytest.approx(0.315, abs=5e-4)
    assert psi_real_wishart(5, 5, (0, 5)).value == pytest.approx(3.71e-3, rel=2e-3)
    assert psi_real_wishart(10, 10, (0, 10)).value == pytest.approx(1.90e-9, rel=3e-3)


def test_real_wishart_marchenko_pastur_edge():
    lo, hi = (math.sqrt(15) - math.sqrt(10)) ** 2, (math.sqrt(15) + math.sqrt(10)) ** 2

    assert psi_real_wishart(10, 15, (lo, hi)).value == pytest.approx(0.7678, abs=5e-4)


GOE_POSITIVE_DEFINITE = {
    1: lambda ctx: ctx.mpf(1) / 2,
    2: lambda ctx: (2 - ctx.sqrt(2)) / 4,
    3: lambda ctx: (ctx.pi - 2 * ctx.sqrt(2)) / (4 * ctx.pi),
    4: lambda ctx: ctx.sqrt((9 - 4 * ctx.sqrt(2)) / 2)
    * (-16 - 4 * ctx.sqrt(2) + 7 * ctx.pi)
    / (56 * ctx.pi),
    5: lambda ctx: (-8 - ctx.sqrt(2) + 3 * ctx.pi) / (24 * ctx.pi),
    10: lambda ctx: ctx.sqrt((44217 - 27392 * ctx.sqrt(2)) / 2)
    / (183377510400 * ctx.pi**2)
    * (
        432799744
        + 6251520 * ctx.sqrt(2)
        - (278413220 + 1989925 * ctx.sqrt(2)) * ctx.pi
        + 44769900 * ctx.pi**2
    ),
}


@pytest.mark.parametrize("n", sorted(GOE_POSITIVE_DEFINITE))
def test_goe_closed_forms(ref, n):
    expected = float(GOE_POSITIVE_DEFINITE[n](ref))

    # psi(-inf, 0) = psi(0, inf) by reflection
    assert psi_goe(n, ("-inf", 0)).value == pytest.approx(expected, rel=1e-12)
    assert psi_goe(n, (0, "inf")).value == pytest.approx(expected, rel=1e-12)


def test_goe_negative_definite_table():
    assert psi_goe(5, (-INF, 0)).value == pytest.approx(1.40e-4, rel=4e-3)
    assert psi_goe(10, (-INF, 0)).value == pytest.approx(2.27e-14, rel=3e-3)


def test_goe_reflection():
    for n in (3, 4):
        forward = psi_goe(n, (-1, 2))
        mirrored = psi_goe(n, (-2, 1))
        assert float(forward.log_value) == pytest.approx(float(mirrored.log_value), abs=1e-12)


def test_goe_one_by_one_is_standard_normal(ref):
    value = psi_goe(1, (-1, 2)).value
    expected = (ref.erf(2 / ref.sqrt(2)) + ref.erf(1 / ref.sqrt(2))) / 2

    assert value == pytest.approx(float(expected), rel=1e-14)


def test_gue_one_by_one(ref):
    assert psi_gue(1, (-INF, 0)).value == pytest.approx(0.5, abs=1e-14)
    assert psi_gue(1, (-1, 1)).value == pytest.approx(float(ref.erf(1)), rel=1e-14)


def test_complex_white_one_by_one():
    value = psi_complex_wishart_white(1, 1, (0.5, 2)).value

    assert value == pytest.approx(math.exp(-0.5) - math.exp(-2), rel=1e-14)


def test_complex_correlated_one_by_one(ref):
    value = psi_complex_wishart_correlated(1, 2, [2.0], (1, 5)).value
    expected = ref.gammainc(2, 0.5, 2.5, regularized=True)

    assert value == pytest.approx(float(expected), rel=1e-14)


def test_real_beta_one_by_one(ref):
    value = psi_real_beta(1, 1.5, 0.5, (0, 0.3)).value
    expected = ref.betainc(2.5, 1.5, 0, 0.3, regularized=True)

    assert value == pytest.approx(float(expected), rel=1e-14)


def test_complex_beta_one_by_one(ref):
    value = psi_complex_beta(1, 2, 1, (0.2, 0.9)).value
    expected = ref.betainc(3, 2, 0.2, 0.9, regularized=True)

    assert value == pytest.approx(float(expected), rel=1e-14)


def test_nearly_white_covariance_approaches_white(caplog):
    with caplog.at_level(logging.WARNING, logger="eigen_interval"):
        correlated = psi_complex_wishart_correlated(2, 3, [1 + 1e-4, 1.0], (0, 6))

    white = psi_complex_wishart_white(2, 3, (0, 6))

    assert "degenerate" in caplog.text
    assert correlated.value == pytest.approx(white.value, rel=1e-2)


def test_spiked_matches_correlated_limit():
    spiked = psi_complex_wishart_spiked(3, 5, 3.0, 1.0, (0, 12))
    correlated = psi_complex_wishart_correlated(3, 5, [3.0, 1.0 + 1e-3, 1.0], (0, 12))

    assert spiked.value == pytest.approx(correlated.value, rel=1e-2)


NORMALIZATION_CASES = [
    EnsembleSpec.real_wishart(1, 1),
    EnsembleSpec.real_wishart(4, 4),
    EnsembleSpec.real_wishart(5, 9),
    EnsembleSpec.goe(5),
    EnsembleSpec.goe(6),
    EnsembleSpec.real_beta(3, 0.5, 1.5),
    EnsembleSpec.real_beta(4, -0.5, 2),
    EnsembleSpec.complex_wishart(4, 6),
    EnsembleSpec.complex_wishart_correlated(6, [4, 2.5, 1, 0.5]),
    EnsembleSpec.complex_wishart_spiked(4, 6, 3, 1),
    EnsembleSpec.complex_beta(4, 1.5, 2),
    EnsembleSpec.gue(5),
]


@pytest.mark.parametrize("spec", NORMALIZATION_CASES, ids=lambda spec: f"{spec.kind.value}-{spec.p}")
def test_normalization(spec: EnsembleSpec):
    result = psi(spec, Interval.everything())

    assert result.converged
    assert abs(float(result.log_value)) < 1e-10
    assert result.value == pytest.approx(1, abs=1e-10)


@pytest.mark.slow
@pytest.mark.parametrize("p", [7, 12, 20])
@pytest.mark.parametrize(
    "make",
    [
        lambda p: EnsembleSpec.real_wishart(p, p + 3),
        lambda p: EnsembleSpec.goe(p),
        lambda p: EnsembleSpec.real_beta(p, 1, 2),
        lambda p: EnsembleSpec.complex_wishart(p, p + 2),
        lambda p: EnsembleSpec.complex_wishart_correlated(p + 1, [1 + 0.5 * (p - i) for i in range(p)]),
        lambda p: EnsembleSpec.complex_wishart_spiked(p, p + 1, 2.5, 1),
        lambda p: EnsembleSpec.complex_beta(p, 0.5, 1),
        lambda p: EnsembleSpec.gue(p),
    ],
)
def test_normalization_sweep(p, make):
    result = psi(make(p), Interval.everything())

    assert result.value == pytest.approx(1, abs=1e-10)


def test_monotone_in_the_interval():
    spec = EnsembleSpec.goe(4)
    inner = psi(spec, (-1, 1)).value
    outer = psi(spec, (-2, 1)).value
    widest = psi(spec, (-2, 3)).value

    assert 0 < inner <= outer <= widest <= 1


def test_degenerate_interval_is_zero():
    result = psi_real_wishart(3, 4, (2, 2))

    assert result.value == 0 and result.converged
    assert result.log10_value == -math.inf


def test_interval_is_clipped_to_the_support():
    clipped = psi_real_wishart(3, 4, (-5, 6))
    direct = psi_real_wishart(3, 4, (0, 6))

    assert clipped.value == direct.value


def test_interval_outside_the_support():
    with pytest.raises(PsiDomainError):
        psi_real_wishart(3, 4, (-3, -1))
    with pytest.raises(PsiDomainError):
        psi_real_beta(2, 1, 1, (1.5, 2))


def test_cdf_largest_is_psi_from_the_support():
    spec = EnsembleSpec.real_wishart(3, 5)

    assert cdf_largest(spec, 8).value == psi(spec, (0, 8)).value
    assert cdf_largest(spec, -1).value == 0


def test_cdf_smallest_complements_psi():
    spec = EnsembleSpec.gue(3)
    upper = psi(spec, (-0.5, INF))
    lower = cdf_smallest(spec, -0.5)

    assert lower.value + upper.value == pytest.approx(1, abs=1e-14)
    assert cdf_smallest(spec, INF).value == 1


def test_cdf_smallest_keeps_tiny_tails():
    spec = EnsembleSpec.real_wishart(2, 40)
    tail = cdf_smallest(spec, 1e-3)

    assert 0 < tail.value < 1e-20
    assert tail.log10_value < -20


def test_fixed_precision():
    result = psi_goe(4, (-1, 1), PsiOptions(precision=128))

    assert result.precision_bits_used == 128 + 64
    assert result.converged


def test_precision_rungs():
    assert precision_rungs(256, 64, 1024) == [256, 320, 512, 1024]
    assert precision_rungs(256, 64, 512) == [256, 320, 512]
    assert precision_rungs(128, 32, 8192, fixed=True) == [128, 160]


def test_converges_on_the_guard_rung():
    result = psi_goe(6, (-1, 2))

    assert result.converged
    assert result.precision_bits_used == 256 + 64


def test_non_convergence_is_reported(caplog):
    options = PsiOptions(tolerance=1e-300, max_precision=512)

    with caplog.at_level(logging.WARNING, logger="eigen_interval"):
        result = psi_goe(4, (-1, 1), options)

    assert not result.converged
    assert result.precision_bits_used == 512
    assert "did not converge" in caplog.text
    assert result.value == pytest.approx(psi_goe(4, (-1, 1)).value, rel=1e-12)


# computed values; the printed references are 2.72E-1210 and 1.70E-198
GOE_NEGATIVE_DEFINITE_LOG10 = {
    100: -1209.56336,
}

REAL_WISHART_SQUARE_LOG10 = {
    50: -197.76814,
}


@pytest.mark.slow
def test_goe_negative_definite_fifty():
    result = psi_goe(50, (-INF, 0))

    assert result.log10_value == pytest.approx(math.log10(2.43e-307), abs=2e-3)


@pytest.mark.slow
@pytest.mark.parametrize("n", sorted(GOE_NEGATIVE_DEFINITE_LOG10))
def test_goe_negative_definite_large(n):
    result = psi_goe(n, (-INF, 0))

    assert result.converged
    assert result.log10_value == pytest.approx(GOE_NEGATIVE_DEFINITE_LOG10[n], abs=1e-5)


@pytest.mark.slow
@pytest.mark.parametrize("p", sorted(REAL_WISHART_SQUARE_LOG10))
def test_real_wishart_large(p):
    result = psi_real_wishart(p, p, (0, p))

    assert result.converged
    assert result.log10_value == pytest.approx(REAL_WISHART_SQUARE_LOG10[p], abs=1e-5)


@pytest.mark.slow
def test_goe_dimension_500():
    result = psi_goe(500, (-INF, 0))

    assert result.converged
    assert result.log10_value == pytest.approx(-29904 + math.log10(2.85), abs=5e-3)


@pytest.mark.slow
def test_real_wishart_dimension_500():
    result = psi_real_wishart(500, 1000, (400, 2800))

    assert result.converged
    assert -math.inf < result.log10_value < 0
