import numpy as np
import pytest

from ptwell import perturb, series
from ptwell.model import DomainError
from ptwell.series import FourierSumSpec, fourier_sum

PI = np.pi


def test_first_order_series_example():
    v = fourier_sum(FourierSumSpec("C1_region1", 10**4), 3 * PI / 4, 3 * PI / 4)
    assert abs(v - (-1j * PI / 8)) < 2e-3


def test_second_order_series_example():
    v = fourier_sum(FourierSumSpec("C2_region3", 10**4), PI / 4, PI / 4)
    assert abs(v - perturb.c2_kernel_region3(PI / 4, PI / 4)) < 2e-3


def test_smeared_parity_series():
    x = np.linspace(0.1, PI - 0.1, 9)
    for n in (10, 100, 1000):
        assert np.max(np.abs(series.smeared_parity_sum(n, x) - series.bump(PI - x))) <= 10 / n


def test_smeared_step_integral_series():
    x = np.linspace(0.1, PI - 0.1, 9)
    for n in (10, 100, 1000):
        assert np.max(np.abs(series.smeared_step_integral(n, x) - series.step_integral_closed(x))) <= 10 / n


def test_step_integral_smearing_matches_pointwise_series():
    # the smeared form equals the pointwise series integrated against the bump
    t, w = np.polynomial.legendre.leggauss(400)
    y = 0.5 * PI * (t + 1)
    w = 0.5 * PI * w
    x = 2.2
    pointwise = fourier_sum(FourierSumSpec("delta_int_x", 50), np.full_like(y, x), y)
    assert abs(np.sum(w * pointwise * series.bump(y)) - series.smeared_step_integral(50, x)) < 1e-12


def test_bump_coefficients():
    t, w = np.polynomial.legendre.leggauss(100)
    y = 0.5 * PI * (t + 1)
    w = 0.5 * PI * w
    for m in range(1, 8):
        assert abs(np.sum(w * series.bump(y) * np.sin(m * y)) - series.bump_sine_coefficient(m)) < 1e-13


def test_step_integral_symmetry():
    a = fourier_sum(FourierSumSpec("delta_int_x", 100), 2.0, 1.7)
    b = fourier_sum(FourierSumSpec("delta_int_y", 100), 1.7, 2.0)
    assert a == b


def test_partial_sum_single_term():
    v = fourier_sum(FourierSumSpec("C0_sum", 1), 1.0, 2.0)
    assert v == pytest.approx(2 / PI * np.sin(1.0) * np.sin(2.0))


def test_region_checks():
    with pytest.raises(DomainError):
        fourier_sum(FourierSumSpec("C1_region1", 10), 1.0, 2.0)
    with pytest.raises(DomainError):
        fourier_sum(FourierSumSpec("C2_region3", 10), 2.0, 1.0)
    with pytest.raises(DomainError):
        fourier_sum(FourierSumSpec("C0_sum", 10), -1.0, 1.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        FourierSumSpec("C0_sum", 0)
    with pytest.raises(ValueError):
        FourierSumSpec("nope", 10)
