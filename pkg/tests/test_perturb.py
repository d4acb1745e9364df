import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ptwell import exact, perturb
from ptwell.model import HALF_PI, DomainError

PI = np.pi
sym = st.floats(-HALF_PI, HALF_PI)
orig = st.floats(0.0, PI)


def test_phi_examples():
    assert abs(perturb.phi(0, 0.0, HALF_PI) - np.sqrt(2 / PI)) < 1e-15
    assert abs(perturb.phi(1, 0.0, PI / 4) - 1j * np.sqrt(2 / PI)) < 1e-15


def test_phi_tracks_exact_eigenfunction_to_third_order():
    x = np.linspace(0, PI, 201)
    for n in range(6):
        err = []
        for e in (0.1, 0.05):
            psi = exact.eigenfunction_value(exact.solve_normalized(n, e), x)
            err.append(np.max(np.abs(psi - perturb.phi(n, e, x))))
        assert err[0] / err[1] >= 7
        assert err[0] < 0.1**3


@pytest.mark.parametrize("n", range(8))
def test_phi_branches_join_smoothly(n):
    e = 0.2
    left = perturb.phi_branch(n, e, HALF_PI, "left")
    right = perturb.phi_branch(n, e, HALF_PI, "right")
    assert abs(left - right) < 1e-12
    h = 1e-4
    dl = (perturb.phi_branch(n, e, HALF_PI + h, "left") - perturb.phi_branch(n, e, HALF_PI - h, "left")) / (2 * h)
    dr = (perturb.phi_branch(n, e, HALF_PI + h, "right") - perturb.phi_branch(n, e, HALF_PI - h, "right")) / (2 * h)
    assert abs(dl - dr) < 1e-6
    assert abs(perturb.phi(n, e, 0.0)) < 1e-12 and abs(perturb.phi(n, e, PI)) < 1e-12


def test_phi_domain():
    with pytest.raises(DomainError):
        perturb.phi(0, 0.1, -0.5)


def test_a_coeff_examples():
    c = np.sqrt(2 / PI)
    assert perturb.a_coeff(0, 0.0) == pytest.approx(0.7978845608, abs=1e-10)
    assert perturb.a_coeff(0, 0.1) == pytest.approx(c * 1.00366850, abs=1e-8)
    # the sign of the pi**2 term for odd modes is fixed by the exact normalization below
    assert perturb.a_coeff(1, 0.1) == pytest.approx(c * (1 + (3 / 128 + PI**2 / 64) * 0.01), abs=1e-14)


def test_a_coeff_matches_exact_normalization():
    # the leading sine amplitude of the normalized exact eigenfunction is a_n + O(eps**3)
    x = np.linspace(0.01, PI - 0.01, 50)
    for n in range(4):
        errs = []
        for e in (0.1, 0.05):
            psi = exact.eigenfunction_value(exact.solve_normalized(n, e), x)
            errs.append(np.max(np.abs(psi - perturb.phi(n, e, x))))
        assert errs[0] / errs[1] > 7


@pytest.mark.parametrize("n, e, expected", [(0, 0.0, 1.0), (0, 0.1, 1.0025), (1, 0.1, 3.998125)])
def test_energy_examples(n, e, expected):
    assert perturb.energy(n, e) == pytest.approx(expected, abs=1e-15)


def test_c1_examples():
    assert perturb.c1_kernel(0.0, 0.0) == 0
    assert abs(perturb.c1_kernel(PI / 4, PI / 4) - (-1j * PI / 8)) < 1e-15
    y = np.linspace(-HALF_PI, HALF_PI, 11)
    assert np.max(np.abs(perturb.c1_kernel(HALF_PI, y))) < 1e-15


def test_c1_original_examples():
    assert abs(perturb.c1_kernel_original(3 * PI / 4, 3 * PI / 4) + 1j * PI / 8) < 1e-15
    assert abs(perturb.c1_kernel_original(PI / 4, PI / 4) - 1j * PI / 8) < 1e-15
    y = np.linspace(0, PI, 11)
    assert np.max(np.abs(perturb.c1_kernel_original(PI, y))) < 1e-15


def test_c2_examples():
    assert perturb.c2_kernel(0.0, 0.0) == pytest.approx(PI**3 / 96, abs=1e-15)
    assert abs(perturb.c2_kernel(HALF_PI, 0.0)) < 1e-15


def test_c2_region3_examples():
    assert perturb.c2_kernel_region3(0.0, 0.0) == 0
    assert perturb.c2_kernel_region3(PI / 4, PI / 4) == pytest.approx(-0.0807455, abs=1e-6)
    rng = np.random.default_rng(1)
    x, y = rng.uniform(0, HALF_PI, (2, 1000))
    np.testing.assert_allclose(perturb.c2_kernel_region3(x, y), perturb.c2_kernel(x - HALF_PI, y - HALF_PI),
                               atol=1e-12)
    with pytest.raises(DomainError):
        perturb.c2_kernel_region3(2.0, 0.1)


def test_c2_ties():
    x = np.linspace(-HALF_PI, HALF_PI, 9)
    printed = perturb.c2_kernel(x, x, ties="printed")
    limit = perturb.c2_kernel(x, x)
    np.testing.assert_allclose(printed - limit, -x * x * np.abs(x) / 4, atol=1e-15)
    # the default is the continuous limit from either side
    for tie in (x, -x):
        side = perturb.c2_kernel(x, np.clip(tie + 1e-9, -HALF_PI, HALF_PI))
        np.testing.assert_allclose(limit if tie is x else perturb.c2_kernel(x, -x), side, atol=1e-8)
    with pytest.raises(ValueError):
        perturb.c2_kernel(0.1, 0.2, ties="other")


def test_q_examples():
    x = np.linspace(-HALF_PI, HALF_PI, 7)
    assert np.max(np.abs(perturb.q_kernel(x, x, 0.3))) == 0
    assert abs(perturb.q_kernel(PI / 4, -PI / 4, 0.1) + 0.1j * PI / 8) < 1e-15


@given(sym, sym)
def test_kernel_symmetries(x, y):
    c1, c2 = perturb.c1_kernel(x, y), perturb.c2_kernel(x, y)
    assert c1.real == 0 and c2.imag == 0
    assert abs(c1 - perturb.c1_kernel(y, x)) <= 1e-14
    assert abs(c2 - perturb.c2_kernel(y, x)) <= 1e-14
    q = perturb.q_kernel(x, y, 0.2)
    assert abs(q + perturb.q_kernel(y, x, 0.2)) <= 1e-14
    assert abs(q - np.conj(perturb.q_kernel(y, x, 0.2))) <= 1e-14
    assert abs(q / 0.2 - perturb.c1_kernel(x, -y)) <= 1e-14
    assert abs(perturb.c1_kernel(-x, y) + perturb.c1_kernel(x, -y)) <= 1e-14


@given(sym)
def test_kernels_vanish_on_boundary(t):
    for edge in (-HALF_PI, HALF_PI):
        for k in (perturb.c1_kernel, perturb.c2_kernel):
            assert abs(k(edge, t)) <= 1e-12 and abs(k(t, edge)) <= 1e-12


@given(orig, orig)
def test_regional_and_unified_first_order(x, y):
    if x + y == PI:
        return
    a = perturb.c1_kernel_by_region(x, y)
    b = perturb.c1_kernel_original(x, y)
    c = perturb.c1_kernel(x - HALF_PI, y - HALF_PI)
    assert abs(a - b) <= 1e-14 and abs(b - c) <= 1e-14


@given(orig, orig)
def test_original_convention_delegates(x, y):
    assert abs(perturb.c2_kernel_original(x, y) - perturb.c2_kernel(x - HALF_PI, y - HALF_PI)) <= 1e-15
    assert abs(perturb.q_kernel_original(x, y, 0.1) - perturb.q_kernel(x - HALF_PI, y - HALF_PI, 0.1)) <= 1e-15


def test_kernels_reject_out_of_domain():
    for k in (perturb.c1_kernel, perturb.c2_kernel):
        with pytest.raises(DomainError):
            k(2.0, 0.0)
    with pytest.raises(DomainError):
        perturb.c1_kernel_original(-1.0, 0.0)
