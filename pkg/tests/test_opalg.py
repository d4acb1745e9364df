import numpy as np
import pytest
from scipy import integrate

from ptwell import exact, opalg, perturb
from ptwell.model import HALF_PI, Convention, GridError, Scheme, make_grid


@pytest.fixture(scope="module")
def grid():
    return make_grid(64)


def test_parity_involution(grid):
    P = opalg.parity_op(grid)
    PP = opalg.compose(P, P)
    np.testing.assert_array_equal(PP.matrix, np.eye(grid.size))


@pytest.mark.parametrize("conv", list(Convention))
def test_parity_reflects_samples(conv):
    g = make_grid(33, convention=conv)
    f = np.sin(g.nodes)
    np.testing.assert_array_equal(opalg.parity_op(g).apply(f), np.sin(g.nodes[::-1]))


def test_parity_on_kernel_rows(grid):
    c1 = opalg.from_kernel(grid, perturb.c1_kernel)
    u = opalg.symmetric_nodes(grid)
    left = opalg.compose(opalg.parity_op(grid), c1).kernel_values()
    np.testing.assert_allclose(left, perturb.c1_kernel(-u[:, None], u[None, :]), atol=1e-14)
    right = opalg.compose(c1, opalg.parity_op(grid)).kernel_values()
    np.testing.assert_allclose(right, perturb.c1_kernel(u[:, None], -u[None, :]), atol=1e-12)


def test_identity_composition(grid):
    C = opalg.build_C(0.1, grid)
    I = opalg.identity_op(grid)
    assert opalg.operator_distance(opalg.compose(I, C), C) <= 1e-12
    assert opalg.operator_distance(opalg.compose(C, I), C) <= 1e-12


def reference_c1c1(x, y):
    f = lambda t: (perturb.c1_kernel(x, t) * perturb.c1_kernel(t, y)).real
    pts = sorted({-abs(x), 0.0, abs(x), -abs(y), abs(y)})
    val, _ = integrate.quad(f, -HALF_PI, HALF_PI, points=pts, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


@pytest.mark.parametrize("n", [128, 129, 256])
def test_composition_against_adaptive_quadrature(n):
    g = make_grid(n)
    c1 = opalg.from_kernel(g, perturb.c1_kernel)
    K = opalg.compose(c1, c1).kernel_values()
    u = opalg.symmetric_nodes(g)
    i = n // 2
    assert abs(K[i, i] - reference_c1c1(u[i], u[i])) <= 1e-8
    for i, j in [(3, 40 % n), (10, 10), (n - 5, 7)]:
        assert abs(K[i, j] - reference_c1c1(u[i], u[j])) <= 1e-8


def test_composition_at_origin():
    # an odd grid has a node at 0
    g = make_grid(129)
    c1 = opalg.from_kernel(g, perturb.c1_kernel)
    K = opalg.compose(c1, c1).kernel_values()
    assert abs(K[64, 64] - reference_c1c1(0.0, 0.0)) <= 1e-8


def test_uncorrected_composition_is_first_order():
    # the integrand jumps across t = -x, which a plain Gauss sum resolves only to O(h)
    errs = []
    for n in (64, 128):
        g = make_grid(n)
        c1 = opalg.from_kernel(g, perturb.c1_kernel)
        plain = opalg.compose(c1, c1, corrected=False).kernel_values()
        good = opalg.compose(c1, c1).kernel_values()
        errs.append(np.max(np.abs(plain - good)))
    assert 0.7 < np.log2(errs[0] / errs[1]) < 1.5


def test_second_order_identity_refines():
    res = []
    for n in (64, 128):
        g = make_grid(n)
        c1 = opalg.from_kernel(g, perturb.c1_kernel)
        u = opalg.symmetric_nodes(g)
        x, y = u[:, None], u[None, :]
        r = perturb.c2_kernel(-x, y) + perturb.c2_kernel(x, -y) + opalg.compose(c1, c1).kernel_values()
        res.append(np.max(np.abs(r)))
    assert res[1] < 1e-6 and res[0] / res[1] > 8


def test_grid_mismatch():
    with pytest.raises(GridError):
        opalg.compose(opalg.parity_op(make_grid(8)), opalg.parity_op(make_grid(10)))


def test_build_C_at_zero_is_parity(grid):
    C = opalg.build_C(0.0, grid)
    np.testing.assert_array_equal(C.matrix, opalg.parity_op(grid).matrix)


def test_c_squared_is_third_order(grid):
    res = []
    for e in (0.2, 0.1):
        C = opalg.build_C(e, grid)
        R = opalg.compose(C, C) - opalg.identity_op(grid)
        res.append(np.max(np.abs(opalg.smeared(R))))
    assert res[0] / res[1] >= 7


def test_c_has_perturbative_eigenvectors():
    grid = make_grid(128)
    u = opalg.symmetric_nodes(grid)
    for n in range(6):
        res = []
        for e in (0.1, 0.05):
            def mode(t):
                return perturb.phi(n, e, t + HALF_PI)
            d = opalg.apply_to_function(opalg.build_C(e, grid), mode) - (-1) ** n * mode(u)
            res.append(np.sqrt(np.sum(grid.weights * np.abs(d) ** 2)))
        assert res[0] <= 1.0 * 0.1**3 and res[0] / res[1] > 7.5


def test_pt_commutation(grid):
    C = opalg.build_C(0.1, grid)
    assert opalg.operator_distance(opalg.pt_conjugate(C), C) < 1e-15


def test_extract_Q(grid):
    assert opalg.l2_norm(opalg.extract_Q(opalg.build_C(0.0, grid))) == 0
    errs = [opalg.operator_distance(opalg.extract_Q(opalg.build_C(e, grid)), opalg.q_op(e, grid))
            for e in (0.1, 0.05)]
    assert np.log2(errs[0] / errs[1]) > 2.8


def test_extract_Q_diverges_for_large_perturbation(grid):
    with pytest.raises(opalg.ConvergenceError):
        opalg.extract_Q(opalg.build_C(3.0, grid))


def test_log_coefficients(grid):
    q1, q2 = opalg.log_coefficients(grid)
    u = opalg.symmetric_nodes(grid)
    np.testing.assert_allclose(q1.kernel_values(), perturb.q_kernel(u[:, None], u[None, :], 1.0), atol=1e-10)
    assert np.max(np.abs(q2.kernel_values())) < 1e-7


def test_spectral_sum_smears_to_parity():
    P = opalg.smeared_parity()
    S = opalg.smeared_spectral_sum(0.0, 10)
    np.testing.assert_allclose(S, P, atol=1e-12)
    # truncating below a test function's own mode loses it entirely
    S3 = opalg.smeared_spectral_sum(0.0, 3)
    assert abs(S3[5, 5]) < 1e-12


def test_spectral_sum_on_grid_matches_smeared_version():
    g = make_grid(200)
    op = opalg.spectral_sum_C(0.1, 20, "exact", g)
    np.testing.assert_allclose(opalg.smeared(op), opalg.smeared_spectral_sum(0.1, 20), atol=1e-8)
    with pytest.raises(ValueError):
        opalg.spectral_sum_C(0.1, 0, "exact", g)


def test_smeared_kernel_matches_fine_grid():
    g = make_grid(400)
    coarse = opalg.smeared(opalg.from_kernel(g, perturb.c2_kernel))
    np.testing.assert_allclose(opalg.smeared_kernel(perturb.c2_kernel), coarse, atol=1e-4)


def test_hermitize_at_zero_is_H(grid):
    h = opalg.hermitize(0.0, grid, 20)
    H = opalg.spectral_hamiltonian(0.0, 20, grid)
    np.testing.assert_allclose(h.matrix, H.matrix, atol=1e-11)
    assert opalg.hermiticity_residual(h) < 1e-10


def test_hermitize_spectrum(grid):
    ev = np.linalg.eigvals(opalg.hermitize(0.1, grid, 20).matrix)
    for n in range(4):
        assert np.min(np.abs(ev - exact.solve_eigenvalue(n, 0.1).energy)) < 1e-3


def test_hermiticity_is_third_order(grid):
    r = []
    for e in (0.2, 0.1):
        h = opalg.hermitize(e, grid, 20)
        r.append(opalg.hermiticity_residual(h))
    assert np.log2(r[0] / r[1]) > 2.8


def test_exp_series_inverse(grid):
    q = opalg.q_op(0.1, grid).scaled(0.5)
    prod = opalg.compose(opalg.exp_series(q), opalg.exp_series(q.scaled(-1.0)))
    # limited by plain products of the jumping kernel, not by the series
    assert opalg.operator_distance(prod, opalg.identity_op(grid)) < 5e-4


def test_original_convention_grid_gives_same_operator():
    a = opalg.build_C(0.1, make_grid(32))
    b = opalg.build_C(0.1, make_grid(32, convention=Convention.ORIGINAL))
    np.testing.assert_allclose(a.matrix, b.matrix, atol=1e-15)


def test_operator_arithmetic(grid):
    c1 = opalg.from_kernel(grid, perturb.c1_kernel)
    two = c1 + c1
    np.testing.assert_allclose(two.matrix, (2 * c1).matrix)
    np.testing.assert_allclose((two - c1).matrix, c1.matrix)
    v = np.arange(grid.size, dtype=float)
    np.testing.assert_allclose(c1.apply(v), c1.matrix @ v)
    assert (c1 @ opalg.parity_op(grid)).kernel is not None


def test_midpoint_grids_work():
    g = make_grid(64, Scheme.UNIFORM_MIDPOINT)
    C = opalg.build_C(0.1, g)
    R = opalg.compose(C, C) - opalg.identity_op(g)
    assert np.max(np.abs(opalg.smeared(R))) < 1e-3
