"""Discretized operator algebra for kernels of the form ``a + b P + K``.

An operator on a :class:`~ptwell.model.QuadGrid` is stored as exact
coefficients of the identity and of parity plus a weight-absorbed matrix
``K(x_i, x_j) w_j`` for its smooth part, so composition is matrix algebra
and delta functions are never sampled. When the smooth part comes from a
closed-form kernel, the callable is kept; composing two such operators then
uses a Gauss rule corrected for value and slope jumps of the integrand on
the lines ``t = +-x`` and ``t = 0``, where every kernel in this package has
its breaks.

All kernel callables take symmetric coordinates ``(-pi/2, pi/2)``; grids in
the original convention are translated before evaluation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import exact, perturb
from .model import HALF_PI, Convention, GridError, QuadGrid

Kernel = Callable[[np.ndarray, np.ndarray], np.ndarray]

# offset used to read one-sided limits and slopes of kernels at breaks;
# smaller than the gap between the outermost Gauss node and the boundary
# for grids up to ~2000 nodes
_SIDE_STEP = 1e-7


class ConvergenceError(RuntimeError):
    """A truncated operator series is outside its radius of convergence."""


def symmetric_nodes(grid: QuadGrid) -> np.ndarray:
    """Grid nodes in symmetric coordinates, exactly odd under parity."""
    u = grid.nodes - (HALF_PI if grid.convention is Convention.ORIGINAL else 0.0)
    return 0.5 * (u - u[grid.parity_index])


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """``identity * 1 + parity * P + smooth`` on a quadrature grid.

    ``smooth`` holds ``K(x_i, x_j) * w_j``; ``kernel`` is ``K`` itself when
    known in closed form (symmetric coordinates).
    """

    grid: QuadGrid
    identity: complex = 0.0
    parity: complex = 0.0
    smooth: np.ndarray | None = None
    kernel: Kernel | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.smooth is not None:
            s = np.array(self.smooth, dtype=complex)
            if s.shape != (self.grid.size, self.grid.size):
                raise ValueError(f"smooth part has shape {s.shape}, grid size is {self.grid.size}")
            s.setflags(write=False)
            object.__setattr__(self, "smooth", s)
        object.__setattr__(self, "identity", complex(self.identity))
        object.__setattr__(self, "parity", complex(self.parity))

    @property
    def n(self) -> int:
        return self.grid.size

    @property
    def smooth_or_zero(self) -> np.ndarray:
        return self.smooth if self.smooth is not None else np.zeros((self.n, self.n), complex)

    @property
    def matrix(self) -> np.ndarray:
        """Dense matrix acting on vectors of node values."""
        m = np.array(self.smooth_or_zero)
        m[np.arange(self.n), np.arange(self.n)] += self.identity
        m[np.arange(self.n), self.grid.parity_index] += self.parity
        return m

    def kernel_values(self) -> np.ndarray:
        """Smooth-part kernel samples ``K(x_i, x_j)`` (weights divided out)."""
        return self.smooth_or_zero / self.grid.weights[None, :]

    def apply(self, values) -> np.ndarray:
        v = np.asarray(values)
        out = self.identity * v + self.parity * v[self.grid.parity_index]
        if self.smooth is not None:
            out = out + self.smooth @ v
        return out

    def scaled(self, c) -> "DiscreteOperator":
        k = self.kernel
        return DiscreteOperator(
            self.grid, c * self.identity, c * self.parity,
            None if self.smooth is None else c * self.smooth,
            None if k is None else (lambda x, y: c * k(x, y)),
        )

    def __add__(self, other: "DiscreteOperator") -> "DiscreteOperator":
        _check_grids(self, other)
        if self.smooth is None or other.smooth is None:
            smooth = self.smooth if other.smooth is None else other.smooth
            kernel = self.kernel if other.smooth is None else other.kernel
        else:
            smooth = self.smooth + other.smooth
            ka, kb = self.kernel, other.kernel
            kernel = None if ka is None or kb is None else (lambda x, y: ka(x, y) + kb(x, y))
        return DiscreteOperator(self.grid, self.identity + other.identity,
                                self.parity + other.parity, smooth, kernel)

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def __mul__(self, c):
        return self.scaled(c)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return compose(self, other)


def _check_grids(a: DiscreteOperator, b: DiscreteOperator):
    if not a.grid.same_as(b.grid):
        raise GridError("operators live on different grids")


def identity_op(grid: QuadGrid) -> DiscreteOperator:
    return DiscreteOperator(grid, identity=1.0)


def parity_op(grid: QuadGrid) -> DiscreteOperator:
    """Parity as an exact node permutation (``x -> -x`` or ``x -> pi - x``)."""
    return DiscreteOperator(grid, parity=1.0)


def zero_op(grid: QuadGrid) -> DiscreteOperator:
    return DiscreteOperator(grid)


def from_kernel(grid: QuadGrid, kernel: Kernel) -> DiscreteOperator:
    """Sample a closed-form kernel (symmetric coordinates) onto ``grid``."""
    u = symmetric_nodes(grid)
    values = kernel(u[:, None], u[None, :])
    return DiscreteOperator(grid, smooth=values * grid.weights[None, :], kernel=kernel)


def from_samples(grid: QuadGrid, values) -> DiscreteOperator:
    """Operator whose smooth kernel is only known at the nodes."""
    return DiscreteOperator(grid, smooth=np.asarray(values) * grid.weights[None, :])


def _reflect_x(k: Kernel) -> Kernel:
    return lambda x, y: k(-x, y)


def _reflect_y(k: Kernel) -> Kernel:
    return lambda x, y: k(x, -y)


def compose(a: DiscreteOperator, b: DiscreteOperator, corrected: bool = True) -> DiscreteOperator:
    """Quadrature composition ``(a b)(x, z) = int a(x, t) b(t, z) dt``.

    Identity and parity parts compose exactly. The smooth-smooth product is
    a Gauss sum; with ``corrected`` and both kernels known in closed form,
    the sum is corrected for value and slope jumps at the break lines.
    The result keeps a closed-form kernel only when no smooth-smooth
    product was formed.
    """
    _check_grids(a, b)
    perm = a.grid.parity_index
    ident = a.identity * b.identity + a.parity * b.parity
    par = a.identity * b.parity + a.parity * b.identity

    terms = []
    kernels = []
    if b.smooth is not None:
        if a.identity != 0:
            terms.append(a.identity * b.smooth)
            kernels.append(_scaled_kernel(b.kernel, a.identity))
        if a.parity != 0:
            terms.append(a.parity * b.smooth[perm, :])
            kernels.append(_scaled_kernel(None if b.kernel is None else _reflect_x(b.kernel), a.parity))
    if a.smooth is not None:
        if b.identity != 0:
            terms.append(b.identity * a.smooth)
            kernels.append(_scaled_kernel(a.kernel, b.identity))
        if b.parity != 0:
            terms.append(b.parity * a.smooth[:, perm])
            kernels.append(_scaled_kernel(None if a.kernel is None else _reflect_y(a.kernel), b.parity))
    both_smooth = a.smooth is not None and b.smooth is not None
    if both_smooth:
        if corrected and a.kernel is not None and b.kernel is not None:
            vals = corrected_composition(a.kernel, b.kernel, a.grid)
            terms.append(vals * a.grid.weights[None, :])
        else:
            terms.append(a.smooth @ b.smooth)
        kernels.append(None)

    if not terms:
        return DiscreteOperator(a.grid, ident, par)
    smooth = terms[0]
    for t in terms[1:]:
        smooth = smooth + t
    kernel = None
    if all(k is not None for k in kernels):
        kernel = _sum_kernels(kernels)
    return DiscreteOperator(a.grid, ident, par, smooth, kernel)


def _scaled_kernel(k, c):
    if k is None:
        return None
    if c == 1:
        return k
    return lambda x, y: c * k(x, y)


def _sum_kernels(ks):
    if len(ks) == 1:
        return ks[0]
    return lambda x, y: sum(k(x, y) for k in ks)


class _GaussJumpTable:
    """Errors of a 1-D rule on unit value and slope jumps at arbitrary points.

    For a break at ``b`` the rule misses ``e0(b) = (B - b) - sum_{t_l > b} w_l``
    on the step ``H(t - b)`` and ``e1(b) = (B - b)**2 / 2 - sum_{t_l > b}
    w_l (t_l - b)`` on the ramp ``(t - b)_+``.
    """

    def __init__(self, nodes, weights, upper):
        self.t = nodes
        self.upper = upper
        # suffix sums over nodes l >= k
        self.sw = np.concatenate([np.cumsum(weights[::-1])[::-1], [0.0]])
        self.swt = np.concatenate([np.cumsum((weights * nodes)[::-1])[::-1], [0.0]])

    def errors(self, b):
        k = np.searchsorted(self.t, b, side="right")
        s0 = self.sw[k]
        s1 = self.swt[k] - b * s0
        span = self.upper - b
        return span - s0, 0.5 * span**2 - s1


def _one_sided(f, b):
    h = _SIDE_STEP
    l1, l2 = f(b - h), f(b - 2 * h)
    r1, r2 = f(b + h), f(b + 2 * h)
    return 2 * l1 - l2, (l1 - l2) / h, 2 * r1 - r2, (r2 - r1) / h


def _jump_corrected(ka, kb, X, Y, breaks, u, w, table):
    """Gauss sum of ``ka(X, t) kb(t, Y)`` plus jump corrections at ``breaks``.

    ``X`` and ``Y`` are broadcast to a common block shape; each entry of
    ``breaks`` is an array of that shape holding one break per output entry.
    """
    n = u.size
    block = (ka(X[:, :1], u[None, :]) * w[None, :]) @ kb(u[:, None], Y[:1, :])
    seen = []
    for b in breaks:
        dup = np.zeros(b.shape, dtype=bool)
        for s in seen:
            dup |= b == s
        seen.append(b)
        aL, daL, aR, daR = _one_sided(lambda t: ka(X, t), b)
        bL, dbL, bR, dbR = _one_sided(lambda t: kb(t, Y), b)
        fL, fR = aL * bL, aR * bR
        j0 = fR - fL
        j1 = (daR * bR + aR * dbR) - (daL * bL + aL * dbL)
        e0, e1 = table.errors(b)
        corr = j0 * e0 + j1 * e1
        k = np.clip(np.searchsorted(u, b), 0, n - 1)
        on_node = u[k] == b
        if np.any(on_node):
            sampled = ka(X, u[k]) * kb(u[k], Y)
            corr = corr + np.where(on_node, w[k] * (fL - sampled), 0.0)
        block = block + np.where(dup, 0.0, corr)
    return block


def corrected_composition(ka: Kernel, kb: Kernel, grid: QuadGrid) -> np.ndarray:
    """Kernel samples of ``int ka(x_i, t) kb(t, x_j) dt`` on the grid nodes.

    The plain Gauss sum is corrected at every break ``b`` in
    ``{x_i, -x_i, x_j, -x_j, 0}`` by ``J0 e0(b) + J1 e1(b)``, where ``J0``
    and ``J1`` are the value and slope jumps of the integrand read from
    one-sided limits of the two kernels. For breaks on a node the sampled
    value is replaced by the left limit, matching the step convention of
    ``e0``. Piecewise-polynomial kernels leave only curvature-jump errors,
    which are O(h**4) for Gauss-Legendre.
    """
    u = symmetric_nodes(grid)
    w = grid.weights
    n = u.size
    table = _GaussJumpTable(u, w, HALF_PI)
    out = np.empty((n, n), dtype=complex)
    # chunk rows to bound memory at O(chunk * n)
    chunk = max(1, min(n, 2**20 // max(n, 1)))
    for start in range(0, n, chunk):
        rows = slice(start, min(n, start + chunk))
        X, Y = np.broadcast_arrays(u[rows][:, None], u[None, :])
        breaks = (X, -X, Y, -Y, np.zeros(X.shape))
        out[rows] = _jump_corrected(ka, kb, X, Y, breaks, u, w, table)
    return out


def corrected_apply(kernel: Kernel, f: Callable, grid: QuadGrid) -> np.ndarray:
    """``int K(x_i, t) f(t) dt`` at the grid nodes for a closed-form ``f``.

    ``f`` takes symmetric coordinates and may have value or slope breaks at
    ``t = 0``; the kernel may break at ``t = +-x``.
    """
    u = symmetric_nodes(grid)
    X = u[:, None]
    breaks = (X, -X, np.zeros(X.shape))
    table = _GaussJumpTable(u, grid.weights, HALF_PI)
    return _jump_corrected(kernel, lambda t, _: f(t), X, X, breaks, u, grid.weights, table)[:, 0]


def apply_to_function(op: DiscreteOperator, f: Callable) -> np.ndarray:
    """``op`` applied to a closed-form function, sampled at the grid nodes.

    Identity and parity act exactly; a closed-form smooth part is integrated
    with jump corrections, otherwise the plain Gauss sum is used.
    """
    u = symmetric_nodes(op.grid)
    out = op.identity * f(u) + op.parity * f(-u)
    if op.smooth is None:
        return out
    if op.kernel is None:
        return out + op.smooth @ f(u)
    return out + corrected_apply(op.kernel, f, op.grid)


def pt_conjugate(op: DiscreteOperator) -> DiscreteOperator:
    """``(PT) op (PT)^-1`` with T complex conjugation."""
    perm = op.grid.parity_index
    smooth = None if op.smooth is None else np.conj(op.smooth[perm][:, perm])
    k = op.kernel
    kernel = None if k is None else (lambda x, y: np.conj(k(-x, -y)))
    return DiscreteOperator(op.grid, np.conj(op.identity), np.conj(op.parity), smooth, kernel)


def operator_distance(a: DiscreteOperator, b: DiscreteOperator) -> float:
    """Largest deviation between two operators, component by component.

    Smooth parts are compared as kernel values (weights divided out).
    """
    _check_grids(a, b)
    d = (a - b)
    return float(max(abs(d.identity), abs(d.parity),
                     np.max(np.abs(d.kernel_values()), initial=0.0)))


def l2_norm(op: DiscreteOperator) -> float:
    """Operator 2-norm in the weighted inner product on node values."""
    sw = np.sqrt(op.grid.weights)
    return float(np.linalg.norm(sw[:, None] * op.matrix / sw[None, :], 2))


# -- test functions and smeared matrix elements ---------------------------------

def smearing_functions(grid: QuadGrid, count: int = 6) -> np.ndarray:
    """Smearing functions ``sin((k+1)(x + pi/2))`` sampled on the grid, shape (count, n)."""
    return _smearing_values(count, symmetric_nodes(grid))


def smeared(op: DiscreteOperator, count: int = 6) -> np.ndarray:
    """Matrix of ``<f_j, op f_k>`` for the smearing functions."""
    F = smearing_functions(op.grid, count)
    w = op.grid.weights
    return (F * w) @ op.matrix @ F.T


# -- C from its closed-form pieces ------------------------------------------------

def c_pieces(grid: QuadGrid) -> tuple[DiscreteOperator, DiscreteOperator]:
    """First- and second-order smooth parts of C as operators."""
    return from_kernel(grid, perturb.c1_kernel), from_kernel(grid, perturb.c2_kernel)


def build_C(epsilon: float, grid: QuadGrid) -> DiscreteOperator:
    """``P + eps C1 + eps**2 C2`` with exact parity and closed-form smooth parts."""
    c1, c2 = c_pieces(grid)
    return parity_op(grid) + c1.scaled(epsilon) + c2.scaled(epsilon**2)


def q_op(epsilon: float, grid: QuadGrid) -> DiscreteOperator:
    """Closed-form Q as a smooth operator."""
    return from_kernel(grid, lambda x, y: perturb.q_kernel(x, y, epsilon))


def log_coefficients(grid: QuadGrid) -> tuple[DiscreteOperator, DiscreteOperator]:
    """Order-eps and order-eps**2 coefficients of ``log(C P)``.

    With ``C P = 1 + eps A + eps**2 B`` these are ``A`` and ``B - A A / 2``.
    """
    c1, c2 = c_pieces(grid)
    P = parity_op(grid)
    A = compose(c1, P)
    B = compose(c2, P)
    return A, B - compose(A, A).scaled(0.5)


def extract_Q(C: DiscreteOperator, max_order: int = 8, tol: float = 1e-14) -> DiscreteOperator:
    """``log(C P)`` by the Mercator series ``X - X^2/2 + X^3/3 - ...``.

    Stops once the next term's norm drops below ``tol`` or after
    ``max_order`` terms.

    Raises
    ------
    ConvergenceError
        If ``||C P - 1|| >= 1``.
    """
    X = compose(C, parity_op(C.grid)) - identity_op(C.grid)
    norm = l2_norm(X)
    if norm >= 1:
        raise ConvergenceError(f"||C P - 1|| = {norm:.3g} >= 1; logarithm series diverges")
    Q = X
    power = X
    for k in range(2, max_order + 1):
        power = compose(power, X)
        term = power.scaled((-1) ** (k + 1) / k)
        if l2_norm(term) < tol:
            break
        Q = Q + term
    return Q


def exp_series(A: DiscreteOperator, tol: float = 1e-16, max_terms: int = 40) -> DiscreteOperator:
    """Truncated exponential series of a smooth operator."""
    result = identity_op(A.grid)
    term = identity_op(A.grid)
    for k in range(1, max_terms + 1):
        term = compose(term, A).scaled(1.0 / k)
        result = result + term
        if l2_norm(term) < tol:
            break
    return result


# -- spectral sums -------------------------------------------------------------------

class Source(enum.Enum):
    EXACT = "exact"
    PERTURBATIVE = "perturbative"


def _original_nodes(grid: QuadGrid) -> np.ndarray:
    return symmetric_nodes(grid) + HALF_PI


def mode_samples(epsilon: float, n_modes: int, source, x) -> tuple[np.ndarray, np.ndarray]:
    """Eigenfunctions at original coordinates ``x`` and their energies.

    Returns ``(phis, energies)`` with ``phis`` of shape ``(n_modes, len(x))``.
    """
    source = Source(source)
    phis = np.empty((n_modes, np.size(x)), dtype=complex)
    energies = np.empty(n_modes, dtype=complex)
    for n in range(n_modes):
        if source is Source.EXACT:
            sol = exact.solve_normalized(n, epsilon)
            phis[n] = exact.eigenfunction_value(sol, x)
            energies[n] = sol.energy
        else:
            phis[n] = perturb.phi(n, epsilon, x)
            energies[n] = perturb.energy(n, epsilon)
    return phis, energies


def spectral_sum_C(epsilon: float, n_modes: int, source, grid: QuadGrid) -> DiscreteOperator:
    """Truncated ``sum_n phi_n(x) phi_n(y)`` (no complex conjugation).

    The sum converges to the parity delta only in the distributional sense;
    inspect it through :func:`smeared`.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    phis, _ = mode_samples(epsilon, n_modes, source, _original_nodes(grid))
    return from_samples(grid, phis.T @ phis)


def spectral_hamiltonian(epsilon: float, n_modes: int, grid: QuadGrid,
                         source=Source.EXACT) -> DiscreteOperator:
    """``H = sum_n (-1)**n E_n phi_n(x) phi_n(y)``, the bilinear spectral resolution."""
    phis, energies = mode_samples(epsilon, n_modes, source, _original_nodes(grid))
    signs = (-1.0) ** np.arange(n_modes)
    return from_samples(grid, (phis.T * (signs * energies)) @ phis)


def _half_rule(per_half: int):
    """Gauss-Legendre nodes on each half of the symmetric interval."""
    t, w = np.polynomial.legendre.leggauss(per_half)
    left = 0.5 * HALF_PI * (t - 1)
    return np.concatenate([left, -left[::-1]]), 0.5 * HALF_PI * np.concatenate([w, w[::-1]])


def _lagrange_basis(nodes, bary_weights, y):
    """Values ``L_l(y_p)`` of the Lagrange basis on ``nodes``, shape ``(len(y), len(nodes))``."""
    d = y[:, None] - nodes[None, :]
    hit = d == 0
    d[hit] = 1.0
    terms = bary_weights / d
    basis = terms / terms.sum(axis=1, keepdims=True)
    rows = hit.any(axis=1)
    basis[rows] = hit[rows].astype(float)
    return basis


def _nystrom_matrix(kernel: Kernel, per_half: int) -> np.ndarray:
    """Matrix mapping half-wise polynomial node values ``v`` to ``int K(x_i, y) v(y) dy``.

    ``v`` is interpolated by one polynomial per half; the integral is split
    at ``y = -x_i, 0, x_i`` so kernel breaks fall on piece boundaries.
    """
    from scipy.interpolate import BarycentricInterpolator

    x, _ = _half_rule(per_half)
    m = x.size
    t, w = np.polynomial.legendre.leggauss(per_half)
    # four pieces per row: [-pi/2, -|x|], [-|x|, 0], [0, |x|], [|x|, pi/2]
    lo = np.stack([np.full(m, -HALF_PI), -np.abs(x), np.zeros(m), np.abs(x)], axis=1)[:, :, None]
    hi = np.stack([-np.abs(x), np.zeros(m), np.abs(x), np.full(m, HALF_PI)], axis=1)[:, :, None]
    ys = 0.5 * (hi - lo) * t + 0.5 * (hi + lo)
    wy = 0.5 * (hi - lo) * w
    kw = kernel(np.broadcast_to(x[:, None, None], ys.shape), ys) * wy
    out = np.zeros((m, m), dtype=complex)
    for side, pieces in ((0, slice(0, 2)), (1, slice(2, 4))):
        nodes = x[:per_half] if side == 0 else x[per_half:]
        bw = BarycentricInterpolator(nodes).wi
        yp = ys[:, pieces, :].reshape(m, -1)
        basis = _lagrange_basis(nodes, bw, yp.ravel()).reshape(m, yp.shape[1], per_half)
        cols = slice(0, per_half) if side == 0 else slice(per_half, None)
        out[:, cols] = np.einsum("ip,ipl->il", kw[:, pieces, :].reshape(m, -1), basis)
    return out


def _matrix_exp_series(A: np.ndarray, tol: float = 1e-16, max_terms: int = 60) -> np.ndarray:
    result = np.eye(A.shape[0], dtype=complex)
    term = result.copy()
    for k in range(1, max_terms + 1):
        term = term @ A / k
        result += term
        if np.max(np.abs(term)) < tol:
            break
    return result


def hermitize(epsilon: float, grid: QuadGrid, n_modes: int) -> DiscreteOperator:
    """``h = exp(-Q/2) H exp(Q/2)`` with closed-form Q and spectral H.

    Because Q is antisymmetric, ``h(x, y) = sum_n (-1)**n E_n g_n(x) g_n(y)``
    with ``g_n = exp(-Q/2) phi_n``. The ``g_n`` are computed on a half-wise
    Legendre rule where the Q integrals are exact across its breaks, using
    the truncated exponential series, then interpolated onto ``grid``.
    ``n_modes`` must stay well below the grid size for the discrete
    eigenfunctions to remain orthogonal.
    """
    from scipy.interpolate import BarycentricInterpolator

    per_half = max(64, n_modes + 64)
    x, _ = _half_rule(per_half)
    phis, energies = mode_samples(epsilon, n_modes, Source.EXACT, x + HALF_PI)
    if epsilon == 0:
        g = phis
    else:
        Q = _nystrom_matrix(lambda a, b: perturb.q_kernel(a, b, epsilon), per_half)
        g = (_matrix_exp_series(-0.5 * Q) @ phis.T).T
    u = symmetric_nodes(grid)
    left, right = u < 0, u >= 0
    on_grid = np.empty((n_modes, u.size), dtype=complex)
    on_grid[:, left] = BarycentricInterpolator(x[:per_half], g[:, :per_half].T)(u[left]).T
    on_grid[:, right] = BarycentricInterpolator(x[per_half:], g[:, per_half:].T)(u[right]).T
    signs = (-1.0) ** np.arange(n_modes)
    return from_samples(grid, (on_grid.T * (signs * energies)) @ on_grid)


def smeared_commutator_CH(epsilon: float, n_modes: int, count: int = 6) -> tuple[np.ndarray, np.ndarray]:
    """Smeared ``[C, H]`` and smeared ``H`` for the assembled C and spectral H.

    Uses ``<f_j, C H f_k> = sum_n (-1)**n E_n <C f_j, phi_n> <phi_n, f_k>``
    (C is a symmetric kernel), with ``C f_j`` integrated across its breaks.
    """
    per_half = max(64, n_modes + 64)
    x, w = _half_rule(per_half)
    phis, energies = mode_samples(epsilon, n_modes, Source.EXACT, x + HALF_PI)
    F = _smearing_values(count, x)
    c1 = _nystrom_matrix(perturb.c1_kernel, per_half)
    c2 = _nystrom_matrix(perturb.c2_kernel, per_half)
    CF = F[:, ::-1] + (epsilon * c1 @ F.T + epsilon**2 * c2 @ F.T).T
    weight = (-1.0) ** np.arange(n_modes) * energies
    proj_f = (F * w) @ phis.T
    proj_cf = (CF * w) @ phis.T
    CH = (proj_cf * weight) @ proj_f.T
    H = (proj_f * weight) @ proj_f.T
    return CH - CH.T, H


def hermiticity_residual(op: DiscreteOperator, count: int = 6) -> float:
    """Largest ``|<f_j, h f_k> - conj(<f_k, h f_j>)|`` over the smearing functions."""
    S = smeared(op, count)
    return float(np.max(np.abs(S - S.conj().T)))


# -- accurate smeared references --------------------------------------------------

def _gauss_pieces(breaks, order):
    t, w = np.polynomial.legendre.leggauss(order)
    xs, ws = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b > a:
            xs.append(0.5 * (b - a) * t + 0.5 * (a + b))
            ws.append(0.5 * (b - a) * w)
    return np.concatenate(xs), np.concatenate(ws)


def _smearing_values(count, u):
    return np.array([np.sin((k + 1) * (u + HALF_PI)) for k in range(count)])


def smeared_kernel(kernel: Kernel, count: int = 6, order: int = 48) -> np.ndarray:
    """``<f_j, K f_k>`` for a closed-form kernel, to near machine precision.

    The inner integral is split at ``y = -x, 0, x`` and the outer one at
    ``x = 0``, so every piece is smooth for kernels with breaks on those lines.
    """
    xs, wx = _gauss_pieces([-HALF_PI, 0.0, HALF_PI], order)
    Fx = _smearing_values(count, xs)
    out = np.zeros((count, count), dtype=complex)
    for i, x in enumerate(xs):
        ys, wy = _gauss_pieces(np.unique([-HALF_PI, -abs(x), 0.0, abs(x), HALF_PI]), order)
        inner = _smearing_values(count, ys) @ (kernel(np.full_like(ys, x), ys) * wy)
        out += wx[i] * np.outer(Fx[:, i], inner)
    return out


def smeared_parity(count: int = 6) -> np.ndarray:
    """``<f_j, P f_k>``; the smearing functions have parity ``(-1)**k``."""
    return np.diag([(-1.0) ** k * HALF_PI for k in range(count)]).astype(complex)


def mode_projections(epsilon: float, n_modes: int, count: int = 6, source=Source.EXACT) -> np.ndarray:
    """``int f_k(x) phi_n(x) dx`` with shape ``(count, n_modes)``.

    Each half of the well is integrated separately because the eigenfunctions
    are only piecewise smooth across the midpoint.
    """
    per_half = max(400, 2 * n_modes + 64)
    t, w = np.polynomial.legendre.leggauss(per_half)
    half = 0.5 * HALF_PI * (t + 1)
    x = np.concatenate([half, half + HALF_PI])
    wx = 0.5 * HALF_PI * np.concatenate([w, w])
    phis, _ = mode_samples(epsilon, n_modes, source, x)
    F = _smearing_values(count, x - HALF_PI)
    return (F * wx) @ phis.T


def smeared_spectral_sum(epsilon: float, n_modes: int, count: int = 6, source=Source.EXACT) -> np.ndarray:
    """Smeared truncated spectral sum ``sum_n <f_j, phi_n> <phi_n, f_k>`` (bilinear)."""
    p = mode_projections(epsilon, n_modes, count, source)
    return p @ p.T
