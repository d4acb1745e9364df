"""Named, tolerance-tagged numerical checks of every identity the package relies on.

Two kinds of tolerance appear. Analytic identities must hold at rounding
level. Truncation residuals of order ``eps**k`` are gated by a constant
times ``eps**k`` and, separately, by the exponent seen when ``eps`` is
halved. The constants were measured once and carry a safety factor of
about four; the exponents follow from the order of the truncation.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable

import numpy as np

from . import exact, opalg, perturb, series
from .model import HALF_PI, WellSpec, make_grid

SEED = 20240611
FLOOR = 1e-10
SLOPE_CUBIC = 2.8
SLOPE_QUADRATIC = 1.8
SLOPE_QUARTIC = 3.6
HERMITIZE_MAX_MODES = 40


class Suite(enum.Enum):
    ALGEBRAIC = "algebraic"
    SPECTRAL = "spectral"
    FOURIER = "fourier"
    QOP = "qop"
    HERMITIZE = "hermitize"
    ALL = "all"


@dataclass(frozen=True)
class CheckEntry:
    check_id: str
    residual: float
    tolerance: float
    comparison: str = "<="
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.residual):
            return False
        if self.comparison == ">=":
            return self.residual >= self.tolerance
        return self.residual <= self.tolerance

    def to_dict(self) -> dict:
        finite = lambda v: v if math.isfinite(v) else None
        return {"check_id": self.check_id, "residual": finite(self.residual),
                "tolerance": finite(self.tolerance),
                "comparison": self.comparison, "pass": self.passed, "metadata": self.metadata}


@dataclass(frozen=True)
class VerificationReport:
    entries: tuple[CheckEntry, ...]

    def __post_init__(self):
        ordered = tuple(sorted(self.entries, key=lambda e: e.check_id))
        ids = [e.check_id for e in ordered]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate check_id in report")
        object.__setattr__(self, "entries", ordered)

    @property
    def overall(self) -> bool:
        return all(e.passed for e in self.entries)

    def __getitem__(self, check_id: str) -> CheckEntry:
        for e in self.entries:
            if e.check_id == check_id:
                return e
        raise KeyError(check_id)

    @property
    def check_ids(self) -> list[str]:
        return [e.check_id for e in self.entries]

    def failures(self) -> list[CheckEntry]:
        return [e for e in self.entries if not e.passed]

    def to_dict(self) -> dict:
        return {"overall": self.overall, "entries": [e.to_dict() for e in self.entries]}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def slope(coarse: float, fine: float) -> float:
    """Observed order when ``eps`` is halved: ``log2(coarse / fine)``."""
    if fine <= 0:
        return math.inf if coarse > 0 else math.nan
    return math.log2(coarse / fine)


def cubic_tolerance(c: float, eps: float) -> float:
    return c * eps**3 + FLOOR


# -- measurements shared between checks ---------------------------------------------

class _Context:
    """Lazily computed quantities for one ``(spec, grid_size, n_modes)``."""

    def __init__(self, spec: WellSpec, grid_size: int, n_modes: int):
        self.eps = float(spec.epsilon)
        self.spec = spec
        self.grid_size = grid_size
        self.n_modes = n_modes

    @cached_property
    def grid(self):
        return make_grid(self.grid_size)

    def random_points(self, count=1000, lo=-HALF_PI, hi=HALF_PI):
        rng = np.random.default_rng(SEED)
        return rng.uniform(lo, hi, count), rng.uniform(lo, hi, count)

    # C * C - 1 in smeared max norm
    def c_squared(self, eps):
        C = opalg.build_C(eps, self.grid)
        R = opalg.compose(C, C) - opalg.identity_op(self.grid)
        return float(np.max(np.abs(opalg.smeared(R))))

    def eigenvector_residual(self, eps):
        C = opalg.build_C(eps, self.grid)
        u = opalg.symmetric_nodes(self.grid)
        w = self.grid.weights
        worst = 0.0
        for n in range(6):
            def mode(t, n=n):
                return perturb.phi(n, eps, t + HALF_PI)
            # jump-corrected apply; a plain Gauss product is only O(h) here
            d = opalg.apply_to_function(C, mode) - (-1) ** n * mode(u)
            worst = max(worst, float(np.sqrt(np.sum(w * np.abs(d) ** 2))))
        return worst

    def extracted_q_error(self, eps):
        Q = opalg.extract_Q(opalg.build_C(eps, self.grid))
        return opalg.operator_distance(Q, opalg.q_op(eps, self.grid))

    def second_log_coefficient(self, grid_size):
        _, q2 = opalg.log_coefficients(make_grid(grid_size))
        return float(np.max(np.abs(q2.kernel_values())))

    def smeared_sum(self, eps):
        return _smeared_sum_cached(float(eps), self.n_modes)

    @cached_property
    def smeared_c1(self):
        return opalg.smeared_kernel(perturb.c1_kernel)

    @cached_property
    def smeared_c2(self):
        return opalg.smeared_kernel(perturb.c2_kernel)

    def first_difference_error(self, eps):
        d1 = (self.smeared_sum(eps) - self.smeared_sum(-eps)) / (2 * eps)
        ref = self.smeared_c1
        return float(np.max(np.abs(d1 - ref)) / np.max(np.abs(ref)))

    def second_difference_error(self, eps):
        d2 = (self.smeared_sum(eps) + self.smeared_sum(-eps) - 2 * self.smeared_sum(0.0)) / eps**2
        ref = 2 * self.smeared_c2
        return float(np.max(np.abs(d2 - ref)) / np.max(np.abs(ref)))

    def energy_errors(self, eps):
        return np.array([abs(exact.solve_eigenvalue(n, eps).energy - perturb.energy(n, eps))
                         for n in range(4)])

    def eigenfunction_error(self, eps):
        x = np.linspace(0.0, np.pi, 401)
        return max(float(np.max(np.abs(exact.eigenfunction_value(exact.solve_normalized(n, eps), x)
                                        - perturb.phi(n, eps, x))))
                   for n in range(6))

    @property
    def hermitize_modes(self):
        return min(self.n_modes, HERMITIZE_MAX_MODES)

    def hermitized(self, eps):
        return opalg.hermitize(eps, self.grid, self.hermitize_modes)

    def hermiticity(self, eps):
        h = self.hermitized(eps)
        return opalg.hermiticity_residual(h) / float(np.max(np.abs(opalg.smeared(h))))


@lru_cache(maxsize=16)
def _smeared_sum_cached(eps, n_modes):
    # the sums are reused across suites and the epsilon-halving checks
    return opalg.smeared_spectral_sum(eps, n_modes)


# -- checks ------------------------------------------------------------------------------
# each check returns (residual, tolerance) or (residual, tolerance, comparison, extra)

Check = Callable[[_Context], tuple]
_REGISTRY: dict[Suite, list[tuple[str, Check, bool]]] = {s: [] for s in Suite if s is not Suite.ALL}


def _check(suite: Suite, check_id: str, needs_epsilon: bool = False):
    def register(fn):
        _REGISTRY[suite].append((check_id, fn, needs_epsilon))
        return fn
    return register


def _max_abs(a) -> float:
    return float(np.max(np.abs(a)))


# pointwise kernel identities

@_check(Suite.ALGEBRAIC, "kernel.c1_imaginary")
def _(ctx):
    x, y = ctx.random_points()
    return _max_abs(np.real(perturb.c1_kernel(x, y))), 1e-14, "<=", {"seed": SEED}


@_check(Suite.ALGEBRAIC, "kernel.c2_real")
def _(ctx):
    x, y = ctx.random_points()
    return _max_abs(np.imag(perturb.c2_kernel(x, y))), 1e-14, "<=", {"seed": SEED}


@_check(Suite.ALGEBRAIC, "kernel.c1_symmetric")
def _(ctx):
    x, y = ctx.random_points()
    return _max_abs(perturb.c1_kernel(x, y) - perturb.c1_kernel(y, x)), 1e-14, "<=", {"seed": SEED}


@_check(Suite.ALGEBRAIC, "kernel.c2_symmetric")
def _(ctx):
    x, y = ctx.random_points()
    return _max_abs(perturb.c2_kernel(x, y) - perturb.c2_kernel(y, x)), 1e-14, "<=", {"seed": SEED}


def boundary_lattice(count: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """``count`` points spread evenly along the edges of the symmetric square."""
    side = count // 4
    t = -HALF_PI + np.pi * np.arange(side) / side
    x = np.concatenate([t, np.full(side, HALF_PI), -t, np.full(side, -HALF_PI)])
    y = np.concatenate([np.full(side, -HALF_PI), t, np.full(side, HALF_PI), -t])
    return x, y


@_check(Suite.ALGEBRAIC, "kernel.c1_boundary")
def _(ctx):
    x, y = boundary_lattice()
    return _max_abs(perturb.c1_kernel(x, y)), 1e-12, "<=", {"points": x.size}


@_check(Suite.ALGEBRAIC, "kernel.c2_boundary")
def _(ctx):
    x, y = boundary_lattice()
    return _max_abs(perturb.c2_kernel(x, y)), 1e-12, "<=", {"points": x.size}


@_check(Suite.ALGEBRAIC, "kernel.q_antisymmetric")
def _(ctx):
    x, y = ctx.random_points()
    e = max(ctx.eps, 0.1)
    return _max_abs(perturb.q_kernel(x, y, e) + perturb.q_kernel(y, x, e)), 1e-14, "<=", {"seed": SEED}


@_check(Suite.ALGEBRAIC, "kernel.q_hermitian")
def _(ctx):
    x, y = ctx.random_points()
    e = max(ctx.eps, 0.1)
    return (_max_abs(perturb.q_kernel(x, y, e) - np.conj(perturb.q_kernel(y, x, e))), 1e-14, "<=",
            {"seed": SEED})


@_check(Suite.ALGEBRAIC, "kernel.q_first_order")
def _(ctx):
    x, y = ctx.random_points()
    e = max(ctx.eps, 0.1)
    return _max_abs(perturb.q_kernel(x, y, e) / e - perturb.c1_kernel(x, -y)), 1e-14, "<=", {"seed": SEED}


@_check(Suite.ALGEBRAIC, "kernel.c1_regional")
def _(ctx):
    x, y = ctx.random_points(lo=0.0, hi=np.pi)
    return (_max_abs(perturb.c1_kernel_by_region(x, y) - perturb.c1_kernel_original(x, y)), 1e-14, "<=",
            {"seed": SEED})


@_check(Suite.ALGEBRAIC, "kernel.c1_translation")
def _(ctx):
    x, y = ctx.random_points(lo=0.0, hi=np.pi)
    return (_max_abs(perturb.c1_kernel_original(x, y) - perturb.c1_kernel(x - HALF_PI, y - HALF_PI)),
            1e-14, "<=", {"seed": SEED})


@_check(Suite.ALGEBRAIC, "kernel.c2_region3_translation")
def _(ctx):
    x, y = ctx.random_points(lo=0.0, hi=HALF_PI)
    return (_max_abs(perturb.c2_kernel_region3(x, y) - perturb.c2_kernel(x - HALF_PI, y - HALF_PI)),
            1e-12, "<=", {"seed": SEED})


@_check(Suite.ALGEBRAIC, "kernel.phi_boundary")
def _(ctx):
    e = max(ctx.eps, 0.1)
    worst = max(abs(perturb.phi(n, e, x)) for n in range(6) for x in (0.0, np.pi))
    return float(worst), 1e-12, "<=", {"modes": 6}


@_check(Suite.ALGEBRAIC, "kernel.phi_midpoint_continuity")
def _(ctx):
    # value continuity directly, slope continuity by a fourth-order difference
    e = max(ctx.eps, 0.1)
    h = 1e-3
    offsets = np.array([-2, -1, 1, 2]) * h + HALF_PI
    stencil = np.array([1, -8, 8, -1]) / (12 * h)
    worst = 0.0
    for n in range(6):
        vl, vr = perturb.phi_branch(n, e, HALF_PI, "left"), perturb.phi_branch(n, e, HALF_PI, "right")
        dl = stencil @ perturb.phi_branch(n, e, offsets, "left")
        dr = stencil @ perturb.phi_branch(n, e, offsets, "right")
        worst = max(worst, abs(vl - vr), abs(dl - dr))
    return float(worst), 1e-8, "<=", {"modes": 6, "stencil_step": h}


# operator identities on the grid

@_check(Suite.ALGEBRAIC, "algebraic.parity_involution")
def _(ctx):
    P = opalg.parity_op(ctx.grid)
    return opalg.operator_distance(opalg.compose(P, P), opalg.identity_op(ctx.grid)), 0.0


@_check(Suite.ALGEBRAIC, "algebraic.identity_compose")
def _(ctx):
    C = opalg.build_C(max(ctx.eps, 0.1), ctx.grid)
    return opalg.operator_distance(opalg.compose(opalg.identity_op(ctx.grid), C), C), 1e-12


@_check(Suite.ALGEBRAIC, "algebraic.first_order_cancellation")
def _(ctx):
    u = opalg.symmetric_nodes(ctx.grid)
    x, y = u[:, None], u[None, :]
    return _max_abs(perturb.c1_kernel(-x, y) + perturb.c1_kernel(x, -y)), 1e-14


@_check(Suite.ALGEBRAIC, "algebraic.second_order_identity")
def _(ctx):
    g = ctx.grid
    c1, _ = opalg.c_pieces(g)
    u = opalg.symmetric_nodes(g)
    x, y = u[:, None], u[None, :]
    lhs = (perturb.c2_kernel(-x, y) + perturb.c2_kernel(x, -y)
           + opalg.compose(c1, c1).kernel_values())
    return _max_abs(lhs), 1e-6


@_check(Suite.ALGEBRAIC, "algebraic.c_squared")
def _(ctx):
    return ctx.c_squared(ctx.eps), cubic_tolerance(0.05, ctx.eps)


@_check(Suite.ALGEBRAIC, "algebraic.c_squared_slope", needs_epsilon=True)
def _(ctx):
    return slope(ctx.c_squared(ctx.eps), ctx.c_squared(ctx.eps / 2)), SLOPE_CUBIC, ">="


@_check(Suite.ALGEBRAIC, "algebraic.pt_commutation")
def _(ctx):
    C = opalg.build_C(ctx.eps, ctx.grid)
    return opalg.operator_distance(opalg.pt_conjugate(C), C), cubic_tolerance(0.0, ctx.eps)


@_check(Suite.ALGEBRAIC, "algebraic.c_commutes_with_h")
def _(ctx):
    comm, H = opalg.smeared_commutator_CH(ctx.eps, ctx.hermitize_modes)
    return _max_abs(comm) / _max_abs(H), cubic_tolerance(0.03, ctx.eps), "<=", {"relative": True}


@_check(Suite.ALGEBRAIC, "algebraic.c_eigenvectors")
def _(ctx):
    return ctx.eigenvector_residual(ctx.eps), cubic_tolerance(1.0, ctx.eps), "<=", {"modes": 6}


# spectral and exact-solver checks

@_check(Suite.SPECTRAL, "spectral.energy_formula")
def _(ctx):
    e = ctx.eps
    return float(np.max(ctx.energy_errors(e))), 5 * e**4 + FLOOR, "<=", {"modes": 4}


@_check(Suite.SPECTRAL, "spectral.energy_slope", needs_epsilon=True)
def _(ctx):
    coarse, fine = ctx.energy_errors(ctx.eps), ctx.energy_errors(ctx.eps / 2)
    return min(slope(c, f) for c, f in zip(coarse, fine)), SLOPE_QUARTIC, ">=", {"modes": 4}


@_check(Suite.SPECTRAL, "spectral.pt_normalization")
def _(ctx):
    x = np.linspace(0.0, np.pi, 201)
    worst = 0.0
    for n in range(9):
        sol = exact.solve_normalized(n, ctx.eps)
        psi = exact.eigenfunction_value(sol, x)
        worst = max(worst, _max_abs(np.conj(psi[::-1]) - psi),
                    abs(exact.bilinear_norm(sol) - (-1) ** n))
    return worst, 1e-9, "<=", {"modes": 9}


@_check(Suite.SPECTRAL, "spectral.orthogonality")
def _(ctx):
    p = opalg.mode_samples(ctx.eps, 9, opalg.Source.EXACT, _split_nodes)[0]
    gram = (p * _split_weights) @ p.T
    return _max_abs(gram - np.diag((-1.0) ** np.arange(9))), 1e-6, "<=", {"modes": 9}


@_check(Suite.SPECTRAL, "spectral.eigenfunction_order", needs_epsilon=True)
def _(ctx):
    return slope(ctx.eigenfunction_error(ctx.eps), ctx.eigenfunction_error(ctx.eps / 2)), SLOPE_CUBIC, ">="


@_check(Suite.SPECTRAL, "spectral.sum_consistency")
def _(ctx):
    e = ctx.eps
    C = opalg.smeared_parity() + e * ctx.smeared_c1 + e**2 * ctx.smeared_c2
    return _max_abs(ctx.smeared_sum(e) - C), cubic_tolerance(0.5, e)


@_check(Suite.SPECTRAL, "spectral.first_order_difference", needs_epsilon=True)
def _(ctx):
    return ctx.first_difference_error(ctx.eps), 0.05, "<=", {"relative": True}


@_check(Suite.SPECTRAL, "spectral.second_order_difference", needs_epsilon=True)
def _(ctx):
    return ctx.second_difference_error(ctx.eps), 0.10, "<=", {"relative": True}


@_check(Suite.SPECTRAL, "spectral.second_order_slope", needs_epsilon=True)
def _(ctx):
    e = ctx.eps
    return slope(ctx.second_difference_error(e), ctx.second_difference_error(e / 2)), SLOPE_QUADRATIC, ">="


def _split_rule(per_half=200):
    t, w = np.polynomial.legendre.leggauss(per_half)
    half = 0.5 * HALF_PI * (t + 1)
    return np.concatenate([half, half + HALF_PI]), 0.5 * HALF_PI * np.concatenate([w, w])


_split_nodes, _split_weights = _split_rule()


# Fourier series: residual is the worst N * error over N in FOURIER_TERMS

FOURIER_TERMS = (100, 1000, 10_000, 100_000)


def fourier_points(count: int = 20):
    """Fixed interior points (original coordinates) for each series region."""
    rng = np.random.default_rng(SEED)
    upper = HALF_PI + rng.uniform(0.05, HALF_PI - 0.05, (2, count))
    lower = rng.uniform(0.05, HALF_PI - 0.05, (2, count))
    anywhere = rng.uniform(0.05, np.pi - 0.05, count)
    return upper, lower, anywhere


def _scaled_worst(errors):
    return float(max(n * err for n, err in zip(FOURIER_TERMS, errors)))


@_check(Suite.FOURIER, "fourier.C0_sum")
def _(ctx):
    _, _, x = fourier_points()
    errs = [_max_abs(series.smeared_parity_sum(n, x) - series.bump(np.pi - x)) for n in FOURIER_TERMS]
    return _scaled_worst(errs), 10.0, "<=", {"terms": list(FOURIER_TERMS), "smeared": True}


@_check(Suite.FOURIER, "fourier.C1_region1")
def _(ctx):
    (x, y), _, _ = fourier_points()
    ref = perturb.c1_kernel_original(x, y)
    errs = [_max_abs(series.fourier_sum(series.FourierSumSpec("C1_region1", n), x, y) - ref)
            for n in FOURIER_TERMS]
    return _scaled_worst(errs), 10.0, "<=", {"terms": list(FOURIER_TERMS)}


@_check(Suite.FOURIER, "fourier.C2_region3")
def _(ctx):
    _, (x, y), _ = fourier_points()
    ref = perturb.c2_kernel_region3(x, y)
    errs = [_max_abs(series.fourier_sum(series.FourierSumSpec("C2_region3", n), x, y) - ref)
            for n in FOURIER_TERMS]
    return _scaled_worst(errs), 10.0, "<=", {"terms": list(FOURIER_TERMS)}


@_check(Suite.FOURIER, "fourier.delta_int")
def _(ctx):
    _, _, x = fourier_points()
    ref = series.step_integral_closed(x)
    errs = [_max_abs(series.smeared_step_integral(n, x) - ref) for n in FOURIER_TERMS]
    return _scaled_worst(errs), 10.0, "<=", {"terms": list(FOURIER_TERMS), "smeared": True}


@_check(Suite.FOURIER, "fourier.delta_int_symmetry")
def _(ctx):
    (x, y), _, _ = fourier_points()
    a = series.fourier_sum(series.FourierSumSpec("delta_int_x", 1000), x, y)
    b = series.fourier_sum(series.FourierSumSpec("delta_int_y", 1000), y, x)
    return _max_abs(a - b), 1e-12


# Q extraction

@_check(Suite.QOP, "qop.first_order_coefficient")
def _(ctx):
    q1, _ = opalg.log_coefficients(ctx.grid)
    u = opalg.symmetric_nodes(ctx.grid)
    ref = perturb.q_kernel(u[:, None], u[None, :], 1.0)
    return _max_abs(q1.kernel_values() - ref), 1e-10


@_check(Suite.QOP, "qop.second_order_coefficient")
def _(ctx):
    return ctx.second_log_coefficient(ctx.grid_size), 1e-6, "<=", {"grid_size": ctx.grid_size}


@_check(Suite.QOP, "qop.second_order_refinement")
def _(ctx):
    n = ctx.grid_size
    ratio = ctx.second_log_coefficient(n) / ctx.second_log_coefficient(2 * n)
    return ratio, 4.0, ">=", {"grid_sizes": [n, 2 * n]}


@_check(Suite.QOP, "qop.extracted_vs_closed")
def _(ctx):
    return ctx.extracted_q_error(ctx.eps), cubic_tolerance(0.2, ctx.eps)


@_check(Suite.QOP, "qop.extracted_slope", needs_epsilon=True)
def _(ctx):
    e = ctx.eps
    return slope(ctx.extracted_q_error(e), ctx.extracted_q_error(e / 2)), SLOPE_CUBIC, ">="


# Hermitization

@_check(Suite.HERMITIZE, "hermitize.hermiticity")
def _(ctx):
    return (ctx.hermiticity(ctx.eps), cubic_tolerance(0.02, ctx.eps), "<=",
            {"relative": True, "modes": ctx.hermitize_modes})


@_check(Suite.HERMITIZE, "hermitize.hermiticity_slope", needs_epsilon=True)
def _(ctx):
    e = ctx.eps
    return slope(ctx.hermiticity(e), ctx.hermiticity(e / 2)), SLOPE_CUBIC, ">=", {"modes": ctx.hermitize_modes}


@_check(Suite.HERMITIZE, "hermitize.spectrum")
def _(ctx):
    ev = np.linalg.eigvals(ctx.hermitized(ctx.eps).matrix)
    worst = max(float(np.min(np.abs(ev - exact.solve_eigenvalue(n, ctx.eps).energy))) for n in range(4))
    return worst, 1e-3, "<=", {"modes": ctx.hermitize_modes}


def _unpack(result):
    residual, tolerance, *rest = result
    comparison = rest[0] if rest else "<="
    extra = rest[1] if len(rest) > 1 else {}
    return float(residual), float(tolerance), comparison, extra


def run_suite(spec: WellSpec, grid_size: int = 128, n_modes: int = 200,
              suite=Suite.ALL) -> VerificationReport:
    """Run one suite (or all) and collect a report.

    Meaningful for ``epsilon <= 0.5`` and ``grid_size >= 32``; smaller grids
    run but fail their quadrature checks. Any exception inside a check is
    recorded as a failed entry carrying the error text. At ``epsilon = 0``
    the difference and slope checks are omitted.
    """
    suite = Suite(suite)
    chosen = list(_REGISTRY) if suite is Suite.ALL else [suite]
    ctx = _Context(spec, int(grid_size), int(n_modes))
    base = {"epsilon": ctx.eps, "grid_size": ctx.grid_size, "n_modes": ctx.n_modes}
    entries = []
    for s in chosen:
        for check_id, fn, needs_eps in _REGISTRY[s]:
            if needs_eps and ctx.eps == 0:
                continue
            try:
                residual, tol, comparison, extra = _unpack(fn(ctx))
                entries.append(CheckEntry(check_id, residual, tol, comparison, {**base, **extra}))
            except Exception as exc:
                entries.append(CheckEntry(check_id, math.nan, math.nan, "<=",
                                          {**base, "error": f"{type(exc).__name__}: {exc}"}))
    return VerificationReport(tuple(entries))
