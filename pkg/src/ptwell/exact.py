"""Exact eigenpairs of the complex square well.

On the original interval the eigenfunction is ``A sin(kL x)`` left of the
midpoint and ``B sin(kR (pi - x))`` right of it, with ``kL**2 = E + i eps``
and ``kR**2 = E - i eps``. Continuity of value and slope at ``pi/2`` gives a
transcendental equation in ``E`` which is solved by complex Newton iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .model import HALF_PI, Convention, QuadGrid, check_domain

MAX_NEWTON_ITERATIONS = 50


class SolverError(RuntimeError):
    """Newton iteration failed; ``last`` holds the final iterate."""

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class ModeMismatchError(SolverError):
    """The iteration converged onto an eigenvalue belonging to another mode."""


class NormalizationError(RuntimeError):
    """The bilinear norm integral vanishes, so PT normalization is impossible."""


@dataclass(frozen=True)
class EigenSolution:
    n: int
    epsilon: float
    energy: complex
    kL: complex
    kR: complex
    ampL: complex
    ampR: complex
    norm_phase: complex = 1.0 + 0.0j
    normalized: bool = False


def _wavenumbers(E, epsilon):
    E = np.asarray(E, dtype=complex)
    return np.sqrt(E + 1j * epsilon), np.sqrt(E - 1j * epsilon)


def matching_residual(E, epsilon):
    """Determinant of the matching conditions at the midpoint.

    Zeros in ``E`` are the exact eigenvalues. Principal square-root branch.
    """
    kL, kR = _wavenumbers(E, epsilon)
    a = HALF_PI
    f = kL * np.cos(kL * a) * np.sin(kR * a) + kR * np.cos(kR * a) * np.sin(kL * a)
    return complex(f) if np.ndim(f) == 0 else f


def matching_residual_derivative(E, epsilon):
    """Complex derivative of :func:`matching_residual` with respect to ``E``."""
    kL, kR = _wavenumbers(E, epsilon)
    a = HALF_PI
    cL, sL = np.cos(kL * a), np.sin(kL * a)
    cR, sR = np.cos(kR * a), np.sin(kR * a)
    df_dkL = cL * sR - a * kL * sL * sR + a * kR * cR * cL
    df_dkR = a * kL * cL * cR + cR * sL - a * kR * sR * sL
    d = df_dkL / (2 * kL) + df_dkR / (2 * kR)
    return complex(d) if np.ndim(d) == 0 else d


def perturbative_seed(n: int, epsilon: float) -> float:
    s = (-1) ** n
    return (n + 1) ** 2 + s * (2 - s) * epsilon**2 / (4 * (n + 1) ** 2)


def solve_eigenvalue(n: int, epsilon: float, tol: float = 1e-12) -> EigenSolution:
    """Newton-solve the matching condition for mode ``n``.

    The iteration starts from the second-order perturbative energy and stops
    once ``|f(E)| < tol`` or the step has stalled at rounding level (the
    residual of high modes cannot drop below ``~ k**2 * machine eps``).

    Raises
    ------
    SolverError
        No convergence within ``MAX_NEWTON_ITERATIONS``.
    ModeMismatchError
        The root is closer to another unperturbed level than to ``(n+1)**2``.
    """
    if n < 0 or int(n) != n:
        raise ValueError(f"mode index must be a non-negative integer, got {n!r}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = int(n)
    epsilon = float(epsilon)

    E = complex(perturbative_seed(n, epsilon))
    stall = 8 * np.finfo(float).eps
    for _ in range(MAX_NEWTON_ITERATIONS):
        f = matching_residual(E, epsilon)
        if abs(f) < tol:
            break
        step = f / matching_residual_derivative(E, epsilon)
        E -= step
        if abs(step) <= stall * abs(E):
            break
    else:
        raise SolverError(f"Newton iteration for mode {n} did not converge", last=E)

    levels = (np.arange(max(n - 1, 0), n + 2) + 1.0) ** 2
    if levels[np.argmin(np.abs(E - levels))] != (n + 1) ** 2:
        raise ModeMismatchError(f"root {E!r} does not belong to mode {n}", last=E)

    kL, kR = _wavenumbers(E, epsilon)
    kL, kR = complex(kL), complex(kR)
    sL, sR = np.sin(kL * HALF_PI), np.sin(kR * HALF_PI)
    dL, dR = kL * np.cos(kL * HALF_PI), -kR * np.cos(kR * HALF_PI)
    # use whichever continuity equation is better conditioned
    ampR = sL / sR if abs(sR) >= abs(dR) else dL / dR
    return EigenSolution(n, epsilon, E, kL, kR, 1.0 + 0.0j, complex(ampR))


def eigenfunction_value(sol: EigenSolution, x):
    """Evaluate the eigenfunction at original coordinates ``x`` in [0, pi]."""
    x = check_domain(x, Convention.ORIGINAL)
    left = sol.ampL * np.sin(sol.kL * x)
    right = sol.ampR * np.sin(sol.kR * (np.pi - x))
    out = np.where(x <= HALF_PI, left, right)
    return complex(out) if out.ndim == 0 else out


def _sin_sq_integral(k, a):
    # int_0^a sin(k x)^2 dx
    return 0.5 * a - np.sin(2 * k * a) / (4 * k)


def _leading_mode(n, x):
    return (1j if n % 2 else 1.0) * np.sin((n + 1) * x)


def _split_gauss(n_modes_hint):
    # rounded up so that few distinct rules are ever built
    return _split_gauss_rule(128 * (1 + (2 * n_modes_hint + 32) // 128))


@lru_cache(maxsize=None)
def _split_gauss_rule(m):
    t, w = np.polynomial.legendre.leggauss(m)
    xl = 0.5 * HALF_PI * (t + 1)
    wl = 0.5 * HALF_PI * w
    x, w = np.concatenate([xl, xl + HALF_PI]), np.concatenate([wl, wl])
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def pt_normalize(sol: EigenSolution, grid: QuadGrid | None = None) -> EigenSolution:
    """Scale an eigenfunction so that ``PT psi = psi`` and ``int psi**2 = (-1)**n``.

    The bilinear integral is evaluated in closed form unless a quadrature
    grid is supplied. Of the two remaining choices ``+psi`` and ``-psi`` the
    one continuously connected to ``i**(n mod 2) sin((n+1) x)`` is returned.
    """
    A, B = complex(sol.ampL), complex(sol.ampR)
    if A == 0 or B == 0:
        raise NormalizationError(f"mode {sol.n}: amplitude vanishes on one half of the well")
    # PT psi(x) = conj(psi(pi - x)); invariance needs conj(c B) = c A
    phase = np.exp(-0.5j * np.angle(A / np.conj(B)))
    A, B = A * phase, B * phase

    if grid is None:
        norm2 = A**2 * _sin_sq_integral(sol.kL, HALF_PI) + B**2 * _sin_sq_integral(sol.kR, HALF_PI)
    else:
        x = grid.nodes + (HALF_PI if grid.convention is Convention.SYMMETRIC else 0.0)
        psi = eigenfunction_value(replace(sol, ampL=A, ampR=B), x)
        norm2 = grid.integrate(psi**2)
    if not np.isfinite(norm2) or abs(norm2) < 1e-12:
        raise NormalizationError(f"mode {sol.n}: bilinear norm {norm2!r} vanishes")
    scale = 1.0 / np.sqrt(abs(norm2.real))
    A, B = A * scale, B * scale

    x, w = _split_gauss(sol.n)
    trial = replace(sol, ampL=A, ampR=B)
    overlap = np.sum(w * np.conj(_leading_mode(sol.n, x)) * eigenfunction_value(trial, x))
    sign = 1.0 if overlap.real >= 0 else -1.0
    return replace(sol, ampL=sign * A, ampR=sign * B,
                   norm_phase=complex(sign * phase), normalized=True)


def solve_normalized(n: int, epsilon: float, tol: float = 1e-12) -> EigenSolution:
    """Solve for mode ``n`` and PT-normalize it in one call."""
    return pt_normalize(solve_eigenvalue(n, epsilon, tol))


def bilinear_norm(sol: EigenSolution) -> complex:
    """``int_0^pi psi(x)**2 dx`` in closed form."""
    return complex(sol.ampL**2 * _sin_sq_integral(sol.kL, HALF_PI)
                   + sol.ampR**2 * _sin_sq_integral(sol.kR, HALF_PI))
