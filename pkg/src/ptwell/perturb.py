"""Closed-form perturbative eigenfunctions, energies and operator kernels.

Everything here is a literal transcription of second-order perturbation
theory for the complex square well. Eigenfunctions and the first-order
regional kernels use the original interval ``[0, pi]``; the unified kernels
``c1_kernel``, ``c2_kernel`` and ``q_kernel`` use ``[-pi/2, pi/2]``.
"""

from __future__ import annotations

import numpy as np

from .model import HALF_PI, Convention, DomainError, check_domain

PI = np.pi
_I_POWERS = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


def _ipow(k: int) -> complex:
    return _I_POWERS[k % 4]


def _scalar_or_array(a):
    a = np.asarray(a)
    return a.item() if a.ndim == 0 else a


def a_coeff(n: int, epsilon: float) -> float:
    """Normalization coefficient of mode ``n`` through order epsilon**2."""
    s = (-1) ** n
    m = n + 1
    bracket = (2 - s) / ((6 - 2 * s) * m**4) - s * PI**2 / (16 * m**2)
    return np.sqrt(2 / PI) * (1 - s * bracket * epsilon**2)


def energy(n: int, epsilon: float) -> float:
    """Second-order perturbative eigenvalue."""
    s = (-1) ** n
    return (n + 1) ** 2 + s * (2 - s) / (4 * (n + 1) ** 2) * epsilon**2


def _phi_right(n, eps, x):
    s = (-1) ** n
    m = n + 1
    odd = (1 - s) // 2
    even = (1 + s) // 2
    lead = _ipow(odd) * np.sin(m * x)
    first = (_ipow(even) * (PI / 2 - x / 2) * s * np.cos(m * x) / m
             - 0.5 * (1 - s) * np.sin(m * x) / (2 * m**2))
    second = _ipow(odd) * (0.5 * (1 + s) * (x / 4 - PI / 4) * np.cos(m * x) / m**3
                           + (x**2 / 8 - PI * x / 4 + PI**2 / 16) * np.sin(m * x) / m**2)
    return lead + first * eps + second * eps**2


def _phi_left(n, eps, x):
    s = (-1) ** n
    m = n + 1
    odd = (1 - s) // 2
    even = (1 + s) // 2
    lead = _ipow(odd) * np.sin(m * x)
    first = (_ipow(even) * x / 2 * s * np.cos(m * x) / m
             + 0.5 * (1 - s) * np.sin(m * x) / (2 * m**2))
    second = _ipow(odd) * (0.5 * (1 + s) * x / 4 * np.cos(m * x) / m**3
                           + (x**2 / 8 - PI**2 / 16) * np.sin(m * x) / m**2)
    return lead + first * eps + second * eps**2


def phi(n: int, epsilon: float, x):
    """Second-order perturbative eigenfunction at original coordinates ``x``.

    The left-half expression is used for ``x < pi/2``, the right-half one
    otherwise; the two agree at the midpoint.
    """
    x = check_domain(x, Convention.ORIGINAL)
    vals = np.where(x < HALF_PI, _phi_left(n, epsilon, x), _phi_right(n, epsilon, x))
    return _scalar_or_array(a_coeff(n, epsilon) * vals)


def phi_branch(n: int, epsilon: float, x, side: str):
    """Evaluate the ``"left"`` or ``"right"`` half-well expression at any ``x``.

    Unlike :func:`phi` no branch selection happens, so both expressions can
    be compared at the midpoint.
    """
    fn = {"left": _phi_left, "right": _phi_right}[side]
    x = check_domain(x, Convention.ORIGINAL)
    return _scalar_or_array(a_coeff(n, epsilon) * fn(n, epsilon, x))


# -- first-order kernel -----------------------------------------------------

def _c1_imag(x, y):
    return 0.25 * (x + y + np.sign(x + y) * (np.abs(x - y) - PI))


def c1_kernel(x, y):
    """First-order kernel of C on the symmetric interval (purely imaginary)."""
    x = check_domain(x, Convention.SYMMETRIC, "x")
    y = check_domain(y, Convention.SYMMETRIC, "y")
    return _scalar_or_array(1j * _c1_imag(x, y))


def c1_kernel_original(x, y):
    """Unified first-order kernel on ``[0, pi]`` written with Heaviside steps."""
    x = check_domain(x, Convention.ORIGINAL, "x")
    y = check_domain(y, Convention.ORIGINAL, "y")
    d = np.abs(x - y) - PI
    th_below = (PI - x - y >= 0).astype(float)
    th_above = (x + y - PI >= 0).astype(float)
    return _scalar_or_array(0.25j * (x + y - PI - th_below * d + th_above * d))


def c1_kernel_by_region(x, y):
    """First-order kernel on ``[0, pi]`` from the four quadrant formulas."""
    x = check_domain(x, Convention.ORIGINAL, "x")
    y = check_domain(y, Convention.ORIGINAL, "y")
    x, y = np.broadcast_arrays(x, y)
    th = lambda u: (u >= 0).astype(float)
    rx, ry = x > HALF_PI, y > HALF_PI
    both_right = 0.25j * (np.abs(x - y) + x + y - 2 * PI)
    x_right = 0.5j * ((x - PI) * th(x + y - PI) + y * th(PI - x - y))
    both_left = 0.25j * (-np.abs(x - y) + x + y)
    y_right = 0.5j * ((y - PI) * th(x + y - PI) + x * th(PI - x - y))
    out = np.where(rx & ry, both_right,
                   np.where(rx, x_right, np.where(ry, y_right, both_left)))
    return _scalar_or_array(out)


# -- second-order kernel ----------------------------------------------------

def _theta(u, at_zero):
    return np.where(u > 0, 1.0, np.where(u < 0, 0.0, at_zero))


def _c2_real(x, y, tie=0.5):
    s = np.sign(x + y)
    ax, ay = np.abs(x), np.abs(y)
    t = lambda u: _theta(u, tie)
    bracket = (ax * (t(x - y) * t(-x - y) + t(y - x) * t(x + y))
               + ay * (t(y - x) * t(-x - y) + t(x - y) * t(x + y)))
    return (PI**3 / 96 + x * y * PI / 8
            - PI**2 / 16 * (x + y) * s
            + PI / 8 * (x * ax + y * ay) * s
            - (x**3 + y**3) / 24 * s
            - (y**3 - x**3) / 24 * np.sign(y - x)
            - x * y / 4 * bracket)


def c2_kernel(x, y, ties: str = "limit"):
    """Second-order kernel of C on the symmetric interval (real).

    With ``ties="printed"`` the Heaviside factors take the value 1 at zero.
    On the lines ``x = y`` and ``x = -y`` that counts the ``|x|``/``|y|``
    bracket twice and yields a value off the continuous surface by
    ``|x|**3 / 4``. The default ``"limit"`` uses 1/2 there, which reproduces
    the continuous kernel on those lines.
    """
    if ties not in ("limit", "printed"):
        raise ValueError(f"ties must be 'limit' or 'printed', got {ties!r}")
    x = check_domain(x, Convention.SYMMETRIC, "x")
    y = check_domain(y, Convention.SYMMETRIC, "y")
    return _scalar_or_array(_c2_real(x, y, 0.5 if ties == "limit" else 1.0) + 0j)


def c2_kernel_region3(x, y):
    """Second-order kernel on ``[0, pi/2]**2`` (both points left of the midpoint).

    The ``|x - y|**3`` term is already symmetric and enters once; only the
    polynomial part is symmetrized.
    """
    x = check_domain(x, Convention.ORIGINAL, "x")
    y = check_domain(y, Convention.ORIGINAL, "y")
    if np.any(x > HALF_PI + 1e-12) or np.any(y > HALF_PI + 1e-12):
        raise DomainError("region-3 kernel needs x, y <= pi/2")
    part = lambda a, b: a * a * b / 8 + a**3 / 24 - a * PI * b / 16
    return _scalar_or_array(-np.abs(x - y) ** 3 / 24 + part(x, y) + part(y, x))


def c2_kernel_original(x, y):
    """Second-order kernel on ``[0, pi]`` by translation of :func:`c2_kernel`."""
    x = check_domain(x, Convention.ORIGINAL, "x")
    y = check_domain(y, Convention.ORIGINAL, "y")
    return _scalar_or_array(_c2_real(x - HALF_PI, y - HALF_PI) + 0j)


# -- Q ------------------------------------------------------------------------

def q_kernel(x, y, epsilon: float):
    """Kernel of Q with ``C = exp(Q) P``, through order epsilon**2."""
    x = check_domain(x, Convention.SYMMETRIC, "x")
    y = check_domain(y, Convention.SYMMETRIC, "y")
    return _scalar_or_array(0.25j * epsilon * (x - y + np.sign(x - y) * (np.abs(x + y) - PI)))


def q_kernel_original(x, y, epsilon: float):
    """:func:`q_kernel` on ``[0, pi]`` coordinates."""
    x = check_domain(x, Convention.ORIGINAL, "x")
    y = check_domain(y, Convention.ORIGINAL, "y")
    return q_kernel(x - HALF_PI, y - HALF_PI, epsilon)


def kernels_for(convention: Convention):
    """``(c1, c2)`` kernel callables for the given convention."""
    if Convention(convention) is Convention.ORIGINAL:
        return c1_kernel_original, c2_kernel_original
    return c1_kernel, c2_kernel
