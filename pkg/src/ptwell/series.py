"""Truncated Fourier series behind the closed-form kernels.

Every series is written in original coordinates on ``[0, pi]`` and summed
term by term, so convergence toward the closed forms can be measured. The
parity series is a delta function and only converges once smeared against
a smooth function; :func:`smeared_parity_sum` does that with the test
function ``g(y) = y (pi - y)``, whose sine coefficients are known exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .model import HALF_PI, Convention, DomainError, check_domain

PI = np.pi
_CHUNK = 4096


class SeriesId(enum.Enum):
    C0_sum = "C0_sum"
    C1_region1 = "C1_region1"
    C2_region3 = "C2_region3"
    delta_int_x = "delta_int_x"
    delta_int_y = "delta_int_y"


@dataclass(frozen=True)
class FourierSumSpec:
    series_id: SeriesId
    n_terms: int

    def __post_init__(self):
        object.__setattr__(self, "series_id", SeriesId(self.series_id))
        if int(self.n_terms) != self.n_terms or self.n_terms < 1:
            raise ValueError(f"n_terms must be a positive integer, got {self.n_terms!r}")
        object.__setattr__(self, "n_terms", int(self.n_terms))


# each term function takes x, y (broadcast with a trailing mode axis) and n

def _parity_terms(x, y, n):
    m = n + 1
    return 2 / PI * (-1.0) ** n * np.sin(m * x) * np.sin(m * y)


def _first_order_terms(x, y, n):
    m = n + 1
    s = (-1.0) ** n
    cross = ((PI - x) * np.cos(m * x) * np.sin(m * y)
             + (PI - y) * np.sin(m * x) * np.cos(m * y)) * 1j * s / (PI * m)
    # the (1 - (-1)**n) factor belongs to each term; only odd n survive
    odd = (1 - s) * 1j * np.sin(m * x) * np.sin(m * y) / (PI * m**2)
    return cross - odd


def _second_order_terms(x, y, n):
    a = 2 * n + 1
    b = 2 * n + 2
    m = n + 1
    s = (-1.0) ** n
    return 2 / PI * (
        (x / 4 * np.cos(a * x) * np.sin(a * y) + y / 4 * np.sin(a * x) * np.cos(a * y)) / a**3
        + (x**2 + y**2) / 8 * s * np.sin(m * x) * np.sin(m * y) / m**2
        - (x / 4 * np.cos(b * x) * np.sin(b * y) + y / 4 * np.sin(b * x) * np.cos(b * y)) / b**3
        - 0.5 * np.sin(a * x) * np.sin(a * y) / a**4
        - 0.5 * np.sin(b * x) * np.sin(b * y) / b**4
        - x * y / 4 * s * np.cos(m * x) * np.cos(m * y) / m**2
    )


def _step_integral_x_terms(x, y, n):
    m = n + 1
    s = (-1.0) ** n
    return -2 / PI * s / m * np.cos(m * x) * np.sin(m * y) + s / (PI * m) * np.sin(2 * m * y)


def _step_integral_y_terms(x, y, n):
    return _step_integral_x_terms(y, x, n)


_TERMS = {
    SeriesId.C0_sum: _parity_terms,
    SeriesId.C1_region1: _first_order_terms,
    SeriesId.C2_region3: _second_order_terms,
    SeriesId.delta_int_x: _step_integral_x_terms,
    SeriesId.delta_int_y: _step_integral_y_terms,
}


def _check_region(series_id, x, y):
    tol = 1e-12
    if series_id is SeriesId.C1_region1 and (np.any(x < HALF_PI - tol) or np.any(y < HALF_PI - tol)):
        raise DomainError("first-order series is stated for x, y >= pi/2")
    if series_id is SeriesId.C2_region3 and (np.any(x > HALF_PI + tol) or np.any(y > HALF_PI + tol)):
        raise DomainError("second-order series is stated for x, y <= pi/2")


def _partial_sum(term, x, y, n_terms):
    x, y = np.broadcast_arrays(x, y)
    total = np.zeros(x.shape, dtype=complex)
    xe, ye = x[..., None], y[..., None]
    # fixed chunk order keeps the summation deterministic
    for start in range(0, n_terms, _CHUNK):
        n = np.arange(start, min(n_terms, start + _CHUNK), dtype=float)
        total += term(xe, ye, n).sum(axis=-1)
    return total


def fourier_sum(spec: FourierSumSpec, x, y):
    """Partial sum of the selected series at original coordinates ``(x, y)``.

    Raises DomainError outside ``[0, pi]`` or outside the quadrant the series
    is stated for.
    """
    x = check_domain(x, Convention.ORIGINAL, "x")
    y = check_domain(y, Convention.ORIGINAL, "y")
    _check_region(spec.series_id, x, y)
    out = _partial_sum(_TERMS[spec.series_id], x, y, spec.n_terms)
    return out.item() if out.ndim == 0 else out


# -- smeared forms ------------------------------------------------------------

def bump(y):
    """Smooth test function ``y (pi - y)`` vanishing at both walls."""
    return y * (PI - y)


def bump_sine_coefficient(m):
    """``int_0^pi y (pi - y) sin(m y) dy`` for integer ``m >= 1``."""
    m = np.asarray(m, dtype=float)
    return 2 * (1 - (-1.0) ** m) / m**3


def bump_integral(a, b):
    """``int_a^b y (pi - y) dy``."""
    prim = lambda t: PI * t**2 / 2 - t**3 / 3
    return prim(b) - prim(a)


def smeared_parity_sum(n_terms: int, x):
    """Parity series integrated against the bump in ``y``; converges to ``bump(pi - x)``."""
    x = check_domain(x, Convention.ORIGINAL)
    n = np.arange(n_terms, dtype=float)
    m = n + 1
    out = (2 / PI * (-1.0) ** n * bump_sine_coefficient(m) * np.sin(np.multiply.outer(x, m))).sum(-1)
    return out.item() if np.ndim(out) == 0 else out


def smeared_step_integral(n_terms: int, x):
    """Step-integral series in ``y`` integrated against the bump.

    The ``sin(2 m y)`` terms drop out because the bump has no even sine
    components; the result converges to ``int_{pi - x}^{pi/2} bump(y) dy``.
    """
    x = check_domain(x, Convention.ORIGINAL)
    n = np.arange(n_terms, dtype=float)
    m = n + 1
    coef = -2 / PI * (-1.0) ** n / m * bump_sine_coefficient(m)
    out = (coef * np.cos(np.multiply.outer(x, m))).sum(-1)
    return out.item() if np.ndim(out) == 0 else out


def step_integral_closed(x):
    """Exact value of the smeared step integral, ``int_{pi - x}^{pi/2} bump``."""
    x = check_domain(x, Convention.ORIGINAL)
    return bump_integral(PI - x, HALF_PI)
