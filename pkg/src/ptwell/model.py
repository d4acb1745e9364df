"""Domain types, coordinate conventions and step functions.

The well is either taken on its original interval ``(0, pi)``, where parity
reflects about ``pi/2``, or on the translated interval ``(-pi/2, pi/2)``,
where parity is ``x -> -x``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

HALF_PI = 0.5 * np.pi

# slack for coordinates produced by translating interval endpoints
_DOMAIN_SLACK = 1e-12


class DomainError(ValueError):
    """A coordinate lies outside the interval an operation is defined on."""


class GridError(ValueError):
    """A quadrature grid violates a structural requirement."""


class Convention(enum.Enum):
    ORIGINAL = "original"
    SYMMETRIC = "symmetric"

    @property
    def interval(self) -> tuple[float, float]:
        if self is Convention.ORIGINAL:
            return 0.0, np.pi
        return -HALF_PI, HALF_PI

    @property
    def center(self) -> float:
        return HALF_PI if self is Convention.ORIGINAL else 0.0

    def reflect(self, x):
        """Parity map of the convention: ``pi - x`` or ``-x``."""
        if self is Convention.ORIGINAL:
            return np.pi - np.asarray(x, dtype=float)
        return -np.asarray(x, dtype=float)


class Scheme(enum.Enum):
    GAUSS_LEGENDRE = "gauss-legendre"
    UNIFORM_MIDPOINT = "midpoint"


@dataclass(frozen=True)
class WellSpec:
    """Potential strength and coordinate convention of the square well.

    ``epsilon`` is only checked for sign. Perturbative results are meaningful
    for small values (the verification suites assume ``epsilon <= 0.5``).
    """

    epsilon: float
    convention: Convention = Convention.SYMMETRIC

    def __post_init__(self):
        if not np.isfinite(self.epsilon) or self.epsilon < 0:
            raise ValueError(f"epsilon must be finite and >= 0, got {self.epsilon!r}")
        object.__setattr__(self, "convention", Convention(self.convention))


def _frozen(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class QuadGrid:
    """Interior quadrature nodes and positive weights on the well interval.

    The node set must be mapped onto itself by the convention's parity
    reflection so that parity acts as an exact index permutation.
    """

    nodes: np.ndarray
    weights: np.ndarray
    convention: Convention = Convention.SYMMETRIC
    parity_index: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        conv = Convention(self.convention)
        object.__setattr__(self, "convention", conv)
        x = _frozen(self.nodes)
        w = _frozen(self.weights)
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "weights", w)

        if x.ndim != 1 or x.shape != w.shape or x.size < 2:
            raise GridError("nodes and weights must be 1-D arrays of equal length >= 2")
        a, b = conv.interval
        if np.any(np.diff(x) <= 0):
            raise GridError("nodes must be strictly increasing")
        if x[0] <= a or x[-1] >= b:
            raise GridError("nodes must lie strictly inside the interval")
        if np.any(w <= 0):
            raise GridError("weights must be positive")
        if abs(w.sum() - (b - a)) > 1e-12 * (b - a):
            raise GridError(f"weights sum to {w.sum()!r}, expected {b - a!r}")

        perm = x.size - 1 - np.arange(x.size)
        if not np.allclose(conv.reflect(x[perm]), x, rtol=0, atol=1e-13):
            raise GridError("node set is not symmetric under parity")
        if not np.allclose(w[perm], w, rtol=1e-13, atol=0):
            raise GridError("weights are not symmetric under parity")
        object.__setattr__(self, "parity_index", _frozen(perm, dtype=np.intp))

    @property
    def size(self) -> int:
        return self.nodes.size

    def same_as(self, other: "QuadGrid") -> bool:
        return self is other or (
            self.convention is other.convention
            and self.size == other.size
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )

    def integrate(self, values, axis=-1):
        return np.tensordot(np.asarray(values), self.weights, axes=([axis], [0]))


@dataclass(frozen=True, eq=False)
class KernelGrid:
    """Point samples ``values[i, j] = K(node_i, node_j)`` of a kernel."""

    grid: QuadGrid
    values: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values, dtype=complex)
        if v.shape != (self.grid.size, self.grid.size):
            raise ValueError(f"kernel values have shape {v.shape}, grid size is {self.grid.size}")
        object.__setattr__(self, "values", v)

    @classmethod
    def sample(cls, grid: QuadGrid, kernel) -> "KernelGrid":
        x = grid.nodes
        return cls(grid, kernel(x[:, None], x[None, :]))


@dataclass(frozen=True, eq=False)
class KernelExpansion:
    """Order-1 and order-2 kernels of C on a grid.

    The order-0 term is the parity delta of the convention and is never sampled.
    """

    spec: WellSpec
    grid: QuadGrid
    order1: KernelGrid
    order2: KernelGrid

    def __post_init__(self):
        v1, v2 = self.order1.values, self.order2.values
        if np.max(np.abs(v1.real), initial=0.0) > 1e-14:
            raise ValueError("order-1 kernel must be purely imaginary")
        if np.max(np.abs(v2.imag), initial=0.0) > 1e-14:
            raise ValueError("order-2 kernel must be real")
        for v in (v1, v2):
            if np.max(np.abs(v - v.T), initial=0.0) > 1e-14:
                raise ValueError("kernels must be symmetric in (x, y)")


def sgn_step(x):
    """Sign step: 1 for x > 0, 0 at exactly 0, -1 for x < 0."""
    s = np.sign(x)
    if np.ndim(s) == 0:
        return int(s)
    return s.astype(int)


def heaviside(x):
    """Heaviside step with the value 1 at x = 0."""
    h = np.asarray(x) >= 0
    if h.ndim == 0:
        return int(h)
    return h.astype(int)


def check_domain(x, convention: Convention, name: str = "x") -> np.ndarray:
    """Return ``x`` as an array, raising DomainError outside the closed interval."""
    x = np.asarray(x, dtype=float)
    a, b = Convention(convention).interval
    if np.any(~np.isfinite(x)) or np.any(x < a - _DOMAIN_SLACK) or np.any(x > b + _DOMAIN_SLACK):
        raise DomainError(f"{name} outside [{a:.6g}, {b:.6g}]")
    return x


def to_symmetric(x):
    """Map original coordinates in [0, pi] to [-pi/2, pi/2]."""
    x = check_domain(x, Convention.ORIGINAL)
    out = x - HALF_PI
    return float(out) if out.ndim == 0 else out


def to_original(x):
    """Inverse of :func:`to_symmetric`."""
    x = check_domain(x, Convention.SYMMETRIC)
    out = x + HALF_PI
    return float(out) if out.ndim == 0 else out


def make_grid(n_nodes: int, scheme=Scheme.GAUSS_LEGENDRE,
              convention=Convention.SYMMETRIC) -> QuadGrid:
    """Build a parity-symmetric quadrature grid on the well interval.

    Parameters
    ----------
    n_nodes : int
        Number of nodes, at least 2.
    scheme : Scheme or str
        ``"gauss-legendre"`` or ``"midpoint"`` (uniform cells).
    convention : Convention or str
        Interval the nodes live on.
    """
    if int(n_nodes) != n_nodes or n_nodes < 2:
        raise ValueError(f"n_nodes must be an integer >= 2, got {n_nodes!r}")
    n = int(n_nodes)
    scheme = Scheme(scheme)
    convention = Convention(convention)

    if scheme is Scheme.GAUSS_LEGENDRE:
        t, w = np.polynomial.legendre.leggauss(n)
        # exact antisymmetry so parity maps nodes onto nodes bit-for-bit
        t = 0.5 * (t - t[::-1])
        w = 0.5 * (w + w[::-1])
    else:
        t = (2.0 * np.arange(n) + 1.0 - n) / n
        w = np.full(n, 2.0 / n)
    x = HALF_PI * t
    w = HALF_PI * w
    if convention is Convention.ORIGINAL:
        x = x + HALF_PI
    return QuadGrid(x, w, convention)
