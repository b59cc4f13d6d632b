"""Periodic grids on the unit torus and the field types built on them.

The torus is always [0,1)^d with d in {1,2}; integer wave vectors n give
angular wave vectors k = 2*pi*n, so the half-Laplacian has eigenvalues
2*pi*|n|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MEAN_ZERO_RTOL = 1e-12


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Uniform N^d grid on [0,1)^d with spacing h = 1/N."""

    d: int
    N: int

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.d}")
        if self.N < 8 or not _is_power_of_two(self.N):
            raise ValueError(f"N must be a power of two >= 8, got {self.N}")

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.d

    @property
    def size(self) -> int:
        return self.N**self.d

    @property
    def cell_volume(self) -> float:
        return self.h**self.d

    def axis_coords(self) -> np.ndarray:
        return np.arange(self.N) * self.h

    def coords(self) -> tuple:
        """Node coordinate arrays, broadcastable over the grid shape."""
        x = self.axis_coords()
        if self.d == 1:
            return (x,)
        return tuple(np.meshgrid(x, x, indexing="ij"))

    def modes(self) -> tuple:
        """Integer wave-vector arrays n_j, broadcastable over the grid shape."""
        n = np.fft.fftfreq(self.N, d=1.0 / self.N)
        if self.d == 1:
            return (n,)
        return tuple(np.meshgrid(n, n, indexing="ij"))

    def mode_radius(self) -> np.ndarray:
        """|n| over the spectral grid."""
        ns = self.modes()
        return np.sqrt(sum(nj**2 for nj in ns))


def periodic_delta(a: np.ndarray) -> np.ndarray:
    """Signed displacement wrapped to [-1/2, 1/2)."""
    return (np.asarray(a) + 0.5) % 1.0 - 0.5


def periodic_distance(x, y) -> np.ndarray:
    """Periodic Euclidean distance between points of [0,1)^d."""
    dx = periodic_delta(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
    if dx.ndim == 0:
        return np.abs(dx)
    return np.sqrt(np.sum(dx**2, axis=-1))


@dataclass(frozen=True)
class ScalarField:
    """Real field sampled on the grid nodes (row-major)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(self.grid.shape)
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        v = np.ascontiguousarray(v)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, grid: GridSpec, c: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(c)))

    @classmethod
    def from_function(cls, grid: GridSpec, func) -> "ScalarField":
        return cls(grid, func(*grid.coords()))

    def mean(self) -> float:
        return float(np.mean(self.values))

    def is_mean_zero(self, rtol: float = MEAN_ZERO_RTOL) -> bool:
        amp = float(np.max(np.abs(self.values)))
        return abs(self.mean()) <= rtol * max(amp, 1.0)

    def __add__(self, other):
        if isinstance(other, ScalarField):
            _check_same_grid(self.grid, other.grid)
            return ScalarField(self.grid, self.values + other.values)
        return ScalarField(self.grid, self.values + other)

    def __sub__(self, other):
        if isinstance(other, ScalarField):
            _check_same_grid(self.grid, other.grid)
            return ScalarField(self.grid, self.values - other.values)
        return ScalarField(self.grid, self.values - other)

    def __mul__(self, scalar):
        return ScalarField(self.grid, self.values * float(scalar))

    __rmul__ = __mul__


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients c_n indexed by integer wave vectors.

    Normalization: c_n = N^{-d} sum_x f(x) exp(-2*pi*i*n.x), so a constant
    field has c_0 equal to its value.
    """

    grid: GridSpec
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex).reshape(self.grid.shape)
        if not np.all(np.isfinite(c)):
            raise ValueError("spectral coefficients must be finite")
        c = np.ascontiguousarray(c)
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)


def to_spectral(f: ScalarField) -> SpectralField:
    return SpectralField(f.grid, np.fft.fftn(f.values, norm="forward"))


def to_physical(fh: SpectralField) -> ScalarField:
    vals = np.fft.ifftn(fh.coefficients, norm="forward")
    return ScalarField(fh.grid, vals.real)


def spectral_divergence_max(components) -> float:
    """max_k |sum_j k_j u^_j(k)| for a tuple of ScalarFields."""
    grid = components[0].grid
    ns = grid.modes()
    div = np.zeros(grid.shape, dtype=complex)
    for nj, comp in zip(ns, components):
        div += 2j * np.pi * nj * np.fft.fftn(comp.values, norm="forward")
    return float(np.max(np.abs(div)))


def _check_same_grid(a: GridSpec, b: GridSpec):
    if a != b:
        raise ValueError(f"grid mismatch: {a} vs {b}")


@dataclass(frozen=True)
class VelocityField:
    """d-component vector field; divergence_free is an asserted invariant."""

    grid: GridSpec
    components: tuple
    divergence_free: bool = False

    def __post_init__(self):
        comps = tuple(self.components)
        if len(comps) != self.grid.d:
            raise ValueError(f"expected {self.grid.d} components, got {len(comps)}")
        for c in comps:
            _check_same_grid(self.grid, c.grid)
        object.__setattr__(self, "components", comps)
        if self.divergence_free:
            norm = max(self.l2_norm(), 1e-300)
            div = spectral_divergence_max(comps)
            if div > 1e-10 * norm:
                raise ValueError(
                    f"velocity asserted divergence-free but max spectral divergence "
                    f"{div:.3e} exceeds tolerance (l2={norm:.3e})"
                )

    @classmethod
    def zero(cls, grid: GridSpec) -> "VelocityField":
        comps = tuple(ScalarField.constant(grid, 0.0) for _ in range(grid.d))
        return cls(grid, comps, divergence_free=True)

    @classmethod
    def constant(cls, grid: GridSpec, c) -> "VelocityField":
        c = np.atleast_1d(np.asarray(c, dtype=float))
        if c.size != grid.d:
            raise ValueError(f"constant velocity needs {grid.d} components")
        comps = tuple(ScalarField.constant(grid, ci) for ci in c)
        return cls(grid, comps, divergence_free=True)

    def max_norm(self) -> float:
        speed = np.zeros(self.grid.shape)
        for c in self.components:
            speed += c.values**2
        return float(np.sqrt(np.max(speed)))

    def l2_norm(self) -> float:
        total = 0.0
        for c in self.components:
            total += float(np.sum(c.values**2))
        return float(np.sqrt(total * self.grid.cell_volume))
