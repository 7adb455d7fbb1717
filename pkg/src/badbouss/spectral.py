"""Periodic spectral kernel: grid, DFT pair, derivatives, and mode-window products.

Conventions
-----------
A 2L-periodic field is sampled at the 2N collocation points x_j = j L / N,
j = -N, ..., N-1.  Fourier coefficients use the same index range; slot s of a
coefficient array holds mode j = s - N.  The asymmetric mode window [-N, N-1]
is preserved exactly by every operation here (no symmetrization to [-N, N]);
the unpaired j = -N mode of real data is zeroed by `hermitian_project`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PeriodicGrid",
    "PhysicalField",
    "SpectralField",
    "forward_dft",
    "inverse_dft",
    "eval_at",
    "eval_many",
    "uniform_samples",
    "spectral_derivative",
    "truncated_convolution",
    "dealiased_product",
    "cumulative_integral",
    "hermitian_project",
    "hermitian_project_coeffs",
]


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform partition of [-L, L) into the 2N points x_j = j L / N.

    Parameters
    ----------
    L : float
        Half-period of the domain (dimensionless units).
    N : int
        Mode cutoff; the grid carries modes j = -N, ..., N-1.
    """

    L: float
    N: int

    def __post_init__(self) -> None:
        if not self.L > 0:
            raise ValueError(f"half-period L must be positive, got {self.L}")
        if self.N < 1:
            raise ValueError(f"mode count N must be >= 1, got {self.N}")

    @property
    def size(self) -> int:
        return 2 * self.N

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def points(self) -> np.ndarray:
        return np.arange(-self.N, self.N) * (self.L / self.N)

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.N, self.N)

    def derivative_factors(self, order: int = 1) -> np.ndarray:
        """Per-mode factors (i pi j / L)^order."""
        return (1j * np.pi * self.modes / self.L) ** order


@dataclass(frozen=True)
class PhysicalField:
    """Real samples f(x_j) on a periodic grid."""

    grid: PeriodicGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.size,):
            raise ValueError(
                f"expected {self.grid.size} samples, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field samples must be finite")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class SpectralField:
    """Complex Fourier coefficients indexed j = -N, ..., N-1 (slot j + N)."""

    grid: PeriodicGrid
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != (self.grid.size,):
            raise ValueError(
                f"expected {self.grid.size} coefficients, got shape {coeffs.shape}"
            )
        object.__setattr__(self, "coeffs", coeffs)

    def mode(self, j: int) -> complex:
        if not -self.grid.N <= j <= self.grid.N - 1:
            raise IndexError(f"mode {j} outside window [-N, N-1]")
        return self.coeffs[j + self.grid.N]


def _require_same_grid(a, b) -> PeriodicGrid:
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    return a.grid


# ---------------------------------------------------------------------------
# transform pair
# ---------------------------------------------------------------------------

def forward_coeffs(values: np.ndarray, N: int) -> np.ndarray:
    """Raw-array forward transform; slot s holds mode j = s - N."""
    # samples are ordered from x = -L; rotate so the FFT sees x = 0 first
    w = np.fft.fft(np.roll(values, -N))
    return np.fft.fftshift(w) / (2 * N)


def synthesize_samples(coeffs: np.ndarray, N: int) -> np.ndarray:
    """Complex grid samples sum_j c_j exp(i pi j x_l / L) (raw-array inverse)."""
    w = np.fft.ifft(np.fft.ifftshift(coeffs)) * (2 * N)
    return np.roll(w, N)


def forward_dft(f: PhysicalField) -> SpectralField:
    """Discrete Fourier transform c(j) = (1/2N) sum_l f(x_l) exp(-i pi j x_l / L)."""
    return SpectralField(f.grid, forward_coeffs(f.values, f.grid.N))


def inverse_dft(F: SpectralField) -> PhysicalField:
    """Grid samples of the trigonometric interpolant (real part)."""
    return PhysicalField(F.grid, synthesize_samples(F.coeffs, F.grid.N).real)


def eval_many(F: SpectralField, x: np.ndarray) -> np.ndarray:
    """Evaluate Re sum_j c_j exp(i pi j x / L) at arbitrary points.

    Horner recurrence in z = exp(i pi x / L); cost O(N * len(x)) with no
    large temporary matrix.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.exp(1j * np.pi * x / F.grid.L)
    acc = np.zeros_like(z)
    for c in F.coeffs[::-1]:
        acc = acc * z + c
    acc *= np.exp(-1j * np.pi * F.grid.N * x / F.grid.L)
    return acc.real


def eval_at(F: SpectralField, x: float) -> float:
    """Trigonometric interpolant at a single point."""
    return float(eval_many(F, np.array([x]))[0])


def uniform_samples(F: SpectralField, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Interpolant on the n equally spaced points -L + 2L m / n, m = 0..n-1.

    Uses a zero-padded inverse FFT when n >= 2N (exactly the Horner result,
    much faster); falls back to `eval_many` otherwise.
    """
    grid = F.grid
    xs = -grid.L + 2 * grid.L * np.arange(n) / n
    if n < grid.size:
        return xs, eval_many(F, xs)
    # exp(i pi j x_m / L) = (-1)^j exp(2 pi i j m / n) on these points
    std = np.zeros(n, dtype=complex)
    j = grid.modes
    std[np.mod(j, n)] = F.coeffs * (-1.0) ** j
    return xs, (np.fft.ifft(std) * n).real


# ---------------------------------------------------------------------------
# derivatives and products
# ---------------------------------------------------------------------------

def spectral_derivative(F: SpectralField, order: int = 1) -> SpectralField:
    """Multiply coefficients by (i pi j / L)^order.

    Orders above 4 are rejected: nothing in the scheme or its dispersion
    analysis differentiates more than four times.
    """
    if not 0 <= order <= 4:
        raise ValueError(f"derivative order must be in 0..4, got {order}")
    return SpectralField(F.grid, F.coeffs * F.grid.derivative_factors(order))


def truncated_convolution_coeffs(a: np.ndarray, b: np.ndarray, N: int) -> np.ndarray:
    """Linear convolution of the coefficient sequences with output and both
    factor indices restricted to the window [-N, N-1]."""
    full = np.convolve(a, b)  # output slot m = slot_a + slot_b, i.e. j + 2N
    return full[N : 3 * N]


def truncated_convolution(a: SpectralField, b: SpectralField) -> SpectralField:
    """Mode-window convolution (a * b)(j), the direct O(N^2) route."""
    grid = _require_same_grid(a, b)
    return SpectralField(grid, truncated_convolution_coeffs(a.coeffs, b.coeffs, grid.N))


def _pad_size(N: int) -> int:
    m = 1
    while m < 4 * N:
        m <<= 1
    return m


def dealiased_product_coeffs(a: np.ndarray, b: np.ndarray, N: int) -> np.ndarray:
    """FFT route to the same windowed convolution.

    Zero-pads both sequences to the next power of two >= 4N, multiplies in
    physical space, and truncates the product spectrum back to [-N, N-1].
    The padding length exceeds the 4N-1 support of the linear convolution,
    so no aliasing wraps into the kept window.
    """
    m = _pad_size(N)
    j = np.arange(-N, N)
    slots = np.mod(j, m)
    pa = np.zeros(m, dtype=complex)
    pb = np.zeros(m, dtype=complex)
    pa[slots] = a
    pb[slots] = b
    prod = np.fft.ifft(pa) * np.fft.ifft(pb)
    return np.fft.fft(prod)[slots] * m


def dealiased_product(a: SpectralField, b: SpectralField) -> SpectralField:
    """Fast path for the windowed convolution; identical to
    `truncated_convolution` up to roundoff."""
    grid = _require_same_grid(a, b)
    return SpectralField(grid, dealiased_product_coeffs(a.coeffs, b.coeffs, grid.N))


def cumulative_integral(f: PhysicalField) -> PhysicalField:
    """Running integral g(x_j) = int_{-L}^{x_j} f dx' by cumulative trapezoid.

    g(x_{-N}) = 0; the trapezoid rule keeps the j = 0 mode well defined
    without special-casing a spectral antiderivative.
    """
    dx = f.grid.dx
    g = np.zeros_like(f.values)
    g[1:] = np.cumsum(0.5 * (f.values[:-1] + f.values[1:])) * dx
    return PhysicalField(f.grid, g)


def hermitian_project_coeffs(c: np.ndarray, N: int) -> np.ndarray:
    """Re-impose the symmetry of a real field's spectrum.

    Sets c(-N) = 0 (the unpaired mode), makes c(0) real, and averages
    c(j) with conj(c(-j)) for 0 < j < N.
    """
    out = np.empty_like(c, dtype=complex)
    out[0] = 0.0
    out[N] = c[N].real
    upper = 0.5 * (c[N + 1 :] + np.conj(c[1:N][::-1]))
    out[N + 1 :] = upper
    out[1:N] = np.conj(upper[::-1])
    return out


def hermitian_project(F: SpectralField) -> SpectralField:
    return SpectralField(F.grid, hermitian_project_coeffs(F.coeffs, F.grid.N))
