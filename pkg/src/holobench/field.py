"""Sampled complex optical fields on a physical grid, plus the Fourier primitives.

Conventions used throughout the package:

* sample arrays have shape ``(ny, nx)`` and are indexed ``[iy, ix]``
* physical coordinates are ``x = (ix - nx//2) * pitch_x`` (origin at the grid
  center), likewise for y
* the angular (spatial-frequency) domain puts DC at bin ``(ny//2, nx//2)``
  with bin spacing ``1/(n * pitch)`` cycles/meter
* both FFT directions are unitary, so total power is preserved
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    AliasedCarrier,
    CropOutOfBounds,
    DcContamination,
    GridMismatch,
)

__all__ = [
    "Grid2D",
    "SpatialFrequency",
    "ComplexField",
    "AngularSpectrum",
    "JonesField",
    "CropResult",
    "plane_wave",
    "fft2",
    "ifft2",
    "crop_recenter",
    "inner_product",
]


@dataclass(frozen=True)
class Grid2D:
    """Uniform sampling grid: pixel counts and pixel pitch in meters."""

    nx: int
    ny: int
    pitch_x: float
    pitch_y: float

    def __post_init__(self) -> None:
        for n, name in ((self.nx, "nx"), (self.ny, "ny")):
            if n < 8 or n % 2 != 0:
                raise ValueError(f"{name}={n}: pixel counts must be even and >= 8")
        for p, name in ((self.pitch_x, "pitch_x"), (self.pitch_y, "pitch_y")):
            if not (np.isfinite(p) and p > 0):
                raise ValueError(f"{name}={p}: pitch must be positive and finite")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def extent_x(self) -> float:
        return self.nx * self.pitch_x

    @property
    def extent_y(self) -> float:
        return self.ny * self.pitch_y

    @property
    def pixel_area(self) -> float:
        return self.pitch_x * self.pitch_y

    @property
    def nyquist_x(self) -> float:
        return 0.5 / self.pitch_x

    @property
    def nyquist_y(self) -> float:
        return 0.5 / self.pitch_y

    @property
    def df_x(self) -> float:
        """Frequency bin spacing along x, cycles/meter."""
        return 1.0 / (self.nx * self.pitch_x)

    @property
    def df_y(self) -> float:
        return 1.0 / (self.ny * self.pitch_y)

    def x_coords(self) -> np.ndarray:
        return (np.arange(self.nx) - self.nx // 2) * self.pitch_x

    def y_coords(self) -> np.ndarray:
        return (np.arange(self.ny) - self.ny // 2) * self.pitch_y

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """(X, Y) physical coordinate arrays of shape (ny, nx)."""
        return np.meshgrid(self.x_coords(), self.y_coords(), indexing="xy")

    def fx_coords(self) -> np.ndarray:
        return (np.arange(self.nx) - self.nx // 2) * self.df_x

    def fy_coords(self) -> np.ndarray:
        return (np.arange(self.ny) - self.ny // 2) * self.df_y

    def freq_meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """(FX, FY) frequency coordinate arrays of shape (ny, nx), cycles/meter."""
        return np.meshgrid(self.fx_coords(), self.fy_coords(), indexing="xy")

    def left_half(self) -> "Grid2D":
        """Grid of the left/right half-region (columns split at nx//2)."""
        if self.nx % 4 != 0 or self.nx < 16:
            raise ValueError(
                f"nx={self.nx}: half-region grids need nx divisible by 4 and >= 16"
            )
        return Grid2D(self.nx // 2, self.ny, self.pitch_x, self.pitch_y)


@dataclass(frozen=True)
class SpatialFrequency:
    """A spatial frequency (fx, fy) in cycles/meter."""

    fx: float
    fy: float

    def below_nyquist(self, grid: Grid2D) -> bool:
        return abs(self.fx) < grid.nyquist_x and abs(self.fy) < grid.nyquist_y

    def to_bins(self, grid: Grid2D) -> tuple[float, float]:
        """Offsets from the DC bin, in (possibly fractional) bins."""
        return (self.fx / grid.df_x, self.fy / grid.df_y)

    @staticmethod
    def from_bins(grid: Grid2D, bx: float, by: float) -> "SpatialFrequency":
        return SpatialFrequency(bx * grid.df_x, by * grid.df_y)


def _readonly_complex(samples, shape: tuple[int, int]) -> np.ndarray:
    arr = np.array(samples, dtype=np.complex128, copy=True)
    if arr.shape != shape:
        raise ValueError(f"samples shape {arr.shape} does not match grid {shape}")
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValueError("samples contain non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ComplexField:
    """A 2-D sampled complex field on a physical grid (immutable)."""

    grid: Grid2D
    samples: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "samples", _readonly_complex(self.samples, self.grid.shape)
        )

    @property
    def power(self) -> float:
        """Total power sum(|samples|^2) * pixel area."""
        return float(np.sum(np.abs(self.samples) ** 2)) * self.grid.pixel_area

    @staticmethod
    def zeros(grid: Grid2D) -> "ComplexField":
        return ComplexField(grid, np.zeros(grid.shape, dtype=np.complex128))


@dataclass(frozen=True)
class AngularSpectrum:
    """Fourier transform of a ComplexField, DC at bin (ny//2, nx//2).

    The frequency axes are those of ``grid.fx_coords()`` / ``grid.fy_coords()``;
    ``power`` is expressed in the same units as the source field so Parseval
    reads ``field.power == fft2(field).power``.
    """

    grid: Grid2D
    samples: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "samples", _readonly_complex(self.samples, self.grid.shape)
        )

    @property
    def power(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2)) * self.grid.pixel_area

    @property
    def dc_bin(self) -> tuple[int, int]:
        """(ix, iy) array indices of the DC bin."""
        return (self.grid.nx // 2, self.grid.ny // 2)


@dataclass(frozen=True)
class JonesField:
    """X and Y polarization components of a field, sharing one grid."""

    x: ComplexField
    y: ComplexField

    def __post_init__(self) -> None:
        if self.x.grid != self.y.grid:
            raise GridMismatch("Jones components must share a grid")

    @property
    def grid(self) -> Grid2D:
        return self.x.grid

    @property
    def power(self) -> float:
        return self.x.power + self.y.power


def plane_wave(
    grid: Grid2D,
    amplitude: float,
    carrier: SpatialFrequency,
    phase0: float = 0.0,
) -> ComplexField:
    """Tilted plane wave A*exp(i(2pi(fx*x + fy*y) + phase0)) on the grid.

    Raises AliasedCarrier if the carrier is at or above Nyquist.
    """
    if not carrier.below_nyquist(grid):
        raise AliasedCarrier(
            f"carrier ({carrier.fx:.4g}, {carrier.fy:.4g}) cycles/m at or above "
            f"Nyquist ({grid.nyquist_x:.4g}, {grid.nyquist_y:.4g})"
        )
    X, Y = grid.meshgrid()
    phase = 2.0 * np.pi * (carrier.fx * X + carrier.fy * Y) + phase0
    return ComplexField(grid, amplitude * np.exp(1j * phase))


def fft2(f: ComplexField) -> AngularSpectrum:
    """Unitary centered 2-D DFT: DC lands at bin (ny//2, nx//2)."""
    n = f.grid.nx * f.grid.ny
    spec = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(f.samples))) / np.sqrt(n)
    return AngularSpectrum(f.grid, spec)


def ifft2(spectrum: AngularSpectrum) -> ComplexField:
    """Exact inverse of fft2 under the same centering and normalization."""
    n = spectrum.grid.nx * spectrum.grid.ny
    out = np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(spectrum.samples)))
    return ComplexField(spectrum.grid, out * np.sqrt(n))


@dataclass(frozen=True)
class CropResult:
    """Output of crop_recenter.

    ``shift_bins`` is the integer (bx, by) bin offset that was moved to DC;
    ``residual`` is the sub-bin carrier left over (requested center minus the
    quantized bin center), to be demodulated downstream.
    """

    spectrum: AngularSpectrum
    shift_bins: tuple[int, int]
    residual: SpatialFrequency


def crop_recenter(
    spectrum: AngularSpectrum,
    center: SpatialFrequency,
    radius: float,
) -> CropResult:
    """Copy the disk of given radius (cycles/m) around ``center`` to DC.

    The center is quantized to the nearest bin; bins inside the disk are kept
    and shifted so that bin goes to DC, all other bins are zeroed. The grid
    size is unchanged. Raises CropOutOfBounds if the disk pokes past the
    spectrum extent; warns DcContamination if the disk includes the DC bin.
    """
    if radius <= 0:
        raise ValueError(f"radius={radius}: must be positive")
    g = spectrum.grid
    bx = int(round(center.fx / g.df_x))
    by = int(round(center.fy / g.df_y))
    fcx, fcy = bx * g.df_x, by * g.df_y

    fx_min, fx_max = -(g.nx // 2) * g.df_x, (g.nx // 2 - 1) * g.df_x
    fy_min, fy_max = -(g.ny // 2) * g.df_y, (g.ny // 2 - 1) * g.df_y
    if fcx - radius < fx_min or fcx + radius > fx_max or fcy - radius < fy_min or fcy + radius > fy_max:
        raise CropOutOfBounds(
            f"disk r={radius:.4g} cycles/m at bin ({bx}, {by}) exceeds spectrum "
            f"extent [{fx_min:.4g}, {fx_max:.4g}] x [{fy_min:.4g}, {fy_max:.4g}]"
        )
    if np.hypot(fcx, fcy) <= radius:
        warnings.warn(
            "crop disk includes the DC bin; autointensity terms will leak in",
            DcContamination,
            stacklevel=2,
        )

    FX, FY = g.freq_meshgrid()
    mask = (FX - fcx) ** 2 + (FY - fcy) ** 2 <= radius**2
    kept = np.where(mask, spectrum.samples, 0.0)
    # roll moves bin (bx, by) onto the DC bin; the wrap carries only zeros
    # because the disk is fully inside the extent
    recentered = np.roll(kept, shift=(-by, -bx), axis=(0, 1))
    residual = SpatialFrequency(center.fx - fcx, center.fy - fcy)
    return CropResult(AngularSpectrum(g, recentered), (bx, by), residual)


def inner_product(a: ComplexField, b: ComplexField) -> complex:
    """Discrete overlap integral sum(a * conj(b)) * pixel area."""
    if a.grid != b.grid:
        raise GridMismatch(f"grids differ: {a.grid} vs {b.grid}")
    return complex(np.sum(a.samples * np.conj(b.samples)) * a.grid.pixel_area)
