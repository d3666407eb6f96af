"""Hermite-Gaussian LP mode basis and overlap-integral demultiplexing."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BasisNotOrthonormal, GridMismatch, NormalizationUnreliable, OrderTooHigh
from .field import ComplexField, Grid2D, inner_product

__all__ = [
    "ModeSpec",
    "ModeGroupMap",
    "ModeBasis",
    "Decomposition",
    "hermite_poly",
    "hg_mode",
    "build_lp_basis",
    "decompose",
]

MAX_HERMITE_ORDER = 20

LP_LABELS = ("LP01", "LP11a", "LP11b")


def hermite_poly(order: int, x):
    """Physicists' Hermite polynomial H_order(x) by the three-term recurrence.

    Accepts scalars or arrays. Orders above MAX_HERMITE_ORDER are refused to
    keep the recurrence well away from overflow at desk scale.
    """
    if order < 0:
        raise ValueError(f"order={order}: must be non-negative")
    if order > MAX_HERMITE_ORDER:
        raise OrderTooHigh(f"order={order} exceeds guard {MAX_HERMITE_ORDER}")
    x = np.asarray(x, dtype=np.float64)
    h_prev = np.ones_like(x)
    if order == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = 2.0 * x
    for k in range(1, order):
        h, h_prev = 2.0 * x * h - 2.0 * k * h_prev, h
    return h if h.ndim else float(h)


@dataclass(frozen=True)
class ModeSpec:
    """Transverse orders, waist and center of one Hermite-Gaussian mode."""

    m: int
    n: int
    w0: float
    center: tuple[float, float] = (0.0, 0.0)
    family: str = "hermite-gauss"

    def __post_init__(self) -> None:
        if self.family != "hermite-gauss":
            raise ValueError(f"unsupported mode family {self.family!r}")
        if self.m < 0 or self.n < 0:
            raise ValueError(f"orders ({self.m}, {self.n}) must be non-negative")
        if not self.w0 > 0:
            raise ValueError(f"w0={self.w0}: waist must be positive")


def hg_mode(grid: Grid2D, spec: ModeSpec) -> ComplexField:
    """Hermite-Gaussian mode, numerically unit-normalized on the grid.

    Real-valued (phase 0). Warns NormalizationUnreliable when the grid spans
    less than 6 waists in either axis, where truncation starts to bias the
    grid-sum normalization.
    """
    if grid.extent_x < 6.0 * spec.w0 or grid.extent_y < 6.0 * spec.w0:
        warnings.warn(
            f"grid extent ({grid.extent_x:.3g}, {grid.extent_y:.3g}) m below "
            f"6*w0 = {6.0 * spec.w0:.3g} m",
            NormalizationUnreliable,
            stacklevel=2,
        )
    x0, y0 = spec.center
    X, Y = grid.meshgrid()
    xr = X - x0
    yr = Y - y0
    profile = (
        hermite_poly(spec.m, np.sqrt(2.0) * xr / spec.w0)
        * hermite_poly(spec.n, np.sqrt(2.0) * yr / spec.w0)
        * np.exp(-(xr**2 + yr**2) / spec.w0**2)
    )
    norm = np.sqrt(np.sum(profile**2) * grid.pixel_area)
    if norm == 0.0:
        raise ValueError("mode vanishes on this grid; check waist and center")
    return ComplexField(grid, (profile / norm).astype(np.complex128))


@dataclass(frozen=True)
class ModeGroupMap:
    """Mode index -> mode-group index, contiguous groups starting at 0."""

    groups: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.groups) == 0:
            raise ValueError("empty group map")
        present = sorted(set(self.groups))
        if present != list(range(len(present))):
            raise ValueError(f"groups {self.groups} must be contiguous from 0")

    @property
    def n_groups(self) -> int:
        return max(self.groups) + 1

    def members(self, group: int) -> tuple[int, ...]:
        return tuple(i for i, g in enumerate(self.groups) if g == group)

    @staticmethod
    def lp_default(n_modes: int = 3) -> "ModeGroupMap":
        """LP01 alone in group 0, the LP11 pair degenerate in group 1."""
        if n_modes != 3:
            raise ValueError("lp_default is defined for the 3-mode LP basis")
        return ModeGroupMap((0, 1, 1))

    @staticmethod
    def per_mode(n_modes: int) -> "ModeGroupMap":
        """Each mode is its own group."""
        return ModeGroupMap(tuple(range(n_modes)))


@dataclass(frozen=True)
class ModeBasis:
    """Ordered orthonormal set of modes with labels and a group map.

    Construction verifies unit norms (1e-12) and that the Gram matrix is
    within ``gram_tol`` of identity, raising BasisNotOrthonormal otherwise.
    """

    grid: Grid2D
    modes: tuple[ComplexField, ...]
    labels: tuple[str, ...]
    group_map: ModeGroupMap
    gram_tol: float = 1e-6

    def __post_init__(self) -> None:
        if not (len(self.modes) == len(self.labels) == len(self.group_map.groups)):
            raise ValueError("modes, labels and group map must have equal length")
        for mode in self.modes:
            if mode.grid != self.grid:
                raise GridMismatch("all modes must live on the basis grid")
        gram = self.gram_matrix()
        err = np.max(np.abs(gram - np.eye(len(self.modes))))
        if err > self.gram_tol:
            raise BasisNotOrthonormal(
                f"Gram matrix deviates from identity by {err:.3g} > {self.gram_tol:.3g}"
            )
        for k, mode in enumerate(self.modes):
            norm = inner_product(mode, mode).real
            if abs(norm - 1.0) > 1e-12:
                raise BasisNotOrthonormal(f"mode {k} norm {norm!r} is not 1")

    def __len__(self) -> int:
        return len(self.modes)

    def gram_matrix(self) -> np.ndarray:
        n = len(self.modes)
        gram = np.empty((n, n), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                gram[i, j] = inner_product(self.modes[i], self.modes[j])
        return gram


def build_lp_basis(
    grid: Grid2D,
    w0: float,
    center: tuple[float, float] = (0.0, 0.0),
    gram_tol: float = 1e-6,
) -> ModeBasis:
    """Three-mode LP basis: LP01 = HG00, LP11a = HG10, LP11b = HG01."""
    orders = ((0, 0), (1, 0), (0, 1))
    modes = tuple(hg_mode(grid, ModeSpec(m, n, w0, center)) for m, n in orders)
    return ModeBasis(grid, modes, LP_LABELS, ModeGroupMap.lp_default(), gram_tol)


@dataclass(frozen=True)
class Decomposition:
    """Overlap coefficients of a field in a basis, plus the captured fraction."""

    coefficients: np.ndarray
    captured_fraction: float

    def __post_init__(self) -> None:
        arr = np.array(self.coefficients, dtype=np.complex128, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "coefficients", arr)


def decompose(f: ComplexField, basis: ModeBasis) -> Decomposition:
    """Project a field onto the basis: c_k = <f, mode_k>.

    The captured fraction is sum(|c_k|^2) / field power (0 for a zero field).
    """
    if f.grid != basis.grid:
        raise GridMismatch("field and basis grids differ")
    coeffs = np.array([inner_product(f, mode) for mode in basis.modes])
    total = f.power
    captured = float(np.sum(np.abs(coeffs) ** 2) / total) if total > 0 else 0.0
    return Decomposition(coeffs, captured)
