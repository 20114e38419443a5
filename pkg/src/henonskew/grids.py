"""Slice geometry: complex-line slices of C^2 and uniform rasters on them."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

SLICE_X = "x"  # {x = const}, raster in the y coordinate
SLICE_Y = "y"  # {y = const}, raster in the x coordinate
SLICE_LINE = "line"  # z(w) = p0 + w * dir


@dataclass(frozen=True)
class SliceSpec:
    """A complex line in C^2 carrying a raster."""

    kind: str
    const: complex = 0j
    p0: tuple[complex, complex] = (0j, 0j)
    direction: tuple[complex, complex] = (0j, 1 + 0j)

    def __post_init__(self):
        if self.kind not in (SLICE_X, SLICE_Y, SLICE_LINE):
            raise ValidationError(f"unknown slice kind {self.kind!r}")

    def to_points(self, w: np.ndarray):
        """Map raster coordinates w to (x, y) in C^2."""
        if self.kind == SLICE_X:
            return np.full_like(w, self.const), w.astype(complex)
        if self.kind == SLICE_Y:
            return w.astype(complex), np.full_like(w, self.const)
        return self.p0[0] + w * self.direction[0], self.p0[1] + w * self.direction[1]


@dataclass
class SliceGrid:
    """Cell-centered uniform raster over a rectangle in the slice plane.

    (x0, y0) is the center of pixel (0, 0); data is indexed [row, col] =
    [imag, real].
    """

    nx: int
    ny: int
    x0: float
    y0: float
    dx: float
    dy: float
    spec: SliceSpec
    data: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValidationError("raster needs nx, ny >= 3")
        if self.dx <= 0 or self.dy <= 0:
            raise ValidationError("raster spacing must be positive")

    @classmethod
    def from_window(
        cls,
        spec: SliceSpec,
        window: tuple[float, float, float, float],
        nx: int,
        ny: int | None = None,
    ) -> "SliceGrid":
        a0, a1, b0, b1 = window
        if ny is None:
            ny = nx
        dx = (a1 - a0) / nx
        dy = (b1 - b0) / ny
        return cls(nx=nx, ny=ny, x0=a0 + dx / 2, y0=b0 + dy / 2, dx=dx, dy=dy, spec=spec)

    def centers(self) -> np.ndarray:
        re = self.x0 + self.dx * np.arange(self.nx)
        im = self.y0 + self.dy * np.arange(self.ny)
        return re[None, :] + 1j * im[:, None]

    def points(self):
        """(x, y) arrays of shape (ny, nx) on the slice."""
        return self.spec.to_points(self.centers())

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    def with_data(self, data: np.ndarray) -> "SliceGrid":
        if data.shape != (self.ny, self.nx):
            raise ValidationError(f"data shape {data.shape} != ({self.ny}, {self.nx})")
        return SliceGrid(self.nx, self.ny, self.x0, self.y0, self.dx, self.dy, self.spec, data)
