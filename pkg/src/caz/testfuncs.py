"""Smooth compactly-supported test functions with exact derivatives.

Closed-form bumps keep the invariant Laplacian exact, which the variance
predictions need; a grid-tabulated escape hatch covers test functions that
only exist as samples, with stencil derivatives chosen by Richardson
extrapolation.  The radial bump is

    h(z) = (1 - |z - z0|^2 / r^2)^p   for |z - z0| < r, else 0,

which is C^2 whenever p >= 3.  Writing s = |z - z0|^2 / r^2,

    grad h = -(2 p / r^2) (1-s)^(p-1) (z - z0)
    lap  h = (4 p / r^2) (1-s)^(p-2) (p s - 1).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class TestFunctionKind(str, enum.Enum):
    RADIAL_BUMP = "radial-bump"
    SHIFTED_BUMP = "shifted-bump"
    GRID_TABULATED = "grid-tabulated"


@dataclass(frozen=True)
class TestFunction:
    kind: TestFunctionKind
    center: complex
    radius: float
    exponent: int = 3
    grid_values: np.ndarray | None = field(default=None, repr=False)
    grid_step: float | None = None
    whole_sphere: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", TestFunctionKind(self.kind))
        object.__setattr__(self, "center", complex(self.center))
        if self.kind is not TestFunctionKind.GRID_TABULATED:
            if self.exponent < 3:
                raise ValueError("bump exponent must be >= 3 to keep h in C^2")
            if not self.radius > 0:
                raise ValueError("bump radius must be positive")

    # -- constructors -----------------------------------------------------

    @staticmethod
    def bump(center=0.0j, radius=1.0, exponent=3) -> "TestFunction":
        kind = (TestFunctionKind.RADIAL_BUMP if complex(center) == 0
                else TestFunctionKind.SHIFTED_BUMP)
        return TestFunction(kind, center, radius, int(exponent))

    @staticmethod
    def shifted(base: "TestFunction", shift: complex) -> "TestFunction":
        return TestFunction.bump(base.center + complex(shift), base.radius, base.exponent)

    @staticmethod
    def from_grid(values, step: float, center=0.0j) -> "TestFunction":
        """Tabulated values on a uniform square grid covering the support.

        The grid must be odd-sized and centered; values are interpreted as
        samples at center + step*(i + 1j*j) for i, j in [-m..m].
        """
        values = np.asarray(values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] % 2 == 0:
            raise ValueError("grid must be square with odd side length")
        half = (values.shape[0] // 2) * float(step)
        return TestFunction(TestFunctionKind.GRID_TABULATED, center, half,
                            exponent=0, grid_values=values, grid_step=float(step))

    @staticmethod
    def tabulate(func, step: float, half_width: float, center=0.0j) -> "TestFunction":
        m = int(np.ceil(half_width / step))
        ax = step * np.arange(-m, m + 1)
        X, Y = np.meshgrid(ax, ax, indexing="ij")
        vals = func(complex(center) + X + 1j * Y)
        return TestFunction.from_grid(vals, step, center)

    @staticmethod
    def sphere_constant() -> "TestFunction":
        """h identical to 1 on the whole sphere (elliptic family only).

        Admitted as a special tabulated case; integrals use the exact
        compactification substitution instead of a disk rule.
        """
        return TestFunction(TestFunctionKind.GRID_TABULATED, 0.0j, np.inf,
                            exponent=0, whole_sphere=True)

    # -- geometry ---------------------------------------------------------

    @property
    def support_radius(self) -> float:
        return self.radius

    def support_reach(self) -> float:
        """Distance from the origin beyond which h vanishes."""
        return abs(self.center) + self.radius

    # -- values and exact derivatives --------------------------------------

    def value(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.whole_sphere:
            return np.ones(z.shape)
        if self.kind is TestFunctionKind.GRID_TABULATED:
            return self._grid_eval(z)
        s = np.abs(z - self.center) ** 2 / self.radius ** 2
        body = np.where(s < 1.0, 1.0 - s, 0.0)
        return body ** self.exponent

    __call__ = value

    def gradient(self, z) -> np.ndarray:
        """Gradient as the complex number h_x + i h_y."""
        z = np.asarray(z, dtype=complex)
        if self.whole_sphere:
            return np.zeros(z.shape, dtype=complex)
        if self.kind is TestFunctionKind.GRID_TABULATED:
            return self._grid_gradient(z)
        d = z - self.center
        s = np.abs(d) ** 2 / self.radius ** 2
        body = np.where(s < 1.0, 1.0 - s, 0.0)
        p = self.exponent
        return (-2.0 * p / self.radius ** 2) * body ** (p - 1) * d

    def laplacian(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.whole_sphere:
            return np.zeros(z.shape)
        if self.kind is TestFunctionKind.GRID_TABULATED:
            return self._grid_laplacian(z)
        s = np.abs(z - self.center) ** 2 / self.radius ** 2
        body = np.where(s < 1.0, 1.0 - s, 0.0)
        p = self.exponent
        return (4.0 * p / self.radius ** 2) * body ** (p - 2) * (p * s - 1.0) * (s < 1.0)

    # -- grid machinery -----------------------------------------------------

    def _grid_lookup(self, z, shift_x=0, shift_y=0):
        step = self.grid_step
        vals = self.grid_values
        m = vals.shape[0] // 2
        d = np.asarray(z, dtype=complex) - self.center
        i = np.rint(d.real / step).astype(int) + shift_x
        j = np.rint(d.imag / step).astype(int) + shift_y
        ok = (np.abs(i) <= m) & (np.abs(j) <= m)
        out = np.zeros(np.shape(z))
        ii = np.clip(i + m, 0, 2 * m)
        jj = np.clip(j + m, 0, 2 * m)
        out = np.where(ok, vals[ii, jj], 0.0)
        return out

    def _grid_eval(self, z):
        return self._grid_lookup(z)

    def _grid_gradient(self, z):
        # centered 2nd-order stencils on the tabulated lattice
        step = self.grid_step
        gx = (self._grid_lookup(z, 1, 0) - self._grid_lookup(z, -1, 0)) / (2 * step)
        gy = (self._grid_lookup(z, 0, 1) - self._grid_lookup(z, 0, -1)) / (2 * step)
        return gx + 1j * gy

    def _grid_laplacian(self, z):
        """5-point stencil at spacing step and 2*step, Richardson-combined.

        The two stencil widths have O(step^2) errors in ratio 4, so the
        combination (4*fine - coarse)/3 cancels the leading term.
        """
        step = self.grid_step
        c = self._grid_lookup(z)
        fine = (self._grid_lookup(z, 1, 0) + self._grid_lookup(z, -1, 0)
                + self._grid_lookup(z, 0, 1) + self._grid_lookup(z, 0, -1) - 4 * c) / step ** 2
        coarse = (self._grid_lookup(z, 2, 0) + self._grid_lookup(z, -2, 0)
                  + self._grid_lookup(z, 0, 2) + self._grid_lookup(z, 0, -2) - 4 * c) / (2 * step) ** 2
        return (4.0 * fine - coarse) / 3.0

    # -- serialization -----------------------------------------------------

    def describe(self) -> dict:
        if self.whole_sphere:
            return {"kind": "sphere-constant"}
        out = {
            "kind": self.kind.value,
            "center": [self.center.real, self.center.imag],
            "radius": self.radius,
        }
        if self.kind is TestFunctionKind.GRID_TABULATED:
            out["grid_step"] = self.grid_step
            out["grid_side"] = int(self.grid_values.shape[0])
        else:
            out["exponent"] = self.exponent
        return out
