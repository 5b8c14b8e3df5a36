"""Finite-difference calculus on uniform 2D grids.

Every derived field carries a validity margin: the number of outer index rings
whose values depend on one-sided or boundary-polluted stencils. Checks read
only ``Field2.valid()``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BallOutOfBounds, DegenerateHessian, GridTooSmall, NonFinite

EPS_DET = 1e-8


@dataclass(frozen=True)
class Grid2:
    nx: int
    ny: int
    hx: float
    hy: float
    origin: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.nx < 5 or self.ny < 5:
            raise GridTooSmall("grids need at least 5 nodes per axis", nx=self.nx, ny=self.ny)
        if not (np.isfinite(self.hx) and np.isfinite(self.hy) and self.hx > 0 and self.hy > 0):
            raise ValueError("grid spacing must be finite and positive")

    @classmethod
    def square(cls, lo: float, hi: float, n: int) -> "Grid2":
        """``n`` nodes per axis spanning [lo, hi]^2."""
        h = (hi - lo) / (n - 1)
        return cls(n, n, h, h, (float(lo), float(lo)))

    @classmethod
    def rect(cls, xlim, ylim, h: float) -> "Grid2":
        nx = int(round((xlim[1] - xlim[0]) / h)) + 1
        ny = int(round((ylim[1] - ylim[0]) / h)) + 1
        return cls(nx, ny, h, h, (float(xlim[0]), float(ylim[0])))

    @property
    def xs(self):
        return self.origin[0] + self.hx * np.arange(self.nx)

    @property
    def ys(self):
        return self.origin[1] + self.hy * np.arange(self.ny)

    def mesh(self):
        return np.meshgrid(self.xs, self.ys, indexing="ij")

    def coord(self, i, j):
        return (self.origin[0] + i * self.hx, self.origin[1] + j * self.hy)

    def index(self, x, y):
        return (int(round((x - self.origin[0]) / self.hx)), int(round((y - self.origin[1]) / self.hy)))

    @property
    def h(self) -> float:
        return max(self.hx, self.hy)

    def to_dict(self):
        return {"nx": self.nx, "ny": self.ny, "hx": self.hx, "hy": self.hy,
                "origin": [float(self.origin[0]), float(self.origin[1])]}


@dataclass(frozen=True)
class Field2:
    grid: Grid2
    values: np.ndarray
    margin: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.nx, self.grid.ny):
            raise ValueError(f"values shape {v.shape} does not match grid {(self.grid.nx, self.grid.ny)}")
        if not np.all(np.isfinite(v)):
            k = np.argwhere(~np.isfinite(v))[0]
            raise NonFinite("field contains non-finite values", index=[int(k[0]), int(k[1])])
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: Grid2, fn) -> "Field2":
        X, Y = grid.mesh()
        return cls(grid, np.broadcast_to(np.asarray(fn(X, Y), dtype=float), X.shape).copy())

    def like(self, values, margin: Optional[int] = None) -> "Field2":
        return Field2(self.grid, values, self.margin if margin is None else margin)

    def valid_slice(self):
        m = self.margin
        return (slice(m, self.grid.nx - m), slice(m, self.grid.ny - m))

    def valid(self):
        return self.values[self.valid_slice()]

    def valid_mask(self):
        mask = np.zeros(self.values.shape, dtype=bool)
        mask[self.valid_slice()] = True
        return mask

    def valid_coords(self):
        X, Y = self.grid.mesh()
        sl = self.valid_slice()
        return X[sl], Y[sl]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("x,y,value\n")
        xs, ys = self.grid.xs, self.grid.ys
        for i in range(self.grid.nx):
            for j in range(self.grid.ny):
                buf.write(f"{xs[i]:.17g},{ys[j]:.17g},{self.values[i, j]:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, margin: int = 0) -> "Field2":
        rows = list(csv.DictReader(io.StringIO(text)))
        x = np.array([float(r["x"]) for r in rows])
        y = np.array([float(r["y"]) for r in rows])
        v = np.array([float(r["value"]) for r in rows])
        ux, uy = np.unique(x), np.unique(y)
        nx, ny = ux.size, uy.size
        hx = (ux[-1] - ux[0]) / (nx - 1)
        hy = (uy[-1] - uy[0]) / (ny - 1)
        grid = Grid2(nx, ny, hx, hy, (float(ux[0]), float(uy[0])))
        return cls(grid, v.reshape(nx, ny), margin)


@dataclass(frozen=True)
class Profile1:
    xs: np.ndarray
    u: np.ndarray
    du: np.ndarray
    h: float

    def interior_fd_error(self) -> float:
        cd = (self.u[2:] - self.u[:-2]) / (2 * self.h)
        return float(np.max(np.abs(cd - self.du[1:-1])))


def _d1(v, h, axis):
    return np.gradient(v, h, axis=axis, edge_order=2)


def _d2(v, h, axis):
    """Second derivative: central inside, four-point one-sided at the two ends."""
    a = np.moveaxis(v, axis, 0)
    out = np.empty_like(a)
    out[1:-1] = (a[2:] - 2 * a[1:-1] + a[:-2]) / (h * h)
    out[0] = (2 * a[0] - 5 * a[1] + 4 * a[2] - a[3]) / (h * h)
    out[-1] = (2 * a[-1] - 5 * a[-2] + 4 * a[-3] - a[-4]) / (h * h)
    return np.moveaxis(out, 0, axis)


def gradient(f: Field2):
    g = f.grid
    m = f.margin + 1
    return f.like(_d1(f.values, g.hx, 0), m), f.like(_d1(f.values, g.hy, 1), m)


def laplacian(f: Field2) -> Field2:
    g = f.grid
    return f.like(_d2(f.values, g.hx, 0) + _d2(f.values, g.hy, 1), f.margin + 1)


def hessian(f: Field2):
    """(u_xx, u_xy, u_yx, u_yy); the mixed entries coincide."""
    g = f.grid
    m = f.margin + 1
    uxx = f.like(_d2(f.values, g.hx, 0), m)
    uyy = f.like(_d2(f.values, g.hy, 1), m)
    uxy = f.like(_d1(_d1(f.values, g.hx, 0), g.hy, 1), m)
    return uxx, uxy, uxy, uyy


def grad_laplacian(f: Field2):
    return gradient(laplacian(f))


def biharmonic(f: Field2) -> Field2:
    if f.grid.nx < 9 or f.grid.ny < 9:
        raise GridTooSmall("biharmonic needs at least 9 nodes per axis", nx=f.grid.nx, ny=f.grid.ny)
    return laplacian(laplacian(f))


def det_hessian(f: Field2) -> Field2:
    uxx, uxy, _, uyy = hessian(f)
    return uxx.like(uxx.values * uyy.values - uxy.values ** 2)


def ma_drift(f: Field2, eps_det: float = EPS_DET):
    """B = (Hess u)^{-1} grad(Lap u) through the closed-form 2x2 inverse."""
    uxx, uxy, _, uyy = hessian(f)
    gx, gy = grad_laplacian(f)
    det = uxx.values * uyy.values - uxy.values ** 2
    m = gx.margin
    probe = gx.like(det)
    inner = probe.valid()
    if np.any(inner <= eps_det):
        i, j = np.unravel_index(int(np.argmin(inner)), inner.shape)
        i, j = i + m, j + m
        raise DegenerateHessian("Hessian determinant not above threshold",
                                location=list(f.grid.coord(i, j)), value=float(det[i, j]),
                                eps_det=eps_det)
    safe = np.where(det > eps_det, det, 1.0)
    bx = np.where(det > eps_det, (uyy.values * gx.values - uxy.values * gy.values) / safe, 0.0)
    by = np.where(det > eps_det, (uxx.values * gy.values - uxy.values * gx.values) / safe, 0.0)
    return gx.like(bx), gx.like(by)


def ball_mask(f: Field2, center, r: float):
    """Nodes inside the closed ball; raises if the ball leaves the valid region."""
    g = f.grid
    cx, cy = center
    m = f.margin
    xlo, xhi = g.origin[0] + m * g.hx, g.origin[0] + (g.nx - 1 - m) * g.hx
    ylo, yhi = g.origin[1] + m * g.hy, g.origin[1] + (g.ny - 1 - m) * g.hy
    slack = 1e-12 * (1 + abs(r))
    if cx - r < xlo - slack or cx + r > xhi + slack or cy - r < ylo - slack or cy + r > yhi + slack:
        raise BallOutOfBounds("ball leaves the valid region", center=[float(cx), float(cy)], r=float(r))
    ci, cj = (cx - g.origin[0]) / g.hx, (cy - g.origin[1]) / g.hy
    on_node = abs(ci - round(ci)) < 1e-9 and abs(cj - round(cj)) < 1e-9
    I, J = np.meshgrid(np.arange(g.nx), np.arange(g.ny), indexing="ij")
    if on_node:
        # integer offsets keep the selected set exactly symmetric
        di = (I - int(round(ci))) * g.hx
        dj = (J - int(round(cj))) * g.hy
    else:
        di = g.origin[0] + I * g.hx - cx
        dj = g.origin[1] + J * g.hy - cy
    return di * di + dj * dj <= r * r * (1 + 1e-12)


def ball_average(f: Field2, center, r: float) -> float:
    mask = ball_mask(f, center, r)
    return float(np.mean(f.values[mask]))


def extrema(f: Field2) -> dict:
    """Max and min over the interior and over the outermost ring of the valid region."""
    g = f.grid
    m = f.margin
    ring = np.zeros(f.values.shape, dtype=bool)
    ring[m, m:g.ny - m] = True
    ring[g.nx - 1 - m, m:g.ny - m] = True
    ring[m:g.nx - m, m] = True
    ring[m:g.nx - m, g.ny - 1 - m] = True
    interior = np.zeros_like(ring)
    interior[m + 1:g.nx - 1 - m, m + 1:g.ny - 1 - m] = True
    out = {}
    for name, mask in (("interior", interior), ("boundary", ring)):
        if not mask.any():
            out.update({f"{name}Max": None, f"{name}Argmax": None,
                        f"{name}Min": None, f"{name}Argmin": None})
            continue
        # argmax/argmin on the C-ordered array returns the lexicographically first index
        hi = np.where(mask, f.values, -np.inf)
        lo = np.where(mask, f.values, np.inf)
        kmax = np.unravel_index(int(np.argmax(hi)), hi.shape)
        kmin = np.unravel_index(int(np.argmin(lo)), lo.shape)
        out[f"{name}Max"] = float(f.values[kmax])
        out[f"{name}Argmax"] = tuple(float(c) for c in g.coord(*kmax))
        out[f"{name}Min"] = float(f.values[kmin])
        out[f"{name}Argmin"] = tuple(float(c) for c in g.coord(*kmin))
    return out
