"""Discrete solutions: damped Newton on uniform grids and an RK4 profile integrator."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
from scipy.linalg import LinAlgError, solve_banded

from . import grid as G
from .errors import (BlowUp, DegenerateEllipticity, DomainError, EllipticityLost,
                     LinearSolveFailure, NoConvergence, NonFinite)
from .funcalg import DivergenceForm, Fn1, Fn2, GradientSemilinear, Semilinear

BLOWUP_LIMIT = 1e6
ELLIPTIC_FLOOR = 1e-12


class InitialGuess(enum.Enum):
    ZERO = "ZeroField"
    HARMONIC_LIFT = "BoundaryHarmonicLift"
    GIVEN = "GivenField"


@dataclass
class NewtonOpts:
    max_iter: int = 50
    residual_tol: float = 1e-10
    damping_halvings: int = 20
    initial_guess: InitialGuess = InitialGuess.HARMONIC_LIFT
    guess: Optional[np.ndarray] = None

    def __post_init__(self):
        if not self.residual_tol > 0:
            raise ValueError("residual_tol must be positive")
        if isinstance(self.initial_guess, str):
            self.initial_guess = InitialGuess(self.initial_guess)
        if self.initial_guess is InitialGuess.GIVEN and self.guess is None:
            raise ValueError("GivenField initial guess requires a guess array")


@dataclass
class SolveResult:
    u: G.Field2
    iterations: int
    residuals: list
    converged: bool
    recheck_residual: float
    method: str

    def telemetry(self):
        return {
            "method": self.method,
            "iterations": self.iterations,
            "residuals": [float(r) for r in self.residuals],
            "converged": self.converged,
            "recheckResidual": self.recheck_residual,
        }


# -- sparse operators on the full node set (row-major, i outer) ---------------

def _d1_matrix(n: int, h: float):
    """Matrix of np.gradient(edge_order=2) along one axis."""
    rows, cols, vals = [], [], []
    for k in range(1, n - 1):
        rows += [k, k]
        cols += [k - 1, k + 1]
        vals += [-0.5 / h, 0.5 / h]
    rows += [0, 0, 0, n - 1, n - 1, n - 1]
    cols += [0, 1, 2, n - 1, n - 2, n - 3]
    vals += [-1.5 / h, 2 / h, -0.5 / h, 1.5 / h, -2 / h, 0.5 / h]
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def _d2_matrix(n: int, h: float):
    main = np.full(n, -2.0)
    off = np.ones(n - 1)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr") / (h * h)


def _forward_diff(n: int, h: float):
    """(n-1) x n face difference (v[k+1] - v[k]) / h."""
    return sp.diags([-np.ones(n - 1), np.ones(n - 1)], [0, 1], shape=(n - 1, n), format="csr") / h


def _face_average(n: int):
    return sp.diags([np.full(n - 1, 0.5), np.full(n - 1, 0.5)], [0, 1], shape=(n - 1, n), format="csr")


class _Ops:
    def __init__(self, grid: G.Grid2):
        nx, ny = grid.nx, grid.ny
        Ix, Iy = sp.identity(nx, format="csr"), sp.identity(ny, format="csr")
        self.Gx = sp.kron(_d1_matrix(nx, grid.hx), Iy, format="csr")
        self.Gy = sp.kron(Ix, _d1_matrix(ny, grid.hy), format="csr")
        self.L = (sp.kron(_d2_matrix(nx, grid.hx), Iy) + sp.kron(Ix, _d2_matrix(ny, grid.hy))).tocsr()
        self.Dx = sp.kron(_forward_diff(nx, grid.hx), Iy, format="csr")
        self.Dy = sp.kron(Ix, _forward_diff(ny, grid.hy), format="csr")
        self.Ax = sp.kron(_face_average(nx), Iy, format="csr")
        self.Ay = sp.kron(Ix, _face_average(ny), format="csr")
        mask = np.zeros((nx, ny), dtype=bool)
        mask[1:-1, 1:-1] = True
        self.interior = np.flatnonzero(mask.ravel())
        self.shape = (nx, ny)


def _banded_solve(A, b):
    """Direct banded LU solve of a sparse matrix, packed into LAPACK band storage."""
    A = A.tocoo()
    n = A.shape[0]
    off = A.row.astype(np.int64) - A.col
    lower = int(max(off.max(), 0)) if A.nnz else 0
    upper = int(max(-off.min(), 0)) if A.nnz else 0
    ab = np.zeros((lower + upper + 1, n))
    np.add.at(ab, (upper + off, A.col), A.data)
    try:
        x = solve_banded((lower, upper), ab, b, check_finite=True)
    except (LinAlgError, ValueError) as exc:
        raise LinearSolveFailure(f"banded solve failed: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise LinearSolveFailure("banded solve produced non-finite values")
    return x


def _boundary_values(grid: G.Grid2, bc) -> np.ndarray:
    X, Y = grid.mesh()
    if callable(bc):
        vals = np.broadcast_to(np.asarray(bc(X, Y), dtype=float), X.shape).copy()
    else:
        vals = np.broadcast_to(np.asarray(bc, dtype=float), X.shape).copy()
    edge = np.ones(X.shape, dtype=bool)
    edge[1:-1, 1:-1] = False
    if not np.all(np.isfinite(vals[edge])):
        raise NonFinite("boundary data not finite")
    vals[~edge] = 0.0
    return vals


def _harmonic_lift(ops: _Ops, ub: np.ndarray) -> np.ndarray:
    u = ub.ravel().copy()
    idx = ops.interior
    rhs = -(ops.L @ u)[idx]
    u[idx] = _banded_solve(ops.L[idx][:, idx], rhs)
    return u


def _initial(ops, ub, opts: NewtonOpts):
    if opts.initial_guess is InitialGuess.HARMONIC_LIFT:
        return _harmonic_lift(ops, ub)
    u = ub.ravel().copy()
    if opts.initial_guess is InitialGuess.GIVEN:
        guess = np.asarray(opts.guess, dtype=float).reshape(ops.shape)
        u[ops.interior] = guess.ravel()[ops.interior]
    return u


def _newton(ops: _Ops, u, residual: Callable, jacobian: Callable, opts: NewtonOpts):
    idx = ops.interior

    def rnorm(v):
        try:
            r = residual(v)
        except (DomainError, NonFinite, FloatingPointError):
            return math.inf, None
        n = float(np.max(np.abs(r))) if r.size else 0.0
        return (n if math.isfinite(n) else math.inf), r

    norm, r = rnorm(u)
    if r is None:
        raise NoConvergence("initial guess outside the admissible range", iter=0, residual=None)
    history = [norm]
    it = 0
    while norm > opts.residual_tol:
        if it >= opts.max_iter:
            raise NoConvergence("Newton iteration limit reached", iter=it, residual=norm)
        J = jacobian(u)
        step = np.zeros_like(u)
        step[idx] = _banded_solve(J, -r)
        lam = 1.0
        for _ in range(opts.damping_halvings + 1):
            trial = u + lam * step
            tnorm, tr = rnorm(trial)
            if tnorm < norm:
                break
            lam *= 0.5
        else:
            raise NoConvergence("damping failed to reduce the residual", iter=it, residual=norm)
        u, r, norm = trial, tr, tnorm
        it += 1
        history.append(norm)
    return u, it, history


def solve_gradient_semilinear(F: Fn2, grid: G.Grid2, bc, opts: Optional[NewtonOpts] = None) -> SolveResult:
    """Solve Lap_h u = F(u, |grad_h u|^2) with Dirichlet data ``bc``."""
    opts = opts or NewtonOpts()
    ops = _Ops(grid)
    idx = ops.interior
    ub = _boundary_values(grid, bc)

    def residual(u):
        gx, gy = ops.Gx @ u, ops.Gy @ u
        s, t = u[idx], gx[idx] ** 2 + gy[idx] ** 2
        return (ops.L @ u)[idx] - np.asarray(F(s, t))

    def jacobian(u):
        gx, gy = ops.Gx @ u, ops.Gy @ u
        t = gx ** 2 + gy ** 2
        fs = np.broadcast_to(np.asarray(F.ps(u[idx], t[idx]), dtype=float), idx.shape)
        ft = np.broadcast_to(np.asarray(F.pt(u[idx], t[idx]), dtype=float), idx.shape)
        Gx, Gy = ops.Gx[idx], ops.Gy[idx]
        J = ops.L[idx] - sp.diags(fs) @ sp.identity(u.size, format="csr")[idx] \
            - sp.diags(2 * ft * gx[idx]) @ Gx - sp.diags(2 * ft * gy[idx]) @ Gy
        return J.tocsr()[:, idx]

    u0 = _initial(ops, ub, opts)
    u, it, hist = _newton(ops, u0, residual, jacobian, opts)
    field_u = G.Field2(grid, u.reshape(ops.shape))
    recheck = recheck_gradient_semilinear(F, field_u)
    _accept_recheck(recheck, opts, it)
    return SolveResult(field_u, it, hist, True, recheck, "gradient_semilinear")


def recheck_gradient_semilinear(F: Fn2, u: G.Field2) -> float:
    """Equation residual recomputed with the grid operators, independently of the Newton loop."""
    lap = G.laplacian(u)
    gx, gy = G.gradient(u)
    sl = lap.valid_slice()
    res = lap.values[sl] - np.asarray(F(u.values[sl], gx.values[sl] ** 2 + gy.values[sl] ** 2))
    return float(np.max(np.abs(res)))


def _accept_recheck(recheck, opts, it):
    # tolerate rounding differences between the two evaluation paths
    if not recheck <= 10 * opts.residual_tol:
        raise NoConvergence("independent residual check failed", iter=it, residual=recheck)


def _check_elliptic(Phi: Fn1, rho: Fn1, t, locate):
    t = np.asarray(t, dtype=float)
    dphi = np.asarray(Phi.d1(t))
    ell = dphi + 2 * t * np.asarray(Phi.d2(t))
    r = np.asarray(rho(t))
    bad = (dphi <= 0) | (ell <= 0) | (r <= 0)
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise EllipticityLost("ellipticity lost on a cell face", location=locate(k),
                              value=float(ell[k]), t=float(t[k]))


def solve_divergence_form(Phi: Fn1, rho: Fn1, Fpot: Fn1, grid: G.Grid2, bc,
                          opts: Optional[NewtonOpts] = None) -> SolveResult:
    """Solve div(Phi'(|grad u|^2) grad u) = rho(|grad u|^2) Fpot'(u) by face-flux differencing.

    Phi' on a face is evaluated at the mean of |grad_h u|^2 over the two
    adjacent nodes.
    """
    opts = opts or NewtonOpts()
    ops = _Ops(grid)
    idx = ops.interior
    nx, ny = ops.shape
    ub = _boundary_values(grid, bc)
    # divergence of x- and y-face fluxes restricted to interior nodes
    Bx = sp.kron(_forward_diff(nx, grid.hx).T * -1, sp.identity(ny), format="csr")[idx]
    By = sp.kron(sp.identity(nx), _forward_diff(ny, grid.hy).T * -1, format="csr")[idx]
    xface = np.array([(i + 0.5, j) for i in range(nx - 1) for j in range(ny)])
    yface = np.array([(i, j + 0.5) for i in range(nx) for j in range(ny - 1)])

    def locator(faces):
        return lambda k: list(grid.coord(*faces[k]))

    def parts(u):
        gx, gy = ops.Gx @ u, ops.Gy @ u
        t = gx ** 2 + gy ** 2
        tfx, tfy = ops.Ax @ t, ops.Ay @ t
        _check_elliptic(Phi, rho, tfx, locator(xface))
        _check_elliptic(Phi, rho, tfy, locator(yface))
        return gx, gy, t, tfx, tfy

    def residual(u):
        gx, gy, t, tfx, tfy = parts(u)
        div = Bx @ (np.asarray(Phi.d1(tfx)) * (ops.Dx @ u)) + By @ (np.asarray(Phi.d1(tfy)) * (ops.Dy @ u))
        return div - np.asarray(rho(t[idx])) * np.asarray(Fpot.d1(u[idx]))

    def jacobian(u):
        gx, gy, t, tfx, tfy = parts(u)
        dt = sp.diags(2 * gx) @ ops.Gx + sp.diags(2 * gy) @ ops.Gy
        dxu, dyu = ops.Dx @ u, ops.Dy @ u
        jfx = sp.diags(np.asarray(Phi.d1(tfx))) @ ops.Dx + sp.diags(np.asarray(Phi.d2(tfx)) * dxu) @ (ops.Ax @ dt)
        jfy = sp.diags(np.asarray(Phi.d1(tfy))) @ ops.Dy + sp.diags(np.asarray(Phi.d2(tfy)) * dyu) @ (ops.Ay @ dt)
        s = u[idx]
        rhs = sp.diags(np.asarray(rho.d1(t[idx])) * np.asarray(Fpot.d1(s))) @ dt[idx] \
            + sp.diags(np.asarray(rho(t[idx])) * np.asarray(Fpot.d2(s))) @ sp.identity(u.size, format="csr")[idx]
        return (Bx @ jfx + By @ jfy - rhs).tocsr()[:, idx]

    u0 = _initial(ops, ub, opts)
    u, it, hist = _newton(ops, u0, residual, jacobian, opts)
    field_u = G.Field2(grid, u.reshape(ops.shape))
    recheck = recheck_divergence_form(Phi, rho, Fpot, field_u)
    _accept_recheck(recheck, opts, it)
    return SolveResult(field_u, it, hist, True, recheck, "divergence_form")


def recheck_divergence_form(Phi: Fn1, rho: Fn1, Fpot: Fn1, u: G.Field2) -> float:
    g = u.grid
    v = u.values
    gx, gy = G.gradient(u)
    t = gx.values ** 2 + gy.values ** 2
    tfx = 0.5 * (t[1:, :] + t[:-1, :])
    tfy = 0.5 * (t[:, 1:] + t[:, :-1])
    fx = np.asarray(Phi.d1(tfx)) * (v[1:, :] - v[:-1, :]) / g.hx
    fy = np.asarray(Phi.d1(tfy)) * (v[:, 1:] - v[:, :-1]) / g.hy
    div = (fx[1:, 1:-1] - fx[:-1, 1:-1]) / g.hx + (fy[1:-1, 1:] - fy[1:-1, :-1]) / g.hy
    inner = (slice(1, -1), slice(1, -1))
    rhs = np.asarray(rho(t[inner])) * np.asarray(Fpot.d1(v[inner]))
    return float(np.max(np.abs(div - rhs)))


# -- 1D profiles --------------------------------------------------------------

def _profile_rhs(eq) -> Callable:
    """Second-order ODE u'' = g(u, u') for the 1D reduction of ``eq``."""
    if isinstance(eq, Semilinear):
        f = eq.f
        return lambda u, v: float(f(u))
    if isinstance(eq, GradientSemilinear):
        F = eq.F
        return lambda u, v: float(F(u, v * v))
    if isinstance(eq, DivergenceForm):
        Phi, rho, Fp = eq.Phi, eq.rho, eq.Fpot

        def rhs(u, v):
            t = v * v
            den = float(Phi.d1(t)) + 2 * t * float(Phi.d2(t))
            if den <= ELLIPTIC_FLOOR:
                raise DegenerateEllipticity("Phi' + 2t Phi'' not positive along the profile",
                                            value=den, t=t)
            return float(rho(t)) * float(Fp.d1(u)) / den
        return rhs
    raise TypeError(f"no 1D reduction for {type(eq).__name__}")


def _rk4_march(g, u, v, h, n, x0):
    us, vs = [u], [v]
    x = x0
    for k in range(n):
        k1u, k1v = v, g(u, v)
        k2u, k2v = v + 0.5 * h * k1v, g(u + 0.5 * h * k1u, v + 0.5 * h * k1v)
        k3u, k3v = v + 0.5 * h * k2v, g(u + 0.5 * h * k2u, v + 0.5 * h * k2v)
        k4u, k4v = v + h * k3v, g(u + h * k3u, v + h * k3v)
        u = u + h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
        v = v + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        x = x0 + (k + 1) * h
        if not (abs(u) <= BLOWUP_LIMIT and abs(v) <= BLOWUP_LIMIT):
            raise BlowUp("profile left the bounded range", x=x, u=u, du=v)
        us.append(u)
        vs.append(v)
    return us, vs


def integrate_profile(eq, u0: float, v0: float, h: float, span, x0: Optional[float] = None) -> G.Profile1:
    """Classical RK4 for (u, u') starting at x0 (default: 0 if inside span) and marching both ways."""
    a, b = float(span[0]), float(span[1])
    if not (h > 0 and b > a):
        raise ValueError("need h > 0 and a nonempty span")
    if x0 is None:
        x0 = 0.0 if a <= 0.0 <= b else a
    n_fwd = int(round((b - x0) / h))
    n_bwd = int(round((x0 - a) / h))
    if n_fwd + n_bwd < 10:
        raise ValueError("profile needs at least 10 steps")
    g = _profile_rhs(eq)
    fu, fv = _rk4_march(g, float(u0), float(v0), h, n_fwd, x0)
    bu, bv = _rk4_march(g, float(u0), float(v0), -h, n_bwd, x0)
    u = np.array(bu[::-1] + fu[1:])
    du = np.array(bv[::-1] + fv[1:])
    xs = x0 + h * np.arange(-n_bwd, n_fwd + 1)
    return G.Profile1(xs, u, du, h)


def kink(x):
    """Heteroclinic u = tanh(x / sqrt 2) of u'' = u^3 - u, with u' = (1 - u^2) / sqrt 2."""
    u = np.tanh(np.asarray(x, dtype=float) / math.sqrt(2))
    return u, (1 - u * u) / math.sqrt(2)


def kink_profile(span=(-10.0, 10.0), h: float = 1e-3) -> G.Profile1:
    n = int(round((span[1] - span[0]) / h))
    xs = span[0] + h * np.arange(n + 1)
    u, du = kink(xs)
    return G.Profile1(xs, u, du, h)
