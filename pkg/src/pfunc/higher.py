"""Fourth-order P-functions checked on manufactured solutions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import grid as G
from .errors import HypothesisFail, MarginTooSmall, NotASolution, NotConvex, NotSubsolution
from .funcalg import Fn1, invert_expanding
from .report import CheckReport, Subcheck, field_stats

C_GRID = 10.0
CONVEX_TOL = 1e-10


@dataclass(frozen=True)
class ManufacturedSolution:
    """Closed-form field together with the equation and window it is used on."""

    id: str
    u: Callable
    xlim: tuple
    ylim: tuple
    h: float
    equation: str
    params: dict = field(default_factory=dict)
    description: str = ""

    def grid(self, h: Optional[float] = None) -> G.Grid2:
        return G.Grid2.rect(self.xlim, self.ylim, h or self.h)

    def field(self, h: Optional[float] = None) -> G.Field2:
        return G.Field2.from_function(self.grid(h), self.u)


def b73_cubic(s):
    return -(4.0 / 3.0) * np.asarray(s, dtype=float) ** (-5.0 / 3.0)


MANUFACTURED = {
    m.id: m for m in [
        ManufacturedSolution("ho73_cubic", lambda x, y: x ** 3, (1.0, 2.0), (0.0, 1.0), 1 / 128,
                             "fourth_order_73", {"a": "1", "b": "-(4/3) s^(-5/3)"},
                             "x^3 solves the 7.3-type equation with a = 1 away from x = 0"),
        ManufacturedSolution("ho73_harmonic", lambda x, y: x * x - y * y + 10 * y, (0.0, 1.0), (0.0, 4.0),
                             1 / 64, "fourth_order_73", {"a": "1", "b": "0"},
                             "harmonic field with u_y > 0 on the window"),
        ManufacturedSolution("ho74_quadratic", lambda x, y: x * x + y * y, (0.0, 2.0), (0.0, 2.0), 1 / 64,
                             "fourth_order_74", {"F3": "8"}, "|Hess u|^2 = 8 with zero bi-Laplacian"),
        ManufacturedSolution("cor76_quartic", lambda x, y: x ** 4 + y ** 4, (1.0, 2.0), (1.0, 2.0), 1 / 64,
                             "biharmonic_76", {"c": 1.0}, "convex subsolution for c = 1"),
        ManufacturedSolution("red77_quadratic", lambda x, y: x * x + y * y, (-1.0, 1.0), (-1.0, 1.0), 1 / 64,
                             "reduction_77", {}, "2|Hess u|^2 = (Lap u)^2 + u Bilap u"),
        ManufacturedSolution("pw75_quadratic", lambda x, y: x * x + y * y, (-2.5, 2.5), (-2.5, 2.5), 1 / 64,
                             "fourth_order_74", {"F3": "w^2/2"}, "window covering the radius-2 ball"),
        ManufacturedSolution("ma_quadratic", lambda x, y: 0.5 * (x * x + y * y), (-0.5, 0.5), (-0.5, 0.5),
                             1 / 128, "monge_ampere", {"rhs": "1"}, "det Hess u = 1, no drift"),
    ]
}


def manufactured(mid: str) -> ManufacturedSolution:
    return MANUFACTURED[mid]


# -- shared pieces ------------------------------------------------------------------------

def _prov(u: G.Field2, **extra):
    out = {"grid": u.grid.to_dict(), "window_bounded": True}
    out.update({k: v for k, v in extra.items() if v is not None})
    return out


def _loc(f: G.Field2, values, pick=np.argmin):
    k = np.unravel_index(int(pick(values)), values.shape)
    return tuple(float(c) for c in f.grid.coord(k[0] + f.margin, k[1] + f.margin))


def _require_margin(f: G.Field2):
    if f.valid().size == 0:
        raise MarginTooSmall("no nodes left inside the validity margin", margin=f.margin,
                             nx=f.grid.nx, ny=f.grid.ny)


def _default_tol(u: G.Field2, scale: float) -> float:
    return C_GRID * u.grid.h ** 2 * scale


def _hess_sq(u: G.Field2):
    uxx, uxy, _, uyy = G.hessian(u)
    return uxx.like(uxx.values ** 2 + 2 * uxy.values ** 2 + uyy.values ** 2)


def _gate_solution(E: np.ndarray, scale: float, u: G.Field2, ref: G.Field2, eq: str):
    tol = _default_tol(u, scale)
    worst = float(np.max(np.abs(E)))
    if not worst <= tol:
        raise NotASolution(f"field does not solve the {eq} equation", residual=worst, tol=tol,
                           location=list(_loc(ref, np.abs(E), np.argmax)))
    return worst, tol


def _richardson_d1(fn, x, h):
    c = lambda k: (fn(x + k) - fn(x - k)) / (2 * k)
    return (4 * c(h / 2) - c(h)) / 3


def _richardson_d2(fn, x, h):
    c = lambda k: (fn(x + k) - 2 * fn(x) + fn(x - k)) / (k * k)
    return (4 * c(h / 2) - c(h)) / 3


# -- 7.3-type equation ---------------------------------------------------------------------

def residual_prop73(a: Fn1, b: Callable, A: Fn1, B: Fn1, u: G.Field2, tol: Optional[float] = None,
                    provenance: Optional[dict] = None) -> CheckReport:
    """|grad u|^2 Lap P - Lap u (grad P . grad u) >= -tol for P = A(Lap u) - B(u)."""
    lap = G.laplacian(u)
    bil = G.biharmonic(u)
    _require_margin(bil)
    sl = bil.valid_slice()
    s = u.values[sl]
    w = lap.values[sl]

    ww = np.linspace(float(w.min()), float(w.max()), 65)
    sw = np.linspace(float(s.min()), float(s.max()), 65)
    hw = 1e-3 * (1 + np.abs(ww))
    hs = 1e-2 * (1 + np.abs(sw))
    gap_a = np.abs(_richardson_d1(lambda x: np.asarray(A(x)), ww, hw) - np.asarray(a(ww)))
    gap_b = np.abs(_richardson_d2(lambda x: np.asarray(B(x)), sw, hs) - np.asarray(b(sw)))
    if np.max(gap_a / (1 + np.abs(a(ww)))) > 1e-8:
        raise HypothesisFail("A' differs from a", hypothesis="A' = a", value=float(gap_a.max()))
    if np.max(gap_b / (1 + np.abs(b(sw)))) > 1e-8:
        raise HypothesisFail("B'' differs from b", hypothesis="B'' = b", value=float(gap_b.max()))

    ux, uy = G.gradient(u)
    lx, ly = G.grad_laplacian(u)
    gx, gy = ux.values[sl], uy.values[sl]
    t = gx ** 2 + gy ** 2
    bracket = t * bil.values[sl] - w * (gx * lx.values[sl] + gy * ly.values[sl])
    av = np.asarray(a(w))
    lhs = av * bracket
    rhs = np.asarray(b(s)) * t * t
    E = lhs - rhs
    eq_scale = 1 + float(np.max(np.abs(lhs) + np.abs(rhs)))
    eq_res, eq_tol = _gate_solution(E, eq_scale, u, bil, "7.3-type")

    Pf = lap.like(np.asarray(A(lap.values)) - np.asarray(B(u.values)))
    lapP = G.laplacian(Pf)
    Px, Py = G.gradient(Pf)
    _require_margin(lapP)
    sp_ = lapP.valid_slice()
    gx2, gy2 = ux.values[sp_], uy.values[sp_]
    T1 = (gx2 ** 2 + gy2 ** 2) * lapP.values[sp_]
    T2 = -lap.values[sp_] * (Px.values[sp_] * gx2 + Py.values[sp_] * gy2)
    R = T1 + T2
    scale = 1 + float(np.max(np.abs(T1) + np.abs(T2)))
    tol = _default_tol(u, scale) if tol is None else tol
    worst = float(R.min())
    return CheckReport("residual_prop73", worst >= -tol, worst, _loc(lapP, R), tol, "ge", field_stats(R),
                       _prov(u, **(provenance or {})),
                       details={"equation_residual": eq_res, "equation_tol": eq_tol, "scale": scale})


def check_laplacian_bound(A: Fn1, B: Fn1, u: G.Field2, tol: float,
                          provenance: Optional[dict] = None) -> CheckReport:
    """max(Lap u - A^{-1}(B(u))) <= tol under B(u) >= 0 and u_y > 0."""
    lap = G.laplacian(u)
    sl = lap.valid_slice()
    s = u.values[sl]
    bv = np.asarray(B(s), dtype=float)
    if np.min(bv) < 0:
        raise HypothesisFail("B(u) is negative on the range of u", hypothesis="B(u) >= 0",
                             value=float(np.min(bv)))
    _, uy = G.gradient(u)
    if np.min(uy.valid()) <= 0:
        raise HypothesisFail("u_y is not positive on the window", hypothesis="u_y > 0",
                             value=float(np.min(uy.valid())), location=list(_loc(uy, uy.valid())))
    levels, inv = np.unique(bv, return_inverse=True)
    gamma_lv = np.array([invert_expanding(A, float(y), (-1.0, 1.0)) for y in levels])
    gamma = gamma_lv[inv].reshape(s.shape)
    diff = lap.values[sl] - gamma
    worst = float(diff.max())
    return CheckReport("laplacian_bound", worst <= tol, worst, _loc(lap, diff, np.argmax), tol, "le",
                       field_stats(diff), _prov(u, **(provenance or {})))


# -- 7.4-type equation ---------------------------------------------------------------------

def _prop74_parts(F3: Callable, u: G.Field2):
    lap = G.laplacian(u)
    bil = G.biharmonic(u)
    _require_margin(bil)
    sl = bil.valid_slice()
    hs = _hess_sq(u)
    t = (lambda g: g[0].values ** 2 + g[1].values ** 2)(G.gradient(u))
    f3 = np.broadcast_to(np.asarray(F3(u.values, t, lap.values), dtype=float), u.values.shape)
    E = hs.values[sl] - f3[sl] - 0.5 * u.values[sl] * bil.values[sl]
    scale = 1 + float(np.max(np.abs(hs.values[sl]) + np.abs(f3[sl]) + np.abs(0.5 * u.values[sl] * bil.values[sl])))
    return lap, bil, t, f3, E, scale, sl


def residual_prop74(F3: Callable, u: G.Field2, tol: Optional[float] = None,
                    provenance: Optional[dict] = None) -> CheckReport:
    """P = |grad u|^2 - u Lap u has Lap P = 2 F3 - (Lap u)^2 >= 0."""
    lap, bil, t, f3, E, eq_scale, sl = _prop74_parts(F3, u)
    # the structural hypothesis is gated first so that a failing F3 is named as such
    w = lap.values[sl]
    short = f3[sl] - 0.5 * w * w
    if np.min(short) < -1e-12 * (1 + float(np.max(np.abs(f3[sl])))):
        raise HypothesisFail("F3 < w^2/2 at an attained sample", hypothesis="F3 >= w^2/2",
                             value=float(np.min(short)), location=list(_loc(bil, short)))
    eq_res, eq_tol = _gate_solution(E, eq_scale, u, bil, "7.4-type")
    Pf = lap.like(t - u.values * lap.values)
    lapP = G.laplacian(Pf)
    sp_ = lapP.valid_slice()
    target = 2 * f3[sp_] - lap.values[sp_] ** 2
    ident = np.abs(lapP.values[sp_] - target)
    scale = 1 + float(np.max(np.abs(lapP.values[sp_]) + np.abs(target)))
    tol = _default_tol(u, scale) if tol is None else tol
    worst_id = float(ident.max())
    worst = float(lapP.values[sp_].min())
    subs = [
        Subcheck("identity", worst_id <= tol, worst_id, _loc(lapP, ident, np.argmax), tol),
        Subcheck("lap_P_nonnegative", worst >= -tol, worst, _loc(lapP, lapP.values[sp_]), tol),
    ]
    return CheckReport("residual_prop74", all(c.passed for c in subs), worst, _loc(lapP, lapP.values[sp_]),
                       tol, "ge", field_stats(lapP.values[sp_]), _prov(u, **(provenance or {})),
                       subchecks=subs, details={"equation_residual": eq_res, "equation_tol": eq_tol,
                                                "max_abs_lap_P": float(np.max(np.abs(lapP.values[sp_])))})


def check_bound_74(u: G.Field2, tol: float, provenance: Optional[dict] = None) -> CheckReport:
    """|grad u|^2 <= u Lap u, i.e. max P <= tol."""
    lap = G.laplacian(u)
    t = (lambda g: g[0].values ** 2 + g[1].values ** 2)(G.gradient(u))
    Pf = lap.like(t - u.values * lap.values)
    pv = Pf.valid()
    worst = float(pv.max())
    return CheckReport("bound_74", worst <= tol, worst, _loc(Pf, pv, np.argmax), tol, "le", field_stats(pv),
                       _prov(u, **(provenance or {})))


def _equality_F3(s, t, w):
    return 0.5 * np.asarray(w) ** 2


def check_pointwise_75(u: G.Field2, tol: float, F3: Callable = _equality_F3,
                       provenance: Optional[dict] = None) -> CheckReport:
    """max over the unit ball of P against (|| u ||_H1 + || Lap u ||_L2 on the radius-2 ball) / pi."""
    lap, bil, t, f3, E, eq_scale, sl = _prop74_parts(F3, u)
    eq_res, eq_tol = _gate_solution(E, eq_scale, u, bil, "7.4-type")
    X, Y = u.grid.mesh()
    r2 = X * X + Y * Y
    valid = lap.valid_mask()
    in2 = valid & (r2 <= 4.0)
    ring_ok = G.ball_mask(lap, (0.0, 0.0), 2.0)  # raises if the radius-2 ball leaves the window
    del ring_ok
    in1 = valid & (r2 < 1.0)
    cell = u.grid.hx * u.grid.hy
    h1 = math.sqrt(float(np.sum((u.values ** 2 + t)[in2])) * cell)
    l2 = math.sqrt(float(np.sum(lap.values[in2] ** 2)) * cell)
    P = t - u.values * lap.values
    pmax = float(P[in1].max())
    rhs = (h1 + l2) / math.pi
    worst = pmax - rhs
    k = np.flatnonzero(in1.ravel())[int(np.argmax(P[in1]))]
    loc = tuple(float(c) for c in u.grid.coord(*np.unravel_index(k, P.shape)))
    return CheckReport("pointwise_75", worst <= tol, worst, loc, tol, "le", field_stats(P[in1]),
                       _prov(u, **(provenance or {})),
                       details={"max_P_B1": pmax, "H1_B2": h1, "L2_lap_B2": l2, "rhs": rhs,
                                "equation_residual": eq_res})


# -- 7.6 and 7.7 ---------------------------------------------------------------------------

def residual_cor76(c: float, u: G.Field2, tol: Optional[float] = None,
                   provenance: Optional[dict] = None) -> CheckReport:
    """For convex subsolutions of c|Hess u|^2 - Bilap u = 0, P = (Lap u)^2 is subharmonic."""
    uxx, uxy, _, uyy = G.hessian(u)
    sl = uxx.valid_slice()
    a, b, d = uxx.values[sl], uxy.values[sl], uyy.values[sl]
    H = np.stack([np.stack([a, b], -1), np.stack([b, d], -1)], -2)
    emin = np.linalg.eigvalsh(H)[..., 0]
    if np.min(emin) < -CONVEX_TOL:
        raise NotConvex("discrete Hessian has a negative eigenvalue", value=float(np.min(emin)),
                        location=list(_loc(uxx, emin)))
    lap = G.laplacian(u)
    bil = G.biharmonic(u)
    _require_margin(bil)
    s2 = bil.valid_slice()
    hs = _hess_sq(u).values[s2]
    sub = c * hs - bil.values[s2]
    sub_scale = 1 + float(np.max(np.abs(c * hs) + np.abs(bil.values[s2])))
    sub_tol = _default_tol(u, sub_scale)
    if np.min(sub) < -sub_tol:
        raise NotSubsolution("c |Hess u|^2 - Bilap u negative", value=float(np.min(sub)), tol=sub_tol)
    Pf = lap.like(lap.values ** 2)
    lapP = G.laplacian(Pf)
    lx, ly = G.grad_laplacian(u)
    target = 2 * (lx.values[s2] ** 2 + ly.values[s2] ** 2) + 2 * lap.values[s2] * bil.values[s2]
    gap = np.abs(lapP.values[s2] - target)
    scale = 1 + float(np.max(np.abs(lapP.values[s2]) + np.abs(target)))
    tol = _default_tol(u, 1.0) if tol is None else tol
    worst = float(lapP.values[s2].min())
    worst_gap = float(gap.max())
    subs = [
        Subcheck("lap_P_nonnegative", worst >= -tol * scale, worst, _loc(lapP, lapP.values[s2]), tol * scale),
        Subcheck("proof_identity", worst_gap <= tol * scale, worst_gap, _loc(lapP, gap, np.argmax), tol * scale),
    ]
    return CheckReport("residual_cor76", all(s.passed for s in subs), worst, _loc(lapP, lapP.values[s2]),
                       tol * scale, "ge", field_stats(lapP.values[s2]), _prov(u, **(provenance or {})),
                       subchecks=subs,
                       details={"identity_gap": worst_gap, "scale": scale,
                                "liouville_consistency": "subharmonic nonnegative P = (Lap u)^2 on a bounded "
                                                         "window is consistent with constant grad u; "
                                                         "reported as consistency, not proof"})


def check_reduction_77(u: G.Field2, tol: float, provenance: Optional[dict] = None) -> CheckReport:
    """P = |grad u|^2 - u Lap u is harmonic and, on a bounded window, constant."""
    lap = G.laplacian(u)
    bil = G.biharmonic(u)
    _require_margin(bil)
    sl = bil.valid_slice()
    hs = _hess_sq(u).values[sl]
    E = 2 * hs - lap.values[sl] ** 2 - u.values[sl] * bil.values[sl]
    eq_scale = 1 + float(np.max(2 * np.abs(hs) + lap.values[sl] ** 2 + np.abs(u.values[sl] * bil.values[sl])))
    eq_res, eq_tol = _gate_solution(E, eq_scale, u, bil, "reduction")
    t = (lambda g: g[0].values ** 2 + g[1].values ** 2)(G.gradient(u))
    Pf = lap.like(t - u.values * lap.values)
    lapP = G.laplacian(Pf)
    lp = lapP.valid()
    harm = float(np.max(np.abs(lp)))
    pv = Pf.valid()
    spread = float(pv.max() - pv.min())
    subs = [
        Subcheck("P_harmonic", harm <= tol, harm, _loc(lapP, np.abs(lp), np.argmax), tol),
        Subcheck("constancy_on_window", spread <= tol, spread, _loc(Pf, pv, np.argmax), tol),
    ]
    return CheckReport("reduction_77", all(s.passed for s in subs), harm, _loc(lapP, np.abs(lp), np.argmax),
                       tol, "approx", field_stats(pv), _prov(u, **(provenance or {})), subchecks=subs,
                       details={"P_mean": float(pv.mean()), "max_abs_P": float(np.max(np.abs(pv))),
                                "equation_residual": eq_res, "equation_tol": eq_tol})
