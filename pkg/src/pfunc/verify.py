"""Residual and inequality checks over solved fields and 1D profiles."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from . import grid as G
from .errors import (HypothesisFail, ModeMismatch, NotASolution, NotSubharmonic, PNotConstant)
from .funcalg import Fn1, Fn2, PFunctionSpec
from .report import CheckReport, Subcheck, field_stats, rule_passes
from .solver import recheck_gradient_semilinear

C_GRID = 10.0
EQ_PRECHECK_TOL = 1e-8
DRIFT_FREE = 1e-8
MA_RADII = (0.1, 0.2, 0.4)

Target = Union[G.Field2, G.Profile1]


def _field_provenance(u: G.Field2, **extra):
    out = {"grid": u.grid.to_dict(), "margin": u.margin}
    out.update({k: v for k, v in extra.items() if v is not None})
    return out


def _profile_provenance(p: G.Profile1, **extra):
    out = {"profile": {"h": p.h, "x0": float(p.xs[0]), "x1": float(p.xs[-1]), "n": int(p.xs.size)}}
    out.update({k: v for k, v in extra.items() if v is not None})
    return out


def _loc(f: G.Field2, values, pick=np.argmin):
    """Location of the extreme of ``values`` over f's valid region (first in index order)."""
    k = np.unravel_index(int(pick(values)), values.shape)
    m = f.margin
    return tuple(float(c) for c in f.grid.coord(k[0] + m, k[1] + m))


def grad_sq(u: G.Field2) -> G.Field2:
    gx, gy = G.gradient(u)
    return gx.like(gx.values ** 2 + gy.values ** 2)


def eval_P_field(spec: Union[PFunctionSpec, Fn2], u: G.Field2) -> G.Field2:
    """P(u, |grad_h u|^2) at every node; valid one ring inside u's valid region."""
    P = spec.P if isinstance(spec, PFunctionSpec) else spec
    t = grad_sq(u)
    return t.like(np.asarray(P(u.values, t.values), dtype=float))


def eval_P_profile(spec: Union[PFunctionSpec, Fn2], prof: G.Profile1) -> np.ndarray:
    P = spec.P if isinstance(spec, PFunctionSpec) else spec
    return np.asarray(P(prof.u, prof.du ** 2), dtype=float)


def mu_field(spec: PFunctionSpec, u: G.Field2) -> G.Field2:
    t = grad_sq(u)
    return t.like(np.broadcast_to(spec.mu(u.values, t.values), t.values.shape))


# -- main differential inequality ------------------------------------------------

def residual_main_inequality(P: Fn2, F: Fn2, u: G.Field2, cgrid: float = C_GRID,
                             eq_tol: float = EQ_PRECHECK_TOL, provenance: Optional[dict] = None):
    """R = Pt |grad u|^2 Lap P - (2 Pt |grad u|^2 Ft - Ps) grad P . grad u - |grad P|^2 / 2 >= -tol.

    Derivatives of P are taken from the evaluated P-field (outer differencing);
    the chain-rule gradient is reported alongside as a cross-check.
    """
    eq_res = recheck_gradient_semilinear(F, u)
    if not eq_res <= eq_tol:
        raise NotASolution("field does not solve the declared equation", residual=eq_res, tol=eq_tol)
    Pf = eval_P_field(P, u)
    lapP = G.laplacian(Pf)
    Px, Py = G.gradient(Pf)
    ux, uy = G.gradient(u)
    sl = lapP.valid_slice()
    s = u.values[sl]
    gx, gy = ux.values[sl], uy.values[sl]
    t = gx ** 2 + gy ** 2
    ps, pt = np.asarray(P.ps(s, t)), np.asarray(P.pt(s, t))
    ft = np.asarray(F.pt(s, t))
    dPx, dPy = Px.values[sl], Py.values[sl]
    dot = dPx * gx + dPy * gy
    T1 = pt * t * lapP.values[sl]
    T2 = -(2 * pt * t * ft - ps) * dot
    T3 = -0.5 * (dPx ** 2 + dPy ** 2)
    R = T1 + T2 + T3
    scale = 1.0 + float(np.max(np.abs(T1) + np.abs(T2) + np.abs(T3)))
    h = u.grid.h
    tol = cgrid * h * h * scale

    # chain rule: grad P = Ps grad u + Pt grad t, grad t = 2 Hess u grad u
    uxx, uxy, _, uyy = G.hessian(u)
    cx = ps * gx + pt * 2 * (uxx.values[sl] * gx + uxy.values[sl] * gy)
    cy = ps * gy + pt * 2 * (uxy.values[sl] * gx + uyy.values[sl] * gy)
    chain_gap = float(np.max(np.hypot(cx - dPx, cy - dPy)))

    full = np.zeros(u.values.shape)
    full[sl] = R
    Rfield = lapP.like(full)
    worst = float(R.min())
    pos = t > 0
    gate_val = float(pt[pos].min()) if np.any(pos) else math.inf
    subs = [
        Subcheck("pt_positive", gate_val > 0, gate_val, None, 0.0),
        Subcheck("residual_nonnegative", worst >= -tol, worst, _loc(lapP, R), tol),
    ]
    rep = CheckReport(
        "residual_main_inequality", all(c.passed for c in subs), worst, _loc(lapP, R), tol, "ge",
        field_stats(R), _field_provenance(u, **(provenance or {})), subchecks=subs,
        details={"equation_residual": eq_res, "scale": scale, "cgrid": cgrid,
                 "chain_rule_gradient_gap": chain_gap,
                 "proxy": "bounded-domain solution stands in for an entire solution"})
    return Rfield, rep


# -- maximum principles ----------------------------------------------------------------

def check_boundary_max_principle(Pfield: G.Field2, tol: float, provenance: Optional[dict] = None) -> CheckReport:
    """Pass iff the interior maximum does not exceed the boundary-ring maximum by more than tol."""
    ex = G.extrema(Pfield)
    if ex["interiorMax"] is None:
        gap, loc = 0.0, ex["boundaryArgmax"]
    else:
        gap, loc = ex["boundaryMax"] - ex["interiorMax"], ex["interiorArgmax"]
    return CheckReport("boundary_max_principle", gap >= -tol, gap, loc, tol, "ge",
                       field_stats(Pfield.valid()), _field_provenance(Pfield, **(provenance or {})),
                       details={"extrema": _json_extrema(ex)})


def check_max_principle_degenerate(Pfield: G.Field2, mu: G.Field2, tol: float, mu_rtol: float = 1e-6,
                                   provenance: Optional[dict] = None) -> CheckReport:
    """Maximum over the valid region attained on the boundary ring or where the multiplier vanishes.

    A node counts as degenerate when |mu| <= mu_rtol * max|mu| over the valid region.
    """
    ex = G.extrema(Pfield)
    sl = Pfield.valid_slice()
    pv, mv = Pfield.valid(), np.abs(mu.values[sl])
    deg = mv <= mu_rtol * max(float(mv.max()), 1e-300)
    admissible = ex["boundaryMax"]
    deg_max = float(pv[deg].max()) if np.any(deg) else -math.inf
    admissible = max(admissible, deg_max)
    gmax = float(pv.max())
    gap = admissible - gmax
    return CheckReport("max_principle_degenerate", gap >= -tol, gap, _loc(Pfield, pv, np.argmax), tol,
                       "ge", field_stats(pv), _field_provenance(Pfield, **(provenance or {})),
                       details={"extrema": _json_extrema(ex), "degenerate_nodes": int(deg.sum()),
                                "degenerate_max": deg_max if np.isfinite(deg_max) else None,
                                "mu_rtol": mu_rtol})


def _json_extrema(ex):
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in ex.items()}


# -- gradient bounds and first integrals --------------------------------------------------

def _range_samples(values, n=257):
    lo, hi = float(np.min(values)), float(np.max(values))
    return np.unique(np.concatenate([np.linspace(lo, hi, n), [lo, hi]]))


def check_gradient_bound(spec: PFunctionSpec, u: Target, tol: float,
                         provenance: Optional[dict] = None) -> CheckReport:
    """max P(u, |grad u|^2) <= tol, provided P(s, 0) <= tol over the range of u."""
    vals = u.u if isinstance(u, G.Profile1) else u.values
    ss = _range_samples(vals)
    p0 = np.asarray(spec.P(ss, np.zeros_like(ss)))
    if np.max(p0) > tol:
        k = int(np.argmax(p0))
        raise HypothesisFail("P(s, 0) > 0 on the range of u; the bound cannot be asserted",
                             hypothesis="P(s,0) <= 0", s=float(ss[k]), value=float(p0[k]))
    if isinstance(u, G.Profile1):
        pv = eval_P_profile(spec, u)
        t = u.du ** 2
        s = u.u
        k = int(np.argmax(pv))
        loc = (float(u.xs[k]),)
        prov = _profile_provenance(u, **(provenance or {}))
    else:
        Pf = eval_P_field(spec, u)
        pv = Pf.valid()
        s = u.values[Pf.valid_slice()]
        t = grad_sq(u).valid()
        loc = _loc(Pf, pv, np.argmax)
        prov = _field_provenance(u, **(provenance or {}))
    worst = float(np.max(pv))
    details = {"hypothesis_P_s0_max": float(np.max(p0))}
    if spec.separable is not None:
        gap = np.ravel(t) - _psi_on(spec, np.ravel(s))
        details["max_gradsq_minus_psi"] = float(np.max(gap))
    return CheckReport("gradient_bound", worst <= tol, worst, loc, tol, "le", field_stats(pv), prov,
                       details=details)


def _psi_on(spec: PFunctionSpec, s: np.ndarray, knots: int = 513) -> np.ndarray:
    """Psi(s) at many points; exact per point for small inputs, else through a dense table."""
    sep = spec.separable
    if s.size <= knots:
        return np.asarray(sep.psi(s), dtype=float)
    # psi is smooth in s away from Gamma = B(0); a dense monotone table keeps the cost bounded
    table_s = _range_samples(s, knots)
    return np.interp(s, table_s, np.asarray(sep.psi(table_s), dtype=float))


def check_profile_first_integral(spec: PFunctionSpec, prof: G.Profile1, tol: float,
                                 provenance: Optional[dict] = None) -> CheckReport:
    pv = eval_P_profile(spec, prof)
    drift = float(pv.max() - pv.min())
    k = int(np.argmax(np.abs(pv - pv[0])))
    return CheckReport("profile_first_integral", drift <= tol, drift, (float(prof.xs[k]),), tol, "le",
                       field_stats(pv), _profile_provenance(prof, **(provenance or {})),
                       details={"P_start": float(pv[0])})


def check_eikonal_reduction(spec: PFunctionSpec, u: G.Field2, tol: float,
                            provenance: Optional[dict] = None) -> CheckReport:
    """With P vanishing identically, |grad u|^2 must equal Psi(u)."""
    if spec.separable is None:
        raise ValueError("eikonal reduction needs a separable P-function")
    Pf = eval_P_field(spec, u)
    pmax = float(np.max(np.abs(Pf.valid())))
    if pmax > tol:
        raise PNotConstant("P-field is not identically zero", max_abs_P=pmax, tol=tol)
    sl = Pf.valid_slice()
    s = u.values[sl]
    psi = _psi_on(spec, s.ravel()).reshape(s.shape)
    gap = np.abs(grad_sq(u).valid() - psi)
    ss = _range_samples(s, 129)
    with np.errstate(divide="ignore", invalid="ignore"):
        dpsi = np.abs(np.asarray(spec.separable.psi_prime(ss), dtype=float))
    dmax = float(np.max(dpsi[np.isfinite(dpsi)])) if np.any(np.isfinite(dpsi)) else 0.0
    tol2 = tol * (1 + dmax)
    worst = float(gap.max())
    return CheckReport("eikonal_reduction", worst <= tol2, worst, _loc(Pf, gap, np.argmax), tol2, "le",
                       field_stats(gap), _field_provenance(u, **(provenance or {})),
                       details={"max_abs_P": pmax, "max_abs_psi_prime": dmax})


# -- Liouville-type checks -----------------------------------------------------------------

class LiouvilleMode(enum.Enum):
    GAMMA_ZERO_PROPAGATION = "GammaZeroPropagation"
    GRAD_P_FUNCTION = "GradPFunction"
    NONEXISTENCE_CONSTANT_TEST = "NonexistenceConstantTest"


def check_liouville(u: Target, mode, tol: float, Gamma: Optional[Fn1] = None,
                    g: Optional[Callable] = None, G_rhs: Optional[Fn1] = None,
                    provenance: Optional[dict] = None) -> CheckReport:
    """Three desk-scale forms of the Liouville conclusions.

    GammaZeroPropagation: if Gamma(u(x0)) = 0 somewhere, u must be flat.
    GradPFunction: g(grad u) = 0 everywhere must force grad u = 0.
    NonexistenceConstantTest: with G(0) != 0 no constant field solves Lap u = G(|grad u|^2).
    """
    try:
        mode = LiouvilleMode(mode) if not isinstance(mode, LiouvilleMode) else mode
    except ValueError:
        raise ModeMismatch(f"unknown Liouville mode {mode!r}") from None
    is_prof = isinstance(u, G.Profile1)
    prov = (_profile_provenance(u, **(provenance or {})) if is_prof
            else _field_provenance(u, **(provenance or {})))
    prov["mode"] = mode.value

    if mode is LiouvilleMode.GAMMA_ZERO_PROPAGATION:
        if Gamma is None:
            raise ModeMismatch("GammaZeroPropagation needs Gamma")
        vals = u.u if is_prof else u.values
        gam = np.abs(np.asarray(Gamma(vals), dtype=float))
        hits = np.flatnonzero(gam.ravel() <= tol)
        if hits.size == 0:
            return CheckReport("liouville", True, float(gam.min()), None, tol, "le", field_stats(gam), prov,
                               vacuous=True, details={"status": "hypothesis not triggered",
                                                      "min_abs_gamma": float(gam.min())})
        k = int(hits[0])
        u0 = float(vals.ravel()[k])
        dev = np.abs(vals - u0)
        worst = float(dev.max())
        if is_prof:
            x0, loc = (float(u.xs[k]),), (float(u.xs[int(np.argmax(dev))]),)
        else:
            x0 = tuple(float(c) for c in u.grid.coord(*np.unravel_index(k, vals.shape)))
            loc = tuple(float(c) for c in u.grid.coord(*np.unravel_index(int(np.argmax(dev)), vals.shape)))
        return CheckReport("liouville", worst <= tol, worst, loc, tol, "le", field_stats(dev), prov,
                           details={"x0": list(x0), "u_x0": u0})

    if is_prof:
        raise ModeMismatch(f"{mode.value} needs a 2D field")

    if mode is LiouvilleMode.GRAD_P_FUNCTION:
        if g is None:
            raise ModeMismatch("GradPFunction needs g")
        gx, gy = G.gradient(u)
        gv = np.asarray(g(gx.valid(), gy.valid()), dtype=float)
        sup_g = float(np.max(np.abs(gv)))
        sup_grad = float(np.max(np.hypot(gx.valid(), gy.valid())))
        triggered = sup_g <= tol
        ok = (not triggered) or sup_grad <= tol
        return CheckReport("liouville", ok, sup_grad, _loc(gx, np.hypot(gx.valid(), gy.valid()), np.argmax),
                           tol, "le", field_stats(gv), prov, vacuous=not triggered,
                           details={"sup_P": sup_g, "sup_grad": sup_grad})

    if G_rhs is None:
        raise ModeMismatch("NonexistenceConstantTest needs G")
    const = u.like(np.full(u.values.shape, float(np.mean(u.values))), 0)
    lap = G.laplacian(const)
    res = np.abs(lap.valid() - np.asarray(G_rhs(grad_sq(const).valid())))
    worst = float(res.min())
    return CheckReport("liouville", worst > tol, worst, _loc(lap, res), tol, "gt", field_stats(res), prov,
                       details={"G0": float(G_rhs(0.0)),
                                "conclusion": "no constant field solves the equation; bounded entire "
                                              "solutions are excluded"})


# -- Monge-Ampere ----------------------------------------------------------------------------

@dataclass(frozen=True)
class GradientFunction:
    """g(p) with analytic gradient and Hessian in p = (p1, p2)."""

    value: Callable
    grad: Callable
    hess: Callable
    label: str = ""


def grad_norm_sq() -> GradientFunction:
    return GradientFunction(lambda a, b: a * a + b * b,
                            lambda a, b: (2 * a, 2 * b),
                            lambda a, b: (2 + 0 * a, 0 * a, 2 + 0 * b), "|p|^2")


def _psd_min_eig(g: GradientFunction, px, py):
    a, b, c = (np.broadcast_to(np.asarray(v, dtype=float), np.shape(px)) for v in g.hess(px, py))
    H = np.stack([np.stack([a, b], -1), np.stack([b, c], -1)], -2)
    return np.linalg.eigvalsh(H)[..., 0]


def _center(f: G.Field2):
    g = f.grid
    return (g.origin[0] + (g.nx - 1) * g.hx / 2, g.origin[1] + (g.ny - 1) * g.hy / 2)


def check_monge_ampere(u: G.Field2, g: GradientFunction, tol: float, radii=MA_RADII,
                       eps_det: float = G.EPS_DET, provenance: Optional[dict] = None) -> CheckReport:
    """Drift-corrected subharmonicity of g(grad u) for convex u with positive Hessian determinant."""
    ux, uy = G.gradient(u)
    px, py = ux.valid(), uy.valid()
    eig = _psd_min_eig(g, px, py)
    if np.min(eig) < -1e-10 * (1 + np.max(np.abs(eig))):
        raise HypothesisFail("g has an indefinite Hessian at an attained gradient",
                             hypothesis="g PSD", value=float(np.min(eig)))
    det = G.det_hessian(u)
    Bx, By = G.ma_drift(u, eps_det)  # raises DegenerateHessian
    gf = ux.like(np.asarray(g.value(ux.values, uy.values), dtype=float))
    lapg = G.laplacian(gf)
    gx, gy = G.gradient(gf)
    sl = lapg.valid_slice()
    R = lapg.values[sl] - (Bx.values[sl] * gx.values[sl] + By.values[sl] * gy.values[sl])
    worst = float(R.min())
    dmin = float(det.valid().min())
    subs = [
        Subcheck("det_positive", dmin > eps_det, dmin, _loc(det, det.valid()), eps_det),
        Subcheck("drift_residual", worst >= -tol, worst, _loc(lapg, R), tol),
    ]
    drift_sup = float(max(np.abs(Bx.valid()).max(), np.abs(By.valid()).max()))
    details = {"drift_sup": drift_sup, "det_min": dmin}
    if drift_sup <= DRIFT_FREE:
        c = _center(gf)
        ci, cj = gf.grid.index(*c)
        g0 = float(gf.values[ci, cj])
        avgs = []
        for r in radii:
            a = G.ball_average(gf, c, r)
            avgs.append(a)
            subs.append(Subcheck(f"sub_mean_value_r{r:g}", g0 <= a + tol, a - g0, c, tol))
        mono = all(avgs[k + 1] >= avgs[k] - tol for k in range(len(avgs) - 1))
        subs.append(Subcheck("averages_monotone", mono, min(np.diff(avgs)) if len(avgs) > 1 else 0.0, c, tol))
        details.update({"center_value": g0, "ball_averages": avgs, "radii": list(radii)})
    else:
        details["sub_mean_value"] = "skipped: drift not negligible"
    full = np.zeros(u.values.shape)
    full[sl] = R
    return CheckReport("monge_ampere", all(s.passed for s in subs), worst, _loc(lapg, R), tol, "ge",
                       field_stats(R), _field_provenance(u, **(provenance or {})), subchecks=subs,
                       details=details)


def check_mean_value_monotonicity(f: G.Field2, center, radii, tol: float,
                                  provenance: Optional[dict] = None) -> CheckReport:
    """Ball averages of a subharmonic field grow with the radius and dominate the center value."""
    lap = G.laplacian(f)
    lmin = float(lap.valid().min())
    if lmin < -tol:
        raise NotSubharmonic("discrete Laplacian negative", value=lmin,
                             location=list(_loc(lap, lap.valid())))
    ci, cj = f.grid.index(*center)
    f0 = float(f.values[ci, cj])
    avgs = [G.ball_average(f, center, r) for r in radii]
    steps = [avgs[k + 1] - avgs[k] for k in range(len(avgs) - 1)]
    worst = min([a - f0 for a in avgs] + steps)
    return CheckReport("mean_value_monotonicity", worst >= -tol, worst, tuple(map(float, center)), tol, "ge",
                       field_stats(avgs), _field_provenance(f, **(provenance or {})),
                       details={"center_value": f0, "averages": avgs, "radii": list(radii)})
