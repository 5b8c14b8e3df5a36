"""Named equations, P-functions, fixtures and checks addressable from run configs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Union

import numpy as np

from . import criterion, grid as G, higher, solver, verify
from .errors import BadParams, PFuncError
from .funcalg import (INF, Biharmonic76, DivergenceForm, Fn1, Fn2, FourthOrder73, FourthOrder74,
                      GradientSemilinear, MongeAmpere, PFunctionSpec, Reduction77, Semilinear,
                      paper_example)
from .report import CheckReport, Subcheck

# -- building blocks ----------------------------------------------------------------------

def _fn(v, d1, d2, domain=(-INF, INF), label=""):
    return Fn1(v, d1, d2, domain, label)


W_AC = _fn(lambda s: 0.25 * (1 - s * s) ** 2, lambda s: s ** 3 - s, lambda s: 3 * s * s - 1, label="W")
F_AC = _fn(lambda s: s ** 3 - s, lambda s: 3 * s * s - 1, lambda s: 6 * s, label="u^3-u")
EXP_DECAY = _fn(lambda s: np.exp(-s), lambda s: -np.exp(-s), lambda s: np.exp(-s), label="e^-u")
EXP_DECAY_INNER = _fn(lambda y: 1 - np.exp(-y), lambda y: np.exp(-y), lambda y: -np.exp(-y), label="1-e^-y")
EXP_GROWTH = _fn(np.exp, np.exp, np.exp, label="e^u")
SINH2 = _fn(lambda s: np.exp(s) - np.exp(-s), lambda s: np.exp(s) + np.exp(-s),
            lambda s: np.exp(s) - np.exp(-s), label="e^s-e^-s")
PHI_QUAD = _fn(lambda t: t + t * t / 2, lambda t: 1 + t, lambda t: np.ones_like(t), (0.0, INF), "t+t^2/2")
PHI_LIN = Fn1.identity((0.0, INF), "t")
RHO_LIN = _fn(lambda t: 1 + t, lambda t: np.ones_like(t), lambda t: np.zeros_like(t), (0.0, INF), "1+t")
RHO_ONE = Fn1.constant(1.0, (0.0, INF), "1")
# Q(t) = integral_0^t (1 + 3y) / (1 + y) dy for Phi = t + t^2/2, rho = 1 + t
Q_QUAD_LIN = _fn(lambda t: 3 * t - 2 * np.log1p(t), lambda t: (1 + 3 * t) / (1 + t),
                 lambda t: 2 / (1 + t) ** 2, (0.0, INF), "3t-2log(1+t)")
Q_LIN_ONE = _fn(lambda t: np.array(t, dtype=float), lambda t: np.ones_like(t), lambda t: np.zeros_like(t),
                (0.0, INF), "t")
G_EX4 = _fn(lambda z: 0.5 * np.tanh(z), lambda z: 0.5 / np.cosh(z) ** 2,
            lambda z: -np.tanh(z) / np.cosh(z) ** 2, label="tanh/2")
B73 = _fn(lambda s: 6 * np.cbrt(s), lambda s: 2 / np.cbrt(s) ** 2, lambda s: -(4 / 3) / np.cbrt(s) ** 5,
          (0.0, INF), "6 s^(1/3)")


def _const_fn2(c):
    z = lambda s, t: np.zeros(np.broadcast(s, t).shape)
    return Fn2(lambda s, t: c + z(s, t), z, z, z, z, z, ((-INF, INF), (0.0, INF)), f"const({c:g})")


# -- equations ------------------------------------------------------------------------------

@dataclass(frozen=True)
class EquationEntry:
    id: str
    anchor: str
    build: Callable[[], Any]
    extras: dict = field(default_factory=dict)


EQUATIONS = {e.id: e for e in [
    EquationEntry("allen_cahn", "Lap u = u^3 - u (bistable semilinear)", lambda: Semilinear(F_AC)),
    EquationEntry("exp_decay", "Lap u = e^-u (f f' <= 0 bound)", lambda: Semilinear(EXP_DECAY)),
    EquationEntry("exp_growth", "Lap u = e^u (hypothesis P(s,0) <= 0 fails for s < 0)",
                  lambda: Semilinear(EXP_GROWTH)),
    EquationEntry("payne_philippin", "Lap u = u(k|grad u|^2 + lam e^{-cu^2}), k=1, lam=-1, c=1",
                  lambda: paper_example("ex3", k=1.0, lam=-1.0, c=1.0)[0]),
    EquationEntry("gradient_ex4", "Lap u = G(|grad u|^2 - u), G = tanh/2",
                  lambda: paper_example("ex4", G=G_EX4)[0]),
    EquationEntry("gradient_G1", "Lap u = G(|grad u|^2) with G = 1 (non-existence)",
                  lambda: GradientSemilinear(_const_fn2(1.0))),
    EquationEntry("laplace", "Lap u = 0", lambda: GradientSemilinear(_const_fn2(0.0))),
    EquationEntry("quasilinear_div", "div((1+t) grad u) = (1+t) W'(u), t = |grad u|^2",
                  lambda: DivergenceForm(PHI_QUAD, RHO_LIN, W_AC)),
    EquationEntry("laplace_div", "div(grad u) = W'(u)", lambda: DivergenceForm(PHI_LIN, RHO_ONE, W_AC)),
    EquationEntry("monge_ampere_unit", "det Hess u = 1", lambda: MongeAmpere(Fn1.constant(1.0))),
    EquationEntry("ho73_cubic_eq", "a = 1, b(s) = -(4/3) s^(-5/3)",
                  lambda: FourthOrder73(Fn1.constant(1.0), _fn(higher.b73_cubic, lambda s: 0 * s,
                                                                lambda s: 0 * s, (0.0, INF), "b")),
                  {"A": Fn1.identity(), "B": B73}),
    EquationEntry("ho73_harmonic_eq", "a = 1, b = 0 (harmonic fields)",
                  lambda: FourthOrder73(Fn1.constant(1.0), Fn1.constant(0.0)),
                  {"A": Fn1.identity(), "B": Fn1.constant(1.0)}),
    EquationEntry("ho74_const8", "|Hess u|^2 = 8 + (u/2) Bilap u",
                  lambda: FourthOrder74(lambda s, t, w: 8.0 + 0 * np.asarray(s))),
    EquationEntry("ho74_equality", "|Hess u|^2 = (Lap u)^2 / 2 + (u/2) Bilap u",
                  lambda: FourthOrder74(lambda s, t, w: 0.5 * np.asarray(w) ** 2)),
    EquationEntry("biharmonic76_c1", "|Hess u|^2 - Bilap u = 0 (convex subsolutions)", lambda: Biharmonic76(1.0)),
    EquationEntry("reduction77", "2|Hess u|^2 = (Lap u)^2 + u Bilap u", lambda: Reduction77()),
]}


# -- P-functions ------------------------------------------------------------------------------

@dataclass(frozen=True)
class PFunctionEntry:
    id: str
    anchor: str
    example: str
    params: Callable[[], dict]

    def build(self) -> PFunctionSpec:
        return paper_example(self.example, **self.params())[1]


PFUNCTIONS = {p.id: p for p in [
    PFunctionEntry("ex1", "P = t/2 - W(s) for Lap u = W'(u), W = (1-s^2)^2/4", "ex1",
                   lambda: {"f": F_AC, "F": W_AC}),
    PFunctionEntry("ex1_exp", "P = t/2 - e^s + e^-s for Lap u = e^u (P(s,0) > 0 when s < 0)", "ex1",
                   lambda: {"f": EXP_GROWTH, "F": SINH2}),
    PFunctionEntry("ex2", "P = t^2/2 - 2 int_0^s (1 - e^-y)^2 dy for Lap u = e^-u", "ex2",
                   lambda: {"f": EXP_DECAY, "domain": (0.0, 2.0), "inner": EXP_DECAY_INNER}),
    PFunctionEntry("ex3", "Payne-Philippin P for k=1, lam=-1, c=1", "ex3",
                   lambda: {"k": 1.0, "lam": -1.0, "c": 1.0}),
    PFunctionEntry("ex4", "P = t - s for Lap u = G(|grad u|^2 - u), G <= 1/2", "ex4",
                   lambda: {"G": G_EX4}),
    PFunctionEntry("ex5", "P = Q(t) - 2W(s), Phi = t + t^2/2, rho = 1 + t", "ex5",
                   lambda: {"Phi": PHI_QUAD, "rho": RHO_LIN, "Fpot": W_AC, "Q": Q_QUAD_LIN}),
    PFunctionEntry("ex5_laplace", "P = t - 2W(s), Phi = t, rho = 1", "ex5",
                   lambda: {"Phi": PHI_LIN, "rho": RHO_ONE, "Fpot": W_AC, "Q": Q_LIN_ONE}),
]}


# -- fixtures -----------------------------------------------------------------------------------

@dataclass
class JobContext:
    job_id: str
    equation_id: Optional[str]
    equation: Any
    pfunction_id: Optional[str]
    pspec: Optional[PFunctionSpec]
    fixture_id: str
    params: dict
    grid_cfg: Optional[dict]
    bc: Any
    solver_cfg: dict
    target: Union[G.Field2, G.Profile1, None] = None
    telemetry: Optional[dict] = None

    def provenance(self):
        return {"equation": self.equation_id, "pfunction": self.pfunction_id, "fixture": self.fixture_id,
                "proxy": FIXTURES[self.fixture_id].proxy}


def _grid_from(cfg: Optional[dict], default: dict) -> G.Grid2:
    c = dict(default)
    c.update(cfg or {})
    return G.Grid2.rect(tuple(c["xlim"]), tuple(c["ylim"]), float(c["h"]))


def _bc_fn(bc):
    if bc is None or isinstance(bc, (int, float)):
        return 1.0 if bc is None else float(bc)
    if bc == "kink":
        return lambda x, y: np.tanh(x / math.sqrt(2))
    if bc == "linear_x":
        return lambda x, y: x
    raise BadParams(f"unknown boundary data {bc!r}")


def _newton_opts(cfg: dict) -> solver.NewtonOpts:
    return solver.NewtonOpts(max_iter=int(cfg.get("maxIter", 50)),
                             residual_tol=float(cfg.get("residualTol", 1e-10)),
                             damping_halvings=int(cfg.get("dampingHalvings", 20)),
                             initial_guess=cfg.get("initialGuess", "BoundaryHarmonicLift"))


def _fixture_bvp(ctx: JobContext):
    g = _grid_from(ctx.grid_cfg, {"xlim": [0, 1], "ylim": [0, 1], "h": 1 / 64})
    eq, bc, opts = ctx.equation, _bc_fn(ctx.bc), _newton_opts(ctx.solver_cfg)
    if isinstance(eq, Semilinear):
        res = solver.solve_gradient_semilinear(eq.as_gradient_semilinear().F, g, bc, opts)
    elif isinstance(eq, GradientSemilinear):
        res = solver.solve_gradient_semilinear(eq.F, g, bc, opts)
    elif isinstance(eq, DivergenceForm):
        res = solver.solve_divergence_form(eq.Phi, eq.rho, eq.Fpot, g, bc, opts)
    else:
        raise BadParams(f"no solver for {type(eq).__name__}")
    return res.u, res.telemetry()


def _fixture_kink(ctx):
    span = ctx.params.get("span", [-10.0, 10.0])
    h = float(ctx.params.get("h", 1e-3))
    return solver.kink_profile(tuple(span), h), {"method": "closed_form", "formula": "tanh(x/sqrt 2)"}


def _fixture_rk4(ctx):
    span = tuple(ctx.params.get("span", [-5.0, 5.0]))
    h = float(ctx.params.get("h", 1e-3))
    u0 = float(ctx.params.get("u0", 0.0))
    v0 = ctx.params.get("v0")
    if v0 is None:
        # start on the zero level set of the separable first integral
        v0 = math.sqrt(float(ctx.pspec.separable.psi(u0)))
    prof = solver.integrate_profile(ctx.equation, u0, float(v0), h, span)
    return prof, {"method": "rk4", "h": h, "u0": u0, "v0": float(v0), "span": list(span)}


def _fixture_closed(fn, xlim, ylim, h, label):
    def make(ctx):
        g = _grid_from(ctx.grid_cfg, {"xlim": xlim, "ylim": ylim, "h": h})
        return G.Field2.from_function(g, fn), {"method": "closed_form", "formula": label}
    return make


def _fixture_exp_growth(ctx):
    span = ctx.params.get("span", [-1.0, 1.0])
    h = float(ctx.params.get("h", 1e-3))
    n = int(round((span[1] - span[0]) / h))
    xs = span[0] + h * np.arange(n + 1)
    # u'' = e^u: u = -log(2 cos^2(x/2))
    u = -np.log(2 * np.cos(xs / 2) ** 2)
    du = np.tan(xs / 2)
    return G.Profile1(xs, u, du, h), {"method": "closed_form", "formula": "-log(2 cos^2(x/2))"}


def _fixture_manufactured(mid):
    def make(ctx):
        m = higher.manufactured(mid)
        h = (ctx.grid_cfg or {}).get("h", m.h)
        return m.field(float(h)), {"method": "manufactured", "id": mid}
    return make


@dataclass(frozen=True)
class FixtureEntry:
    id: str
    anchor: str
    make: Callable[[JobContext], tuple]
    proxy: str


_ENTIRE = "closed-form entire solution restricted to a window"
_BVP = "bounded-domain boundary value problem standing in for an entire solution"
_MMS = "manufactured solution on a bounded window"

FIXTURES = {f.id: f for f in [
    FixtureEntry("bvp", "damped Newton solve of the job equation on the job grid", _fixture_bvp, _BVP),
    FixtureEntry("kink", "u = tanh(x/sqrt 2) sampled on a 1D window", _fixture_kink, _ENTIRE),
    FixtureEntry("rk4_profile", "RK4 profile of the job equation's 1D reduction", _fixture_rk4, _ENTIRE),
    FixtureEntry("kink_trace", "u(x, y) = tanh(x/sqrt 2) on a 2D window",
                 _fixture_closed(lambda x, y: np.tanh(x / math.sqrt(2)), [-3, 3], [0, 1], 1 / 128,
                                 "tanh(x/sqrt 2)"), _ENTIRE),
    FixtureEntry("bump", "concave bump -(x^2+y^2), a deliberate max-principle violation",
                 _fixture_closed(lambda x, y: -(x * x + y * y), [-1, 1], [-1, 1], 1 / 32, "-(x^2+y^2)"), _MMS),
    FixtureEntry("constant", "u = 3 on the unit square",
                 _fixture_closed(lambda x, y: 3.0 + 0 * x, [0, 1], [0, 1], 1 / 32, "3"), _ENTIRE),
    FixtureEntry("exp_growth_profile", "u = -log(2 cos^2(x/2)) solving u'' = e^u on [-1, 1]",
                 _fixture_exp_growth, _ENTIRE),
    FixtureEntry("ma_exp", "u = |x|^2/2 + 0.1 e^x on [-1/2, 1/2]^2",
                 _fixture_closed(lambda x, y: 0.5 * (x * x + y * y) + 0.1 * np.exp(x), [-0.5, 0.5], [-0.5, 0.5],
                                 1 / 128, "|x|^2/2 + 0.1 e^x"), _MMS),
    FixtureEntry("ma_anisotropic", "u = (2x^2 + 3y^2)/2 on [-1/2, 1/2]^2",
                 _fixture_closed(lambda x, y: 0.5 * (2 * x * x + 3 * y * y), [-0.5, 0.5], [-0.5, 0.5],
                                 1 / 128, "(2x^2+3y^2)/2"), _MMS),
] + [FixtureEntry(mid, m.description, _fixture_manufactured(mid), _MMS)
     for mid, m in higher.MANUFACTURED.items()]}


# -- checks -------------------------------------------------------------------------------------

def _as_F(eq) -> Fn2:
    if isinstance(eq, Semilinear):
        return eq.as_gradient_semilinear().F
    if isinstance(eq, GradientSemilinear):
        return eq.F
    raise BadParams(f"{type(eq).__name__} is not of the form Lap u = F(u, |grad u|^2)")


def _need_field(ctx) -> G.Field2:
    if not isinstance(ctx.target, G.Field2):
        raise BadParams("check needs a 2D field fixture")
    return ctx.target


def _need_profile(ctx) -> G.Profile1:
    if not isinstance(ctx.target, G.Profile1):
        raise BadParams("check needs a 1D profile fixture")
    return ctx.target


def _need_p(ctx) -> PFunctionSpec:
    if ctx.pspec is None:
        raise BadParams("check needs a P-function")
    return ctx.pspec


def _grid_tol(u: G.Field2, values) -> float:
    return verify.C_GRID * u.grid.h ** 2 * (1 + float(np.max(np.abs(values))))


def _pfield_or_u(ctx):
    u = _need_field(ctx)
    return verify.eval_P_field(ctx.pspec, u) if ctx.pspec is not None else u


def _run_boundary_max(ctx, tol):
    Pf = _pfield_or_u(ctx)
    tol = _grid_tol(Pf, Pf.valid()) if tol is None else tol
    return verify.check_boundary_max_principle(Pf, tol, ctx.provenance())


def _run_degenerate_max(ctx, tol):
    u = _need_field(ctx)
    spec = _need_p(ctx)
    Pf = verify.eval_P_field(spec, u)
    tol = _grid_tol(Pf, Pf.valid()) if tol is None else tol
    return verify.check_max_principle_degenerate(Pf, verify.mu_field(spec, u), tol, provenance=ctx.provenance())


def _run_gradient_bound(ctx, tol):
    spec = _need_p(ctx)
    if tol is None:
        tol = 1e-10 if isinstance(ctx.target, G.Profile1) else \
            _grid_tol(ctx.target, verify.eval_P_field(spec, ctx.target).valid())
    return verify.check_gradient_bound(spec, ctx.target, tol, ctx.provenance())


def _run_first_integral(ctx, tol):
    return verify.check_profile_first_integral(_need_p(ctx), _need_profile(ctx),
                                               1e-7 if tol is None else tol, ctx.provenance())


def _run_main_inequality(ctx, tol):
    kw = {} if tol is None else {"cgrid": tol}
    return verify.residual_main_inequality(_need_p(ctx).P, _as_F(ctx.equation), _need_field(ctx),
                                           provenance=ctx.provenance(), **kw)[1]


def _run_eikonal(ctx, tol):
    return verify.check_eikonal_reduction(_need_p(ctx), _need_field(ctx), 1e-3 if tol is None else tol,
                                          ctx.provenance())


def _run_liouville_gamma(ctx, tol):
    spec = _need_p(ctx)
    if spec.separable is None:
        raise BadParams("GammaZeroPropagation needs a separable P-function")
    return verify.check_liouville(ctx.target, "GammaZeroPropagation", 1e-10 if tol is None else tol,
                                  Gamma=spec.separable.Gamma, provenance=ctx.provenance())


def _run_liouville_nonexistence(ctx, tol):
    F = _as_F(ctx.equation)
    G_rhs = Fn1(lambda t: np.asarray(F(0.0 * np.asarray(t), t)), lambda t: np.asarray(F.pt(0.0 * np.asarray(t), t)),
                lambda t: np.asarray(F.ptt(0.0 * np.asarray(t), t)), (0.0, INF), "G")
    return verify.check_liouville(_need_field(ctx), "NonexistenceConstantTest", 1e-10 if tol is None else tol,
                                  G_rhs=G_rhs, provenance=ctx.provenance())


def _run_monge_ampere(ctx, tol):
    u = _need_field(ctx)
    return verify.check_monge_ampere(u, verify.grad_norm_sq(), 1e-3 if tol is None else tol,
                                     provenance=ctx.provenance())


def _run_mean_value(ctx, tol):
    u = _need_field(ctx)
    return verify.check_mean_value_monotonicity(u, verify._center(u), verify.MA_RADII,
                                                1e-3 if tol is None else tol, ctx.provenance())


def _criterion_report(check_id, verdict: criterion.CriterionVerdict, ctx) -> CheckReport:
    d = verdict.to_dict()
    d.pop("subchecks")
    return CheckReport(check_id, verdict.passed, verdict.min_residual, verdict.argmin, verdict.tolerance, "ge",
                       {}, {**ctx.provenance(), "rect": ctx.params.get("rect", [[-2, 2], [0, 2]])},
                       subchecks=list(verdict.subchecks), details=d)


def _rect(ctx):
    r = ctx.params.get("rect", [[-2.0, 2.0], [0.0, 2.0]])
    return ((float(r[0][0]), float(r[0][1])), (float(r[1][0]), float(r[1][1])))


def _run_hyp(which):
    def run(ctx, tol):
        fn = criterion.check_hypothesis1 if which == 1 else criterion.check_hypothesis2
        v = fn(_need_p(ctx).P, _as_F(ctx.equation), _rect(ctx), tol=criterion.DEFAULT_TOL if tol is None else tol)
        return _criterion_report(f"criterion_hypothesis{which}", v, ctx)
    return run


def _run_corollary(ctx, tol):
    eq = ctx.equation
    if not isinstance(eq, Semilinear):
        raise BadParams("the corollary applies to Lap u = f(u)")
    v = criterion.check_corollary_semilinear(_need_p(ctx).P, eq.f, _rect(ctx),
                                             tol=criterion.DEFAULT_TOL if tol is None else tol)
    return _criterion_report("criterion_corollary", v, ctx)


def _eq_extra(ctx, key):
    entry = EQUATIONS[ctx.equation_id]
    if key not in entry.extras:
        raise BadParams(f"equation {ctx.equation_id} does not provide {key}")
    return entry.extras[key]


def _need_eq(ctx, cls):
    if not isinstance(ctx.equation, cls):
        raise BadParams(f"check needs a {cls.__name__} equation")
    return ctx.equation


def _run_prop73(ctx, tol):
    eq = _need_eq(ctx, FourthOrder73)
    return higher.residual_prop73(eq.a, eq.b, _eq_extra(ctx, "A"), _eq_extra(ctx, "B"), _need_field(ctx), tol,
                                  ctx.provenance())


def _run_lap_bound(ctx, tol):
    _need_eq(ctx, FourthOrder73)
    return higher.check_laplacian_bound(_eq_extra(ctx, "A"), _eq_extra(ctx, "B"), _need_field(ctx),
                                        1e-10 if tol is None else tol, ctx.provenance())


def _run_prop74(ctx, tol):
    return higher.residual_prop74(_need_eq(ctx, FourthOrder74).F3, _need_field(ctx), tol, ctx.provenance())


def _run_bound74(ctx, tol):
    _need_eq(ctx, FourthOrder74)
    return higher.check_bound_74(_need_field(ctx), 1e-10 if tol is None else tol, ctx.provenance())


def _run_pointwise75(ctx, tol):
    return higher.check_pointwise_75(_need_field(ctx), 1e-10 if tol is None else tol,
                                     _need_eq(ctx, FourthOrder74).F3, ctx.provenance())


def _run_cor76(ctx, tol):
    return higher.residual_cor76(_need_eq(ctx, Biharmonic76).c, _need_field(ctx), tol, ctx.provenance())


def _run_red77(ctx, tol):
    _need_eq(ctx, Reduction77)
    return higher.check_reduction_77(_need_field(ctx), 1e-10 if tol is None else tol, ctx.provenance())


def _dump_pfield(ctx):
    return _pfield_or_u(ctx)


def _dump_main_residual(ctx):
    return verify.residual_main_inequality(_need_p(ctx).P, _as_F(ctx.equation), _need_field(ctx))[0]


@dataclass(frozen=True)
class CheckEntry:
    id: str
    anchor: str
    run: Callable[[JobContext, Optional[float]], CheckReport]
    dump: Optional[Callable[[JobContext], G.Field2]] = None


CHECKS = {c.id: c for c in [
    CheckEntry("boundary_max_principle", "interior max of the P-field <= boundary-ring max", _run_boundary_max,
               _dump_pfield),
    CheckEntry("max_principle_degenerate", "max attained on the boundary ring or where mu = 0",
               _run_degenerate_max, _dump_pfield),
    CheckEntry("gradient_bound", "P(u, |grad u|^2) <= 0 given P(s, 0) <= 0", _run_gradient_bound, _dump_pfield),
    CheckEntry("profile_first_integral", "P constant along 1D profiles", _run_first_integral),
    CheckEntry("residual_main_inequality", "discrete differential inequality for P", _run_main_inequality,
               _dump_main_residual),
    CheckEntry("eikonal_reduction", "|grad u|^2 = Psi(u) when P vanishes", _run_eikonal, _dump_pfield),
    CheckEntry("liouville_gamma_zero", "Gamma(u(x0)) = 0 forces u constant", _run_liouville_gamma),
    CheckEntry("liouville_nonexistence", "G(0) != 0 excludes constant solutions", _run_liouville_nonexistence),
    CheckEntry("monge_ampere", "drift-corrected subharmonicity of |grad u|^2", _run_monge_ampere),
    CheckEntry("mean_value_monotonicity", "ball averages grow with the radius", _run_mean_value),
    CheckEntry("criterion_hypothesis1", "PSD Hessian of P and I >= 0 on a sample rectangle", _run_hyp(1)),
    CheckEntry("criterion_hypothesis2", "P_st = 0, P_tt >= 0, t^2 P_ss P_t + I >= 0", _run_hyp(2)),
    CheckEntry("criterion_corollary", "normalised criterion for Lap u = f(u)", _run_corollary),
    CheckEntry("residual_prop73", "fourth-order P = A(Lap u) - B(u) inequality", _run_prop73),
    CheckEntry("laplacian_bound", "Lap u <= A^{-1}(B(u))", _run_lap_bound),
    CheckEntry("residual_prop74", "Lap P = 2F3 - (Lap u)^2 >= 0 for P = |grad u|^2 - u Lap u", _run_prop74),
    CheckEntry("bound_74", "|grad u|^2 <= u Lap u", _run_bound74),
    CheckEntry("pointwise_75", "unit-ball P against radius-2 norms", _run_pointwise75),
    CheckEntry("residual_cor76", "(Lap u)^2 subharmonic for convex subsolutions", _run_cor76),
    CheckEntry("reduction_77", "|grad u|^2 - u Lap u harmonic and constant", _run_red77),
]}


def list_registry() -> str:
    """Sorted listing of every registered id with a one-line description."""
    lines = []
    for title, table in (("checks", CHECKS), ("equations", EQUATIONS), ("fixtures", FIXTURES),
                         ("pfunctions", PFUNCTIONS)):
        lines.append(f"[{title}]")
        for key in sorted(table):
            lines.append(f"  {key:28s} {table[key].anchor}")
    return "\n".join(lines) + "\n"
