import math

import numpy as np
import pytest

from pfunc import registry as R
from pfunc.errors import HypothesisFail, ModeMismatch, NotASolution, NotSubharmonic, PNotConstant
from pfunc.funcalg import Fn1, Fn2, MuKind, PFunctionSpec, Separable, example2_double_integral, paper_example, \
    separable_fn2
from pfunc.grid import Field2, Grid2
from pfunc.solver import integrate_profile, kink_profile, solve_gradient_semilinear
from pfunc.verify import (LiouvilleMode, check_boundary_max_principle, check_eikonal_reduction,
                          check_gradient_bound, check_liouville, check_max_principle_degenerate,
                          check_mean_value_monotonicity, check_monge_ampere, check_profile_first_integral,
                          eval_P_field, eval_P_profile, grad_norm_sq, mu_field, residual_main_inequality)

EXP_F = Fn2.of_s(R.EXP_DECAY, (0.0, math.inf))
ZERO_F = Fn2.of_s(Fn1.constant(0.0), (0.0, math.inf))
_BVP = {}


def bvp(n):
    if n not in _BVP:
        _BVP[n] = solve_gradient_semilinear(EXP_F, Grid2.square(0.0, 1.0, n + 1), 1.0).u
    return _BVP[n]


def ex2_spec():
    return paper_example("ex2", f=R.EXP_DECAY, domain=(0.0, 2.0), inner=R.EXP_DECAY_INNER)[1]


def ex1_spec():
    return paper_example("ex1", f=R.F_AC, F=R.W_AC)[1]


def linear_spec(gamma=0.0):
    B, G = Fn1.identity((0.0, math.inf), "t"), Fn1.constant(gamma)
    return PFunctionSpec(separable_fn2(B, G), MuKind.PT_TIMES_T_SQUARED, separable=Separable(B, G))


def fixture(fid):
    ctx = R.JobContext("t", None, None, None, None, fid, {}, None, None, {})
    return R.FIXTURES[fid].make(ctx)[0]


def line_field(n=33):
    return Field2.from_function(Grid2.square(0.0, 1.0, n), lambda x, y: x + 0 * y)


def bump():
    return Field2.from_function(Grid2.square(-1.0, 1.0, 65), lambda x, y: -(x * x + y * y))


# -- P-fields ---------------------------------------------------------------------

def test_P_field_on_line():  # [TRIVIAL]
    pf = eval_P_field(linear_spec(), line_field())
    assert np.allclose(pf.valid(), 1.0, atol=1e-12)


def test_P_profile_on_kink_is_zero():  # [DERIVED] Modica equality
    assert np.max(np.abs(eval_P_profile(ex1_spec(), kink_profile()))) <= 1e-10


def test_example4_P_negative_when_gradient_small():  # [TRIVIAL]
    spec = R.PFUNCTIONS["ex4"].build()
    u = Field2.from_function(Grid2.square(0.0, 1.0, 33), lambda x, y: 1 + 0.3 * x * y)
    assert np.all(eval_P_field(spec, u).valid() < 0)


# -- main inequality --------------------------------------------------------------

def test_main_inequality_exp_decay_bvp():
    spec = ex2_spec()
    _, rep = residual_main_inequality(spec.P, EXP_F, bvp(64))
    assert rep.passed, rep.to_dict()
    assert rep.details["chain_rule_gradient_gap"] <= 100 * (1 / 64) ** 2


def test_main_inequality_linear_harmonic_exact_zero():  # [TRIVIAL]
    Rf, rep = residual_main_inequality(linear_spec().P, ZERO_F, line_field())
    assert rep.passed and np.max(np.abs(Rf.values)) <= 1e-10


def test_main_inequality_negative_control():  # P = -t flips the sign
    Pneg = Fn2(lambda s, t: -t, lambda s, t: 0 * s * t, lambda s, t: -1 + 0 * s * t, lambda s, t: 0 * s * t,
               lambda s, t: 0 * s * t, lambda s, t: 0 * s * t)
    u = bvp(64)
    _, rep = residual_main_inequality(Pneg, EXP_F, u)
    assert not rep.passed
    x, y = rep.worst_location
    assert 0 < x < 1 and 0 < y < 1


def test_main_inequality_requires_a_solution():
    u = Field2.from_function(Grid2.square(0.0, 1.0, 33), lambda x, y: x * x + 0 * y)
    with pytest.raises(NotASolution):
        residual_main_inequality(ex2_spec().P, EXP_F, u)


def test_main_inequality_residual_floor_does_not_diverge():
    spec = ex2_spec()
    _, a = residual_main_inequality(spec.P, EXP_F, bvp(32))
    _, b = residual_main_inequality(spec.P, EXP_F, bvp(64))
    assert a.passed and b.passed
    assert b.worst_residual >= a.worst_residual * 0.2 - 1e-12


# -- maximum principles --------------------------------------------------------------

def test_max_principle_allen_cahn_ramp():
    g = Grid2.square(-1.0, 1.0, 65)
    u = solve_gradient_semilinear(Fn2.of_s(R.F_AC, (0.0, math.inf)), g, lambda x, y: x).u
    rep = check_boundary_max_principle(eval_P_field(ex1_spec(), u), 10 * g.h ** 2)
    assert rep.passed, rep.to_dict()


def test_max_principle_bump_fails():  # [TRIVIAL] negative control
    rep = check_boundary_max_principle(bump(), 1e-12)
    assert not rep.passed
    assert tuple(rep.worst_location) == (0.0, 0.0)


def test_max_principle_constant_equality():  # [TRIVIAL]
    c = Field2.from_function(Grid2.square(0.0, 1.0, 17), lambda x, y: 3.0 + 0 * x)
    rep = check_boundary_max_principle(c, 0.0)
    assert rep.passed and rep.worst_residual == 0


def test_degenerate_max_principle_exp_decay():
    spec, u = ex2_spec(), bvp(64)
    pf = eval_P_field(spec, u)
    rep = check_max_principle_degenerate(pf, mu_field(spec, u), 10 * (1 / 64) ** 2)
    assert rep.passed


# -- gradient bounds ------------------------------------------------------------------

def test_modica_bound_on_kink():  # [DERIVED]
    rep = check_gradient_bound(ex1_spec(), kink_profile(), 1e-10)
    assert rep.passed and abs(rep.worst_residual) <= 1e-10


def test_modica_bound_translation_invariant():
    a = check_gradient_bound(ex1_spec(), kink_profile((-5.0, 5.0)), 1e-10)
    b = check_gradient_bound(ex1_spec(), kink_profile((-3.0, 7.0)), 1e-10)
    assert abs(a.worst_residual - b.worst_residual) <= 1e-10


def test_exp_decay_gamma_matches_closed_double_integral():  # [DERIVED]
    spec = ex2_spec()
    s = np.array([0.1, 0.5, 0.97, 1.5])
    closed = s + 2 * np.exp(-s) - 2 + 0.5 - 0.5 * np.exp(-2 * s)
    quad = np.array([example2_double_integral(R.EXP_DECAY, v, sign=-1) for v in s])
    assert np.allclose(quad, closed, atol=1e-10)
    assert np.allclose(spec.separable.Gamma(s), 2 * closed, atol=1e-10)


def test_exp_decay_gradient_bound_on_bvp():
    spec, u = ex2_spec(), bvp(64)
    rep = check_gradient_bound(spec, u, 10 * (1 / 64) ** 2)
    assert rep.passed
    assert rep.details["max_gradsq_minus_psi"] <= 10 * (1 / 64) ** 2


def test_exp_growth_counterexample_refuses():  # [PAPER] P(s, 0) > 0 for s < 0
    spec = paper_example("ex1", f=R.EXP_GROWTH, F=R.SINH2)[1]
    prof = fixture("exp_growth_profile")
    with pytest.raises(HypothesisFail):
        check_gradient_bound(spec, prof, 1e-10)


# -- first integrals -------------------------------------------------------------------

def _ex5(Phi, rho, Fpot, Q=None):
    kw = {"Q": Q} if Q is not None else {}
    return paper_example("ex5", Phi=Phi, rho=rho, Fpot=Fpot, **kw)


def test_first_integral_kink():  # [DERIVED]
    eq, spec = _ex5(R.PHI_LIN, R.RHO_ONE, R.W_AC, R.Q_LIN_ONE)
    assert check_profile_first_integral(spec, kink_profile(), 1e-8).passed


def test_first_integral_quadratic_flux():
    eq, spec = _ex5(R.PHI_QUAD, R.RHO_ONE, R.W_AC)
    v0 = math.sqrt(spec.separable.psi(0.0))
    prof = integrate_profile(eq, 0.0, v0, 1e-3, (-5.0, 5.0))
    rep = check_profile_first_integral(spec, prof, 1e-7)
    assert rep.passed
    assert np.max(np.abs(eval_P_profile(spec, prof))) <= 1e-7


def test_first_integral_nontrivial_rho():
    eq, spec = _ex5(R.PHI_LIN, R.RHO_LIN, R.W_AC)
    prof = integrate_profile(eq, 0.3, 0.2, 1e-3, (-1.0, 1.0))
    assert check_profile_first_integral(spec, prof, 1e-7).passed


# -- eikonal reduction -------------------------------------------------------------------

def test_eikonal_kink_trace():
    u = fixture("kink_trace")
    rep = check_eikonal_reduction(ex1_spec(), u, 1e-3)
    assert rep.passed


def test_eikonal_constant_at_zero_gamma():  # [TRIVIAL]
    u = Field2.from_function(Grid2.square(0.0, 1.0, 17), lambda x, y: 1.0 + 0 * x)
    assert check_eikonal_reduction(ex1_spec(), u, 1e-10).passed


def test_eikonal_line():  # [TRIVIAL]
    assert check_eikonal_reduction(linear_spec(1.0), line_field(), 1e-10).passed


def test_eikonal_requires_constant_P():
    with pytest.raises(PNotConstant):
        check_eikonal_reduction(ex1_spec(), bump(), 1e-6)


# -- Liouville ------------------------------------------------------------------------------

def test_liouville_constant():  # [TRIVIAL]
    u = Field2.from_function(Grid2.square(0.0, 1.0, 17), lambda x, y: 3.0 + 0 * x)
    gamma = Fn1(lambda s: (s - 3) ** 2, lambda s: 2 * (s - 3), lambda s: 2 + 0 * s)
    rep = check_liouville(u, LiouvilleMode.GAMMA_ZERO_PROPAGATION, 1e-10, Gamma=gamma)
    assert rep.passed and not rep.vacuous


def test_liouville_kink_vacuous():  # [DERIVED] tanh never reaches +-1
    gamma = Fn1(lambda s: 2 * R.W_AC(s), lambda s: 2 * R.F_AC(s), lambda s: 2 * (3 * s * s - 1))
    rep = check_liouville(kink_profile((-5.0, 5.0)), "GammaZeroPropagation", 1e-10, Gamma=gamma)
    assert rep.passed and rep.vacuous


def test_liouville_nonexistence():  # [PAPER] G(0) != 0
    u = Field2.from_function(Grid2.square(0.0, 1.0, 17), lambda x, y: 3.0 + 0 * x)
    rep = check_liouville(u, LiouvilleMode.NONEXISTENCE_CONSTANT_TEST, 1e-6, G_rhs=Fn1.constant(1.0))
    assert rep.passed and rep.worst_residual == pytest.approx(1.0)


def test_liouville_grad_p_function():
    u = Field2.from_function(Grid2.square(0.0, 1.0, 17), lambda x, y: 2.0 + 0 * x)
    rep = check_liouville(u, "GradPFunction", 1e-10, g=lambda a, b: a * a + b * b)
    assert rep.passed and not rep.vacuous


def test_liouville_mode_errors():
    with pytest.raises(ModeMismatch):
        check_liouville(line_field(), "Sideways", 1e-6)
    with pytest.raises(ModeMismatch):
        check_liouville(kink_profile(), "NonexistenceConstantTest", 1e-6, G_rhs=Fn1.constant(1.0))


# -- Monge-Ampere -----------------------------------------------------------------------

def _ma(fn, h=1 / 128):
    return Field2.from_function(Grid2.rect((-0.5, 0.5), (-0.5, 0.5), h), fn)


def test_monge_ampere_unit_quadratic():  # [DERIVED]
    rep = check_monge_ampere(_ma(lambda x, y: 0.5 * (x * x + y * y)), grad_norm_sq(), 1e-3)
    assert rep.passed
    names = {c.name for c in rep.subchecks}
    assert {"det_positive", "drift_residual", "averages_monotone"} <= names


def test_monge_ampere_anisotropic():  # [DERIVED] Lap g = 26
    rep = check_monge_ampere(_ma(lambda x, y: 0.5 * (2 * x * x + 3 * y * y)), grad_norm_sq(), 1e-3)
    assert rep.passed
    assert rep.worst_residual == pytest.approx(26.0, abs=1e-6)


def test_monge_ampere_with_drift():
    u = _ma(lambda x, y: 0.5 * (x * x + y * y) + 0.1 * np.exp(x))
    rep = check_monge_ampere(u, grad_norm_sq(), 10 * (1 / 128) ** 2 * 10)
    assert rep.passed
    assert not any(c.name.startswith("sub_mean_value") for c in rep.subchecks)


def test_mean_value_quadratic():  # [DERIVED]
    f = Field2.from_function(Grid2.square(-0.5, 0.5, 129), lambda x, y: x * x + y * y)
    rep = check_mean_value_monotonicity(f, (0.0, 0.0), (0.1, 0.2, 0.3), 1e-3)
    assert rep.passed


def test_mean_value_constant_and_harmonic():  # [TRIVIAL]
    g = Grid2.square(-0.5, 0.5, 129)
    c = Field2.from_function(g, lambda x, y: 7.0 + 0 * x)
    assert check_mean_value_monotonicity(c, (0.0, 0.0), (0.1, 0.2, 0.3), 1e-12).passed
    hrm = Field2.from_function(g, lambda x, y: x * x - y * y)
    assert check_mean_value_monotonicity(hrm, (0.0, 0.0), (0.1, 0.2, 0.3), 1e-12).passed


def test_mean_value_rejects_superharmonic():
    with pytest.raises(NotSubharmonic):
        check_mean_value_monotonicity(bump(), (0.0, 0.0), (0.1, 0.2), 1e-6)
