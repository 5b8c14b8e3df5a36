import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from pfunc import registry as R
from pfunc.errors import BadParams, DomainError, NoBracket, NonFinite, NotMonotone
from pfunc.funcalg import (Fn1, Fn2, MuKind, PFunctionSpec, antiderivative, example2_double_integral,
                           fd_partials, invert_monotone, paper_example)


def _square():
    return Fn1(lambda x: x * x, lambda x: 2 * x, lambda x: np.full_like(x, 2.0), (0.0, 2.0), "t^2")


# -- invert_monotone ---------------------------------------------------------

def test_invert_identity():  # [TRIVIAL]
    assert invert_monotone(Fn1.identity(), 0.5, (0.0, 1.0)) == pytest.approx(0.5, abs=1e-12)


def test_invert_square_gives_sqrt2():  # [TRIVIAL] analytic inverse
    assert invert_monotone(_square(), 2.0, (0.0, 2.0)) == pytest.approx(math.sqrt(2), abs=1e-12)


def test_invert_q_built_by_quadrature():
    # Q(t) = int_0^t 1 dy from the divergence-form example with Phi = t, rho = 1
    _, spec = paper_example("ex5", Phi=R.PHI_LIN, rho=R.RHO_ONE, Fpot=R.W_AC)
    Q = spec.separable.B
    assert invert_monotone(Q, 2 * 0.3, (0.0, 5.0)) == pytest.approx(0.6, abs=1e-10)


def test_invert_errors():
    with pytest.raises(NoBracket):
        invert_monotone(Fn1.identity(), 3.0, (0.0, 1.0))
    parabola = Fn1(lambda x: x * x, lambda x: 2 * x, lambda x: np.full_like(x, 2.0))
    with pytest.raises(NotMonotone):
        invert_monotone(parabola, 0.5, (-1.0, 1.0))


_MONOTONE = [
    (R.EXP_DECAY, (-2.0, 3.0)),
    (R.EXP_GROWTH, (-2.0, 3.0)),
    (R.SINH2, (-2.0, 2.0)),
    (R.PHI_QUAD, (0.0, 4.0)),
    (R.RHO_LIN, (0.0, 4.0)),
    (R.Q_QUAD_LIN, (0.0, 4.0)),
    (R.G_EX4, (-3.0, 3.0)),
    (R.B73, (0.5, 3.0)),
    (R.EXP_DECAY_INNER, (0.0, 3.0)),
]


@pytest.mark.parametrize("f,bracket", _MONOTONE, ids=lambda v: getattr(v, "label", None))
def test_invert_roundtrip_registry(f, bracket):
    rng = np.random.default_rng(7)
    for x in rng.uniform(*bracket, 100):
        assert invert_monotone(f, f(x), bracket) == pytest.approx(x, abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 1.95))
def test_invert_residual_bound(x):
    f = _square()
    y = f(x)
    assert abs(f(invert_monotone(f, y, (0.0, 2.0))) - y) <= 1e-12 * (1 + abs(y))


# -- Fn1 derivative stacks ---------------------------------------------------

_SMOOTH = [R.W_AC, R.F_AC, R.EXP_DECAY, R.EXP_GROWTH, R.SINH2, R.G_EX4, R.Q_QUAD_LIN]


@pytest.mark.parametrize("f", _SMOOTH, ids=lambda f: f.label)
def test_fn1_derivatives_second_order_consistent(f):
    x = 0.37
    errs = []
    for h in (1e-2, 1e-3):
        fd = (f(x + h) - f(x - h)) / (2 * h)
        errs.append(abs(f.d1(x) - fd))
    order = math.log10(errs[0] / errs[1])
    assert order >= 1.9
    fd2 = (f(x + 1e-4) - 2 * f(x) + f(x - 1e-4)) / 1e-8
    assert f.d2(x) == pytest.approx(fd2, rel=1e-5, abs=1e-6)


def test_fn1_domain_is_enforced():
    with pytest.raises(DomainError):
        R.PHI_QUAD(-0.1)


def test_fn1_from_callable_matches_closed_form():
    f = Fn1.from_callable(np.sin)
    assert f.d1(0.4) == pytest.approx(math.cos(0.4), abs=1e-10)
    assert f.d2(0.4) == pytest.approx(-math.sin(0.4), abs=1e-7)


# -- fd_partials -------------------------------------------------------------

def test_fd_partials_bilinear():  # [TRIVIAL]
    p = fd_partials(lambda s, t: s * t, 2.0, 3.0)
    assert p.ps == pytest.approx(3, abs=1e-9) and p.pt == pytest.approx(2, abs=1e-9)
    assert p.pst == pytest.approx(1, abs=1e-9)
    assert abs(p.pss) < 1e-9 and abs(p.ptt) < 1e-9


def test_fd_partials_half_t_squared():  # [TRIVIAL]
    p = fd_partials(lambda s, t: t * t / 2, 0.0, 1.0)
    assert p.pt == pytest.approx(1, abs=1e-9) and p.ptt == pytest.approx(1, abs=1e-9)
    assert max(abs(p.ps), abs(p.pss), abs(p.pst)) < 1e-9


def test_fd_partials_gaussian_against_sympy():
    s, t = sp.symbols("s t")
    expr = sp.exp(-s ** 2)
    raw = sp.lambdify((s, t), expr + 0 * t, "numpy")
    p = fd_partials(lambda a, b: raw(a, b) + 0 * b, 1.0, 0.0)
    assert p.ps == pytest.approx(float(sp.diff(expr, s).subs(s, 1)), abs=1e-8)
    assert p.pss == pytest.approx(float(sp.diff(expr, s, 2).subs(s, 1)), abs=1e-8)
    assert p.ps == pytest.approx(-2 * math.exp(-1), abs=1e-8)


def test_fd_partials_nonfinite():
    with pytest.raises(NonFinite), np.errstate(divide="ignore"):
        fd_partials(lambda s, t: np.log(t) + s, 0.0, 0.0)


def test_fn2_mixed_partial_symmetry():
    raw = lambda s, t: np.sin(s) * np.exp(0.5 * t)
    P = Fn2.from_callable(raw)
    h = 1e-4
    cross = (P.ps(0.3, 0.2 + h) - P.ps(0.3, 0.2 - h)) / (2 * h)
    assert P.pst(0.3, 0.2) == pytest.approx(cross, abs=1e-6)


# -- named examples ----------------------------------------------------------

def test_example1_allen_cahn():  # [PAPER] P = t/2 - F(s), P_t = 1/2
    _, spec = paper_example("ex1", f=R.F_AC)
    s = np.linspace(-2, 2, 9)
    F0 = 0.25 * (1 - s * s) ** 2 - 0.25
    diff = spec.P(s, 1.3) - (1.3 / 2 - F0)
    assert np.ptp(diff) < 1e-10  # equal up to an additive constant
    assert np.allclose(spec.P.pt(s, 1.3), 0.5)
    assert spec.mu_kind is MuKind.PT_TIMES_T_SQUARED
    # the nonnegative choice of the additive constant satisfies the separable invariants
    _, spec = paper_example("ex1", f=R.F_AC, F=R.W_AC)
    spec.validate(np.linspace(-1, 1, 5), np.linspace(0, 2, 5))


def test_example4_p_is_t_minus_s():  # [PAPER]
    G = Fn1(lambda z: np.minimum(z, 0.5) - 1, lambda z: (z < 0.5).astype(float), lambda z: np.zeros_like(z))
    _, spec = paper_example("ex4", G=G)
    s, t = np.meshgrid(np.linspace(0, 3, 7), np.linspace(0, 3, 7))
    assert np.allclose(spec.P(s, t), t - s, atol=1e-14)


def test_example4_rejects_large_G():
    with pytest.raises(BadParams):
        paper_example("ex4", G=Fn1.constant(1.0))


def test_example5_linear_flux():  # [DERIVED] Q(t) = t by quadrature
    _, spec = paper_example("ex5", Phi=R.PHI_LIN, rho=R.RHO_ONE, Fpot=R.W_AC)
    t = np.array([0.0, 0.5, 1.7, 3.0])
    assert np.allclose(spec.separable.B(t), t, atol=1e-10)
    s = 0.4
    assert spec.P(s, 1.7) == pytest.approx(1.7 - 2 * R.W_AC(s), abs=1e-10)


def test_example5_quadratic_flux_q_matches_closed_form():
    _, spec = paper_example("ex5", Phi=R.PHI_QUAD, rho=R.RHO_LIN, Fpot=R.W_AC)
    t = np.linspace(0, 3, 7)
    assert np.allclose(spec.separable.B(t), R.Q_QUAD_LIN(t), atol=1e-9)


def test_example3_both_branches_against_sympy():
    s, t = sp.symbols("s t")
    for k, lam, c in [(0.5, 2.0, 1.0), (-1.0, 2.0, 1.0)]:
        _, spec = paper_example("ex3", k=k, lam=lam, c=c)
        if k != -c:
            P = t * sp.exp(-k * s ** 2) + lam / (k + c) * sp.exp(-s ** 2 * (k + c))
        else:
            P = t * sp.exp(c * s ** 2) - lam * s ** 2
        for (sv, tv) in [(0.3, 0.7), (-1.1, 2.0)]:
            sub = {s: sv, t: tv}
            assert spec.P(sv, tv) == pytest.approx(float(P.subs(sub)), rel=1e-12)
            assert spec.P.ps(sv, tv) == pytest.approx(float(sp.diff(P, s).subs(sub)), rel=1e-12)
            assert spec.P.pss(sv, tv) == pytest.approx(float(sp.diff(P, s, 2).subs(sub)), rel=1e-12)
            assert spec.P.pst(sv, tv) == pytest.approx(float(sp.diff(P, s, t).subs(sub)), rel=1e-12, abs=1e-14)


def test_example2_rejects_sign_change():
    with pytest.raises(BadParams):
        paper_example("ex2", f=R.F_AC, domain=(-2.0, 2.0))


def test_example2_closed_inner_matches_quadrature():
    _, closed = paper_example("ex2", f=R.EXP_DECAY, domain=(0.0, 2.0), inner=R.EXP_DECAY_INNER)
    _, quadr = paper_example("ex2", f=R.EXP_DECAY, domain=(0.0, 2.0))
    s = np.array([0.0, 0.3, 1.0, 2.0])
    assert np.allclose(closed.P(s, 0.5), quadr.P(s, 0.5), atol=1e-9)


def test_double_integral_power_law_closed_form():
    # f = W' with W = u^k: closed form a^2 k(1-k) / (2 (k-1/2)^2) u^{2k}
    k, u = 0.9, 0.5
    f = Fn1(lambda x: k * x ** (k - 1), lambda x: k * (k - 1) * x ** (k - 2),
            lambda x: k * (k - 1) * (k - 2) * x ** (k - 3), (0.0, math.inf))
    val = example2_double_integral(f, u, sign=-1)
    closed = k * (1 - k) / (2 * (k - 0.5) ** 2) * u ** (2 * k)
    assert val == pytest.approx(closed, rel=1e-6)


def test_unknown_example():
    with pytest.raises(BadParams):
        paper_example("ex9")


def test_pfunction_spec_validate_rejects_negative_pt():
    P = Fn2(lambda s, t: -t, lambda s, t: 0 * s, lambda s, t: -1 + 0 * s, lambda s, t: 0 * s,
            lambda s, t: 0 * s, lambda s, t: 0 * s)
    with pytest.raises(BadParams):
        PFunctionSpec(P, MuKind.PT_TIMES_T_SQUARED).validate([0.0], [1.0])


def test_antiderivative_of_cos():
    F = antiderivative(Fn1(np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x)))
    xs = np.array([-1.0, 0.0, 0.5, 2.0])
    assert np.allclose(F(xs), np.sin(xs), atol=1e-10)
