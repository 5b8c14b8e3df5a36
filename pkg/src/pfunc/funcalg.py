"""Scalar functions with derivative stacks, monotone inversion, and the
registry of named P-function examples.

All callables are expected to be numpy-vectorised: they receive float arrays
(possibly 0-d) and return arrays of the same shape.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Union

import numpy as np
from scipy import integrate

from .errors import BadParams, DomainError, NoBracket, NonFinite, NotMonotone

INF = math.inf
Interval = tuple[float, float]
Rect = tuple[Interval, Interval]

QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-12


def _scalarize(out, like):
    out = np.asarray(out, dtype=float)
    if np.ndim(like) == 0 and out.ndim == 0:
        return float(out)
    return np.broadcast_to(out, np.shape(like)).copy() if out.shape != np.shape(like) else out


def _check_interval(x, domain, label):
    x = np.asarray(x, dtype=float)
    lo, hi = domain
    bad = ~((x >= lo) & (x <= hi))
    if np.any(bad):
        first = float(np.ravel(x[bad] if x.ndim else x)[0])
        raise DomainError(f"{label or 'function'} evaluated at {first!r} outside {domain}",
                          value=first, domain=list(domain))
    return x


@dataclass(frozen=True)
class Fn1:
    """Smooth function of one variable with first and second derivatives."""

    value: Callable
    first: Callable
    second: Callable
    domain: Interval = (-INF, INF)
    label: str = ""

    def _arg(self, x):
        return _check_interval(x, self.domain, self.label)

    def __call__(self, x):
        xa = self._arg(x)
        return _scalarize(self.value(xa), x)

    def d1(self, x):
        xa = self._arg(x)
        return _scalarize(self.first(xa), x)

    def d2(self, x):
        xa = self._arg(x)
        return _scalarize(self.second(xa), x)

    @classmethod
    def constant(cls, c, domain=(-INF, INF), label=""):
        c = float(c)
        return cls(lambda x: np.full_like(x, c), lambda x: np.zeros_like(x),
                   lambda x: np.zeros_like(x), domain, label or f"const({c:g})")

    @classmethod
    def identity(cls, domain=(-INF, INF), label="id"):
        return cls(lambda x: np.array(x, dtype=float), lambda x: np.ones_like(x),
                   lambda x: np.zeros_like(x), domain, label)

    @classmethod
    def from_callable(cls, raw, domain=(-INF, INF), h=1e-3, label=""):
        """Wrap a bare closure; derivatives come from Richardson-extrapolated
        central differences with step ``h``."""

        def d1(x):
            def c(k):
                return (raw(x + k) - raw(x - k)) / (2 * k)
            return (4 * c(h / 2) - c(h)) / 3

        def d2(x):
            def c(k):
                return (raw(x + k) - 2 * raw(x) + raw(x - k)) / (k * k)
            return (4 * c(h / 2) - c(h)) / 3

        return cls(raw, d1, d2, domain, label)


class Partials(NamedTuple):
    ps: object
    pt: object
    pss: object
    pst: object
    ptt: object


def fd_partials(raw, s, t, h=1e-3) -> Partials:
    """Central-difference partials of ``raw(s, t)`` with one Richardson step.

    Second-order stencils at ``h`` and ``h/2`` are combined as ``(4 D(h/2) - D(h)) / 3``.
    Raises NonFinite when any stencil sample is NaN or infinite.
    """
    if not h > 0:
        raise BadParams("fd_partials needs h > 0", h=h)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)

    def sample(ds, dt):
        v = np.asarray(raw(s + ds, t + dt), dtype=float)
        if not np.all(np.isfinite(v)):
            raise NonFinite("non-finite sample on the difference stencil",
                            s=float(np.ravel(s)[0]), t=float(np.ravel(t)[0]))
        return v

    def stencil(k):
        c = sample(0, 0)
        sp, sm = sample(k, 0), sample(-k, 0)
        tp, tm = sample(0, k), sample(0, -k)
        pp, pm, mp, mm = sample(k, k), sample(k, -k), sample(-k, k), sample(-k, -k)
        return np.array([
            (sp - sm) / (2 * k),
            (tp - tm) / (2 * k),
            (sp - 2 * c + sm) / (k * k),
            (pp - pm - mp + mm) / (4 * k * k),
            (tp - 2 * c + tm) / (k * k),
        ])

    est = (4 * stencil(h / 2) - stencil(h)) / 3
    if est.ndim == 1:
        return Partials(*(float(v) for v in est))
    return Partials(*est)


@dataclass(frozen=True)
class Fn2:
    """Smooth function P(s, t) with all partials up to order two."""

    value: Callable
    ds: Callable
    dt: Callable
    dss: Callable
    dst: Callable
    dtt: Callable
    domain: Rect = ((-INF, INF), (-INF, INF))
    label: str = ""

    def _args(self, s, t):
        s_arr = _check_interval(s, self.domain[0], f"{self.label or 'Fn2'} (s)")
        t_arr = _check_interval(t, self.domain[1], f"{self.label or 'Fn2'} (t)")
        s_arr, t_arr = np.broadcast_arrays(s_arr, t_arr)
        return s_arr, t_arr

    def _eval(self, fn, s, t):
        sa, ta = self._args(s, t)
        like = sa if (np.ndim(s) or np.ndim(t)) else s
        return _scalarize(fn(sa, ta), like)

    def __call__(self, s, t):
        return self._eval(self.value, s, t)

    def ps(self, s, t):
        return self._eval(self.ds, s, t)

    def pt(self, s, t):
        return self._eval(self.dt, s, t)

    def pss(self, s, t):
        return self._eval(self.dss, s, t)

    def pst(self, s, t):
        return self._eval(self.dst, s, t)

    def ptt(self, s, t):
        return self._eval(self.dtt, s, t)

    @classmethod
    def from_callable(cls, raw, domain=((-INF, INF), (-INF, INF)), h=1e-3, label=""):
        def part(k):
            return lambda s, t: fd_partials(raw, s, t, h)[k]
        return cls(raw, part(0), part(1), part(2), part(3), part(4), domain, label)

    @classmethod
    def of_s(cls, f: Fn1, t_domain=(-INF, INF), label=""):
        """F(s, t) = f(s); the semilinear right-hand side seen as a gradient-semilinear one."""
        z = lambda s, t: np.zeros(np.broadcast(s, t).shape)
        return cls(lambda s, t: f.value(s) + 0 * t, lambda s, t: f.first(s) + 0 * t, z,
                   lambda s, t: f.second(s) + 0 * t, z, z,
                   (f.domain, t_domain), label or f.label)


# ---------------------------------------------------------------------------
# inversion and quadrature


def invert_monotone(f: Fn1, y: float, bracket: Interval, tol: float = 1e-12,
                    n_monotone_samples: int = 65) -> float:
    """Solve f(x) = y for x in ``bracket`` (safeguarded Newton on a bisection bracket).

    Returns x with |f(x) - y| <= tol * (1 + |y|) whenever that is representable.
    """
    a, b = float(bracket[0]), float(bracket[1])
    if not a < b:
        raise NoBracket("empty bracket", bracket=[a, b])
    xs = np.linspace(a, b, n_monotone_samples)
    slopes = np.asarray(f.d1(xs))
    if np.any(slopes > 0) and np.any(slopes < 0):
        raise NotMonotone(f"{f.label or 'f'} changes monotonicity on {bracket}",
                          bracket=[a, b])
    y = float(y)
    fa, fb = f(a) - y, f(b) - y
    if fa == 0:
        return a
    if fb == 0:
        return b
    if fa * fb > 0:
        raise NoBracket(f"y={y!r} outside f({bracket}) = [{fa + y!r}, {fb + y!r}]",
                        y=y, bracket=[a, b])
    target = tol * (1 + abs(y))
    neg_at_a = fa < 0
    x = 0.5 * (a + b)
    best, best_res = x, INF
    for _ in range(300):
        fx = f(x) - y
        if abs(fx) < best_res:
            best, best_res = x, abs(fx)
        if abs(fx) <= target:
            return x
        if (fx < 0) == neg_at_a:
            a = x
        else:
            b = x
        if b - a <= 4 * np.finfo(float).eps * max(1.0, abs(x)):
            break
        slope = f.d1(x)
        step = x - fx / slope if slope != 0 and np.isfinite(slope) else math.nan
        x = step if a < step < b else 0.5 * (a + b)
    return best


def invert_expanding(f: Fn1, y: float, start: Interval = (0.0, 1.0),
                     fixed_lower: bool = False, tol: float = 1e-12) -> float:
    """Invert a monotone ``f`` whose bracket is not known in advance.

    The bracket grows geometrically (clipped to ``f.domain``) until it contains y.
    With ``fixed_lower`` only the upper end moves, as for B, Q and A on [0, inf).
    """
    lo, hi = float(start[0]), float(start[1])
    dlo, dhi = f.domain
    for _ in range(80):
        flo, fhi = f(lo) - y, f(hi) - y
        if flo * fhi <= 0:
            return invert_monotone(f, y, (lo, hi), tol=tol)
        width = hi - lo
        grow_up = fixed_lower or abs(fhi) <= abs(flo)
        if grow_up:
            if hi >= dhi:
                break
            hi = min(hi + 2 * width, dhi)
        else:
            if lo <= dlo:
                break
            lo = max(lo - 2 * width, dlo)
    raise NoBracket(f"could not bracket y={y!r} for {f.label or 'f'}", y=float(y))


def quad(fun: Callable[[float], float], a: float, b: float) -> float:
    """Adaptive quadrature of a scalar integrand to absolute tolerance 1e-10."""
    if a == b:
        return 0.0
    val, _ = integrate.quad(fun, a, b, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=400)
    return float(val)


def cumulative_from_zero(fun: Callable[[float], float], s) -> np.ndarray:
    """Evaluate x -> integral_0^x fun at every entry of ``s``.

    Distinct abscissae are sorted and integrated segment by segment outward from 0,
    so a field of N distinct values costs N short quadratures rather than N long ones.
    """
    s = np.asarray(s, dtype=float)
    pts = np.unique(np.concatenate([[0.0], s.ravel()]))
    zero = int(np.searchsorted(pts, 0.0))
    acc = np.zeros_like(pts)
    for k in range(zero + 1, len(pts)):
        acc[k] = acc[k - 1] + quad(fun, pts[k - 1], pts[k])
    for k in range(zero - 1, -1, -1):
        acc[k] = acc[k + 1] - quad(fun, pts[k], pts[k + 1])
    out = acc[np.searchsorted(pts, s.ravel())].reshape(s.shape)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# P-function and equation specifications


class MuKind(enum.Enum):
    PT_TIMES_T_SQUARED = "pt_times_gradnorm_sq"
    UNIT = "unit"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Separable:
    """P(s, t) = B(t) - Gamma(s)."""

    B: Fn1
    Gamma: Fn1

    def psi(self, s):
        """Psi(s) = B^{-1}(Gamma(s)), pointwise; the right side of |grad u|^2 <= Psi(u)."""
        g = np.atleast_1d(np.asarray(self.Gamma(s), dtype=float))
        out = np.array([invert_expanding(self.B, gv, (0.0, 1.0), fixed_lower=True)
                        if gv > self.B(0.0) else 0.0 for gv in g.ravel()])
        out = out.reshape(g.shape)
        return float(out[0]) if np.ndim(s) == 0 else out.reshape(np.shape(s))

    def psi_prime(self, s):
        psi = self.psi(s)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.asarray(self.Gamma.d1(s)) / np.asarray(self.B.d1(psi))


@dataclass(frozen=True)
class PFunctionSpec:
    P: Fn2
    mu_kind: MuKind
    mu_fn: Optional[Fn1] = None
    separable: Optional[Separable] = None
    label: str = ""

    def mu(self, s, t):
        """Multiplier at (u, |grad u|^2) = (s, t)."""
        if self.mu_kind is MuKind.PT_TIMES_T_SQUARED:
            return np.asarray(self.P.pt(s, t)) * np.asarray(t)
        if self.mu_kind is MuKind.UNIT:
            return np.ones(np.broadcast(np.asarray(s), np.asarray(t)).shape)
        return np.asarray(self.mu_fn(t))

    def validate(self, s, t, rtol=1e-12):
        """Sampled invariants: P_t > 0 for t > 0 under the P_t |grad u|^2 multiplier,
        and the separable decomposition when declared."""
        s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
        if self.mu_kind is MuKind.PT_TIMES_T_SQUARED:
            pos = t > 0
            if np.any(pos) and np.min(self.P.pt(s[pos], t[pos])) <= 0:
                raise BadParams(f"{self.label}: P_t must be positive for t > 0")
        if self.separable is not None:
            B, G = self.separable.B, self.separable.Gamma
            p = np.asarray(self.P(s, t))
            if np.max(np.abs(p - (B(t) - G(s))) / (1 + np.abs(p))) > rtol:
                raise BadParams(f"{self.label}: P differs from B(t) - Gamma(s)")
            if abs(B(0.0)) > rtol:
                raise BadParams(f"{self.label}: B(0) != 0")
            tp = t[t > 0]
            if tp.size and (np.min(B.d1(tp)) <= 0 or np.min(B.d2(tp)) < -rtol):
                raise BadParams(f"{self.label}: need B' > 0 and B'' >= 0 for t > 0")
            if np.min(G(s)) < -rtol:
                raise BadParams(f"{self.label}: Gamma must be nonnegative on its domain")


@dataclass(frozen=True)
class Semilinear:
    """Delta u = f(u)."""

    f: Fn1
    kind = "semilinear"

    def as_gradient_semilinear(self) -> "GradientSemilinear":
        return GradientSemilinear(Fn2.of_s(self.f, (0.0, INF)))


@dataclass(frozen=True)
class GradientSemilinear:
    """Delta u = F(u, |grad u|^2)."""

    F: Fn2
    kind = "gradient_semilinear"


@dataclass(frozen=True)
class DivergenceForm:
    """div(Phi'(|grad u|^2) grad u) = rho(|grad u|^2) Fpot'(u)."""

    Phi: Fn1
    rho: Fn1
    Fpot: Fn1
    kind = "divergence_form"

    def ellipticity(self, t):
        t = np.asarray(t, dtype=float)
        return np.asarray(self.Phi.d1(t)) + 2 * t * np.asarray(self.Phi.d2(t))

    def validate(self, tmax=10.0, n=401):
        t = np.linspace(0.0, tmax, n)
        if np.min(self.Phi.d1(t)) <= 0:
            raise BadParams("Phi' must be positive")
        if np.min(self.rho(t)) <= 0:
            raise BadParams("rho must be positive")
        if np.min(self.ellipticity(t)) <= 0:
            raise BadParams("Phi'(t) + 2 t Phi''(t) must be positive")


@dataclass(frozen=True)
class MongeAmpere:
    """det(Hess u) = rhs(u) with rhs > 0."""

    rhs: Fn1
    kind = "monge_ampere"


@dataclass(frozen=True)
class FourthOrder73:
    """a(Delta u) [|grad u|^2 Delta^2 u - Delta u (grad u . grad Delta u)] = b(u) |grad u|^4."""

    a: Fn1
    b: Fn1
    kind = "fourth_order_73"

    def validate(self, w):
        w = np.asarray(w, dtype=float)
        if np.min(self.a(w)) <= 0 or np.min(self.a.d1(w)) < 0:
            raise BadParams("need a > 0 and a' >= 0 on the sampled range")


@dataclass(frozen=True)
class FourthOrder74:
    """|Hess u|^2 = F3(u, |grad u|^2, Delta u) + (u/2) Delta^2 u."""

    F3: Callable
    kind = "fourth_order_74"


@dataclass(frozen=True)
class Biharmonic76:
    """c |Hess u|^2 - Delta^2 u = 0 (convex subsolutions)."""

    c: float
    kind = "biharmonic_76"

    def __post_init__(self):
        if self.c < 0:
            raise BadParams("c must be nonnegative")


@dataclass(frozen=True)
class Reduction77:
    """2 |Hess u|^2 = (Delta u)^2 + u Delta^2 u."""

    kind = "reduction_77"


EquationSpec = Union[Semilinear, GradientSemilinear, DivergenceForm, MongeAmpere,
                     FourthOrder73, FourthOrder74, Biharmonic76, Reduction77]


# ---------------------------------------------------------------------------
# named examples


def _zeros(s, t):
    return np.zeros(np.broadcast(s, t).shape)


def separable_fn2(B: Fn1, Gamma: Fn1, label="") -> Fn2:
    """Fn2 for P(s, t) = B(t) - Gamma(s) with exact partials."""
    return Fn2(lambda s, t: B.value(t) - Gamma.value(s),
               lambda s, t: -Gamma.first(s) + 0 * t,
               lambda s, t: B.first(t) + 0 * s,
               lambda s, t: -Gamma.second(s) + 0 * t,
               _zeros,
               lambda s, t: B.second(t) + 0 * s,
               (Gamma.domain, (max(0.0, B.domain[0]), B.domain[1])), label)


def antiderivative(f: Fn1, label="") -> Fn1:
    """x -> integral_0^x f, by quadrature; derivatives are f and f'."""
    return Fn1(lambda x: np.asarray(cumulative_from_zero(lambda z: float(f.value(np.asarray(z))), x)),
               f.value, f.first, f.domain, label or f"int({f.label})")


def example1(f: Fn1, F: Optional[Fn1] = None):
    """Delta u = f(u) with P = t/2 - F(s), F' = f."""
    F = F if F is not None else antiderivative(f, label="F")
    B = Fn1(lambda t: t / 2, lambda t: np.full_like(t, 0.5), lambda t: np.zeros_like(t),
            (0.0, INF), "t/2")
    P = separable_fn2(B, F, label="ex1")
    spec = PFunctionSpec(P, MuKind.PT_TIMES_T_SQUARED, separable=Separable(B, F), label="ex1")
    return Semilinear(f), spec


def _sample_finite(fn, xs):
    with np.errstate(all="ignore"):
        v = np.asarray(fn(xs), dtype=float)
    return v


def example2_sign(f: Fn1, domain: Interval, n=801) -> int:
    """+1 if f f' >= 0 on [min(0, lo), max(0, hi)], -1 if <= 0; BadParams otherwise."""
    lo, hi = min(0.0, domain[0]), max(0.0, domain[1])
    xs = np.linspace(lo, hi, n)
    xs = xs[(xs >= f.domain[0]) & (xs <= f.domain[1])]
    with np.errstate(all="ignore"):
        prod = np.asarray(f.value(xs)) * np.asarray(f.first(xs))
    prod = prod[np.isfinite(prod)]
    scale = 1e-14 * (1 + np.max(np.abs(prod))) if prod.size else 0.0
    if np.all(prod <= scale):
        return -1
    if np.all(prod >= -scale):
        return 1
    raise BadParams("f f' changes sign on the declared domain; Example 2 is undefined there",
                    domain=list(domain))


def example2_inner(f: Fn1, sign: int) -> Callable[[float], float]:
    """g(y) = integral_0^y sqrt(sign f f') by quadrature (scalar)."""
    def phi(z):
        v = sign * float(f.value(np.asarray(z))) * float(f.first(np.asarray(z)))
        return math.sqrt(max(v, 0.0))
    return lambda y: quad(phi, 0.0, y)


def example2_double_integral(f: Fn1, u: float, sign: int = -1, inner=None) -> float:
    """integral_0^u (integral_0^y sqrt(sign f f') dz)^2 dy by nested adaptive quadrature."""
    g = inner if inner is not None else example2_inner(f, sign)
    return quad(lambda y: float(g(y)) ** 2, 0.0, u)


def example2(f: Fn1, domain: Optional[Interval] = None, inner: Optional[Fn1] = None):
    """Delta u = f(u) with P = t^2/2 + q(s), q(s) = 2 sigma integral_0^s g^2,
    g(y) = integral_0^y sqrt(sigma f f'), sigma = sign of f f'.

    ``inner`` may supply g in closed form (g' = sqrt(sigma f f'), g(0) = 0);
    otherwise g is computed by quadrature.
    """
    domain = domain if domain is not None else f.domain
    if not all(map(math.isfinite, domain)):
        raise BadParams("Example 2 needs a finite s-domain to check the sign of f f'")
    sign = example2_sign(f, domain)

    def phi(z):
        with np.errstate(all="ignore"):
            v = sign * np.asarray(f.value(z)) * np.asarray(f.first(z))
        return np.sqrt(np.maximum(v, 0.0))

    if inner is None:
        g_scalar = example2_inner(f, sign)
        g = lambda y: np.vectorize(g_scalar, otypes=[float])(y)
    else:
        g = lambda y: np.asarray(inner.value(np.asarray(y, dtype=float)))

    def q(s):
        return 2 * sign * np.asarray(cumulative_from_zero(lambda y: float(g(y)) ** 2, s))

    def q1(s):
        return 2 * sign * g(s) ** 2

    def q2(s):
        return 4 * sign * g(s) * phi(s)

    Pt = lambda s, t: np.asarray(t, dtype=float) + 0 * s
    P = Fn2(lambda s, t: t * t / 2 + q(s), lambda s, t: q1(s) + 0 * t, Pt,
            lambda s, t: q2(s) + 0 * t, _zeros, lambda s, t: np.ones(np.broadcast(s, t).shape),
            (tuple(domain), (0.0, INF)), "ex2")
    B = Fn1(lambda t: t * t / 2, lambda t: np.array(t, dtype=float), lambda t: np.ones_like(t),
            (0.0, INF), "t^2/2")
    Gamma = Fn1(lambda s: -q(s), lambda s: -q1(s), lambda s: -q2(s), tuple(domain), "-q")
    spec = PFunctionSpec(P, MuKind.PT_TIMES_T_SQUARED, separable=Separable(B, Gamma), label="ex2")
    return Semilinear(f), spec


def example3(k: float, lam: float, c: float):
    """Delta u = u (k |grad u|^2 + lam exp(-c u^2)) with the Payne-Philippin P-function."""
    k, lam, c = float(k), float(lam), float(c)

    def F(s, t):
        return s * (k * t + lam * np.exp(-c * s * s))

    def Fs(s, t):
        e = np.exp(-c * s * s)
        return k * t + lam * e * (1 - 2 * c * s * s)

    def Ft(s, t):
        return k * s + 0 * t

    def Fss(s, t):
        e = np.exp(-c * s * s)
        return lam * e * (-6 * c * s + 4 * c * c * s ** 3) + 0 * t

    eq = GradientSemilinear(Fn2(F, Fs, Ft, Fss, lambda s, t: k + 0 * s + 0 * t, _zeros,
                                ((-INF, INF), (0.0, INF)), "ex3"))
    if k != -c:
        m = k + c

        def P(s, t):
            return t * np.exp(-k * s * s) + lam / m * np.exp(-m * s * s)

        def Ps(s, t):
            return -2 * k * s * t * np.exp(-k * s * s) - 2 * lam * s * np.exp(-m * s * s)

        def Pt(s, t):
            return np.exp(-k * s * s) + 0 * t

        def Pss(s, t):
            return (t * np.exp(-k * s * s) * (4 * k * k * s * s - 2 * k)
                    + lam * np.exp(-m * s * s) * (4 * m * s * s - 2))

        def Pst(s, t):
            return -2 * k * s * np.exp(-k * s * s) + 0 * t
    else:
        def P(s, t):
            return t * np.exp(c * s * s) - lam * s * s

        def Ps(s, t):
            return 2 * c * s * t * np.exp(c * s * s) - 2 * lam * s

        def Pt(s, t):
            return np.exp(c * s * s) + 0 * t

        def Pss(s, t):
            return t * np.exp(c * s * s) * (2 * c + 4 * c * c * s * s) - 2 * lam

        def Pst(s, t):
            return 2 * c * s * np.exp(c * s * s) + 0 * t

    Pfn = Fn2(P, Ps, Pt, Pss, Pst, _zeros, ((-INF, INF), (0.0, INF)), "ex3")
    return eq, PFunctionSpec(Pfn, MuKind.UNIT, label="ex3")


def example4(G: Fn1, n=2001):
    """Delta u = G(|grad u|^2 - u) with G <= 1/2 and P = t - s."""
    lo, hi = G.domain
    zs = np.linspace(max(lo, -50.0), min(hi, 50.0), n)
    if np.max(G(zs)) > 0.5:
        raise BadParams("Example 4 requires G <= 1/2")
    F = Fn2(lambda s, t: G.value(t - s), lambda s, t: -G.first(t - s),
            lambda s, t: G.first(t - s), lambda s, t: G.second(t - s),
            lambda s, t: -G.second(t - s), lambda s, t: G.second(t - s),
            ((-INF, INF), (0.0, INF)), "ex4")
    B = Fn1.identity((0.0, INF), "t")
    Gamma = Fn1.identity((0.0, INF), "s")
    P = separable_fn2(B, Gamma, "ex4")
    return GradientSemilinear(F), PFunctionSpec(P, MuKind.PT_TIMES_T_SQUARED,
                                                separable=Separable(B, Gamma), label="ex4")


def example5(Phi: Fn1, rho: Fn1, Fpot: Fn1, Q: Optional[Fn1] = None, tmax=10.0):
    """Divergence form with P = Q(t) - 2 F(s), Q(t) = integral_0^t (Phi' + 2 y Phi'') / rho."""
    eq = DivergenceForm(Phi, rho, Fpot)
    eq.validate(tmax)

    def q1(t):
        t = np.asarray(t, dtype=float)
        return (np.asarray(Phi.first(t)) + 2 * t * np.asarray(Phi.second(t))) / np.asarray(rho.value(t))

    if Q is None:
        def q2(t):
            t = np.asarray(t, dtype=float)
            h = 1e-4 * (1 + np.abs(t))
            lo = np.maximum(t - h, 0.0)
            return (q1(t + h) - q1(lo)) / (t + h - lo)

        Q = Fn1(lambda t: np.asarray(cumulative_from_zero(lambda y: float(q1(np.asarray(y))), t)),
                q1, q2, (0.0, INF), "Q")
    Gamma = Fn1(lambda s: 2 * np.asarray(Fpot.value(s)), lambda s: 2 * np.asarray(Fpot.first(s)),
                lambda s: 2 * np.asarray(Fpot.second(s)), Fpot.domain, "2F")
    P = separable_fn2(Q, Gamma, "ex5")
    return eq, PFunctionSpec(P, MuKind.UNIT, separable=Separable(Q, Gamma), label="ex5")


_EXAMPLES = {
    "ex1": example1,
    "ex2": example2,
    "ex3": example3,
    "ex4": example4,
    "ex5": example5,
}


def paper_example(example_id: str, **params):
    """(EquationSpec, PFunctionSpec) for one of the five named examples."""
    try:
        build = _EXAMPLES[example_id]
    except KeyError:
        raise BadParams(f"unknown example {example_id!r}; known: {sorted(_EXAMPLES)}") from None
    try:
        return build(**params)
    except TypeError as exc:
        raise BadParams(f"bad parameters for {example_id}: {exc}") from None
