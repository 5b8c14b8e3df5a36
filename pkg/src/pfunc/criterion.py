"""Sampled checks of the P-function criterion for Delta u = F(u, |grad u|^2).

Every partial of P and F is evaluated at (s, t^2): ``t`` is |grad u| and the
second slot of both functions is |grad u|^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import PtNonPositive
from .funcalg import Fn1, Fn2, Rect
from .report import Subcheck

SAMPLE_SEED = 0x5EED
N_RANDOM = 1000
DEFAULT_TOL = 1e-9


def eval_I(P: Fn2, F: Fn2, s, t):
    """I(s, t) = Pt Ps F + Ps^2/2 + 2 t^2 Pt^2 Fs - 2 t^2 Pt Ps Ft, all at (s, t^2)."""
    return _I_terms(P, F, s, t).sum(axis=0)


def _I_terms(P, F, s, t):
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    tt = t * t
    ps, pt = np.asarray(P.ps(s, tt)), np.asarray(P.pt(s, tt))
    f, fs, ft = np.asarray(F(s, tt)), np.asarray(F.ps(s, tt)), np.asarray(F.pt(s, tt))
    return np.array(np.broadcast_arrays(
        pt * ps * f,
        ps * ps / 2,
        2 * tt * pt * pt * fs,
        -2 * tt * pt * ps * ft,
    ))


def eval_I_semilinear(P: Fn2, f: Fn1, s, t):
    """The corollary's normalised quantity Ps f + Ps^2 / (2 Pt) + 2 Pt t^2 f'.

    This equals I / Pt for F(s, t) = f(s); it is undefined where Pt = 0.
    """
    return _Isl_terms(P, f, s, t).sum(axis=0)


def _Isl_terms(P, f, s, t):
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    tt = t * t
    ps, pt = np.asarray(P.ps(s, tt)), np.asarray(P.pt(s, tt))
    fv, fp = np.asarray(f(s)), np.asarray(f.d1(s))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = ps * ps / (2 * pt)
    return np.array(np.broadcast_arrays(ps * fv, ratio, 2 * pt * tt * fp))


def hypothesis2_quantity(P: Fn2, F: Fn2, s, t):
    """t^2 Pss Pt + I(s, t)."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    tt = t * t
    return tt * np.asarray(P.pss(s, tt)) * np.asarray(P.pt(s, tt)) + eval_I(P, F, s, t)


@dataclass
class CriterionVerdict:
    passed: bool
    min_residual: float
    argmin: tuple
    samples_checked: int
    subchecks: list = field(default_factory=list)
    tolerance: float = DEFAULT_TOL
    variant: Optional[str] = None
    passing_variants: list = field(default_factory=list)

    def to_dict(self):
        return {
            "pass": self.passed,
            "min_residual": self.min_residual,
            "argmin": list(self.argmin),
            "samples_checked": self.samples_checked,
            "tolerance": self.tolerance,
            "variant": self.variant,
            "passing_variants": list(self.passing_variants),
            "subchecks": [c.to_dict() for c in self.subchecks],
        }


def sample_rect(rect: Rect, n_s: int, n_t: int, n_random: int = N_RANDOM, seed: int = SAMPLE_SEED):
    """Tensor grid (t = 0 included) plus uniform random interior points."""
    (s0, s1), (t0, t1) = rect
    if n_s < 2 or n_t < 2:
        raise ValueError("need at least two samples per axis")
    if t0 < 0:
        raise ValueError("t-range must lie in [0, inf)")
    ss, tt = np.meshgrid(np.linspace(s0, s1, n_s), np.linspace(t0, t1, n_t), indexing="ij")
    rng = np.random.default_rng(seed)
    rs = rng.uniform(s0, s1, n_random)
    rt = rng.uniform(t0, t1, n_random)
    return np.concatenate([ss.ravel(), rs]), np.concatenate([tt.ravel(), rt])


def _worst(values, s, t):
    """Minimum with deterministic tie-break on (value, s, t)."""
    order = np.lexsort((t, s, values))
    k = int(order[0])
    return float(values[k]), (float(s[k]), float(t[k]))


def _ge_subcheck(name, raw, mag, s, t, tol):
    scaled = raw / (1 + mag)
    val, loc = _worst(scaled, s, t)
    return Subcheck(name, val >= -tol, val, loc, tol)


def _pt_gate(P, s, t):
    pos = t > 0
    pt = np.asarray(P.pt(s[pos], t[pos] ** 2))
    if pt.size == 0:
        return Subcheck("pt_positive", True, float("inf"), None, 0.0)
    val, loc = _worst(pt, s[pos], t[pos])
    return Subcheck("pt_positive", val > 0, val, loc, 0.0)


def _psd_subcheck(P, s, t, tol):
    tt = t * t
    a, b, c = (np.asarray(P.pss(s, tt)), np.asarray(P.pst(s, tt)), np.asarray(P.ptt(s, tt)))
    a, b, c = np.broadcast_arrays(a, b, c)
    scale = 1 + np.maximum(np.abs(a) + np.abs(b), np.abs(b) + np.abs(c))
    trace = a + c
    det = (a * c - b * b) / scale
    val = np.minimum(trace, det)
    worst, loc = _worst(val, s, t)
    return Subcheck("hessian_psd", worst >= -tol, worst, loc, tol)


def _verdict(subs, n, tol, residual_names):
    res = [c for c in subs if c.name in residual_names]
    worst = min(res, key=lambda c: (c.worst_value, c.location or ()))
    return CriterionVerdict(all(c.passed for c in subs), worst.worst_value, worst.location,
                            n, subs, tol)


def check_hypothesis1(P: Fn2, F: Fn2, rect: Rect, n_s: int = 41, n_t: int = 41,
                      tol: float = DEFAULT_TOL) -> CriterionVerdict:
    """Hessian of P positive semidefinite and I >= 0 at every sample."""
    s, t = sample_rect(rect, n_s, n_t)
    terms = _I_terms(P, F, s, t)
    subs = [
        _pt_gate(P, s, t),
        _psd_subcheck(P, s, t, tol),
        _ge_subcheck("I_nonnegative", terms.sum(axis=0), np.abs(terms).sum(axis=0), s, t, tol),
    ]
    v = _verdict(subs, s.size, tol, {"I_nonnegative"})
    v.variant = "hypothesis1"
    return v


def check_hypothesis2(P: Fn2, F: Fn2, rect: Rect, n_s: int = 41, n_t: int = 41,
                      tol: float = DEFAULT_TOL) -> CriterionVerdict:
    """P_st = 0, P_tt >= 0 and t^2 Pss Pt + I >= 0 at every sample."""
    s, t = sample_rect(rect, n_s, n_t)
    tt = t * t
    pst = np.broadcast_to(np.asarray(P.pst(s, tt)), s.shape)
    ptt = np.broadcast_to(np.asarray(P.ptt(s, tt)), s.shape)
    lead = tt * np.asarray(P.pss(s, tt)) * np.asarray(P.pt(s, tt))
    terms = np.concatenate([np.broadcast_to(lead, s.shape)[None], _I_terms(P, F, s, t)])
    worst_pst, loc_pst = _worst(-np.abs(pst), s, t)
    worst_ptt, loc_ptt = _worst(ptt, s, t)
    subs = [
        _pt_gate(P, s, t),
        Subcheck("pst_zero", -worst_pst <= tol, -worst_pst, loc_pst, tol),
        Subcheck("ptt_nonnegative", worst_ptt >= -tol, worst_ptt, loc_ptt, tol),
        _ge_subcheck("t2_pss_pt_plus_I", terms.sum(axis=0), np.abs(terms).sum(axis=0), s, t, tol),
    ]
    v = _verdict(subs, s.size, tol, {"t2_pss_pt_plus_I"})
    v.variant = "hypothesis2"
    return v


def _corollary_residual(P, f, s, t):
    """Corollary quantity with its summands; P_t = 0 samples use the P_t-multiplied form."""
    tt = t * t
    pt = np.broadcast_to(np.asarray(P.pt(s, tt), dtype=float), s.shape)
    terms = _Isl_terms(P, f, s, t)
    degenerate = pt == 0
    if np.any(degenerate):
        # Pt * (Ps f + Ps^2/(2 Pt) + ...) -> Ps^2 / 2 as Pt -> 0
        ps = np.asarray(P.ps(s[degenerate], tt[degenerate]))
        terms[:, degenerate] = 0.0
        terms[1, degenerate] = np.broadcast_to(ps * ps / 2, (int(degenerate.sum()),))
    return terms


def check_corollary_semilinear(P: Fn2, f: Fn1, rect: Rect, n_s: int = 41, n_t: int = 41,
                               tol: float = DEFAULT_TOL) -> CriterionVerdict:
    """Both variants of the corollary for Delta u = f(u); returns the better verdict."""
    s, t = sample_rect(rect, n_s, n_t)
    tt = t * t
    pos = t > 0
    pt = np.asarray(P.pt(s, tt))
    pt = np.broadcast_to(pt, s.shape)
    if np.any(pt[pos] <= 0):
        k = int(np.flatnonzero(pos & (pt <= 0))[0])
        raise PtNonPositive("P_t <= 0 at a sample with t > 0",
                            location=[float(s[k]), float(t[k])], value=float(pt[k]))
    terms = _corollary_residual(P, f, s, t)
    q = terms.sum(axis=0)
    mag = np.abs(terms).sum(axis=0)

    v1 = [_psd_subcheck(P, s, t, tol), _ge_subcheck("corollary_I_nonnegative", q, mag, s, t, tol)]
    verdict1 = _verdict(v1, s.size, tol, {"corollary_I_nonnegative"})
    verdict1.variant = "hypothesis1"

    pst = np.broadcast_to(np.asarray(P.pst(s, tt)), s.shape)
    ptt = np.broadcast_to(np.asarray(P.ptt(s, tt)), s.shape)
    lead = np.broadcast_to(tt * np.asarray(P.pss(s, tt)), s.shape)
    worst_pst, loc_pst = _worst(-np.abs(pst), s, t)
    worst_ptt, loc_ptt = _worst(ptt, s, t)
    v2 = [
        Subcheck("pst_zero", -worst_pst <= tol, -worst_pst, loc_pst, tol),
        Subcheck("ptt_nonnegative", worst_ptt >= -tol, worst_ptt, loc_ptt, tol),
        _ge_subcheck("t2_pss_plus_corollary_I", lead + q, mag + np.abs(lead), s, t, tol),
    ]
    verdict2 = _verdict(v2, s.size, tol, {"t2_pss_plus_corollary_I"})
    verdict2.variant = "hypothesis2"

    passing = [v.variant for v in (verdict1, verdict2) if v.passed]
    if verdict1.passed and verdict2.passed:
        best = verdict1 if verdict1.min_residual > verdict2.min_residual else verdict2
    elif verdict1.passed or verdict2.passed:
        best = verdict1 if verdict1.passed else verdict2
    else:
        best = verdict1 if verdict1.min_residual > verdict2.min_residual else verdict2
    best.passing_variants = passing
    return best
