"""Numerical checkers for the kernel growth estimates and the Herglotz property.

Every checker evaluates its inequality in log space where overflow is
possible and applies a relative slack of 1e-6 on assertions (quadrature and
interpolation touch both sides of each inequality).  None of these prove
sharpness; they certify that computed fields stay under the published
envelopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .potentials import Potential, PotentialNorms, _SampledData, _windowed_sup_sampled

INEQ_SLACK = 1e-6


class InfiniteNormError(ValueError):
    """L1-based bound requested for a potential with infinite L1 norm."""


def gursa_bound(p: Potential, x, s):
    """Envelope for the Goursat kernel:

        |w(x,s)| <= (1/2) M * exp(((s-x)/4) M),   M = int_0^{(s+x)/2} |q|.
    """
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(x < 0) or np.any(s < x):
        raise ValueError("need 0 <= x <= s")
    mass = np.asarray(p.integral_abs(0.0, (s + x) / 2.0))
    out = 0.5 * mass * np.exp(((s - x) / 4.0) * mass)
    return float(out) if out.ndim == 0 else out


def w_bound_l1(norms: PotentialNorms, x, t):
    """|w(x,t)| <= (1/2)||q||_L1 exp((||q||_L1/4)(t-x)); needs a finite L1 norm."""
    if math.isinf(norms.l1):
        raise InfiniteNormError(
            "L1 kernel bound undefined for infinite ||q||_L1; use w_bound_window"
        )
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    out = 0.5 * norms.l1 * np.exp((norms.l1 / 4.0) * (t - x))
    return float(out) if out.ndim == 0 else out


def w_bound_window(norms: PotentialNorms, x, t, kappa: float):
    """Windowed-class kernel envelope, any kappa > 0:

        |w(x,t)| <= (||q~||(x+t)/4) e^{(t-x)||q~||kappa/2 + (t+x)/kappa}
                  + (||q~|| e / (4 sqrt(2 pi))) e^{(t-x) e ||q~||/2}.

    Evaluated in log space; overflow surfaces as +inf, which is a valid
    (if useless) upper bound.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    qn = norms.windowed_scaled
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if qn == 0.0:
        out = np.zeros(np.broadcast(x, t).shape)
        return float(out) if out.ndim == 0 else out
    xt = x + t
    with np.errstate(divide="ignore", over="ignore"):
        log1 = np.where(
            xt > 0,
            np.log(qn / 4.0) + np.log(np.where(xt > 0, xt, 1.0))
            + (t - x) * qn * kappa / 2.0 + xt / kappa,
            -np.inf,
        )
        log2 = (
            math.log(qn * math.e / (4.0 * math.sqrt(2.0 * math.pi)))
            + (t - x) * math.e * qn / 2.0
        )
        out = np.exp(log1) + np.exp(log2)
    return float(out) if out.ndim == 0 else out


def lemma1_check(x, f, a: float, b: float, n: int):
    """(lhs, rhs) of the windowed-norm moment inequality

        int_0^a (x+b)^n f(x) dx  <=  (a+b+1)^{n+1}/(n+1) * ||f||,

    for a sampled non-negative f (piecewise linear).  lhs by trapezoid on
    the sample grid cut at a; ||f|| is the exact sliding-window sup of the
    interpolant.
    """
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=float)
    if np.any(f < 0):
        raise ValueError("f must be non-negative")
    if a < 0 or b < 0 or n < 1:
        raise ValueError("need a, b >= 0 and integer n >= 1")
    keep = x <= a
    xa = np.concatenate([x[keep], [min(a, x[-1])]]) if np.any(keep) else np.array([0.0])
    fa = np.interp(xa, x, f)
    xa, idx = np.unique(xa, return_index=True)
    fa = fa[idx]
    integrand = (xa + b) ** n * fa
    lhs = float(np.sum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(xa))) if len(xa) > 1 else 0.0
    norm = _windowed_sup_sampled(_SampledData(x, f))
    rhs = (a + b + 1.0) ** (n + 1) / (n + 1) * norm
    return lhs, rhs


@dataclass
class HerglotzReport:
    """Outcome of scanning m-values for Im m >= -tol on the upper half plane."""

    checked: int = 0
    tol: float = 1e-10
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def herglotz_check(values, tol: float = 1e-10) -> HerglotzReport:
    """Flag every m-value with Im m < -tol; all inputs must have Im z > 0."""
    rep = HerglotzReport(tol=tol)
    for mv in values:
        if complex(mv.z).imag <= 0:
            raise ValueError(f"Herglotz check needs Im z > 0, got z = {mv.z}")
        rep.checked += 1
        if complex(mv.m).imag < -tol:
            rep.violations.append(mv)
    return rep


def stirling_floor_margin(n_max: int = 60) -> float:
    """min over 1 <= n <= n_max of log n! - [log sqrt(2 pi) + n (log n - 1)].

    Non-negative means the factorial floor used by the windowed-class bound
    holds in this arithmetic for the whole range the series can visit.
    """
    from scipy.special import gammaln

    n = np.arange(1, n_max + 1, dtype=float)
    return float(np.min(gammaln(n + 1) - (0.5 * math.log(2 * math.pi) + n * (np.log(n) - 1.0))))


def domination_report(check: str, values, bounds, coords=None, slack: float = INEQ_SLACK,
                      max_violations: int = 20) -> dict:
    """JSON-ready report that |values| <= bounds * (1 + slack) node-wise."""
    values = np.asarray(values, dtype=float).ravel()
    bnd = np.asarray(bounds, dtype=float).ravel()
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(bnd > 0, np.abs(values) / bnd, np.where(np.abs(values) > 0, np.inf, 0.0))
    bad = np.flatnonzero(ratio > 1.0 + slack)
    violations = []
    for i in bad[:max_violations]:
        entry = {"value": float(values[i]), "bound": float(bnd[i])}
        if coords is not None:
            entry["at"] = [float(c) for c in np.asarray(coords)[i]]
        violations.append(entry)
    return {
        "check": check,
        "nodes_tested": int(values.size),
        "max_ratio": float(np.max(ratio)) if values.size else 0.0,
        "violations": violations,
        "passed": bool(len(bad) == 0),
    }
