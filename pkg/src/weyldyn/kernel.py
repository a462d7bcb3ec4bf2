"""Goursat kernel w(x,t) of the half-line wave system, by Neumann iteration.

In characteristic coordinates xi = t - x, eta = t + x the kernel
v(xi, eta) = w((eta-xi)/2, (eta+xi)/2) solves the integral equation

    v = Q - K v,
    Q(xi, eta)   = -1/2 int_{xi/2}^{eta/2} q(a) da,
    (K v)(xi,eta) = 1/4 int_0^xi dxi1 int_xi^eta deta1
                        q((eta1 - xi1)/2) v(xi1, eta1),

on the triangle 0 <= xi <= eta <= eta_max, with v(eta,eta) = 0 and
v(0,eta) = Q(0,eta) inherited exactly by every iterate.  The series
v = Q + sum_n (-1)^n K^n Q converges factorially: term n is dominated by

    |K^n Q| <= ||q~||^{n+1} / 4^{n+1} * xi^n / n! * (eta+n+1)^{n+1} / (n+1)!

with ||q~|| the windowed norm of the stretched potential (see
:func:`term_bound`), which is what makes a fixed term-count cutoff safe.

K is evaluated by composite trapezoid restructured as running prefix sums
(first over xi1 per eta1-column, then over eta1 per xi-row), so one
application costs O(N^2) instead of the O(N^4) of naive node-wise
quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .potentials import Potential


class GridError(ValueError):
    """Malformed triangle grid."""


class DomainError(ValueError):
    """Evaluation point outside the computed triangle."""


class ConvergenceError(RuntimeError):
    """Neumann series failed to reach the requested term tolerance."""


@dataclass(frozen=True)
class TriangleGrid:
    """Uniform grid on {0 <= xi <= eta <= eta_max}, node (i,j) -> (i*h, j*h)."""

    eta_max: float
    h: float

    def __post_init__(self):
        if self.h <= 0 or self.eta_max <= 0:
            raise GridError("eta_max and h must be positive")
        n = self.eta_max / self.h
        if abs(n - round(n)) > 1e-9 * max(1.0, n) or round(n) < 1:
            raise GridError(f"h={self.h} does not divide eta_max={self.eta_max}")

    @property
    def n(self) -> int:
        return int(round(self.eta_max / self.h))

    def nodes(self) -> np.ndarray:
        """The shared xi/eta coordinate array i*h, i = 0..n."""
        return np.arange(self.n + 1) * self.h


@dataclass(eq=False)
class KernelField:
    """Kernel values v(xi_i, eta_j) on a triangle grid.

    ``terms_used`` counts the K-applications summed beyond Q and
    ``last_term_max`` is the max-norm of the final summed term (the
    convergence witness).  ``terms`` optionally keeps the unsigned terms
    K^n Q (term 0 is Q itself) for bound checking.
    """

    grid: TriangleGrid
    v: np.ndarray
    terms_used: int = 0
    last_term_max: float = 0.0
    terms: list[np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        self.v.flags.writeable = False


def _triu_mask(n: int) -> np.ndarray:
    return np.triu(np.ones((n + 1, n + 1)))


def _char_q_matrix(p: Potential, grid: TriangleGrid) -> np.ndarray:
    """q((eta_j - xi_i)/2) over the triangle; depends only on j - i."""
    n = grid.n
    idx = np.arange(n + 1)
    qdiag = np.asarray(p(idx * (grid.h / 2.0)))
    diff = np.clip(idx[None, :] - idx[:, None], 0, n)
    return qdiag[diff] * _triu_mask(n)


def build_Q(p: Potential, grid: TriangleGrid) -> KernelField:
    """Source term Q(xi,eta) = -1/2 int_{xi/2}^{eta/2} q of the integral equation.

    Built from a single cumulative table C over the half-step grid, so
    Q[i,j] = -(C[j] - C[i])/2; the table uses the potential's exact interval
    integrals, hence Q is exact up to rounding for the whole catalog and for
    piecewise-linear sampled data.
    """
    n = grid.n
    cum = np.asarray(p.integral(0.0, np.arange(n + 1) * (grid.h / 2.0)))
    q_field = -0.5 * (cum[None, :] - cum[:, None]) * _triu_mask(n)
    return KernelField(grid, q_field, terms_used=0, last_term_max=float(np.abs(q_field).max()))


def _apply_K_array(qmat: np.ndarray, v: np.ndarray, h: float, triu: np.ndarray) -> np.ndarray:
    """One application of K by prefix-sum trapezoid; O(N^2)."""
    g = qmat * v
    # P[i, j'] = int_0^{xi_i} q((eta_{j'} - xi1)/2) v(xi1, eta_{j'}) dxi1
    cs0 = np.cumsum(g, axis=0)
    p_tab = h * (cs0 - 0.5 * (g[0, :][None, :] + g))
    p_tab *= triu
    # (Kv)[i, j] = 1/4 int_{xi_i}^{eta_j} P[i, eta1] deta1
    cs1 = np.cumsum(p_tab, axis=1)
    out = 0.25 * h * (cs1 - 0.5 * (np.diagonal(p_tab)[:, None] + p_tab))
    out *= triu
    return out


def apply_K(p: Potential, fld: KernelField) -> KernelField:
    """Apply the double-integral operator K to a kernel field (node-wise trapezoid).

    Nodes where the integration rectangle [0,xi] x [xi,eta] degenerates
    (xi = 0 or xi = eta) come out exactly zero.
    """
    grid = fld.grid
    qmat = _char_q_matrix(p, grid)
    out = _apply_K_array(qmat, fld.v, grid.h, _triu_mask(grid.n))
    return KernelField(grid, out, terms_used=0, last_term_max=float(np.abs(out).max()))


def neumann_solve(
    p: Potential,
    grid: TriangleGrid,
    tol: float = 1e-12,
    max_terms: int = 60,
    keep_terms: bool = False,
) -> KernelField:
    """Sum the alternating series v = Q + sum_{n>=1} (-1)^n K^n Q.

    Stops at the first term whose max-norm is <= tol.  Raises
    ConvergenceError if max_terms applications of K do not get there, which
    signals an eta_max too large for the potential's windowed norm (the
    factorial decay sets in around n ~ sqrt(xi*eta)*||q~||/4) or a tol too
    tight for the accumulated rounding.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_terms < 1:
        raise ValueError("max_terms must be >= 1")
    n = grid.n
    triu = _triu_mask(n)
    q_fld = build_Q(p, grid)
    term = q_fld.v
    terms = [term] if keep_terms else None
    tmax = float(np.abs(term).max())
    if tmax <= tol:
        return KernelField(grid, term.copy(), terms_used=0, last_term_max=tmax, terms=terms)
    qmat = _char_q_matrix(p, grid)
    v = term.copy()
    sign = 1.0
    for m in range(1, max_terms + 1):
        term = _apply_K_array(qmat, term, grid.h, triu)
        if keep_terms:
            terms.append(term)
        sign = -sign
        v += sign * term
        tmax = float(np.abs(term).max())
        if tmax <= tol:
            return KernelField(grid, v, terms_used=m, last_term_max=tmax, terms=terms)
    raise ConvergenceError(
        f"kernel series not below tol={tol:g} after {max_terms} terms "
        f"(last term max {tmax:.3e}); reduce eta_max or loosen tol"
    )


def eval_w(fld: KernelField, x, t):
    """w(x,t) = v(t-x, t+x) by bilinear interpolation on the triangle.

    Returns 0 for x > t (causality).  Points with t + x beyond the computed
    triangle raise DomainError.  The stored zeros below the diagonal act as
    the clamp v(eta,eta) = 0, so interpolation cells touching the diagonal
    stay consistent with the exact boundary value.
    """
    scalar = np.isscalar(x) and np.isscalar(t)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    x, t = np.broadcast_arrays(x, t)
    grid = fld.grid
    h, n = grid.h, grid.n
    eta = t + x
    if np.any(eta > grid.eta_max * (1 + 1e-12) + 1e-12):
        raise DomainError(f"t + x = {float(np.max(eta)):g} exceeds eta_max = {grid.eta_max:g}")
    xi = np.maximum(t - x, 0.0)
    causal = x <= t * (1 + 1e-12) + 1e-12

    gi = np.clip(xi / h, 0.0, n)
    gj = np.clip(eta / h, 0.0, n)
    i0 = np.minimum(gi.astype(int), n - 1)
    j0 = np.minimum(gj.astype(int), n - 1)
    fi = gi - i0
    fj = gj - j0
    vv = fld.v
    out = (
        vv[i0, j0] * (1 - fi) * (1 - fj)
        + vv[i0 + 1, j0] * fi * (1 - fj)
        + vv[i0, j0 + 1] * (1 - fi) * fj
        + vv[i0 + 1, j0 + 1] * fi * fj
    )
    out = np.where(causal, out, 0.0)
    # the edge condition w(0, t) = 0 holds exactly, not just at nodes
    out = np.where(x == 0.0, 0.0, out)
    return float(out) if scalar else out


def term_bound(n, xi, eta, q_tilde_norm: float):
    """Factorial envelope for the n-th Neumann term at (xi, eta).

        ||q~||^{n+1} / 4^{n+1} * xi^n / n! * (eta+n+1)^{n+1} / (n+1)!

    Evaluated in log space (a single exp at the end) because the numerator
    (eta+n+1)^{n+1} overflows doubles near n ~ 40 at desk-scale eta.
    Accepts array xi/eta.  n = 0 reduces to (||q~||/4) (eta + 1).
    """
    if q_tilde_norm < 0:
        raise ValueError("q_tilde_norm must be >= 0")
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if np.any(xi < 0) or np.any(eta < xi):
        raise ValueError("need 0 <= xi <= eta")
    n = int(n)
    if n < 0:
        raise ValueError("n must be >= 0")
    if q_tilde_norm == 0.0:
        out = np.zeros(np.broadcast(xi, eta).shape)
        return float(out) if out.ndim == 0 else out
    with np.errstate(divide="ignore"):
        log_xi = np.where(xi > 0, np.log(np.where(xi > 0, xi, 1.0)), -np.inf)
    log_b = (
        (n + 1) * (math.log(q_tilde_norm) - math.log(4.0))
        + (0.0 if n == 0 else n * log_xi)
        - gammaln(n + 1)
        + (n + 1) * np.log(eta + n + 1)
        - gammaln(n + 2)
    )
    out = np.exp(log_b)
    return float(out) if out.ndim == 0 else out


def dump_kernel_csv(fld: KernelField, path) -> None:
    """Write the triangle as CSV rows (xi, eta, v), row-major over i then j."""
    n = fld.grid.n
    coords = fld.grid.nodes()
    i_idx, j_idx = np.triu_indices(n + 1)
    with open(path, "w") as fh:
        fh.write("xi,eta,v\n")
        for i, j in zip(i_idx, j_idx):
            fh.write(f"{coords[i]:.17g},{coords[j]:.17g},{fld.v[i, j]:.17g}\n")


def load_kernel_csv(path) -> np.ndarray:
    """Read a kernel dump back as an (xi, eta, v) array (regression aid)."""
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
