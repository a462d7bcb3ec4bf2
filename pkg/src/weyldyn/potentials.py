"""Potentials q(x) on the half line [0, inf): catalog, sampled data, norms.

A potential carries exact interval integrals of q and |q| (closed forms for
the catalog kinds, piecewise-linear quadrature for sampled data).  Exactness
here matters: the kernel construction downstream builds its source term from
a single cumulative table of q, and the diagonal boundary condition of the
kernel is checked against these integrals at O(h^2) tolerances.

Two norms drive the convergence theory:

    l1              = int_0^inf |q|
    windowed        = sup_{x>=0} int_x^{x+1} |q|        (the l_inf(L1) class)
    windowed_scaled = windowed norm of q~(g) := q(g/2)

The stretched norm ``windowed_scaled`` is the constant appearing in all
kernel growth bounds for potentials that are not globally integrable.  A
bump train has l1 = +inf but finite windowed norms, which is exactly the
class separation the wider theory addresses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

CATALOG_KINDS = ("zero", "constant_box", "exponential", "sech2", "bump_train")
TAIL_MASS = 1e-12  # neglected |q| mass beyond x_max for decaying kinds
BUMP_HORIZON = 24.0  # oracle start horizon for the (non-decaying) bump train
_JUMP_TOL = 1e-9  # detection window for grid-aligned jump midpoints


class PotentialError(ValueError):
    """Invalid potential parameters or sample data."""


@dataclass(frozen=True, eq=False)
class _SampledData:
    """Piecewise-linear interpolant with exact signed and |.| integrals."""

    xs: np.ndarray
    qs: np.ndarray
    # augmented knot set for |q| (adds zero crossings)
    axs: np.ndarray = field(init=False)
    aqs: np.ndarray = field(init=False)
    prefix: np.ndarray = field(init=False)
    prefix_abs: np.ndarray = field(init=False)

    def __post_init__(self):
        xs, qs = self.xs, self.qs
        cross_x = []
        for k in range(len(xs) - 1):
            a, b = qs[k], qs[k + 1]
            if a * b < 0:
                cross_x.append(xs[k] + a / (a - b) * (xs[k + 1] - xs[k]))
        axs = np.unique(np.concatenate([xs, np.asarray(cross_x)]))
        aqs = np.interp(axs, xs, qs)
        cell = 0.5 * (qs[1:] + qs[:-1]) * np.diff(xs)
        acell = 0.5 * (np.abs(aqs[1:]) + np.abs(aqs[:-1])) * np.diff(axs)
        object.__setattr__(self, "axs", axs)
        object.__setattr__(self, "aqs", aqs)
        object.__setattr__(self, "prefix", np.concatenate([[0.0], np.cumsum(cell)]))
        object.__setattr__(self, "prefix_abs", np.concatenate([[0.0], np.cumsum(acell)]))

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self.xs, self.qs)
        return np.where((x < self.xs[0]) | (x > self.xs[-1]), 0.0, out)

    def cumulative(self, y):
        """Exact int_0^y of the interpolant (constant beyond the data)."""
        y = np.clip(np.asarray(y, dtype=float), self.xs[0], self.xs[-1])
        k = np.clip(np.searchsorted(self.xs, y, side="right") - 1, 0, len(self.xs) - 2)
        qy = np.interp(y, self.xs, self.qs)
        part = 0.5 * (self.qs[k] + qy) * (y - self.xs[k])
        return self.prefix[k] + part

    def cumulative_abs(self, y):
        """Exact int_0^y |.| of the interpolant, splitting at sign changes."""
        y = np.clip(np.asarray(y, dtype=float), self.axs[0], self.axs[-1])
        k = np.clip(np.searchsorted(self.axs, y, side="right") - 1, 0, len(self.axs) - 2)
        qk, xk = self.aqs[k], self.axs[k]
        qy = np.interp(y, self.xs, self.qs)
        crossing = qk * qy < 0
        with np.errstate(divide="ignore", invalid="ignore"):
            xstar = np.where(crossing, xk + qk / (qk - qy) * (y - xk), xk)
        part = np.where(
            crossing,
            0.5 * (np.abs(qk) * (xstar - xk) + np.abs(qy) * (y - xstar)),
            0.5 * (np.abs(qk) + np.abs(qy)) * (y - xk),
        )
        return self.prefix_abs[k] + part


@dataclass(frozen=True, eq=False)
class Potential:
    """A real potential on [0, inf) with exact interval integrals.

    ``x_max`` is the truncation point: for decaying kinds the |q| mass beyond
    it is below TAIL_MASS (exactly zero for compactly supported kinds), and
    ODE oracles may start their backward integration there.  The bump train
    never decays; its x_max is a documented horizon and its l1 norm reports
    as +inf.
    """

    kind: str
    params: tuple[float, ...]
    x_max: float
    _data: _SampledData | None = None

    # -- pointwise evaluation -------------------------------------------------
    def __call__(self, x):
        scalar = np.isscalar(x)
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            out = np.zeros_like(x)
        elif self.kind == "constant_box":
            c, L = self.params
            out = np.where(
                np.abs(x - L) < _JUMP_TOL,
                0.5 * c,
                np.where((x >= 0) & (x < L), c, 0.0),
            )
        elif self.kind == "exponential":
            c, a = self.params
            out = np.where(x >= 0, c * np.exp(-a * np.maximum(x, 0.0)), 0.0)
        elif self.kind == "sech2":
            k0, x0 = self.params
            out = np.where(x >= 0, -2.0 * k0**2 / np.cosh(k0 * (x - x0)) ** 2, 0.0)
        elif self.kind == "bump_train":
            c, d = self.params
            fr = x - np.floor(x)
            val = np.where(fr < d, c, 0.0)
            if d < 1.0:
                # midpoint value on the two jump lines of each period
                val = np.where(np.abs(fr - d) < _JUMP_TOL, 0.5 * c, val)
                val = np.where((fr < _JUMP_TOL) & (x > _JUMP_TOL), 0.5 * c, val)
                val = np.where(np.abs(x) < _JUMP_TOL, c, val)
            out = np.where(x >= 0, val, 0.0)
        elif self.kind == "sampled":
            out = self._data.eval(x)
        else:  # pragma: no cover
            raise PotentialError(f"unknown kind {self.kind!r}")
        return float(out) if scalar else out

    # spec surface name
    eval = __call__

    # -- exact integrals ------------------------------------------------------
    def _cumulative(self, y):
        y = np.maximum(np.asarray(y, dtype=float), 0.0)
        if self.kind == "zero":
            return np.zeros_like(y)
        if self.kind == "constant_box":
            c, L = self.params
            return c * np.clip(y, 0.0, L)
        if self.kind == "exponential":
            c, a = self.params
            return (c / a) * (1.0 - np.exp(-a * y))
        if self.kind == "sech2":
            k0, x0 = self.params
            return -2.0 * k0 * (np.tanh(k0 * (y - x0)) + np.tanh(k0 * x0))
        if self.kind == "bump_train":
            c, d = self.params
            n = np.floor(y)
            return c * (n * d + np.minimum(y - n, d))
        return self._data.cumulative(y)

    def _cumulative_abs(self, y):
        if self.kind == "sampled":
            return self._data.cumulative_abs(np.maximum(np.asarray(y, float), 0.0))
        # every catalog kind is single-signed, so |int| = int |.|
        return np.abs(self._cumulative(y))

    def integral(self, a, b):
        """Exact signed integral of q over [a, b] (intersected with x >= 0)."""
        return self._cumulative(b) - self._cumulative(a)

    def integral_abs(self, a, b):
        """Exact integral of |q| over [a, b]."""
        return self._cumulative_abs(b) - self._cumulative_abs(a)

    def abs_tail(self) -> float:
        """|q| mass beyond x_max (closed form; +inf for the bump train)."""
        if self.kind == "exponential":
            c, a = self.params
            return abs(c) / a * math.exp(-a * self.x_max)
        if self.kind == "sech2":
            k0, x0 = self.params
            return 2.0 * k0 * (1.0 - math.tanh(k0 * (self.x_max - x0)))
        if self.kind == "bump_train":
            return math.inf
        return 0.0

    def breakpoints(self, lo: float, hi: float) -> np.ndarray:
        """Discontinuity/kink abscissae in (lo, hi), for piecewise integrators."""
        if self.kind == "constant_box":
            pts = np.array([self.params[1]])
        elif self.kind == "bump_train":
            c, d = self.params
            n = np.arange(math.floor(lo), math.ceil(hi) + 1, dtype=float)
            pts = np.concatenate([n, n + d]) if d < 1.0 else n
        elif self.kind == "sampled":
            pts = self._data.xs
        else:
            pts = np.empty(0)
        return np.sort(pts[(pts > lo) & (pts < hi)])


@dataclass(frozen=True)
class PotentialNorms:
    """l1 may be math.inf; the windowed norms are always finite here."""

    l1: float
    windowed: float
    windowed_scaled: float


def make_catalog_potential(kind: str, params) -> Potential:
    """Build one of the analytic catalog potentials.

    Kinds and parameters:
        zero                  []
        constant_box          [c, L]        q = c on [0, L)
        exponential           [c, a]        q = c exp(-a x), a > 0
        sech2                 [k0, x0]      q = -2 k0^2 sech^2(k0 (x - x0))
        bump_train            [c, d]        q = c on [n, n+d), period 1

    The truncation point x_max is chosen so the neglected |q| tail is below
    1e-12 (exact for compactly supported kinds); the bump train gets a fixed
    horizon instead since its mass never decays.
    """
    params = tuple(float(p) for p in params)
    if kind == "zero":
        if params:
            raise PotentialError("zero potential takes no parameters")
        return Potential("zero", (), 1.0)
    if kind == "constant_box":
        if len(params) != 2 or params[1] <= 0:
            raise PotentialError("constant_box needs [c, L] with L > 0")
        return Potential("constant_box", params, params[1])
    if kind == "exponential":
        if len(params) != 2 or params[1] <= 0:
            raise PotentialError("exponential needs [c, a] with a > 0")
        c, a = params
        x_max = 1.0 if c == 0 else math.log(2.0 * abs(c) / (a * TAIL_MASS)) / a
        return Potential("exponential", params, max(x_max, 1.0))
    if kind == "sech2":
        if len(params) != 2 or params[0] <= 0:
            raise PotentialError("sech2 needs [k0, x0] with k0 > 0")
        k0, x0 = params
        x_max = x0 + math.log(8.0 * k0 / TAIL_MASS) / (2.0 * k0)
        return Potential("sech2", params, x_max)
    if kind == "bump_train":
        if len(params) != 2 or not 0 < params[1] <= 1:
            raise PotentialError("bump_train needs [c, d] with 0 < d <= 1")
        return Potential("bump_train", params, BUMP_HORIZON)
    raise PotentialError(f"unknown catalog kind {kind!r}")


def load_sampled_potential(rows) -> Potential:
    """Piecewise-linear potential from (x, q) pairs; x strictly increasing from 0."""
    arr = np.atleast_2d(np.asarray(rows, dtype=float))
    if arr.size == 0:
        raise PotentialError("empty sample table")
    if arr.shape[1] != 2:
        raise PotentialError("expected two columns (x, q)")
    xs, qs = arr[:, 0].copy(), arr[:, 1].copy()
    if len(xs) < 2:
        raise PotentialError("need at least two samples")
    if xs[0] != 0.0:
        raise PotentialError("abscissae must start at 0")
    if np.any(np.diff(xs) <= 0):
        raise PotentialError("abscissae must be strictly increasing")
    data = _SampledData(xs, qs)
    return Potential("sampled", (), float(xs[-1]), data)


def read_potential_file(path) -> Potential:
    """Read a two-column whitespace text file ('#' comments) into a potential."""
    try:
        arr = np.loadtxt(path, comments="#", ndmin=2)
    except OSError as exc:
        raise PotentialError(f"cannot read potential file: {exc}") from exc
    except ValueError as exc:
        raise PotentialError(f"malformed potential file: {exc}") from exc
    return load_sampled_potential(arr)


def _windowed_sup_sampled(data: _SampledData) -> float:
    """Exact sup over window position of int_x^{x+1}|q| for PL data.

    The window mass M(x) is piecewise quadratic in x; its derivative
    |q|(x+1) - |q|(x) is piecewise linear with breakpoints where either
    window edge hits a knot of |q|, so the sup is attained at a breakpoint
    or at an interior root of the derivative.
    """
    knots = data.axs
    cand = np.unique(np.concatenate([knots, knots - 1.0]))
    cand = cand[(cand >= 0.0) & (cand <= knots[-1])]
    cand = np.concatenate([cand, [0.0]])
    g = np.abs(data.eval(cand + 1.0)) - np.abs(data.eval(cand))
    roots = []
    for i in range(len(cand) - 1):
        if g[i] * g[i + 1] < 0:
            roots.append(cand[i] - g[i] * (cand[i + 1] - cand[i]) / (g[i + 1] - g[i]))
    pos = np.concatenate([cand, np.asarray(roots)])
    mass = data.cumulative_abs(pos + 1.0) - data.cumulative_abs(pos)
    return float(np.max(mass))


def compute_norms(p: Potential, window_grid_step: float = 1e-3) -> PotentialNorms:
    """L1 and windowed norms of a potential.

    The sliding-window sup is taken by a sweep at step window_grid_step / 4
    with exact per-window integrals (the window mass is continuous in the
    window position, so the sweep bounds the sup from below within
    O(step^2) of the local curvature); sampled potentials get the exact
    piecewise-linear maximization instead.
    """
    if window_grid_step <= 0:
        raise PotentialError("window_grid_step must be positive")
    l1 = float(p.integral_abs(0.0, p.x_max)) + p.abs_tail()

    if p.kind == "sampled":
        windowed = _windowed_sup_sampled(p._data)
        scaled_data = _SampledData(2.0 * p._data.xs, p._data.qs)
        windowed_scaled = _windowed_sup_sampled(scaled_data)
    else:
        step = window_grid_step / 4.0
        xs = np.arange(0.0, p.x_max + step, step)
        windowed = float(np.max(p.integral_abs(xs, xs + 1.0))) if xs.size else 0.0
        gs = np.arange(0.0, 2.0 * p.x_max + step, step)
        windowed_scaled = float(np.max(2.0 * p.integral_abs(gs / 2.0, (gs + 1.0) / 2.0)))
    return PotentialNorms(l1=l1, windowed=windowed, windowed_scaled=windowed_scaled)
