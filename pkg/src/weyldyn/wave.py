"""Wave side of the pipeline: u^f, the response function r, the operator R^T.

The wave solution driven by a Dirichlet boundary control f is the
convolution representation

    u^f(x,t) = f(t-x) + int_x^t w(x,s) f(t-s) ds     (x <= t, else 0)

with w the Goursat kernel from :mod:`weyldyn.kernel`.  Differentiating at
x = 0 (where w(0,.) = 0) identifies the boundary derivative map

    (R f)(t) = -f'(t) + int_0^t r(s) f(t-s) ds,      r(s) = w_x(0,s),

whose convolution kernel r is the response function.  r is extracted from
the computed kernel by a second-order one-sided difference in x that uses
the exact boundary value w(0,s) = 0:

    r(s) ~ (4 w(h,s) - w(2h,s)) / (2h).

For s < 2h the stencil would cross the diagonal t = x, where w stops being
defined; there the mean slope of the diagonal data, w(h,h)/h, is used
instead (it converges to the exact limit r(0+) = -q(0)/2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernel import DomainError, KernelField, eval_w


class ControlError(ValueError):
    """Boundary control violates its sampling or smoothness contract."""


@dataclass(frozen=True, eq=False)
class BoundaryControl:
    """Dirichlet data f on a uniform grid over [0, T], step h_t.

    ``smooth`` declares membership in the response-operator domain
    {f in C^2 : f(0) = f'(0) = 0}; the constructor cross-checks the
    compatibility conditions discretely.
    """

    samples: np.ndarray
    h_t: float
    smooth: bool = False

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", s)
        if s.ndim != 1 or len(s) < 3:
            raise ControlError("need at least three samples")
        if self.h_t <= 0:
            raise ControlError("h_t must be positive")
        scale = max(1.0, float(np.abs(s).max()))
        if abs(s[0]) > 1e-12 * scale:
            raise ControlError("boundary control must vanish at t = 0")
        if self.smooth:
            # one-sided second-order estimate of f'(0), which must be O(h_t)
            d0 = (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * self.h_t)
            curv = float(np.abs(np.diff(s, 2)).max()) / self.h_t**2 if len(s) > 2 else 0.0
            if abs(d0) > 10.0 * self.h_t * (1.0 + curv):
                raise ControlError(
                    f"control marked smooth but f'(0) ~ {d0:.3g} is not O(h_t)"
                )
        s.flags.writeable = False

    @classmethod
    def from_function(cls, fn, T: float, h_t: float, smooth: bool = False) -> "BoundaryControl":
        n = int(round(T / h_t))
        grid = np.arange(n + 1) * h_t
        return cls(np.asarray(fn(grid), dtype=float), h_t, smooth)

    @property
    def T(self) -> float:
        return (len(self.samples) - 1) * self.h_t


@dataclass(frozen=True, eq=False)
class ResponseFunction:
    """Samples of r(t) on a uniform grid over [0, T_r]."""

    samples: np.ndarray
    h_t: float

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", s)
        s.flags.writeable = False

    @property
    def T(self) -> float:
        return (len(self.samples) - 1) * self.h_t


@dataclass(frozen=True, eq=False)
class WaveField:
    """u values on the tensor grid x_grid x t_grid; u[i, j] = u(x_i, t_j)."""

    x: np.ndarray
    t: np.ndarray
    u: np.ndarray


def boundary_slope_at_nodes(fld: KernelField, js: np.ndarray) -> np.ndarray:
    """w_x(0, s) at grid times s = j*h by the one-sided stencil, exact node reads.

    This is the single extraction point shared by the response function and
    the spectral route, so identities between the two hold to the bit.
    """
    grid = fld.grid
    h, n = grid.h, grid.n
    js = np.asarray(js, dtype=int)
    if n < 2:
        raise DomainError("triangle too small for the x-derivative stencil")
    if np.any(js + 2 > n):
        raise DomainError(
            f"slope at s = {js.max() * h:g} needs t + 2h <= eta_max = {grid.eta_max:g}"
        )
    near = fld.v[0, 2] / h  # mean slope of the diagonal data on [0, h]
    jc = np.maximum(js, 2)
    r = (4.0 * fld.v[jc - 1, jc + 1] - fld.v[jc - 2, jc + 2]) / (2.0 * h)
    return np.where(js < 2, near, r)


def response_function(fld: KernelField, T_r: float, h_t: float | None = None) -> ResponseFunction:
    """Extract r(s) = w_x(0,s) on [0, T_r] from a computed kernel field.

    h_t defaults to the kernel step and must be an integer multiple of it;
    T_r + 2h must fit inside the triangle.
    """
    h = fld.grid.h
    if h_t is None:
        h_t = h
    ratio = h_t / h
    if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
        raise DomainError(f"h_t={h_t:g} must be a positive multiple of the kernel step {h:g}")
    stride = int(round(ratio))
    n_t = int(round(T_r / h_t))
    if abs(n_t * h_t - T_r) > 1e-9:
        raise DomainError(f"T_r={T_r:g} must sit on the h_t grid")
    js = np.arange(n_t + 1) * stride
    return ResponseFunction(boundary_slope_at_nodes(fld, js), h_t)


def _on_grid(values, step: float) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    idx = v / step
    if np.any(np.abs(idx - np.round(idx)) > 1e-9):
        raise ControlError(f"grid values must be multiples of the control step {step:g}")
    return np.round(idx).astype(int)


def solve_wave(
    f: BoundaryControl, fld: KernelField, x_grid, t_grid
) -> WaveField:
    """Evaluate u^f on x_grid x t_grid from the convolution representation.

    Requested points must satisfy t + x <= eta_max of the kernel and lie on
    the control's time grid (both x and t), so that f(t-x) and the trapezoid
    s-integral need no resampling.  u(x,t) = 0 for x > t exactly.
    """
    h = f.h_t
    xi_idx = _on_grid(x_grid, h)
    tj_idx = _on_grid(t_grid, h)
    x_arr = xi_idx * h
    t_arr = tj_idx * h
    jmax = int(tj_idx.max())
    if jmax * h > f.T + 1e-12:
        raise ControlError("control not defined up to max t")
    if (x_arr.max() + t_arr.max()) > fld.grid.eta_max + 1e-9:
        raise DomainError("kernel triangle too small for the requested (x, t) range")

    fs = f.samples[: jmax + 1]
    u = np.zeros((len(xi_idx), len(tj_idx)))
    for row, a in enumerate(xi_idx):
        if a > jmax:
            continue
        m = np.arange(a, jmax + 1)
        w_row = np.zeros(jmax + 1)
        w_row[a:] = eval_w(fld, a * h, m * h)
        conv = np.convolve(w_row, fs)[: jmax + 1]
        j = tj_idx
        valid = j >= a
        jv = np.where(valid, j, a)
        integral = h * (conv[jv] - 0.5 * w_row[a] * fs[jv - a] - 0.5 * w_row[jv] * fs[0])
        u[row, :] = np.where(valid, fs[jv - a] + integral, 0.0)
    return WaveField(x=x_arr, t=t_arr, u=u)


def apply_response_operator(f: BoundaryControl, r: ResponseFunction) -> np.ndarray:
    """R^T f = -f' + r * f on the control's grid.

    f' is centered second-order (one-sided at the endpoints); the
    convolution is composite trapezoid.  Controls not declared smooth are
    rejected: the operator's domain is C^2 with f(0) = f'(0) = 0.
    """
    if not f.smooth:
        raise ControlError("response operator needs a smooth (C^2, compatible) control")
    if abs(r.h_t - f.h_t) > 1e-12:
        raise ControlError("response and control grids must share the time step")
    n = len(f.samples) - 1
    if r.T < n * f.h_t - 1e-12:
        raise ControlError("response function not available up to T")
    h = f.h_t
    fs = f.samples
    rs = r.samples[: n + 1]
    fprime = np.gradient(fs, h, edge_order=2)
    conv = np.convolve(rs, fs)[: n + 1]
    conv = h * (conv - 0.5 * rs[0] * fs - 0.5 * rs * fs[0])
    return -fprime + conv


def dump_wave_csv(wf: WaveField, path) -> None:
    """CSV rows (x, t, u), row-major over x then t."""
    with open(path, "w") as fh:
        fh.write("x,t,u\n")
        for i, xv in enumerate(wf.x):
            for j, tv in enumerate(wf.t):
                fh.write(f"{xv:.17g},{tv:.17g},{wf.u[i, j]:.17g}\n")


def dump_response_csv(r: ResponseFunction, path) -> None:
    """CSV rows (t, r)."""
    with open(path, "w") as fh:
        fh.write("t,r\n")
        for j, val in enumerate(r.samples):
            fh.write(f"{j * r.h_t:.17g},{val:.17g}\n")
