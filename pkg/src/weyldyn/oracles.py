"""Independent ground-truth solvers, kept free of the kernel machinery.

``ode_weyl_oracle`` integrates -u'' + q u = k^2 u backward from the decay
region, which makes the Weyl solution the locally growing direction and
therefore numerically dominant; forward integration or a Riccati equation
for m would be unstable (the Riccati flow has movable poles).  The state is
renormalized once per unit so the exponential growth of the co-solution
never overflows; the ratio m = u'(0)/u(0) is scale-free.

``fd_wave_oracle`` is an explicit leapfrog scheme at unit Courant number
(dx = dt), so the transport part of the update is exact along
characteristics and the only discretization error left is the q coupling.
Neither oracle touches the kernel module; shared code is limited to the
potential catalog.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import solve_ivp

from .potentials import Potential
from .spectral import MValue, SpectralPoint
from .wave import BoundaryControl, WaveField


class OracleBlowupError(RuntimeError):
    """Growth between renormalizations exceeded the safe dynamic range."""


class InstabilityError(RuntimeError):
    """FD field left the stable range (should not happen at unit Courant)."""


def ode_weyl_oracle(
    p: Potential,
    k: complex | SpectralPoint,
    x_start: float,
    x_grid,
    rtol: float = 1e-12,
    atol: float = 1e-14,
):
    """Weyl solution and m-function by adaptive backward integration.

    Starts at x_start >= p.x_max with the exact decaying free solution
    (u, u') proportional to (1, ik) e^{ik x_start} and integrates down to 0
    with RK45, splitting at the potential's discontinuities and at unit
    marks, renormalizing the state at each split.  Returns (u, m) where u is
    sampled on x_grid and normalized to u(0) = 1 and m = u'(0)/u(0).
    """
    k = k.k if isinstance(k, SpectralPoint) else complex(k)
    if k.imag <= 0:
        raise ValueError("need Im k > 0")
    if x_start < p.x_max - 1e-9:
        raise ValueError(f"x_start={x_start:g} must be >= the truncation point {p.x_max:g}")
    xg = np.asarray(x_grid, dtype=float).ravel()
    if np.any(xg < 0) or np.any(xg > x_start):
        raise ValueError("x_grid must lie in [0, x_start]")

    marks = np.arange(math.ceil(x_start))[1:]
    pts = np.unique(np.concatenate([[0.0, x_start], marks, p.breakpoints(0.0, x_start)]))
    pts = pts[::-1]  # descending: integrate toward 0

    k2 = k * k

    def rhs(x, y):
        return [y[1], (p(x) - k2) * y[0]]

    collected = np.zeros(len(xg), dtype=complex)
    done = np.zeros(len(xg), dtype=bool)
    at_start = xg == x_start

    y = np.array([1.0 + 0.0j, 1j * k])
    collected[at_start] = y[0]
    done |= at_start
    for a, b in zip(pts[:-1], pts[1:]):
        sol = solve_ivp(rhs, (a, b), y, method="RK45", rtol=rtol, atol=atol,
                        dense_output=True)
        if not sol.success:  # pragma: no cover
            raise OracleBlowupError(f"integration failed on [{b:g}, {a:g}]: {sol.message}")
        inside = (~done) & (xg < a) & (xg >= b)
        if np.any(inside):
            collected[inside] = sol.sol(xg[inside])[0]
            done |= inside
        y = sol.y[:, -1]
        scale = max(abs(y[0]), abs(y[1]))
        if scale > 1e12 or scale < 1e-12:
            raise OracleBlowupError(
                f"state magnitude {scale:.3e} left the renormalization window; "
                "x_start too large for this precision"
            )
        y = y / scale
        collected[done] /= scale

    m = y[1] / y[0]
    u = collected / y[0]
    return u, MValue(z=k2, m=complex(m), route="ode_oracle")


def fd_wave_oracle(p: Potential, f: BoundaryControl, T: float, h: float) -> WaveField:
    """Explicit leapfrog solution of the wave system, dx = dt = h.

    u(x, t+h) = u(x-h,t) + u(x+h,t) - u(x,t-h) - h^2 q(x) u(x,t), zero
    initial data, u(0,t) = f(t), on [0, T+2h] so the far edge cannot
    influence [0, T] within the simulated time (unit propagation speed).
    """
    if abs(f.h_t - h) > 1e-12:
        raise ValueError("control must be sampled at the scheme step h")
    nt = int(round(T / h))
    if nt * h > f.T + 1e-12:
        raise ValueError("control not defined up to T")
    nx = nt + 2
    x = np.arange(nx + 1) * h
    qg = np.asarray(p(x))
    fs = f.samples
    u = np.zeros((nx + 1, nt + 1))
    u[0, :] = fs[: nt + 1]
    # first step: zero initial displacement and velocity leave u(., h) = 0
    fmax = max(float(np.abs(fs).max()), 1e-30)
    for n in range(1, nt):
        u[1:-1, n + 1] = (
            u[:-2, n] + u[2:, n] - u[1:-1, n - 1] - h * h * qg[1:-1] * u[1:-1, n]
        )
    peak = float(np.abs(u).max())
    if peak > 1e6 * fmax:
        raise InstabilityError(f"field magnitude {peak:.3e} exceeds 1e6 * max|f|")
    return WaveField(x=x, t=np.arange(nt + 1) * h, u=u)
