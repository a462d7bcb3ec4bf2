"""Shared composite-trapezoid helpers.

Everything downstream (kernel iteration, time convolutions, Laplace/Fourier
integrals) uses the same second-order trapezoid rule so that discretization
error has a uniform h^2 story and identities between alternative evaluation
routes hold bitwise when the grids coincide.
"""

from __future__ import annotations

import numpy as np


def trapezoid_sum(y, dx: float):
    """Composite trapezoid of samples ``y`` on a uniform grid with step ``dx``.

    Accepts real or complex 1D arrays; for 2D input integrates along the last
    axis. The summation order is fixed (numpy pairwise sum), which keeps
    repeated evaluations byte-identical.
    """
    y = np.asarray(y)
    if y.shape[-1] < 2:
        return np.zeros(y.shape[:-1], dtype=y.dtype) if y.ndim > 1 else y.dtype.type(0)
    s = np.sum(y, axis=-1) - 0.5 * (y[..., 0] + y[..., -1])
    return dx * s


def cumulative_trapezoid(y, dx: float):
    """Running trapezoid integral of ``y`` along the last axis, starting at 0."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    out[..., 1:] = np.cumsum(0.5 * (y[..., 1:] + y[..., :-1]), axis=-1) * dx
    return out
