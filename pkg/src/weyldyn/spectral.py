"""Spectral side: Weyl solution samples, m-function routes, convergence regions.

The transform of the fundamental wave solution

    u_hat(x,k) = e^{ikx} + int_x^inf w(x,t) e^{ikt} dt,      Im k > 0,

is the Weyl solution of -u'' + q u = k^2 u once Im k clears a
potential-class threshold, and then

    m(k^2) = u_hat_x(0,k) / u_hat(0,k).

Three numerical routes to m are kept deliberately distinct:

  * weyl_def       m from u_hat, with the free part e^{ikx} differentiated
                   analytically and the kernel part through the shared
                   one-sided boundary-slope extraction;
  * response_rep   m(-kappa^2) = -kappa + int_0^T r(a) e^{-kappa a} da;
  * amplitude_rep  m(-kappa^2) = -kappa - int_0^{T/2} A(a) e^{-2 a kappa} da,
                   A(a) = -2 r(2a).

On the negative real axis (k = i kappa) the first two are the same integral
under a change of variables and the third is an exact half-step
substitution, so with a shared kernel they agree to rounding; their real
validation is the independent ODE oracle.

Variable convention: k is the wavenumber (Im k > 0, z = k^2) for the weyl
route; kappa > 0 is the Laplace variable (z = -kappa^2, k = i kappa) for
the response/amplitude routes.  Converters are provided rather than reusing
one symbol for both, since the transform side mixes e^{ikt} and e^{-kt}
conventions and silent sign errors are the classic failure here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernel import DomainError, KernelField, eval_w
from .potentials import PotentialNorms
from .quadrature import trapezoid_sum
from .wave import ResponseFunction, boundary_slope_at_nodes


class RegionError(ValueError):
    """Spectral parameter outside the guaranteed convergence region."""


class TruncationError(RuntimeError):
    """Reported truncation tail exceeds the requested tolerance."""


def kappa_to_k(kappa: float) -> complex:
    """Laplace variable kappa > 0 -> wavenumber k = i*kappa (z = -kappa^2)."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    return 1j * float(kappa)


def k_from_z(z: complex) -> complex:
    """Principal square root with Im k > 0 for Im z > 0."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("need Im z > 0")
    return complex(np.sqrt(z))


@dataclass(frozen=True)
class SpectralPoint:
    """Wavenumber k with Im k > 0; the spectral parameter is z = k^2."""

    k: complex

    def __post_init__(self):
        if complex(self.k).imag <= 0:
            raise ValueError("spectral point needs Im k > 0")

    @property
    def z(self) -> complex:
        return complex(self.k) ** 2


@dataclass(frozen=True)
class MValue:
    z: complex
    m: complex
    route: str


@dataclass(frozen=True)
class ConvergenceRegion:
    """Im k thresholds for the transform representation, by potential class.

    ``l1_threshold`` = ||q||_L1 / 4 (+inf when the L1 norm is infinite).
    ``windowed_threshold`` is the conservative max of the candidate
    windowed-class constants: e*||q~||/2 and kappa*||q~||/2 at the smallest
    admissible kappa (which evaluates to sqrt(||q~||/2) up to the margin).
    The published constant sqrt(||q~||/2) and the rate sqrt(2*||q~||) that
    the first kernel-bound term actually needs for an integrable tail do not
    coincide; ``threshold_discrepancy`` is set when the region constant does
    not by itself certify that tail, and the rigorous tail bounds downstream
    handle it by reporting +inf instead of a spurious number.
    """

    norms: PotentialNorms
    l1_threshold: float
    e_branch: float
    sqrt_branch: float
    kappa_branch: float
    windowed_threshold: float
    tail_rate_threshold: float
    threshold_discrepancy: bool
    margin: float

    @property
    def threshold(self) -> float:
        """Smallest Im k admitted by either class route."""
        return min(self.l1_threshold, self.windowed_threshold)


def convergence_region(norms: PotentialNorms, margin: float = 1e-6) -> ConvergenceRegion:
    """Thresholds on Im k above which the transform yields the Weyl solution."""
    l1_thr = math.inf if math.isinf(norms.l1) else norms.l1 / 4.0
    qn = norms.windowed_scaled
    if qn < 0:
        raise ValueError("windowed_scaled must be >= 0")
    if qn == 0.0:
        e_b = sqrt_b = kappa_b = win = rate = 0.0
    else:
        e_b = math.e * qn / 2.0
        sqrt_b = math.sqrt(qn / 2.0)
        kappa_b = (1.0 + margin) * sqrt_b  # kappa* * qn/2 at kappa* = sqrt(2/qn)(1+margin)
        win = max(e_b, kappa_b)
        rate = math.sqrt(2.0 * qn)
    return ConvergenceRegion(
        norms=norms,
        l1_threshold=l1_thr,
        e_branch=e_b,
        sqrt_branch=sqrt_b,
        kappa_branch=kappa_b,
        windowed_threshold=win,
        tail_rate_threshold=rate,
        threshold_discrepancy=bool(qn > 0 and win < rate),
        margin=margin,
    )


def tail_bound_l1(norms: PotentialNorms, b: float, x: float, T: float) -> float:
    """Rigorous tail int_T^inf |w| e^{-b t} dt from the L1 kernel bound."""
    l1 = norms.l1
    if math.isinf(l1):
        return math.inf
    if l1 == 0.0:
        return 0.0
    rate = b - l1 / 4.0
    if rate <= 0:
        return math.inf
    return 0.5 * l1 * math.exp(-(l1 / 4.0) * x) * math.exp(-rate * T) / rate


def tail_bound_window(norms: PotentialNorms, b: float, x: float, T: float) -> float:
    """Rigorous tail from the windowed-class kernel bound, kappa at the rate optimum."""
    qn = norms.windowed_scaled
    if qn == 0.0:
        return 0.0
    lam2 = b - math.e * qn / 2.0
    if lam2 <= 0:
        return math.inf
    kappa = math.sqrt(2.0 / qn)
    lam1 = b - (kappa * qn / 2.0 + 1.0 / kappa)
    if lam1 <= 0:
        return math.inf
    t1 = (
        (qn / 4.0)
        * math.exp(-x * kappa * qn / 2.0 + x / kappa)
        * math.exp(-lam1 * T)
        * ((x + T) / lam1 + 1.0 / lam1**2)
    )
    t2 = (
        (qn * math.e / (4.0 * math.sqrt(2.0 * math.pi)))
        * math.exp(-x * math.e * qn / 2.0)
        * math.exp(-lam2 * T)
        / lam2
    )
    return t1 + t2


def truncation_tail(norms: PotentialNorms, b: float, x: float, T: float) -> float:
    """Best available rigorous tail bound (may be +inf near the threshold)."""
    return min(tail_bound_l1(norms, b, x, T), tail_bound_window(norms, b, x, T))


@dataclass(frozen=True, eq=False)
class WeylSample:
    """u_hat on an x grid at one wavenumber, plus the boundary-slope data.

    ``slope`` holds w_x(0, t) on the t grid [0, T_trunc] (step ``slope_step``),
    extracted exactly once and shared with the response route, so the two m
    evaluations coincide on the negative real axis.
    """

    x_grid: np.ndarray
    values: np.ndarray
    k: complex
    tail_bound: float
    slope: np.ndarray
    slope_step: float
    T_trunc: float


def weyl_solution(
    fld: KernelField,
    k: complex | SpectralPoint,
    x_grid,
    T_trunc: float,
    region: ConvergenceRegion | None = None,
    tail_tol: float | None = None,
) -> WeylSample:
    """Sample u_hat(x,k) = e^{ikx} + int_x^T w(x,t) e^{ikt} dt by trapezoid.

    The x grid is augmented with {0, h, 2h} (the m-function stencil)
    when missing.  If a convergence region is supplied, Im k must be
    strictly above its threshold; if tail_tol is given, the reported
    rigorous truncation tail must not exceed it.
    """
    k = k.k if isinstance(k, SpectralPoint) else complex(k)
    b = k.imag
    if b <= 0:
        raise RegionError("need Im k > 0")
    if region is not None and b <= region.threshold:
        raise RegionError(
            f"Im k = {b:g} is not above the class threshold {region.threshold:g}"
        )
    grid = fld.grid
    h = grid.h
    x_req = np.asarray(x_grid, dtype=float).ravel()
    if np.any(x_req < 0):
        raise DomainError("x must be >= 0")
    xs = np.unique(np.concatenate([[0.0, h, 2.0 * h], x_req]))
    n_t = int(round(T_trunc / h))
    if abs(n_t * h - T_trunc) > 1e-9:
        raise DomainError(f"T_trunc={T_trunc:g} must sit on the kernel grid")
    if xs.max() + T_trunc > grid.eta_max + 1e-9 or T_trunc + 2 * h > grid.eta_max + 1e-9:
        raise DomainError("kernel triangle too small: need x + T_trunc <= eta_max")

    vals = np.empty(len(xs), dtype=complex)
    for i, x in enumerate(xs):
        L = int(math.floor((T_trunc - x) / h + 1e-9))
        t_row = x + np.arange(L + 1) * h
        w_row = eval_w(fld, x, t_row)
        integ = trapezoid_sum(w_row * np.exp(1j * k * t_row), h)
        rho = T_trunc - (x + L * h)
        if rho > 1e-9:
            w_end = eval_w(fld, x, T_trunc)
            integ = integ + 0.5 * rho * (
                w_row[-1] * np.exp(1j * k * t_row[-1]) + w_end * np.exp(1j * k * T_trunc)
            )
        vals[i] = np.exp(1j * k * x) + integ

    slope = boundary_slope_at_nodes(fld, np.arange(n_t + 1))
    tail = truncation_tail(region.norms, b, float(xs.min()), T_trunc) if region else math.nan
    if tail_tol is not None and not (tail <= tail_tol):
        raise TruncationError(f"tail bound {tail:g} exceeds tolerance {tail_tol:g}")
    return WeylSample(
        x_grid=xs, values=vals, k=k, tail_bound=tail,
        slope=slope, slope_step=h, T_trunc=n_t * h,
    )


def m_from_weyl(sample: WeylSample, h: float | None = None) -> MValue:
    """m(k^2) = u_hat_x(0,k) / u_hat(0,k).

    The derivative splits over the representation: the free part e^{ikx}
    contributes ik exactly, the kernel part contributes the transform of the
    one-sided boundary slope (step h, stored on the sample), assembled before
    the t-integration so nothing is differenced across the oscillation.
    """
    if h is not None and abs(h - sample.slope_step) > 1e-12:
        raise ValueError(
            f"stencil step {h:g} differs from the sample's extraction step "
            f"{sample.slope_step:g}"
        )
    h = sample.slope_step
    idx0 = np.flatnonzero(sample.x_grid == 0.0)
    if len(idx0) != 1:
        raise ValueError("sample must include x = 0")
    k = sample.k
    t = np.arange(len(sample.slope)) * h
    num = 1j * k + trapezoid_sum(sample.slope * np.exp(1j * k * t), h)
    m = num / sample.values[idx0[0]]
    return MValue(z=k * k, m=complex(m), route="weyl_def")


def m_from_response(
    r: ResponseFunction,
    kappa: float,
    region: ConvergenceRegion | None = None,
    tail_tol: float | None = None,
) -> MValue:
    """m(-kappa^2) = -kappa + int_0^{T_r} r(a) e^{-kappa a} da (trapezoid).

    The truncation check, when requested, uses an empirical tail estimate
    |r| over the last unit window times e^{-kappa T}/kappa: the kernel
    bounds of the theory control w, not its boundary slope, so no rigorous
    slope tail is available.
    """
    kappa = float(kappa)
    if kappa <= 0:
        raise RegionError("need kappa > 0")
    if region is not None and kappa <= region.threshold:
        raise RegionError(
            f"kappa = {kappa:g} is not above the class threshold {region.threshold:g}"
        )
    if tail_tol is not None:
        nwin = max(2, int(round(1.0 / r.h_t)))
        r_end = float(np.abs(r.samples[-nwin:]).max())
        tail_est = r_end * math.exp(-kappa * r.T) / kappa
        if tail_est > tail_tol:
            raise TruncationError(
                f"estimated response tail {tail_est:g} exceeds tolerance {tail_tol:g}"
            )
    t = np.arange(len(r.samples)) * r.h_t
    m = -kappa + trapezoid_sum(r.samples * np.exp(-kappa * t), r.h_t)
    return MValue(z=complex(-kappa * kappa), m=complex(m), route="response_rep")


@dataclass(frozen=True, eq=False)
class Amplitude:
    """A(alpha) = -2 r(2 alpha) on the half-step grid over [0, T_r/2]."""

    samples: np.ndarray
    h_alpha: float


def a_amplitude(r: ResponseFunction) -> Amplitude:
    """Resample the response function into the amplitude normalization.

    The alpha grid is the response grid halved, so 2*alpha_i lands exactly on
    response nodes and the lookup is exact (linear interpolation degenerates).
    """
    return Amplitude(samples=-2.0 * r.samples, h_alpha=r.h_t / 2.0)


def m_from_amplitude(
    amp: Amplitude,
    kappa: float,
    region: ConvergenceRegion | None = None,
) -> MValue:
    """m(-kappa^2) = -kappa - int_0^{T/2} A(a) e^{-2 a kappa} da (trapezoid)."""
    kappa = float(kappa)
    if kappa <= 0:
        raise RegionError("need kappa > 0")
    if region is not None and kappa <= region.threshold:
        raise RegionError(
            f"kappa = {kappa:g} is not above the class threshold {region.threshold:g}"
        )
    alpha = np.arange(len(amp.samples)) * amp.h_alpha
    m = -kappa - trapezoid_sum(amp.samples * np.exp(-2.0 * kappa * alpha), amp.h_alpha)
    return MValue(z=complex(-kappa * kappa), m=complex(m), route="amplitude_rep")


def l2_window_increments(sample: WeylSample, width: float = 1.0) -> np.ndarray:
    """Trapezoid integrals of |u_hat|^2 over consecutive windows of the x grid.

    A numerical proxy for square-integrability: the increments of a Cauchy
    tail must decay geometrically.  The sample's x grid must be uniform.
    """
    xs = sample.x_grid
    dx = np.diff(xs)
    if len(xs) < 2 or np.any(np.abs(dx - dx[0]) > 1e-9):
        raise ValueError("need a uniform x grid")
    step = float(dx[0])
    per = int(round(width / step))
    if per < 1 or abs(per * step - width) > 1e-9:
        raise ValueError("window width must be a multiple of the x step")
    dens = np.abs(sample.values) ** 2
    out = []
    start = 0
    while start + per < len(xs):
        out.append(trapezoid_sum(dens[start : start + per + 1], step))
        start += per
    return np.asarray(out)


def dump_mvalues_csv(values, path) -> None:
    """CSV rows (Re z, Im z, Re m, Im m, route)."""
    with open(path, "w") as fh:
        fh.write("re_z,im_z,re_m,im_m,route\n")
        for mv in values:
            fh.write(
                f"{mv.z.real:.17g},{mv.z.imag:.17g},{mv.m.real:.17g},{mv.m.imag:.17g},{mv.route}\n"
            )


def dump_weyl_csv(sample: WeylSample, path) -> None:
    """CSV rows (x, Re u, Im u)."""
    with open(path, "w") as fh:
        fh.write("x,re_u,im_u\n")
        for x, u in zip(sample.x_grid, sample.values):
            fh.write(f"{x:.17g},{u.real:.17g},{u.imag:.17g}\n")
