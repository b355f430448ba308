"""Least-squares extraction of fringe parameters from interferograms.

Three fixed models:
  fringe:  y = A*(1 - V*sinc((x-x0)/sx)*cos(2*pi*(x-x0)/lam + phi)) + B
  dip:     y = A*(1 - V*exp(-(x-x0)^2 / (2 s^2)))
  envelope: V(xi) = Vp*exp(-(xi-xi0)^2 / (2 s^2))

The constant offset B of the fringe model is held fixed (default 0):
A, B and V are not jointly identifiable (only A+B and A*V enter the
model), so a free offset must be supplied by the caller as a known
background level.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares
from scipy.signal import hilbert

from .core import C, FWHM_TO_SIGMA
from .interferometer import Interferogram, sinc

_FWHM = 1.0 / FWHM_TO_SIGMA  # 2*sqrt(2 ln 2)


class FitConvergenceError(RuntimeError):
    """Least-squares did not converge; carries the last iterate."""

    def __init__(self, message, last_params=None):
        super().__init__(message)
        self.last_params = last_params


class InsufficientDataError(ValueError):
    """Input does not span enough of the model to be fit."""


class NoPeriodError(ValueError):
    """No dominant spectral peak above the noise floor."""


@dataclass(frozen=True)
class FringeFit:
    visibility: float
    sigma_x: float
    period: float
    phase: float
    center: float
    amplitude: float
    offset: float
    residual_rms: float
    stderr: dict[str, float]
    n_points: int


@dataclass(frozen=True)
class DipFit:
    visibility: float
    fwhm: float
    center: float
    amplitude: float
    residual_rms: float
    stderr: dict[str, float]


@dataclass(frozen=True)
class EnvelopeFit:
    peak_visibility: float
    center: float
    fwhm: float
    stderr: dict[str, float]


@dataclass(frozen=True)
class EnvelopeResult:
    slice_coords: np.ndarray      # fixed-axis coordinate per slice (m)
    visibilities: np.ndarray
    centers: np.ndarray           # fitted fringe centers per slice (m)
    failed: tuple[int, ...]
    fit: EnvelopeFit


def _solve(residual, p0, n_data):
    res = least_squares(residual, p0, method="lm", xtol=1e-8,
                        ftol=1e-14, gtol=1e-14, max_nfev=200 * (len(p0) + 1))
    if not res.success:
        raise FitConvergenceError(f"fit did not converge: {res.message}",
                                  last_params=res.x)
    dof = max(n_data - len(p0), 1)
    s2 = 2.0 * res.cost / dof
    cov = np.linalg.pinv(res.jac.T @ res.jac) * s2
    stderr = np.sqrt(np.maximum(np.diag(cov), 0.0))
    rms = np.sqrt(2.0 * res.cost / n_data)
    return res.x, stderr, rms


def fringe_period(x: np.ndarray, y: np.ndarray) -> float:
    """Dominant period via windowed FFT peak with parabolic interpolation."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    dx = np.diff(x)
    if not np.allclose(dx, dx[0], rtol=1e-6, atol=0.0):
        raise ValueError("fringe_period requires uniform spacing")
    n = len(y)
    z = (y - y.mean()) * np.hanning(n)
    mag = np.abs(np.fft.rfft(z))
    if len(mag) < 4:
        raise NoPeriodError("too few points for a period estimate")
    k = int(np.argmax(mag[1:]) + 1)
    floor = np.median(mag[1:])
    if floor <= 0 or mag[k] < 5.0 * floor:
        raise NoPeriodError("no dominant spectral peak above the noise floor")
    if 1 <= k < len(mag) - 1:
        la, lb, lc = np.log(mag[k - 1] + 1e-300), np.log(mag[k]), np.log(mag[k + 1] + 1e-300)
        denom = la - 2.0 * lb + lc
        delta = 0.5 * (la - lc) / denom if denom != 0 else 0.0
        delta = float(np.clip(delta, -0.5, 0.5))
    else:
        delta = 0.0
    freq = (k + delta) / (n * dx[0])
    return float(1.0 / freq)


def _fringe_init(x, y, offset, lam0):
    yc = y - offset
    a0 = float(np.median(yc))
    if a0 <= 0:
        a0 = float(np.mean(yc)) or 1.0
    osc = yc - a0
    env = np.abs(hilbert(osc))
    # smooth the analytic envelope over ~one period
    w = max(3, min(len(x), int(round(lam0 / (x[1] - x[0])))))
    env_s = np.convolve(env, np.ones(w) / w, mode="same")
    i0 = int(np.argmax(env_s))
    x0 = float(x[i0])
    peak = float(env_s[i0])
    v0 = min(max(peak / a0, 1e-3), 1.0)
    # contrast-halving distance -> sinc width (sinc(1.895) = 1/2)
    above = env_s >= 0.5 * peak
    right = np.where(~above & (x > x0))[0]
    left = np.where(~above & (x < x0))[0]
    if len(right) and len(left):
        half_dist = 0.5 * (x[right[0]] - x[left[-1]])
    elif len(right):
        half_dist = x[right[0]] - x0
    elif len(left):
        half_dist = x0 - x[left[-1]]
    else:
        half_dist = 0.25 * (x[-1] - x[0])
    sx0 = max(half_dist / 1.895, lam0)
    phi0 = float(np.angle(-hilbert(osc)[i0]))
    return a0, v0, sx0, x0, phi0


def fit_fringe(x, y, period_guess: float | None = None,
               fixed_offset: float = 0.0) -> FringeFit:
    """Fit the sinc-envelope phase-sensitive fringe model to (x, y)."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if len(x) < 8:
        raise InsufficientDataError("fit_fringe needs at least 8 points")
    lam0 = fringe_period(x, y) if period_guess is None else period_guess
    if (x[-1] - x[0]) < 2.0 * lam0:
        raise InsufficientDataError("data span less than 2 fringe periods")
    a0, v0, sx0, x0, phi0 = _fringe_init(x, y, fixed_offset, lam0)

    def model(p, xx):
        a, v, sx, lam, xc, phi = p
        return a * (1.0 - v * sinc((xx - xc) / sx)
                    * np.cos(2.0 * np.pi * (xx - xc) / lam + phi)) + fixed_offset

    p0 = np.array([a0, v0, sx0, lam0, x0, phi0])
    popt, perr, rms = _solve(lambda p: model(p, x) - y, p0, len(x))
    a, v, sx, lam, xc, phi = popt
    if a < 0:
        a, v = -a, -v
    if v < 0:
        v, phi = -v, phi + np.pi
    phi = float(np.angle(np.exp(1j * phi)))
    names = ("amplitude", "visibility", "sigma_x", "period", "center", "phase")
    return FringeFit(visibility=float(v), sigma_x=float(abs(sx)), period=float(abs(lam)),
                     phase=phi, center=float(xc), amplitude=float(a),
                     offset=fixed_offset, residual_rms=float(rms),
                     stderr=dict(zip(names, map(float, perr))), n_points=len(x))


def fit_dip(x, y) -> DipFit:
    """Fit a Gaussian dip y = A*(1 - V*exp(-(x-x0)^2/2s^2))."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if len(x) < 8:
        raise InsufficientDataError("fit_dip needs at least 8 points")
    a0 = float(np.median(y))
    if a0 <= 0:
        a0 = float(np.max(y)) or 1.0
    i0 = int(np.argmin(y))
    x0 = float(x[i0])
    v0 = max((a0 - float(y[i0])) / a0, 1e-4)
    half_level = a0 - 0.5 * (a0 - y[i0])
    below = y < half_level
    idx = np.where(below)[0]
    if len(idx) >= 2:
        s0 = max((x[idx[-1]] - x[idx[0]]) / _FWHM, (x[1] - x[0]))
    else:
        s0 = 0.25 * (x[-1] - x[0])

    def model(p, xx):
        a, v, xc, s = p
        return a * (1.0 - v * np.exp(-0.5 * ((xx - xc) / s) ** 2))

    p0 = np.array([a0, v0, x0, s0])
    popt, perr, rms = _solve(lambda p: model(p, x) - y, p0, len(x))
    a, v, xc, s = popt
    names = ("amplitude", "visibility", "center", "fwhm")
    perr = perr.copy()
    perr[3] *= _FWHM
    return DipFit(visibility=float(v), fwhm=float(abs(s) * _FWHM), center=float(xc),
                  amplitude=float(a), residual_rms=float(rms),
                  stderr=dict(zip(names, map(float, perr))))


def _fit_gaussian_peak(xi, v):
    """Gaussian peak fit used for the visibility envelope."""
    i0 = int(np.argmax(v))
    p0 = np.array([float(v[i0]), float(xi[i0]), 0.25 * (xi[-1] - xi[0])])

    def model(p, xx):
        vp, xc, s = p
        return vp * np.exp(-0.5 * ((xx - xc) / s) ** 2)

    popt, perr, _ = _solve(lambda p: model(p, xi) - v, p0, len(xi))
    vp, xc, s = popt
    names = ("peak_visibility", "center", "fwhm")
    perr = perr.copy()
    perr[2] *= _FWHM
    return EnvelopeFit(peak_visibility=float(vp), center=float(xc),
                       fwhm=float(abs(s) * _FWHM),
                       stderr=dict(zip(names, map(float, perr))))


def delay_to_position(tau, axis_name: str) -> np.ndarray:
    """Map delay coordinates to delay-line positions: delta_tau_S = dx1/c,
    delta_tau_L = -dx2/c."""
    tau = np.asarray(tau, float)
    return C * tau if axis_name.endswith("S") else -C * tau


def visibility_envelope(scan2d: Interferogram, axis: str = "L",
                        period_guess: float | None = None) -> EnvelopeResult:
    """Per-slice fringe visibilities of a 2D scan plus a Gaussian envelope fit.

    `axis` names the scanned (fringe) axis; the other axis indexes slices.
    Slice fit failures are excluded unless more than half of them fail.
    """
    if scan2d.ndim != 2:
        raise ValueError("visibility_envelope needs a 2D interferogram")
    fr_idx = 1 if axis == "L" else 0
    fx_idx = 1 - fr_idx
    x = delay_to_position(scan2d.coords(fr_idx), scan2d.axes[fr_idx].name)
    xi = delay_to_position(scan2d.coords(fx_idx), scan2d.axes[fx_idx].name)
    order = np.argsort(x)
    coords, vis, centers, failed = [], [], [], []
    for j in range(scan2d.axes[fx_idx].count):
        ys = scan2d.values[j, :] if fx_idx == 0 else scan2d.values[:, j]
        try:
            fit = fit_fringe(x[order], ys[order], period_guess=period_guess)
            coords.append(xi[j])
            vis.append(fit.visibility)
            centers.append(fit.center)
        except (FitConvergenceError, InsufficientDataError, NoPeriodError):
            failed.append(j)
    n_total = scan2d.axes[fx_idx].count
    if len(failed) > 0.5 * n_total:
        raise FitConvergenceError(f"{len(failed)}/{n_total} slice fits failed")
    coords = np.asarray(coords)
    vis = np.asarray(vis)
    env = _fit_gaussian_peak(coords, vis)
    return EnvelopeResult(slice_coords=coords, visibilities=vis,
                          centers=np.asarray(centers), failed=tuple(failed), fit=env)


def ridge_slope(result: EnvelopeResult, weight_floor: float = 0.2) -> float:
    """Slope of fitted fringe center vs slice position, visibility-weighted.

    Near -1 for a frequency-entangled source (fringe position tracks the
    other delay line), near 0 for a separable one.
    """
    w = result.visibilities.copy()
    keep = w >= weight_floor * w.max()
    xi, xc, w = result.slice_coords[keep], result.centers[keep], w[keep]
    xim = np.average(xi, weights=w)
    xcm = np.average(xc, weights=w)
    denom = np.sum(w * (xi - xim) ** 2)
    if denom == 0:
        return 0.0
    return float(np.sum(w * (xi - xim) * (xc - xcm)) / denom)
