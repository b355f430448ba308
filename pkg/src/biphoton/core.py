"""Bi-photon spectral amplitudes, spectral filters and frequency grids.

All spectral quantities are handled internally in angular frequency
(rad/s); wavelengths appear only at construction helpers, converted with
omega = 2*pi*c/lambda.  Sampled amplitudes are normalized so the discrete
joint spectral intensity integrates to one under the grid measure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator

C = 299792458.0  # vacuum speed of light, m/s
FWHM_TO_SIGMA = 1.0 / (2.0 * np.sqrt(2.0 * np.log(2.0)))


class OutOfDomainError(ValueError):
    """A gridded amplitude was queried outside its frequency grid."""


class EmptySupportError(ValueError):
    """Filtering removed all spectral support (passband misses the model)."""


class GridMismatchError(ValueError):
    """Two sampled amplitudes do not share the same frequency grid."""


def omega_from_wavelength(lam: float) -> float:
    """Angular frequency (rad/s) for a vacuum wavelength (m)."""
    return 2.0 * np.pi * C / lam


def wavelength_from_omega(omega: float) -> float:
    return 2.0 * np.pi * C / omega


def bandwidth_omega_from_wavelength(center_lam: float, bw_lam: float) -> float:
    """Convert a wavelength bandwidth (m) around center_lam to rad/s."""
    return 2.0 * np.pi * C * bw_lam / center_lam**2


def energy_matched_idler(pump_lam: float, signal_lam: float) -> float:
    """Idler wavelength satisfying 1/ls + 1/li = 1/lp exactly."""
    return 1.0 / (1.0 / pump_lam - 1.0 / signal_lam)


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform midpoint-rule grid over a rectangle in (omega1, omega2).

    Sample points sit at cell centers, so rectangular filter edges that
    coincide with cell boundaries are represented without endpoint
    artifacts.
    """

    n1: int
    n2: int
    omega1_min: float
    omega1_max: float
    omega2_min: float
    omega2_max: float

    def __post_init__(self):
        if self.n1 < 2 or self.n2 < 2:
            raise ValueError("grid sizes must be >= 2")
        if not (self.omega1_max > self.omega1_min and self.omega2_max > self.omega2_min):
            raise ValueError("grid bounds must satisfy max > min on each axis")

    @property
    def d1(self) -> float:
        return (self.omega1_max - self.omega1_min) / self.n1

    @property
    def d2(self) -> float:
        return (self.omega2_max - self.omega2_min) / self.n2

    @property
    def axis1(self) -> np.ndarray:
        return self.omega1_min + (np.arange(self.n1) + 0.5) * self.d1

    @property
    def axis2(self) -> np.ndarray:
        return self.omega2_min + (np.arange(self.n2) + 0.5) * self.d2

    @property
    def measure(self) -> float:
        return self.d1 * self.d2

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.axis1, self.axis2, indexing="ij")

    def refine(self, factor: int = 2) -> "FrequencyGrid":
        return FrequencyGrid(self.n1 * factor, self.n2 * factor,
                             self.omega1_min, self.omega1_max,
                             self.omega2_min, self.omega2_max)


@dataclass(frozen=True)
class SpectralFilter:
    """Per-arm passband applied before detection.

    bandwidth is the full width for 'rectangular' and the FWHM for
    'gaussian', both in rad/s.
    """

    shape: str  # 'rectangular' | 'gaussian'
    center: float
    bandwidth: float

    def __post_init__(self):
        if self.shape not in ("rectangular", "gaussian"):
            raise ValueError(f"unknown filter shape {self.shape!r}")
        if self.bandwidth <= 0:
            raise ValueError("filter bandwidth must be positive")

    @classmethod
    def from_wavelength(cls, shape: str, center_lam: float, bw_lam: float) -> "SpectralFilter":
        return cls(shape, omega_from_wavelength(center_lam),
                   bandwidth_omega_from_wavelength(center_lam, bw_lam))

    def transmission(self, omega: np.ndarray) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        if self.shape == "rectangular":
            half = 0.5 * self.bandwidth
            return ((omega >= self.center - half) & (omega <= self.center + half)).astype(float)
        sig = self.bandwidth * FWHM_TO_SIGMA
        return np.exp(-0.5 * ((omega - self.center) / sig) ** 2)


def grid_for_filters(filter1: SpectralFilter, filter2: SpectralFilter,
                     n: int = 256, pad: float = 0.2) -> FrequencyGrid:
    """Default grid spanning both passbands.

    Rectangular passbands are padded by `pad` (relative) and laid out so
    the band edges fall exactly on cell boundaries; gaussian passbands get
    +-5 sigma of span.
    """
    if n % 2:
        n += 1

    def bounds(f: SpectralFilter) -> tuple[float, float]:
        if f.shape == "rectangular":
            margin_cells = int(round(n * pad / (2.0 * (1.0 + pad))))
            m_band = n - 2 * margin_cells
            if m_band % 2:
                m_band -= 1
                margin_cells = (n - m_band) // 2
            d = f.bandwidth / m_band
            half = 0.5 * n * d
        else:
            half = 5.0 * f.bandwidth * FWHM_TO_SIGMA
        return f.center - half, f.center + half

    lo1, hi1 = bounds(filter1)
    lo2, hi2 = bounds(filter2)
    return FrequencyGrid(n, n, lo1, hi1, lo2, hi2)


def grid_for_gaussian(model: "BiphotonAmplitude", n: int = 256,
                      span_sigmas: float = 5.0) -> FrequencyGrid:
    """Grid covering +-span_sigmas of an unfiltered gaussian model."""
    if model.kind != "gaussian":
        raise ValueError("grid_for_gaussian requires a gaussian model")
    h1 = span_sigmas * model.sigma1
    h2 = span_sigmas * model.sigma2
    return FrequencyGrid(n, n, model.omega_c1 - h1, model.omega_c1 + h1,
                         model.omega_c2 - h2, model.omega_c2 + h2)


class BiphotonAmplitude:
    """Complex joint spectral amplitude Phi(omega1, omega2) of a photon pair.

    Two models: a correlated 2D gaussian (centers, widths, correlation
    coefficient rho, global phase) or an arbitrary complex array on a
    FrequencyGrid.
    """

    def __init__(self, kind: str, *, omega_c1=None, omega_c2=None,
                 sigma1=None, sigma2=None, rho=0.0, phase=0.0,
                 values=None, grid=None):
        self.kind = kind
        self.phase = float(phase)
        if kind == "gaussian":
            if sigma1 <= 0 or sigma2 <= 0:
                raise ValueError("sigma1, sigma2 must be positive")
            if not -1.0 < rho < 1.0:
                raise ValueError("rho must lie strictly inside (-1, 1)")
            self.omega_c1 = float(omega_c1)
            self.omega_c2 = float(omega_c2)
            self.sigma1 = float(sigma1)
            self.sigma2 = float(sigma2)
            self.rho = float(rho)
        elif kind == "gridded":
            values = np.asarray(values, dtype=complex)
            if values.shape != (grid.n1, grid.n2):
                raise ValueError("gridded values must match the grid shape")
            self.values = values
            self.grid = grid
            self._interp = RegularGridInterpolator(
                (grid.axis1, grid.axis2), values, bounds_error=True)
        else:
            raise ValueError(f"unknown model kind {kind!r}")

    @classmethod
    def gaussian(cls, omega_c1, omega_c2, sigma1, sigma2, rho=0.0, phase=0.0):
        return cls("gaussian", omega_c1=omega_c1, omega_c2=omega_c2,
                   sigma1=sigma1, sigma2=sigma2, rho=rho, phase=phase)

    @classmethod
    def gridded(cls, values, grid: FrequencyGrid, phase=0.0):
        return cls("gridded", values=values, grid=grid, phase=phase)

    def __call__(self, omega1, omega2) -> np.ndarray:
        """Evaluate Phi(omega1, omega2) (broadcasting)."""
        if self.kind == "gaussian":
            u1 = (np.asarray(omega1, float) - self.omega_c1) / self.sigma1
            u2 = (np.asarray(omega2, float) - self.omega_c2) / self.sigma2
            q = (u1 * u1 - 2.0 * self.rho * u1 * u2 + u2 * u2) / (2.0 * (1.0 - self.rho**2))
            return np.exp(-q) * np.exp(1j * self.phase)
        pts = np.stack(np.broadcast_arrays(np.asarray(omega1, float),
                                           np.asarray(omega2, float)), axis=-1)
        try:
            out = self._interp(pts)
        except ValueError as exc:
            raise OutOfDomainError(str(exc)) from None
        return out * np.exp(1j * self.phase)


def evaluate_amplitude(model: BiphotonAmplitude, omega1, omega2):
    return model(omega1, omega2)


@dataclass(frozen=True)
class SampledAmplitude:
    """Filtered amplitude sampled on a grid, JSI-normalized to one."""

    values: np.ndarray
    grid: FrequencyGrid

    def __post_init__(self):
        norm = np.sum(np.abs(self.values) ** 2) * self.grid.measure
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"sampled amplitude not normalized (norm={norm})")

    def jsi(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def sample_on_grid(model: BiphotonAmplitude, grid: FrequencyGrid,
                   filter1: SpectralFilter | None = None,
                   filter2: SpectralFilter | None = None) -> SampledAmplitude:
    """Sample Phi*F1*F2 on the grid and renormalize the discrete JSI to 1."""
    w1, w2 = grid.mesh()
    vals = model(w1, w2).astype(complex)
    if filter1 is not None:
        vals = vals * filter1.transmission(grid.axis1)[:, None]
    if filter2 is not None:
        vals = vals * filter2.transmission(grid.axis2)[None, :]
    norm = np.sum(np.abs(vals) ** 2) * grid.measure
    if norm <= 0.0 or not np.isfinite(norm):
        raise EmptySupportError("filtered amplitude has no spectral support on the grid")
    return SampledAmplitude(vals / np.sqrt(norm), grid)


def jsi(sampled: SampledAmplitude) -> np.ndarray:
    """Joint spectral intensity |Phi|^2 on the sampling grid."""
    return sampled.jsi()


def marginal_spectrum(jsi_values: np.ndarray, grid: FrequencyGrid, arm: int) -> np.ndarray:
    """Marginal of the JSI for one arm; integrates to 1 under its measure."""
    if arm == 1:
        return jsi_values.sum(axis=1) * grid.d2
    if arm == 2:
        return jsi_values.sum(axis=0) * grid.d1
    raise ValueError("arm must be 1 or 2")


def jsi_correlation(jsi_values: np.ndarray, grid: FrequencyGrid) -> float:
    """Weighted Pearson correlation of (omega1, omega2) under the JSI."""
    w = jsi_values / jsi_values.sum()
    a1, a2 = grid.axis1, grid.axis2
    m1 = np.sum(w.sum(axis=1) * a1)
    m2 = np.sum(w.sum(axis=0) * a2)
    v1 = np.sum(w.sum(axis=1) * (a1 - m1) ** 2)
    v2 = np.sum(w.sum(axis=0) * (a2 - m2) ** 2)
    cov = np.sum(w * np.outer(a1 - m1, a2 - m2))
    return float(cov / np.sqrt(v1 * v2))


@dataclass(frozen=True)
class SourceParams:
    """Center wavelengths and pump duration of the pair source."""

    pump_center_wavelength: float  # m
    pump_pulse_fwhm: float         # s
    signal_center_wavelength: float
    idler_center_wavelength: float

    def __post_init__(self):
        if self.pump_pulse_fwhm <= 0:
            raise ValueError("pump_pulse_fwhm must be positive")
        lhs = 1.0 / self.signal_center_wavelength + 1.0 / self.idler_center_wavelength
        rhs = 1.0 / self.pump_center_wavelength
        if abs(lhs - rhs) / rhs > 1e-4:
            raise ValueError("center wavelengths violate energy conservation "
                             f"(relative error {abs(lhs - rhs) / rhs:.2e})")


def two_photon_coherence_length(src: SourceParams,
                                gvd_spreads: Sequence[float] = ()) -> float:
    """Pair-level coherence length: c times the pump duration combined in
    quadrature with any user-supplied GVD timing spreads (seconds)."""
    t = np.sqrt(src.pump_pulse_fwhm**2 + sum(g * g for g in gvd_spreads))
    return C * float(t)


def gaussian_from_setup(omega_c1: float, omega_c2: float,
                        sigma1: float, sigma2: float,
                        coherence_fwhm: float, phase: float = 0.0) -> BiphotonAmplitude:
    """Correlated-gaussian model whose fringe-visibility envelope along the
    first delay axis has the requested FWHM (seconds).

    The envelope of |Gamma| along delta_tau_S at the fringe ridge is
    exp(-Var(omega1|omega2) * a^2 / 2); rho is chosen so its FWHM equals
    coherence_fwhm.
    """
    sigma_cond = 2.0 * np.sqrt(2.0 * np.log(2.0)) / coherence_fwhm
    s1 = sigma1 / np.sqrt(2.0)  # intensity marginal std
    ratio = sigma_cond / s1
    if ratio >= 1.0:
        raise ValueError("requested coherence time too short for the given sigma1")
    rho = -np.sqrt(1.0 - ratio**2)
    return BiphotonAmplitude.gaussian(omega_c1, omega_c2, sigma1, sigma2,
                                      rho=rho, phase=phase)
