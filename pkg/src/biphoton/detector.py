"""Gated-detector counting statistics: accidentals, pair budget, Poisson
noise synthesis, multi-pair visibility cap and timing-jitter broadening.

FWHM <-> rms conversions use the Gaussian factor 2*sqrt(2*ln 2).
Time <-> length conversions use vacuum c (delays are free-space path
lengths set by optical delay lines).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .core import FWHM_TO_SIGMA
from .interferometer import Interferogram


@dataclass(frozen=True)
class DetectorConfig:
    quantum_efficiency: float
    trigger_rate: float       # Hz
    coincidence_window: float  # s

    def __post_init__(self):
        if not 0.0 < self.quantum_efficiency <= 1.0:
            raise ValueError("quantum_efficiency must be in (0, 1]")
        if self.trigger_rate <= 0 or self.coincidence_window <= 0:
            raise ValueError("trigger_rate and coincidence_window must be positive")


@dataclass(frozen=True)
class SourceBudget:
    singles_rate_1: float  # Hz
    singles_rate_2: float  # Hz
    pair_probability_per_pulse: float
    coupling_efficiency: float
    coincidence_to_singles: float
    car: float  # coincidence-to-accidental ratio

    def __post_init__(self):
        vals = (self.singles_rate_1, self.singles_rate_2, self.coupling_efficiency,
                self.coincidence_to_singles)
        if any(v < 0 for v in vals):
            raise ValueError("budget rates and efficiencies must be nonnegative")
        if self.car <= 0:
            raise ValueError("car must be positive")
        if not 0.0 <= self.pair_probability_per_pulse <= 1.0:
            raise ValueError("pair_probability_per_pulse must be in [0, 1]")


@dataclass(frozen=True)
class JitterModel:
    """Relative-timing jitter contributions, FWHM seconds, combined in
    quadrature."""

    contributions: tuple[tuple[str, float], ...]

    def __post_init__(self):
        if any(spread < 0 for _, spread in self.contributions):
            raise ValueError("timing spreads must be nonnegative")

    @property
    def combined_fwhm(self) -> float:
        return float(np.sqrt(sum(s * s for _, s in self.contributions)))

    @property
    def combined_rms(self) -> float:
        return self.combined_fwhm * FWHM_TO_SIGMA


def accidentals(n1: float, n3: float, f_trig: float) -> float:
    """Accidental coincidence rate N1*N3/f_trig for pulsed gated detection."""
    if f_trig == 0:
        raise ZeroDivisionError("trigger rate must be nonzero")
    return n1 * n3 / f_trig


def pair_probability_from_car(car: float) -> float:
    """Pairs per pulse estimated as the reciprocal of the CAR."""
    if car == 0:
        raise ZeroDivisionError("car must be nonzero")
    return 1.0 / car


def synth_counts(mean_rate: float, bin_duration: float, trials: int, seed: int) -> np.ndarray:
    """Independent Poisson counts with mean mean_rate*bin_duration."""
    if mean_rate < 0:
        raise ValueError("mean_rate must be nonnegative")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return rng.poisson(mean_rate * bin_duration, size=trials)


def subtract_accidentals(raw, accidental_rate: float, bin_duration: float) -> np.ndarray:
    """Net counts raw - accidental_rate*bin_duration (never clipped)."""
    if bin_duration <= 0:
        raise ValueError("bin_duration must be positive")
    return np.asarray(raw, dtype=float) - accidental_rate * bin_duration


def independent_hom_dip(delta_t: np.ndarray, visibility: np.ndarray,
                        jitter: JitterModel, v_cap: float = 1.0 / 3.0) -> np.ndarray:
    """Jitter-broadened visibility profile for HOM between independent photons.

    Convolves the ideal visibility profile V(dt) with a zero-mean Gaussian
    of rms equal to the combined jitter, then scales the result by the
    multi-pair cap v_cap.  delta_t must be uniformly spaced and the
    profile should have decayed at the edges (zero padding is used).
    """
    dt = np.asarray(delta_t, float)
    vis = np.asarray(visibility, float)
    if vis.min() < 0 or vis.max() > 1.0 + 1e-12:
        raise ValueError("ideal visibility profile must lie in [0, 1]")
    step = np.diff(dt)
    if not np.allclose(step, step[0], rtol=1e-9, atol=0.0):
        raise ValueError("delta_t must be uniformly spaced")
    h = float(step[0])
    sig = jitter.combined_rms
    if sig < 0.1 * h:
        return v_cap * vis
    half = int(np.ceil(5.0 * sig / h))
    t_k = h * np.arange(-half, half + 1)
    kernel = np.exp(-0.5 * (t_k / sig) ** 2)
    kernel /= kernel.sum()
    padded = np.pad(vis, half)
    return v_cap * np.convolve(padded, kernel, mode="valid")


def _per_point_poisson(mu: np.ndarray, seed: int) -> np.ndarray:
    """Poisson draws with a per-point sub-seed, independent of evaluation order."""
    flat = mu.reshape(-1)
    out = np.empty(flat.shape, dtype=float)
    for i, m in enumerate(flat):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(i,)))
        out[i] = rng.poisson(m)
    return out.reshape(mu.shape)


def rate_to_counts(normalized: Interferogram, budget: SourceBudget,
                   det: DetectorConfig, bin_duration: float, seed: int) -> Interferogram:
    """Synthesize noisy counts for a normalized interferogram.

    Expected counts per lattice point are baseline*G + accidentals, with
    baseline = singles_rate_1 * coincidence_to_singles * bin_duration and
    a Poisson draw per point from a seed-derived substream.
    """
    baseline = budget.singles_rate_1 * budget.coincidence_to_singles * bin_duration
    acc = accidentals(budget.singles_rate_1, budget.singles_rate_2,
                      det.trigger_rate) * bin_duration
    mu = baseline * normalized.values + acc
    counts = _per_point_poisson(mu, seed)
    meta = dict(normalized.metadata)
    meta.update(seed=seed, baseline_counts=baseline, accidental_counts=acc,
                bin_duration_s=bin_duration)
    return Interferogram(normalized.axes, normalized.values, counts=counts,
                         metadata=meta)
