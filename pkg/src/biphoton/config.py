"""Sectioned key-value run configuration with explicit unit suffixes.

Defaults encode the reference experimental setup (775 nm / 3.5 ps pump,
1530 nm + energy-matched idler arms, 18 nm rectangular filters, 15%
detector efficiency, 4 MHz trigger, 10 ns window), so every command runs
without a config file.  The idler wavelength defaults to 'auto' because
the rounded nominal pair 1530/1570 nm violates energy conservation at the
1e-4 level enforced by SourceParams.
"""

from __future__ import annotations

import configparser
import hashlib
import io

from . import core, detector

DEFAULTS: dict[str, dict[str, str]] = {
    "source": {
        "model": "gaussian",
        "pump_center_nm": "775",
        "pump_fwhm_ps": "3.5",
        "signal_center_nm": "1530",
        "idler_center_nm": "auto",
        "sigma1_rad_per_ps": "250",
        "sigma2_rad_per_ps": "250",
        "rho": "auto",
        "coherence_fwhm_ps": "3.5",
        "phase_rad": "0",
    },
    "filters": {
        "shape": "rectangular",
        "signal_center_nm": "1530",
        "idler_center_nm": "auto",
        "bandwidth_nm": "18",
    },
    "grid": {
        "n": "256",
    },
    "detector": {
        "quantum_efficiency": "0.15",
        "trigger_rate_mhz": "4",
        "coincidence_window_ns": "10",
    },
    "budget": {
        "singles_rate_1_khz": "95",
        "singles_rate_2_khz": "91",
        "coincidence_to_singles": "0.047",
        "car": "2.68",
        "pair_probability_per_pulse": "auto",
        "coupling_efficiency": "0.313",
    },
    "jitter": {
        # relative-timing contributions between the two sources; the pump
        # pulse is common to both crystals, hence excluded by default
        "gvd_fwhm_ps": "2.34",
        "gvd_terms": "2",
        "include_pump": "false",
        "v_cap": "0.3333333333333333",
    },
    "scan": {
        "fringe_halfspan_mm": "0.13",
        "fringe_step_um": "0.15",
        "dip_halfspan_mm": "3.0",
        "dip_step_um": "10",
        "x1_halfspan_mm": "1.2",
        "x1_step_mm": "0.1",
        "bin_duration_s": "10",
    },
    "reconstruct": {
        "sigma_rad_per_ps": "7",
        "rho": "-0.9",
        "band_n": "96",
        "span_coherence_times": "5",
        "step_fraction": "0.9",
        "window": "none",
        "demodulate": "true",
    },
    "run": {
        "seed": "12345",
    },
}


class ConfigError(Exception):
    """Invalid or unknown configuration input."""


class RunConfig:
    """Resolved configuration: defaults overlaid with file and overrides."""

    def __init__(self, sections: dict[str, dict[str, str]]):
        self.sections = sections

    def get(self, section: str, key: str) -> str:
        return self.sections[section][key]

    def getfloat(self, section: str, key: str) -> float:
        raw = self.get(section, key)
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key}: not a number: {raw!r}") from None

    def getint(self, section: str, key: str) -> int:
        return int(self.getfloat(section, key))

    def getbool(self, section: str, key: str) -> bool:
        raw = self.get(section, key).strip().lower()
        if raw in ("true", "1", "yes", "on"):
            return True
        if raw in ("false", "0", "no", "off"):
            return False
        raise ConfigError(f"[{section}] {key}: not a boolean: {raw!r}")

    def resolved_text(self) -> str:
        buf = io.StringIO()
        for section in sorted(self.sections):
            buf.write(f"[{section}]\n")
            for key in sorted(self.sections[section]):
                buf.write(f"{key} = {self.sections[section][key]}\n")
            buf.write("\n")
        return buf.getvalue()

    def sha256(self) -> str:
        return hashlib.sha256(self.resolved_text().encode()).hexdigest()


def load_config(path=None, overrides: dict[tuple[str, str], str] | None = None) -> RunConfig:
    """Load a config file over the defaults; unknown keys are rejected."""
    sections = {s: dict(kv) for s, kv in DEFAULTS.items()}
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(path) as fh:
                parser.read_file(fh, source=str(path))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from None
        for section in parser.sections():
            if section not in sections:
                raise ConfigError(f"{path}: unknown section [{section}]")
            for key, val in parser.items(section):
                if key not in sections[section]:
                    raise ConfigError(f"{path}: unknown key [{section}] {key}")
                sections[section][key] = val
    for (section, key), val in (overrides or {}).items():
        if section not in sections or key not in sections[section]:
            raise ConfigError(f"override targets unknown key [{section}] {key}")
        sections[section][key] = str(val)
    return RunConfig(sections)


def build_source_params(cfg: RunConfig) -> core.SourceParams:
    pump = cfg.getfloat("source", "pump_center_nm") * 1e-9
    signal = cfg.getfloat("source", "signal_center_nm") * 1e-9
    idler_raw = cfg.get("source", "idler_center_nm")
    idler = (core.energy_matched_idler(pump, signal) if idler_raw == "auto"
             else float(idler_raw) * 1e-9)
    return core.SourceParams(pump_center_wavelength=pump,
                             pump_pulse_fwhm=cfg.getfloat("source", "pump_fwhm_ps") * 1e-12,
                             signal_center_wavelength=signal,
                             idler_center_wavelength=idler)


def build_filters(cfg: RunConfig, src: core.SourceParams):
    shape = cfg.get("filters", "shape")
    bw = cfg.getfloat("filters", "bandwidth_nm") * 1e-9
    f1_center = cfg.getfloat("filters", "signal_center_nm") * 1e-9
    idler_raw = cfg.get("filters", "idler_center_nm")
    f2_center = (src.idler_center_wavelength if idler_raw == "auto"
                 else float(idler_raw) * 1e-9)
    return (core.SpectralFilter.from_wavelength(shape, f1_center, bw),
            core.SpectralFilter.from_wavelength(shape, f2_center, bw))


def build_model(cfg: RunConfig, src: core.SourceParams) -> core.BiphotonAmplitude:
    if cfg.get("source", "model") != "gaussian":
        raise ConfigError("only the gaussian source model is configurable")
    wc1 = core.omega_from_wavelength(src.signal_center_wavelength)
    wc2 = core.omega_from_wavelength(src.idler_center_wavelength)
    s1 = cfg.getfloat("source", "sigma1_rad_per_ps") * 1e12
    s2 = cfg.getfloat("source", "sigma2_rad_per_ps") * 1e12
    phase = cfg.getfloat("source", "phase_rad")
    rho_raw = cfg.get("source", "rho")
    if rho_raw == "auto":
        coherence = cfg.getfloat("source", "coherence_fwhm_ps") * 1e-12
        return core.gaussian_from_setup(wc1, wc2, s1, s2, coherence, phase=phase)
    return core.BiphotonAmplitude.gaussian(wc1, wc2, s1, s2,
                                           rho=float(rho_raw), phase=phase)


def build_detector(cfg: RunConfig) -> detector.DetectorConfig:
    return detector.DetectorConfig(
        quantum_efficiency=cfg.getfloat("detector", "quantum_efficiency"),
        trigger_rate=cfg.getfloat("detector", "trigger_rate_mhz") * 1e6,
        coincidence_window=cfg.getfloat("detector", "coincidence_window_ns") * 1e-9)


def build_budget(cfg: RunConfig) -> detector.SourceBudget:
    car = cfg.getfloat("budget", "car")
    raw = cfg.get("budget", "pair_probability_per_pulse")
    pair_p = detector.pair_probability_from_car(car) if raw == "auto" else float(raw)
    return detector.SourceBudget(
        singles_rate_1=cfg.getfloat("budget", "singles_rate_1_khz") * 1e3,
        singles_rate_2=cfg.getfloat("budget", "singles_rate_2_khz") * 1e3,
        pair_probability_per_pulse=pair_p,
        coupling_efficiency=cfg.getfloat("budget", "coupling_efficiency"),
        coincidence_to_singles=cfg.getfloat("budget", "coincidence_to_singles"),
        car=car)


def build_jitter(cfg: RunConfig) -> detector.JitterModel:
    contributions = []
    if cfg.getbool("jitter", "include_pump"):
        contributions.append(("pump", cfg.getfloat("source", "pump_fwhm_ps") * 1e-12))
    gvd = cfg.getfloat("jitter", "gvd_fwhm_ps") * 1e-12
    for i in range(cfg.getint("jitter", "gvd_terms")):
        contributions.append((f"gvd_{i + 1}", gvd))
    return detector.JitterModel(tuple(contributions))
