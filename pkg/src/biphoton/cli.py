"""Batch command-line surface.

Subcommands: fringe | hom-dip | scan2d | reconstruct | budget.
Exit codes: 0 success, 2 config error, 3 fit non-convergence, 4 aliasing.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import core, detector, fitting, interferometer as ifm, reconstruction as rec
from .config import (ConfigError, RunConfig, build_budget, build_detector,
                     build_filters, build_jitter, build_model,
                     build_source_params, load_config)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FIT = 3
EXIT_ALIASING = 4


def _prepare(cfg: RunConfig):
    src = build_source_params(cfg)
    f1, f2 = build_filters(cfg, src)
    model = build_model(cfg, src)
    grid = core.grid_for_filters(f1, f2, n=cfg.getint("grid", "n"))
    sampled = core.sample_on_grid(model, grid, f1, f2)
    return src, f1, f2, sampled


def _write_report(path: Path, cfg: RunConfig, lines: list[str]) -> None:
    with open(path, "w") as fh:
        fh.write(f"# config_sha256={cfg.sha256()}\n")
        for line in lines:
            fh.write(line + "\n")


def _write_outputs(out: Path, cfg: RunConfig, ig: ifm.Interferogram, csv_name: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    ig.metadata["config_sha256"] = cfg.sha256()
    ig.to_csv(out / csv_name)
    (out / "resolved_config.cfg").write_text(cfg.resolved_text())


def _fringe_positions(cfg: RunConfig):
    half = cfg.getfloat("scan", "fringe_halfspan_mm") * 1e-3
    step = cfg.getfloat("scan", "fringe_step_um") * 1e-6
    n = int(np.floor(half / step))
    return step * np.arange(-n, n + 1)  # delta_x2 positions, m


def cmd_fringe(cfg: RunConfig, out: Path, noiseless: bool, seed: int) -> int:
    src, f1, f2, sampled = _prepare(cfg)
    x2 = _fringe_positions(cfg)
    # delta_tau_L = -delta_x2/c; scan over an ascending delay axis
    taus = np.sort(-x2 / core.C)
    ig = ifm.scan_1d(sampled, sampled, "L", 0.0, taus[0], taus[1] - taus[0], len(taus))
    x = fitting.delay_to_position(ig.coords(0), "delta_tau_L")
    order = np.argsort(x)
    if noiseless:
        y = ig.values[order]
    else:
        budget, det = build_budget(cfg), build_detector(cfg)
        noisy = detector.rate_to_counts(ig, budget, det,
                                        cfg.getfloat("scan", "bin_duration_s"), seed)
        acc = detector.accidentals(budget.singles_rate_1, budget.singles_rate_2,
                                   det.trigger_rate)
        net = detector.subtract_accidentals(noisy.counts, acc,
                                            cfg.getfloat("scan", "bin_duration_s"))
        ig = noisy
        y = net[order]
    _write_outputs(out, cfg, ig, "fringe.csv")
    try:
        fit = fitting.fit_fringe(x[order], y)
    except (fitting.FitConvergenceError, fitting.InsufficientDataError,
            fitting.NoPeriodError) as exc:
        _write_report(out / "fit_report.txt", cfg, [f"error: {exc}"])
        return EXIT_FIT
    lines = [
        f"visibility: {fit.visibility:.6f} +- {fit.stderr['visibility']:.6f}",
        f"period_nm: {fit.period * 1e9:.4f} +- {fit.stderr['period'] * 1e9:.4f}",
        f"sigma_x_mm: {fit.sigma_x * 1e3:.6f} +- {fit.stderr['sigma_x'] * 1e3:.6f}",
        f"pi_sigma_x_mm: {np.pi * fit.sigma_x * 1e3:.6f}",
        f"center_um: {fit.center * 1e6:.4f}",
        f"phase_rad: {fit.phase:.6f}",
        f"residual_rms: {fit.residual_rms:.6g}",
    ]
    _write_report(out / "fit_report.txt", cfg, lines)
    return EXIT_OK


def _ideal_dip_profile(cfg: RunConfig, src: core.SourceParams):
    """Ideal independent-photon visibility profile.

    Gaussian dip whose area matches the squared spectral overlap (sinc^2)
    of two identical rectangular-filtered photons; the Gaussian shape
    keeps the jitter convolution closed-form-checkable and the fit model
    exact in the zero-jitter limit.
    """
    bw = core.bandwidth_omega_from_wavelength(
        src.idler_center_wavelength, cfg.getfloat("filters", "bandwidth_nm") * 1e-9)
    sigma_t = 2.0 / bw                      # sinc envelope scale in delay
    s = sigma_t * np.sqrt(np.pi / 2.0)      # same area as sinc^2
    half = cfg.getfloat("scan", "dip_halfspan_mm") * 1e-3 / core.C
    step = cfg.getfloat("scan", "dip_step_um") * 1e-6 / core.C
    n = int(np.floor(half / step))
    dt = step * np.arange(-n, n + 1)
    vis = np.exp(-0.5 * (dt / s) ** 2)
    return dt, vis


def cmd_hom_dip(cfg: RunConfig, out: Path, noiseless: bool, seed: int) -> int:
    src = build_source_params(cfg)
    dt, vis = _ideal_dip_profile(cfg, src)
    jitter = build_jitter(cfg)
    v_cap = cfg.getfloat("jitter", "v_cap")
    profile = detector.independent_hom_dip(dt, vis, jitter, v_cap=v_cap)
    g = 1.0 - profile
    ax = ifm.Axis("delta_tau", dt[0], dt[1] - dt[0], len(dt))
    ig = ifm.Interferogram((ax,), g)
    x = core.C * dt
    if noiseless:
        y = g
    else:
        budget, det = build_budget(cfg), build_detector(cfg)
        noisy = detector.rate_to_counts(ig, budget, det,
                                        cfg.getfloat("scan", "bin_duration_s"), seed)
        ig = noisy
        y = noisy.counts
    _write_outputs(out, cfg, ig, "dip.csv")
    try:
        fit = fitting.fit_dip(x, y)
    except (fitting.FitConvergenceError, fitting.InsufficientDataError) as exc:
        _write_report(out / "fit_report.txt", cfg, [f"error: {exc}"])
        return EXIT_FIT
    lines = [
        f"visibility_percent: {fit.visibility * 100:.4f} +- {fit.stderr['visibility'] * 100:.4f}",
        f"fwhm_mm: {fit.fwhm * 1e3:.4f} +- {fit.stderr['fwhm'] * 1e3:.4f}",
        f"center_um: {fit.center * 1e6:.4f}",
        f"jitter_fwhm_ps: {jitter.combined_fwhm * 1e12:.4f}",
        f"residual_rms: {fit.residual_rms:.6g}",
    ]
    _write_report(out / "fit_report.txt", cfg, lines)
    return EXIT_OK


def cmd_scan2d(cfg: RunConfig, out: Path, noiseless: bool, seed: int) -> int:
    src, f1, f2, sampled = _prepare(cfg)
    x1_half = cfg.getfloat("scan", "x1_halfspan_mm") * 1e-3
    x1_step = cfg.getfloat("scan", "x1_step_mm") * 1e-3
    n1 = int(np.floor(x1_half / x1_step))
    x1 = x1_step * np.arange(-n1, n1 + 1)
    fringe_half = cfg.getfloat("scan", "fringe_halfspan_mm") * 1e-3
    step = cfg.getfloat("scan", "fringe_step_um") * 1e-6
    # the fringe ridge tracks delta_x2 = -delta_x1; cover it for every slice
    half2 = x1_half + fringe_half
    n2 = int(np.floor(half2 / step))
    x2 = step * np.arange(-n2, n2 + 1)
    tau_s = x1 / core.C
    tau_l = np.sort(-x2 / core.C)
    ig = ifm.scan_2d(sampled, sampled,
                     (tau_s[0], tau_s[1] - tau_s[0], len(tau_s)),
                     (tau_l[0], tau_l[1] - tau_l[0], len(tau_l)))
    if not noiseless:
        budget, det = build_budget(cfg), build_detector(cfg)
        ig = detector.rate_to_counts(ig, budget, det,
                                     cfg.getfloat("scan", "bin_duration_s"), seed)
    _write_outputs(out, cfg, ig, "scan2d.csv")
    period = src.idler_center_wavelength
    try:
        env = fitting.visibility_envelope(ig, axis="L", period_guess=period)
    except fitting.FitConvergenceError as exc:
        _write_report(out / "envelope_report.txt", cfg, [f"error: {exc}"])
        return EXIT_FIT
    slope = fitting.ridge_slope(env)
    lines = [
        f"peak_visibility: {env.fit.peak_visibility:.6f}",
        f"envelope_center_mm: {env.fit.center * 1e3:.6f}",
        f"envelope_fwhm_mm: {env.fit.fwhm * 1e3:.6f} +- {env.fit.stderr['fwhm'] * 1e3:.6f}",
        f"ridge_slope: {slope:.4f}",
        f"entangled_signature: {abs(slope) > 0.5}",
        f"slices_failed: {len(env.failed)}",
    ]
    _write_report(out / "envelope_report.txt", cfg, lines)
    return EXIT_OK


def cmd_reconstruct(cfg: RunConfig, out: Path, input_csv: str | None) -> int:
    band_n = cfg.getint("reconstruct", "band_n")
    window = cfg.get("reconstruct", "window")
    demod = cfg.getbool("reconstruct", "demodulate")
    src = build_source_params(cfg)
    wc1 = core.omega_from_wavelength(src.signal_center_wavelength)
    wc2 = core.omega_from_wavelength(src.idler_center_wavelength)
    sigma = cfg.getfloat("reconstruct", "sigma_rad_per_ps") * 1e12
    rho = cfg.getfloat("reconstruct", "rho")
    model = core.BiphotonAmplitude.gaussian(wc1, wc2, sigma, sigma, rho=rho)
    grid = core.grid_for_gaussian(model, n=band_n)
    lines: list[str] = []
    out.mkdir(parents=True, exist_ok=True)
    try:
        if input_csv is not None:
            ig = ifm.read_interferogram_csv(input_csv)
            rec.DelayLattice.from_interferogram(ig)
            est = rec.reconstruct_jsi(ig, grid, window=window, demodulate=demod)
            err = None
        else:
            # Gamma decays slowest along the correlation ridge; span the
            # lattice to cover that axis, not just the marginal width.
            coh = np.sqrt(2.0) / (sigma * np.sqrt(1.0 - abs(rho)))
            span = cfg.getfloat("reconstruct", "span_coherence_times")
            step = cfg.getfloat("reconstruct", "step_fraction") * rec.nyquist_step(grid)
            half_count = int(np.ceil(span * coh / step))
            lattice = rec.DelayLattice.symmetric(step, half_count, step, half_count)
            sampled = core.sample_on_grid(model, grid)
            ig = ifm.scan_2d(sampled, sampled,
                             (lattice.start1, lattice.step1, lattice.count1),
                             (lattice.start2, lattice.step2, lattice.count2))
            est = rec.reconstruct_jsi(ig, grid, window=window, demodulate=demod)
            err = rec.roundtrip_error(model, None, None, grid, lattice,
                                      window=window, demodulate=demod)
    except rec.AliasingError as exc:
        _write_report(out / "recon_report.txt", cfg,
                      [f"error: {exc}", f"required_step_s: {exc.required_step!r}"])
        return EXIT_ALIASING
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    with open(out / "jsi.csv", "w") as fh:
        fh.write(f"# omega1 axis,{grid.omega1_min!r},{grid.d1!r},{grid.n1}\n")
        fh.write(f"# omega2 axis,{grid.omega2_min!r},{grid.d2!r},{grid.n2}\n")
        fh.write(f"# config_sha256={cfg.sha256()}\n")
        for i in range(grid.n1):
            for j in range(grid.n2):
                fh.write(f"{i},{j},{float(est.values[i, j])!r}\n")
    corr = core.jsi_correlation(est.values, grid) if not est.degenerate else float("nan")
    lines = [
        f"lattice_axes: {[(ax.start, ax.step, ax.count) for ax in ig.axes]}",
        f"window: {window}",
        f"demodulated: {demod}",
        f"negativity_fraction: {est.negativity_fraction:.6g}",
        f"correlation: {corr:.4f}",
    ]
    if err is not None:
        lines.append(f"roundtrip_l2_error: {err:.6g}")
    _write_report(out / "recon_report.txt", cfg, lines)
    (out / "resolved_config.cfg").write_text(cfg.resolved_text())
    return EXIT_OK


def cmd_budget(cfg: RunConfig, out: Path | None) -> int:
    budget = build_budget(cfg)
    det = build_detector(cfg)
    acc = detector.accidentals(budget.singles_rate_1, budget.singles_rate_2,
                               det.trigger_rate)
    pair_p = detector.pair_probability_from_car(budget.car)
    lines = [
        f"accidentals_hz: {acc!r}",
        f"pair_probability_per_pulse: {pair_p:.4g}",
        f"expected_coincidence_rate_hz: {budget.singles_rate_1 * budget.coincidence_to_singles!r}",
        f"singles_rate_1_hz: {budget.singles_rate_1!r}",
        f"singles_rate_2_hz: {budget.singles_rate_2!r}",
        f"car: {budget.car!r}",
    ]
    for line in lines:
        print(line)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        _write_report(out / "budget_report.txt", cfg, lines)
    return EXIT_OK


def _parse_overrides(pairs: list[str]) -> dict[tuple[str, str], str]:
    overrides = {}
    for pair in pairs:
        try:
            target, val = pair.split("=", 1)
            section, key = target.split(".", 1)
        except ValueError:
            raise ConfigError(f"bad override {pair!r}; expected section.key=value") from None
        overrides[(section.strip(), key.strip())] = val.strip()
    return overrides


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="biphoton",
        description="Two-photon interference simulation and analysis toolkit")
    parser.add_argument("--config", default=None, help="config file path")
    parser.add_argument("--seed", type=int, default=None, help="RNG seed override")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--noiseless", action="store_true",
                        help="skip counting-noise synthesis")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="SECTION.KEY=VALUE", help="config override")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("fringe", "hom-dip", "scan2d", "budget"):
        sub.add_parser(name)
    p_rec = sub.add_parser("reconstruct")
    p_rec.add_argument("--input", default=None, help="interferogram CSV to invert")
    args = parser.parse_args(argv)

    try:
        overrides = _parse_overrides(args.overrides)
        if args.seed is not None:
            overrides[("run", "seed")] = str(args.seed)
        cfg = load_config(args.config, overrides)
        seed = cfg.getint("run", "seed")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.out)
    try:
        if args.command == "fringe":
            return cmd_fringe(cfg, out, args.noiseless, seed)
        if args.command == "hom-dip":
            return cmd_hom_dip(cfg, out, args.noiseless, seed)
        if args.command == "scan2d":
            return cmd_scan2d(cfg, out, args.noiseless, seed)
        if args.command == "reconstruct":
            return cmd_reconstruct(cfg, out, args.input)
        if args.command == "budget":
            return cmd_budget(cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
