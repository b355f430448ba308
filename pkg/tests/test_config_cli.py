import numpy as np
import pytest

from biphoton import cli, core
from biphoton import interferometer as ifm
from biphoton.config import ConfigError, build_jitter, build_model, build_source_params, load_config


class TestLoadConfig:
    def test_defaults_resolve(self):
        cfg = load_config()
        src = build_source_params(cfg)
        assert src.pump_center_wavelength == pytest.approx(775e-9)
        # idler defaults to the energy-matched partner of 1530 nm
        assert src.idler_center_wavelength == pytest.approx(1570.5e-9, abs=0.1e-9)
        model = build_model(cfg, src)
        assert model.sigma1 == pytest.approx(2.5e14)
        assert model.rho < -0.999

    def test_file_overlay_and_unknown_keys(self, tmp_path):
        good = tmp_path / "run.cfg"
        good.write_text("[source]\npump_fwhm_ps = 2.0\n")
        cfg = load_config(good)
        assert cfg.getfloat("source", "pump_fwhm_ps") == 2.0
        bad = tmp_path / "bad.cfg"
        bad.write_text("[source]\nnot_a_key = 1\n")
        with pytest.raises(ConfigError, match="unknown key"):
            load_config(bad)
        bad2 = tmp_path / "bad2.cfg"
        bad2.write_text("[nope]\nx = 1\n")
        with pytest.raises(ConfigError, match="unknown section"):
            load_config(bad2)

    def test_overrides(self):
        cfg = load_config(overrides={("run", "seed"): "99"})
        assert cfg.getint("run", "seed") == 99
        with pytest.raises(ConfigError):
            load_config(overrides={("run", "nope"): "1"})

    def test_type_errors_are_config_errors(self):
        cfg = load_config(overrides={("source", "pump_fwhm_ps"): "fast"})
        with pytest.raises(ConfigError, match="not a number"):
            cfg.getfloat("source", "pump_fwhm_ps")
        cfg = load_config(overrides={("reconstruct", "demodulate"): "maybe"})
        with pytest.raises(ConfigError, match="not a boolean"):
            cfg.getbool("reconstruct", "demodulate")

    def test_sha_tracks_content(self):
        a = load_config()
        b = load_config(overrides={("run", "seed"): "7"})
        assert a.sha256() != b.sha256()
        assert a.sha256() == load_config().sha256()

    def test_jitter_defaults_exclude_common_mode_pump(self):
        j = build_jitter(load_config())
        labels = [name for name, _ in j.contributions]
        assert labels == ["gvd_1", "gvd_2"]
        j2 = build_jitter(load_config(overrides={("jitter", "include_pump"): "true"}))
        assert [n for n, _ in j2.contributions][0] == "pump"


def read_report(path):
    out = {}
    for line in path.read_text().splitlines():
        if line.startswith("#") or ":" not in line:
            continue
        key, val = line.split(":", 1)
        out[key.strip()] = val.strip()
    return out


class TestCliExitCodes:
    def test_success(self, tmp_path):
        assert cli.main(["--out", str(tmp_path / "o"), "budget"]) == cli.EXIT_OK

    def test_config_error(self, tmp_path):
        assert cli.main(["--set", "nope.key=1", "budget"]) == cli.EXIT_CONFIG
        assert cli.main(["--set", "garbage", "budget"]) == cli.EXIT_CONFIG
        missing = str(tmp_path / "absent.cfg")
        assert cli.main(["--config", missing, "budget"]) == cli.EXIT_CONFIG

    def test_fit_error(self, tmp_path):
        # 5-point dip scan cannot be fit
        code = cli.main(["--out", str(tmp_path / "o"), "--noiseless",
                         "--set", "scan.dip_halfspan_mm=0.02", "hom-dip"])
        assert code == cli.EXIT_FIT

    def test_aliasing_error(self, tmp_path):
        code = cli.main(["--out", str(tmp_path / "o"),
                         "--set", "reconstruct.step_fraction=5",
                         "--set", "reconstruct.demodulate=false", "reconstruct"])
        assert code == cli.EXIT_ALIASING
        report = read_report(tmp_path / "o" / "recon_report.txt")
        assert "required_step_s" in report

    def test_reconstruct_rejects_lattice_without_origin(self, tmp_path):
        ax1 = ifm.Axis("delta_tau_S", 0.5e-15, 1e-15, 4)
        ax2 = ifm.Axis("delta_tau_L", -2e-15, 1e-15, 5)
        ig = ifm.Interferogram((ax1, ax2), np.ones((4, 5)))
        path = tmp_path / "ig.csv"
        ifm.write_interferogram_csv(ig, path)
        code = cli.main(["--out", str(tmp_path / "o"), "reconstruct",
                         "--input", str(path)])
        assert code == cli.EXIT_CONFIG


class TestFringeCommand:
    def test_noiseless_reference(self, tmp_path):
        out = tmp_path / "o"
        assert cli.main(["--out", str(out), "--noiseless", "fringe"]) == cli.EXIT_OK
        report = read_report(out / "fit_report.txt")
        vis = float(report["visibility"].split("+-")[0])
        assert abs(vis - 1.0) < 1e-3
        pi_sigma = float(report["pi_sigma_x_mm"]) * 1e-3
        assert abs(pi_sigma - 0.137e-3) / 0.137e-3 < 0.05
        # config echo: every output embeds the resolved config hash
        cfg = load_config()
        head = (out / "fit_report.txt").read_text().splitlines()[0]
        assert cfg.sha256() in head
        assert cfg.sha256() in (out / "fringe.csv").read_text()

    def test_seeded_runs_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert cli.main(["--out", str(out), "--seed", "7", "fringe"]) == cli.EXIT_OK
        assert (a / "fringe.csv").read_bytes() == (b / "fringe.csv").read_bytes()
        assert (a / "fit_report.txt").read_bytes() == (b / "fit_report.txt").read_bytes()

    def test_different_seeds_differ(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert cli.main(["--out", str(a), "--seed", "7", "fringe"]) == cli.EXIT_OK
        assert cli.main(["--out", str(b), "--seed", "8", "fringe"]) == cli.EXIT_OK
        assert (a / "fringe.csv").read_bytes() != (b / "fringe.csv").read_bytes()

    def test_resolved_config_reproduces_run(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert cli.main(["--out", str(a), "--seed", "5", "fringe"]) == cli.EXIT_OK
        assert cli.main(["--out", str(b), "--config",
                         str(a / "resolved_config.cfg"), "fringe"]) == cli.EXIT_OK
        assert (a / "fringe.csv").read_bytes() == (b / "fringe.csv").read_bytes()


class TestHomDipCommand:
    def test_reference_jitter_budget(self, tmp_path):
        out = tmp_path / "o"
        assert cli.main(["--out", str(out), "--noiseless", "hom-dip"]) == cli.EXIT_OK
        report = read_report(out / "fit_report.txt")
        vis = float(report["visibility_percent"].split("+-")[0])
        fwhm = float(report["fwhm_mm"].split("+-")[0])
        assert abs(vis - 4.48) <= 1.0
        assert abs(fwhm - 0.95) / 0.95 <= 0.15

    def test_zero_jitter_cap(self, tmp_path):
        out = tmp_path / "o"
        code = cli.main(["--out", str(out), "--noiseless",
                         "--set", "jitter.gvd_fwhm_ps=0", "hom-dip"])
        assert code == cli.EXIT_OK
        report = read_report(out / "fit_report.txt")
        vis = float(report["visibility_percent"].split("+-")[0])
        assert abs(vis - 33.0) <= 0.5

    def test_cap_override_restores_ideal(self, tmp_path):
        out = tmp_path / "o"
        code = cli.main(["--out", str(out), "--noiseless",
                         "--set", "jitter.gvd_fwhm_ps=0",
                         "--set", "jitter.v_cap=1", "hom-dip"])
        assert code == cli.EXIT_OK
        report = read_report(out / "fit_report.txt")
        vis = float(report["visibility_percent"].split("+-")[0])
        assert vis == pytest.approx(100.0, abs=0.01)


class TestBudgetCommand:
    def test_reference_numbers(self, tmp_path, capsys):
        out = tmp_path / "o"
        assert cli.main(["--out", str(out), "budget"]) == cli.EXIT_OK
        report = read_report(out / "budget_report.txt")
        assert float(report["accidentals_hz"]) == 2161.25
        assert float(report["pair_probability_per_pulse"]) == pytest.approx(0.373, abs=5e-4)
        printed = capsys.readouterr().out
        assert "accidentals_hz: 2161.25" in printed

    def test_zero_singles(self, tmp_path):
        out = tmp_path / "o"
        code = cli.main(["--out", str(out),
                         "--set", "budget.singles_rate_1_khz=0", "budget"])
        assert code == cli.EXIT_OK
        report = read_report(out / "budget_report.txt")
        assert float(report["accidentals_hz"]) == 0.0


class TestReconstructCommand:
    def test_round_trip_report(self, tmp_path):
        out = tmp_path / "o"
        code = cli.main(["--out", str(out),
                         "--set", "reconstruct.band_n=64",
                         "--set", "reconstruct.rho=-0.9", "reconstruct"])
        assert code == cli.EXIT_OK
        report = read_report(out / "recon_report.txt")
        assert float(report["roundtrip_l2_error"]) < 0.05
        assert float(report["correlation"]) == pytest.approx(-0.9, abs=0.05)
        assert (out / "jsi.csv").exists()

    def test_external_csv_input(self, tmp_path, reference_sampled):
        # reconstruct from a CSV written by the engine
        from biphoton import reconstruction as rec
        sigma = 7e12
        model = core.BiphotonAmplitude.gaussian(1.23e15, 1.20e15, sigma, sigma, rho=0.0)
        grid = core.grid_for_gaussian(model, n=48)
        step = 0.9 * rec.nyquist_step(grid)
        half = int(np.ceil(5.0 * np.sqrt(2.0) / sigma / step))
        lat = rec.DelayLattice.symmetric(step, half, step, half)
        sampled = core.sample_on_grid(model, grid)
        ig = ifm.scan_2d(sampled, sampled,
                         (lat.start1, lat.step1, lat.count1),
                         (lat.start2, lat.step2, lat.count2))
        path = tmp_path / "scan.csv"
        ifm.write_interferogram_csv(ig, path)
        out = tmp_path / "o"
        code = cli.main(["--out", str(out),
                         "--set", "reconstruct.band_n=48",
                         "--set", "reconstruct.rho=0", "reconstruct",
                         "--input", str(path)])
        assert code == cli.EXIT_OK
        report = read_report(out / "recon_report.txt")
        assert abs(float(report["correlation"])) < 0.05


class TestScan2dCommand:
    def test_reduced_scan_entangled_signature(self, tmp_path):
        out = tmp_path / "o"
        code = cli.main(["--out", str(out), "--noiseless",
                         "--set", "scan.x1_halfspan_mm=0.6",
                         "--set", "scan.x1_step_mm=0.2",
                         "--set", "scan.fringe_halfspan_mm=0.05", "scan2d"])
        assert code == cli.EXIT_OK
        report = read_report(out / "envelope_report.txt")
        assert report["entangled_signature"] == "True"
        assert (out / "scan2d.csv").exists()
