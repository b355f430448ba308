import numpy as np
import pytest
from scipy import stats

from biphoton import core, detector
from biphoton import interferometer as ifm

FWHM = 2.0 * np.sqrt(2.0 * np.log(2.0))


class TestAccidentals:
    def test_reference_rates(self):
        assert detector.accidentals(95e3, 91e3, 4e6) == 2161.25

    def test_zero_singles(self):
        assert detector.accidentals(0.0, 91e3, 4e6) == 0.0

    def test_bilinear(self):
        base = detector.accidentals(95e3, 91e3, 4e6)
        assert detector.accidentals(2 * 95e3, 2 * 91e3, 4e6) == pytest.approx(4 * base)
        assert detector.accidentals(95e3, 91e3, 8e6) == pytest.approx(base / 2)

    def test_zero_trigger_rejected(self):
        with pytest.raises(ZeroDivisionError):
            detector.accidentals(1.0, 1.0, 0.0)


class TestPairProbability:
    def test_reference_car(self):
        assert round(detector.pair_probability_from_car(2.68), 3) == 0.373

    def test_limits(self):
        assert detector.pair_probability_from_car(1e12) == pytest.approx(0.0, abs=1e-11)
        assert detector.pair_probability_from_car(1.0) == 1.0


class TestSynthCounts:
    def test_zero_mean(self):
        assert np.all(detector.synth_counts(0.0, 10.0, 100, seed=1) == 0)

    def test_mean_and_variance(self):
        c = detector.synth_counts(1e3, 10.0, 10_000, seed=42)
        mu = 1e4
        assert abs(c.mean() - mu) < 3.0 * np.sqrt(mu / len(c))
        assert 0.95 < c.var() / c.mean() < 1.05

    def test_deterministic(self):
        a = detector.synth_counts(50.0, 2.0, 1000, seed=7)
        b = detector.synth_counts(50.0, 2.0, 1000, seed=7)
        assert np.array_equal(a, b)

    def test_validation(self):
        with pytest.raises(ValueError):
            detector.synth_counts(-1.0, 1.0, 10, seed=0)
        with pytest.raises(ValueError):
            detector.synth_counts(1.0, 1.0, 0, seed=0)

    @pytest.mark.parametrize("mean", [1.0, 10.0, 100.0])
    def test_poisson_chi_squared(self, mean):
        n = 100_000
        counts = detector.synth_counts(mean, 1.0, n, seed=2024)
        kmax = int(stats.poisson.isf(1e-6, mean))
        observed = np.bincount(counts, minlength=kmax + 1)[: kmax + 1].astype(float)
        expected = stats.poisson.pmf(np.arange(kmax + 1), mean) * n
        expected[-1] += n - expected.sum()  # fold the tail into the last bin
        observed[-1] += n - observed.sum()
        # merge bins with expected < 5 into their neighbor
        obs_m, exp_m = [], []
        o_acc = e_acc = 0.0
        for o, e in zip(observed, expected):
            o_acc += o
            e_acc += e
            if e_acc >= 5.0:
                obs_m.append(o_acc)
                exp_m.append(e_acc)
                o_acc = e_acc = 0.0
        obs_m[-1] += o_acc
        exp_m[-1] += e_acc
        _, p = stats.chisquare(obs_m, exp_m)
        assert p > 1e-3


class TestSubtractAccidentals:
    def test_exact_expectation_gives_zero(self):
        raw = np.full(5, 2161.25 * 10.0)
        assert np.all(detector.subtract_accidentals(raw, 2161.25, 10.0) == 0.0)

    def test_reference_arithmetic(self):
        assert detector.subtract_accidentals(24000.0, 2161.25, 10.0) == pytest.approx(2387.5)

    def test_zero_rate_identity(self):
        raw = np.array([1.0, 2.0, 3.0])
        assert np.array_equal(detector.subtract_accidentals(raw, 0.0, 10.0), raw)

    def test_never_clipped(self):
        assert detector.subtract_accidentals(0.0, 100.0, 1.0) == -100.0


class TestJitterModel:
    def test_quadrature_combination(self):
        j = detector.JitterModel((("pump", 3.5e-12), ("gvd", 2.34e-12), ("gvd", 2.34e-12)))
        assert j.combined_fwhm == pytest.approx(np.sqrt(3.5**2 + 2 * 2.34**2) * 1e-12)
        assert j.combined_rms == pytest.approx(j.combined_fwhm / FWHM)

    def test_negative_spread_rejected(self):
        with pytest.raises(ValueError):
            detector.JitterModel((("bad", -1e-12),))


class TestIndependentHomDip:
    def _gaussian_profile(self, fwhm=3.17e-12, step=3.3e-14, half=1e-11):
        n = int(half / step)
        dt = step * np.arange(-n, n + 1)
        s = fwhm / FWHM
        return dt, np.exp(-0.5 * (dt / s) ** 2)

    def test_zero_jitter_caps_only(self):
        dt, vis = self._gaussian_profile()
        out = detector.independent_hom_dip(dt, vis, detector.JitterModel(()))
        assert np.allclose(out, vis / 3.0, atol=1e-15)
        assert out.max() == pytest.approx(1.0 / 3.0)

    def test_never_exceeds_cap(self):
        dt, vis = self._gaussian_profile()
        for fwhm in (0.0, 1e-12, 3e-12, 1e-11):
            j = detector.JitterModel((("j", fwhm),))
            assert detector.independent_hom_dip(dt, vis, j).max() <= 1.0 / 3.0 + 1e-12

    def test_never_narrows(self):
        dt, vis = self._gaussian_profile()
        base = detector.independent_hom_dip(dt, vis, detector.JitterModel(()))

        def fwhm_of(y):
            above = y >= 0.5 * y.max()
            return dt[above][-1] - dt[above][0]

        for fwhm in (1e-12, 3e-12, 6e-12):
            out = detector.independent_hom_dip(dt, vis, detector.JitterModel((("j", fwhm),)))
            assert fwhm_of(out) >= fwhm_of(base)

    def test_gaussian_convolution_width_oracle(self):
        in_fwhm = 3.17e-12
        jit_fwhm = 3.31e-12
        dt, vis = self._gaussian_profile(fwhm=in_fwhm, half=3e-11)
        out = detector.independent_hom_dip(dt, vis, detector.JitterModel((("j", jit_fwhm),)),
                                           v_cap=1.0)
        from biphoton import fitting
        fit = fitting.fit_dip(dt, 1.0 - out)
        expect = np.sqrt(in_fwhm**2 + jit_fwhm**2)
        assert fit.fwhm == pytest.approx(expect, rel=0.01)

    def test_nonuniform_spacing_rejected(self):
        dt = np.array([0.0, 1e-12, 3e-12])
        with pytest.raises(ValueError, match="uniform"):
            detector.independent_hom_dip(dt, np.zeros(3), detector.JitterModel(()))

    def test_out_of_range_profile_rejected(self):
        dt = np.linspace(-1e-12, 1e-12, 9)
        with pytest.raises(ValueError):
            detector.independent_hom_dip(dt, np.full(9, 1.5), detector.JitterModel(()))


@pytest.fixture
def budget():
    return detector.SourceBudget(singles_rate_1=95e3, singles_rate_2=91e3,
                                 pair_probability_per_pulse=0.373,
                                 coupling_efficiency=0.313,
                                 coincidence_to_singles=0.047, car=2.68)


@pytest.fixture
def det_config():
    return detector.DetectorConfig(quantum_efficiency=0.15, trigger_rate=4e6,
                                   coincidence_window=10e-9)


class TestRateToCounts:
    def _interferogram(self, values):
        ax = ifm.Axis("delta_tau_L", 0.0, 1e-14, len(values))
        return ifm.Interferogram((ax,), np.asarray(values, float))

    def test_zero_rate_zero_accidentals(self, budget, det_config):
        quiet = detector.SourceBudget(singles_rate_1=budget.singles_rate_1,
                                      singles_rate_2=0.0,
                                      pair_probability_per_pulse=0.373,
                                      coupling_efficiency=0.313,
                                      coincidence_to_singles=0.047, car=2.68)
        ig = self._interferogram(np.zeros(16))
        out = detector.rate_to_counts(ig, quiet, det_config, 10.0, seed=3)
        assert np.all(out.counts == 0)

    def test_background_fluctuates_around_baseline(self, budget, det_config):
        quiet = detector.SourceBudget(singles_rate_1=budget.singles_rate_1,
                                      singles_rate_2=0.0,
                                      pair_probability_per_pulse=0.373,
                                      coupling_efficiency=0.313,
                                      coincidence_to_singles=0.047, car=2.68)
        ig = self._interferogram(np.ones(400))
        out = detector.rate_to_counts(ig, quiet, det_config, 10.0, seed=3)
        baseline = budget.singles_rate_1 * budget.coincidence_to_singles * 10.0
        assert abs(out.counts.mean() - baseline) < 5.0 * np.sqrt(baseline / 400)
        assert out.counts.std() > 0

    def test_deterministic_and_metadata(self, budget, det_config):
        ig = self._interferogram(1.0 - 0.9 * np.cos(np.linspace(0, 6 * np.pi, 50)))
        a = detector.rate_to_counts(ig, budget, det_config, 10.0, seed=11)
        b = detector.rate_to_counts(ig, budget, det_config, 10.0, seed=11)
        assert np.array_equal(a.counts, b.counts)
        assert a.metadata["seed"] == 11
        c = detector.rate_to_counts(ig, budget, det_config, 10.0, seed=12)
        assert not np.array_equal(a.counts, c.counts)


class TestConfigValidation:
    def test_detector_config(self):
        with pytest.raises(ValueError):
            detector.DetectorConfig(0.0, 4e6, 10e-9)
        with pytest.raises(ValueError):
            detector.DetectorConfig(0.15, -1.0, 10e-9)

    def test_source_budget(self):
        with pytest.raises(ValueError):
            detector.SourceBudget(-1.0, 91e3, 0.373, 0.313, 0.047, 2.68)
        with pytest.raises(ValueError):
            detector.SourceBudget(95e3, 91e3, 1.5, 0.313, 0.047, 2.68)
        with pytest.raises(ValueError):
            detector.SourceBudget(95e3, 91e3, 0.373, 0.313, 0.047, 0.0)
