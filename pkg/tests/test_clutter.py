import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from kastap import (ChannelMismatchSpec, ClutterScenario, InvalidArgumentError, PriorDeviation, RadarConfig,
                    TaperSpec, build_clutter_matrix, build_cmt, generate_snapshots, ground_truth_covariance,
                    icm_autocorrelation)
from kastap.clutter import (channel_taper, icm_taper, load_scenario, patch_azimuths, save_scenario,
                            scenario_from_dict, scenario_to_dict)


def _sample_cov(X):
    return X @ X.conj().T / X.shape[1]


def _rel_fro(A, B):
    return np.linalg.norm(A - B) / np.linalg.norm(B)


class TestScenario:
    def test_patch_powers_match_cnr(self, scenario):
        a = scenario.patch_powers
        assert np.all(a >= 0)
        ratio = a.sum() / scenario.radar.noise_power
        assert ratio == pytest.approx(10 ** (oracles.CNR_DB / 10), rel=1e-9)

    @pytest.mark.parametrize("kw", [dict(num_patches=0), dict(cnr_db=np.inf), dict(icm_sigma_v=-0.1)])
    def test_invalid(self, kw):
        with pytest.raises(InvalidArgumentError):
            ClutterScenario(**kw)

    def test_digest_tracks_content(self, scenario):
        assert scenario.digest == ClutterScenario().digest
        assert scenario.digest != scenario.replace(icm_sigma_v=0.1).digest

    def test_yaml_round_trip(self, tmp_path):
        sc = ClutterScenario(icm_sigma_v=0.25, true_deviation=PriorDeviation(1.5, 0.01),
                             channel_mismatch=ChannelMismatchSpec(enabled=True), seed=7)
        path = tmp_path / "scene.yaml"
        save_scenario(sc, path)
        assert load_scenario(path) == sc
        assert scenario_from_dict(scenario_to_dict(sc)) == sc


class TestClutterMatrix:
    def test_single_patch_boresight(self, cfg):
        V = build_clutter_matrix(cfg, 1)
        assert patch_azimuths(1) == pytest.approx([0.0])
        assert np.allclose(V[:, 0], np.ones(64))

    def test_azimuth_grid(self):
        phi = patch_azimuths(361)
        assert phi.min() > -np.pi / 2 and phi.max() < np.pi / 2
        assert np.allclose(np.diff(phi), np.pi / 361)

    def test_matches_brute_force(self, cfg):
        assert np.allclose(build_clutter_matrix(cfg, 361), oracles.ridge_matrix(361), atol=1e-12)

    def test_ridge_identity(self, cfg):
        V = build_clutter_matrix(cfg, 361)
        # recover (f_s, f_d) from the element-1 and pulse-1 phase steps
        fs = np.angle(V[1] / V[0]) / (2 * np.pi)
        fd = np.angle(V[cfg.num_elements] / V[0]) / (2 * np.pi)
        assert np.max(np.abs(fd - cfg.beta * fs)) < 1e-12

    def test_yaw_breaks_ridge(self, cfg):
        V = build_clutter_matrix(cfg, 361, PriorDeviation(yaw_error=np.deg2rad(1.0)))
        fs = np.angle(V[1] / V[0]) / (2 * np.pi)
        fd = np.angle(V[cfg.num_elements] / V[0]) / (2 * np.pi)
        assert np.max(np.abs(fd - cfg.beta * fs)) > 1e-4

    def test_returned_copy_is_writable(self, cfg):
        V = build_clutter_matrix(cfg, 5)
        V[0, 0] = 0
        assert build_clutter_matrix(cfg, 5)[0, 0] == 1


class TestTaper:
    def test_autocorrelation_examples(self):
        assert icm_autocorrelation(0.7, 1e-3, 0.5, 0) == 1.0
        assert icm_autocorrelation(0.0, 1e-3, 0.5, 5) == 1.0
        assert icm_autocorrelation(0.5, 1 / 300, 2 / 3, 1) == pytest.approx(oracles.ZETA_LAG1_SIGMA_05, abs=5e-9)

    @given(st.floats(0, 3), st.integers(0, 20))
    def test_autocorrelation_matches_oracle(self, sv, lag):
        got = icm_autocorrelation(sv, 1 / 300, 2 / 3, lag)
        assert 0 < got <= 1 or got == 0.0
        assert got == pytest.approx(float(oracles.zeta(sv, 1 / 300, 2 / 3, lag)), rel=1e-12, abs=1e-300)

    def test_cmt_examples(self, cfg):
        assert np.array_equal(build_cmt(TaperSpec(0.0), cfg), np.ones((64, 64)))
        T = build_cmt(TaperSpec(0.5), cfg)
        assert T[0, cfg.num_elements] == pytest.approx(oracles.ZETA_LAG1_SIGMA_05, abs=5e-9)
        assert T[0, 1] == 1.0

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0, 5))
    def test_cmt_psd(self, sv):
        cfg = RadarConfig.nominal()
        T = build_cmt(TaperSpec(sv), cfg)
        assert np.allclose(T, T.T)
        assert np.linalg.eigvalsh(T).min() >= -1e-10

    def test_negative_spread_rejected(self):
        with pytest.raises(InvalidArgumentError):
            TaperSpec(-1.0)

    def test_icm_realization_unit_modulus(self, cfg, rng):
        a = icm_taper(0.5, cfg, 50, rng)
        assert np.max(np.abs(np.abs(a) - 1)) < 1e-12

    def test_icm_realization_correlation(self, cfg, rng):
        sv = 1.0
        a = icm_taper(sv, cfg, 200_000, rng)
        Z = a @ a.conj().T / a.shape[1]
        n = np.arange(cfg.num_pulses)
        target = oracles.zeta(sv, cfg.pri, cfg.wavelength, np.abs(n[:, None] - n[None, :]))
        assert np.max(np.abs(Z - target)) < 0.02

    def test_channel_taper(self):
        assert np.array_equal(channel_taper(ChannelMismatchSpec(), 8, 0), np.ones(8))
        a = channel_taper(ChannelMismatchSpec(enabled=True), 8, 3)
        b = channel_taper(ChannelMismatchSpec(enabled=True), 8, 3)
        assert np.array_equal(a, b)
        assert not np.allclose(a, 1)


class TestGroundTruth:
    def test_noise_only_limit(self):
        g = ground_truth_covariance(ClutterScenario(cnr_db=-400.0))
        assert np.allclose(g.R, np.eye(64), atol=1e-12)

    def test_hermitian_and_floor(self, truth):
        R = truth.R
        assert np.linalg.norm(R - R.conj().T) < 1e-12 * np.linalg.norm(R)
        assert np.linalg.eigvalsh(R).min() >= truth.noise_power * (1 - 1e-9)

    def test_clutter_rank_ideal(self, truth):
        assert oracles.numerical_rank(truth.clutter) == oracles.CLUTTER_RANK

    def test_clutter_rank_spreads_with_icm(self, icm_scenario):
        assert oracles.numerical_rank(ground_truth_covariance(icm_scenario).clutter) > oracles.CLUTTER_RANK

    def test_span_identity(self, truth):
        w, Q = np.linalg.eigh(truth.clutter)
        top = Q[:, w > 1e-6 * w.max()]
        P_r = top @ top.conj().T
        P_v = oracles.eig_projector(oracles.ridge_matrix(361), oracles.CLUTTER_RANK)
        assert np.linalg.norm(P_r - P_v) < 1e-8

    @settings(max_examples=10, deadline=None)
    @given(st.floats(0, 2), st.floats(-3, 3), st.floats(-0.05, 0.05), st.booleans(), st.integers(0, 100))
    def test_schur_product_psd(self, sv, dv, yaw, mismatch, seed):
        sc = ClutterScenario(icm_sigma_v=sv, true_deviation=PriorDeviation(dv, yaw),
                             channel_mismatch=ChannelMismatchSpec(enabled=mismatch), seed=seed, num_patches=91)
        Rc = ground_truth_covariance(sc).clutter
        w = np.linalg.eigvalsh(Rc)
        assert w.min() >= -1e-9 * w.max()


class TestSnapshots:
    def test_invalid_count(self, scenario):
        with pytest.raises(InvalidArgumentError):
            generate_snapshots(scenario, 0)

    def test_deterministic(self, icm_scenario):
        a = generate_snapshots(icm_scenario, 6, rng_seed=11)
        b = generate_snapshots(icm_scenario, 6, rng_seed=11)
        assert np.array_equal(a.data, b.data)
        assert a.seed == 11 and a.scenario_hash == icm_scenario.digest
        assert a.head(2).data.shape == (64, 2)
        assert not np.array_equal(a.data, generate_snapshots(icm_scenario, 6, rng_seed=12).data)

    def test_noise_only_consistency(self):
        # relative Frobenius error of a white sample covariance concentrates at sqrt(d / L)
        noise = ClutterScenario(cnr_db=-400.0)
        X = generate_snapshots(noise, 1000, 1).data
        S = _sample_cov(X)
        assert np.real(np.trace(S)) / 64 == pytest.approx(1.0, abs=0.1)
        assert _rel_fro(S, np.eye(64)) == pytest.approx(np.sqrt(64 / 1000), rel=0.1)
        X = generate_snapshots(noise, 10_000, 2).data
        assert _rel_fro(_sample_cov(X), np.eye(64)) < 0.1

    @pytest.mark.parametrize("sv", [0.0, 0.5])
    def test_large_sample_consistency(self, sv):
        sc = ClutterScenario(icm_sigma_v=sv)
        X = generate_snapshots(sc, 100_000, rng_seed=5).data
        assert _rel_fro(_sample_cov(X), ground_truth_covariance(sc).R) < 0.05

    def test_mismatch_and_deviation_consistency(self):
        sc = ClutterScenario(icm_sigma_v=0.2, channel_mismatch=ChannelMismatchSpec(enabled=True),
                             true_deviation=PriorDeviation(2.0, 0.01), num_patches=181)
        X = generate_snapshots(sc, 50_000, rng_seed=6).data
        assert _rel_fro(_sample_cov(X), ground_truth_covariance(sc).R) < 0.05
