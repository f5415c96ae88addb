import numpy as np
import pytest

from ofdm_isac import (Path, Scene, Target, add_noise, apply_channel,
                       gen_data_grid, modulate, path_gain, process_frame,
                       range_to_bin, scene_from_targets)

from conftest import table1_system


def dbm(p):
    return 10 * np.log10(p * 1e3)


class TestPathGain:
    def test_reference_levels(self, params, dp):
        assert dbm(path_gain(30.5, 3.5, params, dp)) == pytest.approx(
            -64.98, abs=0.01)
        assert dbm(path_gain(304.96, 3.5, params, dp)) == pytest.approx(
            -104.97, abs=0.01)

    def test_inverse_fourth_power(self, params, dp):
        assert path_gain(10.0, 3.5, params, dp) / path_gain(
            20.0, 3.5, params, dp) == pytest.approx(16.0)

    def test_invalid_distance(self, params, dp):
        with pytest.raises(ValueError):
            path_gain(0.0, 3.5, params, dp)

    def test_target_validation(self):
        with pytest.raises(ValueError):
            Target(distance=-1.0, velocity=0.0, rcs=3.5)
        with pytest.raises(ValueError):
            Target(distance=10.0, velocity=0.0, rcs=0.0)


class TestApplyChannel:
    def test_static_target_is_exact_shift(self, params, dp):
        grid = gen_data_grid(dp, 4, 0)
        tx = modulate(grid, params, dp)
        scene = scene_from_targets([Target(30.5, 0.0, 3.5)], params, dp, 0)
        n_tau = scene.paths[0].delay_taps
        assert n_tau == 50
        rx = apply_channel(tx, scene, dp)
        assert rx.start_index == tx.start_index
        gain = scene.paths[0].gain
        assert np.allclose(rx.samples[n_tau:n_tau + 5000],
                           gain * tx.samples[:5000])
        # echo head before the delay is empty
        assert np.all(rx.samples[:n_tau] == 0)

    def test_output_extended_by_delay(self, params, dp):
        grid = gen_data_grid(dp, 4, 0)
        tx = modulate(grid, params, dp)
        scene = scene_from_targets([Target(1219.86, 0.0, 3.5)], params, dp, 0)
        rx = apply_channel(tx, scene, dp)
        assert len(rx.samples) == len(tx.samples) + 2000

    def test_linearity(self, params, dp):
        grid = gen_data_grid(dp, 4, 0)
        tx = modulate(grid, params, dp)
        scene = scene_from_targets(
            [Target(30.5, 0.0, 3.5), Target(152.48, 0.0, 3.5)],
            params, dp, 0)
        one = Scene(targets=scene.targets[:1], paths=scene.paths[:1])
        two = Scene(targets=scene.targets[1:], paths=scene.paths[1:])
        both = apply_channel(tx, scene, dp).samples
        s1 = apply_channel(tx, one, dp).samples
        s2 = apply_channel(tx, two, dp).samples
        split = np.zeros(len(both), dtype=complex)
        split[:len(s1)] += s1
        split[:len(s2)] += s2
        assert np.allclose(both, split)

    def test_gain_magnitude_matches_link_budget(self, params, dp):
        scene = scene_from_targets([Target(30.5, 0.0, 3.5)], params, dp, 0)
        # modulate carries the sqrt(P_T / N) amplitude, so the path gain
        # amplitude is the link budget with the transmit power divided out
        assert abs(scene.paths[0].gain) ** 2 == \
            pytest.approx(path_gain(30.5, 3.5, params, dp) / params.tx_power)

    def test_phase_varies_with_seed(self, params, dp):
        g0 = scene_from_targets([Target(30.5, 0.0, 3.5)], params, dp, 0)
        g1 = scene_from_targets([Target(30.5, 0.0, 3.5)], params, dp, 1)
        assert g0.paths[0].gain != g1.paths[0].gain
        assert abs(g0.paths[0].gain) == pytest.approx(abs(g1.paths[0].gain))

    def test_doppler_modes_agree_at_low_speed(self, params, dp):
        grid = gen_data_grid(dp, 4, 0)
        tx = modulate(grid, params, dp)
        scene = scene_from_targets([Target(30.5, 30.0, 3.5)], params, dp, 0)
        peaks = []
        for mode in ("per_symbol", "per_sample"):
            rx = apply_channel(tx, scene, dp, doppler_mode=mode)
            rd = process_frame(rx, grid, params, dp)
            peaks.append(rd.power.max())
        assert abs(10 * np.log10(peaks[0] / peaks[1])) < 0.1


class TestAddNoise:
    def test_noise_power_level(self, params, dp):
        frame = modulate(gen_data_grid(dp, 4, 0), params, dp)
        zero = type(frame)(samples=np.zeros(10 ** 6, dtype=complex),
                           start_index=0, sample_rate=dp.bandwidth)
        noisy = add_noise(zero, dp, 0)
        assert dbm(np.mean(np.abs(noisy.samples) ** 2)) == pytest.approx(
            -87.17, abs=0.05)

    def test_zero_noise_figure_variance(self):
        from ofdm_isac.params import K_B, derive
        p = table1_system(noise_figure_db=0.0)
        d = derive(p)
        assert d.noise_power == pytest.approx(K_B * 290.0 * d.bandwidth)

    def test_seeds_uncorrelated_and_deterministic(self, dp):
        from ofdm_isac.waveform import ComplexFrame
        zero = ComplexFrame(samples=np.zeros(10 ** 6, dtype=complex),
                            start_index=0, sample_rate=dp.bandwidth)
        a = add_noise(zero, dp, 0).samples
        b = add_noise(zero, dp, 1).samples
        again = add_noise(zero, dp, 0).samples
        assert np.array_equal(a, again)
        rho = np.vdot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b))
        assert abs(rho) < 0.01
