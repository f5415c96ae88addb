"""Experiment drivers: turn a Scenario into deterministic CSV artifacts.

Every run with the same scenario and seed produces byte-identical files.
Powers are reported in dBm, distances in metres.
"""
from __future__ import annotations

import numpy as np

from pathlib import Path

from . import analysis, channel, detect, receiver, waveform
from .config import Scenario
from .params import DerivedParams, derive, range_to_bin, bin_to_range

FLOOR_DBM = -400.0  # stand-in for log of exact zero power


def to_dbm(power_w: float) -> float:
    if power_w <= 0.0:
        return FLOOR_DBM
    return 10.0 * np.log10(power_w * 1e3)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".10g")
    return str(value)


def write_csv(path: Path, header: list[str], rows, meta: dict) -> None:
    """One comment line of key=value metadata, then header, then rows."""
    path.parent.mkdir(parents=True, exist_ok=True)
    meta_line = "# " + ",".join(f"{k}={_fmt(v)}" for k, v in meta.items())
    lines = [meta_line, ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _base_meta(scn: Scenario, dp: DerivedParams) -> dict:
    p = scn.system
    return {
        "seed": p.rng_seed,
        "carrier_frequency_hz": p.carrier_frequency,
        "subcarrier_spacing_hz": p.subcarrier_spacing,
        "num_subcarriers": dp.num_subcarriers,
        "num_symbols": dp.num_symbols,
        "cp_taps": dp.cp_taps,
        "cp_duration_s": dp.cp_duration,
        "tx_power_w": p.tx_power,
        "tx_gain_db": p.tx_gain_db,
        "rx_gain_db": p.rx_gain_db,
        "noise_figure_db": p.noise_figure_db,
        "temperature_k": p.temperature,
        "modulation_order": p.modulation_order,
        "bandwidth_hz": dp.bandwidth,
        "noise_power_dbm": to_dbm(dp.noise_power),
        "targets_m": ";".join(_fmt(t.distance) for t in scn.targets),
    }


def _simulate_frame(scn: Scenario, dp: DerivedParams, trial: int,
                    noiseless: bool = False, doppler_mode: str = "per_symbol"):
    """One end-to-end frame; data/phase seeds fixed, noise seed per trial."""
    p = scn.system
    grid = waveform.gen_data_grid(dp, p.modulation_order, p.rng_seed)
    tx = waveform.modulate(grid, p, dp)
    scene = channel.scene_from_targets(scn.targets, p, dp, p.rng_seed)
    rx = channel.apply_channel(tx, scene, dp, doppler_mode=doppler_mode)
    if not noiseless:
        rx = channel.add_noise(rx, dp, p.rng_seed + trial)
    return grid, rx, scene


def _rd_map(scn: Scenario, dp: DerivedParams, trial: int,
            noiseless: bool = False,
            doppler_mode: str = "per_symbol") -> np.ndarray:
    grid, rx, _ = _simulate_frame(scn, dp, trial, noiseless=noiseless,
                                  doppler_mode=doppler_mode)
    rd = receiver.process_frame(
        rx, grid, scn.system, dp, v=0,
        mode=scn.detector.removal_mode,
        discard_first_symbol=scn.detector.discard_first_symbol)
    return rd.power


def run_range_profile(scn: Scenario, out_dir: Path) -> list[Path]:
    dp = derive(scn.system)
    noiseless = bool(scn.options.get("noiseless", False))
    mode = scn.options.get("doppler_mode", "per_symbol")
    acc = np.zeros((dp.num_subcarriers, dp.num_symbols))
    for t in range(scn.trials):
        acc += _rd_map(scn, dp, t, noiseless=noiseless, doppler_mode=mode)
    acc /= scn.trials
    meta = _base_meta(scn, dp)
    meta["trials"] = scn.trials
    # analytic per-target map peak M N P_R (1-x)^2, for downstream
    # annotation without re-deriving the link budget
    meta["expected_peak_dbm"] = ";".join(
        _fmt(to_dbm(dp.num_symbols * dp.num_subcarriers
                    * channel.path_gain(t.distance, t.rcs, scn.system, dp)
                    * (1.0 - analysis.excess_fraction(t.distance, dp)) ** 2))
        for t in scn.targets)
    profile = acc[:, 0]
    rows = [(p, bin_to_range(p, dp), to_dbm(profile[p]))
            for p in range(dp.num_subcarriers)]
    path = out_dir / "range_profile.csv"
    write_csv(path, ["bin", "distance_m", "power_dbm"], rows, meta)
    return [path]


def run_range_doppler(scn: Scenario, out_dir: Path) -> list[Path]:
    dp = derive(scn.system)
    noiseless = bool(scn.options.get("noiseless", False))
    mode = scn.options.get("doppler_mode", "per_symbol")
    acc = np.zeros((dp.num_subcarriers, dp.num_symbols))
    for t in range(scn.trials):
        acc += _rd_map(scn, dp, t, noiseless=noiseless, doppler_mode=mode)
    acc /= scn.trials
    meta = _base_meta(scn, dp)
    meta["trials"] = scn.trials
    rows = [(p, q, to_dbm(acc[p, q]))
            for p in range(dp.num_subcarriers)
            for q in range(dp.num_symbols)]
    path = out_dir / "range_doppler.csv"
    write_csv(path, ["range_bin", "doppler_bin", "power_dbm"], rows, meta)
    return [path]


def _sweep_distances(scn: Scenario) -> np.ndarray:
    opts = scn.options
    if "distances_m" in opts:
        return np.asarray([float(d) for d in opts["distances_m"]])
    d_lo = float(opts.get("distance_min_m", 50.0))
    d_hi = float(opts.get("distance_max_m", 1200.0))
    n = int(opts.get("num_points", 20))
    return np.linspace(d_lo, d_hi, n)


def measure_sinr(scn: Scenario, dp: DerivedParams, distance: float,
                 rcs: float) -> float:
    """Monte Carlo peak SINR for a single static target.

    The receiver is linear, so a noisy map decomposes exactly into the
    noiseless map plus a processed-noise map. The peak-bin signal power is
    therefore read from one noiseless run while the total floor (thermal
    noise plus data-dependent leakage) is averaged over noisy trials.
    """
    from dataclasses import replace

    probe = channel.Target(distance=distance, velocity=0.0, rcs=rcs)
    sub = Scenario(system=scn.system, targets=[probe], detector=scn.detector,
                   experiment=scn.experiment, trials=scn.trials,
                   output_dir=scn.output_dir, options=scn.options)
    _, p_bin = range_to_bin(distance, dp)
    p_bin %= dp.num_subcarriers
    # peak power carries a data-dependent cross term with the target's own
    # leakage pedestal; average it out over independent data grids
    n_data = min(scn.trials, 8)
    peak = 0.0
    for k in range(n_data):
        sub_k = replace(sub, system=replace(
            scn.system, rng_seed=scn.system.rng_seed + 7919 * k))
        clean = _rd_map(sub_k, dp, 0, noiseless=True)
        peak += clean[p_bin, 0]
    peak /= n_data
    cfg = scn.detector.resolved(dp)
    floor = 0.0
    for t in range(scn.trials):
        noisy = _rd_map(sub, dp, t, noiseless=False)
        floor += detect.noise_floor(noisy, cfg.p_max, cfg.q_max)
    floor /= scn.trials
    return peak / floor


def run_sinr_curve(scn: Scenario, out_dir: Path) -> list[Path]:
    dp = derive(scn.system)
    rcs = scn.targets[0].rcs if scn.targets else 3.5
    distances = _sweep_distances(scn)
    rows = []
    for d in distances:
        rep = analysis.sinr_single(d, rcs, scn.system, dp)
        gamma_sim = measure_sinr(scn, dp, d, rcs)
        scene = channel.scene_from_targets(
            [channel.Target(distance=d, velocity=0.0, rcs=rcs)],
            scn.system, dp, scn.system.rng_seed)
        gamma_sw = analysis.sinr_sliding(d, rcs, scene, scn.system, dp)
        rows.append((float(d), 10 * np.log10(rep.sinr),
                     10 * np.log10(gamma_sim), 10 * np.log10(gamma_sw.sinr)))
    meta = _base_meta(scn, dp)
    meta["trials"] = scn.trials
    path = out_dir / "sinr_curve.csv"
    write_csv(path, ["distance_m", "gamma_analytic_db", "gamma_simulated_db",
                     "gamma_sliding_db"], rows, meta)
    return [path]


def run_validate(scn: Scenario, out_dir: Path) -> list[Path]:
    dp = derive(scn.system)
    rcs = scn.targets[0].rcs if scn.targets else 3.5
    distances = _sweep_distances(scn)
    rows = []
    for d in distances:
        rep = analysis.sinr_single(d, rcs, scn.system, dp)
        gamma_sim = measure_sinr(scn, dp, d, rcs)
        err = abs(10 * np.log10(gamma_sim) - 10 * np.log10(rep.sinr))
        rows.append((float(d), err))
    meta = _base_meta(scn, dp)
    meta["trials"] = scn.trials
    path = out_dir / "validate_report.csv"
    write_csv(path, ["distance_m", "abs_error_db"], rows, meta)
    return [path]


def run_max_range_sweep(scn: Scenario, out_dir: Path) -> list[Path]:
    from dataclasses import replace

    dp0 = derive(scn.system)
    rho = float(scn.options.get("rho", scn.detector.rho))
    model = scn.options.get("model", "conventional")
    rcs = scn.targets[0].rcs if scn.targets else 3.5
    cps = [float(c) for c in scn.options.get(
        "cp_durations_s", [dp0.cp_duration])]
    ms = [int(m) for m in scn.options.get("m_symbols",
                                          [scn.system.num_symbols])]
    rows = []
    for m in ms:
        for cp in cps:
            # snap requested durations to an integral tap count
            taps = int(round(cp * dp0.bandwidth))
            sysp = replace(scn.system, num_symbols=m, cp_duration=None,
                           cp_taps=taps)
            dp = derive(sysp)
            try:
                d_star = analysis.max_range(rho, model, rcs, sysp, dp)
            except analysis.NoRange:
                d_star = 0.0
            rows.append((dp.cp_duration, m, d_star))
    meta = _base_meta(scn, dp0)
    meta["rho"] = rho
    meta["model"] = model
    path = out_dir / "max_range.csv"
    write_csv(path, ["cp_duration_s", "m_symbols", "max_range_m"], rows, meta)
    return [path]


def run_constellation(scn: Scenario, out_dir: Path) -> list[Path]:
    dp = derive(scn.system)
    n_tau = int(scn.options.get("delay_taps", dp.cp_taps + 29))
    n_samples = int(scn.options.get("samples", 2000))
    res = analysis.interference_samples(
        n_tau, dp.cp_taps, dp.num_subcarriers,
        scn.system.modulation_order, scn.system.rng_seed,
        trials=max(1, -(-n_samples // dp.num_subcarriers)))
    rows = []
    for kind, z in (("ici", res.ici), ("isi", res.isi)):
        for v in z[:n_samples]:
            rows.append((kind, float(v.real), float(v.imag)))
    meta = _base_meta(scn, dp)
    meta["delay_taps"] = n_tau
    path = out_dir / "constellation.csv"
    write_csv(path, ["kind", "re", "im"], rows, meta)
    return [path]


def run_sliding_window(scn: Scenario, out_dir: Path,
                       trace_windows: bool | None = None) -> list[Path]:
    dp = derive(scn.system)
    trace = bool(scn.options.get("trace_windows", False)
                 if trace_windows is None else trace_windows)
    grid, rx, _ = _simulate_frame(scn, dp, 0)
    result = detect.sliding_window_detect(rx, grid, scn.system, dp,
                                          scn.detector)
    meta = _base_meta(scn, dp)
    meta["rho"] = scn.detector.rho
    rows = [(det.window_index, det.range_bin, det.distance, det.velocity,
             to_dbm(det.power)) for det in result.detections]
    path = out_dir / "detections.csv"
    write_csv(path, ["window", "range_bin", "distance_m", "velocity_mps",
                     "power_dbm"], rows, meta)
    paths = [path]
    if trace:
        for trace_rec in result.windows:
            v = trace_rec.window_index
            wmeta = dict(meta)
            wmeta["window"] = v
            wmeta["noise_floor_dbm"] = to_dbm(trace_rec.noise_floor)
            wrows = [(p, q, to_dbm(trace_rec.rd_map.power[p, q]))
                     for p in range(dp.cp_taps or dp.num_subcarriers)
                     for q in range(dp.num_symbols)]
            wpath = out_dir / f"window_{v:02d}_range_doppler.csv"
            write_csv(wpath, ["range_bin", "doppler_bin", "power_dbm"],
                      wrows, wmeta)
            paths.append(wpath)
    return paths


RUNNERS = {
    "range_profile": run_range_profile,
    "range_doppler": run_range_doppler,
    "sinr_curve": run_sinr_curve,
    "max_range_sweep": run_max_range_sweep,
    "constellation": run_constellation,
    "sliding_window": run_sliding_window,
    "validate": run_validate,
}


def run_experiment(scn: Scenario, out_dir: Path | None = None) -> list[Path]:
    out = Path(out_dir) if out_dir is not None else scn.output_dir
    return RUNNERS[scn.experiment](scn, out)
