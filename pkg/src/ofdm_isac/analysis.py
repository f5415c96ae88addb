"""Closed-form interference and SINR models, plus the max-range solver.

All SINR math is done in linear units; dB appears only at the presentation
boundary (CSV/report formatting), so the bisection never compounds log
rounding.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import Scene, Target, path_gain
from .params import C0, DerivedParams, SystemParams, round_half_up
from .waveform import constellation, rng_stream


class NoRange(ValueError):
    """The SINR is already below the detection threshold at d = 1 m."""


@dataclass(frozen=True)
class InterferenceSplit:
    """Unit-power split of a demodulated symbol into useful/ICI/ISI parts."""

    p_useful: float
    p_ici: float
    p_isi: float
    excess_taps: float      # (N_tau - N_cp)^+

    @property
    def total_interference(self) -> float:
        return self.p_ici + self.p_isi


@dataclass(frozen=True)
class SinrReport:
    snr_free: float          # gamma_1, linear
    sinr: float              # gamma (or gamma_sw), linear
    degradation_db: float    # vs the always-sufficient-CP baseline M * gamma_1
    noise_term: float        # 1 / gamma_1
    interference_term: float  # normalized interference in the denominator

    @property
    def sinr_db(self) -> float:
        return 10.0 * np.log10(self.sinr)


def interference_split(n_tau: float, n_cp: float, n: int) -> InterferenceSplit:
    """P_u = (1-x)^2, P_ICI = (1-x)x, P_ISI = x with x = (N_tau - N_cp)^+ / N.

    The three components sum to 1 exactly whenever x > 0.
    """
    if n_cp < 0 or n_cp >= n:
        raise ValueError("need 0 <= n_cp < n")
    if n_tau < 0:
        raise ValueError("n_tau must be >= 0")
    x = max(0.0, n_tau - n_cp) / n
    return InterferenceSplit(p_useful=(1.0 - x) ** 2,
                             p_ici=(1.0 - x) * x,
                             p_isi=x,
                             excess_taps=max(0.0, n_tau - n_cp))


def excess_fraction(d: float, dp: DerivedParams) -> float:
    """x = (N_tau - N_cp)^+ / N for a target at distance d, tap-rounded."""
    n_tau = round_half_up(2.0 * d / C0 * dp.bandwidth)
    return max(0, n_tau - dp.cp_taps) / dp.num_subcarriers


def snr_free(d: float, rcs: float, params: SystemParams,
             dp: DerivedParams) -> float:
    """Interference-free per-symbol range-profile SNR gamma_1 = P_R/(N_0 df)."""
    return path_gain(d, rcs, params, dp) / (dp.noise_psd
                                            * (dp.bandwidth / dp.num_subcarriers))


def _report(x: float, noise_term: float, interference_term: float,
            m: int, gamma1: float, numerator_degraded: bool) -> SinrReport:
    num = m * (1.0 - x) ** 2 if numerator_degraded else float(m)
    sinr = num / (noise_term + interference_term)
    return SinrReport(snr_free=gamma1, sinr=sinr,
                      degradation_db=10.0 * np.log10(m * gamma1 / sinr),
                      noise_term=noise_term,
                      interference_term=interference_term)


def sinr_single(d: float, rcs: float, params: SystemParams,
                dp: DerivedParams) -> SinrReport:
    """Coherently combined range-profile SINR of a lone target,

    gamma(d) = M (1-x)^2 / (1/gamma_1 + x (2-x) / N).
    """
    gamma1 = snr_free(d, rcs, params, dp)
    x = excess_fraction(d, dp)
    return _report(x, 1.0 / gamma1, x * (2.0 - x) / dp.num_subcarriers,
                   dp.num_symbols, gamma1, numerator_degraded=True)


def sinr_upper(d: float, rcs: float, params: SystemParams,
               dp: DerivedParams) -> float:
    """Large-N limit gamma_bar(d) = gamma_1 M (1 - (tau - T_cp)^+ / T)^2."""
    tau = 2.0 * d / C0
    x = max(0.0, tau - dp.cp_duration) / dp.symbol_duration
    return snr_free(d, rcs, params, dp) * dp.num_symbols * (1.0 - x) ** 2


def total_interference(scene: Scene, params: SystemParams,
                       dp: DerivedParams) -> float:
    """Total ICI+ISI power I_t = sum_l x_l (2 - x_l) P_R,l [watts]."""
    total = 0.0
    for t in scene.targets:
        x = excess_fraction(t.distance, dp)
        if x > 0:
            total += x * (2.0 - x) * path_gain(t.distance, t.rcs, params, dp)
    return total


def _probe_in_scene(d_probe: float, rcs: float, scene: Scene) -> Target:
    for t in scene.targets:
        if np.isclose(t.distance, d_probe) and np.isclose(t.rcs, rcs):
            return t
    raise ValueError(f"probe target (d={d_probe}, rcs={rcs}) not in scene")


def sinr_multi(d_probe: float, rcs: float, scene: Scene,
               params: SystemParams, dp: DerivedParams) -> SinrReport:
    """Range-profile SINR of one scene member under everyone's ICI/ISI.

    The denominator interference term is I_t normalized by the probe's
    received power, the only reading that keeps the expression
    dimensionless and reduces to the single-target form.
    """
    _probe_in_scene(d_probe, rcs, scene)
    gamma1 = snr_free(d_probe, rcs, params, dp)
    x = excess_fraction(d_probe, dp)
    p_r = path_gain(d_probe, rcs, params, dp)
    i_term = total_interference(scene, params, dp) / (p_r * dp.num_subcarriers)
    return _report(x, 1.0 / gamma1, i_term, dp.num_symbols, gamma1,
                   numerator_degraded=True)


def sinr_sliding(d: float, rcs: float, scene: Scene, params: SystemParams,
                 dp: DerivedParams) -> SinrReport:
    """Sliding-window SINR gamma_sw = M / (1/gamma_1 + I_t / (N P_R)).

    The useful-power degradation is fully restored by the shifted window;
    the scene's ICI/ISI floor remains.
    """
    gamma1 = snr_free(d, rcs, params, dp)
    p_r = path_gain(d, rcs, params, dp)
    i_term = total_interference(scene, params, dp) / (p_r * dp.num_subcarriers)
    return _report(0.0, 1.0 / gamma1, i_term, dp.num_symbols, gamma1,
                   numerator_degraded=False)


def max_range(rho: float, model: str, rcs: float, params: SystemParams,
              dp: DerivedParams) -> float:
    """Largest d with SINR(d) >= rho, by bisection on [1 m, d_un_max].

    ``model`` is "conventional" (gamma) or "sliding" (gamma_sw of a lone
    target). The result is capped at the unambiguous range, where range
    bins alias.
    """
    if rho <= 0:
        raise ValueError("rho must be > 0")
    if model not in ("conventional", "sliding"):
        raise ValueError(f"unknown model {model!r}")

    def gamma_of(d: float) -> float:
        if model == "conventional":
            return sinr_single(d, rcs, params, dp).sinr
        scene = Scene(targets=(Target(distance=d, velocity=0.0, rcs=rcs),))
        return sinr_sliding(d, rcs, scene, params, dp).sinr

    lo, hi = 1.0, dp.unambiguous_range
    if gamma_of(lo) <= rho:
        raise NoRange(f"SINR at 1 m is already <= rho = {rho}")
    if gamma_of(hi) > rho:
        return hi
    half_bin = C0 / (4.0 * dp.bandwidth)
    while hi - lo > half_bin:
        mid = 0.5 * (lo + hi)
        if gamma_of(mid) > rho:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class InterferenceSamples:
    """Raw masked ICI/ISI samples (normalized so variances equal
    P_ICI / P_ISI) with summary statistics."""

    ici: np.ndarray
    isi: np.ndarray
    ici_mean: complex
    isi_mean: complex
    ici_var: float
    isi_var: float
    ici_kurtosis: float
    isi_kurtosis: float


def _kurtosis(z: np.ndarray) -> float:
    p = np.abs(z) ** 2
    denom = float(np.mean(p)) ** 2 if p.size else 0.0
    if denom == 0.0:
        return float("nan")
    return float(np.mean(p ** 2) / denom)


def interference_samples(n_tau: int, n_cp: int, n: int, order: int,
                         seed: int, trials: int = 1) -> InterferenceSamples:
    """Construct the masked interference I_c'[i], I_s'[i] from random data.

    Builds the two-piece detection-window signal (previous-symbol leakage
    plus truncated current symbol) with unit path gain, demodulates,
    subtracts the useful component and divides by the current data. The
    returned samples are scaled by 1/N so their variances are directly
    comparable to P_ICI and P_ISI.
    """
    pts = constellation(order)
    rng = rng_stream(seed, "data")
    # no excess delay -> no missing head, no leakage -> identically zero
    g = max(0, n_tau - n_cp)
    ici_all, isi_all = [], []
    idx = np.arange(n)
    for _ in range(trials):
        d_cur = pts[rng.integers(0, len(pts), size=n)]
        d_prev = pts[rng.integers(0, len(pts), size=n)]
        body_cur = n * np.fft.ifft(d_cur)
        body_prev = n * np.fft.ifft(d_prev)
        # current symbol, head of length g missing (ICI part)
        y_c = np.where(idx >= g, body_cur[(idx - n_tau) % n], 0.0)
        # previous-symbol leakage occupying the first g samples (ISI part)
        y_s = np.where(idx < g, body_prev[(idx + n + n_cp - n_tau) % n], 0.0)
        useful = (n - g) * d_cur * np.exp(-2j * np.pi * idx * n_tau / n)
        ici_all.append((np.fft.fft(y_c) - useful) / d_cur / n)
        isi_all.append(np.fft.fft(y_s) / d_cur / n)
    ici = np.concatenate(ici_all)
    isi = np.concatenate(isi_all)
    return InterferenceSamples(
        ici=ici, isi=isi,
        ici_mean=complex(np.mean(ici)), isi_mean=complex(np.mean(isi)),
        ici_var=float(np.mean(np.abs(ici) ** 2)),
        isi_var=float(np.mean(np.abs(isi) ** 2)),
        ici_kurtosis=_kurtosis(ici), isi_kurtosis=_kurtosis(isi),
    )
