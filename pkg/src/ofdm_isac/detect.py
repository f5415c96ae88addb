"""Sliding-window sensing detection.

Iteratively: window the received stream, run the standard receiver chain,
threshold peaks inside the CP-length interest range, reconstruct the
in-window echoes with an FIR response estimated from the range profiles,
subtract them from the stream, and advance the window by one CP length
until the configured maximum range is covered.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.signal import fftconvolve

from .params import C0, DerivedParams, SystemParams
from .receiver import (Detection, RangeDopplerMap, demodulate, extract_symbols,
                       find_peaks, range_doppler, range_profiles, remove_data,
                       to_detection)
from .waveform import ComplexFrame, DataGrid, symbol_bodies


class CancelDivergence(RuntimeError):
    """Post-cancellation residual power grew by more than 3 dB."""


@dataclass(frozen=True)
class DetectorConfig:
    rho: float = 10.0                      # detection threshold, > 1
    d_max: float = 0.0                     # m; 0 means "use d_un_max"
    n_lag: int = 16                        # non-causal FIR taps
    p_max: Optional[int] = None            # noise-floor region start (range)
    q_max: Optional[int] = None            # noise-floor region start (Doppler)
    discard_first_symbol: bool = False
    removal_mode: str = "divide"

    def __post_init__(self) -> None:
        if self.rho <= 1:
            raise ValueError("rho must be > 1")
        if self.n_lag < 0:
            raise ValueError("n_lag must be >= 0")

    def resolved(self, dp: DerivedParams) -> "ResolvedDetectorConfig":
        n, m = dp.num_subcarriers, dp.num_symbols
        p_max = math.ceil(0.75 * n) if self.p_max is None else self.p_max
        q_max = math.ceil(0.75 * m) if self.q_max is None else self.q_max
        if not 0 <= p_max < n:
            raise ValueError("p_max must be in [0, N)")
        if not 0 <= q_max < m:
            raise ValueError("q_max must be in [0, M)")
        d_max = self.d_max if self.d_max > 0 else dp.unambiguous_range
        if d_max > dp.unambiguous_range:
            raise ValueError("d_max must be <= the unambiguous range")
        return ResolvedDetectorConfig(
            rho=self.rho, d_max=d_max, n_lag=self.n_lag, p_max=p_max,
            q_max=q_max, discard_first_symbol=self.discard_first_symbol,
            removal_mode=self.removal_mode)


@dataclass(frozen=True)
class ResolvedDetectorConfig:
    rho: float
    d_max: float
    n_lag: int
    p_max: int
    q_max: int
    discard_first_symbol: bool
    removal_mode: str


@dataclass(frozen=True)
class FirResponse:
    """Estimated in-window impulse response, one column per OFDM symbol.

    Tap p corresponds to window-relative delay p - lag.
    """

    taps: np.ndarray          # (N_cp + N_lag) x M complex
    lag: int
    source_window: int


@dataclass
class WindowTrace:
    window_index: int
    noise_floor: float
    rd_map: RangeDopplerMap
    detections: list[Detection]


@dataclass
class SlidingWindowResult:
    detections: list[Detection]
    windows: list[WindowTrace] = field(default_factory=list)


def v_max_windows(d_max: float, dp: DerivedParams) -> int:
    """Last window index: v_max = floor(2 d_max / (c T_cp) - 1)."""
    return int(math.floor(2.0 * d_max / (C0 * dp.cp_duration) - 1.0))


def noise_floor(rd_map: RangeDopplerMap | np.ndarray, p_max: int,
                q_max: int) -> float:
    """Mean map power over range bins >= p_max and Doppler bins >= q_max."""
    power = rd_map.power if isinstance(rd_map, RangeDopplerMap) else rd_map
    region = power[p_max:, q_max:]
    if region.size == 0:
        raise ValueError("empty noise-floor region")
    return float(np.mean(region))


def detect_window(rd_map: RangeDopplerMap, floor: float, rho: float,
                  range_limit: int, params: SystemParams,
                  dp: DerivedParams) -> list[Detection]:
    """Thresholded peaks with p < range_limit, sorted by range bin."""
    if range_limit > dp.num_subcarriers:
        raise ValueError("range_limit must be <= N")
    peaks = find_peaks(rd_map.power, threshold=rho * floor,
                       range_limit=range_limit)
    dets = [to_detection(p, q, power, rd_map.window_shift, params, dp)
            for p, q, power in peaks]
    return sorted(dets, key=lambda d: d.range_bin)


def fir_estimate(profiles: np.ndarray, n_cp: int, n_lag: int,
                 source_window: int = 0) -> FirResponse:
    """Read the FIR taps circularly off each per-symbol range profile:

    h_m[p] = (1/N) R_m[(p - N_lag) mod N],  p = 0 ... N_cp + N_lag - 1.

    With the synthesis convention pinned in `waveform` (subcarrier k at
    baseband bin k), the profile is the scaled impulse response directly
    and no additional half-band phase shift is needed.
    """
    n = profiles.shape[0]
    if n_lag >= n - n_cp:
        raise ValueError("n_lag must be < N - N_cp")
    idx = (np.arange(n_cp + n_lag) - n_lag) % n
    return FirResponse(taps=profiles[idx, :] / n, lag=n_lag,
                       source_window=source_window)


def mask_fir(fir: FirResponse, range_bins: list[int],
             half_width: int = 3) -> FirResponse:
    """Keep only taps within half_width bins of a detected peak.

    Subtracting the full tap band would also subtract the noise projection
    over N_cp + N_lag bins per symbol. Those bins alias into the noise-floor
    region of later window positions, dragging the re-estimated floor (and
    with it the detection threshold) down run after run. Restricting the
    reconstruction to the detected peaks cancels the same target energy
    while leaving the floor statistics intact.
    """
    keep = np.zeros(fir.taps.shape[0], dtype=bool)
    for p in range_bins:
        lo = max(0, p + fir.lag - half_width)
        hi = min(len(keep), p + fir.lag + half_width + 1)
        keep[lo:hi] = True
    taps = np.where(keep[:, None], fir.taps, 0.0)
    return FirResponse(taps=taps, lag=fir.lag,
                       source_window=fir.source_window)


def _transmit_bodies(grid: DataGrid) -> np.ndarray:
    """Unit-amplitude regenerated transmit symbols (N x M).

    Amplitude is deliberately omitted: the FIR taps estimated from the
    range profile already carry sqrt(P_T / N) alpha.
    """
    return symbol_bodies(grid, amplitude=1.0)


def regenerated_stream(grid: DataGrid, dp: DerivedParams) -> np.ndarray:
    """Unit-amplitude regenerated transmit stream: [CP | body] per symbol.

    Sample 0 sits at absolute tap -N_cp.
    """
    n, n_cp, n_s = dp.num_subcarriers, dp.cp_taps, dp.symbol_taps
    bodies = _transmit_bodies(grid)
    out = np.empty((dp.num_symbols, n_s), dtype=complex)
    out[:, :n_cp] = bodies[n - n_cp:, :].T
    out[:, n_cp:] = bodies.T
    return out.reshape(-1)


def reconstruct_echo(grid: DataGrid, fir: FirResponse, dp: DerivedParams,
                     out_len: int, start_index: int,
                     average_symbols: bool = True,
                     tx_stream: Optional[np.ndarray] = None) -> np.ndarray:
    """Estimated echo of the in-window targets over the full sample stream.

    Per symbol m, convolve the regenerated transmit samples (CP included,
    so the filter memory sees true past samples) with that symbol's taps,
    placed at absolute delay v*N_cp + (p - N_lag). With ``average_symbols``
    the per-symbol taps are averaged first (static scenes), cutting filter
    estimation noise by about 10 log10(M) dB.
    """
    n_cp, n_s = dp.cp_taps, dp.symbol_taps
    taps = fir.taps
    if average_symbols:
        taps = np.repeat(np.mean(taps, axis=1, keepdims=True),
                         dp.num_symbols, axis=1)
    stream = regenerated_stream(grid, dp) if tx_stream is None else tx_stream
    echo = np.zeros(out_len, dtype=complex)
    base_delay = fir.source_window * n_cp - fir.lag
    # masked taps are sparse: add one scaled shifted stream per active row
    active = np.nonzero(np.any(taps != 0.0, axis=1))[0]
    for i in active:
        gains = taps[i, :]
        if np.all(gains == gains[0]):
            seg = stream * gains[0]
        else:
            seg = (stream.reshape(dp.num_symbols, n_s)
                   * gains[:, None]).reshape(-1)
        lo = -n_cp + base_delay + int(i) - start_index
        a, b = max(lo, 0), min(lo + len(seg), out_len)
        if b > a:
            echo[a:b] += seg[a - lo:b - lo]
    return echo


def reconstruct_and_cancel(frame: ComplexFrame, grid: DataGrid,
                           fir: FirResponse, dp: DerivedParams,
                           average_symbols: bool = True,
                           tx_stream: Optional[np.ndarray] = None) -> ComplexFrame:
    """Subtract the reconstructed in-window echo from the sample stream.

    Raises CancelDivergence if the residual power grows by > 3 dB over the
    window's symbol span (guards against unstable reconstruction).
    """
    echo = reconstruct_echo(grid, fir, dp, len(frame.samples),
                            frame.start_index, average_symbols,
                            tx_stream=tx_stream)
    residual = frame.samples - echo
    span = _window_span(frame, dp, fir.source_window)
    pre = float(np.mean(np.abs(frame.samples[span]) ** 2))
    post = float(np.mean(np.abs(residual[span]) ** 2))
    if pre > 0 and post > pre * 10 ** 0.3:
        raise CancelDivergence(
            f"residual power rose {10 * np.log10(post / pre):.2f} dB in "
            f"window {fir.source_window}")
    return ComplexFrame(samples=residual, start_index=frame.start_index,
                        sample_rate=frame.sample_rate)


def _window_span(frame: ComplexFrame, dp: DerivedParams, v: int) -> slice:
    first = v * dp.cp_taps - frame.start_index
    last = (dp.num_symbols - 1) * dp.symbol_taps + v * dp.cp_taps \
        + dp.num_subcarriers - frame.start_index
    return slice(max(first, 0), min(last, len(frame.samples)))


def sliding_window_detect(rx: ComplexFrame, grid: DataGrid,
                          params: SystemParams, dp: DerivedParams,
                          cfg: DetectorConfig) -> SlidingWindowResult:
    """Run the full sliding-window detection loop.

    The detector owns a private copy of the received samples; window v+1
    always sees the residual of all prior cancellations. Windows with no
    detections skip reconstruction entirely.
    """
    rc = cfg.resolved(dp)
    if dp.cp_taps == 0:
        # no CP: nothing to slide over, single conventional pass
        last_v = 0
    else:
        last_v = v_max_windows(rc.d_max, dp)
    # private, zero-padded copy covering the largest window shift
    end_tap = (dp.num_symbols - 1) * dp.symbol_taps \
        + last_v * dp.cp_taps + dp.num_subcarriers
    need = max(len(rx.samples), end_tap - rx.start_index)
    samples = np.zeros(need, dtype=complex)
    samples[:len(rx.samples)] = rx.samples
    residual = ComplexFrame(samples=samples, start_index=rx.start_index,
                            sample_rate=rx.sample_rate)
    result = SlidingWindowResult(detections=[])
    tx_stream: Optional[np.ndarray] = None
    v = 0
    while v <= last_v:
        sym = extract_symbols(residual, dp, v)
        F = remove_data(demodulate(sym), grid, mode=rc.removal_mode)
        profiles = range_profiles(F)
        rd_profiles = profiles[:, 1:] if rc.discard_first_symbol else profiles
        rd_map = range_doppler(rd_profiles, window_shift=v)
        floor = noise_floor(rd_map, rc.p_max, rc.q_max)
        dets = detect_window(rd_map, floor, rc.rho, dp.cp_taps or
                             dp.num_subcarriers, params, dp)
        result.detections.extend(dets)
        result.windows.append(WindowTrace(window_index=v, noise_floor=floor,
                                          rd_map=rd_map, detections=dets))
        v += 1
        if v <= last_v and dets:
            static = all(d.doppler_bin == 0 for d in dets)
            fir = fir_estimate(profiles, dp.cp_taps, rc.n_lag,
                               source_window=v - 1)
            fir = mask_fir(fir, [d.range_bin for d in dets])
            if tx_stream is None:
                tx_stream = regenerated_stream(grid, dp)
            residual = reconstruct_and_cancel(residual, grid, fir, dp,
                                              average_symbols=static,
                                              tx_stream=tx_stream)
    return result
