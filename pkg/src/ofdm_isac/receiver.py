"""Sensing receiver chain: windowing, demodulation, data removal, range
profiles, range-Doppler map and peak extraction.

Transform scalings are pinned once so the power accounting holds with no
fudge factors: forward DFT unscaled, range IDFT carries 1/N, Doppler DFT
unscaled with 1/M applied to the squared magnitude. Consequences, for
divide-mode removal and unit-modulus data:
  * per-bin noise expectation in R_m and in the RD map is N_0 B,
  * a static on-grid ISI-free target's RD peak is M N P_R.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import (C0, DerivedParams, SystemParams, bin_to_velocity,
                     signed_doppler_bin)
from .waveform import ComplexFrame, DataGrid


class WindowExceedsFrame(ValueError):
    """More than 10% of the requested window taps fall outside the frame."""


@dataclass(frozen=True)
class SymbolMatrix:
    """M windowed symbol columns y_m[n], window shifted by v CP lengths."""

    columns: np.ndarray       # N x M complex
    window_shift: int         # v


@dataclass(frozen=True)
class RangeProfile:
    values: np.ndarray        # complex, length N
    symbol_index: int


@dataclass(frozen=True)
class RangeDopplerMap:
    power: np.ndarray         # N x M, watts
    window_shift: int = 0


@dataclass(frozen=True)
class Detection:
    range_bin: int            # p_hat (window-relative)
    doppler_bin: int          # q_hat (FFT index, 0..M-1)
    distance: float           # m, includes the window offset
    velocity: float           # m/s
    power: float              # watts
    window_index: int         # v


def extract_symbols(frame: ComplexFrame, dp: DerivedParams,
                    v: int = 0) -> SymbolMatrix:
    """Window the frame: column m holds taps m*N_s + v*N_cp ... + N - 1.

    Taps beyond the frame are zero-filled; if more than 10% of all
    requested taps are missing, WindowExceedsFrame is raised.
    """
    n, m_total = dp.num_subcarriers, dp.num_symbols
    cols = np.empty((n, m_total), dtype=complex)
    end_tap = frame.start_index + len(frame.samples)
    missing = 0
    for m in range(m_total):
        first = m * dp.symbol_taps + v * dp.cp_taps
        cols[:, m] = frame.tap_slice(first, n)
        missing += min(n, max(0, first + n - end_tap))
        missing += min(n, max(0, frame.start_index - first))
    if missing > 0.10 * n * m_total:
        raise WindowExceedsFrame(
            f"{missing} of {n * m_total} window taps outside the frame")
    return SymbolMatrix(columns=cols, window_shift=v)


def demodulate(sym: SymbolMatrix) -> np.ndarray:
    """Unscaled forward DFT per column: Y_m[i] = sum_n y_m[n] e^{-j2pi ni/N}."""
    return np.fft.fft(sym.columns, axis=0)


def remove_data(Y: np.ndarray, grid: DataGrid, mode: str = "divide") -> np.ndarray:
    """Strip the known data: divide F = Y/d, or conjugate F = Y * conj(d).

    The two modes are identical for unit-modulus constellations; divide
    amplifies noise by E[1/|d|^2] for 16/64-QAM.
    """
    if Y.shape != grid.symbols.shape:
        raise ValueError(f"shape mismatch {Y.shape} vs {grid.symbols.shape}")
    if mode == "divide":
        return Y / grid.symbols
    if mode == "conjugate":
        return Y * np.conj(grid.symbols)
    raise ValueError(f"unknown data-removal mode {mode!r}")


def range_profile(f_column: np.ndarray, symbol_index: int = 0) -> RangeProfile:
    """1/N-scaled inverse DFT: R_m[p] = (1/N) sum_i F_m[i] e^{j2pi ip/N}."""
    return RangeProfile(values=np.fft.ifft(f_column),
                        symbol_index=symbol_index)


def range_profiles(F: np.ndarray) -> np.ndarray:
    """All per-symbol profiles at once (N x M; ifft over the subcarrier axis)."""
    return np.fft.ifft(F, axis=0)


def range_doppler(profiles: np.ndarray, window_shift: int = 0) -> RangeDopplerMap:
    """Power map R[p,q] = (1/M) |sum_m R_m[p] e^{-j2pi mq/M}|^2 [watts]."""
    m = profiles.shape[1]
    spec = np.fft.fft(profiles, axis=1)
    return RangeDopplerMap(power=np.abs(spec) ** 2 / m,
                           window_shift=window_shift)


def to_detection(p_hat: int, q_hat: int, power: float, v: int,
                 params: SystemParams, dp: DerivedParams) -> Detection:
    """Convert a map peak to physical range/velocity estimates."""
    n, m = dp.num_subcarriers, dp.num_symbols
    if not 0 <= p_hat < n:
        raise IndexError(f"range bin {p_hat} out of [0, {n})")
    if not 0 <= q_hat < m:
        raise IndexError(f"doppler bin {q_hat} out of [0, {m})")
    q_signed = signed_doppler_bin(q_hat, m)
    return Detection(
        range_bin=p_hat,
        doppler_bin=q_hat,
        distance=(p_hat + v * dp.cp_taps) * C0 / (2.0 * dp.bandwidth),
        velocity=bin_to_velocity(q_signed, dp),
        power=power,
        window_index=v,
    )


def find_peaks(power: np.ndarray, threshold: float = 0.0,
               range_limit: int | None = None,
               excl_range: int = 2, excl_doppler: int = 1) -> list[tuple[int, int, float]]:
    """Strict local maxima of the 2-D map above ``threshold``.

    Candidates are taken in descending power order (ties broken by lower
    range bin) with an exclusion zone of +-excl_range x +-excl_doppler
    around accepted peaks. Doppler wraps; range does not. Only range bins
    p < range_limit are considered.
    """
    n, m = power.shape
    limit = n if range_limit is None else range_limit
    # threshold first: typically only a handful of bins qualify, so the
    # neighbour comparisons only run on those candidates
    over = np.argwhere(power[:limit, :] > threshold)
    cand = []
    for p, q in over:
        x = power[p, q]
        if x <= power[p, (q - 1) % m] or x <= power[p, (q + 1) % m]:
            continue
        if p > 0 and x <= power[p - 1, q]:
            continue
        if p + 1 < n and x <= power[p + 1, q]:
            continue
        cand.append((p, q))
    order = sorted(range(len(cand)),
                   key=lambda i: (-power[cand[i][0], cand[i][1]], cand[i][0]))
    accepted: list[tuple[int, int, float]] = []
    for i in order:
        p, q = int(cand[i][0]), int(cand[i][1])
        clash = False
        for ap, aq, _ in accepted:
            dq = min((q - aq) % m, (aq - q) % m)
            if abs(p - ap) <= excl_range and dq <= excl_doppler:
                clash = True
                break
        if not clash:
            accepted.append((p, q, float(power[p, q])))
    return accepted


def process_frame(frame: ComplexFrame, grid: DataGrid, params: SystemParams,
                  dp: DerivedParams, v: int = 0, mode: str = "divide",
                  discard_first_symbol: bool = False) -> RangeDopplerMap:
    """Full chain: window -> demodulate -> remove data -> profiles -> RD map."""
    sym = extract_symbols(frame, dp, v)
    F = remove_data(demodulate(sym), grid, mode=mode)
    profiles = range_profiles(F)
    if discard_first_symbol:
        profiles = profiles[:, 1:]
    return range_doppler(profiles, window_shift=v)
