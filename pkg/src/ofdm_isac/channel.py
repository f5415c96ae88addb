"""Physical scene -> echo samples.

Radar-equation path gains, integer-tap delays, per-symbol Doppler rotation
and additive thermal noise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .params import C0, DerivedParams, SystemParams, round_half_up
from .waveform import ComplexFrame, rng_stream


@dataclass(frozen=True)
class Target:
    distance: float      # d_l [m]
    velocity: float      # v_l, radial [m/s]
    rcs: float           # kappa_l [m^2]

    def __post_init__(self) -> None:
        if self.distance < 0:
            raise ValueError("target distance must be >= 0")
        if self.rcs <= 0:
            raise ValueError("target rcs must be > 0")


@dataclass(frozen=True)
class Path:
    gain: complex        # alpha_l, |alpha|^2 = P_R / P_T
    delay: float         # tau_l [s]
    delay_taps: int      # N_tau_l = round(tau_l * B)
    doppler: float       # f_D_l [Hz]


@dataclass(frozen=True)
class Scene:
    targets: tuple[Target, ...]
    paths: tuple[Path, ...] = field(default=())   # sorted ascending in delay


def path_gain(d: float, rcs: float, params: SystemParams,
              dp: DerivedParams) -> float:
    """Received echo power P_R = kappa lambda^2 / ((4 pi)^3 d^4) G_T G_R P_T."""
    if d <= 0:
        raise ValueError("path_gain requires d > 0 (d^-4 singularity at 0)")
    return (rcs * dp.wavelength ** 2 / ((4.0 * np.pi) ** 3 * d ** 4)
            * params.tx_gain * params.rx_gain * params.tx_power)


def scene_from_targets(targets: Sequence[Target], params: SystemParams,
                       dp: DerivedParams, seed: int) -> Scene:
    """Build delay-sorted propagation paths with seeded random phases."""
    if not targets:
        raise ValueError("at least one target required")
    paths = []
    for i, t in enumerate(targets):
        p_r = path_gain(t.distance, t.rcs, params, dp)
        phase = rng_stream(seed, "phase", i).uniform(0.0, 2.0 * np.pi)
        tau = 2.0 * t.distance / C0
        paths.append(Path(
            gain=np.sqrt(p_r / params.tx_power) * np.exp(1j * phase),
            delay=tau,
            delay_taps=round_half_up(tau * dp.bandwidth),
            doppler=2.0 * t.velocity * params.carrier_frequency / C0,
        ))
    paths.sort(key=lambda p: p.delay)
    return Scene(targets=tuple(targets), paths=tuple(paths))


def _symbol_index_of_tap(taps: np.ndarray, dp: DerivedParams) -> np.ndarray:
    """Symbol index m for source taps (symbol m spans m*N_s - N_cp ...
    m*N_s + N - 1)."""
    return np.floor_divide(taps + dp.cp_taps, dp.symbol_taps)


def apply_channel(frame: ComplexFrame, scene: Scene, dp: DerivedParams,
                  doppler_mode: str = "per_symbol") -> ComplexFrame:
    """Superpose delayed, scaled, Doppler-rotated copies of the frame.

    The output is extended past the input by the largest path delay so late
    echo tails are kept. Samples before a delayed copy's start are zero
    (cold start: no symbol m = -1 exists).

    doppler_mode "per_symbol" applies one rotation e^{j 2 pi f_D m T_s} per
    source OFDM symbol; "per_sample" applies the exact per-tap rotation.
    """
    if doppler_mode not in ("per_symbol", "per_sample"):
        raise ValueError(f"unknown doppler_mode {doppler_mode!r}")
    max_taps = max((p.delay_taps for p in scene.paths), default=0)
    m_total = dp.num_symbols
    if scene.paths and max(p.delay for p in scene.paths) >= m_total * dp.total_symbol_duration:
        raise ValueError("path delay exceeds frame duration")
    n_in = len(frame.samples)
    out = np.zeros(n_in + max_taps, dtype=complex)
    # source tap index of each input sample
    src_taps = frame.start_index + np.arange(n_in)
    for path in scene.paths:
        if doppler_mode == "per_symbol":
            m_idx = _symbol_index_of_tap(src_taps, dp)
            rot = np.exp(2j * np.pi * path.doppler
                         * m_idx * dp.total_symbol_duration)
        else:
            rot = np.exp(2j * np.pi * path.doppler * src_taps / dp.bandwidth)
        out[path.delay_taps:path.delay_taps + n_in] += \
            path.gain * frame.samples * rot
    return ComplexFrame(samples=out, start_index=frame.start_index,
                        sample_rate=frame.sample_rate)


def add_noise(frame: ComplexFrame, dp: DerivedParams, seed: int) -> ComplexFrame:
    """Add i.i.d. circular complex Gaussian noise of total variance N_0 B."""
    rng = rng_stream(seed, "noise")
    scale = np.sqrt(dp.noise_power / 2.0)
    n = len(frame.samples)
    noise = scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return ComplexFrame(samples=frame.samples + noise,
                        start_index=frame.start_index,
                        sample_rate=frame.sample_rate)
