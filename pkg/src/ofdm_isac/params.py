"""System configuration and derived quantities.

All downstream math is tap-indexed, so the CP is stored canonically in taps.
The CP may be configured either in seconds or in taps (exactly one); when
given in seconds it is snapped to the nearest integer tap count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

# Speed of light [m/s]. 2.9979e8 reproduces the 88.44 m ISI-free distance of
# the 145-tap CP; 3e8 would give 88.50 m.
C0 = 2.9979e8
# Boltzmann constant [J/K]
K_B = 1.380649e-23

SUPPORTED_MODULATION_ORDERS = (2, 4, 16, 64)

# Relative mismatch allowed between cp_duration * bandwidth and the nearest
# integer tap count before we refuse to snap.
CP_TAP_REL_TOL = 1e-3


class InvalidParams(ValueError):
    """A SystemParams invariant is violated."""


class NonIntegerCpTaps(InvalidParams):
    """cp_duration * bandwidth is too far from an integer tap count."""


@dataclass(frozen=True)
class SystemParams:
    """Static system configuration (one CPI of M OFDM symbols).

    Exactly one of ``cp_duration`` [s] or ``cp_taps`` must be given.
    Antenna gains and noise figure are in dB; everything else is linear SI.
    """

    carrier_frequency: float        # f_c [Hz]
    subcarrier_spacing: float       # delta_f [Hz]
    num_subcarriers: int            # N
    num_symbols: int                # M
    tx_power: float                 # P_T [W]
    tx_gain_db: float               # G_T [dB]
    rx_gain_db: float               # G_R [dB]
    noise_figure_db: float          # N_F [dB]
    temperature: float              # T_temp [K]
    modulation_order: int = 4
    rng_seed: int = 0
    cp_duration: Optional[float] = None   # T_cp [s]
    cp_taps: Optional[int] = None         # N_cp

    def __post_init__(self) -> None:
        for name in ("carrier_frequency", "subcarrier_spacing", "tx_power",
                     "temperature"):
            if getattr(self, name) <= 0:
                raise InvalidParams(f"{name} must be strictly positive")
        if self.num_subcarriers < 2:
            raise InvalidParams("num_subcarriers must be >= 2")
        if self.num_symbols < 1:
            raise InvalidParams("num_symbols must be >= 1")
        if self.modulation_order not in SUPPORTED_MODULATION_ORDERS:
            raise InvalidParams(
                f"modulation_order must be one of {SUPPORTED_MODULATION_ORDERS}")
        if (self.cp_duration is None) == (self.cp_taps is None):
            raise InvalidParams(
                "exactly one of cp_duration or cp_taps must be given")
        if self.cp_duration is not None and self.cp_duration < 0:
            raise InvalidParams("cp_duration must be non-negative")
        if self.cp_taps is not None:
            if self.cp_taps < 0:
                raise InvalidParams("cp_taps must be non-negative")
            if self.cp_taps >= self.num_subcarriers:
                raise InvalidParams("cp_taps must be < num_subcarriers")

    @property
    def tx_gain(self) -> float:
        return 10.0 ** (self.tx_gain_db / 10.0)

    @property
    def rx_gain(self) -> float:
        return 10.0 ** (self.rx_gain_db / 10.0)

    @property
    def noise_figure(self) -> float:
        return 10.0 ** (self.noise_figure_db / 10.0)


@dataclass(frozen=True)
class DerivedParams:
    """Everything the pipeline computes from SystemParams.

    Immutable after construction; freely shareable across threads.
    """

    bandwidth: float                # B = N * delta_f [Hz]
    symbol_duration: float          # T = 1 / delta_f [s]
    total_symbol_duration: float    # T_s = T + T_cp [s]
    symbol_taps: int                # N_s = N + N_cp
    cp_taps: int                    # N_cp
    cp_duration: float              # T_cp = N_cp / B [s]
    noise_psd: float                # N_0 = k_B * T_temp * N_F [W/Hz]
    noise_power: float              # N_0 * B [W]
    isi_free_range: float           # d_cp_max = c * T_cp / 2 [m]
    unambiguous_range: float        # d_un_max = (N-1) * c / (2B) [m]
    spectral_efficiency: float      # eta = T / (T + T_cp)
    wavelength: float               # lambda = c / f_c [m]
    # echoes of the inputs that nearly every formula needs
    num_subcarriers: int
    num_symbols: int
    carrier_frequency: float


def derive(params: SystemParams) -> DerivedParams:
    """Compute all derived quantities for a given configuration.

    Pure function: identical inputs give bit-identical outputs.

    Raises NonIntegerCpTaps when cp_duration * bandwidth is more than
    CP_TAP_REL_TOL (relative) away from an integer tap count.
    """
    n = params.num_subcarriers
    bandwidth = n * params.subcarrier_spacing
    symbol_duration = 1.0 / params.subcarrier_spacing

    if params.cp_taps is not None:
        cp_taps = int(params.cp_taps)
    else:
        raw = params.cp_duration * bandwidth
        cp_taps = int(round(raw))
        if raw > 0 and abs(raw - cp_taps) > CP_TAP_REL_TOL * max(raw, 1.0):
            raise NonIntegerCpTaps(
                f"cp_duration * bandwidth = {raw:.6f} is not an integer tap "
                f"count (relative tolerance {CP_TAP_REL_TOL:g})")
        if cp_taps >= n:
            raise InvalidParams("cp_taps must be < num_subcarriers")

    cp_duration = cp_taps / bandwidth
    total_symbol_duration = symbol_duration + cp_duration
    noise_psd = K_B * params.temperature * params.noise_figure

    return DerivedParams(
        bandwidth=bandwidth,
        symbol_duration=symbol_duration,
        total_symbol_duration=total_symbol_duration,
        symbol_taps=n + cp_taps,
        cp_taps=cp_taps,
        cp_duration=cp_duration,
        noise_psd=noise_psd,
        noise_power=noise_psd * bandwidth,
        isi_free_range=C0 * cp_duration / 2.0,
        unambiguous_range=(n - 1) * C0 / (2.0 * bandwidth),
        spectral_efficiency=symbol_duration / total_symbol_duration,
        wavelength=C0 / params.carrier_frequency,
        num_subcarriers=n,
        num_symbols=params.num_symbols,
        carrier_frequency=params.carrier_frequency,
    )


def round_half_up(x: float) -> int:
    """Rounding used for delay-to-tap conversion (documented, deterministic)."""
    return int(math.floor(x + 0.5))


def range_to_bin(d: float, dp: DerivedParams) -> tuple[float, int]:
    """Round-trip delay and tap index for a target at distance d [m]."""
    if d < 0:
        raise InvalidParams("distance must be non-negative")
    delay = 2.0 * d / C0
    return delay, round_half_up(delay * dp.bandwidth)


def bin_to_range(p: int, dp: DerivedParams) -> float:
    """Distance [m] of range bin p."""
    if not 0 <= p < dp.num_subcarriers:
        raise IndexError(f"range bin {p} out of [0, {dp.num_subcarriers})")
    return p * C0 / (2.0 * dp.bandwidth)


def bin_to_velocity(q: int, dp: DerivedParams) -> float:
    """Radial velocity [m/s] of (signed) Doppler bin q."""
    m = dp.num_symbols
    if not -m / 2 <= q < m / 2:
        raise IndexError(f"doppler bin {q} out of [-{m / 2}, {m / 2})")
    return q * C0 / (2.0 * m * dp.total_symbol_duration * dp.carrier_frequency)


def signed_doppler_bin(q: int, num_symbols: int) -> int:
    """Map an FFT bin q in [0, M) to the signed interval [-M/2, M/2)."""
    return q - num_symbols if q >= num_symbols / 2 else q
