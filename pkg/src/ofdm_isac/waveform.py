"""Random data grid and discrete-time CP-OFDM frame synthesis."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import DerivedParams, SystemParams, SUPPORTED_MODULATION_ORDERS

# Fixed sub-stream ids so that, e.g., adding targets (phase stream) never
# perturbs the data draws.
_STREAM_IDS = {"data": 0, "phase": 1, "noise": 2}


def rng_stream(seed: int, name: str, index: int = 0) -> np.random.Generator:
    """Deterministic per-(module, index) PRNG sub-stream of one master seed."""
    return np.random.default_rng(
        np.random.SeedSequence([int(seed), _STREAM_IDS[name], int(index)]))


def constellation(order: int) -> np.ndarray:
    """Unit-average-power square QAM / PSK constellation points."""
    if order == 2:
        return np.array([1.0 + 0.0j, -1.0 + 0.0j])
    if order == 4:
        pts = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j], dtype=complex)
        return pts / np.sqrt(2.0)
    if order in (16, 64):
        side = int(np.sqrt(order))
        levels = np.arange(-(side - 1), side, 2, dtype=float)
        re, im = np.meshgrid(levels, levels)
        pts = (re + 1j * im).ravel()
        return pts / np.sqrt(np.mean(np.abs(pts) ** 2))
    raise ValueError(f"unsupported modulation order {order}")


@dataclass(frozen=True)
class DataGrid:
    """N x M matrix of constellation symbols d_km."""

    symbols: np.ndarray
    modulation_order: int
    seed: int

    @property
    def num_subcarriers(self) -> int:
        return self.symbols.shape[0]

    @property
    def num_symbols(self) -> int:
        return self.symbols.shape[1]


@dataclass(frozen=True)
class ComplexFrame:
    """Contiguous complex baseband samples.

    ``start_index`` is the signed tap offset of samples[0] relative to t = 0
    (the start of the first main symbol body); a freshly modulated frame
    starts at -N_cp.
    """

    samples: np.ndarray
    start_index: int
    sample_rate: float

    def __len__(self) -> int:
        return len(self.samples)

    def tap_slice(self, first_tap: int, count: int) -> np.ndarray:
        """Samples for taps [first_tap, first_tap + count), zero-filled
        outside the frame."""
        out = np.zeros(count, dtype=complex)
        lo = first_tap - self.start_index
        src_lo = max(lo, 0)
        src_hi = min(lo + count, len(self.samples))
        if src_hi > src_lo:
            out[src_lo - lo:src_hi - lo] = self.samples[src_lo:src_hi]
        return out


def gen_data_grid(dp: DerivedParams, order: int, seed: int) -> DataGrid:
    """Draw the N x M grid i.i.d. uniform over the unit-power constellation."""
    if order not in SUPPORTED_MODULATION_ORDERS:
        raise ValueError(f"unsupported modulation order {order}")
    pts = constellation(order)
    n, m = dp.num_subcarriers, dp.num_symbols
    rng = rng_stream(seed, "data")
    idx = rng.integers(0, len(pts), size=(n, m))
    return DataGrid(symbols=pts[idx], modulation_order=order, seed=seed)


def symbol_bodies(grid: DataGrid, amplitude: float = 1.0) -> np.ndarray:
    """Main symbol bodies x_m[n] = amplitude * sum_k d_km e^{j 2 pi k n / N}.

    Returns an N x M matrix (column m = body of symbol m). Synthesis places
    subcarrier k at baseband bin k with an unscaled inverse DFT (the 1/N of
    numpy's ifft is undone).
    """
    n = grid.num_subcarriers
    return amplitude * n * np.fft.ifft(grid.symbols, axis=0)


def modulate(grid: DataGrid, params: SystemParams, dp: DerivedParams) -> ComplexFrame:
    """Synthesize the CP-OFDM frame at sample rate B.

    Each symbol is its main body prefixed with a cyclic copy of the last
    N_cp body samples; symbols are concatenated with stride N_s. Amplitude
    sqrt(P_T / N) gives the frame a time-average power of P_T.
    """
    n, m = grid.num_subcarriers, grid.num_symbols
    if n != dp.num_subcarriers or m != dp.num_symbols:
        raise ValueError(
            f"grid is {n}x{m}, expected "
            f"{dp.num_subcarriers}x{dp.num_symbols}")
    amp = np.sqrt(params.tx_power / n)
    bodies = symbol_bodies(grid, amplitude=amp)
    n_cp = dp.cp_taps
    # full symbol = [tail copy | body]
    if n_cp > 0:
        sym = np.concatenate([bodies[n - n_cp:, :], bodies], axis=0)
    else:
        sym = bodies
    samples = sym.T.reshape(-1)
    return ComplexFrame(samples=samples, start_index=-n_cp,
                        sample_rate=dp.bandwidth)
