"""OFDM integrated sensing and communication simulator.

Discrete-time simulation of a cyclic-prefix OFDM radar: waveform
generation, multi-target delay/Doppler channel, periodogram-style
range-Doppler processing, closed-form SINR models and a sliding-window
detector with successive echo cancellation that extends the sensing range
beyond the interference-free limit set by the cyclic prefix.
"""
from .params import (C0, K_B, SystemParams, DerivedParams, derive,
                     InvalidParams, NonIntegerCpTaps, range_to_bin,
                     bin_to_range, bin_to_velocity)
from .waveform import DataGrid, ComplexFrame, gen_data_grid, modulate
from .channel import (Target, Path, Scene, path_gain, scene_from_targets,
                      apply_channel, add_noise)
from .receiver import (RangeDopplerMap, Detection, extract_symbols,
                       demodulate, remove_data, range_profiles,
                       range_doppler, find_peaks, process_frame,
                       WindowExceedsFrame)
from .analysis import (InterferenceSplit, SinrReport, interference_split,
                       snr_free, sinr_single, sinr_upper, sinr_multi,
                       sinr_sliding, max_range, interference_samples,
                       NoRange)
from .detect import (DetectorConfig, SlidingWindowResult,
                     sliding_window_detect, CancelDivergence)
from .config import Scenario, ConfigError, load_config, parse_config

__version__ = "0.1.0"

__all__ = [
    "C0", "K_B", "SystemParams", "DerivedParams", "derive", "InvalidParams",
    "NonIntegerCpTaps", "range_to_bin", "bin_to_range", "bin_to_velocity",
    "DataGrid", "ComplexFrame", "gen_data_grid", "modulate",
    "Target", "Path", "Scene", "path_gain", "scene_from_targets",
    "apply_channel", "add_noise",
    "RangeDopplerMap", "Detection", "extract_symbols", "demodulate",
    "remove_data", "range_profiles", "range_doppler", "find_peaks",
    "process_frame", "WindowExceedsFrame",
    "InterferenceSplit", "SinrReport", "interference_split", "snr_free",
    "sinr_single", "sinr_upper", "sinr_multi", "sinr_sliding", "max_range",
    "interference_samples", "NoRange",
    "DetectorConfig", "SlidingWindowResult", "sliding_window_detect",
    "CancelDivergence",
    "Scenario", "ConfigError", "load_config", "parse_config",
]
