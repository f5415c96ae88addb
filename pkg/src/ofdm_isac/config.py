"""Scenario configuration: TOML files with [system], [[targets]],
[detector] and [experiment] sections.

Keys mirror the domain-type fields in snake_case with explicit units in the
names. Unknown keys are hard errors.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .channel import Target
from .detect import DetectorConfig
from .params import SystemParams

EXPERIMENT_KINDS = ("range_profile", "range_doppler", "sinr_curve",
                    "max_range_sweep", "constellation", "sliding_window",
                    "validate")

_SYSTEM_KEYS = {
    "carrier_frequency_hz": "carrier_frequency",
    "subcarrier_spacing_hz": "subcarrier_spacing",
    "num_subcarriers": "num_subcarriers",
    "num_symbols": "num_symbols",
    "cp_duration_s": "cp_duration",
    "cp_taps": "cp_taps",
    "tx_power_w": "tx_power",
    "tx_gain_db": "tx_gain_db",
    "rx_gain_db": "rx_gain_db",
    "noise_figure_db": "noise_figure_db",
    "temperature_k": "temperature",
    "modulation_order": "modulation_order",
    "rng_seed": "rng_seed",
}

_TARGET_KEYS = {"distance_m": "distance", "velocity_mps": "velocity",
                "rcs_m2": "rcs"}

_DETECTOR_KEYS = {"rho": "rho", "d_max_m": "d_max", "n_lag": "n_lag",
                  "p_max": "p_max", "q_max": "q_max",
                  "discard_first_symbol": "discard_first_symbol",
                  "removal_mode": "removal_mode"}

# experiment-kind specific option keys (all optional)
_EXPERIMENT_KEYS = {
    "range_profile": {"doppler_mode", "noiseless"},
    "range_doppler": {"doppler_mode", "noiseless"},
    "sinr_curve": {"distance_min_m", "distance_max_m", "num_points",
                   "distances_m"},
    "max_range_sweep": {"cp_durations_s", "m_symbols", "rho", "model"},
    "constellation": {"delay_taps", "samples"},
    "sliding_window": {"trace_windows"},
    "validate": {"distance_min_m", "distance_max_m", "num_points",
                 "distances_m"},
}
_EXPERIMENT_COMMON = {"kind", "trials", "output_dir"}


class ConfigError(ValueError):
    """Scenario file failed to parse or validate."""


@dataclass
class Scenario:
    system: SystemParams
    targets: list[Target]
    detector: DetectorConfig
    experiment: str
    trials: int = 1
    output_dir: Path = Path("results")
    options: dict[str, Any] = field(default_factory=dict)


def _remap(section: dict, keymap: dict[str, str], where: str) -> dict:
    out = {}
    for k, v in section.items():
        if k not in keymap:
            raise ConfigError(f"unknown key '{k}' in [{where}]")
        out[keymap[k]] = v
    return out


def parse_config(text: str) -> Scenario:
    """Parse and fully validate a scenario; defaults applied."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"config parse error: {e}") from e

    unknown = set(doc) - {"system", "targets", "detector", "experiment"}
    if unknown:
        raise ConfigError(f"unknown top-level section(s): {sorted(unknown)}")
    if "system" not in doc:
        raise ConfigError("missing [system] section")
    sys_kwargs = _remap(doc["system"], _SYSTEM_KEYS, "system")
    if "cp_duration" in sys_kwargs and "cp_taps" in sys_kwargs:
        raise ConfigError("give exactly one of cp_duration_s or cp_taps")
    try:
        system = SystemParams(**sys_kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid [system]: {e}") from e

    targets = []
    for i, sec in enumerate(doc.get("targets", [])):
        try:
            targets.append(Target(**_remap(sec, _TARGET_KEYS, "targets")))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid [[targets]] entry {i}: {e}") from e

    try:
        detector = DetectorConfig(
            **_remap(doc.get("detector", {}), _DETECTOR_KEYS, "detector"))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid [detector]: {e}") from e

    exp = dict(doc.get("experiment", {}))
    kind = exp.pop("kind", None)
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(
            f"experiment.kind must be one of {EXPERIMENT_KINDS}, got {kind!r}")
    trials = exp.pop("trials", 1)
    if not isinstance(trials, int) or trials < 1:
        raise ConfigError("experiment.trials must be an integer >= 1")
    output_dir = Path(exp.pop("output_dir", "results"))
    extra = set(exp) - _EXPERIMENT_KEYS[kind]
    if extra:
        raise ConfigError(
            f"unknown key(s) {sorted(extra)} in [experiment] for kind {kind}")
    return Scenario(system=system, targets=targets, detector=detector,
                    experiment=kind, trials=trials, output_dir=output_dir,
                    options=exp)


def load_config(path: str | Path) -> Scenario:
    return parse_config(Path(path).read_text())
