"""Presets and TOML scenario files.

A scenario names one source (a preset or inline parameters), the analyses to
run, and optional ``[attack]``, ``[channel]``, ``[sampling]``, ``[link]``,
``[hbt]``, ``[detect]`` and ``[output]`` tables.  See ``examples/`` in the
README for a complete file.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .errors import ConfigError

ANALYSES = ("attack-sweep", "keyrate", "convergence", "waiting-time", "hbt", "detect")


def _load_toml(path) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def load_presets(extra: str | Path | None = None) -> dict:
    """Bundled presets, optionally overlaid with a user file of the same layout."""
    with resources.files("g2qkd").joinpath("data/presets.toml").open("rb") as fh:
        table = tomllib.load(fh)
    if extra is not None:
        user = _load_toml(extra)
        for section in ("sources", "links"):
            table.setdefault(section, {}).update({k.lower(): v for k, v in user.get(section, {}).items()})
    return table


def parse_grid(spec) -> list[float]:
    """Accept a number, a list, or an inclusive ``start:stop:step`` range."""
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return [float(spec)]
    if isinstance(spec, (list, tuple)):
        return [float(v) for v in spec]
    if isinstance(spec, str):
        if ":" not in spec:
            return [float(v) for v in spec.split(",") if v.strip()]
        parts = [float(v) for v in spec.split(":")]
        if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
            raise ValueError(f"range must be start:stop:step with step > 0 and stop >= start, got {spec!r}")
        start, stop, step = parts
        n = int(math.floor((stop - start) / step + 1e-9))
        return [round(start + i * step, 12) for i in range(n + 1)]
    raise ValueError(f"cannot interpret {spec!r} as a grid")


@dataclass
class Scenario:
    source: dict
    analyses: list[str]
    attack: dict = field(default_factory=dict)
    channel: dict = field(default_factory=dict)
    sampling: dict = field(default_factory=dict)
    link: dict = field(default_factory=dict)
    hbt: dict = field(default_factory=dict)
    detect: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict, repr=False)


_SOURCE_KEYS = {"quantum_efficiency", "g2", "g3", "repetition_rate"}
_CHANNEL_KEYS = {
    "loss_db",
    "detector_efficiency",
    "dark_yield",
    "intrinsic_error",
    "baseline_error",
    "ec_efficiency",
    "exact_yield",
}


def _prob(diag, path, value, label):
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not 0.0 <= value <= 1.0:
        diag.append(f"{path}: {value!r} outside [0, 1] ({label})")


def _grid(diag, path, value, lo, hi, label):
    try:
        grid = parse_grid(value)
    except (ValueError, TypeError) as exc:
        diag.append(f"{path}: {exc}")
        return []
    if not grid:
        diag.append(f"{path}: empty grid ({label})")
    for v in grid:
        if not lo <= v <= hi:
            diag.append(f"{path}: {v!r} outside [{lo}, {hi}] ({label})")
            break
    return grid


def _positive_int(diag, path, value, label):
    if not isinstance(value, (int, float)) or isinstance(value, bool) or value < 1 or float(value) != int(value):
        diag.append(f"{path}: {value!r} is not a positive integer ({label})")


def check_scenario(raw: dict, presets: dict | None = None) -> list[str]:
    """Every structural and domain violation in a parsed scenario."""
    presets = presets or load_presets()
    diag: list[str] = []

    analyses = raw.get("analyses")
    if analyses is None:
        diag.append("analyses: missing (list of " + ", ".join(ANALYSES) + ")")
    elif not isinstance(analyses, list) or not analyses:
        diag.append("analyses: must be a non-empty list")
    else:
        for a in analyses:
            if a not in ANALYSES:
                diag.append(f"analyses: unknown analysis {a!r}")

    src = raw.get("source")
    if not isinstance(src, dict):
        diag.append("source: missing table (need preset or quantum_efficiency/g2/g3)")
    else:
        has_preset = "preset" in src
        inline = _SOURCE_KEYS & src.keys()
        if has_preset and inline - {"repetition_rate"}:
            diag.append("source: give either a preset or inline parameters, not both")
        elif has_preset:
            if str(src["preset"]).lower() not in presets.get("sources", {}):
                diag.append(f"source.preset: unknown preset {src['preset']!r}")
        else:
            for key in ("quantum_efficiency", "g2", "g3"):
                if key not in src:
                    diag.append(f"source.{key}: missing (SourceParams.{key})")
            if "quantum_efficiency" in src:
                _prob(diag, "source.quantum_efficiency", src["quantum_efficiency"], "SourceParams.quantum_efficiency")
            for key in ("g2", "g3"):
                v = src.get(key, 0.0)
                if not isinstance(v, (int, float)) or v < 0:
                    diag.append(f"source.{key}: {v!r} must be >= 0 (SourceParams.{key})")
        rate = src.get("repetition_rate", 1.0)
        if not isinstance(rate, (int, float)) or rate <= 0:
            diag.append(f"source.repetition_rate: {rate!r} must be > 0 (SourceParams.repetition_rate)")
        for key in set(src) - _SOURCE_KEYS - {"preset"}:
            diag.append(f"source.{key}: unknown key")

    attack = raw.get("attack", {})
    if not isinstance(attack, dict):
        diag.append("attack: must be a table")
    else:
        kind = str(attack.get("kind", "soft")).lower()
        if kind not in ("none", "soft", "hard"):
            diag.append(f"attack.kind: {attack.get('kind')!r} not one of none, soft, hard (AttackSpec.kind)")
        if "x" in attack:
            _grid(diag, "attack.x", attack["x"], 0.0, 1.0, "AttackSpec.x")

    channel = raw.get("channel", {})
    if isinstance(channel, dict):
        if "loss_db" in channel:
            _grid(diag, "channel.loss_db", channel["loss_db"], 0.0, math.inf, "ChannelParams.channel_loss_db")
        for key in ("detector_efficiency", "dark_yield", "intrinsic_error", "baseline_error"):
            if key in channel:
                _prob(diag, f"channel.{key}", channel[key], f"ChannelParams.{key}")
        if "ec_efficiency" in channel:
            v = channel["ec_efficiency"]
            if not isinstance(v, (int, float)) or v < 1:
                diag.append(f"channel.ec_efficiency: {v!r} must be >= 1 (ChannelParams.ec_efficiency)")
        for key in set(channel) - _CHANNEL_KEYS:
            diag.append(f"channel.{key}: unknown key")
    else:
        diag.append("channel: must be a table")

    sampling = raw.get("sampling", {})
    if isinstance(sampling, dict):
        for key in ("n_samples", "n_runs", "reference_size"):
            if key in sampling:
                _positive_int(diag, f"sampling.{key}", sampling[key], f"SamplingPlan.{key}")
        if "master_seed" in sampling:
            v = sampling["master_seed"]
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                diag.append(f"sampling.master_seed: {v!r} must be a non-negative integer")
        if "eta" in sampling:
            _prob(diag, "sampling.eta", sampling["eta"], "transmission eta")
        if "sizes" in sampling:
            sizes = _grid(diag, "sampling.sizes", sampling["sizes"], 1.0, math.inf, "sample sizes")
            if any(b <= a for a, b in zip(sizes, sizes[1:])):
                diag.append("sampling.sizes: must be strictly ascending")
    else:
        diag.append("sampling: must be a table")

    link = raw.get("link", {})
    if isinstance(link, dict):
        if "preset" in link and str(link["preset"]).lower() not in presets.get("links", {}):
            diag.append(f"link.preset: unknown link preset {link['preset']!r}")
        for key in ("repetition_rate", "flyover_s", "n_required"):
            if key in link and (not isinstance(link[key], (int, float)) or link[key] <= 0):
                diag.append(f"link.{key}: {link[key]!r} must be > 0")
    hbt = raw.get("hbt", {})
    if isinstance(hbt, dict):
        for key in ("efficiency", "dark_click_prob", "split_ratio"):
            if key in hbt:
                _prob(diag, f"hbt.{key}", hbt[key], f"DetectorParams.{key}")
        for key in ("n_pulses", "max_lag"):
            if key in hbt:
                _positive_int(diag, f"hbt.{key}", hbt[key], key)
    det = raw.get("detect", {})
    if isinstance(det, dict):
        for key in ("threshold", "k_sigma"):
            if key in det and (not isinstance(det[key], (int, float)) or det[key] < 0):
                diag.append(f"detect.{key}: {det[key]!r} must be >= 0")
    return diag


def validate_config(path) -> list[str]:
    """Diagnostics for a scenario file; empty when it is valid.

    Raises:
        OSError: the file cannot be read.
    """
    try:
        raw = _load_toml(path)
    except tomllib.TOMLDecodeError as exc:
        return [f"<file>: not valid TOML ({exc})"]
    presets = load_presets(raw.get("presets")) if isinstance(raw.get("presets"), str) else load_presets()
    return check_scenario(raw, presets)


def load_scenario(path) -> Scenario:
    raw = _load_toml(path)
    diag = validate_config(path)
    if diag:
        raise ConfigError(diag)
    return Scenario(
        source=dict(raw["source"]),
        analyses=list(raw["analyses"]),
        attack=dict(raw.get("attack", {})),
        channel=dict(raw.get("channel", {})),
        sampling=dict(raw.get("sampling", {})),
        link=dict(raw.get("link", {})),
        hbt=dict(raw.get("hbt", {})),
        detect=dict(raw.get("detect", {})),
        output=dict(raw.get("output", {})),
        raw=raw,
    )


def resolve_source(spec: dict | str, presets: dict | None = None) -> dict[str, Any]:
    """SourceParams keyword arguments from a preset name or inline table."""
    presets = presets or load_presets()
    if isinstance(spec, str):
        spec = {"preset": spec}
    if "preset" in spec:
        name = str(spec["preset"]).lower()
        try:
            entry = presets["sources"][name]
        except KeyError:
            raise ConfigError([f"source.preset: unknown preset {spec['preset']!r}"]) from None
        out = {k: entry[k] for k in _SOURCE_KEYS if k in entry}
        if "repetition_rate" in spec:
            out["repetition_rate"] = spec["repetition_rate"]
        return out
    return {k: spec[k] for k in _SOURCE_KEYS if k in spec}


def jsonable(obj):
    """Plain-JSON view of parameters for metadata headers."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj
