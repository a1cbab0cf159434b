"""TOML experiment files.

Example::

    n = 100
    activity_probability = 0.1
    snr_db = 20
    trials = 1000
    master_seed = 7
    m_values = [60, 70, 80]          # or: m_range = {start = 60, stop = 120, step = 10}

    [profile]
    kind = "robust"
    theta = 0.1

    [detector]
    name = "seqomp"
    order = "descending"

    [threshold]
    pfa = 1e-3
    mode = "approx"

    [activity]
    model = "bernoulli"              # or "fixed" with k = ...
    noise = true

Unknown keys are rejected.
"""

from __future__ import annotations

import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .montecarlo import ExperimentSpec


class ConfigError(ValueError):
    pass


_TOP = {"n", "activity_probability", "snr", "snr_db", "trials", "master_seed", "m_values", "m_range"}
_SECTIONS = {
    "profile": {"kind", "theta"},
    "detector": {"name", "order", "penalty", "support_epsilon"},
    "threshold": {"pfa", "mode"},
    "activity": {"model", "k", "noise"},
}
_RENAME = {
    ("profile", "kind"): "profile",
    ("detector", "name"): "detector",
    ("threshold", "mode"): "threshold_mode",
    ("activity", "model"): "activity",
}


def spec_from_dict(data: dict) -> ExperimentSpec:
    kwargs = {}
    for key, value in data.items():
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"[{key}] must be a table")
            unknown = set(value) - _SECTIONS[key]
            if unknown:
                raise ConfigError(f"unknown keys in [{key}]: {sorted(unknown)}")
            for sub, v in value.items():
                kwargs[_RENAME.get((key, sub), sub)] = v
        elif key in _TOP:
            kwargs[key] = value
        else:
            raise ConfigError(f"unknown key {key!r}")

    if "snr" in kwargs and "snr_db" in kwargs:
        raise ConfigError("give either snr or snr_db, not both")
    if "snr_db" in kwargs:
        kwargs["snr"] = 10.0 ** (float(kwargs.pop("snr_db")) / 10.0)
    if "m_range" in kwargs:
        if "m_values" in kwargs:
            raise ConfigError("give either m_values or m_range, not both")
        rng = kwargs.pop("m_range")
        try:
            kwargs["m_values"] = tuple(range(rng["start"], rng["stop"] + 1, rng.get("step", 1)))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"m_range needs integer start and stop: {exc}") from None
    if not kwargs.get("m_values"):
        raise ConfigError("no m values given")
    try:
        return ExperimentSpec(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_spec(path) -> ExperimentSpec:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return spec_from_dict(data)
