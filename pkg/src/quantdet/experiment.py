"""Experiment configuration: one flat dataclass and a ``key = value`` file format.

The file format is deliberately dumb -- one assignment per line, ``#``
comments, no sections, no nesting -- so configs diff cleanly and can be
emitted by shell scripts.  Every key maps 1:1 onto a field of
:class:`ExperimentSpec`; unknown or duplicate keys are hard errors
(silent typo-tolerance has burned enough experiments).

``parse_config(serialize_config(spec)) == spec`` holds exactly: values
are written with round-trip float ``repr`` and tuples as comma lists.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

COMMANDS = ("thresholds", "roc", "pd-eta", "pd-snr", "theory", "selftest")


class ConfigError(ValueError):
    """Malformed experiment configuration (file or merged flags)."""


@dataclass(frozen=True)
class ExperimentSpec:
    """Every knob of every command, with working defaults.

    ``None`` means "not set": commands fill in their own defaults or
    reject the spec if the value is mandatory (e.g. ``seed`` for any
    Monte Carlo command).
    """

    command: str | None = None
    # scene
    n_tx: int = 2
    n_rx: int = 16
    snapshots: int = 8
    wavelength: float = 1.0
    spacing: float = 0.5
    angle: float = 0.0
    noise_power: float = 2.0
    beta_r: float = 1.0
    beta_i: float = 0.0
    snr_db: float | None = None
    # detectors / quantization
    q: int | None = None
    detectors: tuple = ("1", "2", "3", "inf")
    thresholds_path: str | None = None
    # operating points
    pfa: float = 1e-2
    pfa_grid: tuple | None = None
    eta_grid: tuple | None = None
    snr_grid_db: tuple | None = None
    # monte carlo (trials = None lets each command pick its own default)
    trials: int | None = None
    seed: int | None = None
    workers: int = 1
    # swarm optimizer
    swarm_size: int = 50
    max_iters: int = 500
    inertia: float = 0.72
    cognitive: float = 1.49
    social: float = 1.49
    stall_tol: float = 1e-9
    stall_iters: int = 50
    search_radius: float | None = None
    # output
    out: str | None = None

    def __post_init__(self):
        if self.command is not None and self.command not in COMMANDS:
            raise ConfigError(
                f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}"
            )
        if self.trials is not None and self.trials < 1:
            raise ConfigError("trials must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not 0.0 < self.pfa < 1.0:
            raise ConfigError("pfa must lie in (0, 1)")
        if self.q is not None and self.q < 1:
            raise ConfigError("q must be >= 1")
        for name in ("pfa_grid", "eta_grid", "snr_grid_db", "detectors"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, tuple(v))


def _parse_str(s: str) -> str:
    return s


def _parse_int(s: str) -> int:
    return int(s)


def _parse_float(s: str) -> float:
    return float(s)


def _parse_float_tuple(s: str) -> tuple:
    return tuple(float(tok) for tok in s.split(",") if tok.strip())


def _parse_str_tuple(s: str) -> tuple:
    return tuple(tok.strip() for tok in s.split(",") if tok.strip())


_PARSERS = {
    "command": _parse_str,
    "n_tx": _parse_int,
    "n_rx": _parse_int,
    "snapshots": _parse_int,
    "wavelength": _parse_float,
    "spacing": _parse_float,
    "angle": _parse_float,
    "noise_power": _parse_float,
    "beta_r": _parse_float,
    "beta_i": _parse_float,
    "snr_db": _parse_float,
    "q": _parse_int,
    "detectors": _parse_str_tuple,
    "thresholds_path": _parse_str,
    "pfa": _parse_float,
    "pfa_grid": _parse_float_tuple,
    "eta_grid": _parse_float_tuple,
    "snr_grid_db": _parse_float_tuple,
    "trials": _parse_int,
    "seed": _parse_int,
    "workers": _parse_int,
    "swarm_size": _parse_int,
    "max_iters": _parse_int,
    "inertia": _parse_float,
    "cognitive": _parse_float,
    "social": _parse_float,
    "stall_tol": _parse_float,
    "stall_iters": _parse_int,
    "search_radius": _parse_float,
    "out": _parse_str,
}


def parse_config(text: str) -> ExperimentSpec:
    """Parse ``key = value`` text into an :class:`ExperimentSpec`."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key = key.strip()
        value = value.strip()
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return ExperimentSpec(**values)


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return ",".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(spec: ExperimentSpec) -> str:
    """Inverse of :func:`parse_config`; ``None`` fields are omitted."""
    lines = []
    for field in dataclasses.fields(spec):
        value = getattr(spec, field.name)
        if value is None:
            continue
        lines.append(f"{field.name} = {_format_value(value)}")
    return "\n".join(lines) + "\n"


def load_config(path) -> ExperimentSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def save_config(spec: ExperimentSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_config(spec))
