"""YAML sweep configuration: schema, defaults, validation, round trip.

Schema (every key optional; defaults reproduce the baseline scenario)::

    scenario:
      n_r: 4              # receive antennas
      n_t: 4              # transmit antennas (ignored by antennas/tx_rx_ratio sweeps)
      rice_k_db: 10.0     # Rice factor in dB; -.inf means Rayleigh
      alpha: 0.0          # exponential correlation base, same at both ends
    sweep:
      axis: antennas      # antennas | tx_rx_ratio | rice_k_db | alpha | snr_db
      values: [1, 2, 3, 4, 5, 6, 7, 8]
    snr_grid_db: [0, 10, 20, 30]
    outage_epsilons: [0.1]
    mc:
      trials: 1000000
      seed: 0
      batch: 20000
    output: sweep.csv
"""

from dataclasses import dataclass, field, replace
import math

import yaml

from .errors import ConfigError
from .montecarlo import McConfig

AXES = ("antennas", "tx_rx_ratio", "rice_k_db", "alpha", "snr_db")

DEFAULT_AXIS_VALUES = {
    "antennas": [1, 2, 3, 4, 5, 6, 7, 8],
    "tx_rx_ratio": [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5],
    "rice_k_db": [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0],
    "alpha": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
    "snr_db": [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
}


@dataclass(frozen=True)
class Scenario:
    n_r: int = 4
    n_t: int = 4
    rice_k_db: float = 10.0
    alpha: float = 0.0


@dataclass(frozen=True)
class SweepConfig:
    scenario: Scenario = field(default_factory=Scenario)
    sweep_axis: str = "antennas"
    axis_values: tuple = tuple(DEFAULT_AXIS_VALUES["antennas"])
    snr_grid_db: tuple = (0.0, 10.0, 20.0, 30.0)
    outage_epsilons: tuple = (0.1,)
    mc: McConfig = field(default_factory=McConfig)
    output_path: str = "sweep.csv"

    def with_axis(self, axis: str, values=None) -> "SweepConfig":
        if axis not in AXES:
            raise ConfigError(f"unknown sweep axis {axis!r}; expected one of {AXES}", "sweep.axis")
        vals = DEFAULT_AXIS_VALUES[axis] if values is None else values
        return replace(self, sweep_axis=axis, axis_values=tuple(vals))


def _line_index(text: str) -> dict:
    """Map dotted key paths to 1-based line numbers."""
    lines = {}
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError:
        return lines

    def walk(node, prefix):
        if isinstance(node, yaml.MappingNode):
            for key, value in node.value:
                path = f"{prefix}.{key.value}" if prefix else str(key.value)
                lines[path] = key.start_mark.line + 1
                walk(value, path)

    if root is not None:
        walk(root, "")
    return lines


class _Reader:
    def __init__(self, data: dict, lines: dict):
        self.data = data
        self.lines = lines

    def error(self, path, msg):
        return ConfigError(msg, field=path, line=self.lines.get(path))

    def section(self, path):
        node = self.data
        for part in path.split("."):
            if not isinstance(node, dict) or part not in node:
                return None
            node = node[part]
        return node

    def mapping(self, path, allowed):
        node = self.section(path)
        if node is None:
            return {}
        if not isinstance(node, dict):
            raise self.error(path, "expected a mapping")
        for key in node:
            if key not in allowed:
                raise self.error(f"{path}.{key}", "unknown key")
        return node

    def integer(self, path, default, minimum=None):
        value = self.section(path)
        if value is None:
            return default
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.error(path, f"expected an integer, got {value!r}")
        if minimum is not None and value < minimum:
            raise self.error(path, f"must be >= {minimum}")
        return value

    def number(self, path, default):
        value = self.section(path)
        if value is None:
            return default
        if isinstance(value, str) and value.strip().lower() in ("-inf", "-.inf"):
            return -math.inf
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.error(path, f"expected a number, got {value!r}")
        return float(value)

    def numbers(self, path, default):
        value = self.section(path)
        if value is None:
            return tuple(default)
        if not isinstance(value, list) or not value:
            raise self.error(path, "expected a nonempty list of numbers")
        out = []
        for item in value:
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise self.error(path, f"expected numbers, got {item!r}")
            out.append(item)
        return tuple(out)


TOP_KEYS = ("scenario", "sweep", "snr_grid_db", "outage_epsilons", "mc", "output")


def parse_config(text: str) -> SweepConfig:
    """Parse and validate YAML text into a SweepConfig."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"invalid YAML: {exc}", line=mark.line + 1 if mark else None) from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping", line=1)
    rd = _Reader(data, _line_index(text))
    for key in data:
        if key not in TOP_KEYS:
            raise rd.error(key, "unknown key")

    rd.mapping("scenario", ("n_r", "n_t", "rice_k_db", "alpha"))
    base = Scenario()
    scenario = Scenario(
        n_r=rd.integer("scenario.n_r", base.n_r, minimum=1),
        n_t=rd.integer("scenario.n_t", base.n_t, minimum=1),
        rice_k_db=rd.number("scenario.rice_k_db", base.rice_k_db),
        alpha=rd.number("scenario.alpha", base.alpha),
    )
    if not 0.0 <= scenario.alpha < 1.0:
        raise rd.error("scenario.alpha", "alpha must lie in [0, 1)")
    if math.isnan(scenario.rice_k_db) or scenario.rice_k_db == math.inf:
        raise rd.error("scenario.rice_k_db", "must be finite or -inf")

    rd.mapping("sweep", ("axis", "values"))
    axis = rd.section("sweep.axis") or "antennas"
    if axis not in AXES:
        raise rd.error("sweep.axis", f"unknown axis {axis!r}; expected one of {', '.join(AXES)}")
    values = rd.numbers("sweep.values", DEFAULT_AXIS_VALUES[axis])
    if list(values) != sorted(values):
        raise rd.error("sweep.values", "axis values must be sorted ascending")
    if axis == "antennas" and any(int(v) != v or v < 1 for v in values):
        raise rd.error("sweep.values", "antenna counts must be positive integers")
    if axis == "tx_rx_ratio" and any(v <= 0 for v in values):
        raise rd.error("sweep.values", "antenna ratios must be positive")
    if axis == "alpha" and any(not 0.0 <= v < 1.0 for v in values):
        raise rd.error("sweep.values", "alpha values must lie in [0, 1)")

    snr = rd.numbers("snr_grid_db", SweepConfig.snr_grid_db)
    eps = rd.numbers("outage_epsilons", SweepConfig.outage_epsilons)
    if any(not 0.0 < e < 1.0 for e in eps):
        raise rd.error("outage_epsilons", "epsilons must lie in (0, 1)")

    rd.mapping("mc", ("trials", "seed", "batch"))
    dmc = McConfig()
    trials = rd.integer("mc.trials", dmc.trials, minimum=1)
    seed = rd.integer("mc.seed", dmc.master_seed, minimum=0)
    batch = rd.integer("mc.batch", dmc.batch, minimum=1)
    if seed >= 2**64:
        raise rd.error("mc.seed", "seed must fit in 64 bits")

    output = rd.section("output")
    if output is None:
        output = SweepConfig.output_path
    elif not isinstance(output, str) or not output:
        raise rd.error("output", "expected a path string")

    return SweepConfig(
        scenario=scenario,
        sweep_axis=axis,
        axis_values=tuple(values),
        snr_grid_db=tuple(float(s) for s in snr),
        outage_epsilons=tuple(float(e) for e in eps),
        mc=McConfig(trials=trials, master_seed=seed, batch=batch),
        output_path=output,
    )


def load_config(path: str) -> SweepConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    return parse_config(text)


def config_to_dict(cfg: SweepConfig) -> dict:
    k_db = cfg.scenario.rice_k_db
    return {
        "scenario": {
            "n_r": cfg.scenario.n_r,
            "n_t": cfg.scenario.n_t,
            "rice_k_db": "-inf" if k_db == -math.inf else k_db,
            "alpha": cfg.scenario.alpha,
        },
        "sweep": {"axis": cfg.sweep_axis, "values": list(cfg.axis_values)},
        "snr_grid_db": list(cfg.snr_grid_db),
        "outage_epsilons": list(cfg.outage_epsilons),
        "mc": {"trials": cfg.mc.trials, "seed": cfg.mc.master_seed, "batch": cfg.mc.batch},
        "output": cfg.output_path,
    }


def dump_config(cfg: SweepConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False)
