"""Scenario configuration: YAML files, bundled presets, validation and digests."""
from __future__ import annotations

import copy
import csv
import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml

from .errors import ConfigError
from .power_model import BasebandGops, NodePowerParams, RadioPower, split_load_gops
from .system_dynamics import BatteryParams, CapacityParams, ClusterParams, Weights
from .traffic_energy import SolarParams, TraceError, TraceSet, TrafficParams, build_traces, ingest_traces

PRESETS = ("residential_jan", "residential_jul", "office_jan", "office_jul")

SOLAR_PRESETS = {
    "january": {"peak_irradiance": 500.0, "daylight_hours": 10.0, "solar_noon": 12.0},
    "july": {"peak_irradiance": 800.0, "daylight_hours": 14.0, "solar_noon": 12.0},
}

DEFAULTS: dict[str, Any] = {
    "name": "custom",
    "n_vsc": 3,
    "horizon": 21,
    "delta_t": 1.0,
    "seed": 0,
    "weights": {"power": 0.5, "drop": 0.5},
    "cost": {"normalize_power": True, "p_max": None},
    "battery": {
        "capacity": 2.0,
        "threshold_fraction": 0.2,
        "initial_fraction": 0.5,
        "initial": None,
    },
    "power": {
        "vsc": {
            "cpu": 200.0,
            "ofdm": 80.0,
            "filter": 160.0,
            "fd_linear": 30.0,
            "fd_nonlinear": 10.0,
            "fec": 20.0,
            "rf": 2.6,
            "pa": 71.4,
            "overhead_fraction": 0.0,
            "gops_per_watt": 8.0,
            "sleep_watts": 0.0,
        },
        "mbs": {
            "static_gops": 630.0,
            "load_gops": 215.0,
            "load_split": [30.0, 10.0, 20.0],
            "rf": 9.18,
            "pa": 1100.0,
            "overhead_fraction": 0.10,
            "gops_per_watt": 8.0,
        },
    },
    "capacity": {"vsc_mbps": 25.0, "mbs_mbps": 35.0},
    "traces": {
        "file": None,
        "start_day": 0,
        "start_hour": 0.0,
        "solar": {
            "preset": "july",
            "panel_area": 4.48,
            "efficiency": 0.20,
            "peak_irradiance": None,
            "daylight_hours": None,
            "solar_noon": None,
            "method": "integral",
        },
        "traffic": {
            "profile": "residential",
            "users_per_vsc": 90,
            "heavy_ratio": 0.5,
            "heavy_rate": 900.0,
            "ordinary_rate": 112.5,
            "mbs_background": 0.0,
            "jitter": 0.0,
        },
    },
    "solver": {
        "label_key": "stage",
        "warm_start": True,
        "use_bound": True,
        "fidelity_mode": False,
        "enumeration_cap": 10_000_000,
    },
    "policy": {"switch_off_check": "projected"},
}

# Keys whose value may be null in addition to their default's type.
_NULLABLE = {
    "cost.p_max",
    "battery.initial",
    "traces.file",
    "traces.solar.peak_irradiance",
    "traces.solar.daylight_hours",
    "traces.solar.solar_noon",
}


@dataclass(frozen=True)
class SolverOptions:
    label_key: str = "stage"
    warm_start: bool = True
    use_bound: bool = True
    fidelity_mode: bool = False
    enumeration_cap: int = 10_000_000

    def __post_init__(self) -> None:
        if self.label_key not in ("stage", "modes"):
            raise ConfigError("solver.label_key must be 'stage' or 'modes'")
        if self.enumeration_cap < 1:
            raise ConfigError("solver.enumeration_cap must be >= 1")


@dataclass(frozen=True)
class Scenario:
    """Immutable bundle of everything one optimization run needs."""

    n_vsc: int
    horizon: int
    weights: Weights
    cluster: ClusterParams
    traces: TraceSet
    solver: SolverOptions = field(default_factory=SolverOptions)
    switch_off_check: str = "projected"
    seed: int = 0
    name: str = "custom"
    config: Mapping[str, Any] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.n_vsc < 1:
            raise ConfigError("n_vsc must be >= 1")
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1")
        if self.cluster.n_vsc != self.n_vsc:
            raise ConfigError("battery.initial must have one entry per vSC")
        if self.traces.n_vsc != self.n_vsc:
            raise ConfigError(f"traces describe {self.traces.n_vsc} vSCs, scenario has {self.n_vsc}")
        if self.traces.n_steps < self.horizon:
            raise ConfigError(f"traces cover {self.traces.n_steps} steps, horizon is {self.horizon}")
        if self.switch_off_check not in ("projected", "current"):
            raise ConfigError("policy.switch_off_check must be 'projected' or 'current'")

    @property
    def delta_t(self) -> float:
        return self.cluster.delta_t

    def replace(self, **changes: Any) -> "Scenario":
        from dataclasses import replace

        return replace(self, **changes)

    def with_traces(self, traces: TraceSet) -> "Scenario":
        return self.replace(traces=traces)

    def digest(self) -> str:
        return scenario_digest(self)


def _merge(base: dict, override: Mapping, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key '{where}'")
        default = base[key]
        if isinstance(default, dict):
            if not isinstance(value, Mapping):
                raise ConfigError(f"'{where}' must be a mapping")
            out[key] = _merge(default, value, where + ".")
            continue
        if value is None:
            if where not in _NULLABLE:
                raise ConfigError(f"'{where}' must not be null")
        elif isinstance(default, bool) or default is None or isinstance(default, (str, list)):
            if isinstance(default, bool) and not isinstance(value, bool):
                raise ConfigError(f"'{where}' must be a boolean")
            if isinstance(default, str) and not isinstance(value, str):
                raise ConfigError(f"'{where}' must be a string")
            if isinstance(default, list) and not isinstance(value, list):
                raise ConfigError(f"'{where}' must be a list")
        elif isinstance(default, (int, float)):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"'{where}' must be a number")
            if isinstance(default, int) and not isinstance(default, bool) and not isinstance(value, int):
                if float(value).is_integer():
                    value = int(value)
                else:
                    raise ConfigError(f"'{where}' must be an integer")
            elif isinstance(default, float):
                value = float(value)
        out[key] = value
    return out


def resolve_config(raw: Mapping[str, Any] | None) -> dict:
    """Merge a user config over the documented defaults, rejecting unknown keys."""
    if raw is None:
        raw = {}
    if not isinstance(raw, Mapping):
        raise ConfigError("config root must be a mapping")
    preset = raw.get("preset")
    base = DEFAULTS
    if preset is not None:
        base = _merge(DEFAULTS, preset_config(preset))
        raw = {k: v for k, v in raw.items() if k != "preset"}
    return _merge(base, raw)


def load_profile(spec: str, base_dir: Path | None = None) -> tuple[tuple[float, ...], ...]:
    """A 7x24 activity table: a bundled name (``residential``/``office``) or a CSV path."""
    if spec in ("residential", "office"):
        text = resources.files("vsplit.presets").joinpath(f"{spec}_profile.csv").read_text(encoding="utf-8")
        source = f"{spec} profile"
    else:
        path = Path(spec)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read traffic profile {path}: {exc}") from exc
        source = str(path)
    rows = [r for r in csv.reader(text.splitlines()) if r and not r[0].startswith("#")]
    try:
        table = tuple(tuple(float(v) for v in row[1:]) for row in rows[1:])
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    if len(table) != 7 or any(len(day) != 24 for day in table):
        raise ConfigError(f"{source}: profile must have 7 rows of 24 hourly values")
    return table


def preset_config(name: str) -> dict:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset '{name}' (available: {', '.join(PRESETS)})")
    text = resources.files("vsplit.presets").joinpath(f"{name}.yaml").read_text(encoding="utf-8")
    return yaml.safe_load(text) or {}


def _node_params(section: Mapping[str, Any], where: str) -> NodePowerParams:
    try:
        if "static_gops" in section:
            split = section["load_split"]
            if len(split) != 3 or sum(split) <= 0:
                raise ConfigError(f"'{where}.load_split' must hold three weights with a positive sum")
            fd_lin, fd_nl, fec = split_load_gops(section["load_gops"], split)
            baseband = BasebandGops(section["static_gops"], 0.0, 0.0, fd_lin, fd_nl, fec)
            sleep = 0.0
        else:
            baseband = BasebandGops(
                section["cpu"], section["ofdm"], section["filter"],
                section["fd_linear"], section["fd_nonlinear"], section["fec"],
            )
            sleep = section["sleep_watts"]
        radio = RadioPower(section["rf"], section["pa"], section["overhead_fraction"])
        return NodePowerParams(baseband, radio, section["gops_per_watt"], sleep)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"'{where}': {exc}") from None


def _traffic_params(cfg: Mapping[str, Any], base_dir: Path | None) -> TrafficParams:
    profile = load_profile(cfg["profile"], base_dir)
    try:
        return TrafficParams(
            profile=profile,
            users_per_vsc=cfg["users_per_vsc"],
            heavy_ratio=cfg["heavy_ratio"],
            heavy_rate=cfg["heavy_rate"],
            ordinary_rate=cfg["ordinary_rate"],
            mbs_background=cfg["mbs_background"],
        )
    except ValueError as exc:
        raise ConfigError(f"'traces.traffic': {exc}") from None


def _solar_params(cfg: Mapping[str, Any]) -> SolarParams:
    preset = cfg["preset"]
    if preset not in SOLAR_PRESETS:
        raise ConfigError(f"'traces.solar.preset' must be one of {sorted(SOLAR_PRESETS)}")
    values = dict(SOLAR_PRESETS[preset])
    for key in ("peak_irradiance", "daylight_hours", "solar_noon"):
        if cfg[key] is not None:
            values[key] = float(cfg[key])
    try:
        return SolarParams(panel_area=cfg["panel_area"], efficiency=cfg["efficiency"], **values)
    except ValueError as exc:
        raise ConfigError(f"'traces.solar': {exc}") from None


def generate_traces(cfg: Mapping[str, Any], base_dir: Path | None = None) -> TraceSet:
    """Synthesize the trace set described by a resolved config."""
    n, horizon = cfg["n_vsc"], cfg["horizon"]
    tcfg = cfg["traces"]
    solar = _solar_params(tcfg["solar"])
    method = tcfg["solar"]["method"]
    if method not in ("integral", "sample"):
        raise ConfigError("'traces.solar.method' must be 'integral' or 'sample'")
    traffic = _traffic_params(tcfg["traffic"], base_dir)
    traces = build_traces(
        [solar] * n,
        [traffic] * n,
        horizon,
        timestep_hours=cfg["delta_t"],
        start_day=tcfg["start_day"],
        start_hour=tcfg["start_hour"],
        mbs_capacity=cfg["capacity"]["mbs_mbps"],
        solar_method=method,
    )
    jitter = tcfg["traffic"]["jitter"]
    if jitter < 0:
        raise ConfigError("'traces.traffic.jitter' must be non-negative")
    if jitter > 0:
        rng = np.random.default_rng(cfg["seed"])
        factors = rng.uniform(1.0 - jitter, 1.0 + jitter, size=traces.demand.shape)
        traces = TraceSet(traces.energy, np.maximum(traces.demand * factors, 0.0), traces.mbs_background)
    return traces


def build_scenario(
    cfg: Mapping[str, Any],
    traces: TraceSet | None = None,
    base_dir: Path | None = None,
) -> Scenario:
    """Turn a resolved config into a validated :class:`Scenario`."""
    n = cfg["n_vsc"]
    if n < 1:
        raise ConfigError("'n_vsc' must be >= 1")
    if cfg["horizon"] < 1:
        raise ConfigError("'horizon' must be >= 1")
    bcfg = cfg["battery"]
    capacity = bcfg["capacity"]
    if capacity <= 0:
        raise ConfigError("'battery.capacity' must be positive")
    if bcfg["initial"] is not None:
        initial = bcfg["initial"]
        if not isinstance(initial, list) or len(initial) != n:
            raise ConfigError(f"'battery.initial' must be a list of {n} levels")
        initial = tuple(float(b) for b in initial)
    else:
        initial = (bcfg["initial_fraction"] * capacity,) * n
    battery = BatteryParams(capacity, bcfg["threshold_fraction"] * capacity, initial)
    ccfg = cfg["capacity"]
    cluster = ClusterParams(
        battery=battery,
        vsc=_node_params(cfg["power"]["vsc"], "power.vsc"),
        mbs=_node_params(cfg["power"]["mbs"], "power.mbs"),
        capacity=CapacityParams(ccfg["vsc_mbps"], ccfg["mbs_mbps"], cfg["cost"]["p_max"]),
        delta_t=cfg["delta_t"],
        normalize_power=cfg["cost"]["normalize_power"],
    )
    weights = Weights(cfg["weights"]["power"], cfg["weights"]["drop"])
    if traces is None:
        trace_file = cfg["traces"]["file"]
        if trace_file is not None:
            path = Path(trace_file)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            traces = ingest_traces(path, n, cfg["horizon"])
        else:
            traces = generate_traces(cfg, base_dir)
    try:
        solver = SolverOptions(**cfg["solver"])
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return Scenario(
        n_vsc=n,
        horizon=cfg["horizon"],
        weights=weights,
        cluster=cluster,
        traces=traces,
        solver=solver,
        switch_off_check=cfg["policy"]["switch_off_check"],
        seed=cfg["seed"],
        name=cfg["name"],
        config=cfg,
    )


def load_scenario(path: str | Path | None = None, *, preset: str | None = None, traces: TraceSet | None = None) -> Scenario:
    """Load a scenario from a YAML file or a bundled preset name.

    Relative paths inside the file (trace CSVs, profiles) resolve against the
    file's directory.
    """
    if (path is None) == (preset is None):
        raise ConfigError("give exactly one of a config path or a preset name")
    base_dir = None
    if preset is not None:
        raw: Any = {"preset": preset}
    else:
        path = Path(path)
        if not path.exists() and str(path) in PRESETS:
            raw = {"preset": str(path)}
        else:
            try:
                text = path.read_text(encoding="utf-8")
            except OSError:
                raise
            try:
                raw = yaml.safe_load(text)
            except yaml.YAMLError as exc:
                raise ConfigError(f"{path}: {exc}") from None
            base_dir = path.parent
    cfg = resolve_config(raw)
    try:
        return build_scenario(cfg, traces=traces, base_dir=base_dir)
    except TraceError as exc:
        raise ConfigError(str(exc)) from None


def _canonical(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return [_canonical(v) for v in obj.tolist()]
    if isinstance(obj, Mapping):
        return {str(k): _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, float):
        return repr(obj)
    return obj


def scenario_digest(scenario: Scenario) -> str:
    """SHA-256 over the canonical (key-sorted) model content of a scenario."""
    from dataclasses import asdict

    cluster = asdict(scenario.cluster)
    payload = {
        "n_vsc": scenario.n_vsc,
        "horizon": scenario.horizon,
        "weights": asdict(scenario.weights),
        "cluster": cluster,
        "solver": asdict(scenario.solver),
        "switch_off_check": scenario.switch_off_check,
        "traces": {
            "energy": scenario.traces.energy,
            "demand": scenario.traces.demand,
            "mbs_background": scenario.traces.mbs_background,
        },
    }
    text = json.dumps(_canonical(payload), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
