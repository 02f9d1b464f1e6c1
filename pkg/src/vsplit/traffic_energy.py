"""Harvested-energy and traffic-demand series, synthetic or read from CSV."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

MB_PER_HOUR_TO_MBPS = 8.0 / 3600.0


class TraceError(ValueError):
    """Malformed or inconsistent trace input."""


@dataclass(frozen=True)
class SolarParams:
    panel_area: float = 4.48
    efficiency: float = 0.20
    peak_irradiance: float = 800.0
    daylight_hours: float = 14.0
    solar_noon: float = 12.0

    def __post_init__(self) -> None:
        if self.panel_area <= 0:
            raise ValueError("panel_area must be positive")
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError("efficiency must lie in (0, 1]")
        if self.peak_irradiance < 0:
            raise ValueError("peak_irradiance must be non-negative")
        if not 0.0 < self.daylight_hours <= 24.0:
            raise ValueError("daylight_hours must lie in (0, 24]")


@dataclass(frozen=True)
class TrafficParams:
    """Per-vSC user population and a weekly 7x24 activity shape.

    ``profile[day][hour]`` is the fraction of the population active in that
    hour (day 0 is Monday).
    """

    profile: tuple[tuple[float, ...], ...]
    users_per_vsc: int = 90
    heavy_ratio: float = 0.5
    heavy_rate: float = 900.0
    ordinary_rate: float = 112.5
    mbs_background: float = 0.0

    def __post_init__(self) -> None:
        if self.users_per_vsc < 0:
            raise ValueError("users_per_vsc must be non-negative")
        if self.heavy_rate < 0 or self.ordinary_rate < 0:
            raise ValueError("user activity rates must be non-negative")
        if not 0.0 <= self.heavy_ratio <= 1.0:
            raise ValueError("heavy_ratio must lie in [0, 1]")
        if self.mbs_background < 0:
            raise ValueError("mbs_background must be non-negative")
        if len(self.profile) != 7 or any(len(day) != 24 for day in self.profile):
            raise ValueError("profile must be a 7x24 table")
        if any(not 0.0 <= v <= 1.0 for day in self.profile for v in day):
            raise ValueError("profile values must lie in [0, 1]")

    @property
    def peak_demand_mbps(self) -> float:
        """Demand of one vSC when the whole population is active."""
        mean_rate = self.heavy_ratio * self.heavy_rate + (1.0 - self.heavy_ratio) * self.ordinary_rate
        return self.users_per_vsc * mean_rate * MB_PER_HOUR_TO_MBPS


@dataclass(frozen=True, eq=False)
class TraceSet:
    """Per-timestep inputs of a cluster.

    ``energy`` (kWh) and ``demand`` (Mbps) have shape ``(n_vsc, n_steps)``;
    ``mbs_background`` (Mbps) has shape ``(n_steps,)``.
    """

    energy: np.ndarray
    demand: np.ndarray
    mbs_background: np.ndarray

    def __post_init__(self) -> None:
        energy = np.array(self.energy, dtype=float, ndmin=2)
        demand = np.array(self.demand, dtype=float, ndmin=2)
        background = np.array(self.mbs_background, dtype=float).reshape(-1)
        if energy.shape != demand.shape:
            raise TraceError(f"energy shape {energy.shape} differs from demand shape {demand.shape}")
        if background.shape != (energy.shape[1],):
            raise TraceError("mbs_background length differs from the vSC series")
        for name, arr in (("energy", energy), ("demand", demand), ("mbs_background", background)):
            if not np.all(np.isfinite(arr)):
                raise TraceError(f"{name} contains non-finite values")
            if np.any(arr < 0):
                raise TraceError(f"{name} contains negative values")
            arr.setflags(write=False)
        object.__setattr__(self, "energy", energy)
        object.__setattr__(self, "demand", demand)
        object.__setattr__(self, "mbs_background", background)

    @property
    def n_vsc(self) -> int:
        return self.energy.shape[0]

    @property
    def n_steps(self) -> int:
        return self.energy.shape[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TraceSet):
            return NotImplemented
        return (
            np.array_equal(self.energy, other.energy)
            and np.array_equal(self.demand, other.demand)
            and np.array_equal(self.mbs_background, other.mbs_background)
        )

    __hash__ = None  # type: ignore[assignment]

    def truncated(self, n_steps: int) -> "TraceSet":
        return TraceSet(self.energy[:, :n_steps], self.demand[:, :n_steps], self.mbs_background[:n_steps])

    def with_energy(self, energy: np.ndarray) -> "TraceSet":
        return TraceSet(energy, self.demand, self.mbs_background)


def synth_solar(
    p: SolarParams,
    timestep_hours: float,
    n_steps: int,
    start_hour: float = 0.0,
    method: str = "integral",
) -> np.ndarray:
    """Clear-sky harvest per step in kWh from a truncated-cosine irradiance day.

    ``method="integral"`` integrates the irradiance exactly over each step, so
    daily totals do not depend on the step length. ``method="sample"`` holds
    the irradiance at the start of each step for the whole step.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if timestep_hours <= 0:
        raise ValueError("timestep_hours must be positive")
    peak_kw = p.panel_area * p.efficiency * p.peak_irradiance / 1000.0
    starts = start_hour + timestep_hours * np.arange(n_steps)
    if method == "sample":
        return peak_kw * _irradiance_shape(p, starts % 24.0) * timestep_hours
    if method != "integral":
        raise ValueError(f"unknown solar method {method!r}")
    return peak_kw * (_shape_integral(p, starts + timestep_hours) - _shape_integral(p, starts))


def _irradiance_shape(p: SolarParams, hours: np.ndarray) -> np.ndarray:
    offset = (hours - p.solar_noon + 12.0) % 24.0 - 12.0
    inside = np.abs(offset) < p.daylight_hours / 2.0
    return np.where(inside, np.maximum(np.cos(math.pi * offset / p.daylight_hours), 0.0), 0.0)


def _shape_integral(p: SolarParams, hours: np.ndarray) -> np.ndarray:
    """Integral of the periodic daily shape from hour 0 of day 0 up to ``hours``."""
    half = p.daylight_hours / 2.0
    scale = p.daylight_hours / math.pi
    days, within = np.divmod(hours, 24.0)
    total = days * 2.0 * scale
    # Neighbouring days' windows cover daylight that wraps past midnight.
    for centre in (p.solar_noon - 24.0, p.solar_noon, p.solar_noon + 24.0):
        upper = np.sin(np.clip(within - centre, -half, half) / scale)
        lower = math.sin(min(max(-centre, -half), half) / scale)
        total = total + scale * (upper - lower)
    return total


def synth_traffic(
    p: TrafficParams,
    n_steps: int,
    start_day: int = 0,
    start_hour: float = 0.0,
    timestep_hours: float = 1.0,
) -> np.ndarray:
    """Offered load of one vSC in Mbps, read from the weekly activity table."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    out = np.empty(n_steps)
    for t in range(n_steps):
        elapsed = start_day * 24.0 + start_hour + t * timestep_hours
        day = int(elapsed // 24.0) % 7
        hour = int(elapsed % 24.0)
        out[t] = p.peak_demand_mbps * p.profile[day][hour]
    return out


def _header(n_vsc: int) -> list[str]:
    return (
        ["t"]
        + [f"e_{i + 1}" for i in range(n_vsc)]
        + [f"d_{i + 1}" for i in range(n_vsc)]
        + ["d_mbs"]
    )


def serialize_traces(traces: TraceSet) -> str:
    """CSV text for ``traces``; values use shortest round-trip float formatting."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_header(traces.n_vsc))
    for t in range(traces.n_steps):
        row = [str(t)]
        row += [repr(float(v)) for v in traces.energy[:, t]]
        row += [repr(float(v)) for v in traces.demand[:, t]]
        row.append(repr(float(traces.mbs_background[t])))
        writer.writerow(row)
    return buf.getvalue()


def write_traces(traces: TraceSet, path: str | Path) -> None:
    Path(path).write_text(serialize_traces(traces), encoding="utf-8", newline="")


def parse_traces(text: str, n_vsc: int, horizon: int, source: str = "<traces>") -> TraceSet:
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise TraceError(f"{source}: empty trace file") from None
    expected = _header(n_vsc)
    if header != expected:
        raise TraceError(f"{source}:1: expected header {','.join(expected)}, got {','.join(header)}")
    rows: list[list[float]] = []
    for lineno, raw in enumerate(reader, start=2):
        if not raw or all(not cell.strip() for cell in raw):
            continue
        if len(raw) != len(expected):
            raise TraceError(f"{source}:{lineno}: expected {len(expected)} columns, got {len(raw)}")
        try:
            values = [float(cell) for cell in raw]
        except ValueError as exc:
            raise TraceError(f"{source}:{lineno}: {exc}") from None
        for col, value in zip(expected[1:], values[1:]):
            if not math.isfinite(value):
                raise TraceError(f"{source}:{lineno}: non-finite value in column {col}")
            if value < 0:
                raise TraceError(f"{source}:{lineno}: negative value {value} in column {col}")
        rows.append(values)
    if len(rows) < horizon:
        raise TraceError(f"{source}: {len(rows)} timesteps, horizon needs {horizon}")
    data = np.array(rows, dtype=float).reshape(len(rows), len(expected))
    return TraceSet(
        energy=data[:, 1 : 1 + n_vsc].T,
        demand=data[:, 1 + n_vsc : 1 + 2 * n_vsc].T,
        mbs_background=data[:, -1],
    )


def ingest_traces(path: str | Path, n_vsc: int, horizon: int) -> TraceSet:
    """Read and validate a trace CSV (``t, e_1..e_N, d_1..d_N, d_mbs``)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_traces(text, n_vsc, horizon, source=str(path))


def build_traces(
    solar: Sequence[SolarParams],
    traffic: Sequence[TrafficParams],
    n_steps: int,
    timestep_hours: float = 1.0,
    start_day: int = 0,
    start_hour: float = 0.0,
    mbs_capacity: float = 0.0,
    solar_method: str = "integral",
) -> TraceSet:
    """Synthesize a full trace set, one solar and traffic parameter set per vSC.

    Background macro demand is ``traffic[0].mbs_background * mbs_capacity``.
    """
    if len(solar) != len(traffic):
        raise ValueError("need one solar and one traffic parameter set per vSC")
    energy = np.vstack([synth_solar(s, timestep_hours, n_steps, start_hour, solar_method) for s in solar])
    demand = np.vstack(
        [synth_traffic(p, n_steps, start_day, start_hour, timestep_hours) for p in traffic]
    )
    background = np.full(n_steps, traffic[0].mbs_background * mbs_capacity if traffic else 0.0)
    return TraceSet(energy, demand, background)
