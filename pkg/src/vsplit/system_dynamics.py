"""Per-step evolution of the cluster: batteries, carried traffic, grid power and cost."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .modes import SplitMode
from .power_model import NodePowerParams, default_mbs_params, default_vsc_params, mbs_power, vsc_power
from .traffic_energy import TraceSet

BATTERY_TOL = 1e-12


@dataclass(frozen=True)
class BatteryParams:
    """Battery limits in kWh. ``initial`` holds one entry per vSC."""

    capacity: float
    threshold: float
    initial: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "initial", tuple(float(b) for b in self.initial))
        if not 0.0 <= self.threshold < self.capacity:
            raise ConfigError("battery threshold must satisfy 0 <= threshold < capacity")
        if any(not 0.0 <= b <= self.capacity for b in self.initial):
            raise ConfigError("initial battery levels must lie in [0, capacity]")


@dataclass(frozen=True)
class CapacityParams:
    vsc_capacity: float = 25.0
    mbs_capacity: float = 35.0
    p_max: float | None = None  # None: derived from the power parameters

    def __post_init__(self) -> None:
        if self.vsc_capacity <= 0 or self.mbs_capacity <= 0:
            raise ConfigError("radio capacities must be positive")
        if self.p_max is not None and self.p_max <= 0:
            raise ConfigError("p_max must be positive")


@dataclass(frozen=True)
class Weights:
    power: float = 0.5
    drop: float = 0.5

    def __post_init__(self) -> None:
        if self.power < 0 or self.drop < 0:
            raise ConfigError("cost weights must be non-negative")
        if not math.isclose(self.power + self.drop, 1.0, rel_tol=0.0, abs_tol=1e-9):
            raise ConfigError(f"cost weights must sum to 1, got {self.power} + {self.drop}")


@dataclass(frozen=True)
class ClusterParams:
    """Everything the per-step model needs besides the traces."""

    battery: BatteryParams
    vsc: NodePowerParams = field(default_factory=default_vsc_params)
    mbs: NodePowerParams = field(default_factory=default_mbs_params)
    capacity: CapacityParams = field(default_factory=CapacityParams)
    delta_t: float = 1.0
    normalize_power: bool = True

    def __post_init__(self) -> None:
        if self.delta_t <= 0:
            raise ConfigError("delta_t must be positive")

    @property
    def n_vsc(self) -> int:
        return len(self.battery.initial)

    @property
    def p_max(self) -> float:
        """Grid power normalizer: full macro load with every vSC in CRAN at full load."""
        if self.capacity.p_max is not None:
            return self.capacity.p_max
        n = self.n_vsc
        return mbs_power(self.mbs, self.vsc, [SplitMode.CRAN] * n, [1.0] * n, 1.0)


@dataclass(frozen=True)
class StepOutcome:
    grid_watts: float
    drop_rate: float
    cost: float


@dataclass(frozen=True)
class CarriedLoads:
    vsc_loads: tuple[float, ...]
    mbs_load: float
    drop_rate: float
    carried_vsc: float
    carried_mbs: float
    dropped: float


def battery_step(
    b: Sequence[float],
    e: Sequence[float],
    modes: Sequence[SplitMode],
    loads: Sequence[float],
    params: ClusterParams,
    delta_t: float | None = None,
) -> np.ndarray:
    """Battery levels after one step: charge (capped) then discharge.

    Results may fall below the threshold or zero; feasibility is for the caller.
    """
    dt = params.delta_t if delta_t is None else delta_t
    cap = params.battery.capacity
    out = np.empty(len(b))
    for i, (level, harvest, mode, load) in enumerate(zip(b, e, modes, loads)):
        out[i] = min(level + harvest, cap) - vsc_power(params.vsc, mode, load) * dt / 1000.0
    return out


def is_feasible_level(level: float, threshold: float) -> bool:
    return level > threshold + BATTERY_TOL


def carried_loads(
    modes: Sequence[SplitMode],
    demand: Sequence[float],
    caps: CapacityParams,
    background: float = 0.0,
) -> CarriedLoads:
    """Split offered traffic between the small cells, the macro cell and the drop bin.

    Active vSCs serve their own demand up to capacity; the excess, the demand
    of switched off vSCs and the macro background are offered to the macro.
    """
    if len(modes) != len(demand):
        raise ValueError("modes and demand must have equal length")
    if background < 0 or any(d < 0 for d in demand):
        raise ValueError("demand must be non-negative")
    vsc_loads = []
    carried_vsc = 0.0
    offered_mbs = background
    for mode, d in zip(modes, demand):
        if SplitMode(mode) is SplitMode.OFF:
            vsc_loads.append(0.0)
            offered_mbs += d
        else:
            served = min(d, caps.vsc_capacity)
            vsc_loads.append(served / caps.vsc_capacity)
            carried_vsc += served
            offered_mbs += d - served
    carried_mbs = min(offered_mbs, caps.mbs_capacity)
    dropped = offered_mbs - carried_mbs
    total = background + sum(demand)
    drop_rate = dropped / total if total > 0 else 0.0
    return CarriedLoads(
        vsc_loads=tuple(vsc_loads),
        mbs_load=carried_mbs / caps.mbs_capacity,
        drop_rate=drop_rate,
        carried_vsc=carried_vsc,
        carried_mbs=carried_mbs,
        dropped=dropped,
    )


def weighted_cost(grid_watts: float, drop_rate: float, weights: Weights, p_max: float | None) -> float:
    """``w1 * power_term + w2 * drop_rate``; the power term is ``grid_watts / p_max`` unless ``p_max`` is None."""
    power_term = grid_watts if p_max is None else grid_watts / p_max
    return weights.power * power_term + weights.drop * drop_rate


def step_cost(
    modes: Sequence[SplitMode],
    t: int,
    traces: TraceSet,
    params: ClusterParams,
    weights: Weights,
) -> StepOutcome:
    """Grid power, drop rate and weighted cost of ``modes`` at trace column ``t`` (0-based)."""
    if not isinstance(weights, Weights):
        weights = Weights(*weights)
    loads = carried_loads(modes, traces.demand[:, t], params.capacity, float(traces.mbs_background[t]))
    grid = mbs_power(params.mbs, params.vsc, modes, loads.vsc_loads, loads.mbs_load)
    p_max = params.p_max if params.normalize_power else None
    return StepOutcome(grid, loads.drop_rate, weighted_cost(grid, loads.drop_rate, weights, p_max))


def vsc_draws(modes: Sequence[SplitMode], t: int, traces: TraceSet, params: ClusterParams) -> np.ndarray:
    """Battery energy (kWh) each vSC spends during step ``t`` under ``modes``."""
    loads = carried_loads(modes, traces.demand[:, t], params.capacity, float(traces.mbs_background[t]))
    return np.array(
        [vsc_power(params.vsc, m, load) * params.delta_t / 1000.0 for m, load in zip(modes, loads.vsc_loads)]
    )
