from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .modes import SplitMode
from .system_dynamics import StepOutcome, battery_step, carried_loads, step_cost


@dataclass(frozen=True)
class SearchResult:
    """A mode schedule over the horizon together with its per-step accounting.

    ``batteries_per_step[k]`` is the level at the end of step ``k + 1``.
    """

    modes_per_step: tuple[tuple[SplitMode, ...], ...]
    total_cost: float
    per_step: tuple[StepOutcome, ...]
    batteries_per_step: tuple[tuple[float, ...], ...]
    nodes_expanded: int = 0
    name: str = "Optimal"
    upper_history: tuple[float, ...] = field(default=(), compare=False)

    @property
    def horizon(self) -> int:
        return len(self.modes_per_step)

    def grid_energy_kwh(self, delta_t: float) -> float:
        return delta_t * sum(o.grid_watts for o in self.per_step) / 1000.0

    @property
    def average_drop(self) -> float:
        return sum(o.drop_rate for o in self.per_step) / len(self.per_step)

    def selection_rates(self) -> np.ndarray:
        """Percentage of steps each vSC spends in each mode, shape ``(n_vsc, 4)``."""
        modes = np.array(self.modes_per_step, dtype=int)
        counts = np.stack([(modes == m).sum(axis=0) for m in range(4)], axis=1)
        return 100.0 * counts / modes.shape[0]


def evaluate_sequence(scenario, sequence: Sequence[Sequence[SplitMode]], name: str = "Optimal") -> SearchResult:
    """Replay a mode schedule through the step model, independent of any search state."""
    traces, cluster = scenario.traces, scenario.cluster
    if len(sequence) != scenario.horizon:
        raise ValueError(f"sequence covers {len(sequence)} steps, horizon is {scenario.horizon}")
    b = np.array(cluster.battery.initial, dtype=float)
    total = 0.0
    outcomes, batteries, modes_out = [], [], []
    for t, modes in enumerate(sequence):
        modes = tuple(SplitMode(m) for m in modes)
        loads = carried_loads(modes, traces.demand[:, t], cluster.capacity, float(traces.mbs_background[t]))
        b = battery_step(b, traces.energy[:, t], modes, loads.vsc_loads, cluster)
        outcome = step_cost(modes, t, traces, cluster, scenario.weights)
        total += outcome.cost
        outcomes.append(outcome)
        batteries.append(tuple(float(x) for x in b))
        modes_out.append(modes)
    return SearchResult(tuple(modes_out), total, tuple(outcomes), tuple(batteries), 0, name)
