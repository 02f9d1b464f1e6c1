"""Static split baselines and the optimal-versus-static comparison."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .modes import SplitMode
from .results import SearchResult
from .system_dynamics import BATTERY_TOL, carried_loads, step_cost
from .power_model import vsc_power


@dataclass(frozen=True)
class StaticPolicy:
    """Keep every vSC in ``fixed_mode`` while its battery allows, otherwise switch it off."""

    fixed_mode: SplitMode

    def __post_init__(self) -> None:
        mode = SplitMode(self.fixed_mode)
        if mode is SplitMode.OFF:
            raise ValueError("a static policy needs an active split mode")
        object.__setattr__(self, "fixed_mode", mode)

    @property
    def name(self) -> str:
        return self.fixed_mode.label


STATIC_POLICIES = tuple(StaticPolicy(m) for m in (SplitMode.CRAN, SplitMode.UPPER_LOWER, SplitMode.MAC_PHY))


def run_policy(policy: StaticPolicy, scenario) -> SearchResult:
    """Simulate a static policy; each vSC decides independently every step.

    With the default ``projected`` check a vSC runs ``fixed_mode`` only if
    the battery after the step would stay above threshold. The ``current``
    check looks at the level at the start of the step instead.
    """
    traces, cluster = scenario.traces, scenario.cluster
    cap, threshold = cluster.battery.capacity, cluster.battery.threshold
    dt = cluster.delta_t
    vcap = cluster.capacity.vsc_capacity
    b = np.array(cluster.battery.initial, dtype=float)
    total = 0.0
    modes_out, outcomes, batteries = [], [], []
    for t in range(scenario.horizon):
        modes = []
        for i in range(scenario.n_vsc):
            charged = min(b[i] + traces.energy[i, t], cap)
            load = min(traces.demand[i, t], vcap) / vcap
            if scenario.switch_off_check == "projected":
                level = charged - vsc_power(cluster.vsc, policy.fixed_mode, load) * dt / 1000.0
            else:
                level = b[i]
            modes.append(policy.fixed_mode if level > threshold + BATTERY_TOL else SplitMode.OFF)
        modes = tuple(modes)
        loads = carried_loads(modes, traces.demand[:, t], cluster.capacity, float(traces.mbs_background[t]))
        for i, (mode, load) in enumerate(zip(modes, loads.vsc_loads)):
            b[i] = min(b[i] + traces.energy[i, t], cap) - vsc_power(cluster.vsc, mode, load) * dt / 1000.0
        outcome = step_cost(modes, t, traces, cluster, scenario.weights)
        total += outcome.cost
        modes_out.append(modes)
        outcomes.append(outcome)
        batteries.append(tuple(float(x) for x in b))
    return SearchResult(tuple(modes_out), total, tuple(outcomes), tuple(batteries), 0, policy.name)


@dataclass(frozen=True)
class ComparisonRow:
    policy: str
    total_cost: float
    grid_energy_kwh: float
    average_drop_pct: float
    selection_pct: tuple[float, float, float, float]  # Off, CRAN, UpperLower, MACPHY averaged over vSCs


@dataclass(frozen=True)
class ComparisonReport:
    scenario_name: str
    rows: tuple[ComparisonRow, ...]
    results: tuple[SearchResult, ...]

    def row(self, policy: str) -> ComparisonRow:
        for r in self.rows:
            if r.policy == policy:
                return r
        raise KeyError(policy)

    def to_table(self) -> str:
        header = f"{'Policy':<12}{'Grid kWh':>12}{'Drop %':>10}{'Off %':>9}{'CRAN %':>9}{'UL %':>9}{'MACPHY %':>10}{'Cost':>12}"
        lines = [header, "-" * len(header)]
        for r in self.rows:
            off, cran, ul, mac = r.selection_pct
            lines.append(
                f"{r.policy:<12}{r.grid_energy_kwh:>12.3f}{r.average_drop_pct:>10.3f}"
                f"{off:>9.1f}{cran:>9.1f}{ul:>9.1f}{mac:>10.1f}{r.total_cost:>12.6f}"
            )
        return "\n".join(lines)


def summarize(result: SearchResult, delta_t: float) -> ComparisonRow:
    rates = result.selection_rates().mean(axis=0)
    return ComparisonRow(
        policy=result.name,
        total_cost=result.total_cost,
        grid_energy_kwh=result.grid_energy_kwh(delta_t),
        average_drop_pct=100.0 * result.average_drop,
        selection_pct=tuple(float(r) for r in rates),  # type: ignore[arg-type]
    )


def compare(scenario, policies: Sequence[StaticPolicy] = STATIC_POLICIES, optimal: SearchResult | None = None) -> ComparisonReport:
    """Run the optimizer and each static policy on ``scenario``."""
    from .optimizer import solve

    if not policies:
        raise ValueError("compare needs at least one static policy")
    static = [run_policy(p, scenario) for p in policies]
    if optimal is None:
        optimal = solve(scenario, static_results=static)
    results = (optimal, *static)
    rows = tuple(summarize(r, scenario.delta_t) for r in results)
    return ComparisonReport(scenario.name, rows, results)
