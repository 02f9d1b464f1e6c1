"""Label-correcting search for the minimum-cost split schedule.

The decision graph has one stage per timestep. A node at stage ``t`` is a
mode vector for the whole cluster; an artificial source precedes stage 1 and
an artificial sink follows stage ``K``, both joined by zero-cost arcs. The
arc into ``(t, S)`` costs ``f(S, t)`` and drains the batteries by the power
``S`` needs during step ``t``.

Because battery levels depend on the whole path, labels carry their battery
vector and are compared by Pareto dominance (lower cost, fuller batteries)
instead of by cost alone.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EnumerationCapError, InfeasibleError
from .modes import SplitMode, decode, mode_vectors
from .power_model import bb1_watts, bb2_watts, vsc_power
from .results import SearchResult
from .system_dynamics import BATTERY_TOL, StepOutcome, step_cost

log = logging.getLogger(__name__)

# Slack on bound comparisons so float reassociation never prunes a tying path.
_BOUND_RTOL = 1e-9


@dataclass(slots=True, eq=False)
class PathLabel:
    """Partial path from the source to a stage-``t`` node.

    ``seq`` lists the mode-vector indices of steps ``1..t``.
    """

    t: int
    index: int
    batteries: tuple[float, ...]
    cost_so_far: float
    parent: "PathLabel | None" = None
    seq: tuple[int, ...] = ()
    alive: bool = True
    n_vsc: int = field(default=0, repr=False)
    estimate: float = field(default=0.0, repr=False)

    @property
    def modes(self) -> tuple[SplitMode, ...] | None:
        if self.index < 0:
            return None
        return decode(self.index, self.n_vsc)


class StageModel:
    """Per-step tables shared by every label: arc costs, outcomes and battery draws."""

    def __init__(self, scenario):
        self.scenario = scenario
        self.n = n = scenario.n_vsc
        self.horizon = horizon = scenario.horizon
        traces, cluster = scenario.traces, scenario.cluster
        self.vectors = list(mode_vectors(n))
        self.width = len(self.vectors)
        self.capacity = cluster.battery.capacity
        self.threshold = cluster.battery.threshold
        self.floor = self.threshold + BATTERY_TOL
        self.outcomes: list[list[StepOutcome]] = [
            [step_cost(v, t, traces, cluster, scenario.weights) for v in self.vectors] for t in range(horizon)
        ]
        self.costs = [[o.cost for o in row] for row in self.outcomes]
        self.cost_array = np.array(self.costs)
        self.energy = np.ascontiguousarray(traces.energy[:, :horizon].T)

        vcap = cluster.capacity.vsc_capacity
        dt = cluster.delta_t
        codes = np.array(self.vectors, dtype=int).reshape(self.width, n)
        self.draws = np.empty((horizon, self.width, n))
        self.mode_draw = np.empty((horizon, n, 4))
        for t in range(horizon):
            per_mode = np.empty((n, 4))
            for i in range(n):
                load = min(traces.demand[i, t], vcap) / vcap
                for m in SplitMode:
                    per_mode[i, m] = vsc_power(cluster.vsc, m, load) * dt / 1000.0
            self.mode_draw[t] = per_mode
            self.draws[t] = per_mode[np.arange(n), codes]

        # Cost-to-go ignoring batteries: an admissible bound for pruning.
        self.bound = [0.0] * (horizon + 1)
        for t in range(horizon - 1, -1, -1):
            self.bound[t] = self.bound[t + 1] + min(self.costs[t])
        self.split = SeparableBound(self, codes)
        self.pooled = PooledBound(self)
        self.saturation = self._saturation()
        self.groups = self._symmetry_groups()

    def _saturation(self) -> np.ndarray:
        """Per step and vSC, a charged level from which every remaining schedule is feasible.

        Charge above it cannot change the cost-to-go, so dominance tests clip there.
        """
        margin = 1e-9
        need = np.full(self.n, -np.inf)
        out = np.empty((self.horizon, self.n))
        for t in range(self.horizon - 1, -1, -1):
            after = self.floor + margin
            if t + 1 < self.horizon:
                after = np.maximum(after, need - self.energy[t + 1])
                after = np.where(need > self.capacity, np.inf, after)
            need = after + self.mode_draw[t].max(axis=1) + margin
            out[t] = need
        return out

    def _symmetry_groups(self) -> list[list[int]]:
        """vSCs with identical traces over the horizon; swapping them leaves every cost unchanged."""
        traces = self.scenario.traces
        groups: dict[bytes, list[int]] = {}
        for i in range(self.n):
            key = traces.energy[i, : self.horizon].tobytes() + traces.demand[i, : self.horizon].tobytes()
            groups.setdefault(key, []).append(i)
        return [g for g in groups.values() if len(g) > 1]

    def dominance_key(self, t: int, batteries: np.ndarray, symmetric: bool = True) -> np.ndarray:
        """Battery vector that decides the future from end-of-step-``t`` levels.

        Only the charged level ``min(b + E, cap)`` of the next step matters, and
        charge above the saturation level is worthless. With ``symmetric``,
        interchangeable vSCs are sorted so permuted states compare equal.
        """
        key = np.minimum(np.minimum(batteries + self.energy[t], self.capacity), self.saturation[t])
        if symmetric:
            for group in self.groups:
                key[..., group] = np.sort(key[..., group], axis=-1)
        return key

    def to_go_many(self, t: int, batteries: np.ndarray) -> np.ndarray:
        """Admissible cost-to-go from each row of end-of-step-``t`` batteries: the best of three relaxations."""
        if t >= self.horizon:
            return np.zeros(len(batteries))
        split = self.split.to_go_many(t, batteries)
        pooled = self.pooled.to_go_many(t, batteries.sum(axis=1))
        return np.maximum(np.maximum(split, pooled), self.bound[t])

    def to_go(self, t: int, batteries: Sequence[float]) -> float:
        return float(self.to_go_many(t, np.array([batteries], dtype=float))[0])

    def children(self, t: int, batteries: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
        """Battery vectors after step ``t + 1`` for every mode vector, and their feasibility."""
        charged = np.minimum(np.asarray(batteries, dtype=float) + self.energy[t], self.capacity)
        levels = charged[None, :] - self.draws[t]
        return levels, np.all(levels > self.floor, axis=1)


class SeparableBound:
    """Battery-aware cost-to-go bound from a per-vSC relaxation.

    Each step cost is split as ``f(S, t) >= base[t] + sum_i share[t][i][S_i]``.
    A vSC's share is the macro baseband it causes plus the macro cost of its
    offloaded traffic taken alone; ``base[t]`` is the exact minimum of the
    remainder over all mode vectors, so the split never overestimates.
    Dropping the coupling leaves one single-battery problem per vSC, solved
    backward in closed form: its cost-to-go is a non-increasing step function
    of the battery level, stored as breakpoints ``xs`` with values ``vals``
    (``vals[k]`` holds for levels above ``xs[k]``).
    """

    # Breakpoints are lowered by this much per step so rounding can only weaken the bound.
    EPS = 1e-9

    def __init__(self, model: "StageModel", codes: np.ndarray):
        scenario = model.scenario
        self.model = model
        n, horizon = model.n, model.horizon
        traces, cluster, weights = scenario.traces, scenario.cluster, scenario.weights
        caps = cluster.capacity
        p_max = cluster.p_max if cluster.normalize_power else 1.0
        scale = weights.power * (1.0 + cluster.mbs.radio.overhead_fraction) / p_max
        vsc_bb1 = bb1_watts(cluster.vsc)

        share = np.zeros((horizon, n, 4))
        for t in range(horizon):
            demand = traces.demand[:, t]
            background = float(traces.mbs_background[t])
            total = background + float(demand.sum())

            def macro(offered: float) -> float:
                carried = min(offered, caps.mbs_capacity)
                drop = (offered - carried) / total if total > 0 else 0.0
                return scale * bb2_watts(cluster.mbs, carried / caps.mbs_capacity) + weights.drop * drop

            idle = macro(background)
            for i in range(n):
                served = min(demand[i], caps.vsc_capacity)
                load = served / caps.vsc_capacity
                for m in SplitMode:
                    offered = demand[i] if m is SplitMode.OFF else demand[i] - served
                    share[t, i, m] = macro(background + offered) - idle
                share[t, i, SplitMode.CRAN] += scale * (vsc_bb1 + bb2_watts(cluster.vsc, load))
                share[t, i, SplitMode.UPPER_LOWER] += scale * bb2_watts(cluster.vsc, load)

        rest = np.array(model.costs) - share[:, np.arange(n), codes].sum(axis=2)
        base = rest.min(axis=1)
        self.base_to_go = np.concatenate([np.cumsum(base[::-1])[::-1], [0.0]])
        self.tables = self._tables(share)
        self.root_bound = self.to_go_many(0, np.array([scenario.cluster.battery.initial], dtype=float))[0]

    def _tables(self, share: np.ndarray):
        model = self.model
        n, horizon = model.n, model.horizon
        floor, cap = model.floor, model.capacity
        tables = [[None] * n for _ in range(horizon + 1)]
        for i in range(n):
            xs, vals = np.array([floor]), np.array([0.0])
            tables[horizon][i] = (xs, vals)
            for t in range(horizon - 1, -1, -1):
                draw = model.mode_draw[t, i][:, None]
                valid = xs[None, :] + draw < cap + self.EPS
                cx = (xs[None, :] + draw - model.energy[t, i] - self.EPS)[valid]
                cv = (vals[None, :] + share[t, i][:, None])[valid]
                xs, vals = _lower_envelope(cx, cv)
                if t > 0:
                    xs, vals = _clip_floor(xs, vals, floor)
                tables[t][i] = (xs, vals)
        return tables

    def to_go_many(self, t: int, batteries: np.ndarray) -> np.ndarray:
        """Lower bounds on the cost of steps ``t + 1 .. K``, one per row of end-of-step-``t`` batteries."""
        total = np.full(len(batteries), self.base_to_go[t])
        for i, (xs, vals) in enumerate(self.tables[t]):
            k = np.searchsorted(xs, batteries[:, i], side="left") - 1
            total += np.where(k >= 0, vals[np.maximum(k, 0)], np.inf)
        return total


def _lower_envelope(cx: np.ndarray, cv: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Breakpoints where the running minimum of ``cv`` (ordered by ``cx``) strictly drops."""
    order = np.lexsort((cv, cx))
    cx, cv = cx[order], cv[order]
    prev_min = np.concatenate([[np.inf], np.minimum.accumulate(cv)[:-1]])
    keep = cv < prev_min
    return cx[keep], cv[keep]


def _clip_floor(xs: np.ndarray, vals: np.ndarray, floor: float) -> tuple[np.ndarray, np.ndarray]:
    # Every end-of-step level must itself clear the threshold.
    below = int(np.searchsorted(xs, floor, side="right"))
    if not below:
        return xs, vals
    return np.concatenate([[floor], xs[below:]]), np.concatenate([[vals[below - 1]], vals[below:]])


class PooledBound:
    """Cost-to-go bound that merges every battery into one shared reservoir.

    It keeps the exact coupled step cost that the separable bound gives up,
    but lets one vSC's surplus cover another's deficit. Pooled floors and
    caps are implied by the per-vSC ones, so the relaxation is valid.
    """

    EPS = SeparableBound.EPS

    def __init__(self, model: "StageModel"):
        n, horizon = model.n, model.horizon
        floor, cap = n * model.floor, n * model.capacity
        costs = np.array(model.costs)
        draw = model.draws.sum(axis=2)
        harvest = model.energy.sum(axis=1)
        xs, vals = np.array([floor]), np.array([0.0])
        self.tables: list = [None] * (horizon + 1)
        self.tables[horizon] = (xs, vals)
        for t in range(horizon - 1, -1, -1):
            valid = xs[None, :] + draw[t][:, None] < cap + self.EPS
            cx = (xs[None, :] + draw[t][:, None] - harvest[t] - self.EPS)[valid]
            cv = (vals[None, :] + costs[t][:, None])[valid]
            xs, vals = _lower_envelope(cx, cv)
            if t > 0:
                xs, vals = _clip_floor(xs, vals, floor)
            self.tables[t] = (xs, vals)

    def to_go_many(self, t: int, totals: np.ndarray) -> np.ndarray:
        xs, vals = self.tables[t]
        k = np.searchsorted(xs, totals, side="left") - 1
        return np.where(k >= 0, vals[np.maximum(k, 0)], np.inf)


_MODEL_CACHE: dict[int, StageModel] = {}


def _model(scenario) -> StageModel:
    key = id(scenario)
    model = _MODEL_CACHE.get(key)
    if model is None or model.scenario is not scenario:
        _MODEL_CACHE.clear()
        model = _MODEL_CACHE[key] = StageModel(scenario)
    return model


def source_label(scenario) -> PathLabel:
    return PathLabel(0, -1, tuple(float(b) for b in scenario.cluster.battery.initial), 0.0, n_vsc=scenario.n_vsc)


def expand(label: PathLabel, scenario, model: StageModel | None = None) -> list[PathLabel]:
    """Feasible children of ``label`` in mode-vector order."""
    model = model or _model(scenario)
    if label.t >= model.horizon:
        raise ValueError("cannot expand a label at the final stage")
    levels, ok = model.children(label.t, label.batteries)
    costs = model.costs[label.t]
    out = []
    for j in np.flatnonzero(ok):
        j = int(j)
        out.append(
            PathLabel(
                t=label.t + 1,
                index=j,
                batteries=tuple(levels[j].tolist()),
                cost_so_far=label.cost_so_far + costs[j],
                parent=label,
                seq=label.seq + (j,),
                n_vsc=model.n,
            )
        )
    return out


def _dominates(a_cost: float, a_bats, a_seq, b_cost: float, b_bats, b_seq) -> bool:
    """Whether label ``a`` makes label ``b`` redundant (ties go to the lexicographically smaller path)."""
    if a_cost > b_cost:
        return False
    if a_cost == b_cost and a_seq > b_seq:
        return False
    for x, y in zip(a_bats, b_bats):
        if x < y:
            return False
    return True


class _Front:
    """Non-dominated labels sharing one key, with vectorized dominance tests."""

    __slots__ = ("labels", "costs", "bats", "size")

    def __init__(self, n: int):
        self.labels: list[PathLabel] = []
        self.costs = np.empty(8)
        self.bats = np.empty((8, n))
        self.size = 0

    def dominated(self, cost: float, bats: np.ndarray, seq: tuple[int, ...]) -> bool:
        k = self.size
        if k == 0:
            return False
        mask = (self.costs[:k] <= cost) & np.all(self.bats[:k] >= bats, axis=1)
        if not mask.any():
            return False
        for i in np.flatnonzero(mask):
            other = self.labels[i]
            if other.cost_so_far < cost or other.seq <= seq:
                return True
        return False

    def insert(self, label: PathLabel, bats: np.ndarray) -> None:
        k = self.size
        if k:
            cost = label.cost_so_far
            mask = (self.costs[:k] >= cost) & np.all(self.bats[:k] <= bats, axis=1)
            if mask.any():
                keep = np.ones(k, dtype=bool)
                for i in np.flatnonzero(mask):
                    other = self.labels[i]
                    if other.cost_so_far > cost or label.seq <= other.seq:
                        other.alive = False
                        keep[i] = False
                if not keep.all():
                    idx = np.flatnonzero(keep)
                    self.labels = [self.labels[i] for i in idx]
                    m = len(idx)
                    self.costs[:m] = self.costs[idx]
                    self.bats[:m] = self.bats[idx]
                    self.size = k = m
        if k == len(self.costs):
            self.costs = np.resize(self.costs, 2 * k)
            self.bats = np.resize(self.bats, (2 * k, self.bats.shape[1]))
        self.labels.append(label)
        self.costs[k] = label.cost_so_far
        self.bats[k] = bats
        self.size = k + 1


@dataclass
class SearchStats:
    nodes_expanded: int = 0
    labels_created: int = 0
    dominated: int = 0
    bound_pruned: int = 0
    infeasible: int = 0
    deepest: int = 0
    upper_history: list = field(default_factory=list)


def _incumbent_from(results, model: StageModel):
    """Best static schedule that is also feasible for the optimizer, as (cost, seq, batteries)."""
    best = None
    for r in results:
        if any(not b > model.floor for step in r.batteries_per_step for b in step):
            continue
        seq = tuple(_vector_index(m) for m in r.modes_per_step)
        cost = 0.0
        for t, j in enumerate(seq):
            cost += model.costs[t][j]
        if best is None or cost < best[0] or (cost == best[0] and seq < best[1]):
            best = (cost, seq, r.batteries_per_step)
    return best


def _vector_index(modes) -> int:
    index = 0
    for m in modes:
        index = index * 4 + int(m)
    return index


def solve(
    scenario,
    *,
    warm_start: bool | None = None,
    use_bound: bool | None = None,
    label_key: str | None = None,
    fidelity_mode: bool | None = None,
    static_results: Sequence[SearchResult] | None = None,
) -> SearchResult:
    """Minimum-cost feasible schedule by depth-first label correcting.

    OPEN is a stack. A child survives only if its batteries stay above the
    threshold, its cost plus the battery-free cost-to-go does not exceed
    UPPER, and no label with the same key dominates it. Reaching the last
    stage updates UPPER. Keyword arguments override ``scenario.solver``.

    ``fidelity_mode`` runs the plain one-label-per-(t, modes) variant with
    children in index order. It ignores path dependence of the batteries and
    may return a suboptimal schedule.
    """
    opts = scenario.solver
    warm_start = opts.warm_start if warm_start is None else warm_start
    use_bound = opts.use_bound if use_bound is None else use_bound
    label_key = opts.label_key if label_key is None else label_key
    fidelity_mode = opts.fidelity_mode if fidelity_mode is None else fidelity_mode

    model = _model(scenario)
    horizon = model.horizon
    stats = SearchStats()
    upper = math.inf
    best_seq: tuple[int, ...] | None = None
    best_batteries = None

    if warm_start:
        if static_results is None:
            from .policies import STATIC_POLICIES, run_policy

            static_results = [run_policy(p, scenario) for p in STATIC_POLICIES]
        incumbent = _incumbent_from(static_results, model)
        if incumbent is not None:
            upper, best_seq, best_batteries = incumbent
            stats.upper_history.append(upper)

    if fidelity_mode:
        upper, best_seq, best_batteries = _literal_search(model, stats, upper, best_seq, best_batteries, use_bound)
    else:
        upper, best_seq, best_batteries = _label_search(
            model, stats, upper, best_seq, best_batteries, use_bound, label_key
        )

    if best_seq is None:
        step = min(stats.deepest + 1, horizon)
        raise InfeasibleError(
            f"no schedule keeps every battery above {model.threshold:g} kWh; "
            f"all paths are pruned at timestep {step}",
            first_pruned_step=step,
        )
    log.info(
        "solved %s: cost=%.9f expanded=%d labels=%d dominated=%d bound_pruned=%d",
        scenario.name, upper, stats.nodes_expanded, stats.labels_created, stats.dominated, stats.bound_pruned,
    )
    modes = tuple(model.vectors[j] for j in best_seq)
    per_step = tuple(model.outcomes[t][j] for t, j in enumerate(best_seq))
    return SearchResult(
        modes_per_step=modes,
        total_cost=upper,
        per_step=per_step,
        batteries_per_step=tuple(tuple(float(x) for x in b) for b in best_batteries),
        nodes_expanded=stats.nodes_expanded,
        name="Optimal",
        upper_history=tuple(stats.upper_history),
    )


def _trace_batteries(label: PathLabel) -> list[tuple[float, ...]]:
    out = []
    while label is not None and label.t > 0:
        out.append(label.batteries)
        label = label.parent
    out.reverse()
    return out


def _label_search(model, stats, upper, best_seq, best_batteries, use_bound, label_key):
    horizon = model.horizon
    fronts: dict = {}
    root = PathLabel(0, -1, tuple(float(b) for b in model.scenario.cluster.battery.initial), 0.0, n_vsc=model.n)
    open_stack = [root]
    by_stage = label_key == "stage"

    def slack(u: float) -> float:
        return u + _BOUND_RTOL * max(1.0, abs(u))

    while open_stack:
        node = open_stack.pop()
        if not node.alive:
            continue
        t = node.t
        if use_bound and node.estimate > slack(upper):
            stats.bound_pruned += 1
            continue
        stats.nodes_expanded += 1
        if stats.nodes_expanded % 50_000 == 0:
            log.debug(
                "expanded=%d open=%d upper=%.9f labels=%d",
                stats.nodes_expanded, len(open_stack), upper, stats.labels_created,
            )
        levels, ok = model.children(t, node.batteries)
        costs = model.costs[t]
        feasible = np.flatnonzero(ok)
        stats.infeasible += model.width - len(feasible)
        if len(feasible) == 0:
            continue
        stats.deepest = max(stats.deepest, t + 1)
        base = node.cost_so_far
        arc = model.cost_array[t][feasible]
        cost_arr = base + arc
        if use_bound:
            est_arr = cost_arr + model.to_go_many(t + 1, levels[feasible])
            keep = est_arr <= slack(upper)
            stats.bound_pruned += len(feasible) - int(keep.sum())
        else:
            est_arr = cost_arr
            keep = np.ones(len(feasible), dtype=bool)
        scored = sorted(zip(est_arr[keep].tolist(), feasible[keep].tolist()))
        pushed = []
        for estimate, j in scored:
            cost = base + costs[j]
            seq = node.seq + (j,)
            if t + 1 == horizon:
                if cost < upper or (cost == upper and (best_seq is None or seq < best_seq)):
                    upper = cost
                    best_seq = seq
                    leaf = PathLabel(t + 1, j, tuple(levels[j].tolist()), cost, node, seq, n_vsc=model.n)
                    best_batteries = _trace_batteries(leaf)
                    stats.upper_history.append(upper)
                continue
            if use_bound and estimate > slack(upper):
                stats.bound_pruned += 1
                continue
            bats = levels[j]
            key = t + 1 if by_stage else (t + 1, j)
            front = fronts.get(key)
            if front is None:
                front = fronts[key] = _Front(model.n)
            dom = model.dominance_key(t + 1, bats, symmetric=by_stage)
            if front.dominated(cost, dom, seq):
                stats.dominated += 1
                continue
            child = PathLabel(t + 1, j, tuple(bats.tolist()), cost, node, seq, n_vsc=model.n, estimate=estimate)
            front.insert(child, dom)
            stats.labels_created += 1
            pushed.append(child)
        open_stack.extend(reversed(pushed))
    return upper, best_seq, best_batteries


def _literal_search(model, stats, upper, best_seq, best_batteries, use_bound):
    """One label per (t, mode vector); a cheaper path overwrites the node's battery state."""
    horizon = model.horizon
    nodes: dict[tuple[int, int], PathLabel] = {}
    in_open: set = set()
    root = PathLabel(0, -1, tuple(float(b) for b in model.scenario.cluster.battery.initial), 0.0, n_vsc=model.n)
    open_stack: list = [root]
    while open_stack:
        node = open_stack.pop()
        in_open.discard((node.t, node.index))
        t = node.t
        stats.nodes_expanded += 1
        levels, ok = model.children(t, node.batteries)
        costs = model.costs[t]
        for j in range(model.width):
            if not ok[j]:
                stats.infeasible += 1
                continue
            stats.deepest = max(stats.deepest, t + 1)
            cost = node.cost_so_far + costs[j]
            key = (t + 1, j)
            existing = nodes.get(key)
            limit = upper if existing is None else min(existing.cost_so_far, upper)
            if not cost < limit:
                if use_bound:
                    continue
                if existing is not None and not cost < existing.cost_so_far:
                    continue
            seq = node.seq + (j,)
            label = PathLabel(t + 1, j, tuple(levels[j].tolist()), cost, node, seq, n_vsc=model.n)
            nodes[key] = label
            if t + 1 == horizon:
                if cost < upper:
                    upper, best_seq = cost, seq
                    best_batteries = _trace_batteries(label)
                    stats.upper_history.append(upper)
            else:
                if key in in_open:
                    # Replace the queued entry in place.
                    for pos in range(len(open_stack) - 1, -1, -1):
                        if (open_stack[pos].t, open_stack[pos].index) == key:
                            open_stack[pos] = label
                            break
                else:
                    in_open.add(key)
                    open_stack.append(label)
    return upper, best_seq, best_batteries


def brute_force(scenario, cap: int | None = None) -> SearchResult:
    """Exhaustive oracle: score every mode sequence and keep the cheapest feasible one.

    Sequences are enumerated in lexicographic order and costs accumulate step
    by step, so ties resolve to the lexicographically smallest sequence.
    """
    cap = scenario.solver.enumeration_cap if cap is None else cap
    n, horizon = scenario.n_vsc, scenario.horizon
    width = 4**n
    total = width**horizon
    if total > cap:
        raise EnumerationCapError(f"{width}^{horizon} = {total} sequences exceed the enumeration cap {cap}")
    traces, cluster = scenario.traces, scenario.cluster
    vectors = list(mode_vectors(n))
    codes = np.array(vectors, dtype=int).reshape(width, n)
    cap_kwh = cluster.battery.capacity
    floor = cluster.battery.threshold + BATTERY_TOL
    vcap = cluster.capacity.vsc_capacity
    dt = cluster.delta_t

    bats = np.array([cluster.battery.initial], dtype=float)
    cost = np.zeros(1)
    ok = np.ones(1, dtype=bool)
    history = []
    for t in range(horizon):
        arc = np.array([step_cost(v, t, traces, cluster, scenario.weights).cost for v in vectors])
        per_mode = np.array(
            [
                [vsc_power(cluster.vsc, m, min(traces.demand[i, t], vcap) / vcap) * dt / 1000.0 for m in SplitMode]
                for i in range(n)
            ]
        )
        draw = per_mode[np.arange(n), codes]
        charged = np.minimum(bats + traces.energy[:, t], cap_kwh)
        bats = (charged[:, None, :] - draw[None, :, :]).reshape(-1, n)
        cost = (cost[:, None] + arc[None, :]).reshape(-1)
        ok = np.repeat(ok, width) & np.all(bats > floor, axis=1)
        if not ok.any():
            raise InfeasibleError(
                f"no schedule keeps every battery above {cluster.battery.threshold:g} kWh; "
                f"all paths are pruned at timestep {t + 1}",
                first_pruned_step=t + 1,
            )
        history.append(bats)
    masked = np.where(ok, cost, np.inf)
    flat = int(np.argmin(masked))
    digits = []
    rest = flat
    for _ in range(horizon):
        rest, d = divmod(rest, width)
        digits.append(d)
    digits.reverse()
    modes = tuple(vectors[j] for j in digits)
    per_step = tuple(step_cost(modes[t], t, traces, cluster, scenario.weights) for t in range(horizon))
    batteries = []
    for t in range(horizon):
        prefix = flat // width ** (horizon - 1 - t)
        batteries.append(tuple(float(x) for x in history[t][prefix]))
    return SearchResult(
        modes_per_step=modes,
        total_cost=float(masked[flat]),
        per_step=per_step,
        batteries_per_step=tuple(batteries),
        nodes_expanded=total,
        name="BruteForce",
    )
