"""Mixed-integer model of the scheduling problem, used only as an independent test oracle.

One binary per (timestep, mode vector) and one continuous level per (timestep,
vSC). The capped charge ``min(b + E, cap)`` becomes two linear upper bounds;
since a fuller battery never hurts, the solver always sits on the smaller one.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import lil_matrix

from vsplit.modes import mode_vectors
from vsplit.system_dynamics import BATTERY_TOL, step_cost, vsc_draws


def milp_optimum(scenario, time_limit: float = 300.0) -> tuple[float, list[tuple]]:
    traces, cluster = scenario.traces, scenario.cluster
    n, horizon = scenario.n_vsc, scenario.horizon
    vectors = list(mode_vectors(n))
    width = len(vectors)
    cost = np.array([[step_cost(v, t, traces, cluster, scenario.weights).cost for v in vectors] for t in range(horizon)])
    draw = np.array([[vsc_draws(v, t, traces, cluster) for v in vectors] for t in range(horizon)])

    ny, nb = horizon * width, horizon * n
    c = np.concatenate([cost.reshape(-1), np.zeros(nb)])
    a = lil_matrix((horizon + 2 * horizon * n, ny + nb))
    lo, hi = [], []
    row = 0
    for t in range(horizon):
        a[row, t * width : (t + 1) * width] = 1
        lo.append(1)
        hi.append(1)
        row += 1
    initial = np.array(cluster.battery.initial)
    cap = cluster.battery.capacity
    for t in range(horizon):
        for i in range(n):
            level = ny + t * n + i
            # b[t] + draw <= b[t-1] + E
            a[row, level] = 1
            a[row, t * width : (t + 1) * width] = draw[t, :, i]
            if t > 0:
                a[row, level - n] = -1
                hi.append(traces.energy[i, t])
            else:
                hi.append(initial[i] + traces.energy[i, t])
            lo.append(-np.inf)
            row += 1
            # b[t] + draw <= cap
            a[row, level] = 1
            a[row, t * width : (t + 1) * width] = draw[t, :, i]
            hi.append(cap)
            lo.append(-np.inf)
            row += 1
    floor = cluster.battery.threshold + BATTERY_TOL
    bounds = Bounds(np.r_[np.zeros(ny), np.full(nb, floor)], np.r_[np.ones(ny), np.full(nb, cap)])
    res = milp(
        c,
        constraints=LinearConstraint(a.tocsr(), lo, hi),
        integrality=np.r_[np.ones(ny), np.zeros(nb)],
        bounds=bounds,
        options={"mip_rel_gap": 0.0, "time_limit": time_limit},
    )
    if res.status != 0:
        raise RuntimeError(f"MILP did not reach a proven optimum: {res.message}")
    picks = res.x[:ny].reshape(horizon, width).argmax(axis=1)
    return float(res.fun), [vectors[j] for j in picks]
