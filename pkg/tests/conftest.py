from __future__ import annotations

import numpy as np
import pytest

from vsplit.scenario import build_scenario, resolve_config
from vsplit.traffic_energy import TraceSet


def make_scenario(energy, demand, background=None, *, initial=None, battery_kwh=2.0, threshold_fraction=0.2,
                  weights=(0.5, 0.5), **overrides):
    """Scenario from explicit traces; ``energy``/``demand`` have shape (n_vsc, K)."""
    energy = np.atleast_2d(np.asarray(energy, dtype=float))
    demand = np.atleast_2d(np.asarray(demand, dtype=float))
    n, horizon = energy.shape
    if background is None:
        background = np.zeros(horizon)
    raw = {
        "n_vsc": n,
        "horizon": horizon,
        "weights": {"power": weights[0], "drop": weights[1]},
        "battery": {"capacity": battery_kwh, "threshold_fraction": threshold_fraction, "initial": initial},
        **overrides,
    }
    cfg = resolve_config(raw)
    return build_scenario(cfg, traces=TraceSet(energy, demand, np.asarray(background, dtype=float)))


def random_scenario(rng: np.random.Generator, n: int, horizon: int, *, tight: bool = False):
    """Small random instance; ``tight`` puts batteries close to the threshold so it binds."""
    hi = 0.05 if tight else 0.3
    energy = rng.uniform(0.0, hi, (n, horizon))
    demand = rng.uniform(0.0, 40.0, (n, horizon))
    background = rng.uniform(0.0, 10.0, horizon)
    low, high = (0.401, 0.55) if tight else (0.41, 1.0)
    initial = [float(x) for x in rng.uniform(low, high, n)]
    w = float(rng.uniform())
    return make_scenario(energy, demand, background, initial=initial, weights=(w, 1.0 - w))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
