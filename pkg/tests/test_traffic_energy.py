import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vsplit.scenario import load_profile
from vsplit.traffic_energy import (
    SolarParams,
    TraceError,
    TraceSet,
    TrafficParams,
    build_traces,
    ingest_traces,
    parse_traces,
    serialize_traces,
    synth_solar,
    synth_traffic,
    write_traces,
)

JULY = SolarParams(panel_area=4.48, efficiency=0.2, peak_irradiance=800.0, daylight_hours=14.0, solar_noon=12.0)
FLAT = tuple((1.0,) * 24 for _ in range(7))
ZERO = tuple((0.0,) * 24 for _ in range(7))


def test_solar_midnight_is_dark():
    assert synth_solar(JULY, 1.0, 1, start_hour=0.0)[0] == 0.0
    assert synth_solar(JULY, 1.0, 1, start_hour=0.0, method="sample")[0] == 0.0


def test_solar_noon_sample_matches_peak_power():
    assert synth_solar(JULY, 1.0, 1, start_hour=12.0, method="sample")[0] == pytest.approx(0.7168, abs=1e-12)


def test_solar_integral_tends_to_peak_power_for_short_steps():
    dt = 1e-4
    assert synth_solar(JULY, dt, 1, start_hour=12.0 - dt / 2)[0] / dt == pytest.approx(0.7168, rel=1e-9)


@pytest.mark.parametrize("edge", [12.0 - 7.0, 12.0 + 7.0])
def test_solar_zero_at_daylight_edges(edge):
    assert synth_solar(JULY, 1.0, 1, start_hour=edge, method="sample")[0] == pytest.approx(0.0, abs=1e-15)


def test_solar_rejects_unknown_method():
    with pytest.raises(ValueError):
        synth_solar(JULY, 1.0, 1, method="trapezoid")


@pytest.mark.parametrize("dt", [0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 24.0])
@pytest.mark.parametrize("solar", [JULY, SolarParams(peak_irradiance=500.0, daylight_hours=10.0), SolarParams(solar_noon=1.0)])
def test_daily_energy_independent_of_step(dt, solar):
    hourly = synth_solar(solar, 1.0, 24).sum()
    coarse = synth_solar(solar, dt, int(round(24 / dt))).sum()
    assert coarse == pytest.approx(hourly, rel=0.01)
    # The closed form integrates a full day to 2 * D / pi peak-hours.
    peak_kw = solar.panel_area * solar.efficiency * solar.peak_irradiance / 1000.0
    assert hourly == pytest.approx(peak_kw * 2 * solar.daylight_hours / np.pi, rel=1e-12)


def test_traffic_rate_conversion():
    assert TrafficParams(FLAT).peak_demand_mbps == pytest.approx(101.25)
    assert synth_traffic(TrafficParams(FLAT), 1)[0] == pytest.approx(101.25)
    assert synth_traffic(TrafficParams(FLAT, heavy_ratio=0.0), 1)[0] == pytest.approx(22.5)
    assert synth_traffic(TrafficParams(ZERO), 1)[0] == 0.0


@pytest.mark.parametrize("profile", ["residential", "office"])
def test_traffic_weekly_periodic(profile):
    p = TrafficParams(load_profile(profile))
    series = synth_traffic(p, 24 * 7 * 2, start_day=2, start_hour=5.0)
    np.testing.assert_array_equal(series[: 24 * 7], series[24 * 7 :])


def test_bundled_profiles_shapes():
    residential = np.array(load_profile("residential"))
    office = np.array(load_profile("office"))
    assert residential.shape == office.shape == (7, 24)
    # Residential peaks in the evening, office at midday on weekdays.
    assert 20 <= int(np.argmax(residential[0])) <= 23
    assert 9 <= int(np.argmax(office[0])) <= 16
    assert office[5:].max() < office[:5].max()


def _traces(n=3, k=21, seed=0):
    rng = np.random.default_rng(seed)
    return TraceSet(rng.uniform(0, 1, (n, k)), rng.uniform(0, 40, (n, k)), rng.uniform(0, 5, k))


def test_ingest_well_formed(tmp_path):
    path = tmp_path / "traces.csv"
    write_traces(_traces(), path)
    traces = ingest_traces(path, 3, 21)
    assert traces.energy.shape == (3, 21)
    assert traces.demand.shape == (3, 21)
    assert traces.mbs_background.shape == (21,)


def test_ingest_negative_cell_names_row_and_column():
    text = serialize_traces(_traces(n=2, k=3)).splitlines()
    cells = text[2].split(",")
    cells[1] = "-0.5"
    text[2] = ",".join(cells)
    with pytest.raises(TraceError, match=r"traces.csv:3: negative value -0.5 in column e_1"):
        parse_traces("\n".join(text), 2, 3, source="traces.csv")


def test_ingest_short_file():
    text = serialize_traces(_traces(k=20))
    with pytest.raises(TraceError, match="20 timesteps"):
        parse_traces(text, 3, 21)


def test_ingest_header_mismatch():
    with pytest.raises(TraceError, match="expected header"):
        parse_traces("t,e_1,d_1\n0,0,0\n", 1, 1)


def test_ingest_missing_file_is_os_error(tmp_path):
    with pytest.raises(OSError):
        ingest_traces(tmp_path / "absent.csv", 1, 1)


def test_trace_arrays_read_only():
    traces = _traces()
    with pytest.raises(ValueError):
        traces.energy[0, 0] = 1.0


@settings(max_examples=50, deadline=None)
@given(
    st.integers(min_value=1, max_value=3).flatmap(
        lambda n: st.integers(min_value=1, max_value=6).flatmap(
            lambda k: st.tuples(
                arrays(float, (n, k), elements=st.floats(0, 1e3, allow_subnormal=False)),
                arrays(float, (n, k), elements=st.floats(0, 1e3, allow_subnormal=False)),
                arrays(float, (k,), elements=st.floats(0, 1e3, allow_subnormal=False)),
            )
        )
    )
)
def test_serialize_round_trip(data):
    traces = TraceSet(*data)
    again = parse_traces(serialize_traces(traces), traces.n_vsc, traces.n_steps)
    assert again == traces
    assert parse_traces(serialize_traces(again), traces.n_vsc, traces.n_steps) == again


def test_build_traces_background_fraction():
    traffic = TrafficParams(FLAT, mbs_background=0.2)
    traces = build_traces([JULY], [traffic], 4, mbs_capacity=35.0)
    np.testing.assert_allclose(traces.mbs_background, 7.0)
