from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from vsplit.modes import SplitMode
from vsplit.power_model import (
    BasebandGops,
    NodePowerParams,
    RadioPower,
    bb1_watts,
    bb2_watts,
    default_mbs_params,
    default_vsc_params,
    mbs_power,
    split_load_gops,
    vsc_power,
)

VSC = default_vsc_params()
MBS = default_mbs_params()
loads = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
modes = st.sampled_from(list(SplitMode))


def test_bb1_point_values():
    assert bb1_watts(VSC) == pytest.approx(55.0, abs=1e-9)
    assert bb1_watts(MBS) == pytest.approx(78.75, abs=1e-9)


def test_bb1_zero_gops():
    zero = NodePowerParams(BasebandGops(0, 0, 0, 0, 0, 0), RadioPower(0, 0))
    assert bb1_watts(zero) == 0.0


@pytest.mark.parametrize("load, expected", [(0.0, 0.0), (1.0, 7.5), (0.5, 3.4375)])
def test_bb2_point_values(load, expected):
    assert bb2_watts(VSC, load) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("load", [-0.1, 1.1])
def test_bb2_rejects_out_of_range_load(load):
    with pytest.raises(ValueError):
        bb2_watts(VSC, load)


@pytest.mark.parametrize(
    "mode, load, expected",
    [
        (SplitMode.OFF, 0.7, 0.0),
        (SplitMode.CRAN, 0.5, 74.0),
        (SplitMode.MAC_PHY, 1.0, 136.5),
        (SplitMode.UPPER_LOWER, 0.0, 129.0),
    ],
)
def test_vsc_power_point_values(mode, load, expected):
    assert vsc_power(VSC, mode, load) == pytest.approx(expected, abs=1e-9)


def test_mbs_power_point_values():
    assert mbs_power(MBS, VSC, [], [], 1.0) == pytest.approx(1336.2855, abs=1e-9)
    assert mbs_power(MBS, VSC, [], [], 0.0) == pytest.approx(1306.723, abs=1e-9)
    assert mbs_power(MBS, VSC, [SplitMode.UPPER_LOWER], [1.0], 0.0) == pytest.approx(1314.973, abs=1e-9)


def test_mbs_load_split_follows_vsc_ratios():
    lin, nl, fec = split_load_gops(215.0)
    assert (lin, nl, fec) == pytest.approx((107.5, 215.0 / 6, 215.0 / 3))
    assert MBS.baseband.fd_linear + MBS.baseband.fd_nonlinear + MBS.baseband.fec == pytest.approx(215.0)


def test_negative_gops_rejected():
    with pytest.raises(ValueError):
        BasebandGops(-1, 0, 0, 0, 0, 0)


@given(loads)
def test_vsc_power_monotone_in_mode(load):
    watts = [vsc_power(VSC, m, load) for m in SplitMode]
    assert watts == sorted(watts)


@given(modes, loads, loads)
def test_vsc_power_monotone_in_load(mode, a, b):
    lo, hi = sorted((a, b))
    assert vsc_power(VSC, mode, lo) <= vsc_power(VSC, mode, hi)


@given(loads)
def test_cran_minus_off_is_radio_power(load):
    radio = VSC.radio
    diff = vsc_power(VSC, SplitMode.CRAN, load) - vsc_power(VSC, SplitMode.OFF, load)
    assert diff == (radio.rf + radio.pa) * (1 + radio.overhead_fraction)


@given(st.lists(st.tuples(modes, loads), min_size=1, max_size=4), loads, loads)
def test_mbs_power_monotone_in_loads(entries, a, b):
    ms = [m for m, _ in entries]
    ls = [x for _, x in entries]
    lo, hi = sorted((a, b))
    assert mbs_power(MBS, VSC, ms, ls, lo) <= mbs_power(MBS, VSC, ms, ls, hi)
    bumped = [min(1.0, x + 0.1) for x in ls]
    assert mbs_power(MBS, VSC, ms, ls, lo) <= mbs_power(MBS, VSC, ms, bumped, lo) + 1e-12


@given(st.lists(loads, min_size=1, max_size=4), loads)
def test_all_macphy_adds_nothing_at_macro(vloads, mbs_load):
    macphy = [SplitMode.MAC_PHY] * len(vloads)
    assert mbs_power(MBS, VSC, macphy, vloads, mbs_load) == mbs_power(MBS, VSC, [], [], mbs_load)


@given(modes, loads)
def test_doubling_factor_halves_baseband_terms(mode, load):
    doubled = replace(VSC, gops_per_watt=2 * VSC.gops_per_watt)
    assert bb1_watts(doubled) == bb1_watts(VSC) / 2
    assert bb2_watts(doubled, load) == pytest.approx(bb2_watts(VSC, load) / 2, rel=1e-15, abs=1e-15)
    radio = VSC.radio.rf + VSC.radio.pa
    if mode is not SplitMode.OFF:
        base = vsc_power(VSC, mode, load) - radio
        assert vsc_power(doubled, mode, load) - radio == pytest.approx(base / 2, abs=1e-12)
