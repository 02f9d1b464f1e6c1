"""Base station power draw from GOPS-rated baseband components.

Baseband effort is rated in GOPS and converted to watts with a technology
factor expressed in GOPS per watt. Radio (RF and PA) draw is given directly
in watts, and a fractional overhead (cooling etc.) multiplies the total.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .modes import SplitMode


@dataclass(frozen=True)
class BasebandGops:
    """Baseband workload in GOPS.

    ``cpu``, ``ofdm`` and ``filter`` are load independent. ``fd_linear``,
    ``fd_nonlinear`` and ``fec`` are the values at full load.
    """

    cpu: float
    ofdm: float
    filter: float
    fd_linear: float
    fd_nonlinear: float
    fec: float

    def __post_init__(self) -> None:
        for name in ("cpu", "ofdm", "filter", "fd_linear", "fd_nonlinear", "fec"):
            if getattr(self, name) < 0:
                raise ValueError(f"baseband GOPS '{name}' must be non-negative")


@dataclass(frozen=True)
class RadioPower:
    rf: float
    pa: float
    overhead_fraction: float = 0.0

    def __post_init__(self) -> None:
        if self.rf < 0 or self.pa < 0:
            raise ValueError("rf and pa power must be non-negative")
        if not 0.0 <= self.overhead_fraction <= 1.0:
            raise ValueError("overhead_fraction must lie in [0, 1]")


@dataclass(frozen=True)
class NodePowerParams:
    baseband: BasebandGops
    radio: RadioPower
    gops_per_watt: float = 8.0
    sleep_watts: float = 0.0

    def __post_init__(self) -> None:
        if self.gops_per_watt <= 0:
            raise ValueError("gops_per_watt must be positive")
        if self.sleep_watts < 0:
            raise ValueError("sleep_watts must be non-negative")


def split_load_gops(total: float, ratios: Sequence[float] = (30.0, 10.0, 20.0)) -> tuple[float, float, float]:
    """Split an aggregate load-dependent GOPS figure into (fd_linear, fd_nonlinear, fec)."""
    weight = sum(ratios)
    return tuple(total * r / weight for r in ratios)  # type: ignore[return-value]


def default_vsc_params() -> NodePowerParams:
    return NodePowerParams(
        baseband=BasebandGops(cpu=200.0, ofdm=80.0, filter=160.0, fd_linear=30.0, fd_nonlinear=10.0, fec=20.0),
        radio=RadioPower(rf=2.6, pa=71.4, overhead_fraction=0.0),
        gops_per_watt=8.0,
    )


def default_mbs_params() -> NodePowerParams:
    fd_lin, fd_nl, fec = split_load_gops(215.0)
    # Only the 630 GOPS static aggregate matters; it is carried by ``cpu``.
    return NodePowerParams(
        baseband=BasebandGops(cpu=630.0, ofdm=0.0, filter=0.0, fd_linear=fd_lin, fd_nonlinear=fd_nl, fec=fec),
        radio=RadioPower(rf=9.18, pa=1100.0, overhead_fraction=0.10),
        gops_per_watt=8.0,
    )


def _check_load(load: float) -> None:
    if not 0.0 <= load <= 1.0:
        raise ValueError(f"load fraction {load!r} outside [0, 1]")


def bb1_watts(p: NodePowerParams) -> float:
    """Load-independent baseband power (CPU idle, OFDM, filtering)."""
    bb = p.baseband
    return (bb.cpu + bb.ofdm + bb.filter) / p.gops_per_watt


def bb2_watts(p: NodePowerParams, load: float) -> float:
    """Load-dependent baseband power (frequency-domain processing and FEC).

    The non-linear frequency-domain component grows with ``load**2``; the
    other two terms are linear in load.
    """
    _check_load(load)
    bb = p.baseband
    return (bb.fd_linear * load + bb.fd_nonlinear * load * load + bb.fec * load) / p.gops_per_watt


def vsc_power(p: NodePowerParams, mode: SplitMode, load: float) -> float:
    """Power drawn by a small cell from its own battery, in watts."""
    _check_load(load)
    mode = SplitMode(mode)
    if mode is SplitMode.OFF:
        return p.sleep_watts
    radio = p.radio
    if mode is SplitMode.CRAN:
        baseband = 0.0
    elif mode is SplitMode.UPPER_LOWER:
        baseband = bb1_watts(p)
    else:
        baseband = bb1_watts(p) + bb2_watts(p, load)
    return (baseband + radio.rf + radio.pa) * (1.0 + radio.overhead_fraction)


def mbs_power(
    p: NodePowerParams,
    vsc_params: NodePowerParams,
    modes: Sequence[SplitMode],
    vsc_loads: Sequence[float],
    mbs_load: float,
) -> float:
    """Grid power of the macro cell including baseband work hosted for the small cells.

    A CRAN small cell moves its whole baseband chain into the pool, an
    UpperPHY/LowerPHY one only the load-dependent part. MAC/PHY and switched
    off cells add nothing here; the traffic of switched off cells must
    already be folded into ``mbs_load`` by the caller.
    """
    if len(modes) != len(vsc_loads):
        raise ValueError("modes and vsc_loads must have equal length")
    total = bb1_watts(p) + bb2_watts(p, mbs_load) + p.radio.rf + p.radio.pa
    for mode, load in zip(modes, vsc_loads):
        mode = SplitMode(mode)
        if mode is SplitMode.CRAN:
            total += bb1_watts(vsc_params) + bb2_watts(vsc_params, load)
        elif mode is SplitMode.UPPER_LOWER:
            total += bb2_watts(vsc_params, load)
        else:
            _check_load(load)
    return total * (1.0 + p.radio.overhead_fraction)
