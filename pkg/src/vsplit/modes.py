from __future__ import annotations

import enum
import itertools
from typing import Iterator


class SplitMode(enum.IntEnum):
    """Operative mode of a virtual small cell, ordered by local baseband work."""

    OFF = 0
    CRAN = 1
    UPPER_LOWER = 2
    MAC_PHY = 3

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def parse(cls, value: "str | int | SplitMode") -> "SplitMode":
        if isinstance(value, str):
            key = value.strip().lower().replace("-", "").replace("_", "").replace("/", "")
            try:
                return _ALIASES[key]
            except KeyError:
                raise ValueError(f"unknown split mode {value!r}") from None
        return cls(value)


_LABELS = {
    SplitMode.OFF: "Off",
    SplitMode.CRAN: "CRAN",
    SplitMode.UPPER_LOWER: "UpperLower",
    SplitMode.MAC_PHY: "MACPHY",
}

_ALIASES = {
    "off": SplitMode.OFF,
    "cran": SplitMode.CRAN,
    "upperlower": SplitMode.UPPER_LOWER,
    "upperphylowerphy": SplitMode.UPPER_LOWER,
    "macphy": SplitMode.MAC_PHY,
}


def mode_vectors(n_vsc: int) -> Iterator[tuple[SplitMode, ...]]:
    """All ``4**n_vsc`` mode vectors in lexicographic order (first vSC most significant)."""
    return itertools.product(tuple(SplitMode), repeat=n_vsc)


def encode(modes) -> int:
    index = 0
    for m in modes:
        index = index * 4 + int(m)
    return index


def decode(index: int, n_vsc: int) -> tuple[SplitMode, ...]:
    out = []
    for _ in range(n_vsc):
        index, r = divmod(index, 4)
        out.append(SplitMode(r))
    return tuple(reversed(out))
