"""Benchmark model presets A, B and C.

All three share threshold 10, start 1 and volatility 1.4, with drift 4,
2.2 and 1.4 respectively; single source of truth for library, CLI and tests.
"""
from __future__ import annotations

from .gbm import GbmModel

CASES: dict[str, GbmModel] = {
    "A": GbmModel(mu=4.0, sigma=1.4, y0=1.0, threshold=10.0),
    "B": GbmModel(mu=2.2, sigma=1.4, y0=1.0, threshold=10.0),
    "C": GbmModel(mu=1.4, sigma=1.4, y0=1.0, threshold=10.0),
}


def preset(name: str) -> GbmModel:
    try:
        return CASES[name.upper()]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose one of {sorted(CASES)}") from None
