"""Physical constants for the simulator.

Natural units (c = hbar = m = 1, e = -1) are the default; everything is
configurable. The electron charge is negative.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    c: float = 1.0
    hbar: float = 1.0
    mass: float = 1.0
    charge: float = -1.0

    def __post_init__(self):
        import math

        for name in ("c", "hbar", "mass", "charge"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        for name in ("c", "hbar", "mass"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def rest_energy(self) -> float:
        return self.mass * self.c**2

    def energy(self, p: float) -> float:
        """Positive on-shell energy for momentum p along one axis."""
        import math

        return math.sqrt((p * self.c) ** 2 + self.rest_energy**2)


NATURAL = PhysicalConstants()
