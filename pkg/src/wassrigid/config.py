"""Tolerances shared by every module, overridable from the command line."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    distance: float = 1e-9
    mass: float = 1e-10
    lp: float = 1e-9

    def __post_init__(self):
        for name in ("distance", "mass", "lp"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name!r} must be positive")

    def with_overrides(self, **kw) -> "Tolerances":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


DEFAULT = Tolerances()
