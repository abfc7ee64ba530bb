"""Hardware delay profiles (integer nanoseconds)."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

__all__ = ["DelayProfile", "PRESETS", "get_profile", "load_profile", "unit_profile"]

US = 1_000
MS = 1_000_000


@dataclass(frozen=True)
class DelayProfile:
    name: str
    t_q1: int
    t_q2: int
    t_measure: int
    t_reset: int
    t_ebit: int = 0
    t_ebit_h: int = 0
    t_classical_ff: int = 0
    overrides: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for k in ("t_q1", "t_q2", "t_measure", "t_reset", "t_ebit", "t_ebit_h", "t_classical_ff"):
            v = getattr(self, k)
            if int(v) != v or v < 0:
                raise ValueError(f"{k} must be a non-negative integer (ns), got {v!r}")
            object.__setattr__(self, k, int(v))
        if self.t_ebit_h > self.t_ebit:
            raise ValueError("t_ebit_h cannot exceed t_ebit")
        for k, v in self.overrides.items():
            if int(v) != v or v < 0:
                raise ValueError(f"override {k} must be a non-negative integer, got {v!r}")

    @property
    def t_ebit_cx(self) -> int:
        return self.t_ebit - self.t_ebit_h

    def with_ebit(self, t_ebit: int) -> DelayProfile:
        return replace(self, t_ebit=int(t_ebit), t_ebit_h=0)

    def scaled(self, c: int) -> DelayProfile:
        return replace(
            self,
            t_q1=self.t_q1 * c,
            t_q2=self.t_q2 * c,
            t_measure=self.t_measure * c,
            t_reset=self.t_reset * c,
            t_ebit=self.t_ebit * c,
            t_ebit_h=self.t_ebit_h * c,
            t_classical_ff=self.t_classical_ff * c,
            overrides={k: v * c for k, v in self.overrides.items()},
        )

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> DelayProfile:
        known = {
            "name", "t_q1_ns", "t_q2_ns", "t_measure_ns", "t_reset_ns",
            "t_ebit_ns", "t_ebit_h_ns", "t_classical_ff_ns", "overrides",
        }
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown profile keys: {sorted(unknown)}")
        return cls(
            name=d.get("name", "custom"),
            t_q1=d["t_q1_ns"],
            t_q2=d["t_q2_ns"],
            t_measure=d["t_measure_ns"],
            t_reset=d["t_reset_ns"],
            t_ebit=d.get("t_ebit_ns", 0),
            t_ebit_h=d.get("t_ebit_h_ns", 0),
            t_classical_ff=d.get("t_classical_ff_ns", 0),
            overrides={k.lower(): v for k, v in d.get("overrides", {}).items()},
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "t_q1_ns": self.t_q1,
            "t_q2_ns": self.t_q2,
            "t_measure_ns": self.t_measure,
            "t_reset_ns": self.t_reset,
            "t_ebit_ns": self.t_ebit,
            "t_ebit_h_ns": self.t_ebit_h,
            "t_classical_ff_ns": self.t_classical_ff,
            "overrides": dict(self.overrides),
        }


def _p(name, q1, q2, meas, reset) -> DelayProfile:
    return DelayProfile(name, q1, q2, meas, reset)


PRESETS: dict[str, DelayProfile] = {
    p.name: p
    for p in (
        # superconducting (IBM)
        _p("eagle_sherbrooke", 57, 533, 1216, 1276),
        _p("heron_r1_torino", 32, 68, 1560, 1708),
        _p("heron_r2_fez", 24, 84, 1560, 1584),
        _p("heron_r2_marrakesh", 36, 68, 2100, 2236),
        # ion trap (IonQ)
        _p("aria_1", 135 * US, 600 * US, 300 * US, 20 * US),
        _p("aria_2", 135 * US, 600 * US, 50 * US, 15 * US),
        _p("forte", 130 * US, 970 * US, 150 * US, 50 * US),
        # reset = measurement followed by one single-qubit gate
        _p("neutral_atom", 2 * US, 400, 10 * MS, 10 * MS + 2 * US),
    )
}


def unit_profile(t_ebit: int = 1, name: str = "unit") -> DelayProfile:
    """Every operation takes 1 ns; ebit generation takes ``t_ebit``."""
    return DelayProfile(name, 1, 1, 1, 1, t_ebit=t_ebit)


def load_profile(path: str | Path) -> DelayProfile:
    return DelayProfile.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def get_profile(name_or_path: str | DelayProfile) -> DelayProfile:
    """Resolve a preset name, ``unit``, or a JSON profile file."""
    if isinstance(name_or_path, DelayProfile):
        return name_or_path
    if name_or_path in PRESETS:
        return PRESETS[name_or_path]
    if name_or_path == "unit":
        return unit_profile()
    path = Path(name_or_path)
    if path.is_file():
        return load_profile(path)
    raise KeyError(f"unknown profile {name_or_path!r}; presets: {sorted(PRESETS)}")
