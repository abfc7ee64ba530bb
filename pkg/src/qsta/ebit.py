"""Expected ebit-generation time for a heralded midpoint link.

Each attempt entangles a photon with a memory qubit at both ends, sends the
photons to a midpoint Bell measurement and waits for the herald. Attempts
repeat until one succeeds, so the number of attempts is geometric.
All durations are microseconds, distances kilometres.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any

__all__ = [
    "EbitLinkParams",
    "EbitModelError",
    "NEUTRAL_ATOM",
    "FIXED_EBIT_TIMES_NS",
    "local_success_probability",
    "end_to_end_success_probability",
    "attempt_times",
    "expected_ebit_time",
    "expected_ebit_time_ns",
    "load_link_params",
]


class EbitModelError(ValueError):
    pass


@dataclass(frozen=True)
class EbitLinkParams:
    p_ht: float  # photon emission and capture
    nu_h: float
    nu_t: float
    nu_o: float  # midpoint detection
    L0_km: float
    d_km: float
    c_f: float  # fibre light speed, m/s
    tau_p: float
    tau_h: float
    tau_t: float
    tau_o: float
    tau_c: float

    def __post_init__(self) -> None:
        for name in ("p_ht", "nu_h", "nu_t", "nu_o"):
            v = getattr(self, name)
            # p_ht = 0 is allowed; it simply makes the link useless
            lo_ok = v >= 0 if name == "p_ht" else v > 0
            if not (lo_ok and v <= 1):
                raise EbitModelError(f"{name}={v} outside (0, 1]")
        for name in ("tau_p", "tau_h", "tau_t", "tau_o", "tau_c"):
            if getattr(self, name) < 0:
                raise EbitModelError(f"{name} must be non-negative")
        if self.d_km < 0:
            raise EbitModelError("d_km must be non-negative")
        if self.L0_km <= 0 or self.c_f <= 0:
            raise EbitModelError("L0_km and c_f must be positive")

    def at(self, d_km: float) -> EbitLinkParams:
        return replace(self, d_km=d_km)

    @property
    def fibre_delay_us(self) -> float:
        return self.d_km * 1e3 / self.c_f * 1e6

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> EbitLinkParams:
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise EbitModelError(f"unknown link parameters: {sorted(unknown)}")
        missing = names - set(d) - {"d_km"}
        if missing:
            raise EbitModelError(f"missing link parameters: {sorted(missing)}")
        return cls(**{"d_km": 0.0, **d})

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


NEUTRAL_ATOM = EbitLinkParams(
    p_ht=0.53,
    nu_h=0.8,
    nu_t=0.8,
    nu_o=0.39,
    L0_km=22.0,
    d_km=0.0,
    c_f=2e8,
    tau_p=5.9,
    tau_h=20.0,
    tau_t=10.0,
    tau_o=10.0,
    tau_c=100.0,
)

# Reported generation times for platforms without a parameterised link model.
FIXED_EBIT_TIMES_NS: dict[str, int] = {
    "superconducting_fast": 10_000,
    "superconducting_slow": 1_000_000,
    "ion_trap": 5_500_000,
    "ion_trap_slow_2s": 2_000_000_000,
    "ion_trap_slow_17s": 17_000_000_000,
}


def local_success_probability(params: EbitLinkParams) -> float:
    return params.p_ht * params.nu_h * params.nu_t


def end_to_end_success_probability(params: EbitLinkParams) -> float:
    p = local_success_probability(params)
    return 0.5 * params.nu_o * p * p * math.exp(-params.d_km / params.L0_km)


def attempt_times(params: EbitLinkParams) -> tuple[float, float]:
    """(T_s, T_f): duration of a successful and of a failed attempt."""
    photon = params.tau_t + params.fibre_delay_us + params.tau_o
    t_s = params.tau_p + max(params.tau_h, photon)
    t_f = params.tau_p + max(params.tau_h, photon, params.tau_c)
    return t_s, t_f


def expected_ebit_time(params: EbitLinkParams) -> float:
    """Mean time to the first successful attempt, in microseconds."""
    p_e = end_to_end_success_probability(params)
    if p_e <= 0:
        raise EbitModelError("link never succeeds (p_e = 0); expected time is undefined")
    t_s, t_f = attempt_times(params)
    return (p_e * t_s + (1 - p_e) * t_f) / p_e


def expected_ebit_time_ns(params: EbitLinkParams) -> int:
    return round(expected_ebit_time(params) * 1e3)


def load_link_params(source: str | Path | dict) -> EbitLinkParams:
    """From a dict, a JSON file, or the preset name ``neutral_atom``."""
    if isinstance(source, dict):
        return EbitLinkParams.from_dict(source)
    if str(source) == "neutral_atom":
        return NEUTRAL_ATOM
    return EbitLinkParams.from_dict(json.loads(Path(source).read_text(encoding="utf-8")))
