"""Shor-specific delay decomposition of generated designs.

The circuit delay of a generated design splits as

    t_C = t_H + sum_CU + delta_P + delta_D

where delta_P (phase processing) and delta_D (distribution, zero for
monolithic designs) each have an unavoidable part and a mitigatable part.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .designs import DesignInfo, phase_block_delay
from .distribution import block_delays
from .ir import Circuit, CircuitError, Opcode, circuit_depth
from .profiles import DelayProfile
from .timing import circuit_delay, critical_path, delay_of, idle_times, segment_delay

__all__ = ["TimingReport", "shor_delay_decomposition"]


@dataclass
class TimingReport:
    t_C: int
    t_H: int
    sum_CU: int
    delta_P: int
    delta_P_M: int
    delta_P_notM: int
    delta_D: int = 0
    delta_D_M: int = 0
    delta_D_notM: int = 0
    delta_P_M_upper: int = 0
    delta_P_M_relaxed: int = 0
    delta_D_M_upper: int = 0
    t_cu: list[int] = field(default_factory=list)
    critical_path: list[int] = field(default_factory=list)
    idle: dict[int, int] = field(default_factory=dict)
    idle_work: int = 0
    depth: int = 0
    qubits: int = 0
    ebits: int = 0

    def check(self) -> list[str]:
        """Identity and bound violations; empty when consistent."""
        bad = []
        if self.t_C != self.t_H + self.sum_CU + self.delta_P + self.delta_D:
            bad.append("t_C != t_H + sum_CU + delta_P + delta_D")
        if self.delta_P != self.delta_P_M + self.delta_P_notM:
            bad.append("delta_P split")
        if self.delta_D != self.delta_D_M + self.delta_D_notM:
            bad.append("delta_D split")
        if not 0 <= self.delta_P_M <= self.delta_P_M_upper:
            bad.append(f"delta_P_M={self.delta_P_M} outside [0, {self.delta_P_M_upper}]")
        if self.delta_P_M > max(self.delta_P_M_relaxed, 0):
            bad.append(f"delta_P_M={self.delta_P_M} above relaxed bound {self.delta_P_M_relaxed}")
        if self.ebits and not 0 <= self.delta_D_M <= self.delta_D_M_upper:
            bad.append(f"delta_D_M={self.delta_D_M} outside [0, {self.delta_D_M_upper}]")
        return bad

    def to_dict(self) -> dict:
        return asdict(self)


def _info(circuit: Circuit) -> DesignInfo:
    info = circuit.design
    if not isinstance(info, DesignInfo) or info.init_h < 0 or len(info.cu) != info.m:
        raise CircuitError(
            f"{circuit.name!r} carries no design annotations; build it with qsta.designs"
        )
    return info


def _phase_split(circuit: Circuit, info: DesignInfo, profile: DelayProfile):
    t_c = circuit_delay(circuit, profile)
    t_h = delay_of(circuit[info.init_h], profile)
    t_cu = [segment_delay(circuit, idx, profile) for idx in info.cu]
    delta_p = t_c - t_h - sum(t_cu)
    # unavoidable part: the last phase-processing block exactly as emitted
    not_m = segment_delay(circuit, info.phase_blocks[-1], profile)
    return t_c, t_h, t_cu, delta_p, not_m


def shor_delay_decomposition(circuit: Circuit, profile: DelayProfile) -> TimingReport:
    """Split the delay of a generated (optionally distributed) design.

    Monolithic: t_H is the first data-qubit Hadamard, and the unavoidable
    phase delay is the final phase-processing block as emitted (so it
    tracks ``include_final_reset``).

    Distributed: delta_P is taken from the monolithic counterpart. The first
    ebit generation runs concurrently with the initial Hadamard, so only the
    part of t_H that outlasts it, max(0, t_H - t_G), is attributed to t_H;
    delta_D is the remainder of t_C.
    """
    info = _info(circuit)
    m = info.m
    mode = info.phase_mode
    t_c, t_h, t_cu, delta_p, not_m = _phase_split(circuit, info, profile)
    upper = sum(phase_block_delay(i, mode, profile) for i in range(m - 1))
    relaxed = (m - 1) * phase_block_delay(m - 1, mode, profile)

    delta_d = d_not_m = d_upper = ebits = 0
    if info.distributed:
        mono = _info(info.monolithic)
        _, _, _, delta_p, not_m = _phase_split(info.monolithic, mono, profile)
        g0 = segment_delay(circuit, info.dist_blocks[0]["G"], profile)
        t_h = max(0, t_h - g0)
        delta_d = t_c - t_h - sum(t_cu) - delta_p
        t_ebits = {ch.t_ebit for ch in info.channels}
        if len(t_ebits) > 1:
            raise CircuitError("per-channel ebit times differ; delta_D bounds need one t_ebit")
        b = block_delays(profile, t_ebits.pop())
        d_not_m, d_upper = b.gse_first, (m - 1) * b.gse_reuse
        ebits = sum(inst.op is Opcode.EBIT_CX for inst in circuit)

    idle = idle_times(circuit, profile)
    return TimingReport(
        t_C=t_c,
        t_H=t_h,
        sum_CU=sum(t_cu),
        delta_P=delta_p,
        delta_P_M=delta_p - not_m,
        delta_P_notM=not_m,
        delta_D=delta_d,
        delta_D_M=delta_d - d_not_m,
        delta_D_notM=d_not_m,
        delta_P_M_upper=upper,
        delta_P_M_relaxed=relaxed,
        delta_D_M_upper=d_upper,
        t_cu=t_cu,
        critical_path=critical_path(circuit, profile),
        idle=idle,
        idle_work=max((idle[q] for q in info.work_qubits), default=0),
        depth=circuit_depth(circuit),
        qubits=circuit.num_qubits,
        ebits=ebits,
    )
