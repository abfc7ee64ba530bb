"""Gate delays, circuit delay, ASAP schedules, critical paths and idle time."""
from __future__ import annotations

import graphlib
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass

from .ir import (
    SINK,
    SOURCE,
    Circuit,
    Instruction,
    Opcode,
    WeightedCircuitGraph,
)
from .profiles import DelayProfile

__all__ = [
    "TimingError",
    "Schedule",
    "delay_of",
    "circuit_delay",
    "segment_delay",
    "serial_delay",
    "longest_path_oracle",
    "asap_schedule",
    "critical_path",
    "idle_time",
    "idle_times",
]


class TimingError(ValueError):
    """No delay could be resolved for an instruction."""


def delay_of(inst: Instruction, profile: DelayProfile) -> int:
    """Duration of ``inst`` in ns.

    Precedence: the instruction's own duration, then a profile override
    (``macro:<label>`` before the opcode name), then the opcode class
    default. Classically conditioned instructions add the feed-forward
    latency on top.
    """
    ff = profile.t_classical_ff if inst.condition else 0
    if inst.duration is not None:
        return inst.duration + ff
    ov = profile.overrides
    if inst.op is Opcode.MACRO and f"macro:{inst.label}" in ov:
        return ov[f"macro:{inst.label}"] + ff
    if inst.op.value in ov:
        return ov[inst.op.value] + ff
    op = inst.op
    if op.is_single_qubit_gate:
        base = profile.t_q1
    elif op is Opcode.CX:
        base = profile.t_q2
    elif op is Opcode.MEASURE:
        base = profile.t_measure
    elif op is Opcode.RESET:
        base = profile.t_reset
    elif op is Opcode.EBIT_H:
        base = profile.t_ebit_h
    elif op is Opcode.EBIT_CX:
        base = profile.t_ebit_cx
    else:
        raise TimingError(f"no delay for {inst.name()} under profile {profile.name!r}")
    return base + ff


def circuit_delay(circuit: Circuit, profile: DelayProfile) -> int:
    """Critical-path delay via a running finish time per bit.

    Relies on the instruction list being topologically ordered, which
    append-only construction guarantees. Memory is one integer per bit.
    """
    t = [0] * circuit.num_bits
    for inst in circuit:
        bits = circuit.bits(inst)
        t_end = max(t[b] for b in bits) + delay_of(inst, profile)
        for b in bits:
            t[b] = t_end
    return max(t, default=0)


def segment_delay(circuit: Circuit, indices: Iterable[int], profile: DelayProfile) -> int:
    """Delay of the sub-circuit formed by the given instructions alone."""
    t: dict[int, int] = {}
    for i in sorted(indices):
        inst = circuit[i]
        bits = circuit.bits(inst)
        t_end = max((t.get(b, 0) for b in bits), default=0) + delay_of(inst, profile)
        for b in bits:
            t[b] = t_end
    return max(t.values(), default=0)


def serial_delay(instructions: Iterable[Instruction], profile: DelayProfile) -> int:
    return sum(delay_of(i, profile) for i in instructions)


def longest_path_oracle(wdag: WeightedCircuitGraph) -> tuple[int, list[int]]:
    """Longest SOURCE-to-SINK path by dynamic programming over the explicit graph.

    The vertex order comes from a fresh topological sort, so this does not
    lean on instruction list order. Raises ``graphlib.CycleError`` on a
    cyclic graph.
    """
    pred = wdag.predecessors()
    order = list(graphlib.TopologicalSorter(pred).static_order())
    dist: dict[Hashable, int] = {SOURCE: 0}
    back: dict[Hashable, Hashable] = {}
    for v in order:
        if v == SOURCE:
            continue
        best = None
        for u in sorted(pred[v], key=_vertex_key):
            if u not in dist:
                continue
            cand = dist[u] + wdag.weights[(u, v)]
            if best is None or cand > best:
                best, back[v] = cand, u
        if best is not None:
            dist[v] = best
    if SINK not in dist:
        return 0, []
    path = []
    v = back[SINK]
    while v != SOURCE:
        path.append(v)
        v = back[v]
    return dist[SINK], path[::-1]


def _vertex_key(v: Hashable) -> tuple[int, int]:
    if v == SOURCE:
        return (0, -1)
    if v == SINK:
        return (2, 0)
    return (1, int(v))


@dataclass(frozen=True)
class Schedule:
    start: tuple[int, ...]
    end: tuple[int, ...]
    makespan: int

    def __len__(self) -> int:
        return len(self.start)


def _asap(circuit: Circuit, profile: DelayProfile):
    t = [0] * circuit.num_bits
    last: list[int | None] = [None] * circuit.num_bits
    starts, ends, preds = [], [], []
    for i, inst in enumerate(circuit):
        bits = circuit.bits(inst)
        s = max(t[b] for b in bits)
        e = s + delay_of(inst, profile)
        starts.append(s)
        ends.append(e)
        preds.append(sorted({last[b] for b in bits if last[b] is not None}))
        for b in bits:
            t[b] = e
            last[b] = i
    return starts, ends, preds, last


def asap_schedule(circuit: Circuit, profile: DelayProfile) -> Schedule:
    starts, ends, _, _ = _asap(circuit, profile)
    return Schedule(tuple(starts), tuple(ends), max(ends, default=0))


def critical_path(circuit: Circuit, profile: DelayProfile) -> list[int]:
    """Instruction indices of a path achieving the circuit delay.

    At each step backwards the smallest-index candidate wins.
    """
    starts, ends, preds, last = _asap(circuit, profile)
    if not ends:
        return []
    t_c = max(ends)
    tails = sorted({i for i in last if i is not None and ends[i] == t_c})
    path = [tails[0]]
    while True:
        v = path[-1]
        cands = [u for u in preds[v] if ends[u] == starts[v]]
        if not cands:
            break
        path.append(cands[0])
    return path[::-1]


def idle_times(
    circuit: Circuit, profile: DelayProfile, qubits: Sequence[int] | None = None
) -> dict[int, int]:
    """Per-qubit idle time inside each qubit's active window."""
    sched = asap_schedule(circuit, profile)
    first: dict[int, int] = {}
    final: dict[int, int] = {}
    busy: dict[int, int] = {}
    for i, inst in enumerate(circuit):
        for q in inst.qubits:
            first.setdefault(q, sched.start[i])
            final[q] = sched.end[i]
            busy[q] = busy.get(q, 0) + sched.end[i] - sched.start[i]
    qs = range(circuit.num_qubits) if qubits is None else qubits
    return {q: (final[q] - first[q] - busy[q]) if q in first else 0 for q in qs}


def idle_time(circuit: Circuit, profile: DelayProfile, qubits: Iterable[int]) -> int:
    """Register idle time: the maximum per-qubit idle over ``qubits``."""
    return max(idle_times(circuit, profile, list(qubits)).values(), default=0)
