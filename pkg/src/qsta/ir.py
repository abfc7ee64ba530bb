"""Gate-level circuit representation and its dependency-graph views.

A :class:`Circuit` is an append-only list of :class:`Instruction` objects.
Because every instruction is appended after the instructions it depends on,
list order is always a valid topological order of the dependency graph.
"""
from __future__ import annotations

import enum
from collections.abc import Hashable, Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any

__all__ = [
    "Opcode",
    "Role",
    "QPU",
    "Instruction",
    "Circuit",
    "CircuitError",
    "CircuitGraph",
    "WeightedCircuitGraph",
    "SOURCE",
    "SINK",
    "new_circuit",
    "build_circuit_graph",
    "build_weighted_graph",
    "circuit_depth",
]


class CircuitError(ValueError):
    """Raised for malformed instructions or circuits."""


class Opcode(str, enum.Enum):
    H = "h"
    X = "x"
    Y = "y"
    Z = "z"
    I = "i"  # noqa: E741
    P = "p"
    CX = "cx"
    MEASURE = "measure"
    RESET = "reset"
    EBIT_H = "ebit_h"
    EBIT_CX = "ebit_cx"
    MACRO = "macro"

    @property
    def is_single_qubit_gate(self) -> bool:
        return self in _SINGLE_QUBIT_GATES


_SINGLE_QUBIT_GATES = frozenset({Opcode.H, Opcode.X, Opcode.Y, Opcode.Z, Opcode.I, Opcode.P})
_ONE_QUBIT = _SINGLE_QUBIT_GATES | {Opcode.RESET, Opcode.EBIT_H, Opcode.MEASURE}
_TWO_QUBIT = frozenset({Opcode.CX, Opcode.EBIT_CX})


class Role(str, enum.Enum):
    DATA = "DATA"
    WORK = "WORK"
    COMM = "COMM"
    ANCILLA = "ANCILLA"


class QPU(str, enum.Enum):
    A = "A"
    B = "B"
    NONE = "NONE"


@dataclass(frozen=True)
class Instruction:
    """One gate, measurement, reset, ebit half or opaque macro block.

    ``condition`` holds classical bits whose values gate execution; the
    instruction then depends on the last writer of each of those bits.
    """

    op: Opcode
    qubits: tuple[int, ...]
    clbits: tuple[int, ...] = ()
    condition: tuple[int, ...] = ()
    duration: int | None = None
    theta: float | None = None
    label: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "op", Opcode(self.op))
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "clbits", tuple(self.clbits))
        object.__setattr__(self, "condition", tuple(self.condition))
        self._validate()

    def _validate(self) -> None:
        op, nq = self.op, len(self.qubits)
        if len(set(self.qubits)) != nq:
            raise CircuitError(f"{op.value}: repeated qubit operand in {self.qubits}")
        if op in _TWO_QUBIT and nq != 2:
            raise CircuitError(f"{op.value} takes exactly 2 qubits, got {nq}")
        if op in _ONE_QUBIT and nq != 1:
            raise CircuitError(f"{op.value} takes exactly 1 qubit, got {nq}")
        if op is Opcode.MACRO:
            if nq < 1:
                raise CircuitError("macro needs at least one qubit")
            if not self.label:
                raise CircuitError("macro needs a label")
        if op is Opcode.MEASURE:
            if len(self.clbits) != 1:
                raise CircuitError("measure writes exactly one classical bit")
        elif self.clbits:
            raise CircuitError(f"{op.value} does not write classical bits")
        if op is Opcode.P and self.theta is None:
            raise CircuitError("p needs an angle")
        if self.duration is not None and self.duration < 0:
            raise CircuitError(f"negative duration {self.duration}")
        if len(set(self.condition)) != len(self.condition):
            raise CircuitError(f"repeated condition bit in {self.condition}")

    @property
    def conditioned(self) -> bool:
        return bool(self.condition)

    def name(self) -> str:
        if self.op is Opcode.MACRO:
            return str(self.label)
        return self.op.value


SOURCE: Hashable = "Sc"
SINK: Hashable = "Sk"


@dataclass
class Circuit:
    """Append-ordered instruction list over qubits and classical bits.

    Builders attach design metadata through ``design``; it is ignored by
    the generic timing functions.
    """

    num_qubits: int
    num_clbits: int = 0
    name: str = "circuit"
    roles: dict[int, Role] = field(default_factory=dict)
    partition: dict[int, QPU] = field(default_factory=dict)
    instructions: list[Instruction] = field(default_factory=list)
    design: Any = None

    def __post_init__(self) -> None:
        if self.num_qubits < 0 or self.num_clbits < 0:
            raise CircuitError("register sizes must be non-negative")
        self.roles = {int(q): Role(r) for q, r in self.roles.items()}
        self.partition = {int(q): QPU(p) for q, p in self.partition.items()}
        for q in list(self.roles) + list(self.partition):
            if not 0 <= q < self.num_qubits:
                raise CircuitError(f"qubit {q} out of range for {self.num_qubits} qubits")
        instructions, self.instructions = self.instructions, []
        for inst in instructions:
            self.append(inst)

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)

    def __getitem__(self, idx: int) -> Instruction:
        return self.instructions[idx]

    def qpu_of(self, qubit: int) -> QPU:
        return self.partition.get(qubit, QPU.NONE)

    def append(self, inst: Instruction) -> int:
        """Append ``inst`` and return its index."""
        for q in inst.qubits:
            if not 0 <= q < self.num_qubits:
                raise CircuitError(f"qubit {q} out of range for {self.num_qubits} qubits")
        for c in inst.clbits + inst.condition:
            if not 0 <= c < self.num_clbits:
                raise CircuitError(f"clbit {c} out of range for {self.num_clbits} clbits")
        if len(inst.qubits) > 1 and inst.op is not Opcode.EBIT_CX:
            qpus = {self.qpu_of(q) for q in inst.qubits} - {QPU.NONE}
            if len(qpus) > 1:
                raise CircuitError(
                    f"{inst.name()} on {inst.qubits} spans QPUs; only ebit_cx may cross"
                )
        self.instructions.append(inst)
        return len(self.instructions) - 1

    def add(self, op: Opcode | str, *qubits: int, **kw) -> int:
        """Shorthand: ``c.add("cx", 0, 1)``; keyword args go to Instruction."""
        return self.append(Instruction(Opcode(op), qubits, **kw))

    def qubits_with_role(self, role: Role) -> list[int]:
        return sorted(q for q, r in self.roles.items() if r is role)

    def bits(self, inst: Instruction) -> tuple[int, ...]:
        """Flat bit keys touched by ``inst``: qubits, then offset clbits."""
        off = self.num_qubits
        return inst.qubits + tuple(off + c for c in inst.clbits + inst.condition)

    @property
    def num_bits(self) -> int:
        return self.num_qubits + self.num_clbits


def new_circuit(
    num_qubits: int,
    num_clbits: int = 0,
    roles: Mapping[int, Role | str] | None = None,
    partition: Mapping[int, QPU | str] | None = None,
    name: str = "circuit",
) -> Circuit:
    return Circuit(
        num_qubits,
        num_clbits,
        name=name,
        roles=dict(roles or {}),
        partition=dict(partition or {}),
    )


@dataclass
class CircuitGraph:
    """Dependency DAG: one vertex per instruction plus SOURCE and SINK."""

    num_vertices: int
    succ: dict[Hashable, set[Hashable]]

    @property
    def vertices(self) -> list[Hashable]:
        return [SOURCE, *range(self.num_vertices), SINK]

    @property
    def edges(self) -> set[tuple[Hashable, Hashable]]:
        return {(u, v) for u, vs in self.succ.items() for v in vs}

    def predecessors(self) -> dict[Hashable, set[Hashable]]:
        pred: dict[Hashable, set[Hashable]] = {v: set() for v in self.vertices}
        for u, vs in self.succ.items():
            for v in vs:
                pred[v].add(u)
        return pred


@dataclass
class WeightedCircuitGraph(CircuitGraph):
    """Circuit graph whose edge (u, v) carries the delay of vertex v."""

    weights: dict[tuple[Hashable, Hashable], int] = field(default_factory=dict)


def build_circuit_graph(circuit: Circuit) -> CircuitGraph:
    succ: dict[Hashable, set[Hashable]] = {v: set() for v in (SOURCE, SINK)}
    succ.update({i: set() for i in range(len(circuit))})
    last: dict[int, Hashable] = {}
    for i, inst in enumerate(circuit):
        for b in circuit.bits(inst):
            succ[last.get(b, SOURCE)].add(i)
            last[b] = i
    for u in last.values():
        succ[u].add(SINK)
    return CircuitGraph(len(circuit), succ)


def build_weighted_graph(circuit: Circuit, profile) -> WeightedCircuitGraph:
    from .timing import delay_of

    g = build_circuit_graph(circuit)
    weights = {}
    for u, vs in g.succ.items():
        for v in vs:
            weights[(u, v)] = 0 if v == SINK else delay_of(circuit[v], profile)
    return WeightedCircuitGraph(g.num_vertices, g.succ, weights)


def circuit_depth(circuit: Circuit) -> int:
    """Instruction count of the longest SOURCE-to-SINK path."""
    level = [0] * circuit.num_bits
    for inst in circuit:
        bits = circuit.bits(inst)
        d = max(level[b] for b in bits) + 1
        for b in bits:
            level[b] = d
    return max(level, default=0)


def iter_qubits(instructions: Iterable[Instruction]) -> set[int]:
    return {q for inst in instructions for q in inst.qubits}
