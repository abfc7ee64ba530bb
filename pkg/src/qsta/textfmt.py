"""Line-oriented text format for circuits.

Example::

    # two-qubit toy
    qubits 2
    clbits 1
    role 0 DATA
    h 0
    cx 0 1
    measure 0 -> 0
    p(-0.785398) 1 if 0
    macro CU_0 0 1 dur=1200
"""
from __future__ import annotations

import re
from pathlib import Path

from .ir import QPU, Circuit, CircuitError, Instruction, Opcode, Role

__all__ = ["parse_circuit", "serialize_circuit", "load_circuit", "CircuitParseError"]


class CircuitParseError(CircuitError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


_P_RE = re.compile(r"^p\((?P<theta>[^)]*)\)$", re.IGNORECASE)
_INT_RE = re.compile(r"^\d+$")


def _ints(tokens: list[str], lineno: int, what: str) -> tuple[int, ...]:
    out = []
    for t in tokens:
        for part in filter(None, t.split(",")):
            if not _INT_RE.match(part):
                raise CircuitParseError(lineno, f"bad {what} index {part!r}")
            out.append(int(part))
    return tuple(out)


def _parse_instruction(tokens: list[str], lineno: int) -> Instruction:
    head, rest = tokens[0], tokens[1:]
    theta = label = duration = None
    if m := _P_RE.match(head):
        op = Opcode.P
        try:
            theta = float(m.group("theta"))
        except ValueError:
            raise CircuitParseError(lineno, f"bad angle {m.group('theta')!r}") from None
    else:
        try:
            op = Opcode(head.lower())
        except ValueError:
            raise CircuitParseError(lineno, f"unknown opcode {head!r}") from None
        if op is Opcode.P:
            raise CircuitParseError(lineno, "p needs an angle: p(<radians>)")
    if op is Opcode.MACRO:
        if not rest:
            raise CircuitParseError(lineno, "macro needs a label")
        label, rest = rest[0], rest[1:]

    if rest and rest[-1].startswith("dur="):
        raw = rest.pop()[4:]
        if not re.fullmatch(r"-?\d+", raw):
            raise CircuitParseError(lineno, f"bad duration {raw!r}")
        duration = int(raw)
        if duration < 0:
            raise CircuitParseError(lineno, f"negative duration {duration}")

    condition: tuple[int, ...] = ()
    if "if" in rest:
        k = rest.index("if")
        condition = _ints(rest[k + 1 :], lineno, "condition")
        if not condition:
            raise CircuitParseError(lineno, "empty condition list")
        rest = rest[:k]
    clbits: tuple[int, ...] = ()
    if "->" in rest:
        k = rest.index("->")
        clbits = _ints(rest[k + 1 :], lineno, "clbit")
        rest = rest[:k]
    qubits = _ints(rest, lineno, "qubit")
    try:
        return Instruction(
            op, qubits, clbits, condition, duration=duration, theta=theta, label=label
        )
    except CircuitError as e:
        raise CircuitParseError(lineno, str(e)) from None


def parse_circuit(text: str, name: str = "circuit") -> Circuit:
    header: dict[str, int] = {}
    roles: dict[int, Role] = {}
    partition: dict[int, QPU] = {}
    body: list[tuple[int, Instruction]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        key = tokens[0].lower()
        if key in ("qubits", "clbits"):
            if len(tokens) != 2 or not _INT_RE.match(tokens[1]):
                raise CircuitParseError(lineno, f"usage: {key} <n>")
            header[key] = int(tokens[1])
        elif key == "name":
            name = " ".join(tokens[1:])
        elif key == "role":
            if len(tokens) != 3 or not _INT_RE.match(tokens[1]):
                raise CircuitParseError(lineno, "usage: role <q> <DATA|WORK|COMM|ANCILLA>")
            try:
                roles[int(tokens[1])] = Role(tokens[2].upper())
            except ValueError:
                raise CircuitParseError(lineno, f"unknown role {tokens[2]!r}") from None
        elif key == "qpu":
            if len(tokens) != 3 or not _INT_RE.match(tokens[1]) or tokens[2].upper() not in "AB":
                raise CircuitParseError(lineno, "usage: qpu <q> <A|B>")
            partition[int(tokens[1])] = QPU(tokens[2].upper())
        else:
            body.append((lineno, _parse_instruction(tokens, lineno)))

    if "qubits" not in header:
        header["qubits"] = 1 + max((q for _, i in body for q in i.qubits), default=-1)
    if "clbits" not in header:
        header["clbits"] = 1 + max(
            (c for _, i in body for c in i.clbits + i.condition), default=-1
        )
    circuit = Circuit(
        header["qubits"], header["clbits"], name=name, roles=roles, partition=partition
    )
    for lineno, inst in body:
        try:
            circuit.append(inst)
        except CircuitError as e:
            raise CircuitParseError(lineno, str(e)) from None
    return circuit


def _format_instruction(inst: Instruction) -> str:
    if inst.op is Opcode.P:
        parts = [f"p({inst.theta!r})"]
    elif inst.op is Opcode.MACRO:
        parts = ["macro", str(inst.label)]
    else:
        parts = [inst.op.value]
    parts += [str(q) for q in inst.qubits]
    if inst.clbits:
        parts += ["->", ",".join(map(str, inst.clbits))]
    if inst.condition:
        parts += ["if", ",".join(map(str, inst.condition))]
    if inst.duration is not None:
        parts.append(f"dur={inst.duration}")
    return " ".join(parts)


def serialize_circuit(circuit: Circuit) -> str:
    lines = [
        f"name {circuit.name}",
        f"qubits {circuit.num_qubits}",
        f"clbits {circuit.num_clbits}",
    ]
    lines += [f"role {q} {r.value}" for q, r in sorted(circuit.roles.items())]
    lines += [
        f"qpu {q} {p.value}"
        for q, p in sorted(circuit.partition.items())
        if p is not QPU.NONE
    ]
    lines += [_format_instruction(i) for i in circuit]
    return "\n".join(lines) + "\n"


def load_circuit(path: str | Path) -> Circuit:
    path = Path(path)
    return parse_circuit(path.read_text(encoding="utf-8"), name=path.stem)
