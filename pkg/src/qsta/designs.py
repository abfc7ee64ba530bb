"""Regular, semiclassical-regular, iterative and alternating order-finding circuits.

All designs treat each controlled power CU^(2^i) as an opaque block on the
work register plus one control qubit. What goes inside the block comes from
a :class:`CUProvider`.
"""
from __future__ import annotations

import enum
import math
import re
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .ir import QPU, Circuit, CircuitError, Instruction, Opcode, Role
from .profiles import DelayProfile
from .timing import circuit_delay, delay_of, segment_delay

__all__ = [
    "Design",
    "PhaseMode",
    "CUProvider",
    "ShorDesignSpec",
    "DesignInfo",
    "phase_correction",
    "controlled_phase",
    "build_design",
    "build_regular",
    "build_regular_semiclassical",
    "build_iterative",
    "build_alternating",
    "check_alternating_zero_idle",
    "rotation_delay",
    "phase_block_delay",
    "cu_delays",
]


class Design(str, enum.Enum):
    REGULAR = "regular"
    REGULAR_SEMICLASSICAL = "regular_semiclassical"
    ITERATIVE = "iterative"
    ALTERNATING = "alternating"

    @property
    def phase_mode(self) -> PhaseMode:
        return PhaseMode.QUANTUM if self is Design.REGULAR else PhaseMode.CLASSICAL

    def data_width(self, m: int) -> int:
        return {
            Design.REGULAR: m,
            Design.REGULAR_SEMICLASSICAL: m,
            Design.ITERATIVE: 1,
            Design.ALTERNATING: 2,
        }[self]


class PhaseMode(str, enum.Enum):
    QUANTUM = "quantum"
    CLASSICAL = "classical"


def controlled_phase(theta: float, control: int, target: int) -> tuple[Instruction, ...]:
    """Controlled-P(theta) in the {P, CX} basis.

    The control-side P is emitted last so it overlaps the final target P.
    """
    return (
        Instruction(Opcode.CX, (control, target)),
        Instruction(Opcode.P, (target,), theta=-theta / 2),
        Instruction(Opcode.CX, (control, target)),
        Instruction(Opcode.P, (target,), theta=theta / 2),
        Instruction(Opcode.P, (control,), theta=theta / 2),
    )


def phase_correction(
    j: int,
    mode: PhaseMode | str,
    target: int | None = None,
    sources: Sequence[int] | None = None,
) -> list[tuple[Instruction, ...]]:
    """Rotations applied to data bit ``j`` before its final Hadamard.

    Returns one tuple of instructions per rotation: rotation ``k`` (1..j)
    has angle -2*pi/2**(k+1) and is controlled by earlier bit ``j-k``.
    ``sources[l]`` names the qubit (quantum mode) or classical bit
    (classical mode) holding bit ``l``; identity by default. The target
    defaults to qubit ``j`` in quantum mode and qubit 0 in classical mode.
    """
    mode = PhaseMode(mode)
    if j < 0:
        raise ValueError("j must be non-negative")
    if target is None:
        target = j if mode is PhaseMode.QUANTUM else 0
    src = list(range(j)) if sources is None else list(sources)
    out = []
    for k in range(1, j + 1):
        theta = -2 * math.pi / 2 ** (k + 1)
        s = src[j - k]
        if mode is PhaseMode.CLASSICAL:
            out.append((Instruction(Opcode.P, (target,), theta=theta, condition=(s,)),))
        else:
            out.append(controlled_phase(theta, s, target))
    return out


# ---------------------------------------------------------------- CU content


_CU_FILE_RE = re.compile(r"(\d+)")


@dataclass(frozen=True)
class CUProvider:
    """Source of the CU^(2^i) blocks.

    ``abstract``: opaque macros with a delay per index, given as a list or as
    ``f(i, n) -> ns``. ``explicit``: gate-level sub-circuits whose qubit 0 is
    the control and qubits 1.. map onto the work register.
    """

    kind: str
    delays: Sequence[int] | Callable[[int, int], int] | None = None
    subcircuits: tuple[Circuit, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("abstract", "explicit", "imported"):
            raise ValueError(f"unknown CU provider kind {self.kind!r}")
        if self.kind == "abstract":
            if self.delays is None:
                raise ValueError("abstract provider needs delays")
            if not callable(self.delays):
                if any(int(d) != d or d < 0 for d in self.delays):
                    raise ValueError("CU delays must be non-negative integers")
        else:
            for i, sub in enumerate(self.subcircuits):
                _check_embeddable(sub, i)

    @classmethod
    def abstract(cls, delays: Sequence[int] | Callable[[int, int], int] | int) -> CUProvider:
        if isinstance(delays, int):
            const = delays
            return cls("abstract", lambda i, n: const)
        return cls("abstract", delays if callable(delays) else tuple(delays))

    @classmethod
    def explicit(cls, subcircuits: Sequence[Circuit]) -> CUProvider:
        return cls("explicit", subcircuits=tuple(subcircuits))

    @classmethod
    def imported(cls, paths: Sequence[str | Path] | str | Path) -> CUProvider:
        """Load one circuit file per CU; a directory is read in index order."""
        from .textfmt import load_circuit

        if isinstance(paths, (str, Path)) and Path(paths).is_dir():
            files = [p for p in Path(paths).iterdir() if p.is_file() and _CU_FILE_RE.search(p.stem)]
            paths = sorted(files, key=lambda p: int(_CU_FILE_RE.findall(p.stem)[-1]))
        return cls("imported", subcircuits=tuple(load_circuit(p) for p in paths))

    def available(self) -> int | None:
        if self.kind == "abstract":
            return None if callable(self.delays) else len(self.delays)
        return len(self.subcircuits)

    def check(self, m: int, n: int) -> None:
        have = self.available()
        if have is not None and have < m:
            raise CircuitError(f"CU provider supplies {have} blocks, design needs {m}")
        for sub in self.subcircuits[:m]:
            if sub.num_qubits > n + 1:
                raise CircuitError(
                    f"CU sub-circuit {sub.name!r} uses {sub.num_qubits} qubits; "
                    f"work register has {n} plus one control"
                )

    def abstract_delay(self, i: int, n: int) -> int:
        d = self.delays(i, n) if callable(self.delays) else self.delays[i]
        if int(d) != d or d < 0:
            raise ValueError(f"CU delay for index {i} must be a non-negative integer, got {d!r}")
        return int(d)

    def delay(self, i: int, n: int, profile: DelayProfile) -> int:
        if self.kind == "abstract":
            return self.abstract_delay(i, n)
        return circuit_delay(self.subcircuits[i], profile)

    def emit(self, circuit: Circuit, i: int, control: int, work: Sequence[int], n: int) -> list[int]:
        if self.kind == "abstract":
            inst = Instruction(
                Opcode.MACRO, (control, *work), label=f"CU_{i}", duration=self.abstract_delay(i, n)
            )
            return [circuit.append(inst)]
        sub = self.subcircuits[i]
        qmap = [control, *work]
        out = []
        for inst in sub:
            out.append(
                circuit.append(
                    Instruction(
                        inst.op,
                        tuple(qmap[q] for q in inst.qubits),
                        duration=inst.duration,
                        theta=inst.theta,
                        label=inst.label,
                    )
                )
            )
        return out


def _check_embeddable(sub: Circuit, i: int) -> None:
    if sub.num_clbits or any(inst.clbits or inst.condition for inst in sub):
        raise CircuitError(f"CU sub-circuit {i} must not use classical bits")
    for inst in sub:
        if 0 in inst.qubits and not (
            inst.op in (Opcode.CX, Opcode.MACRO) and inst.qubits[0] == 0
        ):
            raise CircuitError(
                f"CU sub-circuit {i}: control qubit used as target of {inst.name()}; "
                "it may only act as the control of controlled operations"
            )


# -------------------------------------------------------------- design specs


@dataclass(frozen=True)
class ShorDesignSpec:
    n: int
    design: Design
    cu: CUProvider
    m: int | None = None
    include_final_reset: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "design", Design(self.design))
        if self.m is None:
            object.__setattr__(self, "m", 2 * self.n)
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be at least 1")


@dataclass
class DesignInfo:
    """Where each task of a generated design sits in the instruction list."""

    design: Design
    m: int
    n: int
    include_final_reset: bool
    data_qubits: tuple[int, ...]
    work_qubits: tuple[int, ...]
    init_h: int = -1
    cu: list[list[int]] = field(default_factory=list)
    cu_control: list[int] = field(default_factory=list)
    phase_blocks: list[list[int]] = field(default_factory=list)
    rotations: list[list[list[int]]] = field(default_factory=list)
    measurements: list[int] = field(default_factory=list)
    # distributed designs only
    k: int = 0
    assignment: tuple[int, ...] = ()
    channels: tuple[Any, ...] = ()
    dist_blocks: list[dict[str, list[int]]] = field(default_factory=list)
    monolithic: Circuit | None = None

    @property
    def phase_mode(self) -> PhaseMode:
        return self.design.phase_mode

    @property
    def distributed(self) -> bool:
        return self.k > 0


CUEmitter = Callable[[Circuit, DesignInfo, int, int], list[int]]


def _local_cu(spec: ShorDesignSpec) -> CUEmitter:
    def emit(c: Circuit, info: DesignInfo, i: int, ctrl: int) -> list[int]:
        return spec.cu.emit(c, i, ctrl, info.work_qubits, spec.n)

    return emit


def _new(spec: ShorDesignSpec, extra_qubits: int = 0, extra_clbits: int = 0):
    m, n = spec.m, spec.n
    nd = spec.design.data_width(m)
    data = tuple(range(nd))
    work = tuple(range(nd, nd + n))
    roles = {q: Role.DATA for q in data} | {q: Role.WORK for q in work}
    c = Circuit(
        nd + n + extra_qubits,
        m + extra_clbits,
        name=f"{spec.design.value}_n{n}_m{m}",
        roles=roles,
    )
    info = DesignInfo(spec.design, m, n, spec.include_final_reset, data, work)
    return c, info


def _append_block(c: Circuit, info: DesignInfo, i: int, q: int, tail: Sequence[Opcode]) -> None:
    """Phase processing of bit i on qubit q: P_i, H, MEASURE, then ``tail``."""
    idx, rots = [], []
    for rot in phase_correction(i, PhaseMode.CLASSICAL, target=q):
        rots.append([c.append(inst) for inst in rot])
        idx += rots[-1]
    idx.append(c.add(Opcode.H, q))
    idx.append(c.add(Opcode.MEASURE, q, clbits=(i,)))
    info.measurements.append(idx[-1])
    for op in tail:
        idx.append(c.add(op, q))
    info.phase_blocks.append(idx)
    info.rotations.append(rots)


def _tail(spec: ShorDesignSpec, i: int, reinit: bool) -> list[Opcode]:
    """RESET (+ re-initialising H) after a measurement; trimmed on the last bit."""
    if i == spec.m - 1 and not spec.include_final_reset:
        return []
    return [Opcode.RESET, Opcode.H] if reinit else [Opcode.RESET]


def _cu(c, info, i, ctrl, emit) -> None:
    info.cu.append(emit(c, info, i, ctrl))
    info.cu_control.append(ctrl)


def _regular(spec, c, info, emit) -> None:
    m, data = spec.m, info.data_qubits
    for q in data:
        h = c.add(Opcode.H, q)
        if info.init_h < 0:
            info.init_h = h
    for i in range(m):
        _cu(c, info, i, data[i], emit)
    blocks = []
    for j in range(m):
        idx, rots = [], []
        for rot in phase_correction(j, PhaseMode.QUANTUM, target=data[j], sources=data):
            rots.append([c.append(inst) for inst in rot])
            idx += rots[-1]
        idx.append(c.add(Opcode.H, data[j]))
        blocks.append(idx)
        info.rotations.append(rots)
    for j in range(m):
        info.measurements.append(c.add(Opcode.MEASURE, data[j], clbits=(j,)))
        blocks[j].append(info.measurements[-1])
    info.phase_blocks = blocks


def _regular_semiclassical(spec, c, info, emit) -> None:
    m, data = spec.m, info.data_qubits
    for q in data:
        h = c.add(Opcode.H, q)
        if info.init_h < 0:
            info.init_h = h
    for i in range(m):
        _cu(c, info, i, data[i], emit)
    for j in range(m):
        _append_block(c, info, j, data[j], _tail(spec, j, reinit=True))


def _iterative(spec, c, info, emit) -> None:
    d = info.data_qubits[0]
    for i in range(spec.m):
        h = c.add(Opcode.H, d)
        if i == 0:
            info.init_h = h
        _cu(c, info, i, d, emit)
        _append_block(c, info, i, d, _tail(spec, i, reinit=False))


def _alternating(spec, c, info, emit) -> None:
    m = spec.m
    d = info.data_qubits
    info.init_h = c.add(Opcode.H, d[0])
    if m > 1:
        c.add(Opcode.H, d[1])
    _cu(c, info, 0, d[0], emit)
    for i in range(1, m):
        _cu(c, info, i, d[i % 2], emit)
        _append_block(c, info, i - 1, d[(i - 1) % 2], _tail(spec, i - 1, reinit=True))
    _append_block(c, info, m - 1, d[(m - 1) % 2], _tail(spec, m - 1, reinit=True))


_SKELETONS = {
    Design.REGULAR: _regular,
    Design.REGULAR_SEMICLASSICAL: _regular_semiclassical,
    Design.ITERATIVE: _iterative,
    Design.ALTERNATING: _alternating,
}


def _build(spec, emit=None, extra_qubits=0, extra_clbits=0, setup=None) -> Circuit:
    spec.cu.check(spec.m, spec.n)
    c, info = _new(spec, extra_qubits, extra_clbits)
    if setup is not None:
        setup(c, info)
    _SKELETONS[spec.design](spec, c, info, emit or _local_cu(spec))
    c.design = info
    return c


def build_design(spec: ShorDesignSpec) -> Circuit:
    return _build(spec)


def _expect(spec: ShorDesignSpec, design: Design) -> None:
    if spec.design is not design:
        raise ValueError(f"spec is for {spec.design.value}, not {design.value}")


def build_regular(spec: ShorDesignSpec) -> Circuit:
    _expect(spec, Design.REGULAR)
    return _build(spec)


def build_regular_semiclassical(spec: ShorDesignSpec) -> Circuit:
    _expect(spec, Design.REGULAR_SEMICLASSICAL)
    return _build(spec)


def build_iterative(spec: ShorDesignSpec) -> Circuit:
    _expect(spec, Design.ITERATIVE)
    return _build(spec)


def build_alternating(spec: ShorDesignSpec) -> Circuit:
    _expect(spec, Design.ALTERNATING)
    return _build(spec)


# ------------------------------------------------------------ timing helpers


def rotation_delay(mode: PhaseMode | str, profile: DelayProfile) -> int:
    """Delay one phase rotation adds on its target qubit."""
    if PhaseMode(mode) is PhaseMode.CLASSICAL:
        (inst,) = phase_correction(1, PhaseMode.CLASSICAL)[0]
        return delay_of(inst, profile)
    scratch = Circuit(2)
    for inst in controlled_phase(-math.pi / 2, 0, 1):
        scratch.append(inst)
    return segment_delay(scratch, range(len(scratch)), profile)


def phase_block_delay(
    i: int,
    mode: PhaseMode | str,
    profile: DelayProfile,
    reset: bool = True,
    reinit: bool = True,
) -> int:
    """t(P_i H M R H): serial phase processing of bit i, with optional R and H."""
    h = delay_of(Instruction(Opcode.H, (0,)), profile)
    t = i * rotation_delay(mode, profile) + h
    t += delay_of(Instruction(Opcode.MEASURE, (0,), clbits=(0,)), profile)
    if reset:
        t += delay_of(Instruction(Opcode.RESET, (0,)), profile)
    if reinit:
        t += h
    return t


def cu_delays(spec: ShorDesignSpec, profile: DelayProfile) -> list[int]:
    return [spec.cu.delay(i, spec.n, profile) for i in range(spec.m)]


@dataclass(frozen=True)
class ZeroIdleCheck:
    holds: bool
    margins: tuple[int, ...]


def check_alternating_zero_idle(
    spec: ShorDesignSpec, profile: DelayProfile, layout=None
) -> ZeroIdleCheck:
    """Does every CU^(2^(i+1)) cover the phase processing of bit i?

    With a distributed ``layout`` the data qubit also has to run the
    ending process of CU^(2^i) and the starting process of CU^(2^(i+2))
    inside that window, so their delays are added to the requirement.
    """
    t_cu = cu_delays(spec, profile)
    mode = spec.design.phase_mode
    extra = 0
    if layout is not None:
        from .distribution import block_delays

        gse = block_delays(profile, layout_t_ebit(layout, profile))
        extra = gse.start + gse.end
    margins = tuple(
        t_cu[i + 1] - phase_block_delay(i, mode, profile) - extra for i in range(spec.m - 1)
    )
    return ZeroIdleCheck(all(x >= 0 for x in margins), margins)


def layout_t_ebit(layout, profile: DelayProfile) -> int:
    return profile.t_ebit if layout.t_ebit is None else layout.t_ebit
