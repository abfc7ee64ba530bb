"""Two-QPU distribution of the order-finding designs over k ebit channels.

The data register lives on QPU A, the work register on QPU B. Each CU^(2^i)
runs on QPU B controlled by the B half of an ebit, with the telegate
wrapped around it:

    G  reset both channel qubits (only when the channel is reused),
       ebit_h(c_A), ebit_cx(c_A, c_B)
    S  cx(d, c_A), measure c_A -> s_i, x(c_B) if s_i
    E  h(c_B), measure c_B -> e_i, z(d) if e_i
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .designs import DesignInfo, ShorDesignSpec, _build, cu_delays, layout_t_ebit
from .ir import QPU, Circuit, CircuitError, Instruction, Opcode, Role
from .profiles import DelayProfile
from .timing import delay_of

__all__ = [
    "EbitChannel",
    "DistributedLayout",
    "BlockDelays",
    "assign_channels",
    "distribute",
    "block_delays",
    "check_distributed_zero_idle",
    "distribution_delay_bounds",
]


@dataclass(frozen=True)
class EbitChannel:
    c_on_A: int
    c_on_B: int
    t_ebit: int | None = None

    def __post_init__(self) -> None:
        if self.c_on_A == self.c_on_B:
            raise CircuitError("channel needs two distinct qubits")
        if self.t_ebit is not None and self.t_ebit < 0:
            raise ValueError("t_ebit must be non-negative")


@dataclass(frozen=True)
class DistributedLayout:
    """k ebit channels. Channel qubits are placed after the compute qubits
    unless given explicitly. ``t_ebit`` of None defers to the profile."""

    k: int
    t_ebit: int | None = None
    channels: tuple[EbitChannel, ...] | None = None

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("need at least one ebit channel")
        if self.t_ebit is not None:
            if int(self.t_ebit) != self.t_ebit or self.t_ebit < 0:
                raise ValueError("t_ebit must be a non-negative integer (ns)")
            object.__setattr__(self, "t_ebit", int(self.t_ebit))
        if self.channels is not None and len(self.channels) != self.k:
            raise ValueError(f"layout has {len(self.channels)} channels, k={self.k}")

    def resolve(self, num_compute: int) -> tuple[EbitChannel, ...]:
        if self.channels is None:
            base = num_compute
            return tuple(
                EbitChannel(base + 2 * j, base + 2 * j + 1, self.t_ebit) for j in range(self.k)
            )
        qs = [q for ch in self.channels for q in (ch.c_on_A, ch.c_on_B)]
        if len(set(qs)) != len(qs):
            raise CircuitError("communication qubits must be pairwise disjoint")
        if any(q < num_compute for q in qs):
            raise CircuitError("communication qubits clash with compute qubits")
        return tuple(ch if ch.t_ebit is not None else replace(ch, t_ebit=self.t_ebit) for ch in self.channels)


def assign_channels(m: int, k: int) -> list[int]:
    if m < 1 or k < 1:
        raise ValueError("m and k must be at least 1")
    return [i % k for i in range(m)]


def distribute(
    spec: ShorDesignSpec, layout: DistributedLayout, profile: DelayProfile | None = None
) -> Circuit:
    """Build ``spec``'s design split across two QPUs.

    ``profile`` is only consulted for the ebit time when neither the layout
    nor its channels fix one; otherwise ebit halves take the profile's
    delays at analysis time.
    """
    m = spec.m
    nd = spec.design.data_width(m)
    num_compute = nd + spec.n
    channels = layout.resolve(num_compute)
    if layout.t_ebit is None and profile is not None:
        channels = tuple(
            ch if ch.t_ebit is not None else replace(ch, t_ebit=profile.t_ebit) for ch in channels
        )
    n_qubits = 1 + max(q for ch in channels for q in (ch.c_on_A, ch.c_on_B))
    assignment = assign_channels(m, layout.k)
    used = [False] * layout.k

    def setup(c: Circuit, info: DesignInfo) -> None:
        for q in info.data_qubits:
            c.partition[q] = QPU.A
        for q in info.work_qubits:
            c.partition[q] = QPU.B
        for ch in channels:
            c.roles[ch.c_on_A] = c.roles[ch.c_on_B] = Role.COMM
            c.partition[ch.c_on_A], c.partition[ch.c_on_B] = QPU.A, QPU.B
        info.k = layout.k
        info.assignment = tuple(assignment)
        info.channels = channels

    def emit(c: Circuit, info: DesignInfo, i: int, ctrl: int) -> list[int]:
        j = assignment[i]
        ch = channels[j]
        a, b = ch.c_on_A, ch.c_on_B
        s_bit, e_bit = m + 2 * i, m + 2 * i + 1
        dur_h = None if ch.t_ebit is None else 0
        g = []
        if used[j]:
            g += [c.add(Opcode.RESET, a), c.add(Opcode.RESET, b)]
        used[j] = True
        g.append(c.add(Opcode.EBIT_H, a, duration=dur_h))
        g.append(c.add(Opcode.EBIT_CX, a, b, duration=ch.t_ebit))
        s = [
            c.add(Opcode.CX, ctrl, a),
            c.add(Opcode.MEASURE, a, clbits=(s_bit,)),
            c.add(Opcode.X, b, condition=(s_bit,)),
        ]
        cu = spec.cu.emit(c, i, b, info.work_qubits, spec.n)
        e = [
            c.add(Opcode.H, b),
            c.add(Opcode.MEASURE, b, clbits=(e_bit,)),
            c.add(Opcode.Z, ctrl, condition=(e_bit,)),
        ]
        info.dist_blocks.append({"G": g, "S": s, "E": e})
        return cu

    c = _build(
        spec,
        emit=emit,
        extra_qubits=n_qubits - num_compute,
        extra_clbits=2 * m,
        setup=setup,
    )
    c.name = f"{c.name}_k{layout.k}"
    c.design.monolithic = _build(spec)
    return c


@dataclass(frozen=True)
class BlockDelays:
    """Serial delays of the telegate blocks under one profile."""

    gen_first: int  # G on a fresh channel
    gen_reuse: int  # G including the channel resets
    start: int
    end: int

    @property
    def gse_first(self) -> int:
        return self.gen_first + self.start + self.end

    @property
    def gse_reuse(self) -> int:
        return self.gen_reuse + self.start + self.end


def block_delays(profile: DelayProfile, t_ebit: int | None = None) -> BlockDelays:
    if t_ebit is None:
        ebit = delay_of(Instruction(Opcode.EBIT_H, (0,)), profile) + delay_of(
            Instruction(Opcode.EBIT_CX, (0, 1)), profile
        )
    else:
        ebit = t_ebit
    reset = delay_of(Instruction(Opcode.RESET, (0,)), profile)
    start = (
        delay_of(Instruction(Opcode.CX, (0, 1)), profile)
        + delay_of(Instruction(Opcode.MEASURE, (0,), clbits=(0,)), profile)
        + delay_of(Instruction(Opcode.X, (1,), condition=(0,)), profile)
    )
    end = (
        delay_of(Instruction(Opcode.H, (1,)), profile)
        + delay_of(Instruction(Opcode.MEASURE, (1,), clbits=(1,)), profile)
        + delay_of(Instruction(Opcode.Z, (0,), condition=(1,)), profile)
    )
    return BlockDelays(ebit, reset + ebit, start, end)


@dataclass(frozen=True)
class DistributedZeroIdle:
    exact: bool
    margins: tuple[int, ...]
    relaxed: bool
    relaxed_margin: float


def check_distributed_zero_idle(
    spec: ShorDesignSpec, profile: DelayProfile, layout: DistributedLayout
) -> DistributedZeroIdle:
    """Can the channel of CU^(2^i) be turned around while the next k-1 CUs run?

    A channel serves CU^(2^i) and next CU^(2^(i+k)); the k-1 blocks in
    between must cover a full reuse cycle G, S, E. The relaxed form compares
    against the mean CU delay.
    """
    k, m = layout.k, spec.m
    t_cu = cu_delays(spec, profile)
    gse = block_delays(profile, layout_t_ebit(layout, profile)).gse_reuse
    margins = tuple(sum(t_cu[i + 1 : i + k]) - gse for i in range(m - k))
    if k == 1:
        exact = gse == 0
    else:
        exact = all(x >= 0 for x in margins)
    relaxed_margin = (k - 1) * sum(t_cu) / m - gse
    return DistributedZeroIdle(exact, margins, relaxed_margin >= 0, relaxed_margin)


@dataclass(frozen=True)
class DistributionBounds:
    delta_D_notM: int
    delta_D_M_upper: int


def distribution_delay_bounds(
    spec: ShorDesignSpec, profile: DelayProfile, t_ebit: int | None = None
) -> DistributionBounds:
    """Unavoidable distribution delay (one fresh G, S, E) and the cap on the rest."""
    b = block_delays(profile, t_ebit)
    return DistributionBounds(b.gse_first, (spec.m - 1) * b.gse_reuse)
