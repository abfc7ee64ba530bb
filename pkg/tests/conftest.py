import math
import random

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from qsta.ir import Circuit, Instruction, Opcode

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_ONE_Q = [Opcode.H, Opcode.X, Opcode.Y, Opcode.Z, Opcode.I, Opcode.P]


def random_circuit(rng: random.Random, max_qubits=10, max_clbits=4, max_len=100, durations=True, p_duration=0.7) -> Circuit:
    """Mixed gates, measurements, resets, conditioned gates and macros."""
    nq = rng.randint(1, max_qubits)
    nc = rng.randint(0, max_clbits)
    c = Circuit(nq, nc, name="random")
    for _ in range(rng.randint(0, max_len)):
        dur = rng.randint(1, 1000) if durations and rng.random() < p_duration else None
        kind = rng.random()
        cond = ()
        if nc and rng.random() < 0.2:
            cond = tuple(rng.sample(range(nc), rng.randint(1, min(2, nc))))
        if kind < 0.35:
            op = rng.choice(_ONE_Q)
            theta = rng.uniform(-math.pi, math.pi) if op is Opcode.P else None
            inst = Instruction(op, (rng.randrange(nq),), condition=cond, duration=dur, theta=theta)
        elif kind < 0.6 and nq >= 2:
            inst = Instruction(Opcode.CX, tuple(rng.sample(range(nq), 2)), condition=cond, duration=dur)
        elif kind < 0.75 and nc:
            inst = Instruction(Opcode.MEASURE, (rng.randrange(nq),), clbits=(rng.randrange(nc),), duration=dur)
        elif kind < 0.85:
            inst = Instruction(Opcode.RESET, (rng.randrange(nq),), duration=dur)
        else:
            qs = tuple(rng.sample(range(nq), rng.randint(1, nq)))
            inst = Instruction(Opcode.MACRO, qs, label=f"U{rng.randrange(5)}", duration=rng.randint(1, 1000))
        c.append(inst)
    return c


@st.composite
def circuits(draw, max_qubits=6, max_clbits=3, max_len=40):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_circuit(random.Random(seed), max_qubits, max_clbits, max_len)
