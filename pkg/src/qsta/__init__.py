"""Static timing analysis of Shor order-finding circuits, monolithic and distributed."""
from .designs import (
    CUProvider,
    Design,
    PhaseMode,
    ShorDesignSpec,
    build_alternating,
    build_design,
    build_iterative,
    build_regular,
    build_regular_semiclassical,
    check_alternating_zero_idle,
    phase_block_delay,
)
from .distribution import (
    DistributedLayout,
    EbitChannel,
    assign_channels,
    block_delays,
    check_distributed_zero_idle,
    distribute,
    distribution_delay_bounds,
)
from .ebit import EbitLinkParams, expected_ebit_time, expected_ebit_time_ns
from .ir import QPU, Circuit, CircuitError, Instruction, Opcode, Role, build_weighted_graph, circuit_depth
from .profiles import PRESETS, DelayProfile, get_profile, unit_profile
from .report import TimingReport, shor_delay_decomposition
from .textfmt import load_circuit, parse_circuit, serialize_circuit
from .timing import (
    asap_schedule,
    circuit_delay,
    critical_path,
    delay_of,
    idle_time,
    idle_times,
    longest_path_oracle,
)

__version__ = "0.1.0"
