"""Command-line entry point: ``qsta <command> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .designs import CUProvider, Design, ShorDesignSpec, build_design
from .distribution import DistributedLayout, distribute
from .ebit import (
    EbitModelError,
    attempt_times,
    end_to_end_success_probability,
    expected_ebit_time,
    expected_ebit_time_ns,
    load_link_params,
    local_success_probability,
)
from .ir import CircuitError, circuit_depth
from .profiles import get_profile
from .report import shor_delay_decomposition
from .sweep import SweepError, load_sweep_config, run_sweep
from .textfmt import load_circuit, serialize_circuit
from .timing import TimingError, asap_schedule, circuit_delay, critical_path, idle_times


def parse_cu(text: str, n: int, profile=None) -> CUProvider:
    """CU spec: ``500`` (ns each), ``100,200,...`` (ns per index),
    ``c1=2,c2=1`` (scaled by the profile's gate times) or a directory of
    circuit files."""
    if Path(text).is_dir():
        return CUProvider.imported(text)
    if "=" in text:
        coef = {"c0": 0.0, "c1": 0.0, "c2": 0.0}
        for part in text.split(","):
            key, _, val = part.partition("=")
            if key.strip() not in coef:
                raise ValueError(f"unknown CU coefficient {key!r}")
            coef[key.strip()] = float(val)
        if profile is None:
            raise ValueError("coefficient CU specs need --profile")
        d = round(coef["c0"] + coef["c1"] * n * profile.t_q1 + coef["c2"] * n * n * profile.t_q2)
        return CUProvider.abstract(d)
    vals = [int(v) for v in text.split(",") if v.strip()]
    if len(vals) == 1:
        return CUProvider.abstract(vals[0])
    return CUProvider.abstract(vals)


def _spec(args, profile) -> ShorDesignSpec:
    return ShorDesignSpec(
        n=args.n,
        design=Design(args.design),
        cu=parse_cu(args.cu, args.n, profile),
        m=args.m,
        include_final_reset=not args.no_final_reset,
    )


def _emit(circuit, args, profile) -> None:
    if args.output:
        Path(args.output).write_text(serialize_circuit(circuit), encoding="utf-8")
    if profile is not None:
        rep = shor_delay_decomposition(circuit, profile)
        d = rep.to_dict()
        d.pop("idle")
        d["violations"] = rep.check()
        print(json.dumps(d, indent=2))
    elif not args.output:
        sys.stdout.write(serialize_circuit(circuit))


def cmd_analyze(args) -> int:
    circuit = load_circuit(args.circuit)
    profile = get_profile(args.profile)
    t_c = circuit_delay(circuit, profile)
    path = critical_path(circuit, profile)
    if not args.report:
        print(f"{circuit.name}: t_C = {t_c} ns, depth = {circuit_depth(circuit)}")
        print("critical path: " + " -> ".join(circuit[i].name() for i in path))
        return 0
    sched = asap_schedule(circuit, profile)
    out = {
        "name": circuit.name,
        "profile": profile.name,
        "t_C_ns": t_c,
        "depth": circuit_depth(circuit),
        "critical_path": [{"index": i, "op": circuit[i].name(), "start_ns": sched.start[i],
                           "end_ns": sched.end[i]} for i in path],
        "idle_ns": {str(q): v for q, v in idle_times(circuit, profile).items()},
    }
    print(json.dumps(out, indent=2))
    return 0


def cmd_build(args) -> int:
    profile = get_profile(args.profile) if args.profile else None
    _emit(build_design(_spec(args, profile)), args, profile)
    return 0


def cmd_distribute(args) -> int:
    profile = get_profile(args.profile) if args.profile else None
    if args.t_ebit is not None:
        t_ebit = args.t_ebit
    else:
        t_ebit = expected_ebit_time_ns(load_link_params(args.ebit_model).at(args.d_km))
    circuit = distribute(_spec(args, profile), DistributedLayout(args.k, t_ebit=t_ebit))
    _emit(circuit, args, profile)
    return 0


def cmd_sweep(args) -> int:
    written = run_sweep(load_sweep_config(args.config))
    for kind, path in written.items():
        print(f"{kind}: {path}")
    return 0


def cmd_ebit_time(args) -> int:
    params = load_link_params(args.model).at(args.d_km)
    t_s, t_f = attempt_times(params)
    t = expected_ebit_time(params)
    print(json.dumps({
        "d_km": params.d_km,
        "p": local_success_probability(params),
        "p_e": end_to_end_success_probability(params),
        "T_s_us": t_s,
        "T_f_us": t_f,
        "T_us": t,
        "T_ns": expected_ebit_time_ns(params),
    }, indent=2))
    return 0


def _design_args(p: argparse.ArgumentParser, positional: bool) -> None:
    choices = [d.value for d in Design]
    if positional:
        p.add_argument("design", choices=choices)
    else:
        p.add_argument("--design", choices=choices, default=Design.ALTERNATING.value)
    p.add_argument("--n", type=int, required=True, help="work register size")
    p.add_argument("--m", type=int, default=None, help="data bits (default 2n)")
    p.add_argument("--cu", required=True, help="ns | ns,ns,... | c1=..,c2=.. | directory")
    p.add_argument("--no-final-reset", action="store_true")
    p.add_argument("--profile", help="print the delay decomposition under this profile")
    p.add_argument("-o", "--output", help="write the circuit here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsta", description="Static timing analysis of Shor circuit designs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="delay and critical path of a circuit file")
    p.add_argument("circuit")
    p.add_argument("--profile", required=True, help="preset name or JSON file")
    p.add_argument("--report", action="store_true", help="JSON report with schedule and idle times")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("build", help="generate a monolithic design")
    _design_args(p, positional=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("distribute", help="generate a two-QPU design")
    p.add_argument("--k", type=int, required=True, help="ebit channels")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--t-ebit", type=int, help="ebit generation time, ns")
    g.add_argument("--ebit-model", help="link parameter JSON file or 'neutral_atom'")
    p.add_argument("--d-km", type=float, help="link length for --ebit-model")
    _design_args(p, positional=False)
    p.set_defaults(func=cmd_distribute)

    p = sub.add_parser("sweep", help="run a sweep config and write CSV files")
    p.add_argument("config")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ebit-time", help="expected ebit generation time of a link")
    p.add_argument("--model", required=True, help="link parameter JSON file or 'neutral_atom'")
    p.add_argument("--d-km", type=float, required=True)
    p.set_defaults(func=cmd_ebit_time)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "distribute" and args.ebit_model and args.d_km is None:
        parser.error("--ebit-model needs --d-km")
    try:
        return args.func(args)
    except (CircuitError, TimingError, SweepError, EbitModelError, KeyError, ValueError, OSError) as e:
        print(f"qsta: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
