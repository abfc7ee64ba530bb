"""Acceptance criteria. Each test prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``.
"""
import math
import random
import time

import numpy as np
import pytest

from conftest import random_circuit
from qsta.designs import (
    CUProvider,
    Design,
    ShorDesignSpec,
    build_design,
    check_alternating_zero_idle,
    phase_block_delay,
)
from qsta.distribution import (
    DistributedLayout,
    block_delays,
    check_distributed_zero_idle,
    distribute,
)
from qsta.ebit import NEUTRAL_ATOM, attempt_times, end_to_end_success_probability, expected_ebit_time
from qsta.ir import Circuit, Opcode, build_weighted_graph, circuit_depth
from qsta.profiles import PRESETS, unit_profile
from qsta.report import shor_delay_decomposition
from qsta.sweep import (
    SweepConfig,
    heatmap_grid,
    relative_reduction,
    run_distributed_sweep,
    run_monolithic_sweep,
)
from qsta.timing import circuit_delay, longest_path_oracle

SEMI = (Design.REGULAR_SEMICLASSICAL, Design.ALTERNATING, Design.ITERATIVE)


@pytest.fixture
def verdict(capsys):
    def emit(num, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {num:>2}: {'PASS' if ok else 'FAIL'} | {detail}")
        assert ok, detail

    return emit


def test_c01_oracle_equivalence(verdict):
    rng = random.Random(20240601)
    profile = PRESETS["eagle_sherbrooke"]
    t0 = time.perf_counter()
    mismatches = kinds = 0
    seen = set()
    for _ in range(1000):
        c = random_circuit(rng, max_qubits=10, max_clbits=4, max_len=100, p_duration=1.0)
        seen |= {inst.op for inst in c} | ({"cond"} if any(i.condition for i in c) else set())
        t_alg = circuit_delay(c, profile)
        t_oracle, _ = longest_path_oracle(build_weighted_graph(c, profile))
        mismatches += t_alg != t_oracle
    elapsed = time.perf_counter() - t0
    kinds = {Opcode.MEASURE, Opcode.RESET, "cond"} <= seen
    verdict(1, mismatches == 0 and elapsed < 10 and kinds,
            f"1000 circuits, {mismatches} mismatches, {elapsed:.2f} s")


def _rotation_instructions(c: Circuit) -> int:
    if c.design.design is Design.REGULAR:
        # each controlled phase is two CX plus three P
        return sum(i.op is Opcode.P for i in c) // 3
    return sum(i.op is Opcode.P and bool(i.condition) for i in c)


def test_c02_design_structure(verdict):
    bad = []
    for n in range(2, 9):
        m = 2 * n
        expect_q = {Design.REGULAR: n + m, Design.REGULAR_SEMICLASSICAL: n + m,
                    Design.ITERATIVE: n + 1, Design.ALTERNATING: n + 2}
        for d in Design:
            c = build_design(ShorDesignSpec(n, d, CUProvider.abstract(100)))
            got = (c.num_qubits, sum(i.op is Opcode.MACRO for i in c), _rotation_instructions(c))
            if got != (expect_q[d], m, m * (m - 1) // 2):
                bad.append((n, d.value, got))
    verdict(2, not bad, f"28 (n, design) cells, mismatches: {bad}")


def _gate_cu(n: int, length: int) -> Circuit:
    sub = Circuit(n + 1, name="cu")
    for j in range(length):
        sub.add("cx", 0, 1 + j % n)
        sub.add("x", 1 + (j + 1) % n)
    return sub


def test_c03_depth_equality(verdict):
    bad = []
    cells = 0
    for n in range(2, 9):
        m = 2 * n
        fez = PRESETS["heron_r2_fez"]
        providers = {
            "abstract 1ns": CUProvider.abstract(1),
            "abstract 10us": CUProvider.abstract(10_000),
            "abstract by index": CUProvider.abstract([50 * (i + 1) for i in range(m)]),
            "abstract c1=2,c2=1": CUProvider.abstract(2 * n * fez.t_q1 + n * n * fez.t_q2),
            "gate-level 4n": CUProvider.explicit([_gate_cu(n, 4 * n)] * m),
        }
        for name, prov in providers.items():
            a = circuit_depth(build_design(ShorDesignSpec(n, Design.ALTERNATING, prov)))
            r = circuit_depth(build_design(ShorDesignSpec(n, Design.REGULAR_SEMICLASSICAL, prov)))
            cells += 1
            if a != r:
                bad.append((n, name, a, r))
    verdict(3, not bad, f"{cells} (n, provider) cells, mismatches: {bad}")


def test_c04_closed_form_zero_idle(verdict):
    rng = random.Random(4)
    bad = []
    cases = 0
    for profile in (unit_profile(), PRESETS["heron_r2_fez"], PRESETS["aria_2"], PRESETS["neutral_atom"]):
        for m in (1, 2, 3, 8, 17, 32, 64, 100, 128):
            # CU^(2^i) must cover the phase processing of bit i-1
            t_cu = [0] + [phase_block_delay(i - 1, "classical", profile) + rng.randint(0, 1000) for i in range(1, m)]
            t_cu[0] = rng.randint(1, 1000)
            prov = CUProvider.abstract(t_cu)
            n = max(1, m // 2)
            s_alt = ShorDesignSpec(n, Design.ALTERNATING, prov, m)
            s_reg = ShorDesignSpec(n, Design.REGULAR_SEMICLASSICAL, prov, m)
            assert check_alternating_zero_idle(s_alt, profile).holds
            t_h = profile.t_q1
            closed = t_h + sum(t_cu) + phase_block_delay(m - 1, "classical", profile)
            got = (circuit_delay(build_design(s_alt), profile), circuit_delay(build_design(s_reg), profile))
            cases += 1
            if got != (closed, closed):
                bad.append((profile.name, m, got, closed))
    verdict(4, not bad, f"{cases} (profile, m) cases up to m=128, mismatches: {bad}")


def test_c05_fifty_percent_plateau(verdict):
    profile = PRESETS["neutral_atom"]
    out = {}
    for m in range(16, 129, 8):
        t = {d: circuit_delay(build_design(ShorDesignSpec(m // 2, d, CUProvider.abstract(1000), m)), profile)
             for d in (Design.ALTERNATING, Design.ITERATIVE)}
        out[m] = (t[Design.ITERATIVE] - t[Design.ALTERNATING]) / t[Design.ITERATIVE]
    ok = all(0.45 <= x <= 0.55 for x in out.values())
    verdict(5, ok, f"reduction over m=16..128: min {min(out.values()):.4f}, max {max(out.values()):.4f}")


MONO_GRID = {
    "profiles": sorted(PRESETS),
    "designs": [d.value for d in SEMI],
    "n_values": list(range(1, 11)),
}
DIST_GRID = {
    "profiles": ["heron_r2_fez", "eagle_sherbrooke", "neutral_atom"],
    "designs": [d.value for d in Design],
    "n_values": [2, 4, 6],
    "cu_model": {"c1": 2, "c2": 1},
    "distributed": {"k_values": [1, 2, 3, 4],
                    "t_ebit_values": [100, 1_000, 10_000, 100_000, 1_000_000, 10_000_000]},
}


def _ordering_violations(records):
    by_coord = {}
    for r in records:
        by_coord.setdefault((r.profile, r.n, r.m, r.k, r.t_ebit_ns), {})[r.design] = r.t_C_ns
    bad = []
    for coord, t in sorted(by_coord.items()):
        if not t["regular_semiclassical"] <= t["alternating"] <= t["iterative"]:
            bad.append((coord, t["alternating"] - t["iterative"]))
    return len(by_coord), bad


def test_c06_delay_ordering(verdict):
    mono_cells, mono_bad = 0, []
    for cu in ({"c1": 2, "c2": 1}, {"c0_ns": 1000}, {"c1": 50, "c2": 20}, {"c0_ns": 50_000_000}):
        cells, bad = _ordering_violations(run_monolithic_sweep(SweepConfig.from_dict({**MONO_GRID, "cu_model": cu})))
        mono_cells += cells
        mono_bad += bad

    dist = run_distributed_sweep(SweepConfig.from_dict(DIST_GRID))
    dist_cells, dist_bad = _ordering_violations([r for r in dist if r.design != "regular"])
    k_bad = []
    series = {}
    for r in dist:
        series.setdefault((r.profile, r.design, r.n, r.t_ebit_ns), []).append((r.k, r.t_C_ns))
    for key, pts in series.items():
        t = [x for _, x in sorted(pts)]
        if any(b > a for a, b in zip(t, t[1:])):
            k_bad.append(key)
    gap_is_one_gate = all(
        gap == PRESETS[coord[0]].t_q1 for coord, gap in dist_bad
    )
    verdict(
        6,
        not (mono_bad or dist_bad or k_bad),
        f"monolithic {mono_cells} coords, {len(mono_bad)} order violations | "
        f"distributed {dist_cells} coords, {len(dist_bad)} order violations "
        f"(all alternating - iterative == t_q1: {gap_is_one_gate}) | "
        f"{len(series)} k-series, {len(k_bad)} not monotone",
    )


def test_c07_distributed_decomposition(verdict):
    exact_cases = 0
    bad_exact, bad_bound = [], []
    for pname in ("heron_r2_fez", "eagle_sherbrooke", "aria_1", "neutral_atom"):
        profile = PRESETS[pname]
        base = profile.t_measure + profile.t_reset
        for n in (2, 3, 4):
            for cu_mul in (0.1, 1, 10, 100):
                cu = round(cu_mul * base)
                for te_mul in (0.01, 0.1, 1, 10):
                    t_ebit = round(te_mul * base)
                    for k in (1, 2, 3, 4):
                        layout = DistributedLayout(k, t_ebit=t_ebit)
                        gse = block_delays(profile, t_ebit)
                        for d in Design:
                            s = ShorDesignSpec(n, d, CUProvider.abstract(cu))
                            rep = shor_delay_decomposition(distribute(s, layout), profile)
                            if not 0 <= rep.delta_D_M <= (s.m - 1) * gse.gse_reuse:
                                bad_bound.append((pname, n, cu, t_ebit, k, d.value))
                            if d in (Design.REGULAR_SEMICLASSICAL, Design.ALTERNATING) and (
                                check_distributed_zero_idle(s, profile, layout).exact
                                and check_alternating_zero_idle(s, profile, layout).holds
                            ):
                                exact_cases += 1
                                if rep.delta_D != gse.gse_first:
                                    bad_exact.append((pname, n, cu, t_ebit, k, d.value, rep.delta_D))
    ok = exact_cases > 0 and not bad_exact and not bad_bound
    verdict(7, ok, f"{exact_cases} zero-idle coords with delta_D == t(GSE), "
                   f"{len(bad_exact)} misses, {len(bad_bound)} bound violations")


def test_c08_ebit_model(verdict):
    t0 = time.perf_counter()
    t1 = expected_ebit_time(NEUTRAL_ATOM.at(1)) / 1e3
    t50 = expected_ebit_time(NEUTRAL_ATOM.at(50)) / 1e3
    series = [expected_ebit_time(NEUTRAL_ATOM.at(d)) for d in (1, 5, 10, 20, 50)]
    increasing = all(b > a for a, b in zip(series, series[1:]))
    rng = np.random.default_rng(8)
    z_scores = []
    for d in (1, 5, 10, 20, 50):
        p = NEUTRAL_ATOM.at(d)
        t_s, t_f = attempt_times(p)
        samples = (rng.geometric(end_to_end_success_probability(p), size=1_000_000) - 1) * t_f + t_s
        se = samples.std(ddof=1) / math.sqrt(samples.size)
        z_scores.append(abs(samples.mean() - expected_ebit_time(p)) / se)
    elapsed = time.perf_counter() - t0
    ok = 4.5 <= t1 <= 5.5 and 104 <= t50 <= 126 and increasing and max(z_scores) <= 3 and elapsed < 30
    verdict(8, ok, f"T(1 km) = {t1:.4f} ms, T(50 km) = {t50:.3f} ms, increasing {increasing}, "
                   f"max |z| = {max(z_scores):.2f}, {elapsed:.1f} s")


def test_c09_one_over_k(verdict):
    cu = 200
    cfg = SweepConfig.from_dict({
        "profiles": ["heron_r2_fez"],
        "designs": [d.value for d in SEMI],
        "n_values": [32, 64],
        "cu_model": {"c0_ns": cu},
        "distributed": {"k_values": [1, 2, 3, 4], "t_ebit_values": [100 * cu * 128, 1000 * cu * 128]},
    })
    records = [r for r in run_distributed_sweep(cfg) if r.t_ebit_ns >= 100 * r.sum_CU_ns and r.m >= 64]
    worst = 0.0
    for r, red in relative_reduction(records, baseline_k=1):
        if r.k == 1:
            continue
        target = 1 - 1 / r.k
        worst = max(worst, abs(red - target) / target)
    verdict(9, records and worst <= 0.10, f"{len(records)} records, worst relative deviation from 1-1/k: {worst:.4f}")


def test_c10_heatmap_monotonicity(verdict):
    cfg = SweepConfig.from_dict({
        "profiles": ["heron_r2_fez"],
        "designs": [d.value for d in Design],
        "n_values": [2, 4, 6, 8, 10, 12, 14, 16],
        "cu_model": {"c1": 2, "c2": 1},
        "distributed": {"k_values": [1, 2, 3, 4],
                        "t_ebit_values": [1_000, 3_000, 10_000, 30_000, 100_000, 300_000, 1_000_000, 3_000_000]},
    })
    grids = heatmap_grid(run_distributed_sweep(cfg))
    violations = []
    for h in grids:
        for n in h.n_values:
            row = [h.get(n, t) for t in h.t_ebit_values]
            violations += [(h.design, "t_ebit", n) for a, b in zip(row, row[1:]) if b < a]
        for t in h.t_ebit_values:
            col = [h.get(n, t) for n in h.n_values]
            violations += [(h.design, "n", t) for a, b in zip(col, col[1:]) if b > a]
    sizes = {(len(h.n_values), len(h.t_ebit_values)) for h in grids}
    verdict(10, not violations and sizes == {(8, 8)},
            f"{len(grids)} grids of 8 n x 8 t_ebit, {len(violations)} violations")
