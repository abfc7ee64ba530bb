import csv
import json

import pytest

from qsta.sweep import (
    RECORD_FIELDS,
    SweepConfig,
    SweepError,
    emit_csv,
    emit_heatmap,
    heatmap_grid,
    mitigation_fraction,
    optimal_channel_count,
    relative_reduction,
    run_distributed_sweep,
    run_monolithic_sweep,
    run_sweep,
)

MONO = {
    "profiles": ["heron_r2_fez", "neutral_atom", "aria_1"],
    "designs": ["iterative", "alternating", "regular_semiclassical"],
    "n_values": list(range(1, 11)),
    "cu_model": {"c1": 2, "c2": 1},
}

DIST = {
    "profiles": ["heron_r2_fez"],
    "designs": ["alternating", "iterative"],
    "n_values": [2, 3],
    "cu_model": {"c1": 2, "c2": 1},
    "distributed": {"k_values": [1, 2, 3], "t_ebit_values": [100, 5000]},
}


@pytest.fixture(scope="module")
def mono_records():
    return run_monolithic_sweep(SweepConfig.from_dict(MONO))


@pytest.fixture(scope="module")
def dist_records():
    return run_distributed_sweep(SweepConfig.from_dict(DIST))


def test_record_fields_in_schema_order():
    assert RECORD_FIELDS == (
        "design", "profile", "n", "m", "k", "t_ebit_ns", "t_C_ns", "t_H_ns", "sum_CU_ns",
        "delta_P_ns", "delta_P_M_ns", "delta_D_ns", "delta_D_M_ns", "idle_work_ns",
        "qubits_total", "ebits_used", "depth",
    )


def test_monolithic_count_and_identity(mono_records):
    assert len(mono_records) == 90
    for r in mono_records:
        assert r.t_C_ns == r.t_H_ns + r.sum_CU_ns + r.delta_P_ns
        assert r.k == 0 and r.ebits_used == 0


def test_iterative_slowest_with_tiny_cu():
    cfg = SweepConfig.from_dict({**MONO, "profiles": ["neutral_atom"], "cu_model": {"c0_ns": 1000}})
    recs = run_monolithic_sweep(cfg)
    for n in MONO["n_values"]:
        t = {r.design: r.t_C_ns for r in recs if r.n == n}
        assert t["iterative"] > max(t["alternating"], t["regular_semiclassical"])


def test_distributed_records(dist_records):
    assert len(dist_records) == 1 * 2 * 2 * 2 * 3
    for r in dist_records:
        assert r.ebits_used == r.m
        assert r.t_C_ns == r.t_H_ns + r.sum_CU_ns + r.delta_P_ns + r.delta_D_ns
    groups = {}
    for r in dist_records:
        groups.setdefault((r.design, r.n, r.t_ebit_ns), []).append(r)
    for rs in groups.values():
        rs.sort(key=lambda r: r.k)
        assert [r.k for r in rs] == [1, 2, 3]
        t = [r.t_C_ns for r in rs]
        assert t == sorted(t, reverse=True)
        assert rs[0].delta_D_ns == max(r.delta_D_ns for r in rs)


def test_distributed_sweep_needs_section():
    with pytest.raises(SweepError):
        run_distributed_sweep(SweepConfig.from_dict(MONO))


def test_optimal_channel_count():
    assert optimal_channel_count([100, 80, 80, 79.9]) == 4
    assert optimal_channel_count([100, 80, 80, 80]) == 2
    assert optimal_channel_count([50]) == 1
    assert optimal_channel_count({3: 10, 1: 12, 2: 10}) == 2
    with pytest.raises(SweepError):
        optimal_channel_count([])


def test_relative_reduction(mono_records, dist_records):
    red = relative_reduction(mono_records)
    assert all(x == 0 for r, x in red if r.design == "iterative")
    assert all(0 <= x < 1 for _, x in red)
    red = relative_reduction(dist_records, baseline_k=1)
    assert all(x == 0 for r, x in red if r.k == 1)
    assert all(x >= 0 for _, x in red)
    with pytest.raises(SweepError):
        relative_reduction(mono_records, baseline_design="regular")


def test_mitigation_fraction():
    cfg = SweepConfig.from_dict({**MONO, "profiles": ["heron_r2_fez"], "designs": ["alternating"],
                                 "cu_model": {"c0_ns": 100_000}})
    for _, x in mitigation_fraction(run_monolithic_sweep(cfg)):
        assert x == 1.0
    cfg = SweepConfig.from_dict({**MONO, "n_values": [1], "m_rule": 1})
    assert all(x is None for _, x in mitigation_fraction(run_monolithic_sweep(cfg)))


def test_single_channel_mitigates_least(dist_records):
    mit = {}
    for r, x in mitigation_fraction(dist_records):
        mit.setdefault((r.design, r.n, r.t_ebit_ns), {})[r.k] = x
    for by_k in mit.values():
        assert by_k[1] == min(by_k.values())


def test_emit_csv(mono_records, tmp_path):
    path = emit_csv(mono_records, tmp_path / "out" / "r.csv")
    lines = path.read_text().splitlines()
    assert len(lines) == 91
    assert lines[0] == ",".join(RECORD_FIELDS)
    row = next(csv.DictReader(lines))
    assert row["design"] == mono_records[0].design
    with pytest.raises(SweepError):
        emit_csv([], tmp_path / "empty.csv")


def test_heatmap(dist_records, tmp_path):
    grids = heatmap_grid(dist_records)
    assert {(h.profile, h.design) for h in grids} == {("heron_r2_fez", "alternating"), ("heron_r2_fez", "iterative")}
    for h in grids:
        for n in h.n_values:
            for t in h.t_ebit_values:
                by_k = {r.k: r.t_C_ns for r in dist_records
                        if (r.design, r.n, r.t_ebit_ns) == (h.design, n, t)}
                assert h.get(n, t) == optimal_channel_count(by_k)
    path = emit_heatmap(dist_records, tmp_path / "h.csv")
    rows = list(csv.reader(path.read_text().splitlines()))
    assert rows[0] == ["profile", "design", "n", "100", "5000"]
    assert len(rows) == 1 + 2 * 2


def test_run_sweep_is_byte_identical(tmp_path):
    cfg = dict(DIST, output=str(tmp_path / "a" / "sweep"))
    first = {k: p.read_bytes() for k, p in run_sweep(SweepConfig.from_dict(cfg)).items()}
    second = {k: p.read_bytes() for k, p in run_sweep(SweepConfig.from_dict(cfg)).items()}
    assert first == second
    assert set(first) == {"records", "heatmap", "metrics"}


def test_ebit_model_axis():
    cfg = SweepConfig.from_dict({**DIST, "n_values": [2], "designs": ["alternating"],
                                 "distributed": {"ebit_model": "neutral_atom", "d_values": [1, 5]}})
    recs = run_distributed_sweep(cfg)
    assert sorted({r.t_ebit_ns for r in recs}) == [4_864_583, 5_869_517]
    assert sorted({r.k for r in recs}) == [1, 2, 3, 4]


@pytest.mark.parametrize(
    "patch",
    [
        {"profiles": []},
        {"designs": ["bogus"]},
        {"n_values": [0]},
        {"m_rule": "3n"},
        {"cu_model": {"c1": 1, "import_dir": "x"}},
        {"cu_model": {"c3": 1}},
        {"surprise": 1},
        {"distributed": {"k_values": [0, 2], "t_ebit_values": [1]}},
        {"distributed": {"k_values": [17], "t_ebit_values": [1]}},
        {"distributed": {"k_values": [1]}},
        {"distributed": {"t_ebit_values": [1], "ebit_model": "neutral_atom", "d_values": [1]}},
        {"distributed": {"t_ebit_values": ["warp_drive"]}},
    ],
)
def test_config_validation(patch):
    with pytest.raises(SweepError):
        SweepConfig.from_dict({**MONO, **patch})


def test_unknown_profile():
    with pytest.raises(KeyError):
        run_monolithic_sweep(SweepConfig.from_dict({**MONO, "profiles": ["nope"]}))


def test_profile_file_and_imported_cus(tmp_path):
    from qsta.ir import Circuit
    from qsta.profiles import PRESETS
    from qsta.textfmt import serialize_circuit

    prof = tmp_path / "p.json"
    prof.write_text(json.dumps(PRESETS["heron_r2_fez"].to_dict()))
    cu_dir = tmp_path / "cus" / "n2"
    cu_dir.mkdir(parents=True)
    for i in range(4):
        sub = Circuit(3)
        sub.add("cx", 0, 1)
        sub.add("cx", 0, 2)
        (cu_dir / f"cu_{i}.txt").write_text(serialize_circuit(sub))
    cfg = SweepConfig.from_dict({"profiles": [str(prof)], "designs": ["alternating"], "n_values": [2],
                                 "cu_model": {"import_dir": str(tmp_path / "cus")}})
    (r,) = run_monolithic_sweep(cfg)
    assert r.sum_CU_ns == 4 * 2 * 84
    assert mitigation_fraction([r])[0][1] is not None
