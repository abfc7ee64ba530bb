"""Design-space sweeps over profiles, designs, register sizes and ebit channels.

Records come out in canonical coordinate order so that two runs of the same
config produce byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import math
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import astuple, dataclass, field, fields
from pathlib import Path
from typing import Any

from .designs import CUProvider, Design, ShorDesignSpec, build_design, phase_block_delay
from .distribution import DistributedLayout, block_delays, distribute
from .ebit import FIXED_EBIT_TIMES_NS, expected_ebit_time_ns, load_link_params
from .profiles import DelayProfile, get_profile
from .report import TimingReport, shor_delay_decomposition

__all__ = [
    "SweepError",
    "CUModel",
    "DistributedSweep",
    "SweepConfig",
    "SweepRecord",
    "load_sweep_config",
    "run_monolithic_sweep",
    "run_distributed_sweep",
    "run_sweep",
    "optimal_channel_count",
    "relative_reduction",
    "mitigation_fraction",
    "heatmap_grid",
    "emit_csv",
    "emit_heatmap",
]

K_MAX = 16
DEFAULT_K_VALUES = (1, 2, 3, 4)


class SweepError(ValueError):
    pass


@dataclass(frozen=True)
class CUModel:
    """t_CU(i, n) = c0_ns + c1*n*t_q1 + c2*n^2*t_q2, or CU circuits from disk.

    ``import_dir`` may hold one sub-directory per register size named
    ``n<N>``; otherwise its files are used for every n.
    """

    c1: float = 0.0
    c2: float = 0.0
    c0_ns: int = 0
    import_dir: str | None = None

    def delay(self, n: int, profile: DelayProfile) -> int:
        return round(self.c0_ns + self.c1 * n * profile.t_q1 + self.c2 * n * n * profile.t_q2)

    def provider(self, n: int, profile: DelayProfile) -> CUProvider:
        if self.import_dir is None:
            return CUProvider.abstract(self.delay(n, profile))
        root = Path(self.import_dir)
        sub = root / f"n{n}"
        return CUProvider.imported(sub if sub.is_dir() else root)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> CUModel:
        _check_keys("cu_model", d, {"c0_ns", "c1", "c2", "import_dir"})
        if "import_dir" in d and ({"c1", "c2", "c0_ns"} & set(d)):
            raise SweepError("cu_model takes either delay coefficients or import_dir")
        model = cls(**d)
        if min(model.c0_ns, model.c1, model.c2) < 0:
            raise SweepError("cu_model coefficients must be non-negative")
        return model


@dataclass(frozen=True)
class DistributedSweep:
    k_values: tuple[int, ...] = DEFAULT_K_VALUES
    t_ebit_values: tuple[int, ...] = ()
    ebit_model: Any = None
    d_values: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not self.k_values or any(not 1 <= k <= K_MAX for k in self.k_values):
            raise SweepError(f"k_values must be non-empty and within [1, {K_MAX}]")
        if bool(self.t_ebit_values) == (self.ebit_model is not None):
            raise SweepError("give exactly one of t_ebit_values or ebit_model + d_values")
        if self.ebit_model is not None and not self.d_values:
            raise SweepError("ebit_model needs d_values")

    def ebit_times_ns(self) -> list[int]:
        if self.ebit_model is None:
            return list(self.t_ebit_values)
        params = load_link_params(self.ebit_model)
        return [expected_ebit_time_ns(params.at(d)) for d in self.d_values]

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> DistributedSweep:
        _check_keys("distributed", d, {"k_values", "t_ebit_values", "ebit_model", "d_values"})
        t_values = []
        for t in d.get("t_ebit_values", ()):
            if isinstance(t, str):
                if t not in FIXED_EBIT_TIMES_NS:
                    raise SweepError(f"unknown ebit time preset {t!r}")
                t = FIXED_EBIT_TIMES_NS[t]
            if int(t) != t or t < 0:
                raise SweepError(f"t_ebit values must be non-negative integers (ns), got {t!r}")
            t_values.append(int(t))
        return cls(
            k_values=tuple(d.get("k_values", DEFAULT_K_VALUES)),
            t_ebit_values=tuple(t_values),
            ebit_model=d.get("ebit_model"),
            d_values=tuple(float(x) for x in d.get("d_values", ())),
        )


@dataclass(frozen=True)
class SweepConfig:
    profiles: tuple[str, ...]
    designs: tuple[Design, ...]
    n_values: tuple[int, ...]
    cu_model: CUModel
    m_rule: str | int = "2n"
    distributed: DistributedSweep | None = None
    output: str = "qsta_sweep"
    baseline_design: Design = Design.ITERATIVE
    baseline_k: int = 1

    def __post_init__(self) -> None:
        if not (self.profiles and self.designs and self.n_values):
            raise SweepError("profiles, designs and n_values must be non-empty")
        if any(int(n) != n or n < 1 for n in self.n_values):
            raise SweepError("n_values must be positive integers")
        object.__setattr__(self, "designs", tuple(Design(d) for d in self.designs))
        object.__setattr__(self, "baseline_design", Design(self.baseline_design))
        if self.m_rule != "2n" and not (isinstance(self.m_rule, int) and self.m_rule >= 1):
            raise SweepError(f"m_rule must be '2n' or a positive integer, got {self.m_rule!r}")

    def m_for(self, n: int) -> int:
        return 2 * n if self.m_rule == "2n" else int(self.m_rule)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> SweepConfig:
        _check_keys(
            "sweep config",
            d,
            {
                "profiles", "designs", "n_values", "m_rule", "cu_model",
                "distributed", "output", "baseline_design", "baseline_k",
            },
            required={"profiles", "designs", "n_values", "cu_model"},
        )
        dist = d.get("distributed")
        try:
            return cls(
                profiles=tuple(d["profiles"]),
                designs=tuple(d["designs"]),
                n_values=tuple(d["n_values"]),
                cu_model=CUModel.from_dict(d["cu_model"]),
                m_rule=d.get("m_rule", "2n"),
                distributed=None if dist is None else DistributedSweep.from_dict(dist),
                output=d.get("output", "qsta_sweep"),
                baseline_design=d.get("baseline_design", Design.ITERATIVE),
                baseline_k=d.get("baseline_k", 1),
            )
        except ValueError as e:
            raise SweepError(str(e)) from e


def _check_keys(what, d, allowed, required=()):
    if not isinstance(d, Mapping):
        raise SweepError(f"{what} must be a mapping")
    unknown = set(d) - set(allowed)
    if unknown:
        raise SweepError(f"unknown {what} keys: {sorted(unknown)}")
    missing = set(required) - set(d)
    if missing:
        raise SweepError(f"missing {what} keys: {sorted(missing)}")


def load_sweep_config(path: str | Path) -> SweepConfig:
    return SweepConfig.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class SweepRecord:
    """One sweep coordinate. Monolithic records carry k = 0 and t_ebit_ns = 0."""

    design: str
    profile: str
    n: int
    m: int
    k: int
    t_ebit_ns: int
    t_C_ns: int
    t_H_ns: int
    sum_CU_ns: int
    delta_P_ns: int
    delta_P_M_ns: int
    delta_D_ns: int
    delta_D_M_ns: int
    idle_work_ns: int
    qubits_total: int
    ebits_used: int
    depth: int

    @property
    def distributed(self) -> bool:
        return self.k > 0

    @property
    def coordinate(self) -> tuple:
        return (self.profile, self.design, self.n, self.m, self.k, self.t_ebit_ns)


RECORD_FIELDS = tuple(f.name for f in fields(SweepRecord))


def _record(design, profile_name, n, m, k, t_ebit, rep: TimingReport) -> SweepRecord:
    bad = rep.check()
    if bad:
        raise SweepError(f"inconsistent report at {design}/{profile_name}/n={n}/k={k}: {bad}")
    return SweepRecord(
        design=design,
        profile=profile_name,
        n=n,
        m=m,
        k=k,
        t_ebit_ns=t_ebit,
        t_C_ns=rep.t_C,
        t_H_ns=rep.t_H,
        sum_CU_ns=rep.sum_CU,
        delta_P_ns=rep.delta_P,
        delta_P_M_ns=rep.delta_P_M,
        delta_D_ns=rep.delta_D,
        delta_D_M_ns=rep.delta_D_M,
        idle_work_ns=rep.idle_work,
        qubits_total=rep.qubits,
        ebits_used=rep.ebits,
        depth=rep.depth,
    )


def _canonical(records: Iterable[SweepRecord]) -> list[SweepRecord]:
    return sorted(records, key=lambda r: r.coordinate)


def run_monolithic_sweep(config: SweepConfig) -> list[SweepRecord]:
    out = []
    for pname in config.profiles:
        profile = get_profile(pname)
        for design in config.designs:
            for n in config.n_values:
                m = config.m_for(n)
                spec = ShorDesignSpec(n, design, config.cu_model.provider(n, profile), m)
                rep = shor_delay_decomposition(build_design(spec), profile)
                out.append(_record(design.value, pname, n, m, 0, 0, rep))
    return _canonical(out)


def run_distributed_sweep(config: SweepConfig) -> list[SweepRecord]:
    if config.distributed is None:
        raise SweepError("config has no distributed section")
    t_values = config.distributed.ebit_times_ns()
    out = []
    for pname in config.profiles:
        profile = get_profile(pname)
        for design in config.designs:
            for n in config.n_values:
                m = config.m_for(n)
                spec = ShorDesignSpec(n, design, config.cu_model.provider(n, profile), m)
                for t_ebit in t_values:
                    for k in config.distributed.k_values:
                        circ = distribute(spec, DistributedLayout(k, t_ebit=t_ebit))
                        rep = shor_delay_decomposition(circ, profile)
                        out.append(_record(design.value, pname, n, m, k, t_ebit, rep))
    return _canonical(out)


def optimal_channel_count(delays_by_k: Sequence[float] | Mapping[int, float]) -> int:
    """Smallest k reaching the minimum delay; a sequence is indexed from k = 1."""
    items = sorted(delays_by_k.items()) if isinstance(delays_by_k, Mapping) else list(
        enumerate(delays_by_k, start=1)
    )
    if not items:
        raise SweepError("no delays given")
    best_k, best = items[0]
    for k, t in items[1:]:
        if t < best:
            best_k, best = k, t
    return best_k


def relative_reduction(
    records: Sequence[SweepRecord],
    baseline_design: Design | str | None = Design.ITERATIVE,
    baseline_k: int | None = 1,
) -> list[tuple[SweepRecord, float]]:
    """(t_baseline - t_C) / t_baseline for every record.

    Monolithic records compare against ``baseline_design`` at the same
    (profile, n, m); distributed ones against ``baseline_k`` at the same
    (profile, design, n, m, t_ebit).
    """
    mono_base: dict[tuple, int] = {}
    dist_base: dict[tuple, int] = {}
    bd = None if baseline_design is None else Design(baseline_design).value
    for r in records:
        if not r.distributed and r.design == bd:
            mono_base[(r.profile, r.n, r.m)] = r.t_C_ns
        if r.distributed and r.k == baseline_k:
            dist_base[(r.profile, r.design, r.n, r.m, r.t_ebit_ns)] = r.t_C_ns
    out = []
    for r in records:
        if r.distributed:
            key, base = (r.profile, r.design, r.n, r.m, r.t_ebit_ns), dist_base
        else:
            key, base = (r.profile, r.n, r.m), mono_base
        if key not in base:
            raise SweepError(f"no baseline for {r.coordinate}")
        t0 = base[key]
        out.append((r, 0.0 if t0 == 0 else (t0 - r.t_C_ns) / t0))
    return out


def mitigatable_bound(record: SweepRecord) -> int:
    """Upper bound on the mitigatable delay the record reports."""
    profile = get_profile(record.profile)
    if record.distributed:
        return (record.m - 1) * block_delays(profile, record.t_ebit_ns).gse_reuse
    mode = Design(record.design).phase_mode
    return sum(phase_block_delay(i, mode, profile) for i in range(record.m - 1))


def mitigation_fraction(records: Sequence[SweepRecord]) -> list[tuple[SweepRecord, float | None]]:
    """(bound - realised mitigatable delay) / bound; None where the bound is 0."""
    out = []
    for r in records:
        bound = mitigatable_bound(r)
        realised = r.delta_D_M_ns if r.distributed else r.delta_P_M_ns
        out.append((r, None if bound == 0 else (bound - realised) / bound))
    return out


@dataclass
class Heatmap:
    profile: str
    design: str
    n_values: list[int]
    t_ebit_values: list[int]
    cells: dict[tuple[int, int], int] = field(default_factory=dict)

    def get(self, n: int, t_ebit: int) -> int | None:
        return self.cells.get((n, t_ebit))


def heatmap_grid(records: Iterable[SweepRecord]) -> list[Heatmap]:
    """Optimal channel count over (n, t_ebit), one grid per profile and design."""
    by_cell: dict[tuple, dict[int, int]] = defaultdict(dict)
    for r in records:
        if r.distributed:
            by_cell[(r.profile, r.design, r.n, r.t_ebit_ns)][r.k] = r.t_C_ns
    grids: dict[tuple[str, str], Heatmap] = {}
    for (p, d, n, t), delays in sorted(by_cell.items()):
        h = grids.setdefault((p, d), Heatmap(p, d, [], []))
        if n not in h.n_values:
            h.n_values.append(n)
        if t not in h.t_ebit_values:
            h.t_ebit_values.append(t)
        h.cells[(n, t)] = optimal_channel_count(delays)
    for h in grids.values():
        h.t_ebit_values.sort()
    return list(grids.values())


def _writable(path: str | Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise SweepError(f"cannot write {path}: {e}") from e
    return path


def records_csv(records: Sequence[SweepRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_FIELDS)
    for r in records:
        w.writerow(astuple(r))
    return buf.getvalue()


def emit_csv(records: Sequence[SweepRecord], path: str | Path) -> Path:
    if not records:
        raise SweepError("no records to write")
    for r in records:
        _check_record(r)
    path = _writable(path)
    path.write_text(records_csv(records), encoding="utf-8")
    return path


def _check_record(r: SweepRecord) -> None:
    if r.t_C_ns != r.t_H_ns + r.sum_CU_ns + r.delta_P_ns + r.delta_D_ns:
        raise SweepError(f"record {r.coordinate} breaks the delay decomposition")
    if min(r.t_C_ns, r.t_H_ns, r.sum_CU_ns, r.delta_P_ns, r.delta_P_M_ns, r.delta_D_ns,
           r.delta_D_M_ns, r.idle_work_ns) < 0:
        raise SweepError(f"record {r.coordinate} has a negative duration")
    if not r.delta_P_M_ns <= mitigatable_bound(r) or (r.distributed and r.delta_D_M_ns > mitigatable_bound(r)):
        raise SweepError(f"record {r.coordinate} exceeds its mitigatable-delay bound")


def emit_heatmap(records: Iterable[SweepRecord], path: str | Path) -> Path:
    """CSV grid: one row per (profile, design, n), one column per t_ebit."""
    grids = heatmap_grid(records)
    if not grids:
        raise SweepError("no distributed records for a heatmap")
    t_all = sorted({t for h in grids for t in h.t_ebit_values})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["profile", "design", "n", *t_all])
    for h in grids:
        for n in h.n_values:
            w.writerow([h.profile, h.design, n, *("" if h.get(n, t) is None else h.get(n, t) for t in t_all)])
    path = _writable(path)
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def _fmt(x: float | None) -> str:
    return "" if x is None or math.isnan(x) else f"{x:.6f}"


def emit_metrics(records: Sequence[SweepRecord], config: SweepConfig, path: str | Path) -> Path:
    try:
        red = [x for _, x in relative_reduction(records, config.baseline_design, config.baseline_k)]
    except SweepError:
        # baseline design or k not part of this sweep
        red = [None] * len(records)
    mit = [y for _, y in mitigation_fraction(records)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["design", "profile", "n", "m", "k", "t_ebit_ns", "relative_reduction", "mitigation_fraction"])
    for r, x, y in zip(records, red, mit):
        w.writerow([r.design, r.profile, r.n, r.m, r.k, r.t_ebit_ns, _fmt(x), _fmt(y)])
    path = _writable(path)
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def run_sweep(config: SweepConfig) -> dict[str, Path]:
    """Run the sweep the config describes and write its output files."""
    prefix = config.output
    written = {}
    if config.distributed is None:
        records = run_monolithic_sweep(config)
    else:
        records = run_distributed_sweep(config)
        written["heatmap"] = emit_heatmap(records, f"{prefix}_heatmap.csv")
    written["records"] = emit_csv(records, f"{prefix}_records.csv")
    written["metrics"] = emit_metrics(records, config, f"{prefix}_metrics.csv")
    return written
