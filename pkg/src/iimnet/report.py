"""Batch experiment harness: heuristics against the optimum over seeded networks.

The run writes a deterministic payload CSV (same seeds, same bytes), a
sidecar timings CSV kept out of the determinism contract, a plot-data CSV
with mean entities failed per hardening budget and method, and one rendered
comparison figure per case and size.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from pathlib import Path

from .cascade import kill_set
from .hardening import harden_case1, harden_case3_maxcov, harden_exact, harden_greedy
from .model import CaseClass, InterdependentNetwork, classify_case
from .netgen import GenConfig, generate
from .vulnerability import most_vulnerable_exact, most_vulnerable_greedy

PAYLOAD_FIELDS = [
    "network_id",
    "case",
    "n_a",
    "n_b",
    "seed",
    "K",
    "k",
    "status",
    "attack",
    "kill_size",
    "exact_objective",
    "greedy_objective",
    "case1_objective",
    "case3_objective",
    "gap_ratio",
]
TIMING_FIELDS = ["network_id", "k", "vuln_ms", "exact_ms", "greedy_ms", "case1_ms", "case3_ms"]
PLOT_FIELDS = ["case", "n_a", "n_b", "k", "method", "mean_failed"]


@dataclass
class ExperimentSettings:
    cases: list[CaseClass]
    sizes: list[int]  # total entity counts; split as evenly as possible
    K: int
    k_list: list[int]
    seeds: list[int]
    idr_density: float = 0.8
    max_minterms: int = 3
    max_minterm_size: int = 3
    vuln_method: str = "exact"
    budget: int = 10_000_000


@dataclass
class ExperimentResult:
    payload_rows: list[dict] = field(default_factory=list)
    timing_rows: list[dict] = field(default_factory=list)
    ok_rows: int = 0
    failed_rows: int = 0

    @property
    def mean_gap(self) -> float | None:
        gaps = [
            float(r["gap_ratio"]) for r in self.payload_rows if r["status"] == "ok"
        ]
        return sum(gaps) / len(gaps) if gaps else None


def run_experiment(settings: ExperimentSettings) -> ExperimentResult:
    result = ExperimentResult()
    for case in settings.cases:
        for total in settings.sizes:
            n_a = (total + 1) // 2
            n_b = total - n_a
            for seed in settings.seeds:
                _run_instance(settings, case, n_a, n_b, seed, result)
    return result


def _run_instance(settings, case, n_a, n_b, seed, result) -> None:
    network_id = f"{case.value}-a{n_a}b{n_b}-s{seed}"
    base = {
        "network_id": network_id,
        "case": case.value,
        "n_a": n_a,
        "n_b": n_b,
        "seed": seed,
        "K": settings.K,
    }
    try:
        size = min(settings.max_minterm_size, n_a, n_b)
        cfg = GenConfig(
            case=case,
            n_a=n_a,
            n_b=n_b,
            idr_density=settings.idr_density,
            max_minterms=settings.max_minterms,
            max_minterm_size=size,
            seed=seed,
        )
        net = generate(cfg)
        t0 = time.perf_counter()
        if settings.vuln_method == "greedy":
            attack = most_vulnerable_greedy(net, settings.K)
        else:
            attack = most_vulnerable_exact(net, settings.K, budget=settings.budget)
        vuln_ms = (time.perf_counter() - t0) * 1000.0
        shape = classify_case(net)
    except Exception as exc:  # noqa: BLE001 - every per-instance failure becomes a row
        for k in settings.k_list:
            result.payload_rows.append(
                {**base, "k": k, "status": f"error:{type(exc).__name__}"}
            )
            result.failed_rows += 1
        return

    for k in settings.k_list:
        row = {**base, "k": k}
        timing = {"network_id": network_id, "k": k, "vuln_ms": f"{vuln_ms:.3f}"}
        try:
            results, times = _run_methods(net, shape, attack.attacked, k, settings.budget)
            exact_obj = results["exact"]
            greedy_obj = results["greedy"]
            gap = (greedy_obj - exact_obj) / max(exact_obj, 1)
            row.update(
                status="ok",
                attack=" ".join(str(e) for e in sorted(attack.attacked)),
                kill_size=len(kill_set(net, attack.attacked)),
                exact_objective=exact_obj,
                greedy_objective=greedy_obj,
                case1_objective=results.get("case1", ""),
                case3_objective=results.get("case3", ""),
                gap_ratio=f"{gap:.6f}",
            )
            for name, ms in times.items():
                timing[f"{name}_ms"] = f"{ms:.3f}"
            result.ok_rows += 1
        except Exception as exc:  # noqa: BLE001
            row["status"] = f"error:{type(exc).__name__}"
            result.failed_rows += 1
        result.payload_rows.append(row)
        result.timing_rows.append(timing)


def _run_methods(net, shape, attacked, k, budget):
    objectives: dict[str, int] = {}
    times: dict[str, float] = {}

    def run(name, fn):
        t0 = time.perf_counter()
        res = fn()
        times[name] = (time.perf_counter() - t0) * 1000.0
        objectives[name] = res.objective

    run("exact", lambda: harden_exact(net, attacked, k, budget=budget))
    run("greedy", lambda: harden_greedy(net, attacked, k))
    if shape is CaseClass.CASE_I:
        run("case1", lambda: harden_case1(net, attacked, k))
    if shape in (CaseClass.CASE_I, CaseClass.CASE_III):
        run("case3", lambda: harden_case3_maxcov(net, attacked, k))
    return objectives, times


def plot_rows(result: ExperimentResult) -> list[dict]:
    """Aggregate ok rows into mean entities failed per (case, size, k, method)."""
    sums: dict[tuple, list[float]] = {}
    for row in result.payload_rows:
        if row["status"] != "ok":
            continue
        for method in ("exact", "greedy", "case1", "case3"):
            value = row.get(f"{method}_objective", "")
            if value == "" or value is None:
                continue
            key = (row["case"], row["n_a"], row["n_b"], row["k"], method)
            sums.setdefault(key, []).append(float(value))
    out = []
    for (case, n_a, n_b, k, method), vals in sorted(sums.items()):
        out.append(
            {
                "case": case,
                "n_a": n_a,
                "n_b": n_b,
                "k": k,
                "method": method,
                "mean_failed": f"{sum(vals) / len(vals):.6f}",
            }
        )
    return out


def write_outputs(result: ExperimentResult, out_csv: str | Path, figures: bool = True) -> dict:
    """Write payload, timings, plot data and (optionally) figures next to ``out_csv``."""
    out_csv = Path(out_csv)
    stem = out_csv.with_suffix("")
    paths = {"payload": out_csv, "timings": Path(f"{stem}_timings.csv"),
             "plotdata": Path(f"{stem}_plotdata.csv"), "figures": []}
    _write_csv(out_csv, PAYLOAD_FIELDS, result.payload_rows)
    _write_csv(paths["timings"], TIMING_FIELDS, result.timing_rows)
    rows = plot_rows(result)
    _write_csv(paths["plotdata"], PLOT_FIELDS, rows)
    if figures:
        paths["figures"] = render_figures(rows, stem)
    return paths


def _write_csv(path: Path, fields: list[str], rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, restval="", extrasaction="ignore",
                                lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def render_figures(rows: list[dict], stem: Path) -> list[Path]:
    """One grouped bar chart per (case, size): entities failed versus budget k."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    groups: dict[tuple, dict] = {}
    for row in rows:
        key = (row["case"], row["n_a"], row["n_b"])
        groups.setdefault(key, {}).setdefault(row["method"], []).append(
            (int(row["k"]), float(row["mean_failed"]))
        )
    paths = []
    for (case, n_a, n_b), methods in sorted(groups.items()):
        ks = sorted({k for pts in methods.values() for k, _ in pts})
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        width = 0.8 / max(len(methods), 1)
        for i, (method, pts) in enumerate(sorted(methods.items())):
            values = dict(pts)
            offsets = [x + i * width for x in range(len(ks))]
            ax.bar(offsets, [values.get(k, 0.0) for k in ks], width=width, label=method)
        ax.set_xticks([x + width * (len(methods) - 1) / 2 for x in range(len(ks))])
        ax.set_xticklabels([str(k) for k in ks])
        ax.set_xlabel("entities hardened (k)")
        ax.set_ylabel("entities failed (mean)")
        ax.set_title(f"Case {case}, layers {n_a}+{n_b}")
        ax.legend()
        fig.tight_layout()
        path = Path(f"{stem}_case{case}_n{int(n_a) + int(n_b)}.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    return paths
