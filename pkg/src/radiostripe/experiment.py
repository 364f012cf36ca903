"""Multi-attempt experiments: every strategy on one shared network, plus file output.

All strategies of one experiment see the same deployment and channel
realization. Attempt ``a`` of strategy ``s`` draws its GA randomness from
``default_rng([seed, 100 + index(s), a])`` so results do not depend on which
other strategies were requested.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import selection
from .metrics import CostReport, cost_report
from .network import STREAM_TRANSFORM, Network, build_network, stream
from .optimizer import STRATEGIES, RunTrace, check_strategy, loops_to_convergence, run_strategy
from .scenario import Adaptation, ScenarioConfig, dumps, instance_transform

CSV_HEADER = ("ra_loop", "strategy", "mean_sum_se", "best_sum_se", "worst_sum_se")


def pad_curves(curves: list[np.ndarray]) -> np.ndarray:
    """Stack curves of unequal length, repeating each one's last value."""
    if not curves:
        return np.zeros((0, 0))
    n = max(len(c) for c in curves)
    return np.array([np.concatenate([c, np.full(n - len(c), c[-1])]) for c in curves])


@dataclass
class StrategyResult:
    strategy: str
    traces: list[RunTrace]
    mean: np.ndarray
    best: np.ndarray
    worst: np.ndarray
    loops_to_convergence: int
    best_attempt: int
    cost: CostReport

    @property
    def final_D(self) -> np.ndarray:
        return self.traces[self.best_attempt].final_D

    @property
    def final_mean(self) -> float:
        return float(self.mean[-1])

    @property
    def attempt_loops_to_convergence(self) -> list[int]:
        return [t.loops_to_convergence() for t in self.traces]


@dataclass
class ExperimentResult:
    config: ScenarioConfig
    network: Network
    results: dict[str, StrategyResult] = field(default_factory=dict)

    def __getitem__(self, strategy: str) -> StrategyResult:
        return self.results[strategy.upper()]


def attempt_seed(seed: int, strategy: str, attempt: int) -> tuple[int, int, int]:
    return (seed, 100 + STRATEGIES.index(strategy), attempt)


def summarize(strategy: str, traces: list[RunTrace], cfg: ScenarioConfig, seconds: float = 0.0) -> StrategyResult:
    curves = pad_curves([t.true_se for t in traces])
    mean = curves.mean(axis=0)
    finals = [t.true_se[-1] for t in traces]
    g = cfg.geometry
    n_iter = int(round(np.mean([t.n_loops for t in traces])))
    cost = cost_report(
        strategy, g.n_ues, g.n_aps, g.n_antennas, cfg.radio.tau_c, cfg.radio.tau_p, n_iter,
        cfg.ga.pop_size, cfg.ga.tournament_size,
        instrumented_macs=int(round(np.mean([t.macs for t in traces]))),
        wall_clock_per_loop_s=seconds / max(sum(t.n_loops for t in traces), 1),
    )
    return StrategyResult(strategy, traces, mean, curves.max(axis=0), curves.min(axis=0),
                          loops_to_convergence(mean), int(np.argmax(finals)), cost)


def run_experiment(cfg: ScenarioConfig, strategies, attempts: int | None = None,
                   warm_start: np.ndarray | dict | None = None, network: Network | None = None,
                   progress=None) -> ExperimentResult:
    """Run ``attempts`` (default ``cfg.ga.attempts``) GA attempts of each strategy.

    ``warm_start`` is one matrix for every strategy or a dict keyed by strategy.
    """
    strategies = [check_strategy(s) for s in strategies]
    attempts = cfg.ga.attempts if attempts is None else attempts
    net = build_network(cfg) if network is None else network
    out = ExperimentResult(cfg, net)
    for s in strategies:
        ws = warm_start.get(s) if isinstance(warm_start, dict) else warm_start
        traces = []
        start = time.perf_counter()
        for a in range(attempts):
            seed = attempt_seed(cfg.seed, s, a)
            trace = run_strategy(s, net.realization, cfg.ga, np.random.default_rng(seed), ws)
            trace.seed = seed
            traces.append(trace)
            if progress:
                progress(s, a, trace)
        out.results[s] = summarize(s, traces, cfg, time.perf_counter() - start)
    return out


# output ----------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def write_convergence_csv(result: ExperimentResult, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for s, r in result.results.items():
            for t, (m, b, lo) in enumerate(zip(r.mean, r.best, r.worst), start=1):
                w.writerow([t, s, _fmt(m), _fmt(b), _fmt(lo)])


def write_attempts_csv(r: StrategyResult, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("ra_loop", "attempt", "true_sum_se", "objective"))
        for a, tr in enumerate(r.traces):
            for t, (se, obj) in enumerate(zip(tr.true_se, tr.objective), start=1):
                w.writerow([t, a, _fmt(se), _fmt(obj)])


def summary(result: ExperimentResult) -> dict:
    cfg = result.config
    g = cfg.geometry
    out = {
        "scenario": cfg.name,
        "seed": cfg.seed,
        "K": g.n_ues, "L": g.n_aps, "N": g.n_antennas,
        "tau_p": cfg.radio.tau_p, "tau_c": cfg.radio.tau_c,
        "adaptations": [{"kind": a.kind, "ue_index": a.ue_index, "position": a.position}
                        for a in cfg.adaptations],
        "strategies": {},
    }
    for s, r in result.results.items():
        out["strategies"][s] = {
            "attempts": len(r.traces),
            "final_mean_sum_se": r.final_mean,
            "final_best_sum_se": float(r.best[-1]),
            "final_worst_sum_se": float(r.worst[-1]),
            "loops_to_convergence": r.loops_to_convergence,
            "attempt_loops_to_convergence": r.attempt_loops_to_convergence,
            "best_attempt": r.best_attempt,
            "op_count": r.cost.op_count,
            "fronthaul_symbols": r.cost.fronthaul_symbols,
            "n_iter": r.cost.n_iter,
            "instrumented_macs": r.cost.instrumented_macs,
        }
    return out


def emit_csv(result: ExperimentResult, out_dir) -> Path:
    """Write convergence CSV, per-attempt traces, matrices, summary and config into ``out_dir``.

    Everything except ``timing.json`` is a pure function of config and seed.
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        write_convergence_csv(result, out_dir / "convergence.csv")
        for s, r in result.results.items():
            write_attempts_csv(r, out_dir / f"attempts_{s}.csv")
            selection.save(r.final_D, out_dir / f"matrix_{s}.txt")
        (out_dir / "summary.json").write_text(json.dumps(summary(result), indent=2) + "\n")
        (out_dir / "config.ini").write_text(dumps(result.config))
        timing = {s: r.cost.wall_clock_per_loop_s for s, r in result.results.items()}
        (out_dir / "timing.json").write_text(json.dumps({"wall_clock_per_loop_s": timing}, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"{out_dir}: {exc}") from exc
    return out_dir / "convergence.csv"


# adaptability ----------------------------------------------------------------

@dataclass
class AdaptabilityResult:
    base: ExperimentResult
    record: Adaptation
    warm: ExperimentResult
    cold: ExperimentResult


def adapt_matrix(D: np.ndarray, record: Adaptation) -> np.ndarray:
    """Row surgery taking a base-instance selection to the transformed instance."""
    if record.kind == "add":
        D = np.asarray(D, bool)
        return np.insert(D, record.ue_index, False, axis=0)
    return selection.warm_start_remove_ue(D, record.ue_index)


def transform(cfg: ScenarioConfig, kind: str, paper_fidelity: bool = False,
              network: Network | None = None) -> tuple[ScenarioConfig, Adaptation]:
    net = build_network(cfg) if network is None else network
    rng = stream(cfg.seed, STREAM_TRANSFORM, len(cfg.adaptations))
    return instance_transform(cfg, kind, rng, paper_fidelity, net.deployment.ue_positions)


def run_adaptability(cfg: ScenarioConfig, kind: str, strategies, attempts: int | None = None,
                     paper_fidelity: bool = False, base: ExperimentResult | None = None,
                     progress=None) -> AdaptabilityResult:
    """Optimize the base instance, change one UE, then re-optimize with and without a warm start."""
    strategies = [s.upper() for s in strategies]
    if base is None:
        base = run_experiment(cfg, strategies, attempts, progress=progress)
    new_cfg, record = transform(cfg, kind, paper_fidelity, base.network)
    net = build_network(new_cfg)
    starts = {s: adapt_matrix(base[s].final_D, record) for s in strategies}
    warm = run_experiment(new_cfg, strategies, attempts, starts, net, progress)
    cold = run_experiment(new_cfg, strategies, attempts, None, net, progress)
    return AdaptabilityResult(base, record, warm, cold)


def loops_to_fraction(curve: np.ndarray, fraction: float = 0.95) -> int:
    """First RA loop (1-based) at which the curve reaches ``fraction`` of its final value."""
    curve = np.asarray(curve, float)
    return int(np.argmax(curve >= fraction * curve[-1]) + 1)
