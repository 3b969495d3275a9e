"""Experiment runner: builds the comparison matrix over problems,
algorithms, instances and trials, computes win counts and Welch confidence
levels, and writes machine-readable reports."""
from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from .core import BudgetAccountant, ScalingConfig
from .ga import GaConfig, ga_search
from .generator import GeneratorConfig
from .local_search import NashConfig, nash_search
from .model import TrainConfig
from .orchestrator import DeepOptConfig, deepopt_run
from .problems import make_instance

RAW_HEADER = "problem,instance_seed,algorithm,trial,best_score,evals_used,wall_ms"

# Canonical algorithm names accepted by --algo.
ALGORITHM_NAMES = (
    "nash-v1", "nash-v2", "nash-v3",
    "deepopt-5", "deepopt-10",
    "deepopt-discrete-5", "deepopt-discrete-10",
    "ga-50", "ga-100",
    "deepopt-ga-50", "deepopt-ga-100",
)


@dataclass
class ExperimentSpec:
    """One experiment: every algorithm sees identical instance seeds and
    budgets; trial RNG streams derive from (seed, instance, algorithm,
    trial) so reruns reproduce results exactly."""

    problem: str
    algorithms: list[str]
    instances: int = 20
    trials: int = 1
    budget: int = 500_000
    seed: int = 0
    out_dir: str | None = None
    architecture: str = "deep5"
    instance_seed_start: int = 0
    record_walltime: bool = True
    scaling_ceiling: float = 1.0
    y_prime_mode: str = "best"
    max_cycles: int | None = None
    problem_overrides: dict = field(default_factory=dict)
    nash_overrides: dict = field(default_factory=dict)
    generator_overrides: dict = field(default_factory=dict)
    train_overrides: dict = field(default_factory=dict)
    ga_overrides: dict = field(default_factory=dict)
    deepopt_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        if self.instances < 1 or self.trials < 1:
            raise ValueError("instances and trials must be positive")
        if self.budget < 1:
            raise ValueError("budget must be positive")
        unknown = [a for a in self.algorithms if a not in ALGORITHM_NAMES]
        if unknown:
            raise ValueError(f"unknown algorithm(s) {unknown}; known: {', '.join(ALGORITHM_NAMES)}")


@dataclass
class TrialResult:
    problem: str
    instance_seed: int
    algorithm: str
    trial: int
    best_score: float      # judged score: noiseless for noisy problems
    raw_best_score: float  # score as the algorithm saw it
    evals_used: int
    wall_ms: int
    improvements: list[tuple[int, float]] = field(default_factory=list)
    history: list[dict] = field(default_factory=list)


@dataclass
class PairStats:
    wins: int
    losses: int
    ties: int
    confidence: float


@dataclass
class ComparisonReport:
    algorithms: list[str]
    instances: list[int]
    means: dict[str, float]
    overall_best: dict[str, tuple[int, int]]          # algo -> (outright wins, ties)
    pairwise: dict[tuple[str, str], PairStats]


def significance(scores_a, scores_b) -> float:
    """Two-tailed Welch confidence (1 - p) that the sample means differ.
    Degenerate zero-variance identical samples report 0."""
    a = np.asarray(scores_a, dtype=np.float64)
    b = np.asarray(scores_b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise ValueError("significance needs at least 2 samples per side")
    if np.var(a) == 0.0 and np.var(b) == 0.0:
        return 0.0 if a.mean() == b.mean() else 1.0
    result = stats.ttest_ind(a, b, equal_var=False)
    return float(1.0 - result.pvalue)


def _trial_seed(root_seed: int, instance_idx: int, algo_idx: int, trial: int) -> int:
    ss = np.random.SeedSequence(entropy=root_seed, spawn_key=(instance_idx, algo_idx, trial))
    return int(ss.generate_state(1, np.uint64)[0])


def _values_list(values: np.ndarray) -> list[float]:
    return [round(float(v), 9) for v in values]


def _nash_history(result) -> list[dict]:
    return [{
        "run": r.index,
        "start_score": r.start_score,
        "best_score": r.best_score,
        "evals_used": r.evals_used,
        "start_values": _values_list(r.start_values),
        "best_values": _values_list(r.best_values),
    } for r in result.runs]


def _deepopt_history(result) -> list[dict]:
    return [{
        "cycle": c.cycle,
        "pool_min": c.pool_min,
        "pool_max": c.pool_max,
        "pool_mean": c.pool_mean,
        "train_epochs": c.train_epochs,
        "train_restarts": c.train_restarts,
        "train_stop": c.train_stop,
        "correlations": [round(float(x), 6) for x in c.correlations],
        "batch_best_score": c.batch_best_score,
        "inner_start_score": c.inner_start_score,
        "inner_best_score": c.inner_best_score,
        "inner_evals": c.inner_evals,
        "best_score": c.best_score,
        "spent": c.spent,
        "start_values": _values_list(c.inner_start_values),
        "best_values": _values_list(c.inner_best_values),
    } for c in result.cycles]


def build_deepopt_config(spec: ExperimentSpec, architecture: str, discrete: bool = False,
                         inner_search: str = "nash", population_size: int | None = None,
                         ) -> DeepOptConfig:
    nash = NashConfig(**spec.nash_overrides)
    generator = GeneratorConfig(**spec.generator_overrides)
    train = TrainConfig(**spec.train_overrides)
    ga_kwargs = dict(spec.ga_overrides)
    if population_size is not None:
        ga_kwargs["population_size"] = population_size
    ga = GaConfig(**ga_kwargs)
    return DeepOptConfig(
        inner_search=inner_search,
        architecture=architecture,
        discrete=discrete,
        y_prime_mode=spec.y_prime_mode,
        max_cycles=spec.max_cycles,
        scaling=ScalingConfig(ceiling=spec.scaling_ceiling),
        nash=nash,
        generator=generator,
        train=train,
        ga=ga,
        **spec.deepopt_overrides,
    )


def run_algorithm(name: str, problem, budget: BudgetAccountant, seed: int,
                  spec: ExperimentSpec):
    """Dispatch one trial; returns (best sample, history records)."""
    if name.startswith("nash-"):
        cfg = NashConfig(**{**spec.nash_overrides, "variant": name})
        result = nash_search(problem, cfg, budget, seed)
        return result.best, _nash_history(result)
    if name in ("ga-50", "ga-100"):
        cfg = GaConfig(**{**spec.ga_overrides, "population_size": int(name.split("-")[1])})
        result = ga_search(problem, cfg, budget, seed)
        return result.best, _nash_history(result)
    if name.startswith("deepopt-ga-"):
        population = int(name.rsplit("-", 1)[1])
        cfg = build_deepopt_config(spec, spec.architecture, inner_search="ga",
                                   population_size=population)
        result = deepopt_run(problem, cfg, budget, seed)
        return result.best, _deepopt_history(result)
    if name.startswith("deepopt-discrete-"):
        arch = f"deep{name.rsplit('-', 1)[1]}"
        cfg = build_deepopt_config(spec, arch, discrete=True)
        result = deepopt_run(problem, cfg, budget, seed)
        return result.best, _deepopt_history(result)
    if name.startswith("deepopt-"):
        arch = f"deep{name.rsplit('-', 1)[1]}"
        cfg = build_deepopt_config(spec, arch)
        result = deepopt_run(problem, cfg, budget, seed)
        return result.best, _deepopt_history(result)
    raise ValueError(f"unknown algorithm {name!r}")


def run_experiment(spec: ExperimentSpec) -> tuple[ComparisonReport, list[TrialResult]]:
    """Execute the full matrix; writes report files when out_dir is set.

    Noisy problems are judged by the noiseless accessor applied to the
    solution each algorithm reports as its best.
    """
    rows: list[TrialResult] = []
    instance_seeds = [spec.instance_seed_start + i for i in range(spec.instances)]
    for instance_idx, instance_seed in enumerate(instance_seeds):
        problem = make_instance(spec.problem, instance_seed, **spec.problem_overrides)
        for algo_idx, algo in enumerate(spec.algorithms):
            for trial in range(spec.trials):
                budget = BudgetAccountant(spec.budget)
                seed = _trial_seed(spec.seed, instance_idx, algo_idx, trial)
                started = time.perf_counter()
                best, history = run_algorithm(algo, problem, budget, seed, spec)
                wall_ms = int(round((time.perf_counter() - started) * 1000))
                rows.append(TrialResult(
                    problem=spec.problem,
                    instance_seed=instance_seed,
                    algorithm=algo,
                    trial=trial,
                    best_score=float(problem.true_score(best.values)),
                    raw_best_score=float(best.raw_score),
                    evals_used=budget.spent,
                    wall_ms=wall_ms if spec.record_walltime else 0,
                    improvements=list(budget.improvements),
                    history=history,
                ))
    rows.sort(key=lambda r: (r.instance_seed, r.algorithm, r.trial))
    report = summarize(rows)
    if spec.out_dir is not None:
        emit_reports(rows, spec.out_dir)
    return report, rows


def summarize(rows: list[TrialResult]) -> ComparisonReport:
    """Aggregate raw rows: per-algorithm means, per-instance winner counts
    (ties tracked separately), and pairwise Welch confidences."""
    algorithms = sorted({r.algorithm for r in rows})
    instances = sorted({r.instance_seed for r in rows})
    by_algo: dict[str, list[float]] = {a: [] for a in algorithms}
    per_instance: dict[int, dict[str, list[float]]] = {i: {} for i in instances}
    for r in rows:
        by_algo[r.algorithm].append(r.best_score)
        per_instance[r.instance_seed].setdefault(r.algorithm, []).append(r.best_score)

    means = {a: float(np.mean(v)) for a, v in by_algo.items()}
    overall_best = {a: (0, 0) for a in algorithms}
    instance_means: dict[int, dict[str, float]] = {}
    for i in instances:
        scores = {a: float(np.mean(v)) for a, v in per_instance[i].items()}
        instance_means[i] = scores
        top = max(scores.values())
        winners = [a for a, s in scores.items() if s == top]
        for a in winners:
            wins, ties = overall_best[a]
            overall_best[a] = (wins + 1, ties) if len(winners) == 1 else (wins, ties + 1)

    pairwise: dict[tuple[str, str], PairStats] = {}
    for a in algorithms:
        for b in algorithms:
            if a == b:
                continue
            wins = losses = ties = 0
            for i in instances:
                sa = instance_means[i].get(a)
                sb = instance_means[i].get(b)
                if sa is None or sb is None:
                    continue
                if sa > sb:
                    wins += 1
                elif sa < sb:
                    losses += 1
                else:
                    ties += 1
            if len(by_algo[a]) >= 2 and len(by_algo[b]) >= 2:
                confidence = significance(by_algo[a], by_algo[b])
            else:
                confidence = float("nan")
            pairwise[(a, b)] = PairStats(wins=wins, losses=losses, ties=ties,
                                         confidence=confidence)
    return ComparisonReport(algorithms=algorithms, instances=instances, means=means,
                            overall_best=overall_best, pairwise=pairwise)


# -- report files -----------------------------------------------------------

def _trace_name(r: TrialResult) -> str:
    return f"{r.problem}-i{r.instance_seed}-{r.algorithm}-t{r.trial}.jsonl"


def emit_reports(rows: list[TrialResult], out_dir) -> None:
    """Write raw.csv, per-trial best-so-far traces, per-run/cycle history,
    and the summary files."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "traces").mkdir(exist_ok=True)
        (out / "history").mkdir(exist_ok=True)
        lines = [RAW_HEADER]
        for r in rows:
            lines.append(f"{r.problem},{r.instance_seed},{r.algorithm},{r.trial},"
                         f"{r.best_score!r},{r.evals_used},{r.wall_ms}")
        (out / "raw.csv").write_text("\n".join(lines) + "\n")
        for r in rows:
            trace = "\n".join(json.dumps({"eval_index": i, "best_so_far": s})
                              for i, s in r.improvements)
            (out / "traces" / _trace_name(r)).write_text(trace + "\n" if trace else "")
            hist = "\n".join(json.dumps(record, sort_keys=True) for record in r.history)
            (out / "history" / _trace_name(r)).write_text(hist + "\n" if hist else "")
        write_summary(rows, out)
    except OSError as exc:
        raise IOError(f"cannot write reports under {out}: {exc}") from exc


def write_summary(rows: list[TrialResult], out: Path) -> None:
    report = summarize(rows)
    n_instances = len(report.instances)
    lines = [f"Problem: {rows[0].problem}" if rows else "Problem: (none)",
             f"Instances: {n_instances}   Trials per (algorithm, instance): "
             f"{max((r.trial for r in rows), default=0) + 1}",
             "",
             "Overall Average:"]
    for a in report.algorithms:
        lines.append(f"  {a:<22} {report.means[a]:.6g}")
    lines += ["", f"Overall Best (out of {n_instances}, ties in parentheses):"]
    for a in report.algorithms:
        wins, ties = report.overall_best[a]
        lines.append(f"  {a:<22} {wins}" + (f" ({ties})" if ties else ""))
    lines += ["", "Pairwise (row outperformed column on N instances; Welch confidence):"]
    for (a, b), ps in sorted(report.pairwise.items()):
        conf = "n/a" if np.isnan(ps.confidence) else f"{ps.confidence:.4f}"
        tie_note = f" ({ps.ties})" if ps.ties else ""
        lines.append(f"  {a} vs {b}: {ps.wins}{tie_note} of {n_instances}, confidence {conf}")
    (out / "summary.txt").write_text("\n".join(lines) + "\n")

    payload = {
        "algorithms": report.algorithms,
        "instances": report.instances,
        "means": report.means,
        "overall_best": {a: {"wins": w, "ties": t} for a, (w, t) in report.overall_best.items()},
        "pairwise": {f"{a}|{b}": dataclasses.asdict(ps) for (a, b), ps in report.pairwise.items()},
    }
    (out / "summary.json").write_text(json.dumps(payload, sort_keys=True, indent=2,
                                                 allow_nan=True) + "\n")


def load_raw(path) -> list[TrialResult]:
    """Rebuild result rows from a raw.csv (traces/history not reloaded)."""
    text = Path(path).read_text().strip().splitlines()
    if not text or text[0] != RAW_HEADER:
        raise ValueError(f"{path}: not a raw results file")
    rows = []
    for line in text[1:]:
        problem, instance_seed, algorithm, trial, best, evals, wall = line.split(",")
        rows.append(TrialResult(
            problem=problem, instance_seed=int(instance_seed), algorithm=algorithm,
            trial=int(trial), best_score=float(best), raw_best_score=float("nan"),
            evals_used=int(evals), wall_ms=int(wall)))
    return rows
