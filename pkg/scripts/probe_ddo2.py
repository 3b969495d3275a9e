"""DDO probes after the discrete-validation fix."""
import numpy as np, time, sys
from deepopt.core import BudgetAccountant
from deepopt.local_search import NashConfig
from deepopt.generator import GeneratorConfig
from deepopt.model import TrainConfig
from deepopt.orchestrator import DeepOptConfig, deepopt_run
from deepopt.problems import make_instance

problem = make_instance('checkerboard', 0)
def run(name, budget_n, seed=3, **kw):
    t0 = time.perf_counter()
    cfg = DeepOptConfig(
        discrete=True,
        nash=NashConfig(tie_resets_stall=False),
        generator=GeneratorConfig(max_iterations=kw.get("iters", 500)),
        train=TrainConfig(correlation_drop=kw.get("drop", 0.01),
                          correlation_patience=kw.get("patience", 3)),
    )
    budget = BudgetAccountant(budget_n)
    res = deepopt_run(problem, cfg, budget, seed=seed)
    dt = time.perf_counter() - t0
    bests = [int(c.best_score) for c in res.cycles]
    batch = [int(c.batch_best_score) for c in res.cycles]
    epochs = [c.train_epochs for c in res.cycles]
    step = max(1, len(bests)//12)
    print(f"{name}: {dt:.0f}s cycles={len(res.cycles)} final={res.best.raw_score:.0f}")
    print(f"  best: {bests[::step]}")
    print(f"  batch: {batch[::step]}")
    print(f"  epochs/cycle: {epochs[::step]} median={int(np.median(epochs))}")
    sys.stdout.flush()

run("D_fixedval_50k", 50_000)
run("E_patience8_50k", 50_000, drop=0.02, patience=8)
run("F_fixedval_100k", 100_000)
