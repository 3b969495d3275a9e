"""Probe DDO configurations on the checkerboard at 50k budget."""
import numpy as np, time, sys
from deepopt.core import BudgetAccountant
from deepopt.local_search import NashConfig
from deepopt.generator import GeneratorConfig
from deepopt.orchestrator import DeepOptConfig, deepopt_run
from deepopt.problems import make_instance

problem = make_instance('checkerboard', 0)
configs = {
    "A_impstall_iters500": dict(tie=False, iters=500),
    "B_impstall_iters150": dict(tie=False, iters=150),
    "C_tiestall_iters500": dict(tie=True, iters=500),
}
for name, c in configs.items():
    t0 = time.perf_counter()
    cfg = DeepOptConfig(
        discrete=True,
        nash=NashConfig(tie_resets_stall=c["tie"]),
        generator=GeneratorConfig(max_iterations=c["iters"]),
    )
    budget = BudgetAccountant(50_000)
    res = deepopt_run(problem, cfg, budget, seed=3)
    dt = time.perf_counter() - t0
    bests = [cy.best_score for cy in res.cycles]
    batch = [cy.batch_best_score for cy in res.cycles]
    inner = [cy.inner_evals for cy in res.cycles]
    print(f"{name}: {dt:.0f}s cycles={len(res.cycles)} final={res.best.raw_score:.0f}")
    print(f"  best traj: {[int(b) for b in bests[::max(1,len(bests)//12)]]}")
    print(f"  batch_best traj: {[int(b) for b in batch[::max(1,len(batch)//12)]]}")
    print(f"  inner evals: {inner[:6]}...{inner[-3:]}  median={int(np.median(inner))}")
    sys.stdout.flush()
