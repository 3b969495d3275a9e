"""Command-line interface: run experiments, run the brute-force oracles on
small instances, and regenerate summaries from raw result files.

Exit codes: 0 success, 2 usage error, 3 I/O error.
Option precedence: command-line flags > config file > DEEPOPT_SEED env var.
"""
from __future__ import annotations

import argparse
import configparser
import os
import sys
from pathlib import Path

import numpy as np

from . import oracles
from .harness import ALGORITHM_NAMES, ExperimentSpec, emit_reports, load_raw, run_experiment, \
    write_summary
from .problems import PROBLEM_KINDS, make_instance, read_pgm

PRESETS = {
    "desk": {"budget": 50_000, "instances": 5, "trials": 1},
    "paper": {"budget": 500_000, "instances": 20, "trials": 1},
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deepopt",
                                     description="Model-guided stochastic optimization benchmarks")
    sub = parser.add_subparsers(dest="command")

    run = sub.add_parser("run", help="run an experiment matrix")
    run.add_argument("--problem", choices=sorted(PROBLEM_KINDS))
    run.add_argument("--algo", action="append", metavar="NAME",
                     help=f"repeatable; one of: {', '.join(ALGORITHM_NAMES)}")
    run.add_argument("--instances", type=int, metavar="N")
    run.add_argument("--trials", type=int, metavar="N")
    run.add_argument("--budget", type=int, metavar="N")
    run.add_argument("--seed", type=int, metavar="N")
    run.add_argument("--out", metavar="DIR")
    run.add_argument("--arch", choices=["deep5", "deep10"])
    run.add_argument("--preset", choices=sorted(PRESETS))
    run.add_argument("--config", metavar="FILE", help="INI config mirroring these flags")
    run.add_argument("--z", type=float, metavar="Z", help="scaling ceiling in (0, 1]")
    run.add_argument("--image", metavar="PGM", help="target image for the triangles problem")

    oracle = sub.add_parser("oracle", help="brute-force oracles for small instances")
    oracle.add_argument("--problem", required=True,
                        choices=["sines", "bandwidth", "seating", "constraints-real",
                                 "constraints-discrete", "checkerboard", "crossings"])
    oracle.add_argument("--seed", type=int, default=0)
    oracle.add_argument("--vertices", type=int, default=8)
    oracle.add_argument("--edges", type=int, default=12)
    oracle.add_argument("--groups", type=int, default=4)
    oracle.add_argument("--tables", type=int, default=2)
    oracle.add_argument("--capacity", type=int, default=3)
    oracle.add_argument("--nodes", type=int, default=4)
    oracle.add_argument("--side", type=int, default=4)

    report = sub.add_parser("report", help="regenerate summaries from raw results")
    report.add_argument("--raw", required=True, metavar="CSV")
    report.add_argument("--out", metavar="DIR")
    return parser


def _coerce(text: str):
    text = text.strip()
    lowered = text.lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    for caster in (int, float):
        try:
            return caster(text)
        except ValueError:
            continue
    return text


def load_config(path) -> dict[str, dict]:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise IOError(f"cannot read config file {path}")
    return {section: {k: _coerce(v) for k, v in parser.items(section)}
            for section in parser.sections()}


def _resolve(flag_value, file_section: dict, key: str, default=None):
    if flag_value is not None:
        return flag_value
    if key in file_section:
        return file_section[key]
    return default


def cmd_run(args) -> int:
    config = load_config(args.config) if args.config else {}
    run_section = config.get("run", {})

    preset_name = _resolve(args.preset, run_section, "preset")
    preset = PRESETS.get(preset_name, {}) if preset_name else {}

    problem = _resolve(args.problem, run_section, "problem")
    if not problem:
        raise ValueError("a problem is required (--problem or config [run] problem)")
    algos = args.algo
    if algos is None:
        raw = run_section.get("algos") or run_section.get("algo")
        if isinstance(raw, str):
            algos = [a.strip() for a in raw.replace(",", " ").split() if a.strip()]
    if not algos:
        raise ValueError("at least one --algo is required")

    seed = _resolve(args.seed, run_section, "seed")
    if seed is None:
        env_seed = os.environ.get("DEEPOPT_SEED")
        seed = int(env_seed) if env_seed else 0

    overrides = {name: dict(config.get(name, {}))
                 for name in ("nash", "generator", "train", "ga", "deepopt")}
    problem_overrides = dict(config.get("problem", {}))
    image = _resolve(args.image, run_section, "image")
    if image:
        problem_overrides["image"] = read_pgm(image)

    spec = ExperimentSpec(
        problem=problem,
        algorithms=list(algos),
        instances=int(_resolve(args.instances, run_section, "instances",
                               preset.get("instances", 20))),
        trials=int(_resolve(args.trials, run_section, "trials", preset.get("trials", 1))),
        budget=int(_resolve(args.budget, run_section, "budget", preset.get("budget", 500_000))),
        seed=int(seed),
        out_dir=_resolve(args.out, run_section, "out"),
        architecture=_resolve(args.arch, run_section, "arch", "deep5"),
        scaling_ceiling=float(_resolve(args.z, run_section, "z", 1.0)),
        problem_overrides=problem_overrides,
        nash_overrides=overrides["nash"],
        generator_overrides=overrides["generator"],
        train_overrides=overrides["train"],
        ga_overrides=overrides["ga"],
        deepopt_overrides=overrides["deepopt"],
    )
    report, rows = run_experiment(spec)
    for algo in report.algorithms:
        wins, ties = report.overall_best[algo]
        tie_note = f" ({ties} ties)" if ties else ""
        print(f"{algo:<22} mean {report.means[algo]:.6g}   best on {wins}"
              f"/{len(report.instances)} instances{tie_note}")
    if spec.out_dir:
        print(f"reports written under {spec.out_dir}")
    return 0


def _check(label: str, oracle_value, library_value) -> bool:
    match = np.isclose(oracle_value, library_value, rtol=0, atol=1e-9)
    status = "match" if match else "MISMATCH"
    print(f"{label}: oracle {oracle_value}  library {library_value}  [{status}]")
    return bool(match)


def cmd_oracle(args) -> int:
    ok = True
    if args.problem == "sines":
        p_star, value = oracles.sines_peak()
        print(f"1-D peak of p*sin(p) on [0,100]: p*={p_star:.9f}  value={value:.9f}")
        print(f"50-parameter optimum: {50 * value:.6f}")
        problem = make_instance("sines", 0)
        attained = problem.evaluate(np.full(50, p_star / 100.0))
        ok = _check("library at oracle optimum", 50 * value, attained)
    elif args.problem == "bandwidth":
        problem = make_instance("bandwidth", args.seed, vertices=args.vertices,
                                edges=args.edges)
        optimum = oracles.bandwidth_optimum(args.vertices, problem.edges.tolist())
        print(f"bandwidth optimum over {args.vertices}! labelings: {optimum}")
        best_bw = None
        for perm in _some_perms(args.vertices):
            labels = np.empty(args.vertices)
            labels[perm] = np.arange(1, args.vertices + 1)
            bw = -problem.evaluate(labels / args.vertices)
            best_bw = bw if best_bw is None else min(best_bw, bw)
        print(f"(library spot check over 200 random labelings: best found {best_bw:g})")
    elif args.problem == "seating":
        problem = make_instance("seating", args.seed, groups=args.groups,
                                tables=args.tables, capacity=args.capacity)
        score, assignment = oracles.seating_optimum(
            problem.group_sizes.tolist(), problem.preferences.tolist(),
            args.tables, args.capacity, problem.unseated_penalty)
        print(f"seating optimum (exhaustive): {score:.4f} via {assignment}")
    elif args.problem == "constraints-real":
        problem = make_instance("constraints-real", args.seed, nodes=args.nodes, edges=8)
        err, x = oracles.real_constraints_grid_optimum(args.nodes, problem.edges.tolist())
        ok = _check("total error at refined grid optimum", -err,
                    problem.evaluate(np.array(x)))
    elif args.problem == "constraints-discrete":
        problem = make_instance("constraints-discrete", args.seed, nodes=args.nodes, edges=6)
        err, assign = oracles.discrete_constraints_optimum(args.nodes, problem.edges.tolist())
        genotype = np.zeros(problem.dimension)
        for node, letter in enumerate(assign):
            genotype[node * problem.letters + letter] = 1.0
        ok = _check("discrete optimum error", -err, problem.evaluate(genotype))
    elif args.problem == "checkerboard":
        problem = make_instance("checkerboard", 0, side=args.side)
        perfect = np.indices((args.side, args.side)).sum(axis=0) % 2
        ok = _check("perfect board", oracles.checkerboard_recount(perfect),
                    problem.evaluate(perfect.reshape(-1).astype(float)))
        print(f"theoretical maximum: {problem.max_score}")
    elif args.problem == "crossings":
        square = np.array([[0.1, 0.1], [0.9, 0.1], [0.9, 0.9], [0.1, 0.9]])
        k4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        problem = make_instance("crossings", 0, nodes=4, edge_list=k4)
        ok = _check("convex K4 crossings", oracles.crossings_float_count(square, k4),
                    -problem.evaluate(square.reshape(-1)))
    return 0 if ok else 1


def _some_perms(n: int, limit: int = 200):
    rng = np.random.default_rng(0)
    for _ in range(limit):
        yield rng.permutation(n)


def cmd_report(args) -> int:
    rows = load_raw(args.raw)
    out = Path(args.out) if args.out else Path(args.raw).parent
    out.mkdir(parents=True, exist_ok=True)
    write_summary(rows, out)
    print((out / "summary.txt").read_text(), end="")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "oracle":
            return cmd_oracle(args)
        return cmd_report(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
