"""Benchmark CLI: run solver comparisons on ERM instances and emit CSV traces.

One trace file is written per (dataset, lambda, solver, seed) cell with the
columns ``epoch, primal, dual, gap, dual_subgrad_norm_sq, wall_time_s``,
plus a summary file recording the first epoch at which each run's gap
dropped to the tolerance.  ``apcg-bench check`` runs the diagnostic suite
(schedule properties, combination coefficients, solver equivalences, gap
bounds, rate envelope) and exits nonzero if any check fails.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import baselines, erm
from .data import DatasetMeta, parse_libsvm, synth_binary
from .errors import ConfigurationError
from .instances import diag_dominant_quadratic
from .schedule import ApcgSchedule, solve_alpha, theta_coefficients
from .solvers import (ApcgEfficientState, ApcgExplicitState, BlockSampler,
                      apcg_step_efficient, apcg_step_general, apcg_step_sc,
                      solve)

KNOWN_SOLVERS = ("apcg", "sdca", "afg", "rpcg")
CSV_HEADER = ["epoch", "primal", "dual", "gap", "dual_subgrad_norm_sq", "wall_time_s"]
SUMMARY_HEADER = ["dataset", "loss", "lambda", "solver", "seed",
                  "epochs_run", "epochs_to_tol", "final_gap"]


@dataclass
class ExperimentConfig:
    data: str | None = None
    synthetic: tuple[int, int, float, int] | None = None  # n, d, sparsity, seed
    loss: str = "smoothed_hinge"
    lambdas: list[float] = field(default_factory=lambda: [1e-4])
    gamma: float = 1.0
    solvers: list[str] = field(default_factory=lambda: ["apcg"])
    seeds: list[int] = field(default_factory=lambda: [0])
    epochs: int = 100
    tol: float | None = None
    out: str = "results"
    jobs: int = 1

    def validate(self) -> None:
        if (self.data is None) == (self.synthetic is None):
            raise ConfigurationError("exactly one of data path or synthetic spec is required")
        if self.loss not in ("smoothed_hinge", "square"):
            raise ConfigurationError(f"unknown loss {self.loss!r}")
        if not self.lambdas or any(l <= 0 for l in self.lambdas):
            raise ConfigurationError("need at least one positive lambda")
        if self.gamma <= 0:
            raise ConfigurationError("gamma must be positive")
        if not self.solvers:
            raise ConfigurationError("need at least one solver")
        for s in self.solvers:
            if s not in KNOWN_SOLVERS:
                raise ConfigurationError(f"unknown solver {s!r}; choose from {KNOWN_SOLVERS}")
        if not self.seeds:
            raise ConfigurationError("need at least one seed")
        if self.epochs < 0:
            raise ConfigurationError("epochs must be >= 0")
        if self.jobs < 1:
            raise ConfigurationError("jobs must be >= 1")


def _load_dataset(config: ExperimentConfig):
    if config.data is not None:
        A, labels = parse_libsvm(config.data)
        name = Path(config.data).name.removesuffix(".gz").removesuffix(".txt")
    else:
        n, d, sparsity, seed = config.synthetic
        A, labels = synth_binary(n, d, sparsity, seed=seed, min_nnz=1)
        name = f"synth{n}x{d}"
    return name, A, labels


def _build_problem(config: ExperimentConfig, A, labels, lam: float) -> erm.ErmProblem:
    if config.loss == "smoothed_hinge":
        return erm.ErmProblem.smoothed_hinge(A, labels, lam=lam, gamma=config.gamma)
    # square loss regresses on the +-1 labels
    return erm.ErmProblem.ridge(A, labels, lam=lam, gamma=config.gamma)


def run_solver_trace(prob: erm.ErmProblem, solver: str, epochs: int, seed: int,
                     tol: float | None) -> erm.ErmRunResult:
    """Per-epoch primal/dual/gap trace for one solver on one instance.

    Baselines are charged by the shared accounting: n coordinate steps or one
    full-gradient iteration per epoch.
    """
    if solver == "apcg":
        return erm.solve_erm(prob, epochs=epochs, seed=seed, tol=tol)

    n = prob.n
    reports = [erm.PrimalDualReport.evaluate(prob, np.zeros(n), epoch=0)]
    reached = 0 if (tol is not None and reports[0].gap <= tol) else None
    elapsed = 0.0
    epoch = 0
    x = np.zeros(n)

    if solver == "sdca":
        w_agg = np.zeros(prob.d)
        sampler = BlockSampler(n, seed)
        while epoch < epochs and reached is None:
            t0 = time.perf_counter()
            baselines.sdca_epoch(prob, x, w_agg, sampler)
            elapsed += time.perf_counter() - t0
            epoch += 1
            rep = erm.PrimalDualReport.evaluate(prob, x, epoch=epoch, wall_time_s=elapsed)
            reports.append(rep)
            if tol is not None and rep.gap <= tol:
                reached = epoch
    elif solver == "rpcg":
        ax = np.zeros(prob.d)
        sampler = BlockSampler(n, seed)
        while epoch < epochs and reached is None:
            t0 = time.perf_counter()
            baselines.rpcg_erm_epoch(prob, x, ax, sampler)
            elapsed += time.perf_counter() - t0
            epoch += 1
            rep = erm.PrimalDualReport.evaluate(prob, x, epoch=epoch, wall_time_s=elapsed)
            reports.append(rep)
            if tol is not None and rep.gap <= tol:
                reached = epoch
    elif solver == "afg":
        composite = erm.dual_composite(prob, splitting="simple")
        state = baselines.afg_start(composite)
        while epoch < epochs and reached is None:
            t0 = time.perf_counter()
            baselines.afg_step(composite, state)
            elapsed += time.perf_counter() - t0
            epoch += 1
            x = state.x
            rep = erm.PrimalDualReport.evaluate(prob, x, epoch=epoch, wall_time_s=elapsed)
            reports.append(rep)
            if tol is not None and rep.gap <= tol:
                reached = epoch
    else:
        raise ConfigurationError(f"unknown solver {solver!r}")

    return erm.ErmRunResult(x=np.asarray(x, float),
                            w=erm.primal_from_dual(prob, np.asarray(x, float)),
                            reports=reports, epochs_run=epoch, epochs_to_tol=reached)


@dataclass(frozen=True)
class CellResult:
    dataset: str
    loss: str
    lam: float
    solver: str
    seed: int
    epochs_run: int
    epochs_to_tol: int | None
    final_gap: float
    csv_path: str


def _cell_filename(dataset: str, loss: str, lam: float, solver: str, seed: int) -> str:
    return f"{dataset}_{loss}_lam{lam:g}_{solver}_s{seed}.csv"


def _write_trace(path: Path, reports) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in reports:
            writer.writerow([r.epoch, repr(r.primal), repr(r.dual), repr(r.gap),
                             repr(r.dual_subgrad_norm_sq), f"{r.wall_time_s:.6f}"])


def _run_cell(args):
    (dataset, loss_name, lam, solver, seed, config_bytes) = args
    config, A, labels = config_bytes
    prob = _build_problem(config, A, labels, lam)
    result = run_solver_trace(prob, solver, epochs=config.epochs, seed=seed,
                              tol=config.tol)
    return (dataset, loss_name, lam, solver, seed, result)


def run_experiment(config: ExperimentConfig) -> list[CellResult]:
    """Run every (lambda, solver, seed) cell and write trace + summary CSVs."""
    config.validate()
    dataset, A, labels = _load_dataset(config)
    meta = DatasetMeta.from_matrix(dataset, A)
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    cells = [(dataset, config.loss, lam, solver, seed, (config, A, labels))
             for lam in config.lambdas
             for solver in config.solvers
             for seed in config.seeds]

    if config.jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            outcomes = list(pool.map(_run_cell, cells))
    else:
        outcomes = [_run_cell(c) for c in cells]

    results: list[CellResult] = []
    for dataset, loss_name, lam, solver, seed, run in outcomes:
        fname = _cell_filename(dataset, loss_name, lam, solver, seed)
        _write_trace(out_dir / fname, run.reports)
        results.append(CellResult(
            dataset=dataset, loss=loss_name, lam=lam, solver=solver, seed=seed,
            epochs_run=run.epochs_run, epochs_to_tol=run.epochs_to_tol,
            final_gap=run.reports[-1].gap, csv_path=str(out_dir / fname)))

    with open(out_dir / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_HEADER)
        for r in results:
            writer.writerow([r.dataset, r.loss, repr(r.lam), r.solver, r.seed,
                             r.epochs_run,
                             "" if r.epochs_to_tol is None else r.epochs_to_tol,
                             repr(r.final_gap)])
    with open(out_dir / "dataset.txt", "w") as fh:
        fh.write(f"name={meta.name} n={meta.n} d={meta.d} sparsity={meta.sparsity:.6g}\n")
    return results


# ---------------------------------------------------------------------------
# Diagnostic checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check_schedule(corrupt_alpha_root: bool) -> CheckResult:
    solver = None
    if corrupt_alpha_root:
        def solver(gamma_k, mu, n):  # noqa: F811 - deliberate test hook
            return solve_alpha(gamma_k, mu, n) * (1.0 + 1e-6)
    worst = 0.0
    steps = 10_000
    for n in (1, 2, 10, 1000):
        for mu in (0.0, 1e-6, 0.01, 1.0):
            for gamma0 in (max(mu, 0.1), 1.0):
                sched = ApcgSchedule(n, mu, gamma0, _alpha_solver=solver)
                lo = math.sqrt(mu) / n
                for k in range(steps):
                    alpha, gamma_next, _ = sched.step()
                    if not (lo - 1e-15 <= alpha <= 1.0 / n + 1e-15):
                        return CheckResult("schedule", False,
                                           f"alpha escaped bounds at n={n} mu={mu} k={k}")
                    resid = abs(gamma_next - (n * alpha) ** 2) / max(gamma_next, 1e-300)
                    worst = max(worst, resid)
                    if resid > 1e-12:
                        return CheckResult("schedule", False,
                                           f"gamma != (n alpha)^2 at n={n} mu={mu} k={k}: {resid:.2e}")
                lam = np.asarray(sched.lambdas)
                bound = np.array([sched.rate_bound(k) for k in range(steps + 1)])
                if np.any(lam > bound * (1.0 + 1e-12) + 1e-300):
                    return CheckResult("schedule", False,
                                       f"lambda_k exceeded its bound at n={n} mu={mu}")
    return CheckResult("schedule", True, f"worst |gamma-(n a)^2| rel err {worst:.2e}")


def _check_theta() -> CheckResult:
    worst_sum = 0.0
    for n in (1, 3, 17):
        for mu, gamma0 in ((0.0, 1.0), (0.04, 0.5), (0.3, 0.3)):
            sched = ApcgSchedule(n, mu, gamma0)
            for k in (1, 5, 40, 200):
                theta = theta_coefficients(sched, k)
                if theta.min() < -1e-12:
                    return CheckResult("theta", False,
                                       f"negative coefficient at n={n} mu={mu} k={k}")
                worst_sum = max(worst_sum, abs(theta.sum() - 1.0))
                if abs(theta.sum() - 1.0) > 1e-12:
                    return CheckResult("theta", False,
                                       f"coefficients sum to {theta.sum()} at n={n} k={k}")
    return CheckResult("theta", True, f"worst |sum-1| = {worst_sum:.2e}")


def _check_combination_and_psihat() -> CheckResult:
    inst = diag_dominant_quadratic(8, seed=3, l1=0.05)
    problem = inst.problem
    sched = ApcgSchedule(problem.n, problem.smooth.mu, 1.0)
    state = ApcgExplicitState.start(np.zeros(problem.dim), seed=11, n_blocks=problem.n)
    zs = [state.z.copy()]
    worst_comb = 0.0
    worst_psi = -math.inf
    for k in range(1, 121):
        apcg_step_general(problem, state, sched)
        zs.append(state.z.copy())
        theta = theta_coefficients(sched, k)
        combo = sum(t * z for t, z in zip(theta, zs))
        worst_comb = max(worst_comb, float(np.max(np.abs(combo - state.x))))
        psi_hat = sum(t * problem.reg.eval_full(z, problem.partition)
                      for t, z in zip(theta, zs))
        worst_psi = max(worst_psi,
                        problem.reg.eval_full(state.x, problem.partition) - psi_hat)
    if worst_comb > 1e-8:
        return CheckResult("combination", False, f"x != sum theta z by {worst_comb:.2e}")
    if worst_psi > 1e-10:
        return CheckResult("combination", False, f"Psi(x) exceeded Psi-hat by {worst_psi:.2e}")
    return CheckResult("combination", True,
                       f"max combo err {worst_comb:.2e}, max Psi slack {worst_psi:.2e}")


def _check_equivalence() -> CheckResult:
    inst = diag_dominant_quadratic(20, seed=5, l1=0.1)
    problem = inst.problem
    mu = problem.smooth.mu
    worst = 0.0
    for seed in (0, 1):
        explicit = ApcgExplicitState.start(np.zeros(problem.dim), seed=seed,
                                           n_blocks=problem.n)
        fast = ApcgEfficientState(np.zeros(problem.dim), problem, mu, seed=seed)
        alpha = math.sqrt(mu) / problem.n
        for _ in range(500):
            apcg_step_sc(problem, explicit, alpha)
            apcg_step_efficient(problem, fast)
            worst = max(worst, float(np.max(np.abs(fast.x_full() - explicit.x))))
    passed = worst <= 1e-8
    return CheckResult("equivalence", passed, f"max |x_uv - x_explicit| = {worst:.2e}")


def _check_gap_bound() -> CheckResult:
    A, labels = synth_binary(100, 20, 0.3, seed=7, min_nnz=1)
    prob = erm.ErmProblem.smoothed_hinge(A, labels, lam=1e-2, gamma=1.0)
    run = erm.solve_erm(prob, epochs=30, seed=2)
    worst_gap = min(r.gap for r in run.reports)
    worst_slack = max(r.gap - r.subgradient_gap_bound for r in run.reports)
    if worst_gap < -1e-10:
        return CheckResult("gap-bound", False, f"negative gap {worst_gap:.2e}")
    if worst_slack > 1e-10:
        return CheckResult("gap-bound", False,
                           f"gap exceeded subgradient bound by {worst_slack:.2e}")
    return CheckResult("gap-bound", True,
                       f"min gap {worst_gap:.2e}, max bound slack {worst_slack:.2e}")


def _check_envelope() -> CheckResult:
    inst = diag_dominant_quadratic(20, seed=1, l1=0.1)
    problem = inst.problem
    # proximal-gradient oracle for F* and x*
    x = np.zeros(problem.dim)
    step = 1.0 / inst.lipschitz_full
    for _ in range(300_000):
        x = problem.reg.prox_full(x - step * problem.smooth.full_gradient(x),
                                  1.0 / step, problem.partition)
    fstar = problem.objective(x)
    gamma0 = 1.0
    r0 = problem.weighted_norm(-x)
    f0 = problem.objective(np.zeros(problem.dim))
    budget = f0 - fstar + 0.5 * gamma0 * r0 * r0
    epochs = 30
    traces = []
    for seed in range(20):
        res = solve(problem, variant="general", gamma0=gamma0,
                    max_iters=epochs * problem.n, seed=seed)
        traces.append([f for _, f in res.trace])
    mean_gap = np.mean(traces, axis=0) - fstar
    sched = ApcgSchedule(problem.n, problem.smooth.mu, gamma0)
    # skip epochs whose theoretical bound is below what doubles can resolve
    floor = 1e-12 * max(1.0, abs(fstar))
    ratio = 0.0
    for j, gap in enumerate(mean_gap):
        k = j * problem.n
        bound = sched.rate_bound(k) * budget
        if bound >= floor:
            ratio = max(ratio, gap / bound)
    passed = ratio <= 1.2
    return CheckResult("envelope", passed, f"max (F-F*)/bound = {ratio:.3f}")


def check_invariants(corrupt_alpha_root: bool = False, echo=print) -> list[CheckResult]:
    """Run the diagnostic suite at desk scale; each result prints one line."""
    checks = [
        _check_schedule(corrupt_alpha_root),
        _check_theta(),
        _check_combination_and_psihat(),
        _check_equivalence(),
        _check_gap_bound(),
        _check_envelope(),
    ]
    for c in checks:
        echo(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
    return checks


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _parse_synthetic(text: str) -> tuple[int, int, float, int]:
    parts = text.split(",")
    if len(parts) not in (3, 4):
        raise ConfigurationError("--synthetic expects n,d,sparsity[,seed]")
    n, d = int(parts[0]), int(parts[1])
    sparsity = float(parts[2])
    seed = int(parts[3]) if len(parts) == 4 else 0
    return n, d, sparsity, seed


def load_config_file(path) -> dict:
    """Flat ``key = value`` config; list keys take comma-separated values."""
    out: dict = {}
    with open(path) as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{line_no}: expected 'key = value'")
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def _config_from_args(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config:
        raw = load_config_file(args.config)
        if "data" in raw:
            cfg.data = raw["data"]
        if "synthetic" in raw:
            cfg.synthetic = _parse_synthetic(raw["synthetic"])
        if "loss" in raw:
            cfg.loss = raw["loss"]
        if "lambda" in raw:
            cfg.lambdas = [float(v) for v in raw["lambda"].split(",")]
        if "gamma" in raw:
            cfg.gamma = float(raw["gamma"])
        if "solver" in raw:
            cfg.solvers = [v.strip() for v in raw["solver"].split(",")]
        if "seed" in raw:
            cfg.seeds = [int(v) for v in raw["seed"].split(",")]
        if "epochs" in raw:
            cfg.epochs = int(raw["epochs"])
        if "tol" in raw:
            cfg.tol = float(raw["tol"])
        if "out" in raw:
            cfg.out = raw["out"]
        if "jobs" in raw:
            cfg.jobs = int(raw["jobs"])
    if args.data:
        cfg.data = args.data
        cfg.synthetic = None
    if args.synthetic:
        cfg.synthetic = _parse_synthetic(args.synthetic)
        cfg.data = None
    if args.loss:
        cfg.loss = args.loss
    if args.lambdas:
        cfg.lambdas = args.lambdas
    if args.gamma is not None:
        cfg.gamma = args.gamma
    if args.solvers:
        cfg.solvers = args.solvers
    if args.seeds:
        cfg.seeds = args.seeds
    if args.epochs is not None:
        cfg.epochs = args.epochs
    if args.tol is not None:
        cfg.tol = args.tol
    if args.out:
        cfg.out = args.out
    if args.jobs is not None:
        cfg.jobs = args.jobs
    elif os.environ.get("APCG_JOBS"):
        cfg.jobs = int(os.environ["APCG_JOBS"])
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="apcg-bench",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run solver comparison, write CSV traces")
    run.add_argument("--config", help="flat key = value config file")
    run.add_argument("--data", help="LIBSVM file (optionally .gz)")
    run.add_argument("--synthetic", help="n,d,sparsity[,seed] synthetic dataset")
    run.add_argument("--loss", choices=["smoothed_hinge", "square"])
    run.add_argument("--lambda", dest="lambdas", type=float, action="append",
                     help="regularization strength (repeatable)")
    run.add_argument("--gamma", type=float, help="loss smoothness parameter")
    run.add_argument("--solver", dest="solvers", action="append",
                     choices=list(KNOWN_SOLVERS), help="solver to run (repeatable)")
    run.add_argument("--seed", dest="seeds", type=int, action="append",
                     help="RNG seed (repeatable)")
    run.add_argument("--epochs", type=int)
    run.add_argument("--tol", type=float, help="stop a run once gap <= tol")
    run.add_argument("--out", help="output directory")
    run.add_argument("--jobs", type=int, help="parallel cells (default $APCG_JOBS or 1)")

    check = sub.add_parser("check", help="run the diagnostic invariant suite")
    check.add_argument("--corrupt-alpha-root", action="store_true",
                       help=argparse.SUPPRESS)  # negative-control hook
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check":
        checks = check_invariants(corrupt_alpha_root=args.corrupt_alpha_root)
        return 0 if all(c.passed for c in checks) else 1
    try:
        config = _config_from_args(args)
        results = run_experiment(config)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    for r in results:
        tol_part = ("gap<=tol at epoch "
                    f"{r.epochs_to_tol}" if r.epochs_to_tol is not None else
                    f"final gap {r.final_gap:.3e}")
        print(f"{r.dataset} lam={r.lam:g} {r.solver} seed={r.seed}: "
              f"{r.epochs_run} epochs, {tol_part} -> {r.csv_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
