import math

import numpy as np
import pytest

from apcg.baselines import (BaselineConfig, afg_solve, afg_start, afg_step,
                            rpcg_erm_epoch, rpcg_solve, rpcg_step,
                            sdca_coordinate_update, sdca_epoch)
from apcg.core import (BlockPartition, CompositeProblem, SmoothOracle,
                       ZeroRegularizer)
from apcg.data import synth_binary
from apcg.erm import (ErmProblem, dual_composite, dual_objective,
                      primal_from_dual, solve_erm)
from apcg.errors import ConfigurationError
from apcg.instances import diag_dominant_quadratic
from apcg.solvers import BlockSampler, solve

import oracles


def scalar_quadratic(lipschitz):
    smooth = SmoothOracle(value=lambda x: 0.5 * lipschitz * float(x @ x),
                          full_gradient=lambda x: lipschitz * x,
                          partial_gradient=lambda x, i: lipschitz * x[i:i + 1],
                          lipschitz=np.array([lipschitz]), mu=1.0)
    return CompositeProblem(partition=BlockPartition.scalar(1), smooth=smooth,
                            reg=ZeroRegularizer())


def test_baseline_config_validation():
    BaselineConfig(method="sdca")
    with pytest.raises(ConfigurationError):
        BaselineConfig(method="newton")
    with pytest.raises(ConfigurationError):
        BaselineConfig(method="afg", afg_backtrack=1.0)
    with pytest.raises(ConfigurationError):
        BaselineConfig(method="afg", afg_initial_step=0.0)


# ---------------------------------------------------------------------------
# RPCG
# ---------------------------------------------------------------------------

def test_rpcg_stationary_point_is_fixed(lasso20):
    problem = scalar_quadratic(2.0)
    x = np.zeros(1)
    rpcg_step(problem, x, BlockSampler(1, 0))
    assert x[0] == 0.0


def test_rpcg_scalar_quadratic_one_step_exact():
    # h = -grad / L lands exactly on the minimizer
    problem = scalar_quadratic(3.0)
    x = np.array([1.7])
    rpcg_step(problem, x, BlockSampler(1, 0))
    assert x[0] == pytest.approx(0.0, abs=1e-16)


def test_rpcg_slower_than_apcg_on_ill_conditioned_dual():
    A, labels = synth_binary(100, 25, 0.3, seed=6, min_nnz=1)
    prob = ErmProblem.smoothed_hinge(A, labels, lam=1e-5, gamma=1.0)
    comp = dual_composite(prob, "relocated")
    target = 1e-6
    xstar, dstar = oracles.hinge_dual_optimum(prob)
    fstar = -dstar  # composite minimizes -D

    res = solve(comp, variant="strongly_convex", max_iters=400 * comp.n, seed=0)
    apcg_epochs = next(k // comp.n for k, f in res.trace if f - fstar <= target)
    _, trace = rpcg_solve(comp, max_iters=400 * comp.n, seed=0)
    rpcg_epochs = next((k // comp.n for k, f in trace if f - fstar <= target),
                       math.inf)
    assert apcg_epochs < rpcg_epochs


# ---------------------------------------------------------------------------
# SDCA
# ---------------------------------------------------------------------------

def test_sdca_dual_monotone_per_epoch(hinge200):
    x = np.zeros(hinge200.n)
    w = np.zeros(hinge200.d)
    sampler = BlockSampler(hinge200.n, 3)
    prev = dual_objective(hinge200, x)
    for _ in range(50):  # 10^4 coordinate steps
        sdca_epoch(hinge200, x, w, sampler)
        d = dual_objective(hinge200, x)
        assert d >= prev - 1e-12
        prev = d
    assert np.allclose(w, primal_from_dual(hinge200, x), atol=1e-10)


def test_sdca_fixed_point_at_optimum(hinge200, hinge200_optimum):
    xstar, _ = hinge200_optimum
    x = xstar.copy()
    w = primal_from_dual(hinge200, x)
    sdca_epoch(hinge200, x, w, BlockSampler(hinge200.n, 0))
    assert np.max(np.abs(x - xstar)) <= 1e-10


def test_sdca_coordinate_update_matches_grid(hinge200):
    rng = np.random.Generator(np.random.PCG64(4))
    lam_n = hinge200.lam * hinge200.n
    for _ in range(40):
        i = int(rng.integers(0, hinge200.n))
        x = rng.uniform(0, 1, hinge200.n)
        w = primal_from_dual(hinge200, x)
        idx, val = hinge200.matrix.col(i)
        margin_rest = float(val @ w[idx]) - x[i] * float(hinge200.col_norms_sq[i]) / lam_n

        def coord_neg_dual(s):
            if not (0.0 <= s <= 1.0):
                return math.inf
            # D restricted to coordinate i, dropping s-independent terms
            quad = margin_rest * s + 0.5 * s * s * float(hinge200.col_norms_sq[i]) / lam_n
            return -(s - 0.5 * hinge200.gamma * s * s) / hinge200.n + quad / hinge200.n

        want = oracles.grid_minimize(coord_neg_dual, -0.2, 1.2)
        got = sdca_coordinate_update(hinge200, float(x[i]), float(val @ w[idx]), i)
        assert got == pytest.approx(np.clip(want, 0, 1), abs=1e-6)


# ---------------------------------------------------------------------------
# AFG
# ---------------------------------------------------------------------------

def test_afg_converges_on_smooth_quadratic():
    inst = diag_dominant_quadratic(10, seed=2, l1=0.0)
    problem = inst.problem
    xstar = np.linalg.solve(inst.hessian, inst.linear)
    fstar = problem.objective(xstar)
    x, trace = afg_solve(problem, 200)
    assert trace[-1][1] - fstar < 1e-10


def test_afg_line_search_shrinks_oversized_steps():
    inst = diag_dominant_quadratic(6, seed=3, l1=0.1)
    state = afg_start(inst.problem, initial_step=1e6)
    afg_step(inst.problem, state)
    assert state.backtracks > 0
    assert state.step < 1e6 * 2


def test_afg_raises_when_backtracking_cannot_recover():
    from apcg.errors import StepSizeError
    inst = diag_dominant_quadratic(6, seed=3, l1=0.1)
    state = afg_start(inst.problem, initial_step=1e200)
    # barely-shrinking factor cannot bring 1e200 into range in 100 tries
    with pytest.raises(StepSizeError):
        afg_step(inst.problem, state, backtrack=0.999)


def test_afg_on_dual_erm_reaches_optimum(hinge200, hinge200_optimum):
    _, dstar = hinge200_optimum
    comp = dual_composite(hinge200, "simple")
    x, trace = afg_solve(comp, 400)
    assert -trace[-1][1] == pytest.approx(dstar, abs=1e-8)


# ---------------------------------------------------------------------------
# cross-solver agreement
# ---------------------------------------------------------------------------

def test_all_solvers_agree_on_dual_optimum(hinge200, hinge200_optimum):
    _, dstar = hinge200_optimum
    run = solve_erm(hinge200, epochs=200, seed=0)
    assert run.reports[-1].dual == pytest.approx(dstar, abs=1e-6)

    x = np.zeros(hinge200.n)
    w = np.zeros(hinge200.d)
    sampler = BlockSampler(hinge200.n, 0)
    for _ in range(400):
        sdca_epoch(hinge200, x, w, sampler)
    assert dual_objective(hinge200, x) == pytest.approx(dstar, abs=1e-6)

    x2 = np.zeros(hinge200.n)
    ax = np.zeros(hinge200.d)
    sampler2 = BlockSampler(hinge200.n, 0)
    for _ in range(400):
        rpcg_erm_epoch(hinge200, x2, ax, sampler2)
    assert dual_objective(hinge200, x2) == pytest.approx(dstar, abs=1e-6)

    comp = dual_composite(hinge200, "simple")
    x3, _ = afg_solve(comp, 400)
    assert dual_objective(hinge200, x3) == pytest.approx(dstar, abs=1e-6)


def test_rpcg_erm_epoch_maintains_aggregate(hinge200):
    x = np.zeros(hinge200.n)
    ax = np.zeros(hinge200.d)
    sampler = BlockSampler(hinge200.n, 5)
    for _ in range(10):
        rpcg_erm_epoch(hinge200, x, ax, sampler)
    assert np.allclose(ax, hinge200.matrix.dot(x), atol=1e-10)
