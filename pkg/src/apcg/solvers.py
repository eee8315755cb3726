"""Accelerated proximal coordinate gradient solvers.

Four steppers share the same per-iteration pattern: pick a block uniformly
at random, solve a prox subproblem on that block with weight
``n * alpha_k * L_i``, and combine the three iterate vectors (x, y, z) with
momentum coefficients from the schedule.

* :func:`apcg_step_general` -- arbitrary ``gamma0 in [mu, 1]``.
* :func:`apcg_step_sc` -- the constant-coefficient form for ``mu > 0``
  (equivalent to the general stepper started at ``gamma0 = mu``).
* :func:`apcg_step_nsc` -- the ``mu = 0`` form with the
  ``alpha_k = (sqrt(a^4 + 4 a^2) - a^2) / 2`` recursion.
* :func:`apcg_step_efficient` -- the change-of-variables form for
  ``mu > 0`` that touches one block of the pair (u, v) per iteration, with
  ``x = rho^k u + v``, ``y = rho^{k+1} u + v``, ``z = -rho^k u + v``.

The efficient state stores the stabilized vector ``ubar = rho^{k+1} u``
instead of u itself (u grows like rho^{-k}); the global per-iteration
rho-scaling of untouched blocks is folded into per-block "last touched"
stamps so each step costs O(N_i) outside the gradient oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CompositeProblem, block_prox
from .errors import ConfigurationError
from .schedule import ApcgSchedule

VARIANTS = ("general", "strongly_convex", "non_strongly_convex", "efficient")


class BlockSampler:
    """Seeded uniform sampler over {0, ..., n-1}.

    Wraps a PCG64 generator and draws indices in batches; numpy's bounded
    integer sampling uses rejection, so the draws are exactly uniform.  The
    stream is a pure function of (seed, n), which makes every solver run
    reproducible bit-for-bit.
    """

    def __init__(self, n: int, seed: int, batch: int = 4096):
        if n < 1:
            raise ValueError("sampler needs n >= 1")
        self.n = int(n)
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(seed))
        self._batch = int(batch)
        self._buf = np.empty(0, dtype=np.int64)
        self._pos = 0

    def draw(self) -> int:
        if self._pos >= self._buf.size:
            self._buf = self._gen.integers(0, self.n, size=self._batch, dtype=np.int64)
            self._pos = 0
        i = self._buf[self._pos]
        self._pos += 1
        return int(i)


@dataclass
class ApcgExplicitState:
    """Full-vector iterate state (x, y, z) plus the iteration counter."""

    x: np.ndarray
    z: np.ndarray
    k: int
    sampler: BlockSampler
    y: np.ndarray | None = None

    @classmethod
    def start(cls, x0: np.ndarray, seed: int, n_blocks: int) -> "ApcgExplicitState":
        x0 = np.array(x0, dtype=float, copy=True)
        return cls(x=x0, z=x0.copy(), k=0, sampler=BlockSampler(n_blocks, seed))


def _prox_update(problem, y, center_full, i, weight):
    """Solve the block-i prox subproblem of one coordinate step.

    Returns the minimizer of
    ``weight/2 * ||s - c_i||^2 + <grad_i f(y), s> + Psi_i(s)``.
    """
    sl = problem.partition.slice(i)
    grad_i = problem.smooth.partial_gradient(y, i)
    return block_prox(problem.reg, i, center_full[sl] - grad_i / weight, weight)


def apcg_step_general(problem: CompositeProblem, state: ApcgExplicitState,
                      sched: ApcgSchedule, forced_block: int | None = None) -> ApcgExplicitState:
    """One iteration with schedule coefficients (any gamma0 in [mu, 1]).

    y is formed from (x, z), the selected block of z is replaced by the prox
    solution while the other blocks move to ``(1-beta) z + beta y``, and x
    changes only on the selected block.
    """
    k = state.k
    if sched.steps_taken <= k:
        sched.advance(k + 1)
    alpha = sched.alphas[k]
    gamma_k = sched.gammas[k]
    gamma_next = sched.gammas[k + 1]
    beta = sched.betas[k]
    n = problem.n
    mu = sched.mu

    x, z = state.x, state.z
    y = (alpha * gamma_k * z + gamma_next * x) / (alpha * gamma_k + gamma_next)
    i = state.sampler.draw() if forced_block is None else int(forced_block)
    center = (1.0 - beta) * z + beta * y if beta != 0.0 else z.copy()
    weight = n * alpha * float(problem.smooth.lipschitz[i])
    s = _prox_update(problem, y, center, i, weight)

    sl = problem.partition.slice(i)
    z_i_old = z[sl].copy()
    z_new = center
    z_new[sl] = s
    x_new = y.copy()
    x_new[sl] = y[sl] + n * alpha * (s - z_i_old) + (mu / n) * (z_i_old - y[sl])

    state.x, state.z, state.y, state.k = x_new, z_new, y, k + 1
    return state


def apcg_step_sc(problem: CompositeProblem, state: ApcgExplicitState,
                 alpha: float, forced_block: int | None = None) -> ApcgExplicitState:
    """One iteration of the constant-coefficient strongly convex form.

    Requires ``alpha = sqrt(mu)/n`` with ``mu > 0``:
    ``y = (x + alpha z) / (1 + alpha)``, block prox with weight
    ``n alpha L_i`` centered at ``(1-alpha) z + alpha y``, then
    ``x^{+} = y + n a (z^{+} - z) + n a^2 (z - y)``.
    """
    if not (alpha > 0.0):
        raise ConfigurationError("strongly convex stepper needs alpha > 0 (mu > 0)")
    n = problem.n
    x, z = state.x, state.z
    y = (x + alpha * z) / (1.0 + alpha)
    i = state.sampler.draw() if forced_block is None else int(forced_block)
    center = (1.0 - alpha) * z + alpha * y
    weight = n * alpha * float(problem.smooth.lipschitz[i])
    s = _prox_update(problem, y, center, i, weight)

    sl = problem.partition.slice(i)
    z_i_old = z[sl].copy()
    z_new = center
    z_new[sl] = s
    x_new = y.copy()
    x_new[sl] = y[sl] + n * alpha * (s - z_i_old) + n * alpha * alpha * (z_i_old - y[sl])

    state.x, state.z, state.y, state.k = x_new, z_new, y, state.k + 1
    return state


def nsc_alpha_next(alpha_prev: float) -> float:
    """Successor in the mu = 0 coefficient recursion; strictly decreasing."""
    a2 = alpha_prev * alpha_prev
    return 0.5 * (math.sqrt(a2 * a2 + 4.0 * a2) - a2)


def default_alpha_minus1(n: int) -> float:
    """Starting coefficient giving alpha_0 = 1/n for n > 1 (and 1 for n = 1)."""
    if n <= 1:
        return 1.0
    return 1.0 / math.sqrt(n * n - n)


def apcg_step_nsc(problem: CompositeProblem, state: ApcgExplicitState,
                  alpha_prev: float, forced_block: int | None = None
                  ) -> tuple[ApcgExplicitState, float]:
    """One iteration of the mu = 0 form; returns the alpha_k it used.

    ``y = (1-a) x + a z``; only the selected block of z moves (prox centered
    at z_i), and ``x^{+} = y + n a (z^{+} - z)``.
    """
    n = problem.n
    if not (0.0 < alpha_prev <= 1.0):
        raise ConfigurationError(f"alpha_prev must lie in (0, 1], got {alpha_prev}")
    alpha = nsc_alpha_next(alpha_prev)
    x, z = state.x, state.z
    y = (1.0 - alpha) * x + alpha * z
    i = state.sampler.draw() if forced_block is None else int(forced_block)
    weight = n * alpha * float(problem.smooth.lipschitz[i])
    s = _prox_update(problem, y, z, i, weight)

    sl = problem.partition.slice(i)
    z_i_old = z[sl].copy()
    z_new = z.copy()
    z_new[sl] = s
    x_new = y.copy()
    x_new[sl] = y[sl] + n * alpha * (s - z_i_old)

    state.x, state.z, state.y, state.k = x_new, z_new, y, state.k + 1
    return state, alpha


class ApcgEfficientState:
    """State of the change-of-variables form for ``mu > 0``.

    Stores ``v`` and the stabilized ``ubar^{(k)} = rho^{k+1} u^{(k)}``.  The
    rho-scaling that every untouched block of ubar receives each iteration is
    applied lazily: block i keeps the value it had when last touched at
    iteration ``stamp[i]`` and is multiplied by ``rho^(k - stamp[i])`` on
    access.  Reconstructions:

        x = ubar / rho + v,   y = ubar + v,   z = -ubar / rho + v.
    """

    def __init__(self, x0: np.ndarray, problem: CompositeProblem, mu: float, seed: int):
        if not (mu > 0.0):
            raise ConfigurationError("efficient variant requires mu > 0")
        n = problem.n
        self.alpha = math.sqrt(mu) / n
        self.rho = (1.0 - self.alpha) / (1.0 + self.alpha)
        if self.rho <= 0.0:
            raise ConfigurationError(
                "rho = (1-alpha)/(1+alpha) degenerates at mu = 1, n = 1; "
                "use an explicit variant")
        self.partition = problem.partition
        self.ubar_raw = np.zeros(problem.dim)
        self.stamps = np.zeros(n, dtype=np.int64)
        self.v = np.array(x0, dtype=float, copy=True)
        self.k = 0
        self.last_h: np.ndarray | None = None  # most recent block increment
        self.sampler = BlockSampler(n, seed)

    def ubar_block(self, i: int) -> np.ndarray:
        decay = self.rho ** (self.k - int(self.stamps[i]))
        return self.ubar_raw[self.partition.slice(i)] * decay

    def ubar_full(self) -> np.ndarray:
        gaps = (self.k - self.stamps).astype(float)
        factors = np.repeat(self.rho ** gaps, self.partition.sizes_array())
        return self.ubar_raw * factors

    def x_full(self) -> np.ndarray:
        return self.ubar_full() / self.rho + self.v

    def y_full(self) -> np.ndarray:
        return self.ubar_full() + self.v

    def z_full(self) -> np.ndarray:
        return -self.ubar_full() / self.rho + self.v


def apcg_step_efficient(problem: CompositeProblem, state: ApcgEfficientState,
                        forced_block: int | None = None) -> ApcgEfficientState:
    """One iteration touching a single block of (ubar, v).

    The prox argument is ``Psi_i(-ubar_i + v_i + h)``; afterwards
    ``ubar_i <- rho (ubar_i - (1 - n a)/2 h)`` and
    ``v_i <- v_i + (1 + n a)/2 h`` while every other block of ubar scales by
    rho through the lazy stamps.
    """
    n = problem.n
    alpha, rho = state.alpha, state.rho
    i = state.sampler.draw() if forced_block is None else int(forced_block)
    sl = problem.partition.slice(i)

    ubar_i = state.ubar_block(i)
    t0 = -ubar_i + state.v[sl]
    grad_i = problem.smooth.partial_gradient(state.y_full(), i)
    weight = n * alpha * float(problem.smooth.lipschitz[i])
    s = block_prox(problem.reg, i, t0 - grad_i / weight, weight)
    h = s - t0
    state.last_h = h

    state.ubar_raw[sl] = rho * (ubar_i - 0.5 * (1.0 - n * alpha) * h)
    state.stamps[i] = state.k + 1
    state.v[sl] += 0.5 * (1.0 + n * alpha) * h
    state.k += 1
    return state


@dataclass
class SolveResult:
    x: np.ndarray
    trace: list[tuple[int, float]]
    iterations: int
    stopped_early: bool


def solve(problem: CompositeProblem, variant: str = "general",
          gamma0: float | None = None, alpha_minus1: float | None = None,
          max_iters: int = 1000, seed: int = 0, x0: np.ndarray | None = None,
          trace_every: int | None = None, callback=None,
          tolerance: float | None = None) -> SolveResult:
    """Run the selected stepper and trace the objective.

    ``trace_every`` defaults to one epoch (n coordinate steps).  The trace
    holds (iteration, F(x)) pairs including iteration 0 and the final
    iterate; objective evaluations happen only at trace points and are not
    part of the per-iteration cost.  ``callback(k, x)`` is invoked at trace
    points; if it returns a number and ``tolerance`` is set, the run stops
    once the number drops to ``tolerance`` or below.  Runs with the same
    seed and options produce identical traces.
    """
    if variant not in VARIANTS:
        raise ConfigurationError(f"unknown variant {variant!r}; pick one of {VARIANTS}")
    n = problem.n
    mu = problem.smooth.mu
    if x0 is None:
        x0 = np.zeros(problem.dim)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (problem.dim,):
        raise ConfigurationError(f"x0 has shape {x0.shape}, expected ({problem.dim},)")
    if trace_every is None:
        trace_every = n
    if trace_every < 1:
        raise ConfigurationError("trace_every must be >= 1")

    if variant in ("strongly_convex", "efficient") and not mu > 0.0:
        raise ConfigurationError(f"variant {variant!r} requires mu > 0, problem has mu={mu}")

    eff_state = None
    sched = None
    alpha_prev = None
    alpha_sc = None
    if variant == "general":
        g0 = 1.0 if gamma0 is None else float(gamma0)
        sched = ApcgSchedule(n, mu, g0)
        state = ApcgExplicitState.start(x0, seed, n)
    elif variant == "strongly_convex":
        alpha_sc = math.sqrt(mu) / n
        state = ApcgExplicitState.start(x0, seed, n)
    elif variant == "non_strongly_convex":
        alpha_prev = default_alpha_minus1(n) if alpha_minus1 is None else float(alpha_minus1)
        if not (0.0 < alpha_prev <= 1.0):
            raise ConfigurationError(f"alpha_minus1 must lie in (0, 1], got {alpha_prev}")
        state = ApcgExplicitState.start(x0, seed, n)
    else:
        eff_state = ApcgEfficientState(x0, problem, mu, seed)
        state = None

    def current_x():
        return eff_state.x_full() if variant == "efficient" else state.x

    trace: list[tuple[int, float]] = [(0, problem.objective(x0))]
    stopped = False
    if callback is not None:
        val = callback(0, x0.copy())
        if tolerance is not None and isinstance(val, (int, float)) and val <= tolerance:
            stopped = True

    k = 0
    while k < max_iters and not stopped:
        if variant == "general":
            apcg_step_general(problem, state, sched)
        elif variant == "strongly_convex":
            apcg_step_sc(problem, state, alpha_sc)
        elif variant == "non_strongly_convex":
            _, alpha_prev = apcg_step_nsc(problem, state, alpha_prev)
        else:
            apcg_step_efficient(problem, eff_state)
        k += 1
        if k % trace_every == 0 or k == max_iters:
            xk = current_x()
            trace.append((k, problem.objective(xk)))
            if callback is not None:
                val = callback(k, xk.copy())
                if tolerance is not None and isinstance(val, (int, float)) and val <= tolerance:
                    stopped = True

    x_final = current_x().copy() if k > 0 else x0.copy()
    if trace[-1][0] != k:
        trace.append((k, problem.objective(x_final)))
    return SolveResult(x=x_final, trace=trace, iterations=k, stopped_early=stopped)
