"""Regularized ERM: dual formulation, losses, specialized solver, gap reports.

The primal problem over weights w is

    P(w) = (1/n) sum_i phi_i(A_i' w) + (lam/2) ||w||^2,

with one column A_i per example.  Its dual over x in R^n is

    D(x) = (1/n) sum_i -phi*_i(-x_i) - ||A x||^2 / (2 lam n^2),

and the solvers minimize F = -D as a composite problem.  Two splittings of
F into smooth + separable parts are supported: the "simple" one keeps the
conjugates in the separable part, while the "relocated" one moves their
gamma-strong convexity into the smooth part,

    f(x)   = ||A x||^2 / (2 lam n^2) + (gamma / 2n) ||x||^2,
    Psi_i  = (1/n) (phi*_i(-x_i) - (gamma/2) x_i^2),

so that f is strongly convex and the accelerated coordinate solver attains
its linear rate.  The coordinate-wise constants are
``L_i = ||A_i||^2/(lam n^2) + gamma/n`` and
``mu = (gamma/n) / max_i L_i >= lam gamma n / (R^2 + lam gamma n)``.

:class:`ErmDualState` and :func:`apcg_erm_step` implement the specialized
iteration that maintains p = A u and q = A v alongside (u, v), so each step
costs O(nnz(A_i)): one column is read twice for the gradient and updated
twice for the aggregates.  Like the generic efficient solver, u and p are
stored in the stabilized form ubar = rho^{k+1} u, pbar = rho^{k+1} p; pbar
additionally folds its global rho-scaling into one scalar that is
renormalized into the vector long before it can underflow.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .core import (BlockPartition, CompositeProblem, SeparableRegularizer,
                   SmoothOracle)
from .data import SparseColMatrix, spectral_norm
from .errors import ConfigurationError
from .solvers import BlockSampler

DUAL_DOMAIN_ATOL = 1e-9  # rounding slack when testing box membership


class SmoothedHingeLoss:
    """Piecewise-quadratic hinge, smoothness knob gamma; labels live in A.

    phi(a) = 0 for a >= 1, 1 - a - gamma/2 for a <= 1 - gamma, and
    (1 - a)^2 / (2 gamma) in between.  The conjugate is
    phi*(b) = b + (gamma/2) b^2 on [-1, 0] and +inf elsewhere, so the dual
    variables are confined to the box [0, 1].
    """

    name = "smoothed_hinge"
    eta = None  # not strongly convex
    dual_box = (0.0, 1.0)

    def __init__(self, gamma: float = 1.0):
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        self.gamma = float(gamma)

    def anchors(self, n: int) -> np.ndarray:
        return np.ones(n)

    def phi(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        g = self.gamma
        return np.where(a >= 1.0, 0.0,
                        np.where(a <= 1.0 - g, 1.0 - a - g / 2.0,
                                 (1.0 - a) ** 2 / (2.0 * g)))

    def conj(self, b, i: int = 0) -> float:
        if -1.0 <= b <= 0.0:
            return b + 0.5 * self.gamma * b * b
        return math.inf

    def conj_neg(self, x: np.ndarray) -> np.ndarray:
        """phi*(-x_i) for dual-feasible x (caller handles the domain)."""
        x = np.asarray(x, dtype=float)
        return -x + 0.5 * self.gamma * x * x


class SquareLoss:
    """phi_i(a) = (a - b_i)^2 / (2 gamma): 1/gamma-smooth, 1/gamma-strongly convex.

    The conjugate phi*_i(u) = b_i u + (gamma/2) u^2 is finite everywhere, so
    the dual is unconstrained.  This is ridge regression when gamma = 1.
    """

    name = "square"
    dual_box = None

    def __init__(self, targets: np.ndarray, gamma: float = 1.0):
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        self.gamma = float(gamma)
        self.eta = float(gamma)
        self.targets = np.asarray(targets, dtype=float)

    def anchors(self, n: int) -> np.ndarray:
        if self.targets.shape != (n,):
            raise ValueError(f"need {n} targets, have {self.targets.shape}")
        return self.targets

    def phi(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        return (a - self.targets) ** 2 / (2.0 * self.gamma)

    def conj(self, b, i: int = 0) -> float:
        return float(self.targets[i]) * b + 0.5 * self.gamma * b * b

    def conj_neg(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return -self.targets * x + 0.5 * self.gamma * x * x


@dataclass(eq=False)
class ErmProblem:
    """Data matrix plus loss and regularization strength.

    For the smoothed hinge the labels are already multiplied into the
    columns (use :meth:`smoothed_hinge`), so every margin is b_i A_i' w.
    """

    matrix: SparseColMatrix
    loss: SmoothedHingeLoss | SquareLoss
    lam: float
    col_norms_sq: np.ndarray = field(init=False, repr=False)
    anchors: np.ndarray = field(init=False, repr=False)
    R: float = field(init=False)
    _spectral: float | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        self.col_norms_sq = self.matrix.col_norms_sq()
        if not np.all(np.isfinite(self.col_norms_sq)):
            raise ValueError("matrix columns must be finite")
        self.R = math.sqrt(float(self.col_norms_sq.max())) if self.n else 0.0
        self.anchors = self.loss.anchors(self.n)

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def d(self) -> int:
        return self.matrix.d

    @property
    def gamma(self) -> float:
        return self.loss.gamma

    def spectral_norm(self) -> float:
        if self._spectral is None:
            self._spectral = spectral_norm(self.matrix)
        return self._spectral

    @classmethod
    def smoothed_hinge(cls, A: SparseColMatrix, labels: np.ndarray,
                       lam: float, gamma: float = 1.0) -> "ErmProblem":
        labels = np.asarray(labels, dtype=float)
        if labels.shape != (A.n,):
            raise ValueError("need one label per column")
        if not np.all(np.isin(labels, (1.0, -1.0))):
            raise ValueError("labels must be +1 or -1")
        return cls(matrix=A.scale_columns(labels), loss=SmoothedHingeLoss(gamma),
                   lam=lam)

    @classmethod
    def ridge(cls, A: SparseColMatrix, targets: np.ndarray, lam: float,
              gamma: float = 1.0) -> "ErmProblem":
        return cls(matrix=A, loss=SquareLoss(np.asarray(targets, float), gamma),
                   lam=lam)


def erm_constants(prob: ErmProblem) -> tuple[np.ndarray, float]:
    """Per-coordinate Lipschitz constants and the weighted-norm convexity mu.

    L_i = ||A_i||^2 / (lam n^2) + gamma / n; mu = (gamma/n) / max L_i, which
    is at least lam*gamma*n / (R^2 + lam*gamma*n).
    """
    n = prob.n
    L = prob.col_norms_sq / (prob.lam * n * n) + prob.gamma / n
    mu = (prob.gamma / n) / float(L.max())
    return L, mu


def _dual_feasible(prob: ErmProblem, x: np.ndarray,
                   atol: float = DUAL_DOMAIN_ATOL) -> np.ndarray | None:
    """Clipped copy of x if within the conjugate domain (up to atol), else None."""
    box = prob.loss.dual_box
    if box is None:
        return np.asarray(x, dtype=float)
    lo, hi = box
    x = np.asarray(x, dtype=float)
    if np.any(x < lo - atol) or np.any(x > hi + atol):
        return None
    return np.clip(x, lo, hi)


def dual_objective(prob: ErmProblem, x: np.ndarray) -> float:
    """D(x); returns -inf when x leaves the conjugate domain."""
    xc = _dual_feasible(prob, x)
    if xc is None:
        return -math.inf
    ax = prob.matrix.dot(xc)
    n = prob.n
    return (-float(np.sum(prob.loss.conj_neg(xc))) / n
            - float(ax @ ax) / (2.0 * prob.lam * n * n))


def primal_objective(prob: ErmProblem, w: np.ndarray) -> float:
    margins = prob.matrix.tdot(np.asarray(w, dtype=float))
    return (float(np.sum(prob.loss.phi(margins))) / prob.n
            + 0.5 * prob.lam * float(np.dot(w, w)))


def primal_from_dual(prob: ErmProblem, x: np.ndarray) -> np.ndarray:
    """w = A x / (lam n), the gradient of the conjugate regularizer."""
    return prob.matrix.dot(np.asarray(x, dtype=float)) / (prob.lam * prob.n)


def dual_subgradient(prob: ErmProblem, x: np.ndarray
                     ) -> tuple[np.ndarray, np.ndarray, float]:
    """(a, w, ||D'(x)||^2) with a_i in the conjugate subdifferential at -x_i.

    In the interior of the domain the subdifferential is the singleton
    a_i = anchor_i - gamma x_i (anchor 1 for the hinge, b_i for square
    loss).  Exactly on a box edge it is a half-line, and the margin A_i' w
    is projected onto it, which makes the selection vanish at constrained
    optima.  The squared norm is (1/n^2) sum_i (A_i' w - a_i)^2.
    """
    xc = _dual_feasible(prob, x)
    if xc is None:
        raise ValueError("dual point outside the conjugate domain")
    a = prob.anchors - prob.gamma * xc
    w = primal_from_dual(prob, xc)
    margins = prob.matrix.tdot(w)
    box = prob.loss.dual_box
    if box is not None:
        # at x_i = lo the set is [a_i, inf); at x_i = hi it is (-inf, a_i]
        a = np.where(xc == box[0], np.maximum(a, margins), a)
        a = np.where(xc == box[1], np.minimum(a, margins), a)
    diffs = margins - a
    norm_sq = float(diffs @ diffs) / (prob.n * prob.n)
    return a, w, norm_sq


@dataclass(frozen=True)
class PrimalDualReport:
    """One row of trace output, evaluated at an epoch boundary."""

    epoch: int
    primal: float
    dual: float
    gap: float
    dual_subgrad_norm_sq: float
    subgradient_gap_bound: float
    wall_time_s: float = 0.0

    @classmethod
    def evaluate(cls, prob: ErmProblem, x: np.ndarray, epoch: int,
                 wall_time_s: float = 0.0) -> "PrimalDualReport":
        _, w, norm_sq = dual_subgradient(prob, x)
        primal = primal_objective(prob, w)
        dual = dual_objective(prob, x)
        return cls(epoch=epoch, primal=primal, dual=dual, gap=primal - dual,
                   dual_subgrad_norm_sq=norm_sq,
                   subgradient_gap_bound=prob.n / (2.0 * prob.gamma) * norm_sq,
                   wall_time_s=wall_time_s)


# ---------------------------------------------------------------------------
# Dual problem as a generic composite instance (both splittings)
# ---------------------------------------------------------------------------

class RelocatedConjugatePenalty(SeparableRegularizer):
    """Psi_i(s) = (1/n)(phi*_i(-s) - (gamma/2) s^2): linear inside the domain.

    For the smoothed hinge this is -s/n on [0, 1]; for square loss -b_i s / n
    everywhere.  The prox shifts the center by a_i / (n * weight) and
    projects onto the box if there is one.
    """

    def __init__(self, anchors: np.ndarray, n: int, box):
        self.anchors = np.asarray(anchors, dtype=float)
        self.n = int(n)
        self.box = box

    def _project(self, s):
        if self.box is None:
            return s
        return np.clip(s, self.box[0], self.box[1])

    def _in_box(self, s) -> bool:
        if self.box is None:
            return True
        lo, hi = self.box
        return bool(np.all(s >= lo - DUAL_DOMAIN_ATOL)
                    and np.all(s <= hi + DUAL_DOMAIN_ATOL))

    def eval_block(self, i, xi):
        if not self._in_box(xi):
            return math.inf
        s = float(self._project(np.asarray(xi, dtype=float))[0])
        return -self.anchors[i] * s / self.n

    def prox_block(self, i, center, weight):
        s = center + self.anchors[i] / (self.n * weight)
        return np.atleast_1d(self._project(s))

    def eval_full(self, x, partition):
        if not self._in_box(x):
            return math.inf
        xc = self._project(x)
        return -float(self.anchors @ xc) / self.n

    def prox_full(self, center, weight, partition):
        return self._project(center + self.anchors / (self.n * weight))


class ConjugatePenalty(SeparableRegularizer):
    """Psi_i(s) = (1/n) phi*_i(-s) = (1/n)(-a_i s + (gamma/2) s^2) on the domain."""

    def __init__(self, anchors: np.ndarray, gamma: float, n: int, box):
        self.anchors = np.asarray(anchors, dtype=float)
        self.gamma = float(gamma)
        self.n = int(n)
        self.box = box

    def _project(self, s):
        if self.box is None:
            return s
        return np.clip(s, self.box[0], self.box[1])

    def _in_box(self, s) -> bool:
        if self.box is None:
            return True
        lo, hi = self.box
        return bool(np.all(s >= lo - DUAL_DOMAIN_ATOL)
                    and np.all(s <= hi + DUAL_DOMAIN_ATOL))

    def eval_block(self, i, xi):
        if not self._in_box(xi):
            return math.inf
        s = float(self._project(np.asarray(xi, dtype=float))[0])
        return (-self.anchors[i] * s + 0.5 * self.gamma * s * s) / self.n

    def prox_block(self, i, center, weight):
        s = (weight * center + self.anchors[i] / self.n) / (weight + self.gamma / self.n)
        return np.atleast_1d(self._project(s))

    def eval_full(self, x, partition):
        if not self._in_box(x):
            return math.inf
        xc = self._project(x)
        return float(-self.anchors @ xc + 0.5 * self.gamma * (xc @ xc)) / self.n

    def prox_full(self, center, weight, partition):
        s = (weight * center + self.anchors / self.n) / (weight + self.gamma / self.n)
        return self._project(s)


def dual_composite(prob: ErmProblem, splitting: str = "relocated") -> CompositeProblem:
    """The dual of the ERM problem as a generic composite minimization.

    ``relocated`` puts the conjugates' strong convexity into the smooth part
    (mu > 0, what the coordinate solvers want); ``simple`` keeps f as the
    quadratic coupling only (mu = 0, what full-gradient methods use).
    """
    if splitting not in ("relocated", "simple"):
        raise ConfigurationError(f"unknown splitting {splitting!r}")
    relocated = splitting == "relocated"
    lam, n, gamma = prob.lam, prob.n, prob.gamma
    A = prob.matrix
    scale = 1.0 / (lam * n * n)

    def value(x):
        ax = A.dot(x)
        v = 0.5 * scale * float(ax @ ax)
        if relocated:
            v += 0.5 * gamma / n * float(x @ x)
        return v

    def full_gradient(x):
        g = A.tdot(A.dot(x)) * scale
        if relocated:
            g = g + (gamma / n) * x
        return g

    def partial_gradient(x, i):
        ax = A.dot(x)
        idx, val = A.col(i)
        g = float(val @ ax[idx]) * scale
        if relocated:
            g += (gamma / n) * x[i]
        return np.array([g])

    if relocated:
        L, mu = erm_constants(prob)
        reg = RelocatedConjugatePenalty(prob.anchors, n, prob.loss.dual_box)
    else:
        L = prob.col_norms_sq * scale
        mu = 0.0
        if np.any(L <= 0.0):
            raise ConfigurationError(
                "simple splitting needs nonzero columns; use the relocated one")
        reg = ConjugatePenalty(prob.anchors, gamma, n, prob.loss.dual_box)

    smooth = SmoothOracle(value=value, full_gradient=full_gradient,
                          partial_gradient=partial_gradient, lipschitz=L, mu=mu)
    return CompositeProblem(partition=BlockPartition.scalar(n), smooth=smooth,
                            reg=reg)


# ---------------------------------------------------------------------------
# Specialized solver state (one column of work per iteration)
# ---------------------------------------------------------------------------

class ErmDualState:
    """Iterate state of the structure-exploiting dual solver.

    Maintains (ubar, v) in R^n and the aggregates pbar = A ubar, q = A v in
    R^d.  ubar's once-per-iteration rho-scaling uses per-coordinate stamps;
    pbar's uses one scalar multiplier folded back into the vector whenever
    it threatens to underflow.
    """

    def __init__(self, prob: ErmProblem, x0: np.ndarray | None = None, seed: int = 0):
        n = prob.n
        L, mu = erm_constants(prob)
        self.prob = prob
        self.mu = mu
        self.alpha = math.sqrt(mu) / n
        self.rho = (1.0 - self.alpha) / (1.0 + self.alpha)
        if self.rho <= 0.0:
            raise ConfigurationError("degenerate rho; problem is a single perfectly "
                                     "conditioned coordinate")
        if x0 is None:
            x0 = np.zeros(n)
        x0 = np.asarray(x0, dtype=float)
        if _dual_feasible(prob, x0) is None:
            raise ConfigurationError("x0 must lie in the conjugate domain")
        self.v = x0.copy()
        self.ubar_raw = np.zeros(n)
        self.stamps = np.zeros(n, dtype=np.int64)
        self.pbar_base = np.zeros(prob.d)
        self.pbar_scale = 1.0
        self.q = prob.matrix.dot(x0)
        self.k = 0
        self.last_h = 0.0  # increment of the most recent step, for diagnostics
        self.sampler = BlockSampler(n, seed)
        # hot-loop constants
        self.quad_weight = self.alpha * (prob.col_norms_sq + prob.lam * prob.gamma * n) / (prob.lam * n)
        self.grad_scale = 1.0 / (prob.lam * n * n)
        self.anchor_over_n = prob.anchors / n
        self.is_box = prob.loss.dual_box is not None
        self.gamma_over_n = prob.gamma / n
        self.half_minus = 0.5 * (1.0 - n * self.alpha)
        self.half_plus = 0.5 * (1.0 + n * self.alpha)

    def ubar_effective(self) -> np.ndarray:
        return self.ubar_raw * self.rho ** (self.k - self.stamps).astype(float)

    def x(self) -> np.ndarray:
        return self.ubar_effective() / self.rho + self.v

    def w(self) -> np.ndarray:
        pbar = self.pbar_base * self.pbar_scale
        return (pbar / self.rho + self.q) / (self.prob.lam * self.prob.n)

    def aggregates(self) -> tuple[np.ndarray, np.ndarray]:
        return self.pbar_base * self.pbar_scale, self.q.copy()

    def recomputed_aggregates(self) -> tuple[np.ndarray, np.ndarray]:
        """(A ubar, A v) from scratch, for drift checks against aggregates()."""
        return self.prob.matrix.dot(self.ubar_effective()), self.prob.matrix.dot(self.v)

    def check_consistency(self, tol: float = 1e-8) -> None:
        pbar, q = self.aggregates()
        p_ref, q_ref = self.recomputed_aggregates()
        p_err = np.linalg.norm(pbar - p_ref) / max(1.0, np.linalg.norm(p_ref))
        q_err = np.linalg.norm(q - q_ref) / max(1.0, np.linalg.norm(q_ref))
        if p_err > tol or q_err > tol:
            raise RuntimeError(f"aggregate drift p={p_err:.3e} q={q_err:.3e} exceeds {tol}")


def apcg_erm_step(prob: ErmProblem, state: ErmDualState,
                  forced_block: int | None = None) -> ErmDualState:
    """One coordinate step of the dual solver; O(nnz(A_i)) work.

    grad_i = (A_i' pbar + A_i' q) / (lam n^2) + (gamma/n)(ubar_i + v_i);
    the 1-d subproblem min_h { c/2 h^2 + grad_i h + Psi_i(t0 + h) } with
    c = alpha (||A_i||^2 + lam gamma n) / (lam n) and t0 = -ubar_i + v_i is
    solved in closed form (a clipped affine expression), then (ubar, v) and
    (pbar, q) are updated on coordinate i and column A_i only.
    """
    m = prob.matrix
    i = state.sampler.draw() if forced_block is None else int(forced_block)
    lo, hi = m.indptr[i], m.indptr[i + 1]
    idx = m.indices[lo:hi]
    val = m.values[lo:hi]

    rho = state.rho
    ub_i = float(state.ubar_raw[i]) * rho ** float(state.k - state.stamps[i])
    v_i = float(state.v[i])
    a_dot = float(val @ state.pbar_base[idx]) * state.pbar_scale + float(val @ state.q[idx])
    grad = a_dot * state.grad_scale + state.gamma_over_n * (ub_i + v_i)

    t0 = -ub_i + v_i
    s = t0 + (float(state.anchor_over_n[i]) - grad) / float(state.quad_weight[i])
    if state.is_box:
        s = 0.0 if s < 0.0 else (1.0 if s > 1.0 else s)
    h = s - t0
    state.last_h = h

    state.ubar_raw[i] = rho * (ub_i - state.half_minus * h)
    state.stamps[i] = state.k + 1
    state.v[i] = v_i + state.half_plus * h
    if h != 0.0:
        state.pbar_base[idx] -= (state.half_minus * h / state.pbar_scale) * val
        state.q[idx] += (state.half_plus * h) * val
    state.pbar_scale *= rho
    if state.pbar_scale < 1e-120:
        state.pbar_base *= state.pbar_scale
        state.pbar_scale = 1.0
    state.k += 1
    return state


@dataclass
class ErmRunResult:
    x: np.ndarray
    w: np.ndarray
    reports: list[PrimalDualReport]
    epochs_run: int
    epochs_to_tol: int | None


def solve_erm(prob: ErmProblem, epochs: int, seed: int = 0,
              x0: np.ndarray | None = None, tol: float | None = None) -> ErmRunResult:
    """Run the dual coordinate solver, reporting once per epoch (n steps).

    The trace starts with the epoch-0 row at the initial point and stops
    early once the primal-dual gap reaches ``tol``.  Wall time accumulates
    stepping only, not report evaluation.
    """
    state = ErmDualState(prob, x0=x0, seed=seed)
    n = prob.n
    reports = [PrimalDualReport.evaluate(prob, state.x(), epoch=0)]
    reached = 0 if (tol is not None and reports[0].gap <= tol) else None
    elapsed = 0.0
    epoch = 0
    while epoch < epochs and reached is None:
        t0 = time.perf_counter()
        for _ in range(n):
            apcg_erm_step(prob, state)
        elapsed += time.perf_counter() - t0
        epoch += 1
        rep = PrimalDualReport.evaluate(prob, state.x(), epoch=epoch, wall_time_s=elapsed)
        reports.append(rep)
        if tol is not None and rep.gap <= tol:
            reached = epoch
    x = state.x()
    return ErmRunResult(x=x, w=primal_from_dual(prob, x), reports=reports,
                        epochs_run=epoch, epochs_to_tol=reached)


# ---------------------------------------------------------------------------
# Certification: full prox step and gap bounds
# ---------------------------------------------------------------------------

def full_prox_step(prob: ErmProblem, x: np.ndarray) -> np.ndarray:
    """One proximal full-gradient step T(x) under the simple splitting.

    T(x) = argmin { <grad f(x), y> + theta/2 ||y - x||^2 + Psi(y) } with
    theta = ||A||_2^2 / (lam n^2); separable, so each coordinate solves a
    1-d quadratic: y_i = (theta x_i + a_i/n - grad_i) / (theta + gamma/n),
    projected onto the conjugate domain.
    """
    x = np.asarray(x, dtype=float)
    n = prob.n
    theta = prob.spectral_norm() ** 2 / (prob.lam * n * n)
    grad = prob.matrix.tdot(prob.matrix.dot(x)) / (prob.lam * n * n)
    y = (theta * x + prob.anchors / n - grad) / (theta + prob.gamma / n)
    if prob.loss.dual_box is not None:
        y = np.clip(y, *prob.loss.dual_box)
    return y


def full_prox_gap_bound(prob: ErmProblem, x: np.ndarray, dstar: float) -> float:
    """Bound on P(omega(T(x))) - D(T(x)): (4 ||A||^2 / (lam gamma n)) (D* - D(x))."""
    coef = 4.0 * prob.spectral_norm() ** 2 / (prob.lam * prob.gamma * prob.n)
    return coef * (dstar - dual_objective(prob, x))


def gap_by_dual_bound(prob: ErmProblem, x: np.ndarray, dstar: float) -> float:
    """Strongly convex losses only: gap at (omega(x), x) is bounded by
    (lam eta n + ||A||^2) / (lam gamma n) * (D* - D(x))."""
    eta = prob.loss.eta
    if eta is None:
        raise ConfigurationError(
            "gap_by_dual_bound needs a strongly convex loss (square loss)")
    coef = (prob.lam * eta * prob.n + prob.spectral_norm() ** 2) / (
        prob.lam * prob.gamma * prob.n)
    return coef * (dstar - dual_objective(prob, x))


def complexity_estimate(n: int, R: float, lam: float, gamma: float,
                        epsilon: float, C: float) -> int:
    """Iterations sufficient for an expected dual gap epsilon:
    ceil((n + sqrt(n R^2 / (lam gamma))) * log(C / epsilon))."""
    if min(n, R, lam, gamma, epsilon, C) <= 0:
        raise ValueError("all arguments must be positive")
    if epsilon >= C:
        return 0
    return math.ceil((n + math.sqrt(n * R * R / (lam * gamma))) * math.log(C / epsilon))
