"""Momentum schedule for the accelerated coordinate solvers.

Each iteration k uses a step coefficient ``alpha_k``, the unique root in
``(0, 1/n]`` of

    n^2 * alpha^2 = (1 - alpha) * gamma_k + alpha * mu,

followed by ``gamma_{k+1} = (1 - alpha_k) * gamma_k + alpha_k * mu`` and the
coupling weight ``beta_k = alpha_k * mu / gamma_{k+1}``.  The running product
``lambda_k = prod_{j<k} (1 - alpha_j)`` is the worst-case contraction factor
of the method and is bounded by :meth:`ApcgSchedule.rate_bound`.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigurationError


def solve_alpha(gamma_k: float, mu: float, n: int) -> float:
    """Root in (0, 1/n] of ``n^2 a^2 = (1 - a) gamma_k + a mu``.

    Uses the rationalized closed form ``2 gamma / (b + sqrt(b^2 + 4 n^2 gamma))``
    with ``b = gamma_k - mu`` when ``b >= 0`` to avoid cancellation.
    """
    if not (0.0 < gamma_k <= 1.0):
        raise ConfigurationError(f"gamma_k must lie in (0, 1], got {gamma_k}")
    if not (0.0 <= mu <= 1.0):
        raise ConfigurationError(f"mu must lie in [0, 1], got {mu}")
    n = int(n)
    if n < 1:
        raise ConfigurationError(f"block count must be >= 1, got {n}")
    b = gamma_k - mu
    disc = math.sqrt(b * b + 4.0 * n * n * gamma_k)
    if b >= 0.0:
        alpha = 2.0 * gamma_k / (b + disc)
    else:
        alpha = (-b + disc) / (2.0 * n * n)
    cap = 1.0 / n
    if alpha > cap:
        if alpha <= cap * (1.0 + 1e-12):
            alpha = cap
        else:
            raise RuntimeError(
                f"alpha root {alpha} escaped (0, 1/n]; inputs gamma={gamma_k}, mu={mu}, n={n}")
    if alpha <= 0.0:
        raise RuntimeError("alpha root collapsed to zero")
    return alpha


class ApcgSchedule:
    """Generates and records the (alpha_k, gamma_k, beta_k, lambda_k) history.

    Valid initializations require ``0 < gamma0 <= 1`` and ``gamma0 >= mu``.
    With ``gamma0 == mu > 0`` the schedule is constant:
    ``gamma_k = mu`` and ``alpha_k = beta_k = sqrt(mu)/n`` for all k.
    """

    def __init__(self, n: int, mu: float, gamma0: float, _alpha_solver=None):
        n = int(n)
        if n < 1:
            raise ConfigurationError(f"block count must be >= 1, got {n}")
        if not (0.0 <= mu <= 1.0):
            raise ConfigurationError(f"mu must lie in [0, 1], got {mu}")
        if not (0.0 < gamma0 <= 1.0) or gamma0 < mu:
            raise ConfigurationError(
                f"gamma0 must lie in (0, 1] with gamma0 >= mu; got gamma0={gamma0}, mu={mu}")
        self.n = n
        self.mu = float(mu)
        self.gamma0 = float(gamma0)
        self.alphas: list[float] = []
        self.gammas: list[float] = [float(gamma0)]
        self.betas: list[float] = []
        self.lambdas: list[float] = [1.0]
        self._solve = _alpha_solver if _alpha_solver is not None else solve_alpha

    @property
    def steps_taken(self) -> int:
        return len(self.alphas)

    def step(self) -> tuple[float, float, float]:
        """Advance one iteration; returns (alpha_k, gamma_{k+1}, beta_k)."""
        gamma_k = self.gammas[-1]
        alpha = self._solve(gamma_k, self.mu, self.n)
        gamma_next = (1.0 - alpha) * gamma_k + alpha * self.mu
        beta = alpha * self.mu / gamma_next
        self.alphas.append(alpha)
        self.gammas.append(gamma_next)
        self.betas.append(beta)
        self.lambdas.append(self.lambdas[-1] * (1.0 - alpha))
        return alpha, gamma_next, beta

    def advance(self, k: int) -> None:
        """Ensure at least k iterations of history exist."""
        while self.steps_taken < k:
            self.step()

    def rate_bound(self, k: int) -> float:
        """min{(1 - sqrt(mu)/n)^k, (2n / (2n + k sqrt(gamma0)))^2}."""
        linear = (1.0 - math.sqrt(self.mu) / self.n) ** k
        sub = (2.0 * self.n / (2.0 * self.n + k * math.sqrt(self.gamma0))) ** 2
        return min(linear, sub)


def schedule_step(sched: ApcgSchedule) -> tuple[float, float, float]:
    """Functional alias for :meth:`ApcgSchedule.step`."""
    return sched.step()


def theta_coefficients(sched: ApcgSchedule, k: int) -> np.ndarray:
    """Coefficients expressing x^{(k)} as a convex combination of z^{(0..k)}.

    The recursion starts from theta^{(1)} = (1 - n a_0, n a_0) and appends

        theta^{(k+1)}_{k+1} = n a_k,
        theta^{(k+1)}_k     = (1 - mu/n) (a_k g_k + n a_{k-1} g_{k+1}) /
                              (a_k g_k + g_{k+1}) - (1 - a_k) g_k / (n a_k),
        theta^{(k+1)}_l     = (1 - mu/n) g_{k+1} / (a_k g_k + g_{k+1}) *
                              theta^{(k)}_l              for l < k,

    writing a for alpha and g for gamma.  The coefficients are nonnegative
    and sum to one; they are diagnostic only and never used by the solvers.
    """
    if k < 0:
        raise ValueError("iteration index must be nonnegative")
    sched.advance(k)
    n, mu = sched.n, sched.mu
    theta = np.array([1.0])
    for j in range(k):
        a_j = sched.alphas[j]
        if j == 0:
            theta = np.array([1.0 - n * a_j, n * a_j])
            continue
        a_prev = sched.alphas[j - 1]
        g_j = sched.gammas[j]
        g_next = sched.gammas[j + 1]
        denom = a_j * g_j + g_next
        scale = (1.0 - mu / n) * g_next / denom
        mid = ((1.0 - mu / n) * (a_j * g_j + n * a_prev * g_next) / denom
               - (1.0 - a_j) * g_j / (n * a_j))
        theta = np.concatenate([scale * theta[:-1], [mid, n * a_j]])
    return theta
