"""Independent reference computations used only by the tests.

Every closed form in the package is checked against one of these slow but
simple oracles: refined grid searches for 1-d proxes and conjugates, a
plain proximal-gradient loop for optimal objective values, dense SVD for
spectral norms, an exact active-set QP solve for the smoothed-hinge dual
optimum, and a direct deterministic accelerated gradient recursion.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.optimize

from apcg.erm import ErmProblem, dual_objective


def grid_minimize(fun, lo: float, hi: float, rounds: int = 4, points: int = 2001) -> float:
    """Argmin of a scalar function by repeated grid refinement.

    Final resolution is (hi - lo) * (2 / points)^rounds; with the defaults
    and a unit-width bracket that is far below 1e-9.
    """
    for _ in range(rounds):
        xs = np.linspace(lo, hi, points)
        vals = np.array([fun(x) for x in xs])
        j = int(np.argmin(vals))
        width = (hi - lo) / (points - 1)
        lo, hi = xs[j] - width, xs[j] + width
    return float(0.5 * (lo + hi))


def grid_prox(psi, center: float, weight: float, lo: float, hi: float) -> float:
    """Prox oracle: argmin over [lo, hi] of weight/2 (s-center)^2 + psi(s)."""
    def objective(s):
        v = psi(s)
        if v == math.inf:
            return math.inf
        return 0.5 * weight * (s - center) ** 2 + v
    return grid_minimize(objective, lo, hi)


def bisect_prox(psi_slope, center: float, weight: float, lo: float, hi: float,
                iters: int = 200) -> float:
    """Prox oracle via bisection on the derivative weight*(s-center)+psi'(s).

    Requires psi differentiable on (lo, hi); the minimizer of the strongly
    convex prox objective is where the derivative crosses zero, clipped to
    the bracket.
    """
    def deriv(s):
        return weight * (s - center) + psi_slope(s)
    if deriv(lo) >= 0:
        return lo
    if deriv(hi) <= 0:
        return hi
    a, b = lo, hi
    for _ in range(iters):
        m = 0.5 * (a + b)
        if deriv(m) > 0:
            b = m
        else:
            a = m
    return 0.5 * (a + b)


def grid_conjugate(phi, b: float, lo: float = -50.0, hi: float = 50.0) -> float:
    """phi*(b) = max_z { z b - phi(z) } by grid refinement."""
    zstar = grid_minimize(lambda z: -(z * b - phi(z)), lo, hi)
    return zstar * b - phi(zstar)


def grid_conjugate_vec(phi_vec, b: float, lo: float = -50.0, hi: float = 50.0,
                       rounds: int = 4, points: int = 2001) -> float:
    """Same as :func:`grid_conjugate` for a numpy-vectorized phi."""
    for _ in range(rounds):
        zs = np.linspace(lo, hi, points)
        vals = zs * b - phi_vec(zs)
        j = int(np.argmax(vals))
        width = (hi - lo) / (points - 1)
        lo, hi = zs[j] - width, zs[j] + width
    z = 0.5 * (lo + hi)
    return float(z * b - phi_vec(np.array([z]))[0])


def grid_minimize_2d(fun, box: float = 3.0, points: int = 301, rounds: int = 4
                     ) -> np.ndarray:
    """Argmin of a 2-d function over [-box, box]^2 by grid refinement."""
    lox = loy = -box
    hix = hiy = box
    for _ in range(rounds):
        xs = np.linspace(lox, hix, points)
        ys = np.linspace(loy, hiy, points)
        best = (math.inf, 0.0, 0.0)
        for x in xs:
            for y in ys:
                v = fun(np.array([x, y]))
                if v < best[0]:
                    best = (v, x, y)
        wx = (hix - lox) / (points - 1)
        wy = (hiy - loy) / (points - 1)
        lox, hix = best[1] - wx, best[1] + wx
        loy, hiy = best[2] - wy, best[2] + wy
    return np.array([0.5 * (lox + hix), 0.5 * (loy + hiy)])


def sampled_block_lipschitz(smooth, partition, samples: int = 200, seed: int = 0,
                            inflate: float = 1.5) -> np.ndarray:
    """Conservative per-block Lipschitz estimates for a black-box gradient.

    Takes the largest finite-difference ratio
    ||grad_i f(x + U_i h) - grad_i f(x)|| / ||h|| over random probes and
    inflates it; intended for assembling test problems only, the solvers
    require exact constants from the problem constructor.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    out = np.zeros(partition.n)
    for i in range(partition.n):
        sl = partition.slice(i)
        size = partition.sizes[i]
        worst = 0.0
        for _ in range(samples):
            x = rng.standard_normal(partition.total) * rng.uniform(0.1, 10.0)
            h = rng.standard_normal(size) * rng.uniform(1e-3, 10.0)
            xh = x.copy()
            xh[sl] += h
            num = np.linalg.norm(smooth.partial_gradient(xh, i)
                                 - smooth.partial_gradient(x, i))
            worst = max(worst, num / np.linalg.norm(h))
        out[i] = inflate * worst
    return out


def ista_minimize(problem, lipschitz_full: float, iters: int) -> np.ndarray:
    """Plain proximal-gradient descent; the reference for optimal values."""
    x = np.zeros(problem.dim)
    step = 1.0 / lipschitz_full
    grad = problem.smooth.full_gradient
    prox = problem.reg.prox_full
    for _ in range(iters):
        x = prox(x - step * grad(x), lipschitz_full, problem.partition)
    return x


def dense_spectral_norm(A) -> float:
    return float(np.linalg.svd(A.to_dense(), compute_uv=False)[0])


def momentum_accelerated_gradient(H: np.ndarray, b: np.ndarray, x0: np.ndarray,
                                  iters: int) -> list[np.ndarray]:
    """Deterministic accelerated gradient on 0.5 x'Hx - b'x.

    Constant-momentum recursion for strongly convex objectives:
    x+ = y - grad(y)/L and y+ = x+ + (1-sqrt(q))/(1+sqrt(q)) (x+ - x) with
    q = lmin/lmax, started at y = x0.  Returns the x iterates.
    """
    eigs = np.linalg.eigvalsh(H)
    lip, q = float(eigs[-1]), float(eigs[0] / eigs[-1])
    beta = (1.0 - math.sqrt(q)) / (1.0 + math.sqrt(q))
    x = np.array(x0, dtype=float)
    y = x.copy()
    out = [x.copy()]
    for _ in range(iters):
        x_new = y - (H @ y - b) / lip
        y = x_new + beta * (x_new - x)
        x = x_new
        out.append(x.copy())
    return out


def hinge_dual_optimum(prob: ErmProblem, tol: float = 1e-12
                       ) -> tuple[np.ndarray, float]:
    """Exact maximizer of the smoothed-hinge dual over the box [0, 1]^n.

    The dual is a concave quadratic; L-BFGS-B supplies the active set, then
    the free coordinates are solved exactly from the stationarity system and
    the KKT signs are verified, swapping coordinates between sets until the
    split stabilizes.
    """
    n = prob.n
    lam, gamma = prob.lam, prob.gamma
    G = prob.matrix.to_dense()
    gram = G.T @ G

    def neg_d(x):
        return -dual_objective(prob, x)

    def neg_d_grad(x):
        return -((prob.anchors - gamma * x) / n - gram @ x / (lam * n * n))

    res = scipy.optimize.minimize(neg_d, np.zeros(n), jac=neg_d_grad,
                                  bounds=[(0.0, 1.0)] * n, method="L-BFGS-B",
                                  options={"maxiter": 5000, "ftol": 1e-16,
                                           "gtol": 1e-12})
    x = np.asarray(res.x, dtype=float)
    at_lo = x < 1e-7
    at_hi = x > 1.0 - 1e-7
    for _ in range(60):
        x = np.where(at_lo, 0.0, np.where(at_hi, 1.0, x))
        free = ~(at_lo | at_hi)
        idx = np.flatnonzero(free)
        if idx.size:
            # stationarity on the free set: (gamma I + gram/(lam n)) x_F = rhs
            bound_term = gram[np.ix_(idx, np.flatnonzero(at_hi))] @ np.ones(int(at_hi.sum()))
            rhs = prob.anchors[idx] - bound_term / (lam * n)
            M = gamma * np.eye(idx.size) + gram[np.ix_(idx, idx)] / (lam * n)
            x[idx] = np.linalg.solve(M, rhs)
        grad = (prob.anchors - gamma * x) / n - gram @ x / (lam * n * n)
        new_lo = (x <= 0.0) & (grad < 0.0) | (x < 0.0)
        new_hi = (x >= 1.0) & (grad > 0.0) | (x > 1.0)
        interior_ok = np.all(np.abs(grad[free]) <= tol) if idx.size else True
        lo_ok = np.all(grad[at_lo] <= tol) if at_lo.any() else True
        hi_ok = np.all(grad[at_hi] >= -tol) if at_hi.any() else True
        bounds_ok = np.all(x[free] > 0.0) and np.all(x[free] < 1.0) if idx.size else True
        if interior_ok and lo_ok and hi_ok and bounds_ok and \
                np.array_equal(new_lo | at_lo, at_lo) and np.array_equal(new_hi | at_hi, at_hi):
            break
        at_lo = new_lo | (at_lo & (grad <= 0.0))
        at_hi = new_hi | (at_hi & (grad >= 0.0))
        at_lo &= ~at_hi
    x = np.clip(x, 0.0, 1.0)
    return x, dual_objective(prob, x)


def ridge_dual_optimum(prob: ErmProblem) -> tuple[np.ndarray, float]:
    """Exact maximizer of the (unconstrained) square-loss dual."""
    n = prob.n
    G = prob.matrix.to_dense()
    gram = G.T @ G
    M = prob.gamma * np.eye(n) + gram / (prob.lam * n)
    x = np.linalg.solve(M, prob.anchors)
    return x, dual_objective(prob, x)
