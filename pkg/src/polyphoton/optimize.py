"""Derivative-free optimizers used by the seesaw training loop.

Three pieces: a hand-rolled Nelder-Mead simplex (the observable-weight
step), a ridge closed-form solver that serves as its oracle, and a
Gaussian-process proposal rule with expected improvement for the circuit
phases.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import norm, qmc

from .exceptions import InvalidHistoryError, OptimizationError

__all__ = [
    "NelderMeadResult",
    "nelder_mead",
    "ridge_solve",
    "GpProposal",
    "gp_propose",
    "gp_propose_full",
]


@dataclass(frozen=True)
class NelderMeadResult:
    x: np.ndarray
    fun: float
    iterations: int
    evaluations: int
    converged: bool


def _checked(objective: Callable[[np.ndarray], float], x: np.ndarray) -> float:
    value = float(objective(x))
    if not np.isfinite(value):
        raise OptimizationError(f"objective diverged: f({x}) = {value}")
    return value


def nelder_mead(
    objective: Callable[[np.ndarray], float],
    x0: Sequence[float],
    tol: float = 1e-8,
    max_iter: int | None = None,
    restarts: int = 0,
) -> NelderMeadResult:
    """Minimize with the classic simplex method.

    Coefficients: reflection 1, expansion 2, contraction 0.5, shrink 0.5.
    A pass terminates when the simplex function-value spread drops below
    ``tol`` or after ``max_iter`` iterations (default 200 per dimension).
    ``restarts`` extra passes rebuild a fresh simplex at the current best
    point, which unsticks degenerate simplices in higher dimensions.

    Raises:
        OptimizationError: the objective returned a non-finite value.
    """
    x = np.asarray(x0, dtype=float).copy()
    if x.ndim != 1 or x.size == 0:
        raise OptimizationError(f"x0 must be a non-empty 1-d vector, got shape {x.shape}")
    if max_iter is None:
        max_iter = 200 * x.size

    total_evals = 0
    total_iters = 0
    best_f = None
    converged = False
    for _ in range(restarts + 1):
        result = _nm_pass(objective, x, tol, max_iter)
        total_evals += result.evaluations
        total_iters += result.iterations
        converged = result.converged
        if best_f is not None and best_f - result.fun < 1e-15:
            x, best_f = result.x, min(best_f, result.fun)
            break
        x, best_f = result.x, result.fun
    return NelderMeadResult(
        x=x, fun=float(best_f), iterations=total_iters,
        evaluations=total_evals, converged=converged,
    )


def _nm_pass(
    objective: Callable[[np.ndarray], float],
    x0: np.ndarray,
    tol: float,
    max_iter: int,
) -> NelderMeadResult:
    alpha, gamma, rho, sigma = 1.0, 2.0, 0.5, 0.5
    d = x0.size

    simplex = [x0.copy()]
    for i in range(d):
        vertex = x0.copy()
        vertex[i] += 0.05 * vertex[i] if vertex[i] != 0.0 else 0.25
        simplex.append(vertex)
    values = [_checked(objective, v) for v in simplex]
    evals = d + 1

    iters = 0
    converged = False
    while iters < max_iter:
        order = np.argsort(values, kind="stable")
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        if values[-1] - values[0] < tol:
            converged = True
            break
        iters += 1

        centroid = np.mean(simplex[:-1], axis=0)
        reflected = centroid + alpha * (centroid - simplex[-1])
        f_r = _checked(objective, reflected)
        evals += 1

        if f_r < values[0]:
            expanded = centroid + gamma * (reflected - centroid)
            f_e = _checked(objective, expanded)
            evals += 1
            if f_e < f_r:
                simplex[-1], values[-1] = expanded, f_e
            else:
                simplex[-1], values[-1] = reflected, f_r
            continue
        if f_r < values[-2]:
            simplex[-1], values[-1] = reflected, f_r
            continue

        if f_r < values[-1]:
            contracted = centroid + rho * (reflected - centroid)
            f_c = _checked(objective, contracted)
            evals += 1
            if f_c <= f_r:
                simplex[-1], values[-1] = contracted, f_c
                continue
        else:
            contracted = centroid + rho * (simplex[-1] - centroid)
            f_c = _checked(objective, contracted)
            evals += 1
            if f_c < values[-1]:
                simplex[-1], values[-1] = contracted, f_c
                continue

        for i in range(1, d + 1):
            simplex[i] = simplex[0] + sigma * (simplex[i] - simplex[0])
            values[i] = _checked(objective, simplex[i])
        evals += d

    best = int(np.argmin(values))
    return NelderMeadResult(
        x=simplex[best], fun=values[best], iterations=iters,
        evaluations=evals, converged=converged,
    )


def ridge_solve(p: np.ndarray, y: np.ndarray, alpha: float) -> np.ndarray:
    """Closed-form minimizer of (1/2N)||y - P w||^2 + alpha w.w.

    Solves (P^T P / N + 2 alpha I) w = P^T y / N.

    Raises:
        OptimizationError: alpha = 0 with rank-deficient P, or a singular
            normal-equation system.
    """
    mat = np.asarray(p, dtype=float)
    target = np.asarray(y, dtype=float)
    if mat.ndim != 2 or target.shape != (mat.shape[0],):
        raise OptimizationError(
            f"incompatible shapes: P {mat.shape}, y {target.shape}"
        )
    n, k = mat.shape
    if n == 0:
        raise OptimizationError("cannot solve with zero data points")
    if alpha < 0:
        raise OptimizationError(f"alpha must be >= 0, got {alpha}")
    if alpha == 0 and np.linalg.matrix_rank(mat) < k:
        raise OptimizationError(
            "rank-deficient probability matrix with alpha = 0 has no unique minimizer"
        )
    gram = mat.T @ mat / n + 2.0 * alpha * np.eye(k)
    rhs = mat.T @ target / n
    try:
        return np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError as exc:
        raise OptimizationError(f"normal equations are singular: {exc}") from exc


@dataclass(frozen=True)
class GpProposal:
    """Proposal with the surrogate's scoring exposed for inspection."""

    theta: np.ndarray
    phase: str  # "init" or "surrogate"
    candidates: np.ndarray | None = None
    expected_improvement: np.ndarray | None = None
    chosen_index: int | None = None


def _validate_history(
    history: Sequence[tuple[np.ndarray, float]], d: int
) -> tuple[np.ndarray, np.ndarray]:
    thetas = []
    losses = []
    for i, (theta, value) in enumerate(history):
        arr = np.asarray(theta, dtype=float)
        if arr.shape != (d,):
            raise InvalidHistoryError(
                f"history entry {i} has shape {arr.shape}, expected ({d},)"
            )
        if not np.isfinite(value):
            raise InvalidHistoryError(f"history entry {i} has non-finite loss {value}")
        thetas.append(arr)
        losses.append(float(value))
    return np.array(thetas).reshape(len(history), d), np.array(losses)


def gp_propose_full(
    history: Sequence[tuple[np.ndarray, float]],
    bounds: Sequence[tuple[float, float]],
    seed: int,
    n_init: int = 5,
    n_candidates: int = 256,
) -> GpProposal:
    """Next circuit-phase candidate from a Gaussian-process surrogate.

    While fewer than ``n_init`` observations exist, returns points from a
    seeded quasi-random (Sobol) design. Afterwards fits a GP (squared
    exponential, unit length scale on bound-normalized coordinates, jitter
    1e-6 on the diagonal) to the observed losses and returns the expected
    improvement maximizer over ``n_candidates`` seeded uniform candidates.

    Raises:
        InvalidHistoryError: inconsistent dimensions or non-finite losses.
    """
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    d = len(bounds)
    if d == 0 or np.any(hi <= lo):
        raise InvalidHistoryError(f"invalid bounds {list(bounds)}")
    thetas, losses = _validate_history(history, d)

    if len(history) < n_init:
        # Block size rounded up to a power of two keeps the Sobol set balanced.
        block = 1 << max(0, (n_init - 1).bit_length())
        sampler = qmc.Sobol(d=d, scramble=True, seed=seed)
        unit = sampler.random(block)[len(history)]
        return GpProposal(theta=lo + unit * (hi - lo), phase="init")

    span = hi - lo
    x_train = (thetas - lo) / span
    y_mean = losses.mean()
    y_scale = losses.std()
    if y_scale == 0.0:
        y_scale = 1.0
    y_train = (losses - y_mean) / y_scale

    diff = x_train[:, None, :] - x_train[None, :, :]
    kernel = np.exp(-0.5 * np.sum(diff**2, axis=-1))
    kernel[np.diag_indices_from(kernel)] += 1e-6
    chol = np.linalg.cholesky(kernel)
    weights = np.linalg.solve(chol.T, np.linalg.solve(chol, y_train))

    rng = np.random.default_rng([seed, len(history)])
    candidates = lo + rng.random((n_candidates, d)) * span
    x_cand = (candidates - lo) / span

    cross_diff = x_cand[:, None, :] - x_train[None, :, :]
    k_star = np.exp(-0.5 * np.sum(cross_diff**2, axis=-1))
    mu = k_star @ weights
    v = np.linalg.solve(chol, k_star.T)
    var = np.clip(1.0 - np.sum(v**2, axis=0), 0.0, None)
    std = np.sqrt(var)

    best = y_train.min()
    improvement = best - mu
    ei = np.where(
        std > 1e-12,
        improvement * norm.cdf(improvement / np.where(std > 1e-12, std, 1.0))
        + std * norm.pdf(improvement / np.where(std > 1e-12, std, 1.0)),
        np.maximum(improvement, 0.0),
    )
    chosen = int(np.argmax(ei))
    return GpProposal(
        theta=candidates[chosen],
        phase="surrogate",
        candidates=candidates,
        expected_improvement=ei,
        chosen_index=chosen,
    )


def gp_propose(
    history: Sequence[tuple[np.ndarray, float]],
    bounds: Sequence[tuple[float, float]],
    seed: int,
    n_init: int = 5,
    n_candidates: int = 256,
) -> np.ndarray:
    """Convenience wrapper around gp_propose_full returning only the point."""
    return gp_propose_full(history, bounds, seed, n_init, n_candidates).theta
