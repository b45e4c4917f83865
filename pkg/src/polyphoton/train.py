"""Seesaw training: Bayesian optimization over circuit phases, an inner
convex solve over observable weights.

Each iteration proposes one phase vector from the Gaussian-process
surrogate, evaluates the per-point outcome distributions (exact or with a
finite shot budget spread over the batch count), re-optimizes the weights
on the full training set, and feeds the achieved loss back to the
surrogate.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .exceptions import ConfigurationError, InvalidDatasetError
from .model import VqcModel, probability_matrix
from .optimize import gp_propose, nelder_mead, ridge_solve

__all__ = ["TrainConfig", "RepeatResult", "TrainedResult", "ridge_lambda", "seesaw_train"]

_TAU = 2.0 * np.pi


@dataclass(frozen=True)
class TrainConfig:
    """Knobs of the seesaw loop.

    ``backend`` picks exact output probabilities or finite-shot sampling;
    in shot mode the per-iteration budget is ``batches * shots`` spread
    uniformly over the training points.
    """

    iterations: int = 15
    batches: int = 10
    shots: int = 50_000
    backend: str = "exact"
    alpha: float = 0.01
    repeats: int = 5
    seed: int = 0
    lambda_optimizer: str = "nelder_mead"
    n_init: int = 5
    workers: int = 1

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ConfigurationError(f"iterations must be >= 1, got {self.iterations}")
        if self.batches < 1:
            raise ConfigurationError(f"batches must be >= 1, got {self.batches}")
        if self.shots < 1:
            raise ConfigurationError(f"shots must be >= 1, got {self.shots}")
        if self.repeats < 1:
            raise ConfigurationError(f"repeats must be >= 1, got {self.repeats}")
        if self.backend not in ("exact", "shots"):
            raise ConfigurationError(
                f"backend must be 'exact' or 'shots', got {self.backend!r}"
            )
        if self.alpha < 0:
            raise ConfigurationError(f"alpha must be >= 0, got {self.alpha}")
        if self.lambda_optimizer not in ("nelder_mead", "ridge_closed_form"):
            raise ConfigurationError(
                "lambda_optimizer must be 'nelder_mead' or 'ridge_closed_form', "
                f"got {self.lambda_optimizer!r}"
            )
        if self.n_init < 1:
            raise ConfigurationError(f"n_init must be >= 1, got {self.n_init}")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "iterations": self.iterations,
            "batches": self.batches,
            "shots": self.shots,
            "backend": self.backend,
            "alpha": self.alpha,
            "repeats": self.repeats,
            "seed": self.seed,
            "lambda_optimizer": self.lambda_optimizer,
            "n_init": self.n_init,
            "workers": self.workers,
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "TrainConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ConfigurationError(f"unknown training options: {sorted(unknown)}")
        return cls(**doc)


@dataclass(frozen=True)
class RepeatResult:
    """One independent training run."""

    theta1: np.ndarray
    theta2: np.ndarray
    lam: np.ndarray
    loss_trace: np.ndarray
    best_loss_trace: np.ndarray
    best_loss: float
    train_accuracy: float
    test_accuracy: float
    train_predictions: np.ndarray
    test_predictions: np.ndarray

    def to_dict(self) -> dict[str, Any]:
        return {
            "theta1": self.theta1.tolist(),
            "theta2": self.theta2.tolist(),
            "lam": self.lam.tolist(),
            "loss_trace": self.loss_trace.tolist(),
            "best_loss_trace": self.best_loss_trace.tolist(),
            "best_loss": self.best_loss,
            "train_accuracy": self.train_accuracy,
            "test_accuracy": self.test_accuracy,
            "train_predictions": self.train_predictions.tolist(),
            "test_predictions": self.test_predictions.tolist(),
        }


@dataclass(frozen=True)
class TrainedResult:
    """All repeats plus the winner and accuracy aggregates."""

    repeats: tuple[RepeatResult, ...]
    best_repeat: int
    mean_train_accuracy: float
    std_train_accuracy: float
    mean_test_accuracy: float
    std_test_accuracy: float
    wall_seconds: float
    config: TrainConfig

    @property
    def best(self) -> RepeatResult:
        return self.repeats[self.best_repeat]

    def best_model(self, template: VqcModel) -> VqcModel:
        return template.with_parameters(
            theta1=self.best.theta1, theta2=self.best.theta2, lam=self.best.lam
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "repeats": [r.to_dict() for r in self.repeats],
            "best_repeat": self.best_repeat,
            "mean_train_accuracy": self.mean_train_accuracy,
            "std_train_accuracy": self.std_train_accuracy,
            "mean_test_accuracy": self.mean_test_accuracy,
            "std_test_accuracy": self.std_test_accuracy,
            "wall_seconds": self.wall_seconds,
            "config": self.config.to_dict(),
        }


def ridge_lambda(
    model: VqcModel,
    xs,
    ys,
    alpha: float,
    shots: int | None = None,
    seed=None,
) -> np.ndarray:
    """Closed-form optimal observable weights at the model's fixed phases."""
    p = probability_matrix(model, xs, shots=shots, seed=seed)
    return ridge_solve(p, np.asarray(ys, dtype=float), alpha)


def _lambda_objective(p: np.ndarray, ys: np.ndarray, alpha: float):
    n = len(ys)

    def objective(lam: np.ndarray) -> float:
        residual = ys - p @ lam
        return float(residual @ residual / (2 * n) + alpha * lam @ lam)

    return objective


def _optimize_lambda(
    p: np.ndarray, ys: np.ndarray, alpha: float, lam0: np.ndarray, method: str
) -> np.ndarray:
    if method == "ridge_closed_form":
        return ridge_solve(p, ys, alpha)
    objective = _lambda_objective(p, ys, alpha)
    return nelder_mead(objective, lam0, tol=1e-10, restarts=1).x


def _check_labels(ys: np.ndarray, name: str, require_both: bool) -> None:
    if ys.size == 0:
        raise InvalidDatasetError(f"{name} set is empty")
    values = set(np.unique(ys).tolist())
    if not values <= {-1.0, 1.0}:
        raise InvalidDatasetError(f"{name} labels must be in {{+1, -1}}, got {sorted(values)}")
    if require_both and len(values) < 2:
        raise InvalidDatasetError(f"{name} set contains a single class")


def seesaw_train(
    template: VqcModel,
    train_x,
    train_y,
    test_x,
    test_y,
    config: TrainConfig,
) -> TrainedResult:
    """Alternate phase proposals and weight solves; repeat with derived seeds.

    Returns the per-repeat traces, the best (theta, lam) of each repeat by
    training loss, and mean/std of train and test accuracy over repeats.

    Raises:
        InvalidDatasetError: empty split, labels outside {+1, -1}, or a
            single-class training set.
    """
    train_x = np.atleast_2d(np.asarray(train_x, dtype=float))
    test_x = np.atleast_2d(np.asarray(test_x, dtype=float))
    train_y = np.asarray(train_y, dtype=float)
    test_y = np.asarray(test_y, dtype=float)
    _check_labels(train_y, "training", require_both=True)
    _check_labels(test_y, "test", require_both=False)

    t_start = time.perf_counter()
    c1, c2 = template.spec.trainable_counts
    d = c1 + c2
    bounds = [(0.0, _TAU)] * d
    n_train = len(train_x)
    if config.backend == "shots":
        point_shots = max(1, config.batches * config.shots // n_train)
    else:
        point_shots = None

    results = []
    for r in range(config.repeats):
        gp_seed = int(np.random.SeedSequence([config.seed, r]).generate_state(1)[0])
        lam = np.zeros(template.lam.shape)
        history: list[tuple[np.ndarray, float]] = []
        best_loss = np.inf
        best_params = (template.theta1, template.theta2, lam)
        trace = []
        for t in range(config.iterations):
            theta = gp_propose(history, bounds, seed=gp_seed, n_init=config.n_init)
            candidate = template.with_parameters(
                theta1=theta[:c1], theta2=theta[c1:], lam=lam
            )
            p = probability_matrix(
                candidate,
                train_x,
                shots=point_shots,
                seed=[config.seed, r, t],
                workers=config.workers,
            )
            lam = _optimize_lambda(p, train_y, config.alpha, lam, config.lambda_optimizer)
            value = _lambda_objective(p, train_y, config.alpha)(lam)
            history.append((theta, value))
            trace.append(value)
            if value < best_loss:
                best_loss = value
                best_params = (candidate.theta1, candidate.theta2, lam)

        theta1, theta2, lam_best = best_params
        final = template.with_parameters(theta1=theta1, theta2=theta2, lam=lam_best)
        train_pred = _predict_batch(
            final, train_x, point_shots, [config.seed, r, config.iterations], config.workers
        )
        test_pred = _predict_batch(
            final, test_x, point_shots, [config.seed, r, config.iterations + 1], config.workers
        )
        trace_arr = np.array(trace)
        results.append(
            RepeatResult(
                theta1=theta1,
                theta2=theta2,
                lam=lam_best,
                loss_trace=trace_arr,
                best_loss_trace=np.minimum.accumulate(trace_arr),
                best_loss=float(best_loss),
                train_accuracy=float(np.mean(train_pred == train_y)),
                test_accuracy=float(np.mean(test_pred == test_y)),
                train_predictions=train_pred,
                test_predictions=test_pred,
            )
        )

    train_accs = np.array([r.train_accuracy for r in results])
    test_accs = np.array([r.test_accuracy for r in results])
    return TrainedResult(
        repeats=tuple(results),
        best_repeat=int(np.argmin([r.best_loss for r in results])),
        mean_train_accuracy=float(train_accs.mean()),
        std_train_accuracy=float(train_accs.std()),
        mean_test_accuracy=float(test_accs.mean()),
        std_test_accuracy=float(test_accs.std()),
        wall_seconds=time.perf_counter() - t_start,
        config=config,
    )


def _predict_batch(
    model: VqcModel, xs, shots: int | None, seed, workers: int
) -> np.ndarray:
    p = probability_matrix(model, xs, shots=shots, seed=seed, workers=workers)
    f = p @ model.lam
    return np.where(f >= 0.0, 1.0, -1.0)
