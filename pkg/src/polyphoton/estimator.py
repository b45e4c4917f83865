"""Scikit-learn estimator facade over the photonic circuit classifier.

Wraps circuit construction, seesaw training, and exact readout behind the
usual fit/predict surface so the model composes with sklearn pipelines and
model selection. All heavy lifting happens in the underlying modules; this
layer only translates conventions (arbitrary binary labels vs the internal
{-1, +1} encoding).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .circuits import default_ansatz
from .exceptions import InvalidDatasetError
from .fock import FockState
from .model import VqcModel, outcome_space_size, probability_matrix
from .simulate import NoiseModel
from .train import TrainConfig, seesaw_train

__all__ = ["PhotonicVqcClassifier"]


class PhotonicVqcClassifier(ClassifierMixin, BaseEstimator):
    """Binary classifier backed by a simulated multi-photon interferometer.

    Each feature vector is bound to phase shifters between two trainable
    mesh blocks; the decision function is a learned linear readout over
    output-state probabilities. Training alternates Bayesian optimization
    over the mesh phases with a Nelder-Mead or closed-form update of the
    readout weights.

    Parameters mirror TrainConfig plus the circuit topology knobs. The
    default five-mode, three-photon layout matches the reference setup.
    """

    def __init__(
        self,
        mode_count: int = 5,
        input_modes: tuple[int, ...] = (0, 2, 4),
        iterations: int = 15,
        batches: int = 10,
        backend: str = "exact",
        shots: int = 50_000,
        alpha: float = 0.01,
        repeats: int = 1,
        lambda_optimizer: str = "nelder_mead",
        source_loss: float = 0.0,
        indistinguishability: float = 1.0,
        detector: str = "pnr",
        max_trainable_per_block: int | None = None,
        n_init: int = 5,
        random_state: int = 0,
        workers: int = 1,
    ) -> None:
        self.mode_count = mode_count
        self.input_modes = input_modes
        self.iterations = iterations
        self.batches = batches
        self.backend = backend
        self.shots = shots
        self.alpha = alpha
        self.repeats = repeats
        self.lambda_optimizer = lambda_optimizer
        self.source_loss = source_loss
        self.indistinguishability = indistinguishability
        self.detector = detector
        self.max_trainable_per_block = max_trainable_per_block
        self.n_init = n_init
        self.random_state = random_state
        self.workers = workers

    def _template(self, feature_dim: int) -> VqcModel:
        spec = default_ansatz(
            self.mode_count,
            feature_dim,
            max_trainable_per_block=self.max_trainable_per_block,
        )
        occupations = [0] * self.mode_count
        for mode in self.input_modes:
            occupations[mode] += 1
        noise = NoiseModel(
            source_loss=self.source_loss,
            indistinguishability=self.indistinguishability,
        )
        n_out = outcome_space_size(
            sum(occupations), self.mode_count, self.detector
        )
        return VqcModel(
            spec=spec,
            theta1=np.zeros(spec.trainable_counts[0]),
            theta2=np.zeros(spec.trainable_counts[1]),
            lam=np.zeros(n_out),
            input_state=FockState(tuple(occupations)),
            noise=noise,
            detector=self.detector,
        )

    def fit(self, X, y):
        """Train on (X, y); y may use any two label values.

        The lexically smaller class maps to the internal -1 side. Raises
        InvalidDatasetError when y does not contain exactly two classes.
        """
        X, y = check_X_y(X, y)
        self.classes_ = np.unique(y)
        if len(self.classes_) != 2:
            raise InvalidDatasetError(
                f"need exactly 2 classes, got {len(self.classes_)}"
            )
        signs = np.where(y == self.classes_[1], 1.0, -1.0)
        config = TrainConfig(
            iterations=self.iterations,
            batches=self.batches,
            shots=self.shots,
            backend=self.backend,
            alpha=self.alpha,
            repeats=self.repeats,
            seed=self.random_state,
            lambda_optimizer=self.lambda_optimizer,
            n_init=self.n_init,
            workers=self.workers,
        )
        template = self._template(X.shape[1])
        result = seesaw_train(template, X, signs, X, signs, config)
        self.n_features_in_ = X.shape[1]
        self.result_ = result
        self.model_ = result.best_model(template)
        return self

    def decision_function(self, X) -> np.ndarray:
        """Exact readout f(x) for each row; predict thresholds at 0."""
        check_is_fitted(self, "model_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        p = probability_matrix(self.model_, X, workers=self.workers)
        return p @ self.model_.lam

    def predict(self, X) -> np.ndarray:
        scores = self.decision_function(X)
        return np.where(scores >= 0.0, self.classes_[1], self.classes_[0])
