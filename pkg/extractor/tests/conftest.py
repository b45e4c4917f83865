import numpy as np
import pytest

from extractor import ArchitectureConfig


@pytest.fixture
def small_arch():
    """Reduced dimensions so behavior tests stay fast."""
    return ArchitectureConfig(
        vocab_size=12,
        sequence_length=24,
        embedding_dim=6,
        recurrent_units=5,
        sequence_dense_units=6,
        latent_dim=2,
        hidden_units=(8, 4),
    )


@pytest.fixture
def small_data():
    """Separable token rows matching small_arch."""

    def make(n=40, seed=0, length=24, vocab=12):
        rng = np.random.default_rng(seed)
        tokens = np.zeros((n, length), dtype=np.int64)
        labels = np.empty(n, dtype=np.int64)
        for i in range(n):
            positive = i % 2 == 0
            run = int(rng.integers(8, length))
            seq = rng.integers(1, vocab, size=run)
            seq[rng.choice(run, size=max(1, run // 2), replace=False)] = 3 if positive else 7
            tokens[i, :run] = seq
            labels[i] = 1 if positive else -1
        return tokens, labels

    return make
