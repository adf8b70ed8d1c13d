"""
Shared fixtures. The repository is a flat layout rather than an installed
package, so the root goes on sys.path first.
"""

import os
import sys

import numpy as np
import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from core import ops  # noqa: E402
from core.tensor import constant  # noqa: E402
from models.train_config import TrainConfig  # noqa: E402
from services.dataset_service import dataset_service  # noqa: E402
from services.synth_service import SynthConfig, synth_dataset  # noqa: E402

SMALL_SYNTH = dict(n_slides=2, windows_per_slide=30, n_genes=8, n_seen=6, d_e=6, d_t=4,
                   length=3, d_latent=3, noise_sigma=0.1, seed=3)

SMALL_SYNTH_FLAGS = [
    '--n-slides', '2', '--windows-per-slide', '30', '--n-genes', '8', '--n-seen', '6',
    '--d-e', '6', '--d-t', '4', '--length', '3', '--d-latent', '3', '--seed', '3',
]

SMALL_TRAIN = dict(k_pos=3, k_fea=3, sage_layers=2, hidden=8, proj_dim=4, emb_blocks=1,
                   emb_dim=8, heads=2, lr=1e-2, epochs=2, genes_per_step=4, seed=5)

SMALL_TRAIN_FLAGS = [
    '--k-pos', '3', '--k-fea', '3', '--sage-layers', '2', '--hidden', '8', '--proj-dim', '4',
    '--emb-blocks', '1', '--emb-dim', '8', '--heads', '2', '--lr', '0.01', '--epochs', '2',
    '--genes-per-step', '4', '--seed', '5',
]


@pytest.fixture(autouse=True)
def _no_seed_override(monkeypatch):
    monkeypatch.delenv('STZERO_SEED', raising=False)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_synth_config():
    return SynthConfig(**SMALL_SYNTH)


@pytest.fixture
def small_dataset(small_synth_config):
    return synth_dataset(small_synth_config)


@pytest.fixture
def small_train_config():
    return TrainConfig(**SMALL_TRAIN)


@pytest.fixture
def dataset_dir(tmp_path, small_dataset):
    path = str(tmp_path / 'planted')
    dataset_service.save_dataset(small_dataset, path)
    return path


@pytest.fixture
def probe(rng):
    """Scalar loss sum(out * R) for a fixed random R, so every output entry matters."""
    weights = {}

    def make(out):
        if out.shape not in weights:
            weights[out.shape] = rng.normal(size=out.shape)
        return ops.sum_all(ops.mul(out, constant(weights[out.shape])))

    return make
