"""
End-to-end runs on planted-model data. The slow ones are deselected with
``pytest -m "not slow"``.
"""

from dataclasses import replace

import numpy as np
import pytest

from models.train_config import TrainConfig
from services.synth_service import SynthConfig, synth_dataset
from services.trainer_service import SWEEP_K_FEA, trainer_service


@pytest.fixture(scope='module')
def planted():
    return synth_dataset(SynthConfig())


@pytest.fixture
def scaled_config():
    return TrainConfig(hidden=64, proj_dim=16, emb_dim=32, epochs=300, log_every=50)


def test_loss_decreases_on_noiseless_data(small_synth_config, small_train_config):
    dataset = synth_dataset(replace(small_synth_config, noise_sigma=0.0))
    cfg = replace(small_train_config, epochs=30, log_every=30)
    losses = [entry['loss'] for entry in trainer_service.train(dataset, cfg).history]
    assert np.mean(losses[-5:]) < np.mean(losses[:5])


@pytest.mark.slow
def test_unseen_genes_are_recovered(planted, scaled_config):
    params = trainer_service.train(planted, scaled_config).checkpoint.params
    seen = trainer_service.evaluate_split(planted, params, scaled_config, 'seen')
    unseen = trainer_service.evaluate_split(planted, params, scaled_config, 'unseen')
    assert unseen.pcc_m >= 0.8
    assert abs(seen.pcc_m - unseen.pcc_m) <= 0.15


@pytest.mark.slow
def test_neighbor_sweep_series(planted, scaled_config):
    cfg = replace(scaled_config, epochs=20, log_every=20)
    result = trainer_service.sweep_neighbors(planted, cfg)
    assert result['k_fea'] == list(SWEEP_K_FEA)
    for entry in result['series']:
        assert entry['report']['n_genes'] == 10
        assert np.isfinite(entry['report']['pcc_m'])
