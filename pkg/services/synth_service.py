"""
Synthetic Data Service
=======================
Planted-model datasets where zero-shot recovery can be checked.

Latent gene vectors u_c and spatially smooth window states s_i generate
expression y = s u^T + noise. Window features are a fixed random map of
s plus noise, and every description token of gene c is a fixed random map
of u_c plus noise, so descriptions determine the gene vectors.
"""

import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from errors import ConfigError
from models.dataset import SEEN, UNSEEN, Dataset, GeneDescription, SlideWindows
from services.graph_service import knn_brute
from storage import to_storage_grid, write_f32, write_json

logger = logging.getLogger(__name__)

SMOOTHING_NEIGHBORS = 5


@dataclass
class SynthConfig:
    n_slides: int = 4
    windows_per_slide: int = 400
    n_genes: int = 50
    n_seen: int = 40
    d_e: int = 32
    d_t: int = 16
    length: int = 12
    d_latent: int = 8
    noise_sigma: float = 0.1
    seed: int = 7

    def validate(self) -> 'SynthConfig':
        for name in ('n_slides', 'windows_per_slide', 'n_genes', 'n_seen', 'd_e', 'd_t',
                     'length', 'd_latent'):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1, got {getattr(self, name)}")
        if self.n_seen >= self.n_genes:
            raise ConfigError(f"n_seen ({self.n_seen}) must be smaller than n_genes ({self.n_genes})")
        if self.noise_sigma < 0:
            raise ConfigError(f"noise_sigma must be non-negative, got {self.noise_sigma}")
        return self


@dataclass
class SynthLatents:
    """Planted quantities behind a synthetic dataset."""

    gene_vectors: np.ndarray
    feature_map: np.ndarray
    token_map: np.ndarray
    states: List[np.ndarray] = field(default_factory=list)


def _smooth_states(positions: np.ndarray, raw: np.ndarray) -> np.ndarray:
    """Average each window's raw state with its spatial neighbors, then standardise."""
    neighbors = knn_brute(positions, SMOOTHING_NEIGHBORS, 'euclidean')
    smooth = np.stack([raw[[i] + nbrs].mean(axis=0) for i, nbrs in enumerate(neighbors)])
    smooth -= smooth.mean(axis=0)
    std = smooth.std(axis=0)
    return smooth / np.where(std > 0, std, 1.0)


def synth_dataset(cfg: SynthConfig, return_latents: bool = False):
    """
    Generate a planted-model dataset; all randomness comes from ``cfg.seed``.

    Args:
        cfg: Generator settings
        return_latents: Also return the planted latents

    Returns:
        Dataset, or (Dataset, SynthLatents) when ``return_latents`` is set
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    sigma = cfg.noise_sigma

    gene_vectors = rng.normal(0.0, 1.0 / np.sqrt(cfg.d_latent), size=(cfg.n_genes, cfg.d_latent))
    feature_map = rng.normal(0.0, 1.0 / np.sqrt(cfg.d_latent), size=(cfg.d_latent, cfg.d_e))
    token_map = rng.normal(0.0, np.sqrt(cfg.d_latent / cfg.d_t), size=(cfg.d_latent, cfg.d_t))
    latents = SynthLatents(gene_vectors, feature_map, token_map)

    names = [f'G{c:04d}' for c in range(cfg.n_genes)]
    genes = []
    for c, name in enumerate(names):
        clean = gene_vectors[c] @ token_map
        tokens = clean[None, :] + sigma * rng.normal(size=(cfg.length, cfg.d_t))
        genes.append(GeneDescription(name, to_storage_grid(tokens), SEEN if c < cfg.n_seen else UNSEEN))

    slides = []
    side = np.sqrt(cfg.windows_per_slide)
    for index in range(cfg.n_slides):
        n = cfg.windows_per_slide
        positions = rng.uniform(0.0, side, size=(n, 2))
        states = _smooth_states(positions, rng.normal(size=(n, cfg.d_latent)))
        expression = states @ gene_vectors.T + sigma * rng.normal(size=(n, cfg.n_genes))
        features = states @ feature_map + sigma * rng.normal(size=(n, cfg.d_e))
        latents.states.append(states)
        slides.append(SlideWindows(
            slide_id=f'slide{index:03d}',
            positions=to_storage_grid(positions),
            features=to_storage_grid(features),
            expression=to_storage_grid(expression),
        ))

    dataset = Dataset(slides=slides, genes=genes, d_e=cfg.d_e, d_t=cfg.d_t, l_max=cfg.length)
    logger.info('Synthesised %d slides x %d windows, %d genes (%d seen), seed %d',
                cfg.n_slides, cfg.windows_per_slide, cfg.n_genes, cfg.n_seen, cfg.seed)
    if return_latents:
        return dataset, latents
    return dataset


def save_latents(latents: SynthLatents, path: str):
    """Write latents as raw float32 files with a ``latents.json`` shape manifest."""
    tensors: List[Tuple[str, np.ndarray]] = [
        ('gene_vectors', latents.gene_vectors),
        ('feature_map', latents.feature_map),
        ('token_map', latents.token_map),
    ]
    tensors += [(f'states_{i:03d}', s) for i, s in enumerate(latents.states)]
    manifest: Dict[str, list] = {}
    for name, array in tensors:
        write_f32(os.path.join(path, f'{name}.f32'), array)
        manifest[name] = list(array.shape)
    write_json(os.path.join(path, 'latents.json'), manifest)
