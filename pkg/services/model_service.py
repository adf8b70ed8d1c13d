"""
Model Service
==============
Construction of the full parameter set and the forward pass shared by
training, evaluation and prediction.
"""

from typing import Dict, List, Optional

import numpy as np

from core import ops
from core.tensor import Tensor, constant
from errors import ConfigError
from models.dataset import GeneDescription, SlideWindows
from models.graph import SlideGraph
from models.params import ModelParams
from models.train_config import TrainConfig
from services.embedder_service import embed_gene, init_embedder
from services.graph_service import build_slide_graph
from services.predictor_service import predict
from services.sage_service import init_sage_stack, sage_forward
from storage import to_storage_grid

DIM_KEYS = ('D_e', 'D_T', 'L_max')


def init_model(cfg: TrainConfig, dims: Dict[str, int], rng: np.random.Generator) -> ModelParams:
    """
    Fresh parameters for ``cfg`` on a dataset with ``dims``.

    Values are snapped onto the float32 storage grid so that a saved
    checkpoint reproduces them exactly.
    """
    cfg.validate()
    missing = [k for k in DIM_KEYS if k not in dims]
    if missing:
        raise ConfigError(f"Dataset dims lack {missing}")
    sage = init_sage_stack(dims['D_e'], cfg.hidden, cfg.proj_dim, cfg.sage_layers, rng)
    embedder = init_embedder(dims['D_T'], cfg.emb_dim, cfg.proj_dim, cfg.emb_blocks, cfg.heads,
                             dims['L_max'], rng, zero_head=cfg.zero_head)
    params = ModelParams(sage=sage, embedder=embedder)
    for tensor in params.tensors():
        tensor.data = to_storage_grid(tensor.data)
    return params


def build_model(cfg: TrainConfig, dims: Dict[str, int]) -> ModelParams:
    """Initial parameters for a seed; deterministic in (cfg, dims)."""
    return init_model(cfg, dims, np.random.default_rng(cfg.seed))


def check_compatible(dims: Dict[str, int], dataset_dims: Dict[str, int]):
    """A model trained with ``dims`` can run on data with ``dataset_dims``."""
    if dims['D_e'] != dataset_dims['D_e'] or dims['D_T'] != dataset_dims['D_T']:
        raise ConfigError(f"Checkpoint dims {dims} do not match dataset dims {dataset_dims}")
    if dataset_dims['L_max'] > dims['L_max']:
        raise ConfigError(
            f"Dataset descriptions reach {dataset_dims['L_max']} tokens; the model holds {dims['L_max']}"
        )


def slide_graph(slide: SlideWindows, cfg: TrainConfig) -> SlideGraph:
    return build_slide_graph(slide.positions, slide.features, cfg.k_pos, cfg.k_fea, cfg.fea_metric)


def refine_windows(slide: SlideWindows, graph: SlideGraph, params: ModelParams) -> Tensor:
    return sage_forward(constant(slide.features), graph, params.sage)


def gene_vectors(descs: List[GeneDescription], params: ModelParams) -> Tensor:
    """G x D matrix of projection vectors, one row per description."""
    return ops.concat_rows([embed_gene(d, params.embedder) for d in descs])


def predict_columns(z: Tensor, descs: List[GeneDescription], params: ModelParams,
                    cache: Optional[Dict[str, Tensor]] = None) -> np.ndarray:
    """
    N x G predictions computed one gene column at a time.

    Evaluation and single-gene prediction both go through here, so a column
    is bitwise the same whichever way it is requested.
    """
    columns = []
    for desc in descs:
        if cache is not None and desc.gene in cache:
            v = cache[desc.gene]
        else:
            v = embed_gene(desc, params.embedder)
            if cache is not None:
                cache[desc.gene] = v
        columns.append(predict(z, v).data)
    if not columns:
        return np.zeros((z.shape[0], 0))
    return np.hstack(columns)
