"""
Embedder Service
=================
Transformer encoding of gene description tokens into projection vectors.
"""

import math
from typing import Dict, Sequence

import numpy as np

from core import ops
from core.tensor import Tensor, constant, parameter
from errors import CapacityError, ConfigError, DataError, DimensionError
from models.dataset import GeneDescription
from models.params import EmbedderParams, TransformerBlock

FFN_RATIO = 4
EMBED_INIT_STD = 0.02


def _uniform(rng: np.random.Generator, fan_in: int, shape) -> np.ndarray:
    bound = math.sqrt(1.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape)


def init_block(d_model: int, rng: np.random.Generator) -> TransformerBlock:
    inner = FFN_RATIO * d_model
    return TransformerBlock(
        ln1_gain=parameter(np.ones((1, d_model))),
        ln1_bias=parameter(np.zeros((1, d_model))),
        w_q=parameter(_uniform(rng, d_model, (d_model, d_model))),
        w_k=parameter(_uniform(rng, d_model, (d_model, d_model))),
        w_v=parameter(_uniform(rng, d_model, (d_model, d_model))),
        w_o=parameter(_uniform(rng, d_model, (d_model, d_model))),
        ln2_gain=parameter(np.ones((1, d_model))),
        ln2_bias=parameter(np.zeros((1, d_model))),
        w_1=parameter(_uniform(rng, d_model, (d_model, inner))),
        b_1=parameter(np.zeros((1, inner))),
        w_2=parameter(_uniform(rng, inner, (inner, d_model))),
        b_2=parameter(np.zeros((1, d_model))),
    )


def init_embedder(d_t: int, d_model: int, d: int, n_blocks: int, heads: int, l_max: int,
                  rng: np.random.Generator, zero_head: bool = False) -> EmbedderParams:
    """
    Seeded description-encoder parameters.

    Args:
        d_t: Token embedding width of the descriptions
        d_model: Encoder width
        d: Projection width shared with the refined window features
        n_blocks: Number of transformer blocks
        heads: Attention heads; must divide ``d_model``
        l_max: Longest description the positional table covers
        rng: Random generator
        zero_head: Start the output projection at zero
    """
    if heads < 1 or d_model % heads:
        raise ConfigError(f"heads ({heads}) must divide the encoder width ({d_model})")
    in_proj = parameter(_uniform(rng, d_t, (d_t, d_model)))
    cls = parameter(rng.normal(0.0, EMBED_INIT_STD, size=(1, d_model)))
    pos_emb = parameter(rng.normal(0.0, EMBED_INIT_STD, size=(l_max + 1, d_model)))
    blocks = [init_block(d_model, rng) for _ in range(n_blocks)]
    if zero_head:
        out_proj = parameter(np.zeros((d_model, d)))
    else:
        out_proj = parameter(_uniform(rng, d_model, (d_model, d)))
    return EmbedderParams(in_proj=in_proj, cls=cls, pos_emb=pos_emb, out_proj=out_proj,
                          blocks=blocks, heads=heads)


def self_attention(x: Tensor, block: TransformerBlock, heads: int) -> Tensor:
    """Multi-head softmax(Q K^T / sqrt(d_head)) V followed by the output projection."""
    d_model = x.shape[1]
    if heads < 1 or d_model % heads:
        raise ConfigError(f"heads ({heads}) must divide the encoder width ({d_model})")
    d_head = d_model // heads
    q = ops.matmul(x, block.w_q)
    k = ops.matmul(x, block.w_k)
    v = ops.matmul(x, block.w_v)
    outputs = []
    for head in range(heads):
        lo, hi = head * d_head, (head + 1) * d_head
        q_h = ops.slice_cols(q, lo, hi)
        k_h = ops.slice_cols(k, lo, hi)
        v_h = ops.slice_cols(v, lo, hi)
        scores = ops.scale(ops.matmul(q_h, ops.transpose(k_h)), 1.0 / math.sqrt(d_head))
        outputs.append(ops.matmul(ops.softmax_rows(scores), v_h))
    merged = outputs[0] if heads == 1 else ops.concat_cols(outputs)
    return ops.matmul(merged, block.w_o)


def attention_block(e: Tensor, block: TransformerBlock, heads: int) -> Tensor:
    """Pre-norm residual block: E + Attn(LN(E)), then E + FFN(LN(E))."""
    if block.w_q.shape[0] != e.shape[1]:
        raise DimensionError(f"Block width {block.w_q.shape[0]} does not match input {e.shape}")
    e = ops.add(e, self_attention(ops.layer_norm(e, block.ln1_gain, block.ln1_bias), block, heads))
    hidden = ops.relu(ops.add(ops.matmul(ops.layer_norm(e, block.ln2_gain, block.ln2_bias), block.w_1),
                              block.b_1))
    return ops.add(e, ops.add(ops.matmul(hidden, block.w_2), block.b_2))


def embed_gene(desc: GeneDescription, params: EmbedderParams) -> Tensor:
    """
    Encode one description into its 1 x D projection vector.

    The CLS token is prepended to the projected tokens, positional
    embeddings are added, the blocks run in order, and the final CLS row is
    projected by the output matrix.
    """
    tokens = np.asarray(desc.tokens, dtype=np.float64)
    if tokens.ndim != 2 or tokens.shape[0] < 1:
        raise DataError(f"Description of '{desc.gene}' must be a non-empty L x D_T matrix")
    if tokens.shape[0] > params.l_max:
        raise CapacityError(
            f"Description of '{desc.gene}' has {tokens.shape[0]} tokens; the model holds at most {params.l_max}"
        )
    if tokens.shape[1] != params.in_proj.shape[0]:
        raise DimensionError(
            f"Description of '{desc.gene}' has width {tokens.shape[1]}, expected {params.in_proj.shape[0]}"
        )
    if not np.all(np.isfinite(tokens)):
        raise DataError(f"Description of '{desc.gene}' contains non-finite values")

    length = tokens.shape[0]
    projected = ops.matmul(constant(tokens), params.in_proj)
    e = ops.concat_rows([params.cls, projected])
    e = ops.add(e, ops.slice_rows(params.pos_emb, 0, length + 1))
    for block in params.blocks:
        e = attention_block(e, block, params.heads)
    return ops.matmul(ops.slice_rows(e, 0, 1), params.out_proj)


def embed_all(descs: Sequence[GeneDescription], params: EmbedderParams) -> Dict[str, Tensor]:
    """Encode every description, keyed by gene name."""
    names = [d.gene for d in descs]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise DataError(f"Duplicate gene descriptions: {duplicates}")
    return {desc.gene: embed_gene(desc, params) for desc in descs}
