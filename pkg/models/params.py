"""
Model Parameter Containers
===========================
Trainable tensors of the window refiner and the gene embedder.
"""

from dataclasses import dataclass, field
from typing import List, Tuple

from core.tensor import Tensor
from errors import DimensionError

RELU = 'relu'
NO_ACTIVATION = 'none'


@dataclass
class SageLayer:
    """One refinement layer: [self || pos mean || fea mean] @ weight."""

    weight: Tensor
    activation: str = RELU

    @property
    def d_in(self) -> int:
        return self.weight.shape[0] // 3

    @property
    def d_out(self) -> int:
        return self.weight.shape[1]


@dataclass
class SageStack:
    layers: List[SageLayer]
    d_e: int
    d: int

    def validate(self):
        width = self.d_e
        for index, layer in enumerate(self.layers):
            if layer.weight.shape[0] != 3 * width:
                raise DimensionError(
                    f"SAGE layer {index} weight has {layer.weight.shape[0]} rows, expected 3 x {width}"
                )
            width = layer.d_out
        if self.layers and width != self.d:
            raise DimensionError(f"SAGE output width {width} differs from projection width {self.d}")

    def named_tensors(self) -> List[Tuple[str, Tensor]]:
        return [(f'sage.{i}.weight', layer.weight) for i, layer in enumerate(self.layers)]


BLOCK_TENSORS = (
    'ln1_gain', 'ln1_bias', 'w_q', 'w_k', 'w_v', 'w_o',
    'ln2_gain', 'ln2_bias', 'w_1', 'b_1', 'w_2', 'b_2',
)


@dataclass
class TransformerBlock:
    """Pre-norm block: attention sublayer then a ReLU feed-forward sublayer."""

    ln1_gain: Tensor
    ln1_bias: Tensor
    w_q: Tensor
    w_k: Tensor
    w_v: Tensor
    w_o: Tensor
    ln2_gain: Tensor
    ln2_bias: Tensor
    w_1: Tensor
    b_1: Tensor
    w_2: Tensor
    b_2: Tensor

    def named_tensors(self, prefix: str) -> List[Tuple[str, Tensor]]:
        return [(f'{prefix}.{name}', getattr(self, name)) for name in BLOCK_TENSORS]


@dataclass
class EmbedderParams:
    in_proj: Tensor
    cls: Tensor
    pos_emb: Tensor
    out_proj: Tensor
    blocks: List[TransformerBlock] = field(default_factory=list)
    heads: int = 4

    @property
    def d_model(self) -> int:
        return self.in_proj.shape[1]

    @property
    def l_max(self) -> int:
        return self.pos_emb.shape[0] - 1

    def named_tensors(self) -> List[Tuple[str, Tensor]]:
        named = [
            ('embed.in_proj', self.in_proj),
            ('embed.cls', self.cls),
            ('embed.pos_emb', self.pos_emb),
        ]
        for i, block in enumerate(self.blocks):
            named.extend(block.named_tensors(f'embed.block.{i}'))
        named.append(('embed.out_proj', self.out_proj))
        return named


@dataclass
class ModelParams:
    sage: SageStack
    embedder: EmbedderParams

    def named_tensors(self) -> List[Tuple[str, Tensor]]:
        """All trainable tensors in checkpoint manifest order."""
        return self.sage.named_tensors() + self.embedder.named_tensors()

    def tensors(self) -> List[Tensor]:
        return [t for _, t in self.named_tensors()]

    def zero_grad(self):
        for t in self.tensors():
            t.zero_grad()
