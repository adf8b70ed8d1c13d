"""
Prediction Batch Model
=======================
One training step's refined window features, gene vectors and predictions.
"""

from dataclasses import dataclass
from typing import List

from core.tensor import Tensor


@dataclass
class PredictionBatch:
    """y_hat = z v^T for the genes sampled in one step, next to their ground truth y."""

    z: Tensor
    v: Tensor
    y_hat: Tensor
    y: Tensor
    genes: List[str]

    @property
    def n_windows(self) -> int:
        return self.z.shape[0]
