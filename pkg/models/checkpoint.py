"""
Checkpoint Model
=================
Everything needed to resume training or run inference.
"""

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from models.params import ModelParams
from models.train_config import TrainConfig


@dataclass
class OptimizerState:
    """Adaptive-moment state keyed by parameter name."""

    step: int = 0
    first_moment: Dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: Dict[str, np.ndarray] = field(default_factory=dict)


@dataclass
class Checkpoint:
    params: ModelParams
    config: TrainConfig
    dims: Dict[str, int]
    seed: int
    epochs_done: int = 0
    optimizer: OptimizerState = field(default_factory=OptimizerState)

    def __repr__(self):
        return f'<Checkpoint seed={self.seed} epochs_done={self.epochs_done}>'
