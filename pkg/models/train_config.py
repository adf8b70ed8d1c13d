"""
Training Configuration
=======================
Hyperparameters of the model and the training loop.
"""

from dataclasses import asdict, dataclass, fields
from typing import Dict

from errors import ConfigError

FEA_METRICS = ('cosine', 'euclidean')
TRAIN_SPLITS = ('seen', 'all')


@dataclass
class TrainConfig:
    """
    Model and optimisation settings.

    Defaults follow the published setup: 5 neighbors per edge type, a
    4-layer refiner of width 512, a 2-block description encoder of width
    256, learning rate 5e-4 and weight decay 1e-4.
    """

    k_pos: int = 5
    k_fea: int = 5
    fea_metric: str = 'cosine'
    sage_layers: int = 4
    hidden: int = 512
    proj_dim: int = 256
    emb_blocks: int = 2
    emb_dim: int = 256
    heads: int = 4
    lr: float = 5e-4
    weight_decay: float = 1e-4
    epochs: int = 100
    genes_per_step: int = 16
    seed: int = 0
    zero_head: bool = False
    train_split: str = 'seen'
    log_every: int = 1

    def validate(self) -> 'TrainConfig':
        """Raise ConfigError on any invalid field; return self."""
        for name in ('sage_layers', 'hidden', 'proj_dim', 'emb_dim', 'heads',
                     'genes_per_step', 'log_every'):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ('k_pos', 'k_fea', 'emb_blocks', 'epochs', 'seed'):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.lr <= 0:
            raise ConfigError(f"lr must be positive, got {self.lr}")
        if self.weight_decay < 0:
            raise ConfigError(f"weight_decay must be non-negative, got {self.weight_decay}")
        if self.emb_dim % self.heads:
            raise ConfigError(f"heads ({self.heads}) must divide emb_dim ({self.emb_dim})")
        if self.fea_metric not in FEA_METRICS:
            raise ConfigError(f"fea_metric must be one of {FEA_METRICS}, got '{self.fea_metric}'")
        if self.train_split not in TRAIN_SPLITS:
            raise ConfigError(f"train_split must be one of {TRAIN_SPLITS}, got '{self.train_split}'")
        return self

    def to_dict(self) -> Dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict) -> 'TrainConfig':
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def structure(self) -> Dict:
        """Fields that fix parameter shapes and graph construction."""
        return {k: v for k, v in self.to_dict().items()
                if k not in ('epochs', 'log_every')}
