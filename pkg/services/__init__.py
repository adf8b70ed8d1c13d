"""
stzero Services Package
========================
Pipeline services: graphs, refiner, embedder, training and persistence.
"""

from services.dataset_service import DatasetService
from services.checkpoint_service import CheckpointService
from services.system_service import SystemService
from services.trainer_service import TrainerService

__all__ = ['DatasetService', 'CheckpointService', 'SystemService', 'TrainerService']
