"""
stzero Models Package
======================
Domain records for datasets, graphs, parameters and reports.
"""

from models.checkpoint import Checkpoint, OptimizerState
from models.dataset import Dataset, GeneDescription, SlideWindows
from models.graph import SlideGraph
from models.params import EmbedderParams, ModelParams, SageLayer, SageStack, TransformerBlock
from models.prediction import PredictionBatch
from models.report import EvalReport
from models.train_config import TrainConfig

__all__ = [
    'Checkpoint', 'OptimizerState', 'Dataset', 'GeneDescription', 'SlideWindows',
    'SlideGraph', 'EmbedderParams', 'ModelParams', 'SageLayer', 'SageStack',
    'TransformerBlock', 'PredictionBatch', 'EvalReport', 'TrainConfig',
]
