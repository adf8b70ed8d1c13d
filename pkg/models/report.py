"""
Evaluation Report Model
========================
Scalar errors and Pearson-correlation aggregates of a prediction run.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

REPORT_KEYS = (
    'mse', 'mae', 'pcc_f', 'pcc_s', 'pcc_m', 'degenerate_genes',
    'pcc_per_gene', 'n_windows', 'n_genes',
)


@dataclass
class EvalReport:
    """
    Attributes:
        mse: Mean squared error over all entries
        mae: Mean absolute error over all entries
        pcc_per_gene: Pearson r per non-degenerate gene
        pcc_f: First quartile of per-gene r (None if no gene qualifies)
        pcc_s: Median of per-gene r
        pcc_m: Mean of per-gene r
        n_windows: Windows scored
        n_genes: Genes scored (degenerate ones included)
        degenerate_genes: Genes whose ground truth is constant
    """

    mse: float
    mae: float
    pcc_per_gene: Dict[str, float]
    pcc_f: Optional[float]
    pcc_s: Optional[float]
    pcc_m: Optional[float]
    n_windows: int
    n_genes: int
    degenerate_genes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            'mse': self.mse,
            'mae': self.mae,
            'pcc_f': self.pcc_f,
            'pcc_s': self.pcc_s,
            'pcc_m': self.pcc_m,
            'degenerate_genes': list(self.degenerate_genes),
            'pcc_per_gene': dict(self.pcc_per_gene),
            'n_windows': self.n_windows,
            'n_genes': self.n_genes,
        }

    def __repr__(self):
        return f'<EvalReport windows={self.n_windows} genes={self.n_genes} pcc_m={self.pcc_m}>'
