"""
Metrics Service
================
MSE, MAE and per-gene Pearson correlation with quartile/median/mean aggregates.
"""

from typing import Dict, List, Sequence

import numpy as np

from errors import ContractError, DataError, DimensionError
from models.report import EvalReport

# Published zero-shot scale on the two public benchmarks. Documentation only;
# these are not reproducible without the original datasets and extractors.
REFERENCE_ZERO_SHOT = {
    'stnet': {'mse': 0.1186, 'mae': 0.288, 'pcc_f': 0.179, 'pcc_s': 0.289, 'pcc_m': 0.269},
    '10x_proteomic': {'mse': 0.1305, 'mae': 0.270, 'pcc_f': 0.633, 'pcc_s': 0.651, 'pcc_m': 0.648},
}


def pearson_per_column(y_hat: np.ndarray, y: np.ndarray) -> np.ndarray:
    """
    Pearson r of each column pair; NaN where the ground truth is constant and
    0 where only the prediction is.
    """
    a = y_hat - y_hat.mean(axis=0)
    b = y - y.mean(axis=0)
    truth_live = np.ptp(y, axis=0) > 0
    pred_live = np.ptp(y_hat, axis=0) > 0
    denom = np.sqrt((a * a).sum(axis=0) * (b * b).sum(axis=0))
    with np.errstate(invalid='ignore', divide='ignore'):
        r = np.clip((a * b).sum(axis=0) / denom, -1.0, 1.0)
    r = np.where(pred_live, r, 0.0)
    return np.where(truth_live, r, np.nan)


def _aggregates(values: Sequence[float]):
    if not values:
        return None, None, None
    array = np.asarray(values, dtype=np.float64)
    return (float(np.quantile(array, 0.25, method='linear')),
            float(np.quantile(array, 0.5, method='linear')),
            float(array.mean()))


def evaluate(y_hat: np.ndarray, y: np.ndarray, gene_names: Sequence[str]) -> EvalReport:
    """
    Score predictions of one slide.

    Args:
        y_hat: N x G predictions
        y: N x G ground truth
        gene_names: G gene names in column order

    Returns:
        EvalReport: errors over all entries and PCC aggregates over the genes
        whose ground truth varies
    """
    y_hat = np.asarray(y_hat, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if y_hat.shape != y.shape:
        raise DimensionError(f"Prediction {y_hat.shape} and target {y.shape} differ in shape")
    if y.ndim != 2 or y.shape[1] != len(gene_names):
        raise DimensionError(f"{len(gene_names)} gene names for target of shape {y.shape}")
    if y.shape[0] < 2:
        raise ContractError(f"Evaluation needs at least 2 windows, got {y.shape[0]}")

    diff = y_hat - y
    r = pearson_per_column(y_hat, y)
    per_gene = {}
    degenerate = []
    for name, value in zip(gene_names, r):
        if np.isnan(value):
            degenerate.append(name)
        else:
            per_gene[name] = float(value)
    pcc_f, pcc_s, pcc_m = _aggregates(list(per_gene.values()))
    return EvalReport(
        mse=float((diff * diff).mean()) if diff.size else 0.0,
        mae=float(np.abs(diff).mean()) if diff.size else 0.0,
        pcc_per_gene=per_gene,
        pcc_f=pcc_f,
        pcc_s=pcc_s,
        pcc_m=pcc_m,
        n_windows=y.shape[0],
        n_genes=y.shape[1],
        degenerate_genes=degenerate,
    )


def aggregate_reports(per_slide: Sequence[EvalReport]) -> EvalReport:
    """
    Combine per-slide reports.

    Errors are weighted by each slide's entry count. A gene's PCC is the
    mean of its per-slide values over the slides where it is not degenerate;
    a gene degenerate on every slide stays degenerate.
    """
    if not per_slide:
        raise ContractError('No reports to aggregate')
    genes = _gene_set(per_slide[0])
    for report in per_slide[1:]:
        if _gene_set(report) != genes:
            raise DataError('Reports cover different gene sets')

    counts = np.array([r.n_windows * r.n_genes for r in per_slide], dtype=np.float64)
    weights = counts / counts.sum() if counts.sum() else np.full(len(per_slide), 1.0 / len(per_slide))
    mse = float(sum(w * r.mse for w, r in zip(weights, per_slide)))
    mae = float(sum(w * r.mae for w, r in zip(weights, per_slide)))

    order = _gene_order(per_slide[0])
    per_gene: Dict[str, float] = {}
    degenerate: List[str] = []
    for gene in order:
        values = [r.pcc_per_gene[gene] for r in per_slide if gene in r.pcc_per_gene]
        if values:
            per_gene[gene] = float(np.mean(values))
        else:
            degenerate.append(gene)
    pcc_f, pcc_s, pcc_m = _aggregates(list(per_gene.values()))
    return EvalReport(
        mse=mse,
        mae=mae,
        pcc_per_gene=per_gene,
        pcc_f=pcc_f,
        pcc_s=pcc_s,
        pcc_m=pcc_m,
        n_windows=int(sum(r.n_windows for r in per_slide)),
        n_genes=per_slide[0].n_genes,
        degenerate_genes=degenerate,
    )


def _gene_set(report: EvalReport) -> frozenset:
    return frozenset(report.pcc_per_gene) | frozenset(report.degenerate_genes)


def _gene_order(report: EvalReport) -> List[str]:
    return list(report.pcc_per_gene) + list(report.degenerate_genes)
