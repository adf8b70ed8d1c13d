"""
Trainer Service
================
Training loop, split evaluation, single-gene prediction, the micro-model
gradient check and the neighbor-count sweep.

One optimizer step is one slide: graph -> refiner -> description encoder
-> dot-product prediction -> MSE + Pearson loss over the slide's windows
and a sample of training genes.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from core.gradcheck import GradCheckReport, grad_check
from core.tensor import Tape, constant
from errors import ConfigError, DataError, NumericError
from models.checkpoint import Checkpoint, OptimizerState
from models.dataset import SEEN, UNSEEN, Dataset, GeneDescription
from models.graph import SlideGraph
from models.params import ModelParams
from models.prediction import PredictionBatch
from models.report import EvalReport
from models.train_config import TrainConfig
from services.graph_service import build_slide_graph
from services.metrics_service import aggregate_reports, evaluate
from services.model_service import (build_model, check_compatible, gene_vectors, init_model,
                                    predict_columns, refine_windows, slide_graph)
from services.optimizer_service import AdamW
from services.predictor_service import loss_total, predict
from services.sage_service import sage_forward
from services.system_service import system_service
from storage import write_json

logger = logging.getLogger(__name__)

EVAL_SPLITS = ('seen', 'unseen', 'all')
SWEEP_K_FEA = (1, 3, 5, 7, 10)


@dataclass
class TrainResult:
    checkpoint: Checkpoint
    history: List[Dict] = field(default_factory=list)

    def log_document(self) -> Dict:
        """Deterministic training log: no timings or memory figures."""
        return {
            'config': self.checkpoint.config.to_dict(),
            'seed': self.checkpoint.seed,
            'epochs_done': self.checkpoint.epochs_done,
            'epochs': list(self.history),
        }


def epoch_rng(seed: int, epoch: int) -> np.random.Generator:
    """Generator for slide order and gene sampling of one epoch."""
    return np.random.default_rng([seed, epoch + 1])


class TrainerService:
    """
    Service for training and applying the zero-shot model.
    """

    # ==================== Training ====================

    def _training_genes(self, dataset: Dataset, cfg: TrainConfig) -> List[str]:
        genes = dataset.split_genes(cfg.train_split)
        if not genes:
            raise DataError(f"No genes in the '{cfg.train_split}' split to train on")
        return genes

    def _start(self, dataset: Dataset, cfg: TrainConfig, resume: Optional[Checkpoint]):
        if resume is None:
            return build_model(cfg, dataset.dims), OptimizerState(), 0
        if resume.config.structure() != cfg.structure():
            raise ConfigError('Resumed checkpoint was trained with a different configuration')
        check_compatible(resume.dims, dataset.dims)
        if resume.epochs_done > cfg.epochs:
            raise ConfigError(
                f"Checkpoint already has {resume.epochs_done} epochs; requested {cfg.epochs}"
            )
        return resume.params, resume.optimizer, resume.epochs_done

    def train(self, dataset: Dataset, cfg: TrainConfig, resume: Optional[Checkpoint] = None,
              log_path: Optional[str] = None) -> TrainResult:
        """
        Train on the configured gene split.

        Only expression columns of the sampled training genes are read, so
        unseen columns never influence the result.

        Args:
            dataset: Validated dataset
            cfg: Training configuration
            resume: Checkpoint to continue from its ``epochs_done``
            log_path: Where to write the per-epoch JSON log

        Returns:
            TrainResult: final checkpoint and per-epoch history
        """
        cfg.validate()
        genes = self._training_genes(dataset, cfg)
        params, state, start_epoch = self._start(dataset, cfg, resume)
        dims = dict(resume.dims) if resume is not None else dataset.dims

        columns = np.array([dataset.gene_index(g) for g in genes])
        descs = [dataset.gene(g) for g in genes]
        graphs = [slide_graph(s, cfg) for s in dataset.slides]
        optimizer = AdamW(params.named_tensors(), cfg.lr, cfg.weight_decay, state)
        per_step = min(cfg.genes_per_step, len(genes))

        logger.info('Training %d epochs from epoch %d on %d slides, %d %s genes',
                    cfg.epochs - start_epoch, start_epoch, len(dataset.slides), len(genes),
                    cfg.train_split)
        logger.debug('Host %s', system_service.get_system_info())
        history = []
        for epoch in range(start_epoch, cfg.epochs):
            rng = epoch_rng(cfg.seed, epoch)
            losses = []
            for slide_pos in rng.permutation(len(dataset.slides)):
                slide = dataset.slides[slide_pos]
                picks = rng.choice(len(genes), size=per_step, replace=False)
                target = constant(slide.expression[:, columns[picks]])

                optimizer.zero_grad()
                with Tape() as tape:
                    z = refine_windows(slide, graphs[slide_pos], params)
                    v = gene_vectors([descs[p] for p in picks], params)
                    batch = PredictionBatch(z=z, v=v, y_hat=predict(z, v), y=target,
                                            genes=[genes[p] for p in picks])
                    loss = loss_total(batch.y_hat, batch.y)
                value = loss.item()
                if not np.isfinite(value):
                    raise NumericError(
                        f"Non-finite loss at step {optimizer.state.step + 1} "
                        f"(epoch {epoch + 1}, slide '{slide.slide_id}')"
                    )
                tape.backward(loss)
                optimizer.step()
                losses.append(value)

            entry = {'epoch': epoch + 1, 'loss': float(np.mean(losses)), 'steps': optimizer.state.step}
            if (epoch + 1) % cfg.log_every == 0 or epoch + 1 == cfg.epochs:
                report = self.evaluate_split(dataset, params, cfg, cfg.train_split, graphs)
                entry['pcc_m'] = report.pcc_m
                entry['mse'] = report.mse
            history.append(entry)
            logger.info('epoch %d loss %.6f %s pcc_m %s rss %.1f MB', epoch + 1, entry['loss'],
                        cfg.train_split, entry.get('pcc_m'),
                        system_service.get_process_info()['rss_mb'])
        optimizer.zero_grad()

        checkpoint = Checkpoint(params=params, config=cfg, dims=dims, seed=cfg.seed,
                                epochs_done=cfg.epochs, optimizer=optimizer.state)
        result = TrainResult(checkpoint, history)
        if log_path:
            write_json(log_path, result.log_document())
        return result

    # ==================== Inference ====================

    def evaluate_split(self, dataset: Dataset, params: ModelParams, cfg: TrainConfig,
                       split: str = UNSEEN, graphs: Optional[Sequence[SlideGraph]] = None) -> EvalReport:
        """
        Score every slide on one gene split and pool the per-slide reports.

        Never modifies ``params`` or ``dataset``.
        """
        if split not in EVAL_SPLITS:
            raise ConfigError(f"split must be one of {EVAL_SPLITS}, got '{split}'")
        genes = dataset.split_genes(split)
        if not genes:
            raise DataError(f"The '{split}' split holds no genes")
        columns = [dataset.gene_index(g) for g in genes]
        descs = [dataset.gene(g) for g in genes]
        if graphs is None:
            graphs = [slide_graph(s, cfg) for s in dataset.slides]

        cache = {}
        reports = []
        for slide, graph in zip(dataset.slides, graphs):
            z = refine_windows(slide, graph, params)
            y_hat = predict_columns(z, descs, params, cache)
            reports.append(evaluate(y_hat, slide.expression[:, columns], genes))
        return aggregate_reports(reports)

    def predict_slide(self, dataset: Dataset, params: ModelParams, cfg: TrainConfig,
                      slide_id: str, gene: str) -> np.ndarray:
        """Predicted expression of ``gene`` at every window of one slide."""
        slide = dataset.slide(slide_id)
        desc = dataset.gene(gene)
        z = refine_windows(slide, slide_graph(slide, cfg), params)
        return predict_columns(z, [desc], params)[:, 0]

    # ==================== Harnesses ====================

    def micro_grad_check(self, seed: int = 0, h: float = 1e-6, tol: float = 1e-4) -> GradCheckReport:
        """
        Finite-difference check of every parameter of a micro-model.

        Six windows with D_e=8, a refiner of width 16 projecting to D=8, one
        encoder block of width 8, and two genes with 3-token descriptions.
        """
        rng = np.random.default_rng(seed)
        n, d_e, d_t, length = 6, 8, 4, 3
        cfg = TrainConfig(k_pos=2, k_fea=2, sage_layers=2, hidden=16, proj_dim=8,
                          emb_blocks=1, emb_dim=8, heads=2, genes_per_step=2, seed=seed)
        params = init_model(cfg, {'D_e': d_e, 'D_T': d_t, 'L_max': length}, rng)
        for name, tensor in params.named_tensors():
            tensor.name = name

        positions = rng.uniform(0.0, 3.0, size=(n, 2))
        features = rng.normal(size=(n, d_e))
        graph = build_slide_graph(positions, features, cfg.k_pos, cfg.k_fea, cfg.fea_metric)
        descs = [GeneDescription(f'g{c}', rng.normal(size=(length, d_t)), SEEN) for c in range(2)]
        target = constant(rng.normal(size=(n, len(descs))))
        h_in = constant(features)

        def loss():
            z = sage_forward(h_in, graph, params.sage)
            return loss_total(predict(z, gene_vectors(descs, params)), target)

        report = grad_check(loss, params.tensors(), h=h, tol=tol)
        logger.info('Gradient check over %d tensors: max relative error %.3e',
                    len(report.params), report.max_rel_error)
        return report

    def sweep_neighbors(self, dataset: Dataset, cfg: TrainConfig,
                        k_values: Sequence[int] = SWEEP_K_FEA, split: str = UNSEEN) -> Dict:
        """Train and evaluate once per feature-neighbor count."""
        series = []
        for k in k_values:
            run_cfg = replace(cfg, k_fea=int(k))
            result = self.train(dataset, run_cfg)
            report = self.evaluate_split(dataset, result.checkpoint.params, run_cfg, split)
            logger.info('k_fea %d: %s pcc_m %s', k, split, report.pcc_m)
            series.append({'k_fea': int(k), 'report': report.to_dict()})
        return {'k_fea': [int(k) for k in k_values], 'split': split, 'series': series}


# Singleton instance
trainer_service = TrainerService()
