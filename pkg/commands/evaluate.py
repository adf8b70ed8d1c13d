"""
Eval Command
=============
Score a checkpoint on one gene split.
"""

import argparse

from commands.common import EXIT_OK, emit_json, json_errors
from services.checkpoint_service import checkpoint_service
from services.dataset_service import dataset_service
from services.model_service import check_compatible
from services.trainer_service import EVAL_SPLITS, trainer_service


def register(subparsers):
    parser = subparsers.add_parser('eval', help='Evaluate a checkpoint')
    parser.add_argument('--data', required=True, help='Dataset directory')
    parser.add_argument('--ckpt', required=True, help='Checkpoint file')
    parser.add_argument('--split', choices=EVAL_SPLITS, default='unseen')
    parser.add_argument('--report', default=None, help='Write the report here instead of stdout')
    parser.set_defaults(handler=run)


@json_errors
def run(args: argparse.Namespace) -> int:
    dataset = dataset_service.load_dataset(args.data)
    ckpt = checkpoint_service.load_checkpoint(args.ckpt)
    check_compatible(ckpt.dims, dataset.dims)

    report = trainer_service.evaluate_split(dataset, ckpt.params, ckpt.config, args.split)
    emit_json(report.to_dict(), args.report)
    return EXIT_OK
