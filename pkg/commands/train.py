"""
Train Command
==============
Train on the seen genes and write a checkpoint plus a JSON training log.
"""

import argparse

from commands.common import EXIT_OK, add_train_flags, emit_json, json_errors, train_config_from_args
from services.checkpoint_service import checkpoint_service
from services.dataset_service import dataset_service
from services.trainer_service import trainer_service


def register(subparsers):
    parser = subparsers.add_parser('train', help='Train a model')
    parser.add_argument('--data', required=True, help='Dataset directory')
    parser.add_argument('--out', required=True, help='Checkpoint file to write')
    parser.add_argument('--resume', default=None, help='Checkpoint to continue training from')
    parser.add_argument('--log', default=None, help='Training log (default: <out>.log.json)')
    add_train_flags(parser)
    parser.set_defaults(handler=run)


@json_errors
def run(args: argparse.Namespace) -> int:
    cfg = train_config_from_args(args)
    dataset = dataset_service.load_dataset(args.data)
    resume = checkpoint_service.load_checkpoint(args.resume) if args.resume else None
    log_path = args.log or f'{args.out}.log.json'

    result = trainer_service.train(dataset, cfg, resume=resume, log_path=log_path)
    checkpoint_service.save_checkpoint(result.checkpoint, args.out)

    last = result.history[-1] if result.history else {}
    emit_json({
        'success': True,
        'checkpoint': args.out,
        'log': log_path,
        'epochs_done': result.checkpoint.epochs_done,
        'steps': result.checkpoint.optimizer.step,
        'loss': last.get('loss'),
        'pcc_m': last.get('pcc_m'),
    })
    return EXIT_OK
