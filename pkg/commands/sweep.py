"""
Sweep Command
==============
Train and evaluate once per feature-neighbor count.
"""

import argparse

from commands.common import EXIT_OK, add_train_flags, emit_json, json_errors, train_config_from_args
from errors import ConfigError
from services.dataset_service import dataset_service
from services.trainer_service import EVAL_SPLITS, SWEEP_K_FEA, trainer_service


def parse_k_values(text: str):
    try:
        values = [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise ConfigError(f"--k-values must be comma-separated integers, got '{text}'") from None
    if not values or min(values) < 0:
        raise ConfigError(f"--k-values must list non-negative counts, got '{text}'")
    return values


def register(subparsers):
    parser = subparsers.add_parser('sweep', help='Neighbor-count sweep over k_fea')
    parser.add_argument('--data', required=True, help='Dataset directory')
    parser.add_argument('--k-values', dest='k_values', default=','.join(str(k) for k in SWEEP_K_FEA))
    parser.add_argument('--split', choices=EVAL_SPLITS, default='unseen')
    parser.add_argument('--report', default=None, help='Write the series here instead of stdout')
    add_train_flags(parser, skip=('k_fea',))
    parser.set_defaults(handler=run)


@json_errors
def run(args: argparse.Namespace) -> int:
    k_values = parse_k_values(args.k_values)
    cfg = train_config_from_args(args)
    dataset = dataset_service.load_dataset(args.data)
    emit_json(trainer_service.sweep_neighbors(dataset, cfg, k_values, args.split), args.report)
    return EXIT_OK
