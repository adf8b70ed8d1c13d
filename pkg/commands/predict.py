"""
Predict Command
================
Per-window predictions of one gene on one slide, as CSV.
"""

import argparse
import csv
import os
import sys

from commands.common import EXIT_OK, json_errors
from services.checkpoint_service import checkpoint_service
from services.dataset_service import dataset_service
from services.model_service import check_compatible
from services.trainer_service import trainer_service

CSV_HEADER = ('window_index', 'x', 'y', 'predicted')


def register(subparsers):
    parser = subparsers.add_parser('predict', help='Predict one gene on one slide')
    parser.add_argument('--data', required=True, help='Dataset directory')
    parser.add_argument('--ckpt', required=True, help='Checkpoint file')
    parser.add_argument('--slide', required=True, help='Slide identifier')
    parser.add_argument('--gene', required=True, help='Gene name (seen or unseen)')
    parser.add_argument('--out', default=None, help='CSV file (default: stdout)')
    parser.set_defaults(handler=run)


def write_rows(handle, positions, predicted):
    writer = csv.writer(handle, lineterminator='\n')
    writer.writerow(CSV_HEADER)
    for i, ((x, y), value) in enumerate(zip(positions, predicted)):
        writer.writerow((i, repr(float(x)), repr(float(y)), repr(float(value))))


@json_errors
def run(args: argparse.Namespace) -> int:
    dataset = dataset_service.load_dataset(args.data)
    ckpt = checkpoint_service.load_checkpoint(args.ckpt)
    check_compatible(ckpt.dims, dataset.dims)

    predicted = trainer_service.predict_slide(dataset, ckpt.params, ckpt.config, args.slide, args.gene)
    positions = dataset.slide(args.slide).positions
    if args.out:
        os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
        with open(args.out, 'w', encoding='utf-8', newline='') as handle:
            write_rows(handle, positions, predicted)
    else:
        write_rows(sys.stdout, positions, predicted)
    return EXIT_OK
