"""
Synth Command
==============
Generate a planted-model dataset.
"""

import argparse
import os

from commands.common import (EXIT_OK, add_dataclass_flags, dataclass_from_args, emit_json,
                             json_errors, resolve_seed)
from config import get_config
from services.dataset_service import dataset_service
from services.synth_service import SynthConfig, save_latents, synth_dataset


def register(subparsers):
    parser = subparsers.add_parser('synth', help='Generate a planted-model dataset')
    parser.add_argument('--out', default=None,
                        help='Dataset directory (default: $STZERO_DATA_DIR/planted)')
    parser.add_argument('--dump-latents', action='store_true',
                        help='Also write the planted latents under <out>/latents/')
    add_dataclass_flags(parser, SynthConfig)
    parser.set_defaults(handler=run)


@json_errors
def run(args: argparse.Namespace) -> int:
    cfg = dataclass_from_args(SynthConfig, args)
    cfg.seed = resolve_seed(cfg.seed)
    out = args.out or os.path.join(get_config().DATA_DIR, 'planted')

    dataset, latents = synth_dataset(cfg, return_latents=True)
    dataset_service.save_dataset(dataset, out)
    if args.dump_latents:
        save_latents(latents, os.path.join(out, 'latents'))

    emit_json({'success': True, 'path': out, 'seed': cfg.seed, **dataset_service.summary(dataset)})
    return EXIT_OK
