"""
stzero - Zero-Shot Gene Expression Prediction
==============================================
Command-line entry point.

Predicts spatial gene expression for genes never seen in training from
their description embeddings: window graphs refined by a GraphSAGE stack,
descriptions encoded by a small transformer, dot-product prediction.
"""

import argparse
import logging
import sys

from commands import COMMANDS
from config import get_config

__version__ = '1.0.0'


def create_parser() -> argparse.ArgumentParser:
    """
    Parser factory registering every subcommand.

    Returns:
        argparse.ArgumentParser
    """
    parser = argparse.ArgumentParser(
        prog='stzero',
        description='Zero-shot spatial gene-expression prediction from gene descriptions.',
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def configure_logging(config_class=None):
    """Root logger to stderr so stdout stays machine-readable."""
    if config_class is None:
        config_class = get_config()
    logging.basicConfig(
        level=getattr(logging, config_class.LOG_LEVEL, logging.INFO),
        format=config_class.LOG_FORMAT,
        stream=sys.stderr,
    )


def main(argv=None) -> int:
    configure_logging()
    args = create_parser().parse_args(argv)
    return args.handler(args)


if __name__ == '__main__':
    sys.exit(main())
