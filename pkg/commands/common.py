"""
Shared command helpers: TrainConfig flags, JSON output and error replies.
"""

import argparse
import functools
import json
import logging
import sys
from dataclasses import MISSING, fields
from typing import Callable, Dict, Optional

from config import Config
from errors import NumericError, StzeroError
from models.train_config import TrainConfig
from storage import dump_json, write_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_INVALID = 2


def flag_name(field_name: str) -> str:
    return '--' + field_name.replace('_', '-')


def add_dataclass_flags(parser: argparse.ArgumentParser, cls, skip=()):
    """One kebab-case flag per dataclass field, typed from its default."""
    for f in fields(cls):
        if f.name.startswith('_') or f.name in skip or f.default is MISSING:
            continue
        if isinstance(f.default, bool):
            parser.add_argument(flag_name(f.name), dest=f.name, action='store_true',
                                default=f.default)
        else:
            parser.add_argument(flag_name(f.name), dest=f.name, type=type(f.default),
                                default=f.default, metavar=f.name.upper())


def dataclass_from_args(cls, args: argparse.Namespace, **overrides):
    values = {f.name: getattr(args, f.name) for f in fields(cls) if hasattr(args, f.name)}
    values.update(overrides)
    return cls(**values)


def resolve_seed(seed: int) -> int:
    """STZERO_SEED wins over the --seed flag whenever it is set."""
    override = Config.seed_override()
    if override is not None:
        logger.info('Seed %d taken from STZERO_SEED', override)
        return override
    return seed


def add_train_flags(parser: argparse.ArgumentParser, skip=()):
    add_dataclass_flags(parser, TrainConfig, skip)


def train_config_from_args(args: argparse.Namespace) -> TrainConfig:
    cfg = dataclass_from_args(TrainConfig, args)
    cfg.seed = resolve_seed(cfg.seed)
    return cfg.validate()


def emit_json(data: Dict, path: Optional[str] = None):
    """Write ``data`` to ``path``, or to stdout when no path is given."""
    if path:
        write_json(path, data)
        logger.info('Report written to %s', path)
    else:
        sys.stdout.write(dump_json(data))


def error_reply(message: str, code: int) -> int:
    sys.stderr.write(json.dumps({'success': False, 'error': message}) + '\n')
    return code


def json_errors(run: Callable[[argparse.Namespace], int]):
    """Turn library errors into a JSON error reply and a nonzero exit code."""

    @functools.wraps(run)
    def wrapper(args: argparse.Namespace) -> int:
        try:
            return run(args)
        except NumericError as e:
            logger.error('%s', e)
            return error_reply(str(e), EXIT_FAILED_CHECK)
        except StzeroError as e:
            logger.error('%s', e)
            return error_reply(str(e), EXIT_INVALID)

    return wrapper
