"""
Grad Check Command
===================
Finite-difference check of the micro-model; exits 1 if any tensor fails.
"""

import argparse

from commands.common import EXIT_FAILED_CHECK, EXIT_OK, emit_json, json_errors, resolve_seed
from config import get_config
from services.trainer_service import trainer_service


def register(subparsers):
    config = get_config()
    parser = subparsers.add_parser('grad-check', help='Check gradients of the micro-model')
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--step', type=float, default=config.GRAD_CHECK_STEP)
    parser.add_argument('--tol', type=float, default=config.GRAD_CHECK_TOLERANCE)
    parser.add_argument('--report', default=None, help='Write the report here instead of stdout')
    parser.set_defaults(handler=run)


@json_errors
def run(args: argparse.Namespace) -> int:
    report = trainer_service.micro_grad_check(seed=resolve_seed(args.seed), h=args.step, tol=args.tol)
    emit_json(report.to_dict(), args.report)
    return EXIT_OK if report.passed else EXIT_FAILED_CHECK
