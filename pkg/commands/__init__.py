"""
stzero Commands Package
========================
One module per subcommand, each exposing ``register(subparsers)``.
"""

from commands import evaluate, grad_check, graph_stats, predict, sweep, synth, train

COMMANDS = [synth, graph_stats, train, evaluate, predict, grad_check, sweep]

__all__ = ['COMMANDS']
