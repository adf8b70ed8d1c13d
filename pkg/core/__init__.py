"""
stzero Core Package
====================
Minimal dense tensors with reverse-mode automatic differentiation.
"""

from core.tensor import Tape, Tensor, backward, constant, parameter, record_op
from core.gradcheck import GradCheckReport, grad_check

__all__ = [
    'Tape', 'Tensor', 'backward', 'constant', 'parameter', 'record_op',
    'GradCheckReport', 'grad_check',
]
