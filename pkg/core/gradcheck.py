"""
Gradient Checker
=================
Compares tape gradients with central finite differences.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence

import numpy as np

from core.tensor import Tape, Tensor
from errors import NumericError

DEFAULT_STEP = 1e-6
DEFAULT_TOLERANCE = 1e-4
# Gradients smaller than this are compared on an absolute scale.
DEFAULT_FLOOR = 1e-4


@dataclass
class ParamCheck:
    name: str
    shape: tuple
    max_rel_error: float
    passed: bool

    def to_dict(self) -> Dict:
        return {
            'name': self.name,
            'shape': list(self.shape),
            'max_rel_error': self.max_rel_error,
            'passed': self.passed,
        }


@dataclass
class GradCheckReport:
    step: float
    tolerance: float
    params: List[ParamCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.params)

    @property
    def max_rel_error(self) -> float:
        return max((p.max_rel_error for p in self.params), default=0.0)

    def to_dict(self) -> Dict:
        return {
            'passed': self.passed,
            'step': self.step,
            'tolerance': self.tolerance,
            'max_rel_error': self.max_rel_error,
            'params': [p.to_dict() for p in self.params],
        }


def _evaluate(f: Callable[[], Tensor], label: str) -> float:
    value = f().item()
    if not np.isfinite(value):
        raise NumericError(f"Non-finite loss while perturbing {label}")
    return value


def grad_check(f: Callable[[], Tensor], params: Sequence[Tensor],
               h: float = DEFAULT_STEP, tol: float = DEFAULT_TOLERANCE,
               floor: float = DEFAULT_FLOOR) -> GradCheckReport:
    """
    Check tape gradients of a scalar computation against central differences.

    Args:
        f: Zero-argument callable building the 1x1 loss from ``params``
        params: Tensors to check; perturbed in place and restored
        h: Finite-difference step
        tol: Maximum accepted relative error
        floor: Lower bound of the relative-error denominator

    Returns:
        GradCheckReport: per-parameter maximum relative error and verdict
    """
    for p in params:
        p.zero_grad()
    with Tape() as tape:
        loss = f()
    if not np.isfinite(loss.item()):
        raise NumericError('Non-finite loss at the unperturbed point')
    tape.backward(loss)

    report = GradCheckReport(step=h, tolerance=tol)
    for index, p in enumerate(params):
        label = p.name or f'param[{index}]'
        analytic = p.grad if p.grad is not None else np.zeros_like(p.data)
        if not np.all(np.isfinite(analytic)):
            raise NumericError(f"Non-finite tape gradient for {label}")

        worst = 0.0
        for idx in np.ndindex(p.data.shape):
            original = p.data[idx]
            p.data[idx] = original + h
            upper = _evaluate(f, label)
            p.data[idx] = original - h
            lower = _evaluate(f, label)
            p.data[idx] = original
            numeric = (upper - lower) / (2.0 * h)
            a = analytic[idx]
            denom = max(abs(a), abs(numeric), floor)
            worst = max(worst, abs(a - numeric) / denom)

        report.params.append(ParamCheck(label, p.data.shape, float(worst), bool(worst <= tol)))
    return report
