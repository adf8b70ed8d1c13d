"""
Optimizer Service
==================
Adaptive moment estimation with decoupled weight decay.
"""

from typing import List, Tuple

import numpy as np

from core.tensor import Tensor
from errors import NumericError
from models.checkpoint import OptimizerState
from storage import to_storage_grid

BETA1 = 0.9
BETA2 = 0.999
EPSILON = 1e-8


class AdamW:
    """
    Updates named tensors in place from their ``.grad``.

    Parameters and moments are rounded onto the float32 grid after every
    step, so the state written to a checkpoint is the state in memory.
    """

    def __init__(self, named: List[Tuple[str, Tensor]], lr: float, weight_decay: float,
                 state: OptimizerState = None):
        self.named = named
        self.lr = lr
        self.weight_decay = weight_decay
        self.state = state if state is not None else OptimizerState()
        for name, tensor in named:
            self.state.first_moment.setdefault(name, np.zeros_like(tensor.data))
            self.state.second_moment.setdefault(name, np.zeros_like(tensor.data))

    def step(self):
        self.state.step += 1
        t = self.state.step
        correction1 = 1.0 - BETA1 ** t
        correction2 = 1.0 - BETA2 ** t
        for name, tensor in self.named:
            grad = tensor.grad if tensor.grad is not None else np.zeros_like(tensor.data)
            if not np.all(np.isfinite(grad)):
                raise NumericError(f"Non-finite gradient for '{name}' at optimizer step {t}")
            m = BETA1 * self.state.first_moment[name] + (1.0 - BETA1) * grad
            v = BETA2 * self.state.second_moment[name] + (1.0 - BETA2) * grad * grad
            m = to_storage_grid(m)
            v = to_storage_grid(v)
            self.state.first_moment[name] = m
            self.state.second_moment[name] = v

            data = tensor.data * (1.0 - self.lr * self.weight_decay)
            data = data - self.lr * (m / correction1) / (np.sqrt(v / correction2) + EPSILON)
            tensor.data = to_storage_grid(data)

    def zero_grad(self):
        for _, tensor in self.named:
            tensor.zero_grad()
