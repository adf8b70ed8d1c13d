"""
Tensor and Tape
================
Dense 2-D float64 tensors with define-by-run reverse-mode differentiation.

Operations record onto the innermost active ``Tape``. Outside a tape nothing
is recorded, which is how inference and finite-difference probes run.
"""

import threading
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from errors import ContractError, DimensionError

BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]

_state = threading.local()


class Tensor:
    """
    Row-major float64 matrix with an optional gradient.

    Args:
        data: Array-like convertible to a 2-D float64 array
        requires_grad: Whether backward() should populate ``grad``
        name: Optional label used in diagnostics
    """

    __slots__ = ('data', 'requires_grad', 'grad', 'name', '_tape')

    def __init__(self, data, requires_grad: bool = False, name: Optional[str] = None):
        array = np.array(data, dtype=np.float64)
        if array.ndim == 0:
            array = array.reshape(1, 1)
        elif array.ndim == 1:
            array = array.reshape(1, -1)
        elif array.ndim != 2:
            raise DimensionError(f"Tensor must be 2-D, got shape {array.shape}")
        self.data = array
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self._tape: Optional['Tape'] = None

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape

    def zero_grad(self):
        self.grad = None

    def item(self) -> float:
        if self.data.size != 1:
            raise ContractError(f"item() needs a 1x1 tensor, got {self.shape}")
        return float(self.data[0, 0])

    def numpy(self) -> np.ndarray:
        return self.data

    def __repr__(self):
        label = f" {self.name}" if self.name else ''
        return f'<Tensor{label} {self.shape[0]}x{self.shape[1]}>'


class _Node:
    __slots__ = ('output', 'inputs', 'backward')

    def __init__(self, output: Tensor, inputs: Tuple[Tensor, ...], backward: BackwardFn):
        self.output = output
        self.inputs = inputs
        self.backward = backward


class Tape:
    """
    Ordered record of executed operations.

    Use as a context manager around a forward pass, then call ``backward``
    once with the scalar loss produced inside it.
    """

    def __init__(self):
        self._nodes: List[_Node] = []
        self._replayed = False

    def __enter__(self) -> 'Tape':
        stack = _stack()
        stack.append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        stack = _stack()
        if stack and stack[-1] is self:
            stack.pop()
        return False

    def __len__(self):
        return len(self._nodes)

    def record(self, output: Tensor, inputs: Sequence[Tensor], backward: BackwardFn):
        if self._replayed:
            raise ContractError('Tape already replayed; start a new tape for a new forward pass')
        output.requires_grad = True
        output._tape = self
        self._nodes.append(_Node(output, tuple(inputs), backward))

    def backward(self, loss: Tensor):
        """
        Replay the tape in reverse execution order.

        Args:
            loss: 1x1 tensor recorded on this tape

        Raises:
            ContractError: non-scalar loss, foreign loss, or a second replay
        """
        if loss.shape != (1, 1):
            raise ContractError(f"backward() needs a 1x1 loss, got {loss.shape}")
        if loss._tape is not self:
            raise ContractError('Loss is not connected to this tape')
        if self._replayed:
            raise ContractError('Tape already replayed; reset parameters and run a new forward pass')
        self._replayed = True

        grads = {id(loss): np.ones((1, 1))}
        produced = {id(node.output) for node in self._nodes}
        leaves = {}

        for node in reversed(self._nodes):
            out_grad = grads.get(id(node.output))
            if out_grad is None:
                continue
            node.output.grad = out_grad
            local = node.backward(out_grad)
            for tensor, g in zip(node.inputs, local):
                if g is None or not tensor.requires_grad:
                    continue
                key = id(tensor)
                if key in grads:
                    grads[key] = grads[key] + g
                else:
                    grads[key] = g
                if key not in produced:
                    leaves[key] = tensor

        for key, tensor in leaves.items():
            g = grads[key]
            tensor.grad = g.copy() if tensor.grad is None else tensor.grad + g


def _stack() -> List[Tape]:
    stack = getattr(_state, 'tapes', None)
    if stack is None:
        stack = []
        _state.tapes = stack
    return stack


def active_tape() -> Optional[Tape]:
    """Return the innermost tape of this thread, if any."""
    stack = _stack()
    return stack[-1] if stack else None


def record_op(output: Tensor, inputs: Sequence[Tensor], backward: BackwardFn) -> Tensor:
    """
    Register an executed operation on the active tape.

    Nothing is recorded when no tape is active or when no input requires a
    gradient. ``backward`` maps the output gradient to one gradient (or None)
    per input, in input order.
    """
    tape = active_tape()
    if tape is not None and any(t.requires_grad for t in inputs):
        tape.record(output, inputs, backward)
    return output


def backward(loss: Tensor):
    """Replay the tape that produced ``loss``."""
    if loss.shape != (1, 1):
        raise ContractError(f"backward() needs a 1x1 loss, got {loss.shape}")
    if loss._tape is None:
        raise ContractError('Loss is not connected to any tape')
    loss._tape.backward(loss)


def constant(data, name: Optional[str] = None) -> Tensor:
    """Wrap an array as a tensor that never receives gradients."""
    return Tensor(data, requires_grad=False, name=name)


def parameter(data, name: Optional[str] = None) -> Tensor:
    """Wrap an array as a trainable tensor."""
    return Tensor(data, requires_grad=True, name=name)
