"""
Tensor Operations
==================
Differentiable matrix operations. Every function computes its result with
numpy and registers a local-gradient closure through ``record_op``.
"""

from typing import Sequence

import numpy as np

from core.tensor import Tensor, record_op
from errors import DimensionError

LAYER_NORM_EPS = 1e-5
PEARSON_EPS = 1e-8


def _row_broadcast(a: Tensor, b: Tensor, op_name: str) -> bool:
    """True when ``b`` is a 1xk row broadcast over ``a``; raise on mismatch."""
    if a.shape == b.shape:
        return False
    if b.shape[0] == 1 and b.shape[1] == a.shape[1]:
        return True
    raise DimensionError(f"{op_name}: shapes {a.shape} and {b.shape} do not agree")


def _reduce_like(grad: np.ndarray, broadcast: bool) -> np.ndarray:
    return grad.sum(axis=0, keepdims=True) if broadcast else grad


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul: inner dimensions differ for {a.shape} and {b.shape}")
    out = Tensor(a.data @ b.data)

    def backward(g):
        return g @ b.data.T, a.data.T @ g

    return record_op(out, (a, b), backward)


def add(a: Tensor, b: Tensor) -> Tensor:
    broadcast = _row_broadcast(a, b, 'add')
    out = Tensor(a.data + b.data)

    def backward(g):
        return g, _reduce_like(g, broadcast)

    return record_op(out, (a, b), backward)


def sub(a: Tensor, b: Tensor) -> Tensor:
    broadcast = _row_broadcast(a, b, 'sub')
    out = Tensor(a.data - b.data)

    def backward(g):
        return g, -_reduce_like(g, broadcast)

    return record_op(out, (a, b), backward)


def mul(a: Tensor, b: Tensor) -> Tensor:
    broadcast = _row_broadcast(a, b, 'mul')
    out = Tensor(a.data * b.data)

    def backward(g):
        return g * b.data, _reduce_like(g * a.data, broadcast)

    return record_op(out, (a, b), backward)


def scale(x: Tensor, factor: float) -> Tensor:
    out = Tensor(x.data * factor)

    def backward(g):
        return (g * factor,)

    return record_op(out, (x,), backward)


def shift(x: Tensor, offset: float) -> Tensor:
    out = Tensor(x.data + offset)

    def backward(g):
        return (g,)

    return record_op(out, (x,), backward)


def transpose(x: Tensor) -> Tensor:
    out = Tensor(x.data.T)

    def backward(g):
        return (g.T,)

    return record_op(out, (x,), backward)


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0
    out = Tensor(np.where(mask, x.data, 0.0))

    def backward(g):
        return (g * mask,)

    return record_op(out, (x,), backward)


def softmax_rows(x: Tensor) -> Tensor:
    shifted = x.data - x.data.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    probs = exp / exp.sum(axis=1, keepdims=True)
    out = Tensor(probs)

    def backward(g):
        inner = (g * probs).sum(axis=1, keepdims=True)
        return (probs * (g - inner),)

    return record_op(out, (x,), backward)


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor) -> Tensor:
    """Normalise each row to zero mean and unit variance, then apply gain and bias."""
    width = x.shape[1]
    if gain.shape != (1, width) or bias.shape != (1, width):
        raise DimensionError(
            f"layer_norm: gain {gain.shape} and bias {bias.shape} must be (1, {width})"
        )
    # Mean taken relative to the first column so constant rows centre to exact zeros.
    anchor = x.data[:, :1]
    centered = x.data - (anchor + (x.data - anchor).mean(axis=1, keepdims=True))
    var = (centered ** 2).mean(axis=1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + LAYER_NORM_EPS)
    normed = centered * inv_std
    out = Tensor(normed * gain.data + bias.data)

    def backward(g):
        d_normed = g * gain.data
        d_x = inv_std * (
            d_normed
            - d_normed.mean(axis=1, keepdims=True)
            - normed * (d_normed * normed).mean(axis=1, keepdims=True)
        )
        return d_x, (g * normed).sum(axis=0, keepdims=True), g.sum(axis=0, keepdims=True)

    return record_op(out, (x, gain, bias), backward)


def concat_cols(parts: Sequence[Tensor]) -> Tensor:
    if not parts:
        raise DimensionError('concat_cols: no parts given')
    rows = parts[0].shape[0]
    for part in parts:
        if part.shape[0] != rows:
            raise DimensionError(
                f"concat_cols: row counts differ ({', '.join(str(p.shape) for p in parts)})"
            )
    out = Tensor(np.concatenate([p.data for p in parts], axis=1))
    bounds = np.cumsum([0] + [p.shape[1] for p in parts])

    def backward(g):
        return [g[:, bounds[i]:bounds[i + 1]] for i in range(len(parts))]

    return record_op(out, tuple(parts), backward)


def concat_rows(parts: Sequence[Tensor]) -> Tensor:
    if not parts:
        raise DimensionError('concat_rows: no parts given')
    cols = parts[0].shape[1]
    for part in parts:
        if part.shape[1] != cols:
            raise DimensionError(
                f"concat_rows: column counts differ ({', '.join(str(p.shape) for p in parts)})"
            )
    out = Tensor(np.concatenate([p.data for p in parts], axis=0))
    bounds = np.cumsum([0] + [p.shape[0] for p in parts])

    def backward(g):
        return [g[bounds[i]:bounds[i + 1], :] for i in range(len(parts))]

    return record_op(out, tuple(parts), backward)


def slice_rows(x: Tensor, start: int, stop: int) -> Tensor:
    if not 0 <= start <= stop <= x.shape[0]:
        raise DimensionError(f"slice_rows: [{start}, {stop}) outside {x.shape}")
    out = Tensor(x.data[start:stop, :])

    def backward(g):
        full = np.zeros_like(x.data)
        full[start:stop, :] = g
        return (full,)

    return record_op(out, (x,), backward)


def slice_cols(x: Tensor, start: int, stop: int) -> Tensor:
    if not 0 <= start <= stop <= x.shape[1]:
        raise DimensionError(f"slice_cols: [{start}, {stop}) outside {x.shape}")
    out = Tensor(x.data[:, start:stop])

    def backward(g):
        full = np.zeros_like(x.data)
        full[:, start:stop] = g
        return (full,)

    return record_op(out, (x,), backward)


def mean_rows(x: Tensor) -> Tensor:
    """Column-wise mean as a 1xk row; an empty input gives a zero row."""
    rows, cols = x.shape
    if rows == 0:
        out = Tensor(np.zeros((1, cols)))

        def backward_empty(g):
            return (np.zeros((0, cols)),)

        return record_op(out, (x,), backward_empty)

    anchor = x.data[:1, :]
    out = Tensor(anchor + (x.data - anchor).mean(axis=0, keepdims=True))

    def backward(g):
        return (np.repeat(g / rows, rows, axis=0),)

    return record_op(out, (x,), backward)


def sum_rows(x: Tensor) -> Tensor:
    out = Tensor(x.data.sum(axis=0, keepdims=True))

    def backward(g):
        return (np.repeat(g, x.shape[0], axis=0),)

    return record_op(out, (x,), backward)


def sum_all(x: Tensor) -> Tensor:
    out = Tensor(np.array([[x.data.sum()]]))

    def backward(g):
        return (np.full(x.shape, g[0, 0]),)

    return record_op(out, (x,), backward)


def mean_all(x: Tensor) -> Tensor:
    count = x.data.size
    if count == 0:
        raise DimensionError('mean_all: empty tensor')
    out = Tensor(np.array([[x.data.mean()]]))

    def backward(g):
        return (np.full(x.shape, g[0, 0] / count),)

    return record_op(out, (x,), backward)


def pearson_cols(x: Tensor, y: Tensor) -> Tensor:
    """
    Per-column Pearson correlation between ``x`` and ``y`` as a 1xk row.

    A column that is constant on either side scores 0 and passes no
    gradient. The denominator is floored at ``PEARSON_EPS``; r is clipped to
    [-1, 1] against rounding.
    """
    if x.shape != y.shape:
        raise DimensionError(f"pearson_cols: shapes {x.shape} and {y.shape} differ")
    a = x.data - x.data.mean(axis=0, keepdims=True)
    b = y.data - y.data.mean(axis=0, keepdims=True)
    live = (np.ptp(x.data, axis=0) > 0) & (np.ptp(y.data, axis=0) > 0)
    norm_a = np.sqrt((a * a).sum(axis=0, keepdims=True))
    norm_b = np.sqrt((b * b).sum(axis=0, keepdims=True))
    product = norm_a * norm_b
    floored = product < PEARSON_EPS
    denom = np.where(floored, PEARSON_EPS, product)
    cross = (a * b).sum(axis=0, keepdims=True)
    r = np.where(live, np.clip(cross / denom, -1.0, 1.0), 0.0)
    out = Tensor(r)

    def backward(g):
        g_live = np.where(live, g, 0.0)
        # d(denom)/da vanishes where the floor is active.
        grows = np.where(floored, 0.0, 1.0)
        safe_a = np.where(norm_a > 0, norm_a, 1.0)
        safe_b = np.where(norm_b > 0, norm_b, 1.0)
        d_a = g_live * (b / denom - grows * cross * norm_b * a / (safe_a * denom ** 2))
        d_b = g_live * (a / denom - grows * cross * norm_a * b / (safe_b * denom ** 2))
        d_x = d_a - d_a.mean(axis=0, keepdims=True)
        d_y = d_b - d_b.mean(axis=0, keepdims=True)
        return d_x, d_y

    return record_op(out, (x, y), backward)
