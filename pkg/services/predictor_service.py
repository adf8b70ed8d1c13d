"""
Predictor Service
==================
Dot-product expression prediction and the MSE + Pearson training objective.
"""

from core import ops
from core.tensor import Tensor
from errors import ContractError, DimensionError


def predict(z: Tensor, v: Tensor) -> Tensor:
    """y_hat[i, c] = z_i . v_c for N x D window features and G x D gene vectors."""
    if z.shape[1] != v.shape[1]:
        raise DimensionError(f"Window features {z.shape} and gene vectors {v.shape} differ in width")
    return ops.matmul(z, ops.transpose(v))


def _same_shape(y_hat: Tensor, y: Tensor):
    if y_hat.shape != y.shape:
        raise DimensionError(f"Prediction {y_hat.shape} and target {y.shape} differ in shape")


def loss_mse(y_hat: Tensor, y: Tensor) -> Tensor:
    _same_shape(y_hat, y)
    diff = ops.sub(y_hat, y)
    return ops.mean_all(ops.mul(diff, diff))


def loss_pcc(y_hat: Tensor, y: Tensor) -> Tensor:
    """
    Mean over genes of 1 - r, with r the Pearson correlation across windows.

    Columns constant on either side contribute exactly 1.
    """
    _same_shape(y_hat, y)
    if y_hat.shape[0] < 2:
        raise ContractError(f"Pearson loss needs at least 2 windows, got {y_hat.shape[0]}")
    r = ops.pearson_cols(y_hat, y)
    return ops.shift(ops.scale(ops.mean_all(r), -1.0), 1.0)


def loss_total(y_hat: Tensor, y: Tensor) -> Tensor:
    """Unweighted sum of the MSE and Pearson terms."""
    return ops.add(loss_mse(y_hat, y), loss_pcc(y_hat, y))
