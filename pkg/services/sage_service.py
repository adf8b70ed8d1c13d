"""
SAGE Service
=============
Window feature refinement over the two neighbor edge types.
"""

from typing import Optional

import numpy as np

from core import ops
from core.tensor import Tensor, constant, parameter
from errors import DimensionError
from models.graph import SlideGraph
from models.params import NO_ACTIVATION, RELU, SageLayer, SageStack


def init_sage_stack(d_e: int, hidden: int, d: int, n_layers: int,
                    rng: np.random.Generator) -> SageStack:
    """
    Seeded refiner weights, uniform in +-sqrt(1/fan_in) with fan_in = 3 * d_in.

    ReLU follows every layer except the last.
    """
    widths = [d_e] + [hidden] * (n_layers - 1) + [d]
    layers = []
    for index in range(n_layers):
        fan_in = 3 * widths[index]
        bound = np.sqrt(1.0 / fan_in)
        weight = rng.uniform(-bound, bound, size=(fan_in, widths[index + 1]))
        activation = RELU if index < n_layers - 1 else NO_ACTIVATION
        layers.append(SageLayer(parameter(weight), activation))
    stack = SageStack(layers=layers, d_e=d_e, d=d)
    stack.validate()
    return stack


def sage_layer_forward(h: Tensor, graph: SlideGraph, layer: SageLayer,
                       pos_op: Optional[Tensor] = None,
                       fea_op: Optional[Tensor] = None) -> Tensor:
    """
    One refinement layer: row i = act([h_i || mean pos nbrs || mean fea nbrs] W).

    Nodes without neighbors of a kind contribute a zero block for it.
    """
    if graph.n_nodes != h.shape[0]:
        raise DimensionError(f"Graph has {graph.n_nodes} nodes but features have {h.shape[0]} rows")
    if layer.weight.shape[0] != 3 * h.shape[1]:
        raise DimensionError(
            f"Layer weight {layer.weight.shape} does not fit input width {h.shape[1]} (needs 3 x {h.shape[1]} rows)"
        )
    pos_op = pos_op if pos_op is not None else constant(graph.mean_operator('pos'))
    fea_op = fea_op if fea_op is not None else constant(graph.mean_operator('fea'))

    stacked = ops.concat_cols([h, ops.matmul(pos_op, h), ops.matmul(fea_op, h)])
    out = ops.matmul(stacked, layer.weight)
    if layer.activation == RELU:
        out = ops.relu(out)
    return out


def sage_forward(h: Tensor, graph: SlideGraph, stack: SageStack) -> Tensor:
    """Apply every layer in order on the fixed graph."""
    stack.validate()
    pos_op = constant(graph.mean_operator('pos'))
    fea_op = constant(graph.mean_operator('fea'))
    out = h
    for layer in stack.layers:
        out = sage_layer_forward(out, graph, layer, pos_op, fea_op)
    return out
