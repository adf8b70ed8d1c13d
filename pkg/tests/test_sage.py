import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from core import ops
from core.gradcheck import grad_check
from core.tensor import Tape, constant, parameter
from errors import DimensionError
from models.graph import SlideGraph
from models.params import NO_ACTIVATION, RELU, SageLayer, SageStack
from services.graph_service import build_slide_graph
from services.sage_service import init_sage_stack, sage_forward, sage_layer_forward


def loop_oracle(h, graph, weight, activation):
    rows = []
    for i in range(graph.n_nodes):
        parts = [h[i]]
        for nbrs in (graph.pos_neighbors[i], graph.fea_neighbors[i]):
            parts.append(np.mean(h[list(nbrs)], axis=0) if nbrs else np.zeros(h.shape[1]))
        row = np.concatenate(parts) @ weight
        rows.append(np.maximum(row, 0.0) if activation == RELU else row)
    return np.array(rows)


def random_graph(rng, n, k_pos=2, k_fea=2):
    return build_slide_graph(rng.normal(size=(n, 2)), rng.normal(size=(n, 4)), k_pos, k_fea)


def test_single_node_identity_weight_passes_features():
    d = 3
    h = np.array([[0.3, -1.2, 2.0]])
    layer = SageLayer(parameter(np.vstack([np.eye(d)] * 3)), NO_ACTIVATION)
    graph = build_slide_graph([[0.0, 0.0]], h)
    assert_array_equal(sage_layer_forward(constant(h), graph, layer).data, h)


def test_identical_mutual_neighbors_give_identical_rows(rng):
    h = np.tile(rng.normal(size=(1, 4)), (2, 1))
    graph = build_slide_graph([[0.0, 0.0], [1.0, 0.0]], h, 1, 1)
    layer = SageLayer(parameter(rng.normal(size=(12, 5))), RELU)
    out = sage_layer_forward(constant(h), graph, layer).data
    assert_array_equal(out[0], out[1])


def test_layer_matches_loop_oracle(rng):
    graph = random_graph(rng, 6)
    h = rng.normal(size=(6, 4))
    weight = rng.normal(size=(12, 5))
    for activation in (RELU, NO_ACTIVATION):
        out = sage_layer_forward(constant(h), graph, SageLayer(parameter(weight), activation)).data
        assert_allclose(out, loop_oracle(h, graph, weight, activation), atol=1e-12)


def test_one_layer_stack_equals_layer(rng):
    graph = random_graph(rng, 8)
    h = constant(rng.normal(size=(8, 4)))
    stack = init_sage_stack(4, 16, 3, 1, rng)
    assert_array_equal(sage_forward(h, graph, stack).data,
                       sage_layer_forward(h, graph, stack.layers[0]).data)


def test_zero_weights_give_zero_output(rng):
    graph = random_graph(rng, 5)
    stack = init_sage_stack(4, 6, 3, 3, rng)
    for layer in stack.layers:
        layer.weight.data = np.zeros_like(layer.weight.data)
    with Tape() as tape:
        out = sage_forward(constant(rng.normal(size=(5, 4))), graph, stack)
        downstream = parameter(rng.normal(size=(3, 2)))
        loss = ops.sum_all(ops.matmul(out, downstream))
    assert_array_equal(out.data, np.zeros((5, 3)))
    tape.backward(loss)
    assert_array_equal(downstream.grad, np.zeros((3, 2)))


def test_init_widths_and_activations(rng):
    stack = init_sage_stack(8, 16, 4, 4, rng)
    assert [l.weight.shape for l in stack.layers] == [(24, 16), (48, 16), (48, 16), (48, 4)]
    assert [l.activation for l in stack.layers] == [RELU, RELU, RELU, NO_ACTIVATION]
    bound = np.sqrt(1.0 / 24)
    assert np.all(np.abs(stack.layers[0].weight.data) <= bound)


def test_width_mismatch_rejected(rng):
    graph = random_graph(rng, 4)
    layer = SageLayer(parameter(np.ones((9, 2))))
    with pytest.raises(DimensionError):
        sage_layer_forward(constant(np.ones((4, 4))), graph, layer)


def test_node_count_mismatch_rejected(rng):
    graph = random_graph(rng, 4)
    layer = SageLayer(parameter(np.ones((12, 2))))
    with pytest.raises(DimensionError):
        sage_layer_forward(constant(np.ones((5, 4))), graph, layer)


def test_stack_width_chain_validated(rng):
    stack = SageStack(layers=[SageLayer(parameter(np.ones((12, 5)))),
                              SageLayer(parameter(np.ones((12, 3))))], d_e=4, d=3)
    with pytest.raises(DimensionError):
        stack.validate()


def test_permutation_equivariance(rng):
    for _ in range(20):
        n = int(rng.integers(5, 40))
        positions = rng.normal(size=(n, 2))
        features = rng.normal(size=(n, 6))
        stack = init_sage_stack(6, 12, 5, 3, rng)
        perm = rng.permutation(n)
        out = sage_forward(constant(features), build_slide_graph(positions, features, 4, 4), stack).data
        permuted_graph = build_slide_graph(positions[perm], features[perm], 4, 4)
        out_perm = sage_forward(constant(features[perm]), permuted_graph, stack).data
        assert np.max(np.abs(out_perm - out[perm])) <= 1e-9


def test_locality_of_one_layer(rng):
    n = 12
    graph = random_graph(rng, n)
    layer = SageLayer(parameter(rng.normal(size=(12, 3))), NO_ACTIVATION)
    h = rng.normal(size=(n, 4))
    base = sage_layer_forward(constant(h), graph, layer).data
    j = 7
    changed = h.copy()
    changed[j] += 10.0
    out = sage_layer_forward(constant(changed), graph, layer).data
    for i in range(n):
        touched = j == i or j in graph.pos_neighbors[i] or j in graph.fea_neighbors[i]
        if not touched:
            assert_array_equal(out[i], base[i])
        else:
            assert not np.array_equal(out[i], base[i])


def test_no_neighbors_reduces_to_row_mlp(rng):
    n = 6
    h = rng.normal(size=(n, 4))
    graph = SlideGraph(n, ((),) * n, ((),) * n, 0, 0)
    stack = init_sage_stack(4, 5, 3, 2, rng)
    out = sage_forward(constant(h), graph, stack).data
    padded = np.hstack([h, np.zeros((n, 8))])
    hidden = np.maximum(padded @ stack.layers[0].weight.data, 0.0)
    expected = np.hstack([hidden, np.zeros((n, 10))]) @ stack.layers[1].weight.data
    assert_allclose(out, expected, atol=1e-12)


def test_four_layer_gradient_check(rng, probe):
    graph = random_graph(rng, 7, 3, 3)
    h = constant(rng.normal(size=(7, 8)))
    stack = init_sage_stack(8, 16, 8, 4, rng)
    params = [layer.weight for layer in stack.layers]
    report = grad_check(lambda: probe(sage_forward(h, graph, stack)), params)
    assert report.passed, report.to_dict()
