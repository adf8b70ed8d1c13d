"""
Graph Service
==============
Brute-force k-nearest-neighbor search and slide graph construction.
"""

import logging
from collections import Counter
from typing import Dict, List

import numpy as np

from core.tensor import Tensor
from errors import ContractError, DataError, DimensionError, EmptySlideError
from models.graph import EDGE_KINDS, SlideGraph

logger = logging.getLogger(__name__)

METRICS = ('euclidean', 'cosine')
DEFAULT_K = 5
# Upper bound on float64 entries of one euclidean difference block.
BLOCK_ELEMENTS = 1 << 21


def _as_array(points) -> np.ndarray:
    array = points.data if isinstance(points, Tensor) else np.asarray(points, dtype=np.float64)
    if array.ndim != 2:
        raise DimensionError(f"Expected an N x d array, got shape {array.shape}")
    return array


def pairwise_distances(points: np.ndarray, metric: str) -> np.ndarray:
    """
    Full N x N distance matrix.

    Euclidean distances are left squared (same ordering) and computed a block
    of query rows at a time, so memory stays near BLOCK_ELEMENTS floats for
    wide features. Cosine distance is 1 - cosine similarity, with similarity
    0 for zero vectors.
    """
    if metric == 'euclidean':
        n, d = points.shape
        rows = max(1, BLOCK_ELEMENTS // max(1, n * d))
        dist = np.empty((n, n))
        for start in range(0, n, rows):
            stop = min(start + rows, n)
            diff = points[start:stop, None, :] - points[None, :, :]
            np.square(diff, out=diff)
            dist[start:stop] = diff.sum(axis=-1)
        return dist
    if metric == 'cosine':
        norms = np.sqrt(np.einsum('ij,ij->i', points, points))
        safe = np.where(norms > 0, norms, 1.0)
        unit = points / safe[:, None]
        # einsum keeps one summation order per pair, so equal vectors tie exactly.
        similarity = np.einsum('ik,jk->ij', unit, unit)
        similarity[norms == 0, :] = 0.0
        similarity[:, norms == 0] = 0.0
        return 1.0 - similarity
    raise ContractError(f"Unknown metric '{metric}', expected one of {METRICS}")


def knn_brute(points, k: int, metric: str = 'euclidean') -> List[List[int]]:
    """
    Exact k-nearest other points of every point.

    Args:
        points: N x d coordinates
        k: Neighbors per point; capped at N - 1
        metric: 'euclidean' or 'cosine'

    Returns:
        list: Per-point neighbor indices, nearest first, ties to the lower index
    """
    array = _as_array(points)
    n = array.shape[0]
    if n < 1:
        raise EmptySlideError('k-NN needs at least one point')
    if array.shape[1] < 1:
        raise DimensionError('k-NN needs at least one coordinate')
    if k < 0:
        raise ContractError(f"k must be non-negative, got {k}")
    if not np.all(np.isfinite(array)):
        raise DataError('k-NN input contains non-finite coordinates')

    take = min(k, n - 1)
    if take == 0:
        return [[] for _ in range(n)]

    dist = pairwise_distances(array, metric)
    np.fill_diagonal(dist, np.inf)
    # A stable sort keeps lower indices first among equal distances.
    order = np.argsort(dist, axis=1, kind='stable')[:, :take]
    return [row.tolist() for row in order]


def build_slide_graph(positions, features, k_pos: int = DEFAULT_K, k_fea: int = DEFAULT_K,
                      fea_metric: str = 'cosine') -> SlideGraph:
    """
    Build the positional and feature-similarity neighbor lists of a slide.

    Args:
        positions: N x 2 window coordinates
        features: N x D_e window features
        k_pos: Positional neighbors per window (0 disables the edge type)
        k_fea: Feature neighbors per window (0 disables the edge type)
        fea_metric: Distance on features, 'cosine' or 'euclidean'

    Returns:
        SlideGraph: Directed neighbor lists for both edge types
    """
    pos = _as_array(positions)
    fea = _as_array(features)
    if pos.shape[0] == 0:
        raise EmptySlideError('Cannot build a graph for a slide with no windows')
    if pos.shape[0] != fea.shape[0]:
        raise DimensionError(
            f"positions have {pos.shape[0]} rows but features have {fea.shape[0]}"
        )

    pos_neighbors = knn_brute(pos, k_pos, 'euclidean')
    fea_neighbors = knn_brute(fea, k_fea, fea_metric)
    graph = SlideGraph(
        n_nodes=pos.shape[0],
        pos_neighbors=tuple(tuple(n) for n in pos_neighbors),
        fea_neighbors=tuple(tuple(n) for n in fea_neighbors),
        k_pos=k_pos,
        k_fea=k_fea,
    )
    logger.debug('Built graph for %d windows (k_pos=%d, k_fea=%d, %s)',
                 graph.n_nodes, k_pos, k_fea, fea_metric)
    return graph


def graph_stats(graph: SlideGraph) -> Dict:
    """
    Flat key-value summary of a slide graph.

    Keys: node and edge counts, the overlap |E_pos & E_fea|, and in-degree
    histograms as ``<kind>_in_degree.<degree>`` -> node count.
    """
    stats = {
        'n_nodes': graph.n_nodes,
        'k_pos': graph.k_pos,
        'k_fea': graph.k_fea,
    }
    for kind in EDGE_KINDS:
        neighbor_lists = graph.neighbors(kind)
        stats[f'{kind}_edges'] = sum(len(n) for n in neighbor_lists)
        in_degree = Counter(j for nbrs in neighbor_lists for j in nbrs)
        histogram = Counter(in_degree.get(i, 0) for i in range(graph.n_nodes))
        for degree in sorted(histogram):
            stats[f'{kind}_in_degree.{degree}'] = histogram[degree]
    stats['overlap'] = len(graph.edges('pos') & graph.edges('fea'))
    return stats
