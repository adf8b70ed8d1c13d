"""
Slide Graph Model
==================
Directed neighbor lists over the windows of one slide.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Tuple

import numpy as np

from errors import ContractError

EDGE_KINDS = ('pos', 'fea')


@dataclass(eq=True)
class SlideGraph:
    """
    Window graph with a positional and a feature-similarity edge set.

    ``pos_neighbors[i]`` lists the nodes j with "j is a positional neighbor
    of i"; ``fea_neighbors`` likewise for feature similarity.
    """

    n_nodes: int
    pos_neighbors: Tuple[Tuple[int, ...], ...]
    fea_neighbors: Tuple[Tuple[int, ...], ...]
    k_pos: int
    k_fea: int

    def neighbors(self, kind: str) -> Tuple[Tuple[int, ...], ...]:
        if kind == 'pos':
            return self.pos_neighbors
        if kind == 'fea':
            return self.fea_neighbors
        raise ContractError(f"Unknown edge kind '{kind}', expected one of {EDGE_KINDS}")

    def mean_operator(self, kind: str) -> np.ndarray:
        """N x N matrix whose row i averages the neighbors of i (zero row if none)."""
        return self._operators[kind]

    @cached_property
    def _operators(self) -> Dict[str, np.ndarray]:
        operators = {}
        for kind in EDGE_KINDS:
            matrix = np.zeros((self.n_nodes, self.n_nodes))
            for i, nbrs in enumerate(self.neighbors(kind)):
                if nbrs:
                    matrix[i, list(nbrs)] = 1.0 / len(nbrs)
            operators[kind] = matrix
        return operators

    def edges(self, kind: str) -> set:
        """Edge set as (neighbor, node) pairs."""
        return {(j, i) for i, nbrs in enumerate(self.neighbors(kind)) for j in nbrs}

    def to_dict(self) -> Dict:
        return {
            'n_nodes': self.n_nodes,
            'k_pos': self.k_pos,
            'k_fea': self.k_fea,
            'pos_neighbors': [list(n) for n in self.pos_neighbors],
            'fea_neighbors': [list(n) for n in self.fea_neighbors],
        }

    def __repr__(self):
        return f'<SlideGraph n={self.n_nodes} k_pos={self.k_pos} k_fea={self.k_fea}>'
