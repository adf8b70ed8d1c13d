"""
Dataset Models
===============
Slides, gene descriptions and the seen/unseen gene split.
"""

from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from errors import UnknownEntryError

SEEN = 'seen'
UNSEEN = 'unseen'
SPLITS = (SEEN, UNSEEN)


@dataclass
class SlideWindows:
    """
    One slide's windows.

    Attributes:
        slide_id: Slide identifier (directory name on disk)
        positions: N x 2 window coordinates
        features: N x D_e precomputed window features
        expression: N x G ground truth, one column per dataset gene
    """

    slide_id: str
    positions: np.ndarray
    features: np.ndarray
    expression: np.ndarray

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    def to_dict(self) -> Dict:
        return {'id': self.slide_id, 'n': self.n}

    def __repr__(self):
        return f'<SlideWindows {self.slide_id} n={self.n}>'


@dataclass
class GeneDescription:
    """Token embedding matrix (L x D_T) describing one gene."""

    gene: str
    tokens: np.ndarray
    split: str = SEEN

    @property
    def length(self) -> int:
        return self.tokens.shape[0]

    def __repr__(self):
        return f'<GeneDescription {self.gene} L={self.length} {self.split}>'


@dataclass
class Dataset:
    """
    Slides plus gene descriptions in dataset gene order.

    ``genes[c]`` describes expression column c of every slide.
    """

    slides: List[SlideWindows]
    genes: List[GeneDescription]
    d_e: int
    d_t: int
    l_max: int
    format_version: int = 1
    _index: Dict[str, int] = field(default=None, init=False, repr=False, compare=False)

    @property
    def gene_names(self) -> List[str]:
        return [g.gene for g in self.genes]

    @property
    def seen(self) -> List[str]:
        return [g.gene for g in self.genes if g.split == SEEN]

    @property
    def unseen(self) -> List[str]:
        return [g.gene for g in self.genes if g.split == UNSEEN]

    @property
    def dims(self) -> Dict[str, int]:
        return {'D_e': self.d_e, 'D_T': self.d_t, 'L_max': self.l_max}

    def gene_index(self, name: str) -> int:
        if self._index is None:
            self._index = {g.gene: i for i, g in enumerate(self.genes)}
        return self._index[name]

    def split_genes(self, split: str) -> List[str]:
        """Gene names for 'seen', 'unseen' or 'all', in dataset order."""
        if split == 'all':
            return self.gene_names
        if split == SEEN:
            return self.seen
        return self.unseen

    def slide(self, slide_id: str) -> SlideWindows:
        for s in self.slides:
            if s.slide_id == slide_id:
                return s
        raise UnknownEntryError(f"Unknown slide '{slide_id}'")

    def gene(self, name: str) -> GeneDescription:
        try:
            return self.genes[self.gene_index(name)]
        except KeyError:
            raise UnknownEntryError(f"Unknown gene '{name}'") from None

    def to_meta(self) -> Dict:
        """The ``meta.json`` document for this dataset."""
        return {
            'format_version': self.format_version,
            'D_e': self.d_e,
            'D_T': self.d_t,
            'L_max': self.l_max,
            'genes': self.gene_names,
            'seen': self.seen,
            'unseen': self.unseen,
            'slides': [s.to_dict() for s in self.slides],
        }

    def __repr__(self):
        return (f'<Dataset slides={len(self.slides)} genes={len(self.genes)} '
                f'seen={len(self.seen)} unseen={len(self.unseen)}>')
