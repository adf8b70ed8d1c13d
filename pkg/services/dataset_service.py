"""
Dataset Service
================
Loading, validating and saving datasets in the on-disk layout:

    meta.json
    slides/<id>/positions.f32     N x 2
    slides/<id>/features.f32      N x D_e
    slides/<id>/expression.f32    N x G
    genes/<name>/desc.f32         L x D_T
"""

import logging
import os
from typing import Dict, List

import numpy as np

from errors import DataError, SizeMismatchError, SplitOverlapError
from models.dataset import SEEN, UNSEEN, Dataset, GeneDescription, SlideWindows
from storage import read_f32, read_f32_rows, read_json, write_f32, write_json

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
META_FIELDS = ('format_version', 'D_e', 'D_T', 'L_max', 'genes', 'seen', 'unseen', 'slides')


def _check_name(name, kind: str):
    if not isinstance(name, str) or not name or name in ('.', '..') \
            or '/' in name or '\\' in name or '\x00' in name:
        raise DataError(f"Invalid {kind} name {name!r}: must be usable as a directory name")


class DatasetService:
    """
    Service for dataset persistence and validation.
    """

    META_FILE = 'meta.json'

    # ==================== Paths ====================

    def slide_dir(self, root: str, slide_id: str) -> str:
        return os.path.join(root, 'slides', slide_id)

    def desc_path(self, root: str, gene: str) -> str:
        return os.path.join(root, 'genes', gene, 'desc.f32')

    # ==================== Validation ====================

    def validate_split(self, genes: List[str], seen: List[str], unseen: List[str]):
        """Seen and unseen must be disjoint and cover exactly the gene list."""
        if len(set(genes)) != len(genes):
            raise DataError('Gene list contains duplicates')
        overlap = sorted(set(seen) & set(unseen))
        if overlap:
            raise SplitOverlapError(f"Genes listed as both seen and unseen: {overlap}")
        if set(seen) | set(unseen) != set(genes) or len(seen) + len(unseen) != len(genes):
            raise SplitOverlapError('Seen and unseen lists do not cover the gene list exactly')

    def validate(self, dataset: Dataset, check_finite: bool = True) -> Dataset:
        """
        Check a dataset built in memory against every layout invariant.

        Args:
            dataset: Dataset to check
            check_finite: Also reject NaN or infinite values

        Returns:
            Dataset: the same dataset
        """
        names = dataset.gene_names
        for name in names:
            _check_name(name, 'gene')
        self.validate_split(names, dataset.seen, dataset.unseen)
        for desc in dataset.genes:
            if desc.split not in (SEEN, UNSEEN):
                raise DataError(f"Gene '{desc.gene}' has unknown split '{desc.split}'")
            if desc.tokens.ndim != 2 or desc.tokens.shape[1] != dataset.d_t:
                raise SizeMismatchError(f"Description of '{desc.gene}' is not L x {dataset.d_t}")
            if not 1 <= desc.length <= dataset.l_max:
                raise SizeMismatchError(
                    f"Description of '{desc.gene}' has {desc.length} tokens, allowed 1..{dataset.l_max}"
                )
            if check_finite and not np.all(np.isfinite(desc.tokens)):
                raise DataError(f"Description of '{desc.gene}' contains non-finite values")

        slide_ids = [s.slide_id for s in dataset.slides]
        if len(set(slide_ids)) != len(slide_ids):
            raise DataError('Slide identifiers are not unique')
        for slide in dataset.slides:
            _check_name(slide.slide_id, 'slide')
            n = slide.n
            if n < 1:
                raise DataError(f"Slide '{slide.slide_id}' has no windows")
            expected = {
                'positions': (n, 2),
                'features': (n, dataset.d_e),
                'expression': (n, len(names)),
            }
            for field_name, shape in expected.items():
                array = getattr(slide, field_name)
                if array.shape != shape:
                    raise SizeMismatchError(
                        f"Slide '{slide.slide_id}' {field_name} has shape {array.shape}, expected {shape}"
                    )
                if check_finite and not np.all(np.isfinite(array)):
                    raise DataError(f"Slide '{slide.slide_id}' {field_name} contains non-finite values")
        return dataset

    # ==================== Load / Save ====================

    def load_dataset(self, path: str) -> Dataset:
        """
        Load and fully validate a dataset directory.

        Args:
            path: Dataset root directory

        Returns:
            Dataset: validated dataset; nothing is returned on any failure
        """
        meta = read_json(os.path.join(path, self.META_FILE))
        missing = [f for f in META_FIELDS if f not in meta]
        if missing:
            raise DataError(f"{self.META_FILE} lacks fields {missing}")
        if meta['format_version'] != FORMAT_VERSION:
            raise DataError(f"Unsupported format_version {meta['format_version']}")

        d_e, d_t, l_max = int(meta['D_e']), int(meta['D_T']), int(meta['L_max'])
        if min(d_e, d_t, l_max) < 1:
            raise DataError('D_e, D_T and L_max must be positive')
        genes = list(meta['genes'])
        for name in genes:
            _check_name(name, 'gene')
        self.validate_split(genes, list(meta['seen']), list(meta['unseen']))
        seen = set(meta['seen'])

        descriptions = []
        for name in genes:
            tokens = read_f32_rows(self.desc_path(path, name), d_t)
            descriptions.append(GeneDescription(name, tokens, SEEN if name in seen else UNSEEN))

        slides = []
        for entry in meta['slides']:
            slide_id, n = entry['id'], int(entry['n'])
            _check_name(slide_id, 'slide')
            if n < 1:
                raise DataError(f"Slide '{slide_id}' declares {n} windows")
            base = self.slide_dir(path, slide_id)
            slides.append(SlideWindows(
                slide_id=slide_id,
                positions=read_f32(os.path.join(base, 'positions.f32'), (n, 2)),
                features=read_f32(os.path.join(base, 'features.f32'), (n, d_e)),
                expression=read_f32(os.path.join(base, 'expression.f32'), (n, len(genes))),
            ))

        dataset = Dataset(slides=slides, genes=descriptions, d_e=d_e, d_t=d_t, l_max=l_max)
        self.validate(dataset)
        logger.info('Loaded dataset from %s (%d slides, %d genes)', path, len(slides), len(genes))
        return dataset

    def save_dataset(self, dataset: Dataset, path: str):
        """Write ``dataset`` in the on-disk layout (single writer)."""
        self.validate(dataset)
        write_json(os.path.join(path, self.META_FILE), dataset.to_meta())
        for slide in dataset.slides:
            base = self.slide_dir(path, slide.slide_id)
            write_f32(os.path.join(base, 'positions.f32'), slide.positions)
            write_f32(os.path.join(base, 'features.f32'), slide.features)
            write_f32(os.path.join(base, 'expression.f32'), slide.expression)
        for desc in dataset.genes:
            write_f32(self.desc_path(path, desc.gene), desc.tokens)
        logger.info('Saved dataset to %s', path)

    def summary(self, dataset: Dataset) -> Dict:
        return {
            'slides': len(dataset.slides),
            'windows': int(sum(s.n for s in dataset.slides)),
            'genes': len(dataset.genes),
            'seen': len(dataset.seen),
            'unseen': len(dataset.unseen),
            **dataset.dims,
        }


# Singleton instance
dataset_service = DatasetService()
