import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from errors import ContractError, DataError, DimensionError
from models.report import REPORT_KEYS
from services.metrics_service import (REFERENCE_ZERO_SHOT, _aggregates, aggregate_reports, evaluate,
                                      pearson_per_column)


def quantile_oracle(values, q):
    ordered = sorted(values)
    position = q * (len(ordered) - 1)
    lo = math.floor(position)
    hi = min(lo + 1, len(ordered) - 1)
    return ordered[lo] + (position - lo) * (ordered[hi] - ordered[lo])


def genes(n):
    return [f'G{i}' for i in range(n)]


def test_perfect_prediction(rng):
    y = rng.normal(size=(10, 4))
    report = evaluate(y, y, genes(4))
    assert report.mse == 0.0 and report.mae == 0.0
    for value in (report.pcc_f, report.pcc_s, report.pcc_m):
        assert value == pytest.approx(1.0, abs=1e-12)


def test_quantiles_match_linear_interpolation_oracle():
    values = [0.1, 0.2, 0.3, 0.4]
    pcc_f, pcc_s, pcc_m = _aggregates(values)
    assert pcc_m == pytest.approx(0.25, abs=1e-15)
    assert pcc_f == pytest.approx(quantile_oracle(values, 0.25), abs=1e-15)
    assert pcc_s == pytest.approx(quantile_oracle(values, 0.5), abs=1e-15)


def test_quantiles_on_random_lists(rng):
    for _ in range(20):
        values = list(rng.uniform(-1, 1, size=int(rng.integers(1, 30))))
        pcc_f, pcc_s, _ = _aggregates(values)
        assert pcc_f == pytest.approx(quantile_oracle(values, 0.25), abs=1e-12)
        assert pcc_s == pytest.approx(quantile_oracle(values, 0.5), abs=1e-12)
        assert pcc_f <= pcc_s


@pytest.mark.parametrize('seed', range(100))
def test_per_gene_pcc_matches_textbook(seed):
    rng = np.random.default_rng(seed)
    y_hat = rng.normal(size=(12, 5))
    y = rng.normal(size=(12, 5))
    expected = [np.corrcoef(y_hat[:, c], y[:, c])[0, 1] for c in range(5)]
    assert_allclose(pearson_per_column(y_hat, y), expected, atol=1e-10)
    report = evaluate(y_hat, y, genes(5))
    assert all(-1.0 <= r <= 1.0 for r in report.pcc_per_gene.values())


def test_affine_prediction_changes_errors_not_correlations(rng):
    y_hat = rng.normal(size=(15, 6))
    y = rng.normal(size=(15, 6))
    base = evaluate(y_hat, y, genes(6))
    moved = evaluate(3.0 * y_hat + 1.5, y, genes(6))
    assert moved.mse != base.mse
    for key in ('pcc_f', 'pcc_s', 'pcc_m'):
        assert getattr(moved, key) == pytest.approx(getattr(base, key), abs=1e-9)


def test_gene_order_does_not_change_scalars(rng):
    y_hat = rng.normal(size=(9, 5))
    y = rng.normal(size=(9, 5))
    order = [3, 0, 4, 1, 2]
    base = evaluate(y_hat, y, genes(5))
    permuted = evaluate(y_hat[:, order], y[:, order], [genes(5)[i] for i in order])
    for key in ('mse', 'mae', 'pcc_f', 'pcc_s', 'pcc_m'):
        assert getattr(permuted, key) == pytest.approx(getattr(base, key), abs=1e-12)


def test_single_gene_mean_is_that_gene(rng):
    y_hat = rng.normal(size=(7, 1))
    y = rng.normal(size=(7, 1))
    report = evaluate(y_hat, y, ['ONLY'])
    assert report.pcc_m == report.pcc_per_gene['ONLY']


def test_degenerate_gene_is_excluded(rng):
    y_hat = rng.normal(size=(6, 3))
    y = rng.normal(size=(6, 3))
    y[:, 1] = 2.0
    report = evaluate(y_hat, y, ['A', 'B', 'C'])
    assert report.degenerate_genes == ['B']
    assert set(report.pcc_per_gene) == {'A', 'C'}
    assert report.n_genes == 3


def test_all_degenerate_marks_aggregates_absent():
    y = np.ones((4, 2))
    report = evaluate(np.zeros((4, 2)), y, ['A', 'B'])
    assert report.pcc_f is None and report.pcc_s is None and report.pcc_m is None
    data = report.to_dict()
    assert data['pcc_m'] is None
    assert data['degenerate_genes'] == ['A', 'B']


def test_constant_prediction_scores_zero(rng):
    y = rng.normal(size=(6, 2))
    report = evaluate(np.zeros((6, 2)), y, ['A', 'B'])
    assert report.pcc_per_gene == {'A': 0.0, 'B': 0.0}
    assert report.pcc_m == 0.0


def test_needs_two_windows():
    with pytest.raises(ContractError):
        evaluate(np.ones((1, 2)), np.ones((1, 2)), ['A', 'B'])


def test_shape_checks():
    with pytest.raises(DimensionError):
        evaluate(np.ones((3, 2)), np.ones((3, 3)), ['A', 'B', 'C'])
    with pytest.raises(DimensionError):
        evaluate(np.ones((3, 2)), np.ones((3, 2)), ['A'])


def test_report_keys(rng):
    report = evaluate(rng.normal(size=(5, 2)), rng.normal(size=(5, 2)), ['A', 'B'])
    assert set(report.to_dict()) == set(REPORT_KEYS)


def test_aggregate_single_report_unchanged(rng):
    report = evaluate(rng.normal(size=(8, 3)), rng.normal(size=(8, 3)), genes(3))
    assert aggregate_reports([report]).to_dict() == report.to_dict()


def test_aggregate_identical_reports(rng):
    report = evaluate(rng.normal(size=(8, 3)), rng.normal(size=(8, 3)), genes(3))
    merged = aggregate_reports([report, report])
    for key in ('mse', 'mae', 'pcc_f', 'pcc_s', 'pcc_m'):
        assert getattr(merged, key) == getattr(report, key)
    assert merged.n_windows == 16


def test_aggregate_matches_recomputation(rng):
    slides = [(rng.normal(size=(n, 4)), rng.normal(size=(n, 4))) for n in (6, 11)]
    slides[1][1][:, 2] = 1.0
    merged = aggregate_reports([evaluate(p, t, genes(4)) for p, t in slides])

    all_pred = np.vstack([p for p, _ in slides])
    all_true = np.vstack([t for _, t in slides])
    assert merged.mse == pytest.approx(np.mean((all_pred - all_true) ** 2), abs=1e-12)
    assert merged.mae == pytest.approx(np.mean(np.abs(all_pred - all_true)), abs=1e-12)
    for c, gene in enumerate(genes(4)):
        per_slide = [np.corrcoef(p[:, c], t[:, c])[0, 1] for p, t in slides if np.ptp(t[:, c]) > 0]
        assert merged.pcc_per_gene[gene] == pytest.approx(np.mean(per_slide), abs=1e-12)
    assert merged.pcc_m == pytest.approx(np.mean(list(merged.pcc_per_gene.values())), abs=1e-12)
    assert merged.degenerate_genes == []


def test_aggregate_rejects_inconsistent_genes(rng):
    a = evaluate(rng.normal(size=(5, 2)), rng.normal(size=(5, 2)), ['A', 'B'])
    b = evaluate(rng.normal(size=(5, 2)), rng.normal(size=(5, 2)), ['A', 'C'])
    with pytest.raises(DataError):
        aggregate_reports([a, b])


def test_reference_constants_recorded():
    assert REFERENCE_ZERO_SHOT['stnet']['pcc_m'] == 0.269
    assert REFERENCE_ZERO_SHOT['10x_proteomic']['mse'] == 0.1305
