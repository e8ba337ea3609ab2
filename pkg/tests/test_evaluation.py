import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from beampredict.errors import DegenerateLabels, EmptyBatch, InsufficientSamples
from beampredict.evaluation import (EvalReport, RocCurve, baseline_deviation, combined_roc_csv,
                                    combined_roc_from_csv, compare_at_pf, evaluate_predictions, load_report,
                                    nn_deviation, roc_curve, roc_from_csv, roc_to_csv, sample_variance,
                                    save_report)

from oracles import two_pass_variance


def test_sample_variance_examples():
    assert sample_variance([[0.0], [2.0]]) == 2.0
    assert sample_variance([[1, 0], [1, 0], [1, 0]]) == 0.0
    with pytest.raises(InsufficientSamples):
        sample_variance([[1.0, 0.0]])


def test_sample_variance_matches_two_pass(rng):
    for _ in range(10):
        y = (rng.uniform(size=(rng.integers(2, 30), 10)) > 0.7).astype(float)
        assert sample_variance(y) == pytest.approx(two_pass_variance(y.tolist()), rel=1e-12)


def test_deviation_examples():
    assert baseline_deviation([[3.0, 0.0]], [0.0, 0.0]) == 9.0
    assert nn_deviation([[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]]) == 0.0
    with pytest.raises(EmptyBatch):
        baseline_deviation(np.zeros((0, 2)), [0.0, 0.0])
    with pytest.raises(EmptyBatch):
        nn_deviation(np.zeros((0, 2)), np.zeros((0, 2)))


def test_constant_mean_predictor_matches_baseline(rng):
    y_t = (rng.uniform(size=(40, 6)) > 0.5).astype(float)
    y_v = (rng.uniform(size=(9, 6)) > 0.5).astype(float)
    r = evaluate_predictions(y_t, y_v, np.tile(y_t.mean(axis=0), (9, 1)))
    assert r.eta_nn == r.eta_v and r.rho_nn == r.rho_v
    assert (r.n_train, r.n_test) == (40, 9)


def test_report_identities_and_round_trip(tmp_path, rng):
    y_t = (rng.uniform(size=(30, 5)) > 0.6).astype(float)
    y_v = (rng.uniform(size=(6, 5)) > 0.6).astype(float)
    r = evaluate_predictions(y_t, y_v, rng.normal(size=(6, 5)))
    assert abs(r.rho_v * r.s_t - r.eta_v) < 1e-12
    assert abs(r.rho_nn * r.s_t - r.eta_nn) < 1e-12
    save_report(r, tmp_path / "r.json")
    assert load_report(tmp_path / "r.json") == r
    with pytest.raises(InsufficientSamples):
        EvalReport.from_deviations(0.0, 1.0, 1.0, 2, 1)


def test_roc_perfect_scores():
    c = roc_curve([1, 0, 1, 0], [0.9, 0.1, 0.8, 0.2])
    c.check()
    assert c.pd_at(0.0) == 1.0 and c.auc() == 1.0


def test_roc_constant_scores_is_diagonal():
    c = roc_curve([1, 0, 0, 1, 0], [0.3] * 5)
    c.check()
    assert c.points == [(0.0, 0.0), (1.0, 1.0)]
    assert c.pd_at(0.1) == pytest.approx(0.1)


def test_roc_degenerate_labels():
    with pytest.raises(DegenerateLabels):
        roc_curve([1, 1], [0.2, 0.3])
    with pytest.raises(DegenerateLabels):
        roc_curve([0, 0], [0.2, 0.3])


def test_roc_hand_example():
    # scores 0.9(+) 0.7(-) 0.5(+) 0.2(-)
    c = roc_curve([1, 0, 1, 0], [0.9, 0.7, 0.5, 0.2])
    assert c.points == [(0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (1.0, 1.0)]
    assert c.thresholds[0] == np.inf
    assert c.pd_at(0.25) == 0.5
    assert c.auc() == 0.75


def test_baseline_staircase_has_few_points(rng):
    n_ms = 10
    y_t = (rng.uniform(size=(50, n_ms)) > 0.6).astype(float)
    y_v = (rng.uniform(size=(12, n_ms)) > 0.6).astype(float)
    c = roc_curve(y_v, np.broadcast_to(y_t.mean(axis=0), y_v.shape))
    c.check()
    assert len(c.p_f) <= n_ms + 2


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.integers(0, 5)), min_size=2, max_size=40))
def test_roc_always_well_formed(pairs):
    labels = [int(a) for a, _ in pairs]
    if len(set(labels)) < 2:
        return
    c = roc_curve(labels, [float(s) for _, s in pairs])
    c.check()
    for t in (0.0, 0.1, 0.5, 1.0):
        assert 0.0 <= c.pd_at(t) <= 1.0


def test_compare_at_pf():
    a = RocCurve(np.array([0.0, 0.0, 1.0]), np.array([0.0, 1.0, 1.0]), np.array([np.inf, 0.5, -np.inf]))
    diag = RocCurve(np.array([0.0, 1.0]), np.array([0.0, 1.0]), np.array([np.inf, -np.inf]))
    cmp = compare_at_pf(a, diag, 0.1)
    assert (cmp.p_d_a, cmp.winner) == (1.0, "a")
    assert cmp.p_d_b == pytest.approx(0.1)
    assert compare_at_pf(diag, diag).winner == "tie"
    assert compare_at_pf(diag, a).winner == "b"


def test_roc_csv_round_trips():
    c = roc_curve([1, 0, 1, 0, 1], [0.91, 0.12, 0.5, 0.5, 1 / 3])
    back = roc_from_csv(roc_to_csv(c))
    np.testing.assert_array_equal(back.p_f, c.p_f)
    np.testing.assert_array_equal(back.p_d, c.p_d)
    np.testing.assert_array_equal(back.thresholds, c.thresholds)
    both = combined_roc_from_csv(combined_roc_csv({"RSS": c, "SA": roc_curve([1, 0], [0.5, 0.5])}))
    assert list(both) == ["RSS", "SA"]
    for curve in both.values():
        curve.check()
