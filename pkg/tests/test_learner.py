import math

import numpy as np
import pytest

from helpers import brute_force_f1_macro, max_relative_error
from oris.corpus import LabelSpace, generate_synthetic
from oris.learner import (
    SoftmaxClassifier,
    cross_entropy_and_grads,
    f1_macro,
    fit,
    human_f1,
    predict,
    predict_proba,
)

LABELS2 = LabelSpace(["a", "b"])
LABELS5 = LabelSpace(["c0", "c1", "c2", "c3", "c4"])


def test_fit_separable_data():
    docs = generate_synthetic(LABELS2, [100, 100], 2, 10.0, seed=0)
    pairs = [(d.embedding, d.true_class) for d in docs]
    clf = fit(pairs, LABELS2, seed=1)
    preds = predict(clf, np.stack([d.embedding for d in docs]))
    accuracy = np.mean(preds == [d.true_class for d in docs])
    assert accuracy >= 0.99


def test_fit_single_class_predicts_it_everywhere():
    rng = np.random.default_rng(2)
    pairs = [(rng.standard_normal(3), 1) for _ in range(50)]
    clf = fit(pairs, LABELS2, seed=0)
    preds = predict(clf, rng.standard_normal((100, 3)))
    assert np.all(preds == 1)


def test_fit_deterministic_under_seed():
    rng = np.random.default_rng(3)
    pairs = [(rng.standard_normal(4), int(rng.integers(2))) for _ in range(64)]
    a = fit(pairs, LABELS2, seed=9)
    b = fit(pairs, LABELS2, seed=9)
    assert np.array_equal(a.weights, b.weights)
    assert np.array_equal(a.bias, b.bias)
    c = fit(pairs, LABELS2, seed=10)
    assert not np.array_equal(a.weights, c.weights)


def test_fit_rejects_empty():
    with pytest.raises(ValueError):
        fit([], LABELS2, seed=0)


def test_predict_proba_uniform_for_zero_parameters():
    clf = SoftmaxClassifier(np.zeros((5, 3)), np.zeros(5))
    probs = predict_proba(clf, np.ones(3))
    assert np.allclose(probs, 0.2)


def test_predict_proba_sums_to_one():
    rng = np.random.default_rng(4)
    clf = SoftmaxClassifier(rng.standard_normal((5, 3)), rng.standard_normal(5))
    probs = predict_proba(clf, rng.standard_normal((20, 3)))
    assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)


def test_predict_proba_analytic_logits():
    # logits [ln 3, 0] -> probabilities [0.75, 0.25]
    clf = SoftmaxClassifier(np.array([[math.log(3.0)], [0.0]]), np.zeros(2))
    probs = predict_proba(clf, np.array([1.0]))
    assert np.allclose(probs, [0.75, 0.25], atol=1e-12)


def test_cross_entropy_gradient_check():
    rng = np.random.default_rng(5)
    worst = 0.0
    for trial in range(20):
        C, E, n = 3, 4, 8
        W = rng.standard_normal((C, E))
        b = rng.standard_normal(C)
        X = rng.standard_normal((n, E))
        y = rng.integers(0, C, size=n)
        _, dW, db = cross_entropy_and_grads(W, b, X, y)
        h = 1e-5
        fd_W = np.zeros_like(W)
        for idx in np.ndindex(*W.shape):
            orig = W[idx]
            W[idx] = orig + h
            up = cross_entropy_and_grads(W, b, X, y)[0]
            W[idx] = orig - h
            down = cross_entropy_and_grads(W, b, X, y)[0]
            W[idx] = orig
            fd_W[idx] = (up - down) / (2 * h)
        fd_b = np.zeros_like(b)
        for i in range(C):
            orig = b[i]
            b[i] = orig + h
            up = cross_entropy_and_grads(W, b, X, y)[0]
            b[i] = orig - h
            down = cross_entropy_and_grads(W, b, X, y)[0]
            b[i] = orig
            fd_b[i] = (up - down) / (2 * h)
        worst = max(worst, max_relative_error([(dW, db)], [(fd_W, fd_b)]))
    assert worst < 1e-4


def test_f1_macro_perfect():
    assert f1_macro([0, 1, 0, 1], [0, 1, 0, 1], LABELS2) == 1.0


def test_f1_macro_hand_case():
    # true [A,A,B,B], pred [A,B,B,B] -> (2/3 + 4/5) / 2
    got = f1_macro([0, 0, 1, 1], [0, 1, 1, 1], LABELS2)
    assert got == pytest.approx((2 / 3 + 4 / 5) / 2, abs=1e-12)
    assert got == pytest.approx(0.733333, abs=1e-6)


def test_f1_macro_degenerate_single_prediction():
    # all predictions one class on balanced truth -> (2/3 + 0) / 2
    assert f1_macro([0, 0, 1, 1], [0, 0, 0, 0], LABELS2) == pytest.approx(1 / 3)


def test_f1_macro_absent_class_counts_zero():
    # class c4 never appears: contributes 0 to the macro average
    true = [0, 1, 2, 3]
    assert f1_macro(true, true, LABELS5) == pytest.approx(4 / 5)


def test_f1_macro_matches_brute_force_on_random_vectors():
    rng = np.random.default_rng(6)
    for _ in range(1000):
        n = int(rng.integers(1, 40))
        true = rng.integers(0, 5, size=n)
        pred = rng.integers(0, 5, size=n)
        expected = brute_force_f1_macro(list(true), list(pred), 5)
        assert f1_macro(true, pred, LABELS5) == expected


def test_f1_macro_invariant_under_class_permutation():
    rng = np.random.default_rng(7)
    true = rng.integers(0, 5, size=100)
    pred = rng.integers(0, 5, size=100)
    base = f1_macro(true, pred, LABELS5)
    for _ in range(10):
        relabel = rng.permutation(5)
        assert f1_macro(relabel[true], relabel[pred], LABELS5) == pytest.approx(base, abs=1e-12)


def test_f1_macro_validates_lengths():
    with pytest.raises(ValueError):
        f1_macro([0, 1], [0], LABELS2)
    with pytest.raises(ValueError):
        f1_macro([], [], LABELS2)


def test_human_f1_delegates():
    # scripted 4-pick case: annotator slipped once on class b
    picked_true = [0, 1, 1, 0]
    picked_emitted = [0, 1, 0, 0]
    expected = brute_force_f1_macro(picked_true, picked_emitted, 2)
    assert human_f1(picked_true, picked_emitted, LABELS2) == expected
    assert human_f1([0, 1], [0, 1], LABELS2) == 1.0
    assert human_f1([0, 1], [0, 0], LABELS2) < 1.0
