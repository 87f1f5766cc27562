"""Downstream classifier (softmax regression over embeddings) and f1-macro metrics.

The classifier is refit from scratch at every evaluation interval, so a run's
machine performance depends only on the accumulated training set, not on the
order in which it was collected.
"""

from __future__ import annotations

import numpy as np

from .corpus import LabelSpace


class SoftmaxClassifier:
    """Linear softmax model: probabilities = softmax(W @ emb + b)."""

    def __init__(self, weights: np.ndarray, bias: np.ndarray):
        self.weights = weights  # (C, E)
        self.bias = bias        # (C,)

    @property
    def num_classes(self):
        return self.weights.shape[0]


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy_and_grads(weights, bias, X, y):
    """Mean cross-entropy over the batch and its gradients w.r.t. (W, b)."""
    n = len(y)
    probs = softmax(X @ weights.T + bias)
    loss = float(-np.log(probs[np.arange(n), y]).mean())
    g = probs.copy()
    g[np.arange(n), y] -= 1.0
    g /= n
    return loss, g.T @ X, g.sum(axis=0)


def fit(training_set, labels: LabelSpace, seed=0, epochs: int = 50,
        batch_size: int = 32, lr: float = 0.1) -> SoftmaxClassifier:
    """Train from scratch by seeded minibatch gradient descent on cross-entropy.

    training_set is a list of (embedding, emitted label) pairs. Zero init plus
    a seeded epoch shuffle makes the result a pure function of (set, seed).
    """
    if not training_set:
        raise ValueError("cannot fit on an empty training set")
    if epochs < 1 or batch_size < 1 or lr <= 0:
        raise ValueError("epochs and batch_size must be >= 1 and lr > 0")
    X = np.stack([np.asarray(emb, dtype=np.float64) for emb, _ in training_set])
    y = np.array([label for _, label in training_set])
    if y.min() < 0 or y.max() >= len(labels):
        raise ValueError("label outside label space")
    num_classes = len(labels)
    W = np.zeros((num_classes, X.shape[1]))
    b = np.zeros(num_classes)
    rng = np.random.default_rng(seed)
    n = len(y)
    for _ in range(epochs):
        order = rng.permutation(n)
        for lo in range(0, n, batch_size):
            idx = order[lo:lo + batch_size]
            _, dW, db = cross_entropy_and_grads(W, b, X[idx], y[idx])
            W -= lr * dW
            b -= lr * db
    return SoftmaxClassifier(W, b)


def predict_proba(clf: SoftmaxClassifier, emb) -> np.ndarray:
    """Class probabilities for one embedding or a (n, E) batch."""
    return softmax(np.asarray(emb, dtype=np.float64) @ clf.weights.T + clf.bias)


def predict(clf: SoftmaxClassifier, emb) -> np.ndarray:
    return np.argmax(predict_proba(clf, emb), axis=-1)


def f1_macro(true, pred, labels: LabelSpace) -> float:
    """Macro-averaged one-vs-rest f1 over all classes in the label space.

    A class with precision + recall = 0 (including classes absent from both
    vectors) contributes f1 = 0.
    """
    true = np.asarray(true)
    pred = np.asarray(pred)
    if true.shape != pred.shape or true.ndim != 1:
        raise ValueError(f"label vectors must be equal-length 1-d, got {true.shape} vs {pred.shape}")
    if len(true) == 0:
        raise ValueError("empty label vectors")
    total = 0.0
    for c in range(len(labels)):
        tp = int(((pred == c) & (true == c)).sum())
        fp = int(((pred == c) & (true != c)).sum())
        fn = int(((pred != c) & (true == c)).sum())
        denom = 2 * tp + fp + fn
        if denom:
            total += 2 * tp / denom
    return total / len(labels)


def human_f1(picked_true, picked_emitted, labels: LabelSpace) -> float:
    """Annotator quality: f1-macro of emitted labels against ground truth."""
    return f1_macro(picked_true, picked_emitted, labels)
