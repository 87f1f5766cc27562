"""Simulated annotator whose slip rate grows with time since a class was last labeled.

Two decay shapes are supported (plus an error-free "perfect" mode):

    sigmoid:      p(dt) = 1 / (1 + exp(-alpha * dt + beta))
    exponential:  p(dt) = min(1, exp(alpha * dt + beta))

The exponential form is clipped from above at 1 so it stays a probability;
as printed elsewhere with max() it would never fall below 1, contradicting
the decay behavior it is meant to model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import Document, LabelSpace

DECAY_KINDS = ("sigmoid", "exponential", "perfect")


@dataclass(frozen=True)
class DecayModel:
    kind: str = "sigmoid"
    alpha: float = 0.3
    beta: float = 9.0

    def __post_init__(self):
        if self.kind not in DECAY_KINDS:
            raise ValueError(f"unknown decay kind {self.kind!r}, expected one of {DECAY_KINDS}")
        if self.kind != "perfect" and self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")


def error_probability(model: DecayModel, dt) -> float:
    """Slip probability after dt steps since the class was last emitted."""
    if dt < 0:
        raise ValueError(f"dt must be >= 0, got {dt}")
    if model.kind == "perfect":
        return 0.0
    if model.kind == "sigmoid":
        x = -model.alpha * dt + model.beta
        if x > 700.0:  # exp would overflow; probability is ~exp(-x)
            return math.exp(-x)
        return 1.0 / (1.0 + math.exp(x))
    x = model.alpha * dt + model.beta
    if x >= 0.0:
        return 1.0
    return math.exp(x)


class OracleState:
    """Per-class recency bookkeeping for one annotator over one stream.

    The memory records the step of the most recent *emitted* label per class
    (the only signal an observer has), and every class starts as just-seen at
    step 0.
    """

    def __init__(self, model: DecayModel, labels: LabelSpace, seed=0):
        self.model = model
        self.labels = labels
        self.last_seen_step = {c: 0 for c in range(len(labels))}
        self.current_step = 0
        self.rng = np.random.default_rng(seed)

    def time_since_seen(self, cls: int) -> int:
        return self.current_step - self.last_seen_step[cls]

    def annotate(self, doc: Document) -> int:
        """Return a label for doc: the true class, or with the decay-model's
        slip probability a uniformly random other class. Refreshes memory
        with whatever label was emitted.
        """
        true = doc.true_class
        if not 0 <= true < len(self.labels):
            raise ValueError(f"document class {true} outside label space")
        p = error_probability(self.model, self.time_since_seen(true))
        emitted = true
        if p > 0.0 and self.rng.random() < p:
            others = [c for c in range(len(self.labels)) if c != true]
            emitted = others[self.rng.integers(len(others))]
        self.refresh_memory(emitted)
        return emitted

    def refresh_memory(self, emitted: int) -> None:
        self.last_seen_step[emitted] = self.current_step

    def advance_step(self) -> None:
        """One stream step passed (picked or not)."""
        self.current_step += 1
