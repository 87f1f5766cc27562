"""Agent state construction: document embedding + k-averaged per-class recency."""

from __future__ import annotations

from collections import deque

import numpy as np


class LastSeenTracker:
    """Ring buffers of the k most recent steps at which each class was emitted.

    Buffers start filled with step 0, so a fresh tracker reads a recency of 0
    for every class and the value grows until the class is emitted again.
    Emissions are recorded only for picked documents; the step counter
    advances once per stream document.
    """

    def __init__(self, num_classes: int, k: int = 3):
        if num_classes < 1:
            raise ValueError("need at least one class")
        if k < 1:
            raise ValueError(f"history depth k must be >= 1, got {k}")
        self.num_classes = num_classes
        self.k = k
        self.current_step = 0
        self._buffers = [deque([0] * k, maxlen=k) for _ in range(num_classes)]

    def averaged_last_seen(self, cls: int) -> float:
        """Mean of (current_step - recorded step) over the class's buffer."""
        buf = self._buffers[cls]
        return sum(self.current_step - s for s in buf) / len(buf)

    def averages(self) -> np.ndarray:
        return np.array([self.averaged_last_seen(c) for c in range(self.num_classes)])

    def record_emission(self, cls: int) -> None:
        """Push the current step into the class's buffer, evicting the oldest."""
        self._buffers[cls].append(self.current_step)

    def advance_step(self) -> None:
        self.current_step += 1


def encode_state(emb, tracker: LastSeenTracker, dt_scale: float = 1.0) -> np.ndarray:
    """Concatenate the document embedding with per-class averaged recency.

    The recency tail is divided by dt_scale (default 1, i.e. raw steps).
    Result length is always len(emb) + num_classes.
    """
    if dt_scale <= 0:
        raise ValueError(f"dt_scale must be > 0, got {dt_scale}")
    emb = np.asarray(emb, dtype=np.float64)
    return np.concatenate([emb, tracker.averages() / dt_scale])
