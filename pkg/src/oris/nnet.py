"""Small dense networks with hand-rolled forward/backward passes.

ReLU on hidden layers, identity output, smooth-L1 loss, and an
adaptive-moment optimizer. Everything runs in 64-bit floats; checkpoints
are plain text and round-trip bit-exactly.
"""

from __future__ import annotations

import numpy as np

CHECKPOINT_MAGIC = "densenet-v1"


class DenseNet:
    """Fully-connected net over float64 numpy arrays.

    weights[i] has shape (fan_out, fan_in); forward computes
    h = relu(W x + b) per hidden layer and an affine output layer.
    """

    def __init__(self, layer_sizes, seed=0):
        if len(layer_sizes) < 2:
            raise ValueError("need at least input and output sizes")
        if any(s < 1 for s in layer_sizes):
            raise ValueError(f"layer sizes must be >= 1, got {layer_sizes}")
        self.layer_sizes = [int(s) for s in layer_sizes]
        rng = np.random.default_rng(seed)
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(self.layer_sizes, self.layer_sizes[1:]):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            self.weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
            self.biases.append(np.zeros(fan_out))
        self._cache = None

    @classmethod
    def from_parameters(cls, weights, biases):
        net = cls.__new__(cls)
        net.weights = [np.array(w, dtype=np.float64) for w in weights]
        net.biases = [np.array(b, dtype=np.float64) for b in biases]
        net.layer_sizes = [net.weights[0].shape[1]] + [w.shape[0] for w in net.weights]
        net._cache = None
        return net

    def copy(self) -> "DenseNet":
        return DenseNet.from_parameters(self.weights, self.biases)

    @property
    def num_layers(self):
        return len(self.weights)

    def forward(self, x):
        """Run the net on a single vector or a (batch, in) matrix.

        Activations are cached for a subsequent backward() on the same input.
        """
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        a = np.atleast_2d(x)
        if a.shape[1] != self.layer_sizes[0]:
            raise ValueError(f"input width {a.shape[1]} != expected {self.layer_sizes[0]}")
        acts = [a]
        pre = []
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ W.T + b
            pre.append(z)
            a = np.maximum(z, 0.0) if i < self.num_layers - 1 else z
            acts.append(a)
        self._cache = (x, acts, pre)
        return acts[-1][0] if single else acts[-1]

    def backward(self, x, grad_out):
        """Gradients of sum(output * grad_out) w.r.t. every parameter.

        Requires the activation cache from the matching forward(); the ReLU
        subgradient at exactly 0 is taken to be 0.
        """
        if self._cache is None:
            raise RuntimeError("backward called before forward")
        cached_x, acts, pre = self._cache
        if cached_x is not x and not np.array_equal(cached_x, np.asarray(x, dtype=np.float64)):
            raise RuntimeError("stale forward cache: backward input differs from cached input")
        g = np.atleast_2d(np.asarray(grad_out, dtype=np.float64))
        if g.shape != pre[-1].shape:
            raise ValueError(f"grad_out shape {g.shape} != output shape {pre[-1].shape}")
        grads = [None] * self.num_layers
        for i in reversed(range(self.num_layers)):
            grads[i] = (g.T @ acts[i], g.sum(axis=0))
            if i > 0:
                g = (g @ self.weights[i]) * (pre[i - 1] > 0.0)
        return grads


def smooth_l1(pred, target):
    """Elementwise smooth-L1 (Huber at threshold 1) and its d/dpred.

    |d| < 1 -> 0.5 d^2 with gradient d; otherwise |d| - 0.5 with gradient
    sign(d), where d = pred - target.
    """
    d = np.asarray(pred, dtype=np.float64) - np.asarray(target, dtype=np.float64)
    small = np.abs(d) < 1.0
    loss = np.where(small, 0.5 * d * d, np.abs(d) - 0.5)
    grad = np.where(small, d, np.sign(d))
    return loss, grad


class AdamState:
    """Per-parameter first/second moment accumulators with bias correction."""

    def __init__(self, net: DenseNet, lr: float = 1e-4, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        if lr <= 0:
            raise ValueError(f"learning rate must be > 0, got {lr}")
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self.m = [(np.zeros_like(W), np.zeros_like(b)) for W, b in zip(net.weights, net.biases)]
        self.v = [(np.zeros_like(W), np.zeros_like(b)) for W, b in zip(net.weights, net.biases)]


def optimizer_step(net: DenseNet, grads, opt: AdamState) -> None:
    """One in-place adaptive-moment update of every weight matrix and bias."""
    if len(grads) != net.num_layers:
        raise ValueError("gradient structure does not match the net")
    opt.step_count += 1
    bc1 = 1.0 - opt.beta1 ** opt.step_count
    bc2 = 1.0 - opt.beta2 ** opt.step_count
    for i, (dW, db) in enumerate(grads):
        for param, grad, m, v in (
            (net.weights[i], dW, opt.m[i][0], opt.v[i][0]),
            (net.biases[i], db, opt.m[i][1], opt.v[i][1]),
        ):
            if param.shape != grad.shape:
                raise ValueError(f"gradient shape {grad.shape} != parameter shape {param.shape}")
            m *= opt.beta1
            m += (1.0 - opt.beta1) * grad
            v *= opt.beta2
            v += (1.0 - opt.beta2) * grad * grad
            param -= opt.lr * (m / bc1) / (np.sqrt(v / bc2) + opt.eps)


def save_checkpoint(net: DenseNet, path) -> None:
    """Versioned text checkpoint: layer sizes, then row-major weight matrices
    and bias vectors at 17 significant digits (bit-exact round-trip).
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CHECKPOINT_MAGIC + "\n")
        fh.write(" ".join(str(s) for s in net.layer_sizes) + "\n")
        for W, b in zip(net.weights, net.biases):
            for row in W:
                fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
            fh.write(" ".join(f"{v:.17g}" for v in b) + "\n")


def load_checkpoint(path) -> DenseNet:
    with open(path, "r", encoding="utf-8") as fh:
        magic = fh.readline().strip()
        if magic != CHECKPOINT_MAGIC:
            raise ValueError(f"{path}: unsupported checkpoint format {magic!r}")
        sizes = [int(s) for s in fh.readline().split()]
        if len(sizes) < 2:
            raise ValueError(f"{path}: bad layer-size line")
        weights = []
        biases = []
        for fan_in, fan_out in zip(sizes, sizes[1:]):
            rows = []
            for _ in range(fan_out):
                row = [float(v) for v in fh.readline().split()]
                if len(row) != fan_in:
                    raise ValueError(f"{path}: truncated or malformed weight row")
                rows.append(row)
            weights.append(np.array(rows, dtype=np.float64))
            bias = [float(v) for v in fh.readline().split()]
            if len(bias) != fan_out:
                raise ValueError(f"{path}: truncated or malformed bias row")
            biases.append(np.array(bias, dtype=np.float64))
    return DenseNet.from_parameters(weights, biases)
