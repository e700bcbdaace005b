"""Small dense networks with hand-written reverse mode.

Everything is float64 numpy.  A :class:`DenseNet` caches the activations of
its last forward pass; :meth:`DenseNet.backward` consumes that cache.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Sequence

import numpy as np

ACTIVATIONS = ("relu", "identity")


@dataclass
class Layer:
    W: np.ndarray  # (fan_in, fan_out)
    b: np.ndarray  # (fan_out,)
    activation: str = "identity"

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.W.ndim != 2 or self.b.shape != (self.W.shape[1],):
            raise ValueError("layer weight/bias shapes disagree")


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class DenseNet:
    def __init__(self, layers: Sequence[Layer]):
        self.layers = list(layers)
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.W.shape[1] != nxt.W.shape[0]:
                raise ValueError("consecutive layer dimensions do not match")
        self._cache: Optional[List[tuple]] = None

    @classmethod
    def build(cls, sizes: Sequence[int], rng: np.random.Generator,
              hidden_activation: str = "relu", output_activation: str = "identity") -> "DenseNet":
        """``sizes=[in, h1, ..., out]``; hidden layers use ``hidden_activation``."""
        layers = []
        for i, (fi, fo) in enumerate(zip(sizes[:-1], sizes[1:])):
            act = output_activation if i == len(sizes) - 2 else hidden_activation
            layers.append(Layer(glorot_uniform(rng, fi, fo), np.zeros(fo), act))
        return cls(layers)

    @property
    def in_dim(self) -> int:
        return self.layers[0].W.shape[0]

    @property
    def out_dim(self) -> int:
        return self.layers[-1].W.shape[1]

    @property
    def n_params(self) -> int:
        return sum(p.size for p in self.params())

    def params(self) -> List[np.ndarray]:
        out = []
        for layer in self.layers:
            out.extend((layer.W, layer.b))
        return out

    def copy(self) -> "DenseNet":
        return DenseNet([Layer(l.W.copy(), l.b.copy(), l.activation) for l in self.layers])

    def load_params_from(self, other: "DenseNet") -> None:
        for p, q in zip(self.params(), other.params()):
            p[...] = q

    def flat(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.params()])

    def set_flat(self, vec: np.ndarray) -> None:
        i = 0
        for p in self.params():
            p[...] = vec[i:i + p.size].reshape(p.shape)
            i += p.size

    def forward(self, x: np.ndarray, cache: bool = True) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        h = x[None, :] if single else x
        if h.shape[1] != self.in_dim:
            raise ValueError(f"input has dimension {h.shape[1]}, net expects {self.in_dim}")
        trace = []
        for layer in self.layers:
            z = h @ layer.W + layer.b
            out = np.maximum(z, 0.0) if layer.activation == "relu" else z
            trace.append((h, z))
            h = out
        if cache:
            self._cache = (single, trace)
        return h[0] if single else h

    __call__ = forward

    def backward(self, upstream: np.ndarray):
        """Gradients of ``sum(output * upstream)`` from the last cached forward.

        Returns ``(param_grads, input_grad)`` with ``param_grads`` ordered like
        :meth:`params`.
        """
        if self._cache is None:
            raise RuntimeError("backward() needs a cached forward pass")
        single, trace = self._cache
        g = np.asarray(upstream, dtype=float)
        g = g[None, :] if single else g
        grads: List[np.ndarray] = []
        for layer, (h, z) in zip(reversed(self.layers), reversed(trace)):
            if layer.activation == "relu":
                g = g * (z > 0)
            grads.append(g.sum(axis=0))
            grads.append(h.T @ g)
            g = g @ layer.W.T
        grads.reverse()
        return grads, (g[0] if single else g)

    # ---- checkpoints ------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "layers": [{"in": l.W.shape[0], "out": l.W.shape[1], "activation": l.activation}
                       for l in self.layers],
            "params": self.flat().tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DenseNet":
        layers = [Layer(np.zeros((d["in"], d["out"])), np.zeros(d["out"]), d["activation"])
                  for d in data["layers"]]
        net = cls(layers)
        vec = np.asarray(data["params"], dtype=float)
        if vec.size != net.n_params:
            raise ValueError("checkpoint parameter count does not match its layer header")
        net.set_flat(vec)
        return net

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path) -> "DenseNet":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class OptimizerState:
    lr: float = 1e-3
    kind: str = "sgd"
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: List[np.ndarray] = field(default_factory=list)
    v: List[np.ndarray] = field(default_factory=list)


def sgd_step(net: DenseNet, grads: Sequence[np.ndarray], opt: OptimizerState, scale: float = 1.0) -> None:
    """In-place descent step; ``kind='adam'`` switches to Adam moments."""
    params = net.params()
    if len(grads) != len(params):
        raise ValueError("gradient list does not match parameter list")
    for p, g in zip(params, grads):
        if p.shape != np.shape(g):
            raise ValueError(f"gradient shape {np.shape(g)} != parameter shape {p.shape}")
    opt.step += 1
    if opt.kind == "sgd":
        lr = opt.lr * scale
        for p, g in zip(params, grads):
            p -= lr * g
        return
    if opt.kind != "adam":
        raise ValueError(f"unknown optimizer {opt.kind!r}")
    if not opt.m:
        opt.m = [np.zeros_like(p) for p in params]
        opt.v = [np.zeros_like(p) for p in params]
    c1 = 1 - opt.beta1 ** opt.step
    c2 = 1 - opt.beta2 ** opt.step
    for p, g, m, v in zip(params, grads, opt.m, opt.v):
        g = scale * g
        m *= opt.beta1
        m += (1 - opt.beta1) * g
        v *= opt.beta2
        v += (1 - opt.beta2) * g * g
        p -= opt.lr * (m / c1) / (np.sqrt(v / c2) + opt.eps)


# ---- gradient checking ----------------------------------------------------

def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    a = np.abs(np.asarray(analytic, dtype=float))
    n = np.abs(np.asarray(numeric, dtype=float))
    denom = np.maximum(np.maximum(a, n), 1e-8)
    return float(np.max(np.abs(np.asarray(analytic) - np.asarray(numeric)) / denom))


def numeric_grad(fn: Callable[[], float], arr: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    """Central differences of ``fn()`` w.r.t. ``arr`` (perturbed in place, then restored)."""
    grad = np.zeros_like(arr)
    it = np.nditer(arr, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        old = arr[idx]
        arr[idx] = old + eps
        hi = fn()
        arr[idx] = old - eps
        lo = fn()
        arr[idx] = old
        grad[idx] = (hi - lo) / (2 * eps)
    return grad


def finite_diff_check(net: DenseNet, x: np.ndarray, eps: float = 1e-5,
                      upstream: Optional[np.ndarray] = None) -> float:
    """Max relative error between backward() and central differences.

    The scalar probed is ``sum(net(x) * upstream)``; ``upstream`` defaults to ones.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    out = net.forward(x)
    upstream = np.ones_like(out) if upstream is None else np.asarray(upstream, dtype=float)
    grads, _ = net.backward(upstream)

    def loss():
        return float(np.sum(net.forward(x, cache=False) * upstream))

    return max(relative_error(g, numeric_grad(loss, p, eps)) for p, g in zip(net.params(), grads))
