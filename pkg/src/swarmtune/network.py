"""Small feed-forward binary classifier, written directly on numpy.

The network is a stack of ReLU hidden layers with inverted dropout and a
single sigmoid output unit.  Forward passes cache what backward needs;
gradients are exact, which the finite-difference test suite verifies.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDataError


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class Mlp:
    """Multilayer perceptron with ``num_layers`` hidden layers of equal width.

    Parameters are float64 throughout; given the same seed the initial
    weights are bit-identical on every platform.
    """

    def __init__(self, n_inputs: int, hidden_units: int, num_layers: int, rng: np.random.Generator) -> None:
        if n_inputs < 1:
            raise InvalidDataError("network needs at least one input feature")
        if num_layers < 1:
            raise InvalidDataError("num_layers must be >= 1")
        sizes = [n_inputs] + [hidden_units] * num_layers + [1]
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            scale = np.sqrt(2.0 / fan_in)  # He init for the ReLU stack
            self.weights.append(rng.normal(0.0, scale, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    @property
    def parameters(self) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def param_count(self) -> int:
        return sum(p.size for p in self.parameters)

    def forward(
        self,
        x: np.ndarray,
        dropout: float = 0.0,
        rng: np.random.Generator | None = None,
    ) -> tuple[np.ndarray, dict]:
        """Probabilities for a batch plus the cache backward() consumes.

        Inverted dropout runs only when both a rate and an rng are given
        (train time); the kept activations are scaled by 1/(1-rate) so the
        expected activation matches the no-dropout pass.
        """
        acts = [x]
        masks: list[np.ndarray | None] = []
        a = x
        n_hidden = len(self.weights) - 1
        for layer in range(n_hidden):
            z = a @ self.weights[layer] + self.biases[layer]
            a = np.maximum(z, 0.0)
            if dropout > 0.0 and rng is not None:
                keep = rng.random(a.shape) >= dropout
                a = a * keep / (1.0 - dropout)
                masks.append(keep)
            else:
                masks.append(None)
            acts.append(a)
        logits = (a @ self.weights[-1] + self.biases[-1]).ravel()
        probs = sigmoid(logits)
        cache = {"acts": acts, "masks": masks, "dropout": dropout}
        return probs, cache

    def backward(self, cache: dict, dloss_dlogits: np.ndarray) -> list[np.ndarray]:
        """Gradients for every parameter, in ``parameters`` order."""
        acts, masks, dropout = cache["acts"], cache["masks"], cache["dropout"]
        grads: list[np.ndarray | None] = [None] * (2 * len(self.weights))
        delta = dloss_dlogits.reshape(-1, 1)
        grads[-2] = acts[-1].T @ delta
        grads[-1] = delta.sum(axis=0)
        upstream = delta @ self.weights[-1].T
        for layer in range(len(self.weights) - 2, -1, -1):
            a = acts[layer + 1]
            if masks[layer] is not None:
                upstream = upstream * masks[layer] / (1.0 - dropout)
            # dropped units have a == 0 and zero upstream, so gating on the
            # post-dropout activation equals gating on the pre-dropout one
            dz = upstream * (a > 0)
            grads[2 * layer] = acts[layer].T @ dz
            grads[2 * layer + 1] = dz.sum(axis=0)
            upstream = dz @ self.weights[layer].T
        return grads  # type: ignore[return-value]

    def state(self) -> list[np.ndarray]:
        return [p.copy() for p in self.parameters]

    def load_state(self, state: list[np.ndarray]) -> None:
        params = self.parameters
        if len(params) != len(state):
            raise InvalidDataError("checkpoint does not match network shape")
        for p, s in zip(params, state):
            if p.shape != s.shape:
                raise InvalidDataError("checkpoint does not match network shape")
            p[...] = s


@dataclass
class OptimizerState:
    kind: str
    learning_rate: float
    weight_decay: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list[np.ndarray] | None = None
    v: list[np.ndarray] | None = None


def make_optimizer(kind: str, learning_rate: float, weight_decay: float = 0.0) -> OptimizerState:
    if kind not in ("sgd", "adam", "adamw"):
        raise InvalidDataError(f"unknown optimizer kind {kind!r}")
    return OptimizerState(kind=kind, learning_rate=learning_rate, weight_decay=weight_decay)


def optimizer_step(state: OptimizerState, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
    """In-place parameter update.

    ``adam`` folds weight decay into the gradient (L2 regularization);
    ``adamw`` applies it decoupled, directly on the parameters.  With zero
    decay the two coincide exactly.
    """
    lr, wd = state.learning_rate, state.weight_decay
    if state.kind == "sgd":
        for p, g in zip(params, grads):
            p -= lr * (g + wd * p)
        return
    if state.m is None:
        state.m = [np.zeros_like(p) for p in params]
        state.v = [np.zeros_like(p) for p in params]
    state.t += 1
    b1, b2, eps = state.beta1, state.beta2, state.eps
    bc1 = 1.0 - b1**state.t
    bc2 = 1.0 - b2**state.t
    for i, (p, g) in enumerate(zip(params, grads)):
        if state.kind == "adam" and wd:
            g = g + wd * p
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g
        m_hat = state.m[i] / bc1
        v_hat = state.v[i] / bc2
        p -= lr * m_hat / (np.sqrt(v_hat) + eps)
        if state.kind == "adamw" and wd:
            p -= lr * wd * p
