"""Binary classification losses with analytic logit gradients.

Both losses take predicted probabilities (assumed to come from a sigmoid)
and return the mean loss together with its gradient with respect to the
logits, which is what backpropagation consumes.  Probabilities are clamped
to [1e-12, 1 - 1e-12] so values stay finite at saturation.
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidWeightsError

PROB_EPS = 1e-12
LOSS_KINDS = ("weighted_bce", "focal")


def _prepare(
    probs: np.ndarray, labels: np.ndarray, class_weights
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    p = np.clip(np.asarray(probs, dtype=float), PROB_EPS, 1.0 - PROB_EPS)
    y = np.asarray(labels, dtype=float)
    if p.shape != y.shape:
        raise InvalidWeightsError("probabilities and labels must align")
    if class_weights is None:
        w = np.ones(2)
    else:
        w = np.asarray(class_weights, dtype=float)
        if w.shape != (2,):
            raise InvalidWeightsError("class_weights must hold exactly two entries")
    return p, y, w


def weighted_bce(
    probs: np.ndarray, labels: np.ndarray, class_weights=None
) -> tuple[float, np.ndarray]:
    """Class-weighted binary cross-entropy.

    value = -mean(w_y * [y log p + (1-y) log(1-p)]); the logit gradient is
    w_y * (p - y) / N.
    """
    p, y, w = _prepare(probs, labels, class_weights)
    wy = np.where(y == 1, w[1], w[0])
    n = p.size
    value = -np.sum(wy * (y * np.log(p) + (1.0 - y) * np.log(1.0 - p))) / n
    grad = wy * (p - y) / n
    return float(value), grad


def focal(
    probs: np.ndarray,
    labels: np.ndarray,
    gamma: float = 2.0,
    alpha=None,
) -> tuple[float, np.ndarray]:
    """Focal loss: -mean(alpha_y * (1 - p_y)^gamma * log p_y).

    ``p_y`` is the probability assigned to the true class.  With gamma = 0
    and unit alpha this reduces exactly to unweighted cross-entropy.
    """
    if gamma < 0:
        raise InvalidWeightsError("gamma must be >= 0")
    p, y, a = _prepare(probs, labels, alpha)
    ay = np.where(y == 1, a[1], a[0])
    t = np.where(y == 1, p, 1.0 - p)  # already clamped via p
    n = p.size
    one_minus_t = 1.0 - t
    value = -np.sum(ay * one_minus_t**gamma * np.log(t)) / n

    # dL_i/dt, then chain through dt/dz = +/- p(1-p)
    if gamma == 0.0:
        dl_dt = -ay / t
    else:
        dl_dt = ay * (gamma * one_minus_t ** (gamma - 1.0) * np.log(t) - one_minus_t**gamma / t)
    dt_dz = np.where(y == 1, 1.0, -1.0) * p * (1.0 - p)
    grad = dl_dt * dt_dz / n
    return float(value), grad


def loss_and_grad(
    kind: str,
    probs: np.ndarray,
    labels: np.ndarray,
    class_weights=None,
    gamma: float = 2.0,
    alpha=None,
) -> tuple[float, np.ndarray]:
    """Dispatch by loss kind; ``alpha`` defaults to the class weights."""
    if kind == "weighted_bce":
        return weighted_bce(probs, labels, class_weights)
    if kind == "focal":
        return focal(probs, labels, gamma=gamma, alpha=alpha if alpha is not None else class_weights)
    raise InvalidWeightsError(f"unknown loss kind {kind!r}")
