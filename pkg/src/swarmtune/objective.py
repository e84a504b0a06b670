"""Training objective: fit the built-in classifier under a decoded
configuration and score it on a held-out subject-disjoint split.

The returned scalar follows the engine-wide minimization convention: the
primary metric (validation F1 or AUC) enters negated, optionally plus a
model-size penalty and a feature-subset-size penalty.  Checkpoints capture
weights, optimizer moments and the RNG state, so resuming k extra epochs
reproduces a fresh (k0 + k)-epoch run bit for bit.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .data import Dataset, class_weights, zscore_apply, zscore_fit
from .errors import InvalidDataError, TrainingDivergedError, UndefinedMetricError
from .losses import LOSS_KINDS, loss_and_grad
from .metrics import MetricsReport, auc, binary_metrics
from .network import Mlp, OptimizerState, make_optimizer, optimizer_step
from .rng import rng_from, stable_digest


@dataclass(frozen=True)
class TrainerConfig:
    """Everything one training run depends on besides the data."""

    learning_rate: float = 1e-3
    batch_size: int = 32
    dropout: float = 0.2
    hidden_units: int = 64
    num_layers: int = 1
    loss: str = "weighted_bce"
    optimizer_kind: str = "adam"
    weight_decay: float = 0.0
    focal_gamma: float = 2.0
    epochs: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise InvalidDataError("learning_rate must be > 0")
        if self.batch_size < 1:
            raise InvalidDataError("batch_size must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise InvalidDataError("dropout must be in [0, 1)")
        if self.hidden_units < 1 or self.num_layers < 1:
            raise InvalidDataError("network needs positive width and depth")
        if self.loss not in LOSS_KINDS:
            raise InvalidDataError(f"unknown loss {self.loss!r}")
        if self.optimizer_kind not in ("sgd", "adam", "adamw"):
            raise InvalidDataError(f"unknown optimizer {self.optimizer_kind!r}")
        if self.weight_decay < 0:
            raise InvalidDataError("weight_decay must be >= 0")
        if self.epochs < 1:
            raise InvalidDataError("epochs must be >= 1 (invalid budget)")

    def digest(self) -> str:
        """Digest of everything except the epoch budget (resume identity)."""
        d = dataclasses.asdict(self)
        d.pop("epochs")
        return stable_digest(d)

    def identity_digest(self) -> str:
        """Digest excluding seed and epochs, for cache keys that carry both."""
        d = dataclasses.asdict(self)
        d.pop("epochs")
        d.pop("seed")
        return stable_digest(d)

    @staticmethod
    def from_configuration(config: dict[str, Any], **overrides) -> "TrainerConfig":
        """Build from a decoded search-space configuration.

        Unknown keys (e.g. ``attention_heads``, which the feed-forward
        trainer has no use for) are ignored; ``overrides`` win over both
        the configuration and the defaults.
        """
        known = {f.name for f in dataclasses.fields(TrainerConfig)}
        merged = {k: v for k, v in config.items() if k in known}
        merged.update(overrides)
        return TrainerConfig(**merged)


@dataclass(frozen=True)
class ObjectiveSpec:
    """Scalarization of the validation report.

    scalar = -primary + secondary_penalty_weight * size_norm
             + feature_penalty * mask_fraction

    ``size_norm`` is the parameter count over ``size_reference`` (defaults
    to the widest/deepest configurable network on the full feature width).
    An undefined primary metric scores 0, the worst bounded value, so the
    objective stays total.
    """

    primary_metric: str = "f1"
    secondary_penalty_weight: float = 0.0
    feature_penalty: float = 0.01
    threshold: float = 0.5
    size_reference: int | None = None

    def __post_init__(self) -> None:
        if self.primary_metric not in ("f1", "auc"):
            raise InvalidDataError("primary_metric must be 'f1' or 'auc'")
        if self.secondary_penalty_weight < 0 or self.feature_penalty < 0:
            raise InvalidDataError("penalty weights must be >= 0")
        if not 0.0 < self.threshold < 1.0:
            raise InvalidDataError("threshold must be inside (0, 1)")


@dataclass
class Checkpoint:
    """Opaque resumable training state, cache-keyed by the caller."""

    params: list[np.ndarray]
    optimizer: OptimizerState
    rng_state: dict
    epochs_done: int
    trainer_digest: str


def mlp_param_count(n_inputs: int, hidden_units: int, num_layers: int) -> int:
    """Parameter count of the classifier without building it."""
    count = n_inputs * hidden_units + hidden_units
    count += (num_layers - 1) * (hidden_units * hidden_units + hidden_units)
    count += hidden_units + 1
    return count


def scalar_objective(
    report: MetricsReport,
    spec: ObjectiveSpec,
    param_count: int = 0,
    mask_fraction: float = 0.0,
    size_reference: int | None = None,
) -> float:
    primary = getattr(report, spec.primary_metric)
    if primary is None or math.isnan(primary):
        primary = 0.0
    value = -float(primary)
    if spec.secondary_penalty_weight > 0:
        ref = spec.size_reference or size_reference
        if not ref:
            raise InvalidDataError("size penalty requires a size reference")
        value += spec.secondary_penalty_weight * (param_count / ref)
    value += spec.feature_penalty * mask_fraction
    return value


def _check_disjoint(train: Dataset, val: Dataset) -> None:
    overlap = set(train.subject_ids) & set(val.subject_ids)
    if overlap:
        raise InvalidDataError(f"train/validation subjects overlap: {sorted(overlap)[:5]}")


def _run_epochs(
    net: Mlp,
    opt: OptimizerState,
    rng: np.random.Generator,
    x: np.ndarray,
    y: np.ndarray,
    weights: np.ndarray,
    cfg: TrainerConfig,
    n_epochs: int,
) -> None:
    n = x.shape[0]
    for _ in range(n_epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            probs, cache = net.forward(x[idx], dropout=cfg.dropout, rng=rng)
            value, dlogits = loss_and_grad(
                cfg.loss, probs, y[idx], class_weights=weights, gamma=cfg.focal_gamma
            )
            if not math.isfinite(value):
                raise TrainingDivergedError(f"non-finite loss at step (value={value})")
            grads = net.backward(cache, dlogits)
            optimizer_step(opt, net.parameters, grads)


def train_and_score(
    cfg: TrainerConfig,
    train: Dataset,
    val: Dataset,
    mask: np.ndarray | None = None,
    spec: ObjectiveSpec | None = None,
    resume: Checkpoint | None = None,
) -> tuple[float, MetricsReport, Checkpoint]:
    """Train on ``train``, score on ``val``, return (scalar, report, checkpoint).

    Normalization statistics are fit on the training split only and applied
    unchanged to validation.  ``mask`` restricts both splits to a feature
    subset and is charged through the feature penalty.  Passing ``resume``
    continues a previous checkpoint of the same trainer digest up to
    ``cfg.epochs`` total epochs.

    Raises:
        InvalidDataError: Empty splits, overlapping subjects, bad mask or
            incompatible resume checkpoint.
        TrainingDivergedError: Non-finite training loss.
    """
    spec = spec or ObjectiveSpec()
    _check_disjoint(train, val)
    mask_fraction = 0.0
    full_width = train.n_features
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        mask_fraction = float(mask.sum()) / mask.size
        train = train.select_features(mask)  # raises on the all-off mask
        val = val.select_features(mask)

    stats = zscore_fit(train)
    x_train = zscore_apply(stats, train.features)
    x_val = zscore_apply(stats, val.features)
    y_train = train.labels.astype(float)
    weights = class_weights(train.labels)

    digest = cfg.digest()
    if resume is not None:
        if resume.trainer_digest != digest:
            raise InvalidDataError("checkpoint belongs to a different trainer config")
        if resume.epochs_done > cfg.epochs:
            raise InvalidDataError("checkpoint already beyond the requested budget")
        rng = rng_from("train", cfg.seed)
        net = Mlp(x_train.shape[1], cfg.hidden_units, cfg.num_layers, rng)
        net.load_state(resume.params)
        opt = dataclasses.replace(
            resume.optimizer,
            m=None if resume.optimizer.m is None else [a.copy() for a in resume.optimizer.m],
            v=None if resume.optimizer.v is None else [a.copy() for a in resume.optimizer.v],
        )
        rng.bit_generator.state = resume.rng_state
        remaining = cfg.epochs - resume.epochs_done
    else:
        rng = rng_from("train", cfg.seed)
        net = Mlp(x_train.shape[1], cfg.hidden_units, cfg.num_layers, rng)
        opt = make_optimizer(cfg.optimizer_kind, cfg.learning_rate, cfg.weight_decay)
        remaining = cfg.epochs

    _run_epochs(net, opt, rng, x_train, y_train, weights, cfg, remaining)

    probs, _ = net.forward(x_val)
    preds = (probs >= spec.threshold).astype(np.int64)
    report = binary_metrics(preds, val.labels)
    try:
        report = dataclasses.replace(report, auc=auc(probs, val.labels))
    except UndefinedMetricError:
        pass  # single-class validation split; AUC stays absent

    size_ref = mlp_param_count(full_width, 512, 3)
    value = scalar_objective(
        report,
        spec,
        param_count=net.param_count(),
        mask_fraction=mask_fraction,
        size_reference=size_ref,
    )
    checkpoint = Checkpoint(
        params=net.state(),
        optimizer=opt,
        rng_state=rng.bit_generator.state,
        epochs_done=cfg.epochs,
        trainer_digest=digest,
    )
    return value, report, checkpoint
