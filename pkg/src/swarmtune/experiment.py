"""Experiment configuration: the JSON schema the CLI consumes.

A config names a data source (CSV file, the synthetic generator, or an
analytic benchmark), a search space, one optimizer with its settings, the
training/objective parameters and the evaluation protocol.  Everything
except ``workers`` and ``out_dir`` is *semantic*: run outputs are a pure
function of the semantic part plus the master seed.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .errors import ConfigError
from .ga import GaConfig
from .hybrid import HybridConfig
from .pso import PsoConfig
from .space import ParamSpec, SearchSpace, default_anxiety_space

OPTIMIZERS = ("pso", "ga", "hybrid", "sh", "hyperband", "feature_select")

_TOP_LEVEL_KEYS = {
    "dataset",
    "optimizer",
    "space",
    "pso",
    "ga",
    "hybrid",
    "sh",
    "hyperband",
    "feature_select",
    "trainer",
    "objective",
    "cv",
    "repeats",
    "master_seed",
    "workers",
    "out_dir",
}

_DATASET_KEYS = {"csv", "synthetic", "benchmark"}


def _build(cls, section: Mapping[str, Any], label: str):
    try:
        return cls(**section)
    except TypeError as exc:
        raise ConfigError(f"bad {label} section: {exc}") from None
    except Exception as exc:
        raise ConfigError(f"bad {label} section: {exc}") from exc


@dataclass(frozen=True)
class CvSettings:
    k: int = 5
    kind: str = "kfold"
    stratified: bool = True
    seed: int = 0


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description (sections stay as plain dicts)."""

    dataset: dict
    optimizer: str
    space: Any = "default"
    pso: dict = field(default_factory=dict)
    ga: dict = field(default_factory=dict)
    hybrid: dict = field(default_factory=dict)
    sh: dict = field(default_factory=dict)
    hyperband: dict = field(default_factory=dict)
    feature_select: dict = field(default_factory=dict)
    trainer: dict = field(default_factory=dict)
    objective: dict = field(default_factory=dict)
    cv: dict = field(default_factory=dict)
    repeats: int = 5
    master_seed: int = 0
    workers: int = 1
    out_dir: str | None = None

    def __post_init__(self) -> None:
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"unknown optimizer {self.optimizer!r}; pick one of {OPTIMIZERS}")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        keys = set(self.dataset)
        if len(keys & _DATASET_KEYS) != 1:
            raise ConfigError(f"dataset must contain exactly one of {sorted(_DATASET_KEYS)}")
        if "csv" in self.dataset:
            path = self.dataset["csv"].get("path")
            if not path:
                raise ConfigError("dataset.csv needs a 'path'")
            if not Path(path).exists():
                raise ConfigError(f"dataset file not found: {path}")
        # the typed builders validate their own sections eagerly
        self.cv_settings()
        self.pso_config()
        self.ga_config()
        self.hybrid_config()

    @staticmethod
    def from_dict(raw: Mapping[str, Any]) -> "ExperimentConfig":
        unknown = set(raw) - _TOP_LEVEL_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "dataset" not in raw or "optimizer" not in raw:
            raise ConfigError("config requires 'dataset' and 'optimizer'")
        return ExperimentConfig(**dict(raw))

    @staticmethod
    def from_file(path: str | Path) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        return ExperimentConfig.from_dict(raw)

    # -- typed views -------------------------------------------------------

    def cv_settings(self) -> CvSettings:
        return _build(CvSettings, self.cv, "cv")

    def pso_config(self) -> PsoConfig:
        return _build(PsoConfig, self.pso, "pso")

    def ga_config(self) -> GaConfig:
        return _build(GaConfig, self.ga, "ga")

    def hybrid_config(self) -> HybridConfig:
        section = dict(self.hybrid)
        return _build(
            HybridConfig,
            {
                "ga": self.ga_config(),
                "pso": self.pso_config(),
                **section,
            },
            "hybrid",
        )

    def search_space(self, n_features: int | None = None) -> SearchSpace:
        if self.optimizer == "feature_select":
            from .ga import feature_selection_space

            if n_features is None:
                raise ConfigError("feature selection needs the dataset's feature count")
            return feature_selection_space(n_features)
        if isinstance(self.space, str):
            if self.space == "default":
                return default_anxiety_space()
            raise ConfigError(f"unknown space name {self.space!r}")
        if not isinstance(self.space, list) or not self.space:
            raise ConfigError("space must be 'default' or a non-empty list of dims")
        dims = []
        for entry in self.space:
            entry = dict(entry)
            if "choices" in entry and entry["choices"] is not None:
                entry["choices"] = tuple(entry["choices"])
            dims.append(_build(ParamSpec, entry, "space dimension"))
        return SearchSpace(tuple(dims))

    def semantic_dict(self) -> dict:
        """Everything that determines run outputs (no workers/out_dir)."""
        return {
            "dataset": self.dataset,
            "optimizer": self.optimizer,
            "space": self.space,
            "pso": self.pso,
            "ga": self.ga,
            "hybrid": self.hybrid,
            "sh": self.sh,
            "hyperband": self.hyperband,
            "feature_select": self.feature_select,
            "trainer": self.trainer,
            "objective": self.objective,
            "cv": self.cv,
            "repeats": self.repeats,
            "master_seed": self.master_seed,
        }

    def override(self, **changes) -> "ExperimentConfig":
        import dataclasses

        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})
