"""Mixed continuous/integer/categorical search spaces over a unit cube.

All optimizers in this package operate on *genotypes*: real vectors in
``[0, 1]^d``, one entry per dimension.  Decoding maps a genotype to a
*configuration*, a ``{name: value}`` dict of concrete hyperparameter
assignments.  Keeping the internal representation normalized lets PSO and
GA treat every dimension kind identically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import EncodingError, SpaceError

KINDS = ("continuous", "integer", "categorical")
SCALES = ("linear", "log10")

# Guards index arithmetic at exact boundary ratios k/m, whose float
# product can land just below the integer k.
_BOUNDARY_EPS = 1e-12


@dataclass(frozen=True)
class ParamSpec:
    """One search dimension.

    Args:
        name: Unique identifier within a space.
        kind: ``"continuous"``, ``"integer"`` or ``"categorical"``.
        lower: Inclusive lower bound (continuous/integer only).
        upper: Inclusive upper bound (continuous/integer only).
        choices: Ordered literals (categorical only).
        scale: ``"linear"`` or ``"log10"`` (continuous only).

    Raises:
        SpaceError: On any malformed combination of fields.
    """

    name: str
    kind: str
    lower: float | None = None
    upper: float | None = None
    choices: tuple[Any, ...] | None = None
    scale: str = "linear"

    def __post_init__(self) -> None:
        if not self.name or not isinstance(self.name, str):
            raise SpaceError("dimension name must be a non-empty string")
        if self.kind not in KINDS:
            raise SpaceError(f"unknown kind {self.kind!r} for dim {self.name!r}")
        if self.scale not in SCALES:
            raise SpaceError(f"unknown scale {self.scale!r} for dim {self.name!r}")

        if self.kind == "categorical":
            if self.lower is not None or self.upper is not None:
                raise SpaceError(f"categorical dim {self.name!r} takes no bounds")
            if not self.choices:
                raise SpaceError(f"categorical dim {self.name!r} needs choices")
            if len(set(self.choices)) != len(self.choices):
                raise SpaceError(f"duplicate choices in dim {self.name!r}")
            object.__setattr__(self, "choices", tuple(self.choices))
            return

        if self.choices is not None:
            raise SpaceError(f"{self.kind} dim {self.name!r} takes no choices")
        if self.lower is None or self.upper is None:
            raise SpaceError(f"{self.kind} dim {self.name!r} needs lower and upper")
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise SpaceError(f"non-finite bounds on dim {self.name!r}")
        if not self.lower < self.upper:
            raise SpaceError(f"dim {self.name!r} requires lower < upper")
        if self.kind == "integer":
            if self.scale != "linear":
                raise SpaceError(f"integer dim {self.name!r} must use linear scale")
            if int(self.lower) != self.lower or int(self.upper) != self.upper:
                raise SpaceError(f"integer dim {self.name!r} needs integral bounds")
        if self.scale == "log10" and self.lower <= 0:
            raise SpaceError(f"log10 scale on dim {self.name!r} requires lower > 0")

    def decode(self, v: float) -> Any:
        """Map one normalized coordinate to this dimension's value."""
        if not 0.0 <= v <= 1.0:
            raise EncodingError(
                f"coordinate {v!r} for dim {self.name!r} outside [0, 1]; clip first"
            )
        if self.kind == "continuous":
            if self.scale == "log10":
                lo, hi = math.log10(self.lower), math.log10(self.upper)
                return float(10.0 ** (lo + v * (hi - lo)))
            return float(self.lower + v * (self.upper - self.lower))
        if self.kind == "integer":
            raw = self.lower + v * (self.upper - self.lower)
            return int(math.floor(raw + 0.5))  # half-up
        m = len(self.choices)
        idx = min(m - 1, int(math.floor(v * m + _BOUNDARY_EPS)))
        return self.choices[idx]


@dataclass(frozen=True)
class SearchSpace:
    """Fixed, ordered list of dimensions defining the genotype layout."""

    dims: tuple[ParamSpec, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "dims", tuple(self.dims))
        names = [d.name for d in self.dims]
        if len(set(names)) != len(names):
            raise SpaceError("dimension names must be unique")

    @property
    def n_dims(self) -> int:
        return len(self.dims)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.dims)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Uniform genotype in ``[0, 1]^d``; deterministic for a fixed rng state."""
        return rng.random(self.n_dims)

    def decode(self, genotype: Sequence[float] | np.ndarray) -> dict[str, Any]:
        """Decode a genotype into a named configuration.

        Raises:
            EncodingError: If the genotype has the wrong length or any entry
                falls outside [0, 1].  Callers are expected to clip first.
        """
        g = np.asarray(genotype, dtype=float)
        if g.shape != (self.n_dims,):
            raise EncodingError(
                f"genotype has shape {g.shape}, expected ({self.n_dims},)"
            )
        return {dim.name: dim.decode(float(v)) for dim, v in zip(self.dims, g)}

    def continuous_indices(self) -> list[int]:
        return [i for i, d in enumerate(self.dims) if d.kind == "continuous"]

    def discrete_indices(self) -> list[int]:
        return [i for i, d in enumerate(self.dims) if d.kind != "continuous"]

    def subspace(self, indices: Sequence[int]) -> "SearchSpace":
        """New space keeping only the given dimensions, in the given order."""
        return SearchSpace(tuple(self.dims[i] for i in indices))


def clip_genotype(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Clip an arbitrary real vector entrywise into [0, 1]."""
    return np.clip(np.asarray(values, dtype=float), 0.0, 1.0)


def continuous_dim(name: str, lower: float, upper: float, scale: str = "linear") -> ParamSpec:
    return ParamSpec(name=name, kind="continuous", lower=lower, upper=upper, scale=scale)


def integer_dim(name: str, lower: int, upper: int) -> ParamSpec:
    return ParamSpec(name=name, kind="integer", lower=lower, upper=upper)


def categorical_dim(name: str, choices: Sequence[Any]) -> ParamSpec:
    return ParamSpec(name=name, kind="categorical", choices=tuple(choices))


def unit_cube_space(n_dims: int, prefix: str = "x") -> SearchSpace:
    """Plain continuous box [0, 1]^n, used for benchmark-function runs."""
    return SearchSpace(
        tuple(continuous_dim(f"{prefix}{i}", 0.0, 1.0) for i in range(n_dims))
    )


def default_anxiety_space() -> SearchSpace:
    """The built-in six-dimension space for the bundled classifier objective.

    Covers learning rate (log scale over three decades), batch size, dropout,
    dense width, hidden depth, and attention heads.  ``attention_heads`` is
    accepted and ignored by the built-in feed-forward trainer; it is kept so
    configurations remain drop-in for attention-based models.
    """
    return SearchSpace(
        (
            continuous_dim("learning_rate", 1e-5, 1e-2, scale="log10"),
            categorical_dim("batch_size", (16, 32, 64)),
            continuous_dim("dropout", 0.2, 0.6),
            categorical_dim("hidden_units", (64, 128, 256, 512)),
            integer_dim("num_layers", 1, 3),
            categorical_dim("attention_heads", (2, 4, 8)),
        )
    )
