"""Generational genetic algorithm over normalized genotypes.

Tournament selection, uniform crossover, single-gene mutation and elitism,
all on the same ``[0, 1]^d`` encoding the swarm optimizer uses.  A binary
categorical space builder turns the same machinery into feature-subset
selection.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import NoResultError, ProtocolError, SpaceError
from .pso import _check_values
from .rng import rng_from
from .space import SearchSpace, categorical_dim


@dataclass(frozen=True)
class GaConfig:
    """Population settings. Defaults follow the 30-chromosome setup with
    tournament selection, 0.8 crossover and 0.1 mutation; the mutation
    rate applies per gene, independently."""

    population: int = 30
    generations: int = 25
    crossover_rate: float = 0.8
    mutation_rate: float = 0.1
    tournament_size: int = 3
    elitism: int = 1
    mutation_sigma: float = 0.1

    def __post_init__(self) -> None:
        if self.population < 2:
            raise SpaceError("population must be >= 2")
        if self.generations < 1:
            raise SpaceError("generations must be >= 1")
        for label in ("crossover_rate", "mutation_rate"):
            if not 0.0 <= getattr(self, label) <= 1.0:
                raise SpaceError(f"{label} must be in [0, 1]")
        if not 1 <= self.tournament_size <= self.population:
            raise SpaceError("tournament_size must be in [1, population]")
        # elitism == population is the degenerate identity evolution
        if not 0 <= self.elitism <= self.population:
            raise SpaceError("elitism must be in [0, population]")
        if self.mutation_sigma <= 0:
            raise SpaceError("mutation_sigma must be > 0")


class GeneticAlgorithm:
    """Ask/tell GA over a :class:`~swarmtune.space.SearchSpace`.

    Mutation is kind-aware: continuous and integer genes take additive
    Gaussian noise (then clip), categorical genes resample uniformly.
    """

    def __init__(
        self,
        space: SearchSpace,
        config: GaConfig | None = None,
        seed: int = 0,
    ) -> None:
        self.space = space
        self.config = config or GaConfig()
        self._rng = rng_from("ga", seed)
        self._categorical = np.array(
            [d.kind == "categorical" for d in space.dims], dtype=bool
        )
        n, d = self.config.population, space.n_dims
        self._pop = np.vstack([space.sample(self._rng) for _ in range(n)]) if d else np.zeros((n, 0))
        self._values = np.full(n, np.inf)
        self._best_val = np.inf
        self._best_geno: np.ndarray | None = None
        self.generation = 0
        self._awaiting_tell = False

    def _tournament(self) -> np.ndarray:
        idx = self._rng.choice(
            self.config.population, size=self.config.tournament_size, replace=False
        )
        winner = min(idx, key=lambda i: (self._values[i], i))
        return self._pop[winner]

    def _offspring(self) -> np.ndarray:
        cfg = self.config
        p1 = self._tournament()
        p2 = self._tournament()
        if self._rng.random() < cfg.crossover_rate:
            mask = self._rng.random(self.space.n_dims) < 0.5
            child = np.where(mask, p1, p2)
        else:
            child = p1.copy()
        if self.space.n_dims:
            mutate = self._rng.random(self.space.n_dims) < cfg.mutation_rate
            for gene in np.flatnonzero(mutate):
                if self._categorical[gene]:
                    child[gene] = self._rng.random()
                else:
                    child[gene] = np.clip(
                        child[gene] + self._rng.normal(0.0, cfg.mutation_sigma), 0.0, 1.0
                    )
        return child

    def ask(self) -> list[np.ndarray]:
        """Next generation's genotypes (generation 0 is the random init)."""
        if self._awaiting_tell:
            raise ProtocolError("ask() called again before tell()")
        if self.generation > 0:
            order = sorted(
                range(self.config.population), key=lambda i: (self._values[i], i)
            )
            new = [self._pop[i].copy() for i in order[: self.config.elitism]]
            while len(new) < self.config.population:
                new.append(self._offspring())
            self._pop = np.vstack(new)
            self._values = np.full(self.config.population, np.inf)
        self._awaiting_tell = True
        return [row.copy() for row in self._pop]

    def tell(self, values: Sequence[float]) -> None:
        """Report objective values for the last asked generation, in order."""
        if not self._awaiting_tell:
            raise ProtocolError("tell() without a pending ask()")
        vals = _check_values(values, self.config.population)
        self._values = vals
        for i, v in enumerate(vals):
            if v < self._best_val:  # strict improvement, lowest index wins ties
                self._best_val = float(v)
                self._best_geno = self._pop[i].copy()
        self._awaiting_tell = False
        self.generation += 1

    @property
    def best_value(self) -> float:
        if self._best_geno is None:
            raise NoResultError("no generation evaluated yet")
        return self._best_val

    @property
    def best_genotype(self) -> np.ndarray:
        if self._best_geno is None:
            raise NoResultError("no generation evaluated yet")
        return self._best_geno.copy()

    def best(self) -> tuple[dict[str, Any], float]:
        """Decoded best-ever individual and its value."""
        return self.space.decode(self.best_genotype), self.best_value

    def run(self, objective, generations: int | None = None) -> tuple[dict[str, Any], float]:
        """Drive ask/tell sequentially against ``objective(genotype) -> value``."""
        for _ in range(generations or self.config.generations):
            batch = self.ask()
            self.tell([float(objective(g)) for g in batch])
        return self.best()


def feature_selection_space(n_features: int) -> SearchSpace:
    """Binary on/off space with one categorical dimension per feature.

    Decoded configurations map each ``feature_<i>`` to 0 or 1; combine with
    :func:`mask_from_configuration` to obtain the boolean mask.
    """
    if n_features < 1:
        raise SpaceError("n_features must be >= 1")
    return SearchSpace(
        tuple(categorical_dim(f"feature_{i}", (0, 1)) for i in range(n_features))
    )


def mask_from_configuration(config: dict[str, Any]) -> np.ndarray:
    """Boolean mask from a decoded feature-selection configuration."""
    n = len(config)
    return np.array([bool(config[f"feature_{i}"]) for i in range(n)], dtype=bool)
