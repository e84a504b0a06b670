"""Global-best particle swarm optimization over normalized genotypes.

Synchronous generational PSO with an ask/tell interface: ``ask`` returns a
full generation of positions, the caller evaluates them (possibly in
parallel) and reports values back through ``tell``.  The engine minimizes;
callers maximizing a score should negate it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import NoResultError, ProtocolError, SpaceError
from .rng import rng_from
from .space import SearchSpace, clip_genotype


@dataclass(frozen=True)
class PsoConfig:
    """Swarm settings. Defaults follow the canonical 20-particle setup
    with c1 = c2 = 1.5 and inertia 0.7; ``v_max`` is the per-dimension
    speed cap as a fraction of the normalized range."""

    swarm_size: int = 20
    iterations: int = 30
    c1: float = 1.5
    c2: float = 1.5
    w: float = 0.7
    v_max: float = 0.5

    def __post_init__(self) -> None:
        if self.swarm_size < 2:
            raise SpaceError("swarm_size must be >= 2")
        if self.iterations < 1:
            raise SpaceError("iterations must be >= 1")
        for label in ("c1", "c2", "w", "v_max"):
            if getattr(self, label) <= 0:
                raise SpaceError(f"{label} must be > 0")


def _check_values(values: Sequence[float], expected: int) -> np.ndarray:
    vals = np.asarray(list(values), dtype=float)
    if vals.shape != (expected,):
        raise ProtocolError(
            f"told {vals.shape[0] if vals.ndim == 1 else 'malformed'} values, "
            f"expected {expected}"
        )
    # +inf flags a failed evaluation; NaN and -inf are rejected outright.
    if np.any(np.isnan(vals)) or np.any(np.isneginf(vals)):
        raise ProtocolError("values must be finite or +inf (failed flag)")
    return vals


class ParticleSwarm:
    """Ask/tell PSO over a :class:`~swarmtune.space.SearchSpace`.

    Args:
        space: Dimensions searched; positions live in ``[0, 1]^d``.
        config: Swarm settings (defaults above).
        seed: Seed for initialization and the stochastic update terms.
        seed_positions: Optional genotypes injected verbatim as the first
            particles of the initial swarm (warm start).
    """

    def __init__(
        self,
        space: SearchSpace,
        config: PsoConfig | None = None,
        seed: int = 0,
        seed_positions: Sequence[np.ndarray] | None = None,
    ) -> None:
        self.space = space
        self.config = config or PsoConfig()
        self._rng = rng_from("pso", seed)
        n, d = self.config.swarm_size, space.n_dims

        self._x = np.vstack([space.sample(self._rng) for _ in range(n)]) if d else np.zeros((n, 0))
        if seed_positions:
            if len(seed_positions) > n:
                raise ProtocolError("more seed positions than particles")
            for i, pos in enumerate(seed_positions):
                self._x[i] = clip_genotype(pos)
        self._v = np.zeros((n, d))
        self._pbest_x = self._x.copy()
        self._pbest_val = np.full(n, np.inf)
        self._gbest_x: np.ndarray | None = None
        self._gbest_val = np.inf
        self.iteration = 0
        self._awaiting_tell = False

    def ask(self) -> list[np.ndarray]:
        """Positions of the next generation, as copies.

        Iteration 0 is the sampled initial swarm; afterwards each particle
        moves by the inertia + cognitive + social rule with the velocity
        clamped to ``±v_max`` and the position clipped into the unit cube.
        """
        if self._awaiting_tell:
            raise ProtocolError("ask() called again before tell()")
        if self.iteration > 0:
            cfg = self.config
            n, d = self._x.shape
            r1 = self._rng.random((n, d))
            r2 = self._rng.random((n, d))
            self._v = (
                cfg.w * self._v
                + cfg.c1 * r1 * (self._pbest_x - self._x)
                + cfg.c2 * r2 * (self._gbest_x - self._x)
            )
            np.clip(self._v, -cfg.v_max, cfg.v_max, out=self._v)
            self._x = np.clip(self._x + self._v, 0.0, 1.0)
        self._awaiting_tell = True
        return [row.copy() for row in self._x]

    def tell(self, values: Sequence[float]) -> None:
        """Report objective values for the last asked generation, in order."""
        if not self._awaiting_tell:
            raise ProtocolError("tell() without a pending ask()")
        vals = _check_values(values, self._x.shape[0])
        for i, v in enumerate(vals):
            if v < self._pbest_val[i]:  # strict improvement; ties keep incumbent
                self._pbest_val[i] = v
                self._pbest_x[i] = self._x[i].copy()
            if v < self._gbest_val:
                self._gbest_val = float(v)
                self._gbest_x = self._x[i].copy()
        self._awaiting_tell = False
        self.iteration += 1

    @property
    def best_value(self) -> float:
        if self._gbest_x is None:
            raise NoResultError("no generation evaluated yet")
        return self._gbest_val

    @property
    def best_genotype(self) -> np.ndarray:
        if self._gbest_x is None:
            raise NoResultError("no generation evaluated yet")
        return self._gbest_x.copy()

    def best(self) -> tuple[dict[str, Any], float]:
        """Decoded global best and its value."""
        return self.space.decode(self.best_genotype), self.best_value

    @property
    def velocities(self) -> np.ndarray:
        return self._v.copy()

    def run(self, objective, iterations: int | None = None) -> tuple[dict[str, Any], float]:
        """Drive ask/tell sequentially against ``objective(genotype) -> value``."""
        for _ in range(iterations or self.config.iterations):
            batch = self.ask()
            self.tell([float(objective(g)) for g in batch])
        return self.best()
