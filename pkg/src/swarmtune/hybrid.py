"""Two-stage hybrid search: GA over the full mixed space, then PSO
refinement of the continuous dimensions with the discrete ones frozen.

Stage 2's swarm is seeded with stage 1's continuous coordinates, so the
final result is never worse than stage 1's best.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import NoResultError, OptimizationFailedError, SpaceError
from .ga import GaConfig, GeneticAlgorithm
from .pso import ParticleSwarm, PsoConfig
from .space import SearchSpace

Objective = Callable[[dict[str, Any]], float]
# One full generation: [(genotype, configuration), ...] -> values in order.
BatchEvaluator = Callable[[Sequence[tuple[np.ndarray, dict[str, Any]]]], Sequence[float]]


@dataclass(frozen=True)
class HybridConfig:
    """Stage settings plus the evaluation-budget split.

    With ``total_evaluations`` unset, each stage runs its configured number
    of generations/iterations.  When set, the budget is divided by
    ``budget_split`` and converted to whole generations (stage 1) and
    iterations (stage 2), floored, so the total is never exceeded.
    """

    ga: GaConfig = field(default_factory=GaConfig)
    pso: PsoConfig = field(default_factory=PsoConfig)
    budget_split: float = 0.5
    total_evaluations: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.budget_split < 1.0:
            raise SpaceError("budget_split must be in (0, 1)")
        self.stage_rounds()  # fail fast on an unfundable budget

    def stage_rounds(self) -> tuple[int, int]:
        """(GA generations, PSO iterations) honoring the budget."""
        if self.total_evaluations is None:
            return self.ga.generations, self.pso.iterations
        stage1 = int(self.total_evaluations * self.budget_split)
        gens = max(1, stage1 // self.ga.population)
        remaining = self.total_evaluations - gens * self.ga.population
        iters = remaining // self.pso.swarm_size
        if gens * self.ga.population > self.total_evaluations or iters < 1:
            raise SpaceError(
                f"total_evaluations={self.total_evaluations} cannot fund one GA "
                f"generation and one PSO iteration at split {self.budget_split}"
            )
        return gens, iters


@dataclass(frozen=True)
class HybridResult:
    stage1_best: tuple[dict[str, Any], float]
    final_best: tuple[dict[str, Any], float]
    evaluations_used: dict[str, int]
    stage2_skipped: bool = False


class _CountingBatch:
    """Normalizes a batch evaluator: counts calls, maps failures to +inf."""

    def __init__(self, evaluate_batch: BatchEvaluator) -> None:
        self._evaluate = evaluate_batch
        self.calls = 0

    def __call__(self, pairs: Sequence[tuple[np.ndarray, dict[str, Any]]]) -> list[float]:
        self.calls += len(pairs)
        values = list(self._evaluate(pairs))
        if len(values) != len(pairs):
            raise OptimizationFailedError("batch evaluator returned a wrong-length result")
        out = []
        for v in values:
            v = float(v)
            out.append(float("inf") if (np.isnan(v) or v == -np.inf) else v)
        return out


def _sequential_batch(objective: Objective) -> BatchEvaluator:
    def evaluate(pairs: Sequence[tuple[np.ndarray, dict[str, Any]]]) -> list[float]:
        values = []
        for _genotype, config in pairs:
            try:
                values.append(float(objective(config)))
            except Exception:
                values.append(float("inf"))
        return values

    return evaluate


def run_hybrid(
    space: SearchSpace,
    objective: Objective | None = None,
    config: HybridConfig | None = None,
    seed: int = 0,
    evaluate_batch: BatchEvaluator | None = None,
) -> HybridResult:
    """Run GA over the mixed space, then PSO over the continuous projection.

    Args:
        space: Full mixed search space.
        objective: ``configuration -> value`` (minimized); exceptions and
            non-finite returns count as failed evaluations (+inf).
        config: Stage settings; defaults used when omitted.
        seed: Base seed; the two stages derive distinct streams from it.
        evaluate_batch: Optional whole-generation evaluator replacing
            ``objective`` (enables parallel evaluation by the caller).

    Raises:
        OptimizationFailedError: If every evaluation of a stage failed.
    """
    if evaluate_batch is None:
        if objective is None:
            raise SpaceError("provide an objective or an evaluate_batch")
        evaluate_batch = _sequential_batch(objective)
    counted = _CountingBatch(evaluate_batch)
    cfg = config or HybridConfig()
    gens, iters = cfg.stage_rounds()

    ga = GeneticAlgorithm(space, cfg.ga, seed=seed)
    for _ in range(gens):
        batch = ga.ask()
        ga.tell(counted([(g, space.decode(g)) for g in batch]))
    stage1_evals = counted.calls
    try:
        if not np.isfinite(ga.best_value):
            raise OptimizationFailedError("every stage-1 evaluation failed")
    except NoResultError:
        raise OptimizationFailedError("every stage-1 evaluation failed") from None
    stage1_geno = ga.best_genotype
    stage1_best = (space.decode(stage1_geno), ga.best_value)

    cont_idx = space.continuous_indices()
    if not cont_idx:
        return HybridResult(
            stage1_best=stage1_best,
            final_best=stage1_best,
            evaluations_used={"stage1": stage1_evals, "stage2": 0},
            stage2_skipped=True,
        )

    frozen = {
        space.dims[i].name: stage1_best[0][space.dims[i].name]
        for i in space.discrete_indices()
    }
    cont_space = space.subspace(cont_idx)

    def merge(cont_genotype: np.ndarray) -> tuple[np.ndarray, dict[str, Any]]:
        full = stage1_geno.copy()
        full[cont_idx] = cont_genotype
        merged = space.decode(full)
        for name, value in frozen.items():
            assert merged[name] == value, "frozen discrete assignment drifted"
        return full, merged

    swarm = ParticleSwarm(
        cont_space,
        cfg.pso,
        seed=seed + 1,
        seed_positions=[stage1_geno[cont_idx]],
    )
    for _ in range(iters):
        batch = swarm.ask()
        swarm.tell(counted([merge(g) for g in batch]))
    stage2_evals = counted.calls - stage1_evals
    try:
        if not np.isfinite(swarm.best_value):
            raise OptimizationFailedError("every stage-2 evaluation failed")
    except NoResultError:
        raise OptimizationFailedError("every stage-2 evaluation failed") from None

    if swarm.best_value < stage1_best[1]:
        _, merged = merge(swarm.best_genotype)
        final = (merged, swarm.best_value)
    else:
        final = stage1_best

    return HybridResult(
        stage1_best=stage1_best,
        final_best=final,
        evaluations_used={"stage1": stage1_evals, "stage2": stage2_evals},
    )
