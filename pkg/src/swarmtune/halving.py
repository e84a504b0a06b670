"""Successive halving and Hyperband budget allocation.

Candidates are evaluated at a low epoch budget, ranked within the rung,
and the best fraction is promoted to the next, eta-times-larger budget.
Hyperband wraps this in a bracket loop trading candidate count against
starting budget.  Ranking never mixes values across budgets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from .errors import OptimizationFailedError, ScheduleError
from .rng import derive_seed

Configuration = dict[str, Any]
BudgetedObjective = Callable[[Configuration, int, int], float]
# (tasks as (candidate_id, config, budget, seed)) -> values in order
BatchEvaluator = Callable[[Sequence[tuple[int, Configuration, int, int]]], Sequence[float]]


@dataclass(frozen=True)
class Rung:
    budget: int
    survivors: int


@dataclass(frozen=True)
class HalvingSchedule:
    eta: int
    min_budget: int
    max_budget: int
    rungs: tuple[Rung, ...]


@dataclass(frozen=True)
class RungResult:
    rung: int
    budget: int
    evaluated: tuple[tuple[int, float], ...]  # (candidate id, value)
    promoted: tuple[int, ...]


@dataclass(frozen=True)
class ShResult:
    winner_id: int
    winner: Configuration
    winner_value: float
    rungs: tuple[RungResult, ...]
    cold_epoch_cost: int


@dataclass(frozen=True)
class BracketResult:
    s: int
    n: int
    min_budget: int
    result: ShResult


@dataclass(frozen=True)
class HyperbandResult:
    winner: Configuration
    winner_value: float
    brackets: tuple[BracketResult, ...]


def sh_schedule(
    n: int, eta: int = 3, min_budget: int = 1, max_budget: int = 81
) -> HalvingSchedule:
    """Build the rung ladder for ``n`` candidates.

    Rung ``r`` runs at budget ``min(min_budget * eta**r, max_budget)`` and
    keeps ``max(1, floor(n / eta**(r+1)))`` survivors; rungs stop once the
    budget hits ``max_budget`` or a single survivor remains.
    """
    if n < 1:
        raise ScheduleError("n must be >= 1")
    if eta < 2:
        raise ScheduleError("eta must be >= 2")
    if min_budget < 1:
        raise ScheduleError("min_budget must be >= 1")
    if max_budget < min_budget:
        raise ScheduleError("max_budget must be >= min_budget")
    rungs: list[Rung] = []
    r = 0
    while True:
        budget = min(min_budget * eta**r, max_budget)
        survivors = max(1, n // eta ** (r + 1))
        rungs.append(Rung(budget=budget, survivors=survivors))
        if budget >= max_budget or survivors <= 1:
            break
        r += 1
    return HalvingSchedule(
        eta=eta, min_budget=min_budget, max_budget=max_budget, rungs=tuple(rungs)
    )


def schedule_cold_cost(n: int, schedule: HalvingSchedule) -> int:
    """Candidate-epochs of a full run without resume discounting."""
    cost = 0
    alive = n
    for rung in schedule.rungs:
        cost += alive * rung.budget
        alive = rung.survivors
    return cost


def _sequential_batch(objective: BudgetedObjective) -> BatchEvaluator:
    def evaluate(tasks: Sequence[tuple[int, Configuration, int, int]]) -> list[float]:
        out = []
        for _cid, config, budget, seed in tasks:
            try:
                out.append(float(objective(config, budget, seed)))
            except Exception:
                out.append(float("inf"))
        return out

    return evaluate


def sh_run(
    candidates: Sequence[Configuration],
    objective: BudgetedObjective | None,
    schedule: HalvingSchedule,
    seed: int = 0,
    evaluate_batch: BatchEvaluator | None = None,
) -> ShResult:
    """Run one successive-halving ladder over explicit candidates.

    Each candidate keeps a fixed per-candidate seed across rungs so a
    caching objective can resume training instead of restarting.  Ties at
    a promotion cut go to the lower candidate id.

    Args:
        candidates: Decoded configurations, ids are their list positions.
        objective: ``(config, budget_epochs, seed) -> value``; exceptions
            count as failed evaluations (+inf).
        schedule: Output of :func:`sh_schedule` (its ``n`` should match).
        seed: Base seed for per-candidate seed derivation.
        evaluate_batch: Optional parallel batch evaluator; defaults to
            sequential calls of ``objective``.

    Raises:
        OptimizationFailedError: If all survivors fail at some rung.
    """
    if not candidates:
        raise ScheduleError("candidates must be non-empty")
    if evaluate_batch is None and objective is None:
        raise ScheduleError("provide an objective or an evaluate_batch")
    evaluate = evaluate_batch or _sequential_batch(objective)
    cand_seed = {i: derive_seed(seed, i) for i in range(len(candidates))}

    alive = list(range(len(candidates)))
    rung_results: list[RungResult] = []
    for r, rung in enumerate(schedule.rungs):
        tasks = [(cid, candidates[cid], rung.budget, cand_seed[cid]) for cid in alive]
        values = [float(v) for v in evaluate(tasks)]
        if not any(np.isfinite(v) for v in values):
            raise OptimizationFailedError(f"all candidates failed at rung {r}")
        ranked = sorted(zip(alive, values), key=lambda cv: (cv[1], cv[0]))
        promoted = [cid for cid, _ in ranked[: rung.survivors]]
        rung_results.append(
            RungResult(
                rung=r,
                budget=rung.budget,
                evaluated=tuple(zip(alive, values)),
                promoted=tuple(promoted),
            )
        )
        alive = promoted

    final = rung_results[-1]
    winner_id, winner_value = min(final.evaluated, key=lambda cv: (cv[1], cv[0]))
    return ShResult(
        winner_id=winner_id,
        winner=candidates[winner_id],
        winner_value=winner_value,
        rungs=tuple(rung_results),
        cold_epoch_cost=schedule_cold_cost(len(candidates), schedule),
    )


def hyperband_brackets(eta: int, max_budget: int) -> list[tuple[int, int, int]]:
    """(s, n, min_budget) for each bracket, s descending from s_max."""
    if max_budget < 1:
        raise ScheduleError("max_budget must be >= 1")
    if eta < 2:
        raise ScheduleError("eta must be >= 2")
    s_max = int(math.floor(math.log(max_budget) / math.log(eta)))
    out = []
    for s in range(s_max, -1, -1):
        n = int(math.ceil((s_max + 1) * eta**s / (s + 1)))
        min_budget = max(1, int(round(max_budget * eta ** float(-s))))
        out.append((s, n, min_budget))
    return out


def hyperband_run(
    sampler: Callable[[int], Sequence[Configuration]],
    objective: BudgetedObjective | None,
    eta: int = 3,
    max_budget: int = 81,
    seed: int = 0,
    evaluate_batch: BatchEvaluator | None = None,
) -> HyperbandResult:
    """Standard bracket loop over successive-halving runs.

    Each bracket draws fresh candidates from ``sampler(n)`` and runs a
    ladder starting at a bracket-specific minimum budget; the winner is the
    best value across brackets (earlier bracket wins ties).
    """
    brackets: list[BracketResult] = []
    for b, (s, n, min_budget) in enumerate(hyperband_brackets(eta, max_budget)):
        candidates = list(sampler(n))
        schedule = sh_schedule(n=n, eta=eta, min_budget=min_budget, max_budget=max_budget)
        result = sh_run(
            candidates,
            objective,
            schedule,
            seed=derive_seed(seed, "bracket", b),
            evaluate_batch=evaluate_batch,
        )
        brackets.append(BracketResult(s=s, n=n, min_budget=min_budget, result=result))
    best = min(brackets, key=lambda br: br.result.winner_value)
    return HyperbandResult(
        winner=best.result.winner,
        winner_value=best.result.winner_value,
        brackets=tuple(brackets),
    )
