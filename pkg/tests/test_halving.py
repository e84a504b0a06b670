import numpy as np
import pytest

from swarmtune import hyperband_run, sh_run, sh_schedule
from swarmtune.errors import OptimizationFailedError, ScheduleError
from swarmtune.halving import hyperband_brackets, schedule_cold_cost


class TestSchedule:
    def test_classic_27_candidate_ladder(self):
        schedule = sh_schedule(n=27, eta=3, min_budget=1, max_budget=9)
        assert [(r.budget, r.survivors) for r in schedule.rungs] == [(1, 9), (3, 3), (9, 1)]

    def test_single_candidate_degenerates(self):
        schedule = sh_schedule(n=1, eta=3, min_budget=2, max_budget=18)
        assert [(r.budget, r.survivors) for r in schedule.rungs] == [(2, 1)]

    def test_ten_candidates_eta_two(self):
        schedule = sh_schedule(n=10, eta=2, min_budget=1, max_budget=4)
        assert [(r.budget, r.survivors) for r in schedule.rungs] == [(1, 5), (2, 2), (4, 1)]

    def test_invalid_bounds_rejected(self):
        with pytest.raises(ScheduleError):
            sh_schedule(n=0, eta=3, min_budget=1, max_budget=9)
        with pytest.raises(ScheduleError):
            sh_schedule(n=5, eta=1, min_budget=1, max_budget=9)
        with pytest.raises(ScheduleError):
            sh_schedule(n=5, eta=3, min_budget=9, max_budget=3)

    def test_cold_cost_of_classic_ladder(self):
        # 27*1 + 9*3 + 3*9 = 81 candidate-epochs with resume discounting off
        schedule = sh_schedule(n=27, eta=3, min_budget=1, max_budget=9)
        assert schedule_cold_cost(27, schedule) == 81


class TestShRun:
    def test_dominant_candidate_wins(self):
        candidates = [{"q": 0.1}, {"q": 0.9}]
        schedule = sh_schedule(n=2, eta=2, min_budget=1, max_budget=4)

        def objective(config, budget, seed):
            return config["q"] / budget  # A dominates at every budget

        result = sh_run(candidates, objective, schedule, seed=0)
        assert result.winner_id == 0
        assert result.winner == {"q": 0.1}

    def test_equal_values_promote_lower_id(self):
        candidates = [{"q": i} for i in range(4)]
        schedule = sh_schedule(n=4, eta=2, min_budget=1, max_budget=2)

        def objective(config, budget, seed):
            return 1.0  # everything ties

        result = sh_run(candidates, objective, schedule, seed=0)
        assert result.rungs[0].promoted == (0, 1)
        assert result.winner_id == 0

    def test_rung_values_produced_at_exact_budget(self):
        seen = []

        def objective(config, budget, seed):
            seen.append((config["q"], budget))
            return config["q"] * budget

        candidates = [{"q": i} for i in range(9)]
        schedule = sh_schedule(n=9, eta=3, min_budget=1, max_budget=9)
        sh_run(candidates, objective, schedule, seed=0)
        budgets = [r.budget for r in schedule.rungs]
        for _, budget in seen:
            assert budget in budgets
        # no candidate drops to a lower budget after a higher one
        per_candidate = {}
        for q, budget in seen:
            per_candidate.setdefault(q, []).append(budget)
        for history in per_candidate.values():
            assert history == sorted(history)

    def test_per_candidate_seed_stable_across_rungs(self):
        seeds_seen = {}

        def objective(config, budget, seed):
            seeds_seen.setdefault(config["q"], set()).add(seed)
            return config["q"]

        candidates = [{"q": i} for i in range(9)]
        schedule = sh_schedule(n=9, eta=3, min_budget=1, max_budget=9)
        sh_run(candidates, objective, schedule, seed=5)
        for q, seeds in seeds_seen.items():
            assert len(seeds) == 1

    def test_all_failed_rung_raises(self):
        def objective(config, budget, seed):
            raise RuntimeError("nope")

        candidates = [{"q": 1}, {"q": 2}]
        schedule = sh_schedule(n=2, eta=2, min_budget=1, max_budget=2)
        with pytest.raises(OptimizationFailedError):
            sh_run(candidates, objective, schedule, seed=0)

    def test_empty_candidates_rejected(self):
        schedule = sh_schedule(n=2, eta=2, min_budget=1, max_budget=2)
        with pytest.raises(ScheduleError):
            sh_run([], lambda c, b, s: 0.0, schedule)


class TestHyperband:
    def test_bracket_formula_max9_eta3(self):
        assert hyperband_brackets(eta=3, max_budget=9) == [(2, 9, 1), (1, 5, 3), (0, 3, 9)]

    def test_max_budget_one_gives_single_bracket(self):
        assert hyperband_brackets(eta=3, max_budget=1) == [(0, 1, 1)]

        calls = []

        def sampler(n):
            calls.append(n)
            return [{"q": i} for i in range(n)]

        result = hyperband_run(sampler, lambda c, b, s: c["q"], eta=3, max_budget=1)
        assert calls == [1]
        assert len(result.brackets) == 1
        assert len(result.brackets[0].result.rungs) == 1

    def test_winner_is_global_argmin_over_brackets(self):
        rng = np.random.default_rng(3)

        def sampler(n):
            return [{"q": float(rng.uniform())} for _ in range(n)]

        result = hyperband_run(sampler, lambda c, b, s: c["q"], eta=3, max_budget=9)
        bracket_winners = [b.result.winner_value for b in result.brackets]
        assert result.winner_value == min(bracket_winners)
        assert all(result.winner_value <= v for v in bracket_winners)
