import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from swarmtune import make_cv_plan
from swarmtune.errors import InvalidPlanError


def subjects(n, n_pos):
    return [(f"s{i}", 1 if i < n_pos else 0) for i in range(n)]


class TestKfold:
    def test_six_subjects_three_folds(self):
        plan = make_cv_plan(subjects(6, 3), k=3)
        assert plan.k == 3 and len(plan.folds) == 3
        tests = [f.test_subjects for f in plan.folds]
        assert all(len(t) == 2 for t in tests)
        assert set().union(*tests) == {f"s{i}" for i in range(6)}
        for a in range(3):
            for b in range(a + 1, 3):
                assert not tests[a] & tests[b]

    def test_stratified_balances_positive_subjects(self):
        plan = make_cv_plan(subjects(10, 4), k=5, stratified=True, seed=3)
        pos = {f"s{i}" for i in range(4)}
        sizes = [len(f.test_subjects) for f in plan.folds]
        pos_counts = [len(f.test_subjects & pos) for f in plan.folds]
        assert sizes == [2] * 5
        assert set(pos_counts) <= {0, 1}
        assert max(pos_counts) - min(pos_counts) <= 1
        assert sum(pos_counts) == 4

    def test_loso_singleton_test_sets(self):
        plan = make_cv_plan(subjects(7, 3), kind="loso")
        assert plan.k == 7
        assert all(len(f.test_subjects) == 1 for f in plan.folds)
        assert {next(iter(f.test_subjects)) for f in plan.folds} == {f"s{i}" for i in range(7)}

    def test_k_larger_than_subjects_rejected(self):
        with pytest.raises(InvalidPlanError):
            make_cv_plan(subjects(3, 1), k=4)

    def test_duplicate_ids_rejected(self):
        with pytest.raises(InvalidPlanError):
            make_cv_plan([("a", 0), ("a", 1)], k=2)

    def test_deterministic_for_fixed_seed(self):
        a = make_cv_plan(subjects(12, 5), k=4, seed=9)
        b = make_cv_plan(subjects(12, 5), k=4, seed=9)
        assert a == b
        c = make_cv_plan(subjects(12, 5), k=4, seed=10)
        assert a != c

    def test_plan_hash_tracks_structure(self):
        a = make_cv_plan(subjects(8, 4), k=4, seed=1)
        b = make_cv_plan(subjects(8, 4), k=4, seed=1)
        assert a.plan_hash() == b.plan_hash()
        assert a.plan_hash() != make_cv_plan(subjects(8, 4), k=2, seed=1).plan_hash()


class TestLeakageFreedom:
    @given(
        n=hst.integers(min_value=2, max_value=40),
        k=hst.integers(min_value=2, max_value=10),
        n_pos=hst.integers(min_value=0, max_value=40),
        stratified=hst.booleans(),
        seed=hst.integers(min_value=0, max_value=2**31),
    )
    @settings(max_examples=300, deadline=None)
    def test_partition_and_disjointness(self, n, k, n_pos, stratified, seed):
        if k > n:
            return
        subs = subjects(n, min(n_pos, n))
        plan = make_cv_plan(subs, k=k, stratified=stratified, seed=seed)
        universe = {s for s, _ in subs}
        seen = []
        for fold in plan.folds:
            assert not fold.train_subjects & fold.test_subjects
            assert fold.train_subjects | fold.test_subjects == universe
            seen.extend(fold.test_subjects)
        assert sorted(seen) == sorted(universe)  # each subject tested once
