"""Subject-wise cross-validation planning.

Folds are defined over subjects, never over rows: every subject's windows
land in exactly one test fold, which rules out identity leakage between
train and test.  Stratification balances positive-subject counts across
folds to within one.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidPlanError
from .rng import rng_from

PLAN_KINDS = ("kfold", "loso")


@dataclass(frozen=True)
class Fold:
    train_subjects: frozenset
    test_subjects: frozenset


@dataclass(frozen=True)
class CvPlan:
    folds: tuple[Fold, ...]
    k: int
    kind: str

    def plan_hash(self) -> str:
        """Stable digest of the fold structure, for run comparability."""
        canon = [sorted(map(str, f.test_subjects)) for f in self.folds]
        payload = json.dumps({"kind": self.kind, "tests": canon}, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def make_cv_plan(
    subjects: Sequence[tuple[str, int]],
    k: int = 5,
    kind: str = "kfold",
    stratified: bool = True,
    seed: int = 0,
) -> CvPlan:
    """Assign whole subjects to folds.

    Args:
        subjects: ``(subject_id, subject_label)`` pairs, labels binary.
        k: Fold count (ignored for ``loso``, which uses one per subject).
        kind: ``"kfold"`` or ``"loso"``.
        stratified: Balance positive subjects across kfold test sets so the
            per-fold positive counts differ by at most one.
        seed: Shuffle seed; the plan is deterministic given it.

    Raises:
        InvalidPlanError: Duplicate ids, bad ``k``, or unknown kind.
    """
    ids = [s for s, _ in subjects]
    if len(set(ids)) != len(ids):
        raise InvalidPlanError("subject ids must be unique")
    if not ids:
        raise InvalidPlanError("no subjects")
    if kind not in PLAN_KINDS:
        raise InvalidPlanError(f"unknown plan kind {kind!r}")

    universe = set(ids)
    if kind == "loso":
        folds = tuple(
            Fold(train_subjects=frozenset(universe - {s}), test_subjects=frozenset({s}))
            for s in ids
        )
        return CvPlan(folds=folds, k=len(ids), kind="loso")

    if not 2 <= k <= len(ids):
        raise InvalidPlanError(f"k={k} invalid for {len(ids)} subjects")

    rng = rng_from("cvplan", seed)
    assignments: list[list[str]] = [[] for _ in range(k)]
    if stratified:
        positives = [s for s, y in subjects if y == 1]
        negatives = [s for s, y in subjects if y != 1]
        cursor = 0
        for group in (positives, negatives):
            group = list(group)
            rng.shuffle(group)
            for s in group:
                assignments[cursor % k].append(s)
                cursor += 1
    else:
        order = list(ids)
        rng.shuffle(order)
        for i, s in enumerate(order):
            assignments[i % k].append(s)

    if any(not fold for fold in assignments):
        raise InvalidPlanError("a fold received no test subjects")
    folds = tuple(
        Fold(
            train_subjects=frozenset(universe - set(test)),
            test_subjects=frozenset(test),
        )
        for test in assignments
    )
    return CvPlan(folds=folds, k=k, kind="kfold")
