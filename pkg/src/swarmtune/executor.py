"""Parallel candidate evaluation and the on-disk checkpoint cache.

Evaluations are dispatched to a thread pool and re-collected in input
order, so optimizer trajectories cannot depend on scheduling.  Each task
carries its own pre-derived seed; workers share nothing mutable.  The
cache maps (configuration hash, fold, seed, epochs) to the full training
outcome, which is legitimate because training is a pure function of that
key plus the run's data.
"""
from __future__ import annotations

import os
import pickle
import re
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence


@dataclass
class EvalOutcome:
    """Result slot for one candidate; failures carry +inf and the error."""

    value: float
    error: str | None = None
    payload: Any = None


def parallel_evaluate(
    batch: Sequence[Any],
    evaluator: Callable[[Any], Any],
    workers: int = 1,
) -> list[EvalOutcome]:
    """Evaluate a batch, preserving input order.

    ``evaluator`` returns either a bare value or ``(value, payload)``.  An
    exception in one candidate never aborts the batch; that slot records
    +inf and the error text.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")

    def run_one(item: Any) -> EvalOutcome:
        try:
            result = evaluator(item)
        except Exception as exc:  # noqa: BLE001 - fault containment by contract
            return EvalOutcome(value=float("inf"), error=f"{type(exc).__name__}: {exc}")
        if isinstance(result, tuple):
            value, payload = result
            return EvalOutcome(value=float(value), payload=payload)
        return EvalOutcome(value=float(result))

    if workers == 1 or len(batch) <= 1:
        return [run_one(item) for item in batch]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_one, batch))


@dataclass(frozen=True)
class CacheKey:
    """Identity of one training outcome; equal keys imply bit-identical
    results because training is deterministic in (config, data, seed)."""

    config_hash: str
    fold: int
    seed: int
    epochs: int

    def filename(self) -> str:
        return f"{self.config_hash}-f{self.fold}-s{self.seed}-e{self.epochs}.pkl"


_EPOCHS_RE = re.compile(r"^(\d+)\.pkl$")


class CheckpointCache:
    """Pickle-file cache of training outcomes, safe for concurrent workers.

    Each key owns two files in a documented stable format: the outcome
    (``<config_hash>-f<fold>-s<seed>-e<epochs>.pkl``, small: value plus
    metrics) and the resumable checkpoint (same name with ``.ckpt.pkl``),
    loaded only when a later run wants to continue training.  Writes go
    through a temp file plus rename, so readers never observe partial
    entries.
    """

    def __init__(self, root: str | os.PathLike) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _ckpt_path(self, key: CacheKey) -> Path:
        return self.root / (key.filename()[: -len(".pkl")] + ".ckpt.pkl")

    def _write(self, path: Path, payload: Any) -> None:
        tmp = path.with_suffix(f".tmp{threading.get_ident()}")
        with tmp.open("wb") as fh:
            pickle.dump(payload, fh)
        with self._lock:
            os.replace(tmp, path)

    def get(self, key: CacheKey) -> Any | None:
        """Stored outcome dict ({'value', 'report'}) or None."""
        path = self.root / key.filename()
        if not path.exists():
            return None
        with path.open("rb") as fh:
            return pickle.load(fh)

    def get_checkpoint(self, key: CacheKey) -> Any | None:
        path = self._ckpt_path(key)
        if not path.exists():
            return None
        with path.open("rb") as fh:
            return pickle.load(fh)

    def put(self, key: CacheKey, outcome: Any, checkpoint: Any = None) -> None:
        if checkpoint is not None:
            self._write(self._ckpt_path(key), checkpoint)
        self._write(self.root / key.filename(), outcome)

    def resume_candidates(self, config_hash: str, fold: int, seed: int) -> list[int]:
        """Stored epoch budgets for this identity, ascending."""
        epochs = []
        prefix = f"{config_hash}-f{fold}-s{seed}-e"
        for name in os.listdir(self.root):
            if not name.startswith(prefix):
                continue
            m = _EPOCHS_RE.match(name[len(prefix):])
            if m:
                epochs.append(int(m.group(1)))
        return sorted(epochs)

    def best_resume(self, config_hash: str, fold: int, seed: int, target_epochs: int) -> Any | None:
        """Checkpoint of the largest budget strictly below the target."""
        stored = [e for e in self.resume_candidates(config_hash, fold, seed) if e < target_epochs]
        for epochs in reversed(stored):
            ckpt = self.get_checkpoint(CacheKey(config_hash, fold, seed, epochs))
            if ckpt is not None:
                return ckpt
        return None
