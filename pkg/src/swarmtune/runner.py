"""Experiment orchestration: tuning runs, trial logging and run comparison.

A run loads or generates data, builds the subject-wise CV plan, drives the
configured optimizer (each candidate scored as the mean scalarized
objective over folds), re-evaluates the winner with fresh derived seeds
and writes everything to the output directory:

* ``summary.json``    deterministic outputs (pure function of config + seed)
* ``trials.jsonl``    append-only per-training records (includes wall time)
* ``cv_plan.json``    the fold assignment
* ``run_meta.json``   volatile info: wall time, worker count, cache stats
* ``cache/``          checkpoint cache, reused by identical re-runs
"""
from __future__ import annotations

import dataclasses
import json
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .benchmarks import benchmark
from .crossval import CvPlan, make_cv_plan
from .data import CsvSchema, Dataset, load_csv, smote, synth_generate
from .errors import (
    ConfigError,
    IncomparableRunsError,
    OptimizationFailedError,
    SwarmTuneError,
)
from .executor import CacheKey, CheckpointCache, parallel_evaluate
from .experiment import ExperimentConfig
from .ga import GeneticAlgorithm, mask_from_configuration
from .halving import hyperband_run, sh_run, sh_schedule
from .hybrid import run_hybrid
from .metrics import MetricsReport
from .objective import ObjectiveSpec, TrainerConfig, train_and_score
from .pso import ParticleSwarm
from .rng import derive_seed, rng_from, stable_digest
from .space import SearchSpace, unit_cube_space
from .stats import aggregate, paired_t, wilcoxon_signed_rank

METRIC_ORDER = ("accuracy", "precision", "recall", "f1", "auc")

_TRAINER_ONLY_KEYS = {"smote", "smote_k", "smote_ratio"}


def _jsonsafe(obj: Any) -> Any:
    """Recursively replace non-finite floats with None for strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, (np.floating, np.integer)):
        return _jsonsafe(obj.item())
    if isinstance(obj, np.ndarray):
        return [_jsonsafe(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {k: _jsonsafe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonsafe(v) for v in obj]
    return obj


@dataclass
class TrialRecord:
    """One objective evaluation (one training, or one benchmark call)."""

    trial_id: int
    phase: str  # "search" or "repeat"
    genotype: list[float] | None
    configuration: dict[str, Any]
    fold: int | None
    seed: int
    budget_epochs: int | None
    duration_s: float
    objective: float
    metrics: dict | None
    cache_hit: bool
    error: str | None = None

    VOLATILE_FIELDS = ("duration_s",)

    def to_json_dict(self) -> dict:
        return _jsonsafe(dataclasses.asdict(self))


class TrialLog:
    """Append-only JSONL writer; every record is flushed immediately so an
    aborted run still leaves a valid, replayable log."""

    def __init__(self, path: Path) -> None:
        self.path = path
        self._fh = open(path, "w", encoding="utf-8")
        self.count = 0

    def append(self, record: TrialRecord) -> None:
        json.dump(record.to_json_dict(), self._fh, sort_keys=True)
        self._fh.write("\n")
        self._fh.flush()
        self.count += 1

    def close(self) -> None:
        self._fh.close()


def read_trials(path: str | Path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def _load_dataset(config: ExperimentConfig) -> Dataset:
    spec = config.dataset
    if "csv" in spec:
        section = dict(spec["csv"])
        path = section.pop("path")
        schema = CsvSchema(**section) if section else CsvSchema()
        return load_csv(path, schema)
    return synth_generate(**spec["synthetic"])


class _Session:
    """State shared by one tuning run."""

    def __init__(self, config: ExperimentConfig) -> None:
        self.config = config
        if not config.out_dir:
            raise ConfigError("run needs an out_dir")
        self.out = Path(config.out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.workers = config.workers
        self.master_seed = config.master_seed
        self.log = TrialLog(self.out / "trials.jsonl")
        self._next_trial = 0
        self.trace: list[float] = []

        self.is_benchmark = "benchmark" in config.dataset
        if self.is_benchmark:
            bench = dict(config.dataset["benchmark"])
            self.bench_kind = bench.get("kind", "sphere")
            dims = int(bench.get("dims", 2))
            if isinstance(config.space, str) and config.space == "default":
                self.space = unit_cube_space(dims)
            else:
                self.space = config.search_space()
            self.plan = None
            self.data = None
            self.cache = None
            self.data_digest = stable_digest({"benchmark": bench})
            self.trainer_defaults: dict[str, Any] = {}
            self.smote_settings = None
            self.objective_spec = ObjectiveSpec()
            self.folds: list[tuple[Dataset, Dataset]] = []
            self.search_epochs = None
            return

        self.data = _load_dataset(config)
        cv = config.cv_settings()
        subject_labels = self.data.subject_labels()
        subjects = [(s, subject_labels[s]) for s in self.data.subjects()]
        self.plan = make_cv_plan(
            subjects, k=cv.k, kind=cv.kind, stratified=cv.stratified, seed=cv.seed
        )
        self.space = config.search_space(n_features=self.data.n_features)

        trainer = dict(config.trainer)
        self.smote_settings = None
        if trainer.pop("smote", False):
            self.smote_settings = {
                "k": int(trainer.pop("smote_k", 5)),
                "target_ratio": float(trainer.pop("smote_ratio", 1.0)),
            }
        else:
            trainer.pop("smote_k", None)
            trainer.pop("smote_ratio", None)
        allowed = {f.name for f in dataclasses.fields(TrainerConfig)} - {"seed"}
        unknown = set(trainer) - allowed
        if unknown:
            raise ConfigError(f"unknown trainer keys: {sorted(unknown)}")
        self.trainer_defaults = trainer
        self.search_epochs = int(trainer.get("epochs", TrainerConfig().epochs))

        try:
            self.objective_spec = ObjectiveSpec(**dict(config.objective))
        except TypeError as exc:
            raise ConfigError(f"bad objective section: {exc}") from None

        self.data_digest = stable_digest(
            {"dataset": config.dataset, "cv": config.cv, "plan": self.plan.plan_hash()}
        )
        self.cache = CheckpointCache(self.out / "cache")

        self.folds = []
        for fold_id, fold in enumerate(self.plan.folds):
            train = self.data.split_by_subjects(fold.train_subjects)
            val = self.data.split_by_subjects(fold.test_subjects)
            if self.smote_settings:
                train = smote(
                    train,
                    k=self.smote_settings["k"],
                    target_ratio=self.smote_settings["target_ratio"],
                    seed=derive_seed(self.master_seed, "smote", fold_id),
                )
            self.folds.append((train, val))

    # -- task plumbing -----------------------------------------------------

    def take_trial_ids(self, n: int) -> list[int]:
        ids = list(range(self._next_trial, self._next_trial + n))
        self._next_trial += n
        return ids

    def _evaluate_one(self, task: dict) -> tuple[float, dict]:
        t0 = time.perf_counter()
        if self.is_benchmark:
            x = np.array([task["configuration"][d.name] for d in self.space.dims])
            value = benchmark(self.bench_kind, x)
            return value, {
                "metrics": None,
                "cache_hit": False,
                "duration": time.perf_counter() - t0,
            }

        params = dict(self.trainer_defaults)
        known = {f.name for f in dataclasses.fields(TrainerConfig)}
        params.update({k: v for k, v in task["configuration"].items() if k in known})
        params["epochs"] = task["budget_epochs"]
        params["seed"] = task["seed"]
        cfg = TrainerConfig(**params)
        mask = task.get("mask")

        config_hash = stable_digest(
            {
                "trainer": cfg.identity_digest(),
                "mask": None if mask is None else [int(b) for b in mask],
                "data": self.data_digest,
            }
        )
        key = CacheKey(config_hash, task["fold"], cfg.seed, cfg.epochs)
        cached = self.cache.get(key)
        if cached is not None:
            return cached["value"], {
                "metrics": cached["report"],
                "cache_hit": True,
                "duration": time.perf_counter() - t0,
            }

        resume = self.cache.best_resume(config_hash, task["fold"], cfg.seed, cfg.epochs)
        train, val = self.folds[task["fold"]]
        value, report, checkpoint = train_and_score(
            cfg, train, val, mask=mask, spec=self.objective_spec, resume=resume
        )
        self.cache.put(key, {"value": value, "report": report.to_dict()}, checkpoint)
        return value, {
            "metrics": report.to_dict(),
            "cache_hit": False,
            "duration": time.perf_counter() - t0,
        }

    def evaluate_candidates(
        self,
        phase: str,
        items: Sequence[dict],
    ) -> tuple[list[float], list[TrialRecord]]:
        """Evaluate candidates across folds and log every trial.

        Returns the per-candidate mean scalar objective (input order) plus
        the trial records written for this batch.
        """
        n_folds = max(1, len(self.folds))
        tasks: list[dict] = []
        for item in items:
            folds = [None] if self.is_benchmark else range(n_folds)
            for fold in folds:
                tasks.append(
                    {
                        "phase": phase,
                        "genotype": item.get("genotype"),
                        "configuration": item["configuration"],
                        "mask": item.get("mask"),
                        "fold": fold,
                        "budget_epochs": item.get("budget_epochs"),
                        "seed": item.get("seed"),
                    }
                )
        ids = self.take_trial_ids(len(tasks))
        for tid, task in zip(ids, tasks):
            task["trial_id"] = tid
            if task["seed"] is None:
                task["seed"] = derive_seed(self.master_seed, tid)
        outcomes = parallel_evaluate(tasks, self._evaluate_one, workers=self.workers)

        records: list[TrialRecord] = []
        for task, outcome in zip(tasks, outcomes):
            payload = outcome.payload or {"metrics": None, "cache_hit": False, "duration": 0.0}
            geno = task["genotype"]
            record = TrialRecord(
                trial_id=task["trial_id"],
                phase=task["phase"],
                genotype=None if geno is None else [float(v) for v in geno],
                configuration=task["configuration"],
                fold=task["fold"],
                seed=task["seed"],
                budget_epochs=task["budget_epochs"],
                duration_s=payload["duration"],
                objective=outcome.value,
                metrics=payload["metrics"],
                cache_hit=payload["cache_hit"],
                error=outcome.error,
            )
            self.log.append(record)
            records.append(record)

        per_candidate = []
        fold_count = 1 if self.is_benchmark else n_folds
        for i in range(len(items)):
            chunk = [r.objective for r in records[i * fold_count : (i + 1) * fold_count]]
            per_candidate.append(float(np.mean(chunk)))
        return per_candidate, records

    # -- optimizer drivers ---------------------------------------------------

    def _driver_population(self) -> tuple[dict, float, list[float] | None, np.ndarray | None]:
        cfg = self.config
        if cfg.optimizer == "pso":
            opt = ParticleSwarm(self.space, cfg.pso_config(), seed=self.master_seed)
            rounds = opt.config.iterations
        else:
            opt = GeneticAlgorithm(self.space, cfg.ga_config(), seed=self.master_seed)
            rounds = opt.config.generations
        for _ in range(rounds):
            batch = opt.ask()
            items = []
            for g in batch:
                config = self.space.decode(g)
                items.append(
                    {
                        "genotype": g,
                        "configuration": config,
                        "mask": self._mask_for(config),
                        "budget_epochs": self.search_epochs,
                    }
                )
            values, _ = self.evaluate_candidates("search", items)
            opt.tell(values)
            self.trace.append(opt.best_value)
        config, value = opt.best()
        return config, value, list(opt.best_genotype), opt.best_genotype

    def _mask_for(self, configuration: dict) -> np.ndarray | None:
        if self.config.optimizer != "feature_select":
            return None
        return mask_from_configuration(configuration)

    def _driver_hybrid(self) -> tuple[dict, float, None, None]:
        def evaluate_batch(pairs):
            items = [
                {
                    "genotype": geno,
                    "configuration": config,
                    "budget_epochs": self.search_epochs,
                }
                for geno, config in pairs
            ]
            values, _ = self.evaluate_candidates("search", items)
            best = min(values)
            self.trace.append(min(best, self.trace[-1]) if self.trace else best)
            return values

        result = run_hybrid(
            self.space,
            config=self.config.hybrid_config(),
            seed=self.master_seed,
            evaluate_batch=evaluate_batch,
        )
        config, value = result.final_best
        return config, value, None, None

    def _driver_sh(self) -> tuple[dict, float, None, None]:
        section = dict(self.config.sh)
        n = int(section.get("n_candidates", 27))
        eta = int(section.get("eta", 3))
        min_budget = int(section.get("min_budget", 1))
        max_budget = int(section.get("max_budget", self.search_epochs))
        rng = rng_from("sh-sampler", self.master_seed)
        genotypes = [self.space.sample(rng) for _ in range(n)]
        candidates = [self.space.decode(g) for g in genotypes]
        geno_by_id = {i: genotypes[i] for i in range(n)}

        def evaluate_batch(tasks):
            items = [
                {
                    "genotype": geno_by_id[cid],
                    "configuration": config,
                    "budget_epochs": budget,
                    "seed": seed,
                }
                for cid, config, budget, seed in tasks
            ]
            values, _ = self.evaluate_candidates("search", items)
            return values

        schedule = sh_schedule(n=n, eta=eta, min_budget=min_budget, max_budget=max_budget)
        result = sh_run(
            candidates,
            objective=None,
            schedule=schedule,
            seed=self.master_seed,
            evaluate_batch=evaluate_batch,
        )
        self.trace.extend(
            min(v for _, v in rung.evaluated) for rung in result.rungs
        )
        self._winner_epochs = schedule.rungs[-1].budget
        return result.winner, result.winner_value, None, None

    def _driver_hyperband(self) -> tuple[dict, float, None, None]:
        section = dict(self.config.hyperband)
        eta = int(section.get("eta", 3))
        max_budget = int(section.get("max_budget", self.search_epochs))
        sampler_rng = rng_from("hb-sampler", self.master_seed)
        bracket_genotypes: list[np.ndarray] = []

        def sampler(n: int):
            # brackets run sequentially; candidate ids index the latest draw
            bracket_genotypes.clear()
            out = []
            for _ in range(n):
                g = self.space.sample(sampler_rng)
                bracket_genotypes.append(g)
                out.append(self.space.decode(g))
            return out

        def evaluate_batch(tasks):
            items = [
                {
                    "genotype": bracket_genotypes[cid],
                    "configuration": config,
                    "budget_epochs": budget,
                    "seed": seed,
                }
                for cid, config, budget, seed in tasks
            ]
            values, _ = self.evaluate_candidates("search", items)
            return values

        result = hyperband_run(
            sampler,
            objective=None,
            eta=eta,
            max_budget=max_budget,
            seed=self.master_seed,
            evaluate_batch=evaluate_batch,
        )
        self.trace.extend(br.result.winner_value for br in result.brackets)
        self._winner_epochs = max_budget
        return result.winner, result.winner_value, None, None

    # -- run phases ----------------------------------------------------------

    def search(self) -> tuple[dict, float, list[float] | None]:
        self._winner_epochs = self.search_epochs
        if self.config.optimizer in ("pso", "ga", "feature_select"):
            config, value, genotype, _ = self._driver_population()
        elif self.config.optimizer == "hybrid":
            config, value, genotype, _ = self._driver_hybrid()
        elif self.config.optimizer == "sh":
            config, value, genotype, _ = self._driver_sh()
        elif self.config.optimizer == "hyperband":
            config, value, genotype, _ = self._driver_hyperband()
        else:  # pragma: no cover - guarded by ExperimentConfig
            raise ConfigError(f"unhandled optimizer {self.config.optimizer!r}")
        if not math.isfinite(value):
            raise OptimizationFailedError("search ended without a finite best value")
        return config, value, genotype

    def repeat_winner(self, configuration: dict) -> list[dict]:
        """Re-evaluate the winner ``repeats`` times with derived seeds."""
        if self.is_benchmark:
            return []
        records = []
        for r in range(self.config.repeats):
            items = [
                {
                    "configuration": configuration,
                    "mask": self._mask_for(configuration),
                    "budget_epochs": self._winner_epochs,
                }
            ]
            _, trial_records = self.evaluate_candidates("repeat", items)
            for rec in trial_records:
                records.append(
                    {"repeat": r, "fold": rec.fold, "metrics": rec.metrics}
                )
        return records


def run_tune(config: ExperimentConfig) -> dict:
    """Execute one experiment end to end; returns the summary dict.

    Outputs land in ``config.out_dir``; ``summary.json`` is byte-identical
    for identical (semantic config, master seed) regardless of worker count
    or cache warmth.
    """
    started = time.time()
    session = _Session(config)
    try:
        winner_config, winner_value, winner_genotype = session.search()
        repeat_records = session.repeat_winner(winner_config)
    finally:
        session.log.close()

    final_report = None
    if repeat_records:
        reports = [
            MetricsReport.from_dict(r["metrics"])
            for r in repeat_records
            if r["metrics"] is not None
        ]
        if reports:
            final_report = {
                name: dataclasses.asdict(agg) for name, agg in aggregate(reports).items()
            }

    summary = {
        "optimizer": config.optimizer,
        "winner": {
            "configuration": winner_config,
            "objective": winner_value,
            "genotype": winner_genotype,
        },
        "trace": session.trace,
        "final_report": final_report,
        "repeat_records": repeat_records,
        "cv_plan_hash": None if session.plan is None else session.plan.plan_hash(),
        "counts": {
            "trials": session.log.count,
            "repeats": config.repeats if not session.is_benchmark else 0,
        },
        "config": config.semantic_dict(),
    }
    summary = _jsonsafe(summary)

    with open(session.out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
        fh.write("\n")
    if session.plan is not None:
        plan_dump = {
            "kind": session.plan.kind,
            "k": session.plan.k,
            "folds": [
                {
                    "train": sorted(map(str, f.train_subjects)),
                    "test": sorted(map(str, f.test_subjects)),
                }
                for f in session.plan.folds
            ],
        }
        with open(session.out / "cv_plan.json", "w", encoding="utf-8") as fh:
            json.dump(plan_dump, fh, sort_keys=True, indent=2)
            fh.write("\n")
    meta = {
        "wall_time_s": time.time() - started,
        "workers": config.workers,
        "out_dir": str(session.out),
    }
    with open(session.out / "run_meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return summary


def _load_summary(run_dir: str | Path) -> dict:
    path = Path(run_dir) / "summary.json"
    if not path.exists():
        raise IncomparableRunsError(f"{run_dir} has no summary.json")
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def report_compare(run_a: str | Path, run_b: str | Path) -> dict:
    """Compare two finished runs on their paired fold-by-seed F1 values.

    Emits mean and SD per metric per run (column order: Accuracy,
    Precision, Recall, F1, AUC) plus Wilcoxon signed-rank and paired-t
    p-values on the paired F1 lists.

    Raises:
        IncomparableRunsError: Different CV plans or fewer than 2 pairs.
    """
    a, b = _load_summary(run_a), _load_summary(run_b)
    if not a.get("cv_plan_hash") or a.get("cv_plan_hash") != b.get("cv_plan_hash"):
        raise IncomparableRunsError("runs used different CV plans")

    def pairs_of(summary: dict) -> dict[tuple, float | None]:
        out = {}
        for rec in summary.get("repeat_records", []):
            metrics = rec.get("metrics") or {}
            out[(rec["repeat"], rec["fold"])] = metrics.get("f1")
        return out

    pa, pb = pairs_of(a), pairs_of(b)
    shared = sorted(set(pa) & set(pb))
    paired = [
        (pa[key], pb[key])
        for key in shared
        if pa[key] is not None and pb[key] is not None
    ]
    dropped = len(shared) - len(paired)
    if len(paired) < 2:
        raise IncomparableRunsError("need at least 2 paired fold-by-seed results")
    f1_a = [p[0] for p in paired]
    f1_b = [p[1] for p in paired]

    wilcoxon = wilcoxon_signed_rank(f1_a, f1_b)
    tests = {
        "wilcoxon": {
            "statistic": wilcoxon.statistic,
            "p_value": wilcoxon.p_value,
            "degenerate": wilcoxon.degenerate,
            "n_pairs": wilcoxon.n_pairs,
            "dropped_zero_pairs": wilcoxon.dropped_zero_pairs,
        }
    }
    try:
        t_res = paired_t(f1_a, f1_b)
        tests["paired_t"] = {
            "statistic": t_res.statistic,
            "p_value": t_res.p_value,
            "degenerate": False,
        }
    except SwarmTuneError:
        tests["paired_t"] = {"statistic": None, "p_value": None, "degenerate": True}

    runs = []
    for label, summary in (("run_a", a), ("run_b", b)):
        runs.append(
            {
                "label": label,
                "dir": str(run_a if label == "run_a" else run_b),
                "optimizer": summary.get("optimizer"),
                "report": summary.get("final_report"),
            }
        )
    return _jsonsafe(
        {
            "metric_order": list(METRIC_ORDER),
            "runs": runs,
            "n_pairs": len(paired),
            "dropped_pairs": dropped,
            "tests": tests,
        }
    )


def render_compare_table(comparison: dict) -> str:
    """Human-readable table for a :func:`report_compare` result."""
    header = ["Run"] + [m.capitalize() if m != "auc" else "AUC" for m in comparison["metric_order"]]
    lines = ["  ".join(f"{h:>18}" for h in header)]
    for run in comparison["runs"]:
        cells = [f"{run['optimizer']} ({run['label']})"]
        report = run.get("report") or {}
        for metric in comparison["metric_order"]:
            agg = report.get(metric) or {}
            mean, sd = agg.get("mean"), agg.get("sd")
            if mean is None:
                cells.append("-")
            elif sd is None:
                cells.append(f"{mean:.3f}")
            else:
                cells.append(f"{mean:.3f}±{sd:.3f}")
        lines.append("  ".join(f"{c:>18}" for c in cells))
    w = comparison["tests"]["wilcoxon"]
    t = comparison["tests"]["paired_t"]
    lines.append(
        f"Paired F1 (n={comparison['n_pairs']}): "
        f"Wilcoxon p={'degenerate' if w['degenerate'] else format(w['p_value'], '.4f')}, "
        f"paired-t p={'degenerate' if t['degenerate'] else format(t['p_value'], '.4f')}"
    )
    return "\n".join(lines)
