"""swarmtune: metaheuristic hyperparameter search with a subject-wise
evaluation protocol.

The package bundles particle swarm optimization, a genetic algorithm, a
two-stage GA+PSO hybrid and successive-halving/Hyperband budgeting over a
shared normalized encoding, plus the full evaluation stack they optimize
against: a from-scratch feed-forward classifier, subject-disjoint
cross-validation, confusion/AUC/kappa metrics and paired statistical
tests.
"""

from .benchmarks import benchmark, rastrigin, rosenbrock, sphere
from .crossval import CvPlan, Fold, make_cv_plan
from .data import (
    CsvSchema,
    Dataset,
    NormStats,
    class_weights,
    load_csv,
    smote,
    synth_generate,
    write_csv,
    zscore_apply,
    zscore_fit,
)
from .errors import SwarmTuneError
from .executor import CacheKey, CheckpointCache, parallel_evaluate
from .experiment import CvSettings, ExperimentConfig
from .ga import GaConfig, GeneticAlgorithm, feature_selection_space, mask_from_configuration
from .halving import (
    HalvingSchedule,
    HyperbandResult,
    RungResult,
    ShResult,
    hyperband_run,
    sh_run,
    sh_schedule,
)
from .hybrid import HybridConfig, HybridResult, run_hybrid
from .losses import focal, loss_and_grad, weighted_bce
from .metrics import (
    ConfusionCounts,
    MetricsReport,
    auc,
    binary_metrics,
    confusion_counts,
    metrics_from_counts,
)
from .network import Mlp
from .objective import (
    Checkpoint,
    ObjectiveSpec,
    TrainerConfig,
    mlp_param_count,
    scalar_objective,
    train_and_score,
)
from .pso import ParticleSwarm, PsoConfig
from .rng import derive_seed, rng_from
from .runner import report_compare, run_tune
from .space import (
    ParamSpec,
    SearchSpace,
    categorical_dim,
    clip_genotype,
    continuous_dim,
    default_anxiety_space,
    integer_dim,
    unit_cube_space,
)
from .stats import ComparisonResult, aggregate, paired_t, wilcoxon_signed_rank

__version__ = "0.1.0"

__all__ = [
    "SwarmTuneError",
    "ParamSpec",
    "SearchSpace",
    "default_anxiety_space",
    "unit_cube_space",
    "continuous_dim",
    "integer_dim",
    "categorical_dim",
    "clip_genotype",
    "PsoConfig",
    "ParticleSwarm",
    "GaConfig",
    "GeneticAlgorithm",
    "feature_selection_space",
    "mask_from_configuration",
    "HybridConfig",
    "HybridResult",
    "run_hybrid",
    "HalvingSchedule",
    "RungResult",
    "ShResult",
    "HyperbandResult",
    "sh_schedule",
    "sh_run",
    "hyperband_run",
    "benchmark",
    "sphere",
    "rastrigin",
    "rosenbrock",
    "weighted_bce",
    "focal",
    "loss_and_grad",
    "Mlp",
    "TrainerConfig",
    "ObjectiveSpec",
    "Checkpoint",
    "train_and_score",
    "scalar_objective",
    "mlp_param_count",
    "Dataset",
    "CsvSchema",
    "NormStats",
    "load_csv",
    "write_csv",
    "zscore_fit",
    "zscore_apply",
    "smote",
    "class_weights",
    "synth_generate",
    "CvPlan",
    "Fold",
    "make_cv_plan",
    "ConfusionCounts",
    "MetricsReport",
    "confusion_counts",
    "metrics_from_counts",
    "binary_metrics",
    "auc",
    "ComparisonResult",
    "wilcoxon_signed_rank",
    "paired_t",
    "aggregate",
    "parallel_evaluate",
    "CacheKey",
    "CheckpointCache",
    "ExperimentConfig",
    "CvSettings",
    "run_tune",
    "report_compare",
    "derive_seed",
    "rng_from",
]
