"""k-means label refinement and evaluation for dataless text classification."""

from .model import (
    CategorySet,
    Dataset,
    EarlyStopping,
    EmbeddingMatrix,
    GoldLabels,
    Metric,
    Polarity,
    ProbabilityMatrix,
    RefinementConfig,
    RefinementResult,
    ScoreMatrix,
    validate_dataset,
)
from .refinement import (
    AugmentedInputs,
    LabeledAnchors,
    RandomInitResult,
    assign,
    cluster_random_init,
    refine_dual,
    refine_fewshot,
    refine_single,
    update_centroids,
)
from .evaluation import (
    EvaluationReport,
    SweepSpec,
    accuracy,
    baseline_predictions,
    ensemble,
    one_to_one_accuracy,
    run_sweep,
)

__all__ = [
    "CategorySet",
    "Dataset",
    "EarlyStopping",
    "EmbeddingMatrix",
    "GoldLabels",
    "Metric",
    "Polarity",
    "ProbabilityMatrix",
    "RefinementConfig",
    "RefinementResult",
    "ScoreMatrix",
    "validate_dataset",
    "AugmentedInputs",
    "LabeledAnchors",
    "RandomInitResult",
    "assign",
    "cluster_random_init",
    "refine_dual",
    "refine_fewshot",
    "refine_single",
    "update_centroids",
    "EvaluationReport",
    "SweepSpec",
    "accuracy",
    "baseline_predictions",
    "ensemble",
    "one_to_one_accuracy",
    "run_sweep",
]
