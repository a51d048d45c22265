"""Shared domain types: embedding/score/probability matrices, configs, results.

All numeric payloads are float64 and frozen after construction, so instances
can be shared freely across threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyInput,
    LabelOutOfRange,
    LengthMismatch,
    WeightMismatch,
)


class Metric(enum.Enum):
    COSINE = "cosine"
    SQUARED_L2 = "squared_l2"


class Polarity(enum.Enum):
    HIGHER_BETTER = "higher"
    LOWER_BETTER = "lower"


class EarlyStopping(enum.Enum):
    MIN_OBJECTIVE = "min_objective"
    LAST_ITERATION = "last_iteration"


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def _check_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        bad = int(np.argwhere(~np.isfinite(arr))[0][0])
        raise ValueError(f"{what} contains non-finite entries (first bad row {bad})")


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Dense row-per-item embedding matrix for documents or categories."""

    data: np.ndarray
    ids: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise ValueError(f"expected 2-D data, got ndim={data.ndim}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise EmptyInput(f"embedding matrix must be at least 1x1, got {data.shape}")
        _check_finite(data, "embedding matrix")
        object.__setattr__(self, "data", _freeze(data))
        if self.ids is not None:
            ids = tuple(self.ids)
            if len(ids) != data.shape[0]:
                raise LengthMismatch(
                    f"{len(ids)} ids for {data.shape[0]} rows"
                )
            if len(set(ids)) != len(ids):
                raise ValueError("row ids must be unique")
            object.__setattr__(self, "ids", ids)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class CategorySet:
    """Ordered category descriptions; the order is the canonical index order."""

    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(n.strip() for n in self.names)
        if len(names) < 2:
            raise EmptyInput(f"need at least 2 categories, got {len(names)}")
        for i, n in enumerate(names):
            if not n:
                raise EmptyInput(f"category {i} is empty after trimming")
        object.__setattr__(self, "names", names)

    @property
    def k(self) -> int:
        return len(self.names)

    def has_duplicates(self) -> bool:
        return len(set(self.names)) != len(self.names)


@dataclass(frozen=True)
class ScoreMatrix:
    """documents x categories relevance scores."""

    scores: np.ndarray
    polarity: Polarity = Polarity.HIGHER_BETTER

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 2 or scores.shape[0] < 1 or scores.shape[1] < 1:
            raise EmptyInput(f"score matrix must be 2-D and non-empty, got {scores.shape}")
        _check_finite(scores, "score matrix")
        object.__setattr__(self, "scores", _freeze(scores))

    @property
    def n_docs(self) -> int:
        return self.scores.shape[0]

    @property
    def k(self) -> int:
        return self.scores.shape[1]


@dataclass(frozen=True)
class ProbabilityMatrix:
    """Row-stochastic documents x categories matrix."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 2 or probs.shape[0] < 1 or probs.shape[1] < 1:
            raise EmptyInput(f"probability matrix must be 2-D and non-empty, got {probs.shape}")
        _check_finite(probs, "probability matrix")
        if np.any(probs < 0.0) or np.any(probs > 1.0):
            raise ValueError("probabilities must lie in [0, 1]")
        sums = probs.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > 1e-9):
            bad = int(np.argmax(np.abs(sums - 1.0)))
            raise ValueError(f"row {bad} sums to {sums[bad]}, not 1")
        object.__setattr__(self, "probs", _freeze(probs))

    @property
    def n_docs(self) -> int:
        return self.probs.shape[0]

    @property
    def k(self) -> int:
        return self.probs.shape[1]


@dataclass(frozen=True)
class GoldLabels:
    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1:
            raise ValueError("gold labels must be a 1-D vector")
        object.__setattr__(self, "labels", _freeze(labels))

    def __len__(self) -> int:
        return self.labels.shape[0]

    def check_range(self, k: int) -> None:
        for i, v in enumerate(self.labels):
            if v < 0 or v >= k:
                raise LabelOutOfRange(i, int(v), k)


@dataclass(frozen=True)
class RefinementConfig:
    """Knobs shared by the refinement procedures.

    Defaults follow the dual-encoder setup: 100 iterations max, centroid
    interpolation weights (0.5, 0, 0.5), early stopping on the minimum
    objective.  Few-shot runs use weights (0.25, 0.25, 0.5); the
    single-encoder path ignores the weights and early stopping entirely.
    """

    metric: Metric = Metric.SQUARED_L2
    max_iters: int = 100
    centroid_weights: tuple[float, float, float] = (0.5, 0.0, 0.5)
    early_stopping: EarlyStopping = EarlyStopping.MIN_OBJECTIVE
    seed: int = 0
    renormalize_centroids: bool = True

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        w = tuple(float(x) for x in self.centroid_weights)
        if len(w) != 3:
            raise WeightMismatch("need exactly 3 centroid weights")
        if any(x < 0 for x in w):
            raise WeightMismatch(f"weights must be nonnegative, got {w}")
        if abs(sum(w) - 1.0) > 1e-12:
            raise WeightMismatch(f"weights must sum to 1, got sum {sum(w)}")
        object.__setattr__(self, "centroid_weights", w)
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


FEWSHOT_WEIGHTS = (0.25, 0.25, 0.5)


@dataclass(frozen=True)
class RefinementResult:
    predictions_per_iter: tuple[np.ndarray, ...]
    objective_per_iter: np.ndarray
    selected_iter: int
    final_predictions: np.ndarray
    final_centroids: Union[EmbeddingMatrix, ProbabilityMatrix]
    converged: bool
    iterations_run: int

    def __post_init__(self):
        preds = tuple(
            _freeze(np.asarray(p, dtype=np.int64)) for p in self.predictions_per_iter
        )
        object.__setattr__(self, "predictions_per_iter", preds)
        obj = _freeze(np.asarray(self.objective_per_iter, dtype=np.float64))
        object.__setattr__(self, "objective_per_iter", obj)
        object.__setattr__(
            self, "final_predictions", _freeze(np.asarray(self.final_predictions, dtype=np.int64))
        )
        if not (len(preds) == len(obj) == self.iterations_run):
            raise ValueError("per-iteration records disagree with iterations_run")
        if not (0 <= self.selected_iter < self.iterations_run):
            raise ValueError("selected_iter out of range")
        if not np.array_equal(self.final_predictions, preds[self.selected_iter]):
            raise ValueError("final_predictions must equal the selected iteration's predictions")


@dataclass(frozen=True)
class Dataset:
    """Validated (documents, categories, optional gold) bundle."""

    docs: EmbeddingMatrix
    cats: EmbeddingMatrix
    gold: Optional[GoldLabels] = None


def validate_dataset(
    docs: EmbeddingMatrix,
    cats: EmbeddingMatrix,
    gold: Optional[GoldLabels] = None,
) -> Dataset:
    """Check cross-field consistency and return a validated handle."""
    if cats.rows < 2:
        raise EmptyInput(f"need at least 2 categories, got {cats.rows}")
    if docs.dim != cats.dim:
        raise DimensionMismatch(
            f"document dim {docs.dim} != category dim {cats.dim}"
        )
    if gold is not None:
        if len(gold) != docs.rows:
            raise LengthMismatch(
                f"{len(gold)} gold labels for {docs.rows} documents"
            )
        gold.check_range(cats.rows)
    return Dataset(docs=docs, cats=cats, gold=gold)
