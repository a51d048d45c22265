"""Accuracy metrics, optimal-assignment accuracy, ensembles, and sweeps."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EmptyInput, LengthMismatch, MixedPolarity, ShapeMismatch
from .geometry import normalize_rows_array, pairwise_distances
from .model import (
    CategorySet,
    Dataset,
    EmbeddingMatrix,
    GoldLabels,
    Metric,
    Polarity,
    RefinementConfig,
    ScoreMatrix,
)
from .refinement import refine_dual


def accuracy(preds, gold: GoldLabels) -> float:
    preds = np.asarray(preds, dtype=np.int64)
    if preds.shape[0] != len(gold):
        raise LengthMismatch(f"{preds.shape[0]} predictions vs {len(gold)} gold labels")
    return float(np.mean(preds == gold.labels))


def one_to_one_accuracy(preds, gold: GoldLabels, k: int) -> tuple[float, tuple[int, ...]]:
    """Accuracy maximized over bijections between clusters and categories.

    Returns (accuracy, mapping) where mapping[cluster] is the category the
    cluster is matched to.  Solved as optimal assignment on the k x k
    coincidence-count matrix (maximization).
    """
    preds = np.asarray(preds, dtype=np.int64)
    if preds.shape[0] != len(gold):
        raise LengthMismatch(f"{preds.shape[0]} predictions vs {len(gold)} gold labels")
    counts = np.zeros((k, k), dtype=np.int64)
    np.add.at(counts, (preds, gold.labels), 1)
    rows, cols = linear_sum_assignment(-counts)
    mapping = [0] * k
    for r, c in zip(rows, cols):
        mapping[int(r)] = int(c)
    matched = counts[rows, cols].sum()
    return float(matched) / preds.shape[0], tuple(mapping)


def ensemble(runs: Sequence[ScoreMatrix]) -> np.ndarray:
    """Sum score matrices and take the per-row arg-extremum.

    All runs must share shape and polarity; ties break to the lowest index.
    """
    if not runs:
        raise EmptyInput("ensemble needs at least one run")
    shape = runs[0].scores.shape
    polarity = runs[0].polarity
    for i, r in enumerate(runs[1:], start=1):
        if r.scores.shape != shape:
            raise ShapeMismatch(f"run {i} has shape {r.scores.shape}, expected {shape}")
        if r.polarity is not polarity:
            raise MixedPolarity(f"run {i} has polarity {r.polarity}, expected {polarity}")
    total = np.sum([r.scores for r in runs], axis=0)
    if polarity is Polarity.HIGHER_BETTER:
        return np.argmax(total, axis=1)
    return np.argmin(total, axis=1)


@dataclass(frozen=True)
class SweepSpec:
    """Label-name sets to sweep over.

    Either explicit ``label_sets`` or per-category ``synonym_pools`` whose
    cartesian product is enumerated lexicographically.  When
    ``sample_count`` is smaller than the total, that many sets are sampled
    without replacement with the given seed.
    """

    label_sets: tuple[CategorySet, ...] = ()
    synonym_pools: tuple[tuple[str, ...], ...] = ()
    sample_count: Optional[int] = None
    seed: int = 0

    def generate(self) -> list[CategorySet]:
        sets = list(self.label_sets)
        if self.synonym_pools:
            for combo in itertools.product(*self.synonym_pools):
                sets.append(CategorySet(names=tuple(combo)))
        if not sets:
            raise EmptyInput("sweep spec generates no label sets")
        ks = {s.k for s in sets}
        if len(ks) != 1:
            raise ShapeMismatch(f"label sets disagree on k: {sorted(ks)}")
        if self.sample_count is not None and self.sample_count < len(sets):
            rng = np.random.default_rng(self.seed)
            idx = rng.choice(len(sets), size=self.sample_count, replace=False)
            sets = [sets[int(i)] for i in idx]
        return sets


@dataclass(frozen=True)
class SweepRun:
    run_id: int
    names: tuple[str, ...]
    initial_accuracy: float
    refined_accuracy: float
    improved: bool
    gain: float
    duplicate_names: bool


@dataclass(frozen=True)
class EvaluationReport:
    runs: tuple[SweepRun, ...]
    mean_initial_accuracy: float
    mean_refined_accuracy: float
    improved_count: int
    run_count: int
    fraction_improved: float

    def scatter(self) -> list[tuple[int, float, float]]:
        """(run_id, initial accuracy, gain) rows for plotting."""
        return [(r.run_id, r.initial_accuracy, r.gain) for r in self.runs]


def baseline_predictions(
    docs: EmbeddingMatrix, cats: EmbeddingMatrix, metric: Metric
) -> np.ndarray:
    """Un-refined nearest-category predictions."""
    X, C = docs.data, cats.data
    if metric is Metric.COSINE:
        X = normalize_rows_array(X)
        C = normalize_rows_array(C)
    return np.argmin(pairwise_distances(X, C, metric), axis=1)


def run_sweep(
    dataset: Dataset,
    spec: SweepSpec,
    config: RefinementConfig,
    encoder: Callable[[str], np.ndarray],
    jobs: int = 1,
) -> EvaluationReport:
    """Refine under every generated label set and report before/after accuracy."""
    if dataset.gold is None:
        raise EmptyInput("sweep evaluation needs gold labels")
    gold = dataset.gold
    label_sets = spec.generate()

    def one_run(item) -> SweepRun:
        run_id, cats = item
        cat_matrix = EmbeddingMatrix(np.stack([np.asarray(encoder(n), dtype=np.float64) for n in cats.names]))
        before = accuracy(baseline_predictions(dataset.docs, cat_matrix, config.metric), gold)
        result = refine_dual(dataset.docs, cat_matrix, config)
        after = accuracy(result.final_predictions, gold)
        return SweepRun(
            run_id=run_id,
            names=cats.names,
            initial_accuracy=before,
            refined_accuracy=after,
            improved=after > before,
            gain=after - before,
            duplicate_names=cats.has_duplicates(),
        )

    items = list(enumerate(label_sets))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(one_run, items))
    else:
        runs = [one_run(it) for it in items]
    runs.sort(key=lambda r: r.run_id)

    improved = sum(1 for r in runs if r.improved)
    return EvaluationReport(
        runs=tuple(runs),
        mean_initial_accuracy=float(np.mean([r.initial_accuracy for r in runs])),
        mean_refined_accuracy=float(np.mean([r.refined_accuracy for r in runs])),
        improved_count=improved,
        run_count=len(runs),
        fraction_improved=improved / len(runs),
    )
