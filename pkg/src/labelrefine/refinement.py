"""Clustering procedures for label refinement.

Four variants share one iteration skeleton:

* dual-encoder refinement: centroids start at the category embeddings and
  each update interpolates the cluster mean with them;
* few-shot refinement: same, plus a fixed per-category anchor mean in the
  interpolation;
* single-encoder refinement: documents are probability rows, distance is
  JS divergence, centroids start one-hot and update as plain means;
* random-init clustering: standard Lloyd iterations from seeded document
  samples, no interpolation.

Ties in argmin break toward the lowest index.  Convergence means the full
assignment vector repeats; the converging iteration is still recorded, so
the trace always ends with a stable assignment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyInput, KTooLarge, WeightMismatch
from .geometry import js_divergence_matrix, normalize_rows_array, pairwise_distances, row_softmax
from .model import (
    EarlyStopping,
    EmbeddingMatrix,
    Metric,
    Polarity,
    ProbabilityMatrix,
    RefinementConfig,
    RefinementResult,
    ScoreMatrix,
)


@dataclass(frozen=True)
class LabeledAnchors:
    """Labeled documents with fixed cluster membership.

    ``groups[c]`` holds row indices into ``embeddings`` for the anchors of
    category c.  ``anchor_centroids`` (the per-category anchor means) are
    computed once at construction and never change.
    """

    embeddings: EmbeddingMatrix
    groups: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        groups = tuple(tuple(int(i) for i in g) for g in self.groups)
        n = self.embeddings.rows
        for c, g in enumerate(groups):
            if not g:
                raise EmptyInput(f"category {c} has no anchors")
            for i in g:
                if i < 0 or i >= n:
                    raise IndexError(f"anchor index {i} out of range for {n} rows")
        object.__setattr__(self, "groups", groups)
        centroids = np.stack(
            [self.embeddings.data[list(g)].mean(axis=0) for g in groups]
        )
        centroids.flags.writeable = False
        object.__setattr__(self, "_centroids", centroids)

    @property
    def anchor_centroids(self) -> np.ndarray:
        return self._centroids

    @property
    def k(self) -> int:
        return len(self.groups)

    @classmethod
    def from_labels(cls, embeddings: EmbeddingMatrix, labels: Sequence[int], k: int) -> "LabeledAnchors":
        groups = [[] for _ in range(k)]
        for i, c in enumerate(labels):
            if c < 0 or c >= k:
                raise IndexError(f"anchor label {c} outside [0, {k})")
            groups[int(c)].append(i)
        return cls(embeddings=embeddings, groups=tuple(tuple(g) for g in groups))


@dataclass(frozen=True)
class AugmentedInputs:
    """Extra centroids and clustering-only documents."""

    extra_category_embeddings: Optional[EmbeddingMatrix] = None
    extra_text_embeddings: Optional[EmbeddingMatrix] = None

    @property
    def n_categories(self) -> int:
        e = self.extra_category_embeddings
        return 0 if e is None else e.rows

    @property
    def n_texts(self) -> int:
        e = self.extra_text_embeddings
        return 0 if e is None else e.rows


def assign(
    docs: EmbeddingMatrix, centroids: EmbeddingMatrix, metric: Metric
) -> tuple[np.ndarray, np.ndarray, float]:
    """Nearest-centroid assignment.

    Returns (predictions, distance matrix, objective), where the objective
    is the summed distance of every document to its assigned centroid.
    """
    dists = pairwise_distances(docs.data, centroids.data, metric)
    preds = np.argmin(dists, axis=1)
    objective = float(dists[np.arange(dists.shape[0]), preds].sum())
    return preds, dists, objective


def update_centroids(
    docs: EmbeddingMatrix,
    predictions: np.ndarray,
    initial_category_embeddings: EmbeddingMatrix,
    anchors: Optional[LabeledAnchors] = None,
    weights: tuple[float, float, float] = (0.5, 0.0, 0.5),
) -> np.ndarray:
    """Interpolated centroid update.

    r_c = w_mean * mean(assigned docs) + w_anchor * anchor_mean(c)
        + w_category * initial_embedding(c).

    Empty clusters redistribute the w_mean share onto the initial category
    embedding, keeping the weights summing to one.
    """
    w_mean, w_anchor, w_category = weights
    if abs(w_mean + w_anchor + w_category - 1.0) > 1e-12:
        raise WeightMismatch(f"weights must sum to 1, got {weights}")
    if (w_anchor > 0) != (anchors is not None):
        raise WeightMismatch("anchors must be present exactly when w_anchor > 0")
    init = initial_category_embeddings.data
    K = init.shape[0]
    X = docs.data
    preds = np.asarray(predictions, dtype=np.int64)
    out = np.empty_like(init)
    for c in range(K):
        members = preds == c
        base = w_anchor * anchors.anchor_centroids[c] if anchors is not None else 0.0
        if members.any():
            out[c] = w_mean * X[members].mean(axis=0) + base + w_category * init[c]
        else:
            out[c] = base + (w_mean + w_category) * init[c]
    return out


def _select(objectives: list[float], mode: EarlyStopping) -> int:
    if mode is EarlyStopping.MIN_OBJECTIVE:
        return int(np.argmin(objectives))
    return len(objectives) - 1


def _refine_embedding_space(
    docs: EmbeddingMatrix,
    category_embeddings: EmbeddingMatrix,
    config: RefinementConfig,
    augmented: Optional[AugmentedInputs],
    anchors: Optional[LabeledAnchors],
) -> RefinementResult:
    k = category_embeddings.rows
    if docs.dim != category_embeddings.dim:
        raise DimensionMismatch(f"doc dim {docs.dim} != category dim {category_embeddings.dim}")

    cosine = config.metric is Metric.COSINE
    doc_data = docs.data
    cat_data = category_embeddings.data
    aug_cats = augmented.extra_category_embeddings.data if augmented and augmented.n_categories else None
    aug_texts = augmented.extra_text_embeddings.data if augmented and augmented.n_texts else None
    if cosine:
        doc_data = normalize_rows_array(doc_data)
        cat_data = normalize_rows_array(cat_data)
        if aug_cats is not None:
            aug_cats = normalize_rows_array(aug_cats)
        if aug_texts is not None:
            aug_texts = normalize_rows_array(aug_texts)
        if anchors is not None:
            anchors = LabeledAnchors(
                embeddings=EmbeddingMatrix(normalize_rows_array(anchors.embeddings.data)),
                groups=anchors.groups,
            )

    n_eval = doc_data.shape[0]
    X_all = doc_data if aug_texts is None else np.vstack([doc_data, aug_texts])
    init = cat_data if aug_cats is None else np.vstack([cat_data, aug_cats])
    if anchors is not None and anchors.k != k:
        raise DimensionMismatch(f"{anchors.k} anchor groups for {k} categories")

    all_docs_m = EmbeddingMatrix(X_all)
    centroids = init
    preds_per_iter: list[np.ndarray] = []
    objectives: list[float] = []
    centroid_history: list[np.ndarray] = []
    prev_assign = None
    converged = False
    for _ in range(config.max_iters):
        dists = pairwise_distances(X_all, centroids, config.metric)
        full_assign = np.argmin(dists, axis=1)
        objective = float(dists[np.arange(dists.shape[0]), full_assign].sum())
        # Eval docs are always predicted within the original label set.
        eval_preds = np.argmin(dists[:n_eval, :k], axis=1)
        preds_per_iter.append(eval_preds)
        objectives.append(objective)
        centroid_history.append(centroids)
        if prev_assign is not None and np.array_equal(full_assign, prev_assign):
            converged = True
            break
        prev_assign = full_assign
        centroids = update_centroids(
            all_docs_m, full_assign, EmbeddingMatrix(init), anchors, config.centroid_weights
        )
        if cosine and config.renormalize_centroids:
            centroids = normalize_rows_array(centroids)

    selected = _select(objectives, config.early_stopping)
    return RefinementResult(
        predictions_per_iter=tuple(preds_per_iter),
        objective_per_iter=np.array(objectives),
        selected_iter=selected,
        final_predictions=preds_per_iter[selected],
        final_centroids=EmbeddingMatrix(centroid_history[selected]),
        converged=converged,
        iterations_run=len(objectives),
    )


def refine_dual(
    docs: EmbeddingMatrix,
    category_embeddings: EmbeddingMatrix,
    config: RefinementConfig,
    augmented: Optional[AugmentedInputs] = None,
) -> RefinementResult:
    """Label refinement in embedding space with interpolated centroids."""
    if config.centroid_weights[1] != 0.0:
        raise WeightMismatch("dual refinement takes no anchor weight; use refine_fewshot")
    return _refine_embedding_space(docs, category_embeddings, config, augmented, None)


def refine_fewshot(
    docs: EmbeddingMatrix,
    category_embeddings: EmbeddingMatrix,
    anchors: LabeledAnchors,
    config: RefinementConfig,
) -> RefinementResult:
    """Dual refinement with fixed labeled anchors joining the centroid update.

    Anchors never enter the unlabeled cluster mean and never receive
    predictions; only ``docs`` rows are predicted.
    """
    if config.centroid_weights[1] <= 0.0:
        raise WeightMismatch("few-shot refinement needs a positive anchor weight")
    return _refine_embedding_space(docs, category_embeddings, config, None, anchors)


def refine_single(scores: ScoreMatrix, config: RefinementConfig) -> RefinementResult:
    """Refinement in probability space for single-encoder scores.

    Rows are softmaxed into distributions, centroids start one-hot, the
    distance is JS divergence, and updates are plain means (no
    interpolation).  Predictions come from the last iteration; the
    objective trace is recorded but never drives selection.  Empty
    clusters keep their previous centroid.
    """
    if scores.polarity is not Polarity.HIGHER_BETTER:
        raise ValueError("single-encoder scores must be higher-is-better before softmax")
    P = row_softmax(scores).probs
    k = scores.k
    centroids = np.eye(k)
    preds_per_iter: list[np.ndarray] = []
    objectives: list[float] = []
    centroid_history: list[np.ndarray] = []
    prev = None
    converged = False
    for _ in range(config.max_iters):
        dists = js_divergence_matrix(P, centroids)
        preds = np.argmin(dists, axis=1)
        objective = float(dists[np.arange(P.shape[0]), preds].sum())
        preds_per_iter.append(preds)
        objectives.append(objective)
        centroid_history.append(centroids)
        if prev is not None and np.array_equal(preds, prev):
            converged = True
            break
        prev = preds
        new_centroids = centroids.copy()
        for c in range(k):
            members = preds == c
            if members.any():
                new_centroids[c] = P[members].mean(axis=0)
        centroids = new_centroids

    selected = len(objectives) - 1
    return RefinementResult(
        predictions_per_iter=tuple(preds_per_iter),
        objective_per_iter=np.array(objectives),
        selected_iter=selected,
        final_predictions=preds_per_iter[selected],
        final_centroids=ProbabilityMatrix(centroid_history[selected]),
        converged=converged,
        iterations_run=len(objectives),
    )


@dataclass(frozen=True)
class RandomInitResult:
    assignments: np.ndarray
    centroids: EmbeddingMatrix
    assignments_per_iter: tuple[np.ndarray, ...]
    objective_per_iter: np.ndarray
    converged: bool
    iterations_run: int


def cluster_random_init(
    docs: EmbeddingMatrix,
    k: int,
    seed: int,
    metric: Metric = Metric.SQUARED_L2,
    max_iters: int = 100,
) -> RandomInitResult:
    """Standard Lloyd k-means from k distinct seeded document samples.

    No interpolation; empty clusters reseed to the document farthest from
    its assigned centroid.  Deterministic given the seed.
    """
    n = docs.rows
    if k > n:
        raise KTooLarge(f"k={k} exceeds {n} documents")
    if k < 1:
        raise EmptyInput("k must be >= 1")
    X = docs.data
    rng = np.random.default_rng(seed)
    centroids = X[np.sort(rng.choice(n, size=k, replace=False))].copy()

    assigns: list[np.ndarray] = []
    objectives: list[float] = []
    prev = None
    converged = False
    for _ in range(max_iters):
        dists = pairwise_distances(X, centroids, metric)
        a = np.argmin(dists, axis=1)
        own = dists[np.arange(n), a]
        objectives.append(float(own.sum()))
        assigns.append(a)
        if prev is not None and np.array_equal(a, prev):
            converged = True
            break
        prev = a
        new_centroids = centroids.copy()
        empties = [c for c in range(k) if not np.any(a == c)]
        for c in range(k):
            members = a == c
            if members.any():
                new_centroids[c] = X[members].mean(axis=0)
        used: set[int] = set()
        for c in empties:
            order = np.argsort(-own, kind="stable")
            far = next(int(i) for i in order if int(i) not in used)
            used.add(far)
            new_centroids[c] = X[far]
        centroids = new_centroids

    return RandomInitResult(
        assignments=assigns[-1],
        centroids=EmbeddingMatrix(centroids),
        assignments_per_iter=tuple(assigns),
        objective_per_iter=np.array(objectives),
        converged=converged,
        iterations_run=len(objectives),
    )
