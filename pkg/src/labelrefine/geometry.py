"""Distances, normalization, softmax, and divergences.

All operations are pure; natural log is used throughout, so the JS
divergence maxes out at ln 2.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DimensionMismatch, EmptyCluster, InfiniteDivergence, ZeroVector
from .model import EmbeddingMatrix, Metric, ProbabilityMatrix, ScoreMatrix


def normalize_rows_array(data: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(data, axis=1)
    zero = np.nonzero(norms == 0.0)[0]
    if zero.size:
        raise ZeroVector(int(zero[0]))
    return data / norms[:, None]


def l2_normalize_rows(m: EmbeddingMatrix) -> EmbeddingMatrix:
    """Scale every row to unit L2 norm, preserving direction and ids."""
    return EmbeddingMatrix(normalize_rows_array(m.data), ids=m.ids)


def _as_vectors(u, v) -> tuple[np.ndarray, np.ndarray]:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatch(f"vector shapes differ: {u.shape} vs {v.shape}")
    return u, v


def cosine_distance(u, v) -> float:
    """1 - cosine similarity; range [0, 2]."""
    u, v = _as_vectors(u, v)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0:
        raise ZeroVector(0)
    if nv == 0.0:
        raise ZeroVector(1)
    return float(1.0 - np.dot(u, v) / (nu * nv))


def squared_l2_distance(u, v) -> float:
    u, v = _as_vectors(u, v)
    d = u - v
    return float(np.dot(d, d))


def row_softmax(s: ScoreMatrix) -> ProbabilityMatrix:
    """Exponentiate-and-normalize each row, max-subtracted for stability."""
    raw = s.scores
    shifted = raw - raw.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return ProbabilityMatrix(e / e.sum(axis=1, keepdims=True))


def kl_divergence(p, q) -> float:
    """KL(p || q) in nats, with the 0*ln(0) := 0 convention."""
    p, q = _as_vectors(p, q)
    mask = p > 0.0
    if np.any(q[mask] == 0.0):
        raise InfiniteDivergence("p has mass where q has none")
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def js_divergence(p, q) -> float:
    """Jensen-Shannon divergence in nats; symmetric, in [0, ln 2]."""
    p, q = _as_vectors(p, q)
    m = 0.5 * (p + q)
    return 0.5 * kl_divergence(p, m) + 0.5 * kl_divergence(q, m)


def cluster_mean(m: EmbeddingMatrix, member_indices) -> np.ndarray:
    idx = np.asarray(list(member_indices), dtype=np.int64)
    if idx.size == 0:
        raise EmptyCluster(-1)
    return m.data[idx].mean(axis=0)


def pairwise_distances(X: np.ndarray, C: np.ndarray, metric: Metric) -> np.ndarray:
    """n x K distance matrix between document rows and centroid rows."""
    if X.shape[1] != C.shape[1]:
        raise DimensionMismatch(f"dim {X.shape[1]} vs {C.shape[1]}")
    if metric is Metric.SQUARED_L2:
        return cdist(X, C, "sqeuclidean")
    xnorm = np.linalg.norm(X, axis=1)
    cnorm = np.linalg.norm(C, axis=1)
    if np.any(xnorm == 0.0):
        raise ZeroVector(int(np.nonzero(xnorm == 0.0)[0][0]))
    if np.any(cnorm == 0.0):
        raise ZeroVector(int(np.nonzero(cnorm == 0.0)[0][0]))
    sim = (X @ C.T) / np.outer(xnorm, cnorm)
    return 1.0 - sim


def js_divergence_matrix(P: np.ndarray, C: np.ndarray) -> np.ndarray:
    """n x K matrix of JS divergences between rows of P and rows of C.

    Vectorized form of js_divergence; both inputs are row-stochastic.
    """
    if P.shape[1] != C.shape[1]:
        raise DimensionMismatch(f"dim {P.shape[1]} vs {C.shape[1]}")
    n, d = P.shape
    K = C.shape[0]
    out = np.empty((n, K))
    for j in range(K):
        q = C[j][None, :]
        m = 0.5 * (P + q)
        with np.errstate(divide="ignore", invalid="ignore"):
            tp = np.where(P > 0.0, P * np.log(np.where(P > 0.0, P / m, 1.0)), 0.0)
            tq = np.where(q > 0.0, q * np.log(np.where(q > 0.0, q / m, 1.0)), 0.0)
        out[:, j] = 0.5 * tp.sum(axis=1) + 0.5 * tq.sum(axis=1)
    return out
