"""TF-IDF similarity model: pairwise similarity, singleton rewards, clusters."""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .corpus import Corpus
from .errors import ValidationError
from .rng import SplitMix64

DEFAULT_SEED = 42
KMEANS_MAX_ITER = 50


@dataclass(frozen=True)
class TfidfVectors:
    matrix: sp.csr_matrix  # n x |vocabulary|, rows L2-normalized (zero rows allowed)
    vocabulary: tuple[str, ...]


@dataclass(frozen=True)
class SimilarityModel:
    """Everything the objective needs about a corpus.

    ``partitions[i]`` is the cluster id (0-based) of unit ``i``.
    ``row_totals[i]`` is ``sum_j sim(i, j)``, the coverage unit ``i`` brings.
    """

    sim: np.ndarray
    singleton_reward: np.ndarray
    partitions: np.ndarray
    row_totals: np.ndarray

    @property
    def n(self) -> int:
        return self.sim.shape[0]

    @property
    def K(self) -> int:
        return int(self.partitions.max()) + 1 if self.n else 0

    @classmethod
    def from_matrix(cls, sim, partitions=None, singleton_reward=None) -> "SimilarityModel":
        """Wrap a precomputed similarity matrix.

        ``partitions`` defaults to one cluster; ``singleton_reward`` defaults to
        the column means of ``sim``. Passing explicit rewards is meant for toy
        instances and tests.
        """
        sim = np.array(sim, dtype=float)
        if sim.ndim != 2 or sim.shape[0] != sim.shape[1]:
            raise ValidationError("similarity matrix must be square")
        if not np.array_equal(sim, sim.T):
            raise ValidationError("similarity matrix must be symmetric")
        if sim.size and (sim.min() < 0 or sim.max() > 1):
            raise ValidationError("similarities must lie in [0, 1]")
        n = sim.shape[0]
        if partitions is None:
            partitions = np.zeros(n, dtype=np.int64)
        partitions = np.asarray(partitions, dtype=np.int64)
        if partitions.shape != (n,):
            raise ValidationError("need one cluster id per unit")
        if n and (partitions.min() < 0 or set(np.unique(partitions)) != set(range(partitions.max() + 1))):
            raise ValidationError("cluster ids must be 0..K-1 with no empty cluster")
        if singleton_reward is None:
            singleton_reward = singleton_rewards(sim)
        singleton_reward = np.asarray(singleton_reward, dtype=float)
        if singleton_reward.shape != (n,) or (singleton_reward < 0).any():
            raise ValidationError("singleton rewards must be n nonnegative values")
        for arr in (sim, partitions, singleton_reward):
            arr.setflags(write=False)
        totals = sim.sum(axis=1)
        totals.setflags(write=False)
        return cls(sim, singleton_reward, partitions, totals)


def default_cluster_count(n: int) -> int:
    return max(1, math.ceil(n / 10))


def build_tfidf(corpus: Corpus) -> TfidfVectors:
    """Raw-count tf times ``ln(N / df)`` idf, rows L2-normalized."""
    n = len(corpus)
    vocab = sorted({t for u in corpus for t in u.tokens})
    col = {t: j for j, t in enumerate(vocab)}
    rows, cols, vals = [], [], []
    for i, u in enumerate(corpus):
        counts: dict[str, int] = {}
        for t in u.tokens:
            counts[t] = counts.get(t, 0) + 1
        for t in sorted(counts):
            rows.append(i)
            cols.append(col[t])
            vals.append(float(counts[t]))
    tf = sp.csr_matrix((vals, (rows, cols)), shape=(n, len(vocab)), dtype=float)
    df = np.asarray((tf > 0).sum(axis=0)).ravel()
    idf = np.log(n / df) if len(vocab) else np.zeros(0)
    weighted = sp.csr_matrix(tf.multiply(idf[np.newaxis, :]))
    weighted.eliminate_zeros()
    norms = np.sqrt(np.asarray(weighted.multiply(weighted).sum(axis=1)).ravel())
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    normalized = sp.csr_matrix(sp.diags(inv) @ weighted)
    normalized.sort_indices()
    return TfidfVectors(normalized, tuple(vocab))


def similarity_matrix(vectors) -> np.ndarray:
    """Cosine similarity of L2-normalized rows; zero rows give zero rows."""
    X = vectors.matrix if isinstance(vectors, TfidfVectors) else vectors
    X = sp.csr_matrix(X)
    gram = np.asarray((X @ X.T).todense(), dtype=float)
    # mirror the upper triangle so the result is exactly symmetric
    sim = np.triu(gram, 1)
    sim = sim + sim.T
    nonzero = np.asarray(X.getnnz(axis=1)).ravel() > 0
    np.fill_diagonal(sim, nonzero.astype(float))
    np.clip(sim, 0.0, 1.0, out=sim)
    return sim


def singleton_rewards(sim) -> np.ndarray:
    """``r_j = (1/n) * sum_i sim(i, j)``, the diagonal term included."""
    sim = np.asarray(sim, dtype=float)
    return sim.sum(axis=0) / sim.shape[0]


def _kmeanspp(X, sq_norms, k, rng):
    m = X.shape[0]
    centers = [rng.randbelow(m)]
    d2 = _sq_dist_to(X, sq_norms, centers[0])
    for _ in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            remaining = [i for i in range(m) if i not in set(centers)]
            idx = remaining[rng.randbelow(len(remaining))]
        else:
            cum = np.cumsum(d2)
            idx = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
            idx = min(idx, m - 1)
        centers.append(idx)
        d2 = np.minimum(d2, _sq_dist_to(X, sq_norms, idx))
    return centers


def _sq_dist_to(X, sq_norms, i):
    row = X[i]
    dots = np.asarray((X @ row.T).todense()).ravel()
    return np.maximum(sq_norms - 2.0 * dots + sq_norms[i], 0.0)


def _sq_distances(X, sq_norms, C):
    dots = np.asarray(X @ C.T)
    return np.maximum(sq_norms[:, None] - 2.0 * dots + (C * C).sum(axis=1)[None, :], 0.0)


def _repair_empty(labels, dists, k):
    """Move the worst-fitting point of the largest cluster into each empty one."""
    sizes = np.bincount(labels, minlength=k)
    for j in np.flatnonzero(sizes == 0):
        big = int(np.argmax(sizes))
        members = np.flatnonzero(labels == big)
        far = members[int(np.argmax(dists[members, big]))]
        labels[far] = j
        sizes[big] -= 1
        sizes[j] += 1
    return labels


def _centroids(X, labels, k):
    onehot = sp.csr_matrix(
        (np.ones(len(labels)), (labels, np.arange(len(labels)))), shape=(k, len(labels))
    )
    sums = np.asarray((onehot @ X).todense())
    sizes = np.bincount(labels, minlength=k).astype(float)
    return sums / sizes[:, None]


def cluster_partitions(vectors, K: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Seeded k-means (k-means++ init) over TF-IDF rows.

    Returns 0-based cluster ids numbered by first appearance among units
    with a nonzero vector. Units with a zero vector all join cluster 0.
    """
    X = vectors.matrix if isinstance(vectors, TfidfVectors) else vectors
    X = sp.csr_matrix(X, dtype=float)
    n = X.shape[0]
    if not 1 <= K <= n:
        raise ValidationError(f"cluster count K={K} must satisfy 1 <= K <= n={n}")
    active = np.flatnonzero(np.asarray(X.getnnz(axis=1)).ravel() > 0)
    labels_full = np.zeros(n, dtype=np.int64)
    if len(active) == 0:
        return labels_full
    Xa = X[active]
    sq_norms = np.asarray(Xa.multiply(Xa).sum(axis=1)).ravel()
    k = min(K, len(active))
    rng = SplitMix64(seed)
    C = np.asarray(Xa[_kmeanspp(Xa, sq_norms, k, rng)].todense())
    labels = None
    for _ in range(KMEANS_MAX_ITER):
        dists = _sq_distances(Xa, sq_norms, C)
        new = _repair_empty(np.argmin(dists, axis=1), dists, k)
        C = _centroids(Xa, new, k)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
    # renumber by first appearance so cluster ids do not depend on seeding order
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first, kind="stable")
    remap = np.empty(k, dtype=np.int64)
    remap[np.unique(labels)[order]] = np.arange(order.size)
    labels_full[active] = remap[labels]
    return labels_full


def build_model(
    corpus: Corpus,
    clusters: int | None = None,
    seed: int = DEFAULT_SEED,
    similarity: Callable[[Corpus], np.ndarray] | None = None,
) -> SimilarityModel:
    """TF-IDF vectors, similarity, rewards and clusters for ``corpus``.

    ``similarity`` may supply any symmetric [0, 1] matrix in place of TF-IDF
    cosine; clustering always runs on the TF-IDF vectors.
    """
    vectors = build_tfidf(corpus)
    sim = similarity(corpus) if similarity is not None else similarity_matrix(vectors)
    K = default_cluster_count(len(corpus)) if clusters is None else clusters
    parts = cluster_partitions(vectors, K, seed)
    return SimilarityModel.from_matrix(sim, parts)


_HEADER = struct.Struct("<Q")


def write_sim_cache(path, sim) -> None:
    """8-byte little-endian n, then n*n little-endian float64, row-major."""
    sim = np.ascontiguousarray(sim, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(sim.shape[0]))
        fh.write(sim.tobytes(order="C"))


def read_sim_cache(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValidationError(f"{path}: truncated similarity cache")
    (n,) = _HEADER.unpack_from(data)
    if len(data) != _HEADER.size + 8 * n * n:
        raise ValidationError(f"{path}: cache size does not match n={n}")
    return np.frombuffer(data, dtype="<f8", offset=_HEADER.size).reshape(n, n).astype(float)
