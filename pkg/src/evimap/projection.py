"""Cosine distances, 2D stress-minimizing projection, and the bundle hierarchy.

The projection places every study on a plane so that layout distances track
the cosine distances between their term vectors.  It starts from a
classical-scaling solution (double-centered squared distances, top two
eigenpairs found by seeded orthogonal iteration) and refines it with
majorization steps that never increase the stress.  The companion
hierarchy for the edge-bundle view is an average-linkage clustering of the
same distances with fully deterministic tie-breaking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from evimap import kernels
from evimap.textprep import TermDocumentMatrix

_POWER_ITER_LIMIT = 500
_POWER_ITER_TOL = 1e-13


@dataclass
class DistanceMatrix:
    """Symmetric cosine-distance matrix over documents, zero diagonal, range [0, 1]."""

    doc_keys: list[str]
    d: np.ndarray
    zero_keys: list[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.doc_keys)


@dataclass
class ProjectionConfig:
    seed: int = 0
    max_iterations: int = 300
    tolerance: float = 1e-6


@dataclass
class ProjectedMap:
    """2D positions per study plus the achieved stress."""

    doc_keys: list[str]
    positions: np.ndarray
    final_stress: float
    iterations_run: int
    seed: int
    stress_history: list[float] = field(default_factory=list)

    def position_of(self, key: str) -> tuple[float, float]:
        i = self.doc_keys.index(key)
        return float(self.positions[i, 0]), float(self.positions[i, 1])

    def to_json_dict(self) -> dict:
        return {
            "schema": "evimap/map@1",
            "seed": self.seed,
            "stress": self.final_stress,
            "iterations": self.iterations_run,
            "stress_history": list(self.stress_history),
            "points": [
                {"key": k, "x": float(self.positions[i, 0]), "y": float(self.positions[i, 1])}
                for i, k in enumerate(self.doc_keys)
            ],
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "ProjectedMap":
        points = payload["points"]
        positions = np.array([[p["x"], p["y"]] for p in points], dtype=np.float64)
        return cls(
            doc_keys=[p["key"] for p in points],
            positions=positions if len(points) else np.zeros((0, 2)),
            final_stress=payload["stress"],
            iterations_run=payload["iterations"],
            seed=payload["seed"],
            stress_history=list(payload.get("stress_history", [])),
        )


def distance_matrix(m: TermDocumentMatrix) -> DistanceMatrix:
    """Cosine distances d = 1 - cos between tf-idf rows.

    All-zero rows have no direction, so they are pinned at distance 1 from
    everything and flagged in ``zero_keys``.
    """
    if m.n_docs < 2:
        raise ValueError("distance matrix needs at least 2 documents")

    weights = m.weights.tocsr().astype(np.float64)
    norms = np.sqrt(np.asarray(weights.multiply(weights).sum(axis=1)).ravel())
    zero_rows = norms == 0.0
    safe_norms = np.where(zero_rows, 1.0, norms)
    normalized = sparse.diags(1.0 / safe_norms) @ weights

    cos = np.asarray((normalized @ normalized.T).todense())
    d = 1.0 - cos
    d[zero_rows, :] = 1.0
    d[:, zero_rows] = 1.0
    np.clip(d, 0.0, 1.0, out=d)
    d = (d + d.T) / 2.0
    np.fill_diagonal(d, 0.0)

    zero_keys = [m.doc_keys[i] for i in np.nonzero(zero_rows)[0]]
    return DistanceMatrix(doc_keys=list(m.doc_keys), d=d, zero_keys=zero_keys)


def stress(dm: DistanceMatrix, positions: np.ndarray) -> float:
    """Normalized stress: sqrt(sum (d - delta)^2 / sum d^2) over unordered pairs.

    Zero targets everywhere make the layout trivially exact: defined as 0.
    """
    d = dm.d
    denom = float(np.sum(np.triu(d * d, k=1)))
    if denom == 0.0:
        return 0.0
    delta = kernels.layout_distances(np.ascontiguousarray(positions, dtype=np.float64))
    return math.sqrt(kernels.squared_residual(d, delta) / denom)


def _double_centered_gram(d: np.ndarray) -> np.ndarray:
    d2 = d * d
    row = d2.mean(axis=1, keepdims=True)
    col = d2.mean(axis=0, keepdims=True)
    total = d2.mean()
    return -0.5 * (d2 - row - col + total)


def _top2_eigenpairs(b: np.ndarray, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Largest two eigenpairs of a symmetric matrix by seeded orthogonal iteration.

    The matrix is shifted positive-definite (Gershgorin bound) so iteration
    converges to the algebraically largest pairs; a 2x2 Rayleigh-Ritz step
    finishes the job, which also handles repeated eigenvalues cleanly.
    """
    n = b.shape[0]
    radii = np.sum(np.abs(b), axis=1) - np.abs(np.diag(b))
    lower = float(np.min(np.diag(b) - radii))
    shift = max(0.0, -lower)
    shifted = b + shift * np.eye(n)

    rng = np.random.default_rng(seed)
    q = rng.standard_normal((n, 2))
    q, _ = np.linalg.qr(q)
    for _ in range(_POWER_ITER_LIMIT):
        z = shifted @ q
        q_next, _ = np.linalg.qr(z)
        overlap = np.linalg.svd(q.T @ q_next, compute_uv=False)
        q = q_next
        if 1.0 - float(overlap.min()) < _POWER_ITER_TOL:
            break

    h = q.T @ shifted @ q
    ritz, rotation = np.linalg.eigh((h + h.T) / 2.0)
    order = np.argsort(ritz)[::-1]
    vectors = q @ rotation[:, order]
    values = ritz[order] - shift
    return values, vectors


def _classical_init(d: np.ndarray, seed: int) -> np.ndarray:
    values, vectors = _top2_eigenpairs(_double_centered_gram(d), seed)
    scale = np.sqrt(np.maximum(values, 0.0))
    return np.ascontiguousarray(vectors * scale[None, :])


def project(dm: DistanceMatrix, config: ProjectionConfig | None = None) -> ProjectedMap:
    """Embed documents in 2D by majorizing the stress.

    Deterministic for a fixed seed.  The recorded stress history is
    non-increasing: an update that would raise the stress (possible only
    through floating-point noise at convergence) is rejected and iteration
    stops.
    """
    if config is None:
        config = ProjectionConfig()
    d = dm.d
    denom = float(np.sum(np.triu(d * d, k=1)))

    if denom == 0.0:
        positions = np.zeros((dm.n, 2))
        return ProjectedMap(
            doc_keys=list(dm.doc_keys),
            positions=positions,
            final_stress=0.0,
            iterations_run=0,
            seed=config.seed,
            stress_history=[0.0],
        )

    x = _classical_init(d, config.seed)
    sigma = stress(dm, x)
    history = [sigma]
    iterations = 0

    for _ in range(config.max_iterations):
        if sigma == 0.0:
            break
        x_next = np.asarray(kernels.guttman_step(d, x))
        sigma_next = stress(dm, x_next)
        if sigma_next > sigma:
            break
        x = x_next
        iterations += 1
        history.append(sigma_next)
        converged = (sigma - sigma_next) < config.tolerance * sigma
        sigma = sigma_next
        if converged:
            break

    return ProjectedMap(
        doc_keys=list(dm.doc_keys),
        positions=x,
        final_stress=sigma,
        iterations_run=iterations,
        seed=config.seed,
        stress_history=history,
    )


@dataclass
class BundleNode:
    """Node of the binary content hierarchy: a study leaf or a two-child merge."""

    height: float
    key: str | None = None
    children: tuple["BundleNode", "BundleNode"] | None = None

    @property
    def is_leaf(self) -> bool:
        return self.key is not None

    def leaves(self) -> list[str]:
        if self.is_leaf:
            return [self.key]
        left, right = self.children
        return left.leaves() + right.leaves()

    def to_json_dict(self) -> dict:
        if self.is_leaf:
            return {"key": self.key, "height": self.height}
        left, right = self.children
        return {
            "height": self.height,
            "children": [left.to_json_dict(), right.to_json_dict()],
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "BundleNode":
        if "key" in payload:
            return cls(height=payload["height"], key=payload["key"])
        left, right = payload["children"]
        return cls(
            height=payload["height"],
            children=(cls.from_json_dict(left), cls.from_json_dict(right)),
        )


@dataclass
class BundleTree:
    """Binary hierarchy over studies plus the circular leaf order for bundling."""

    root: BundleNode
    leaf_order: list[str]

    def to_json_dict(self) -> dict:
        return {
            "schema": "evimap/bundle-tree@1",
            "root": self.root.to_json_dict(),
            "leaf_order": list(self.leaf_order),
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "BundleTree":
        return cls(
            root=BundleNode.from_json_dict(payload["root"]),
            leaf_order=list(payload["leaf_order"]),
        )


def build_bundle_tree(dm: DistanceMatrix) -> BundleTree:
    """Average-linkage agglomerative clustering over the distance matrix.

    Ties on merge distance break toward the lexicographically smallest pair
    of cluster labels (a cluster is labeled by its smallest study key), and
    the child with the smaller label goes left, so the left-to-right DFS
    leaf order is fully deterministic.
    """
    n = dm.n
    if n == 0:
        raise ValueError("bundle tree needs at least 1 document")
    keys = dm.doc_keys
    if n == 1:
        root = BundleNode(height=0.0, key=keys[0])
        return BundleTree(root=root, leaf_order=[keys[0]])

    dist = dm.d.astype(np.float64).copy()
    np.fill_diagonal(dist, np.inf)
    active = list(range(n))
    sizes = np.ones(n, dtype=np.int64)
    # A cluster is labeled by the rank (in sorted key order) of its smallest key.
    key_rank = {k: r for r, k in enumerate(sorted(keys))}
    labels = np.array([key_rank[k] for k in keys], dtype=np.int64)
    nodes: dict[int, BundleNode] = {i: BundleNode(height=0.0, key=keys[i]) for i in range(n)}

    while len(active) > 1:
        idx = np.asarray(active)
        sub = dist[np.ix_(idx, idx)]
        value = float(sub.min())
        rows, cols = np.nonzero(np.triu(sub == value, k=1))
        a, b = idx[rows], idx[cols]
        low = np.minimum(labels[a], labels[b])
        high = np.maximum(labels[a], labels[b])
        pick = np.lexsort((high, low))[0]
        i, j = int(a[pick]), int(b[pick])

        left, right = (i, j) if labels[i] <= labels[j] else (j, i)
        merged = BundleNode(height=value, children=(nodes[left], nodes[right]))

        others = idx[(idx != i) & (idx != j)]
        dist[i, others] = (sizes[i] * dist[i, others] + sizes[j] * dist[j, others]) / (
            sizes[i] + sizes[j]
        )
        dist[others, i] = dist[i, others]
        sizes[i] += sizes[j]
        labels[i] = min(labels[i], labels[j])
        nodes[i] = merged
        dist[j, :] = np.inf
        dist[:, j] = np.inf
        active.remove(j)

    root = nodes[active[0]]
    return BundleTree(root=root, leaf_order=root.leaves())
