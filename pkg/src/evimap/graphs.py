"""Neighborhood and citation graphs over the projected corpus.

The KNN graph connects each study to its k nearest neighbors measured on
the 2D layout (not in term space), then symmetrizes: "neighbor" anywhere in
the decision rules means adjacency in the symmetrized graph.  The citation
graph holds the directed citing -> cited edges restricted to corpus
members; reference keys that resolve to nothing are collected per
occurrence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from evimap.corpus import Corpus
from evimap.projection import ProjectedMap


@dataclass
class KnnGraph:
    k: int
    directed_out: dict[str, list[str]]
    edges: list[tuple[str, str]]
    _adjacency: dict[str, set[str]] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self._adjacency:
            adj: dict[str, set[str]] = {key: set() for key in self.directed_out}
            for a, b in self.edges:
                adj.setdefault(a, set()).add(b)
                adj.setdefault(b, set()).add(a)
            self._adjacency = adj

    def neighbors_of(self, key: str) -> list[str]:
        return sorted(self._adjacency.get(key, ()))

    def to_json_dict(self) -> dict:
        return {
            "schema": "evimap/knn@1",
            "k": self.k,
            "edges": [list(edge) for edge in self.edges],
            "directed_out": {k: list(v) for k, v in self.directed_out.items()},
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "KnnGraph":
        return cls(
            k=payload["k"],
            directed_out={k: list(v) for k, v in payload["directed_out"].items()},
            edges=[tuple(e) for e in payload["edges"]],
        )


def knn_edges(projected: ProjectedMap, k: int) -> KnnGraph:
    """Connect each study to its k nearest layout neighbors, then symmetrize.

    Each study's directed list has exactly min(k, N-1) entries ordered by
    ascending Euclidean distance, ties broken by study key.  k = 0 gives an
    empty graph.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    keys = projected.doc_keys
    x = projected.positions
    n = len(keys)

    directed: dict[str, list[str]] = {}
    if n and k:
        diff = x[:, None, :] - x[None, :, :]
        delta = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        for i, key in enumerate(keys):
            candidates = sorted(
                ((float(delta[i, j]), keys[j]) for j in range(n) if j != i),
            )
            directed[key] = [other for _, other in candidates[: min(k, n - 1)]]
    else:
        directed = {key: [] for key in keys}

    pairs = {tuple(sorted((a, b))) for a, outs in directed.items() for b in outs}
    edges = sorted(pairs)
    return KnnGraph(k=k, directed_out=directed, edges=edges)


@dataclass
class CitationGraph:
    edges: list[tuple[str, str]]
    unresolved: list[tuple[str, str]]
    _outgoing: dict[str, list[str]] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self._outgoing:
            out: dict[str, list[str]] = {}
            for citing, cited in self.edges:
                out.setdefault(citing, []).append(cited)
            self._outgoing = out

    def cited_by(self, key: str) -> list[str]:
        """Studies that ``key`` cites (outgoing, one hop)."""
        return list(self._outgoing.get(key, ()))

    def to_json_dict(self) -> dict:
        return {
            "schema": "evimap/citations@1",
            "edges": [list(edge) for edge in self.edges],
            "unresolved": [list(pair) for pair in self.unresolved],
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "CitationGraph":
        return cls(
            edges=[tuple(e) for e in payload["edges"]],
            unresolved=[tuple(p) for p in payload["unresolved"]],
        )


def citation_graph(corpus: Corpus) -> CitationGraph:
    """Directed citation edges between corpus members.

    Edge A -> B exists iff B's key appears in A's references and B is in
    the corpus; reference keys matching nothing are recorded per occurrence
    in ``unresolved``.
    """
    edges: list[tuple[str, str]] = []
    unresolved: list[tuple[str, str]] = []
    for study in corpus:
        for ref in study.references:
            if ref == study.key:
                continue
            if ref in corpus:
                edges.append((study.key, ref))
            else:
                unresolved.append((study.key, ref))
    return CitationGraph(edges=edges, unresolved=unresolved)
