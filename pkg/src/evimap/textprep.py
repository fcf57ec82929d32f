"""Turn study text into tf-idf weighted term vectors.

Each study's title, abstract, and keywords are concatenated, tokenized into
lowercase alphabetic runs, filtered against a stopword list, stemmed, and
counted.  The resulting documents-by-terms matrix is weighted with
tf * ln(N / df), so a term occurring in every document weighs zero and
rarer terms weigh more.

Processing order matters: stopwords are removed before stemming so that
stemmed stopword variants cannot leak into the vocabulary.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import sparse

from evimap.corpus import Corpus
from evimap.stemmer import stem

MIN_TOKEN_LENGTH = 2

_TOKEN_RE = re.compile(r"[a-z]+")


def tokenize(text: str) -> list[str]:
    """Lowercase maximal alphabetic runs, dropping tokens shorter than 2 chars."""
    return [t for t in _TOKEN_RE.findall(text.lower()) if len(t) >= MIN_TOKEN_LENGTH]


def remove_stopwords(tokens: list[str], stoplist: frozenset[str]) -> list[str]:
    """Order-preserving stopword filter; the stoplist must be lowercase."""
    return [t for t in tokens if t not in stoplist]


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Load a stoplist file (one lowercase word per line); default ships with the package."""
    if path is None:
        text = resources.files("evimap.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


def preprocess(text: str, stoplist: frozenset[str]) -> list[str]:
    """tokenize -> stopword filter -> stem.

    Stems below the length floor are dropped, and stems are re-checked
    against the stoplist: a content word may stem onto a stopword form
    (e.g. "willing" -> "will"), which must not enter the vocabulary.
    """
    stems = [stem(t) for t in remove_stopwords(tokenize(text), stoplist)]
    return [s for s in stems if len(s) >= MIN_TOKEN_LENGTH and s not in stoplist]


@dataclass
class TermDocumentMatrix:
    """tf-idf weighted documents-by-terms matrix.

    ``weights`` is CSR with one row per study (aligned with ``doc_keys``)
    and one column per vocabulary term (lexicographic order).
    ``empty_docs`` flags studies whose weight vector is all zero; they carry
    no usable content signal and will sit at an arbitrary map position.
    """

    terms: list[str]
    doc_keys: list[str]
    weights: sparse.csr_matrix
    doc_freq: np.ndarray
    empty_docs: list[str] = field(default_factory=list)

    @property
    def n_docs(self) -> int:
        return len(self.doc_keys)

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    def to_json_dict(self) -> dict:
        coo = self.weights.tocoo()
        rows: list[list] = [[] for _ in self.doc_keys]
        for i, j, v in zip(coo.row, coo.col, coo.data):
            rows[i].append([int(j), float(v)])
        for row in rows:
            row.sort()
        return {
            "schema": "evimap/term-matrix@1",
            "terms": list(self.terms),
            "doc_freq": [int(x) for x in self.doc_freq],
            "docs": list(self.doc_keys),
            "rows": rows,
        }


def build_matrix(corpus: Corpus, stoplist: frozenset[str] | None = None) -> TermDocumentMatrix:
    """Vectorize every study of a non-empty corpus.

    weight(t, d) = count of t in d * ln(N / df(t)).
    """
    if len(corpus) == 0:
        raise ValueError("cannot build a term matrix from an empty corpus")
    if stoplist is None:
        stoplist = load_stopwords()

    doc_counts: list[Counter[str]] = []
    doc_keys: list[str] = []
    for study in corpus:
        doc_counts.append(Counter(preprocess(study.text(), stoplist)))
        doc_keys.append(study.key)

    vocabulary = sorted(set().union(*doc_counts)) if doc_counts else []
    term_index = {t: i for i, t in enumerate(vocabulary)}

    n = len(doc_keys)
    doc_freq = np.zeros(len(vocabulary), dtype=np.int64)
    for counts in doc_counts:
        for term in counts:
            doc_freq[term_index[term]] += 1

    idf = np.log(n / doc_freq) if len(vocabulary) else np.zeros(0)

    data, indices, indptr = [], [], [0]
    for counts in doc_counts:
        for term in sorted(counts):
            j = term_index[term]
            w = counts[term] * idf[j]
            if w != 0.0:
                indices.append(j)
                data.append(w)
        indptr.append(len(indices))
    weights = sparse.csr_matrix(
        (np.asarray(data, dtype=np.float64), indices, indptr),
        shape=(n, len(vocabulary)),
    )

    row_sums = np.asarray(weights.sum(axis=1)).ravel()
    empty_docs = [doc_keys[i] for i in range(n) if row_sums[i] == 0.0]

    return TermDocumentMatrix(
        terms=vocabulary,
        doc_keys=doc_keys,
        weights=weights,
        doc_freq=doc_freq,
        empty_docs=empty_docs,
    )
