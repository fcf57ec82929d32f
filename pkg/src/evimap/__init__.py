"""Content-map pipeline for screening new evidence in systematic review updates."""

from evimap.corpus import Corpus, Status, Study, corpus_stats, merge, parse_bibtex, serialize_bibtex

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "Status",
    "Study",
    "corpus_stats",
    "merge",
    "parse_bibtex",
    "serialize_bibtex",
    "__version__",
]
