"""Parse, validate, merge, and serialize BibTeX study collections.

A study collection ("corpus") is the unit the whole pipeline operates on:
the studies kept or rejected by the previous review plus the new evidence
found by the update search.  Each entry carries a ``status`` field with one
of three tokens (``included``, ``excluded``, ``toevaluate``), a custom
``references`` field listing the citation keys the study cites (semicolon
separated), and the usual ``title`` / ``abstract`` / ``keywords`` text.

Unknown fields are preserved verbatim so that parse -> serialize -> parse
is an identity on every study.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator


class Status(Enum):
    """Review status of a study."""

    INCLUDED = "included"
    EXCLUDED = "excluded"
    TO_EVALUATE = "toevaluate"


_STATUS_TOKENS = {
    "included": Status.INCLUDED,
    "excluded": Status.EXCLUDED,
    "toevaluate": Status.TO_EVALUATE,
}

# Fields with dedicated Study attributes; everything else is opaque.
_KNOWN_FIELDS = {"title", "abstract", "keywords", "references", "status", "doi"}


class BibtexParseError(ValueError):
    """Unrecoverable syntax error in a BibTeX file.

    Carries the byte offset of the failure and, when the entry's citation
    key had already been read, that key.
    """

    def __init__(self, message: str, offset: int, line: int, key: str | None = None):
        self.offset = offset
        self.line = line
        self.key = key
        where = f"byte {offset}, line {line}"
        if key:
            where += f", entry '{key}'"
        super().__init__(f"{message} ({where})")


@dataclass
class Study:
    """One primary study of the review."""

    key: str
    title: str
    status: Status
    abstract: str = ""
    keywords: list[str] = field(default_factory=list)
    references: list[str] = field(default_factory=list)
    doi: str | None = None
    entry_type: str = "article"
    extra_fields: dict[str, str] = field(default_factory=dict)

    def text(self) -> str:
        """Document text used for vectorization: title + abstract + keywords."""
        return " ".join([self.title, self.abstract, " ".join(self.keywords)])


@dataclass
class Corpus:
    """Ordered, key-unique collection of studies.

    ``warnings`` holds ingestion diagnostics and is excluded from equality:
    two corpora are equal when their studies are equal field for field.
    """

    studies: list[Study] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list, compare=False)

    def __post_init__(self) -> None:
        self._index = {s.key: s for s in self.studies}
        if len(self._index) != len(self.studies):
            raise ValueError("duplicate study keys in corpus")

    def __len__(self) -> int:
        return len(self.studies)

    def __iter__(self) -> Iterator[Study]:
        return iter(self.studies)

    def __contains__(self, key: str) -> bool:
        return key in self._index

    def get(self, key: str) -> Study | None:
        return self._index.get(key)

    def keys(self) -> list[str]:
        return [s.key for s in self.studies]

    def statuses(self) -> dict[str, Status]:
        return {s.key: s.status for s in self.studies}


@dataclass(frozen=True)
class StatusCounts:
    included: int
    excluded: int
    to_evaluate: int

    @property
    def total(self) -> int:
        return self.included + self.excluded + self.to_evaluate


def corpus_stats(corpus: Corpus) -> StatusCounts:
    """Count studies per review status."""
    counts = {status: 0 for status in Status}
    for study in corpus:
        counts[study.status] += 1
    return StatusCounts(
        included=counts[Status.INCLUDED],
        excluded=counts[Status.EXCLUDED],
        to_evaluate=counts[Status.TO_EVALUATE],
    )


def _line_of(text: str, pos: int) -> int:
    return text.count("\n", 0, pos) + 1


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _parse_error(text: str, pos: int, message: str, key: str | None = None) -> BibtexParseError:
    return BibtexParseError(message, _byte_offset(text, pos), _line_of(text, pos), key)


_KEY_END = {",", "}", ")"}


def _skip_ws(text: str, pos: int) -> int:
    n = len(text)
    while pos < n and text[pos].isspace():
        pos += 1
    return pos


def _read_braced(text: str, pos: int, key: str | None) -> tuple[str, int]:
    """Read a {...} group starting at pos; returns inner text and position after '}'."""
    depth = 0
    start = pos
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return text[start + 1 : pos], pos + 1
        pos += 1
    raise _parse_error(text, start, "unbalanced braces", key)


def _read_value(text: str, pos: int, key: str | None) -> tuple[str, int]:
    pos = _skip_ws(text, pos)
    if pos >= len(text):
        raise _parse_error(text, pos, "unexpected end of file in field value", key)
    ch = text[pos]
    if ch == "{":
        return _read_braced(text, pos, key)
    if ch == '"':
        end = pos + 1
        n = len(text)
        depth = 0
        while end < n:
            c = text[end]
            if c == "{":
                depth += 1
            elif c == "}":
                depth -= 1
            elif c == '"' and depth == 0:
                return text[pos + 1 : end], end + 1
            end += 1
        raise _parse_error(text, pos, "unterminated quoted value", key)
    # Bare value (number or single token), up to comma or closing brace.
    end = pos
    n = len(text)
    while end < n and text[end] not in ",}\n":
        end += 1
    return text[pos:end].strip(), end


def _clean_value(raw: str) -> str:
    return " ".join(raw.split())


def _normalize_status_token(raw: str) -> Status | None:
    token = re.sub(r"[\s_\-]+", "", raw.strip().lower())
    return _STATUS_TOKENS.get(token)


def _split_list(raw: str, sep: str) -> list[str]:
    return [part.strip() for part in raw.split(sep) if part.strip()]


def parse_bibtex(text: str) -> Corpus:
    """Parse BibTeX text into a Corpus.

    Entries missing a title or a valid status are rejected with a warning;
    a missing abstract or keywords field is tolerated (warning, empty
    value).  Self-references are dropped.  On a syntax error that cannot be
    recovered from, raises :class:`BibtexParseError`.
    """
    studies: list[Study] = []
    warnings: list[str] = []
    seen: set[str] = set()

    pos = 0
    n = len(text)
    while True:
        at = text.find("@", pos)
        if at == -1:
            break
        pos = _skip_ws(text, at + 1)
        type_start = pos
        while pos < n and (text[pos].isalnum() or text[pos] in "-_"):
            pos += 1
        entry_type = text[type_start:pos].lower()
        pos = _skip_ws(text, pos)
        if pos >= n or text[pos] != "{":
            raise _parse_error(text, at, f"expected '{{' after @{entry_type or '?'}")
        if entry_type in ("comment", "string", "preamble"):
            _, pos = _read_braced(text, pos, None)
            warnings.append(f"@{entry_type} block ignored")
            continue

        # Recover the citation key up front so brace errors can name it.
        probe_comma = text.find(",", pos)
        probe_key = text[pos + 1 : probe_comma].strip() if probe_comma != -1 else None
        if probe_key and not re.fullmatch(r"[^\s{}=]+", probe_key):
            probe_key = None
        body, after = _read_braced(text, pos, probe_key)
        body_start = pos + 1

        # Citation key runs up to the first comma of the body.
        comma = body.find(",")
        if comma == -1:
            key = body.strip()
            fields_text = ""
        else:
            key = body[:comma].strip()
            fields_text = body[comma + 1 :]
        if not key:
            raise _parse_error(text, at, "entry has no citation key")

        fields = _parse_fields(text, body_start + (comma + 1 if comma >= 0 else len(body)), fields_text, key)
        study, entry_warnings = _build_study(key, entry_type, fields)
        warnings.extend(entry_warnings)
        if study is not None:
            if study.key in seen:
                warnings.append(f"duplicate key '{study.key}': entry dropped, first occurrence kept")
            else:
                seen.add(study.key)
                studies.append(study)
        pos = after

    return Corpus(studies=studies, warnings=warnings)


def _parse_fields(full_text: str, base: int, body: str, key: str) -> dict[str, str]:
    """Parse `name = value` pairs from an entry body, preserving order."""
    fields: dict[str, str] = {}
    pos = 0
    n = len(body)
    while True:
        pos = _skip_ws(body, pos)
        while pos < n and body[pos] == ",":
            pos = _skip_ws(body, pos + 1)
        if pos >= n:
            break
        name_start = pos
        while pos < n and (body[pos].isalnum() or body[pos] in "-_"):
            pos += 1
        name = body[name_start:pos].lower()
        pos = _skip_ws(body, pos)
        if not name or pos >= n or body[pos] != "=":
            raise _parse_error(full_text, base + name_start, "malformed field (expected 'name = value')", key)
        try:
            value, pos = _read_value(body, pos + 1, key)
        except BibtexParseError:
            raise _parse_error(full_text, base + pos, "unbalanced braces in field value", key) from None
        fields[name] = value
    return fields


def _build_study(key: str, entry_type: str, fields: dict[str, str]) -> tuple[Study | None, list[str]]:
    warnings: list[str] = []

    title = _clean_value(fields.get("title", ""))
    if not title:
        warnings.append(f"entry '{key}' rejected: missing title")
        return None, warnings

    raw_status = fields.get("status")
    if raw_status is None:
        warnings.append(f"entry '{key}' rejected: missing status")
        return None, warnings
    status = _normalize_status_token(raw_status)
    if status is None:
        warnings.append(f"entry '{key}' rejected: unrecognized status '{raw_status.strip()}'")
        return None, warnings

    if "abstract" not in fields:
        warnings.append(f"entry '{key}': missing abstract, using empty text")
    if "keywords" not in fields:
        warnings.append(f"entry '{key}': missing keywords, using empty list")
    abstract = _clean_value(fields.get("abstract", ""))
    keywords = _split_list(_clean_value(fields.get("keywords", "")), ",")

    references = _split_list(fields.get("references", ""), ";")
    deduped: list[str] = []
    for ref in references:
        if ref == key:
            warnings.append(f"entry '{key}': self-reference dropped")
        elif ref not in deduped:
            deduped.append(ref)

    doi = _clean_value(fields.get("doi", "")) or None

    extra = {name: value for name, value in fields.items() if name not in _KNOWN_FIELDS}
    study = Study(
        key=key,
        title=title,
        status=status,
        abstract=abstract,
        keywords=keywords,
        references=deduped,
        doi=doi,
        entry_type=entry_type or "article",
        extra_fields=extra,
    )
    return study, warnings


def serialize_bibtex(corpus: Corpus) -> str:
    """Render a corpus back to BibTeX text.

    Output is deterministic and re-parses to an equal corpus: recognized
    fields first in a fixed order, then unknown fields in their original
    order.
    """
    blocks = []
    for study in corpus:
        lines = [f"@{study.entry_type}{{{study.key},"]
        lines.append(f"  title = {{{study.title}}},")
        lines.append(f"  abstract = {{{study.abstract}}},")
        lines.append(f"  keywords = {{{', '.join(study.keywords)}}},")
        lines.append(f"  references = {{{'; '.join(study.references)}}},")
        lines.append(f"  status = {{{study.status.value}}},")
        if study.doi is not None:
            lines.append(f"  doi = {{{study.doi}}},")
        for name, value in study.extra_fields.items():
            lines.append(f"  {name} = {{{value}}},")
        lines.append("}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


def normalized_title(title: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace: duplicate-match form."""
    lowered = re.sub(r"[^a-z0-9]+", " ", title.lower())
    return " ".join(lowered.split())


def merge(previous: Corpus, new_search: Corpus) -> Corpus:
    """Union of the previous review's studies with the update search results.

    A new study duplicating a previous one (same key, DOI, or normalized
    title) is discarded and the previous record kept.  Every surviving new
    study gets status ``toevaluate`` regardless of what its file said.
    """
    warnings = list(previous.warnings) + list(new_search.warnings)

    prev_keys = {s.key for s in previous}
    prev_dois = {s.doi.lower(): s.key for s in previous if s.doi}
    prev_titles = {normalized_title(s.title): s.key for s in previous}

    studies = list(previous.studies)
    for study in new_search:
        duplicate_of = None
        if study.key in prev_keys:
            duplicate_of = study.key
        elif study.doi and study.doi.lower() in prev_dois:
            duplicate_of = prev_dois[study.doi.lower()]
        elif normalized_title(study.title) in prev_titles:
            duplicate_of = prev_titles[normalized_title(study.title)]
        if duplicate_of is not None:
            warnings.append(
                f"new study '{study.key}' duplicates previous study '{duplicate_of}': discarded"
            )
            continue
        if study.status is not Status.TO_EVALUATE:
            warnings.append(
                f"new study '{study.key}' carried status '{study.status.value}': forced to toevaluate"
            )
            study = Study(
                key=study.key,
                title=study.title,
                status=Status.TO_EVALUATE,
                abstract=study.abstract,
                keywords=list(study.keywords),
                references=list(study.references),
                doi=study.doi,
                entry_type=study.entry_type,
                extra_fields=dict(study.extra_fields),
            )
        studies.append(study)

    return Corpus(studies=studies, warnings=warnings)
