"""Tests for BibTeX parsing, serialization, merge, and stats."""

import pytest

from evimap.corpus import (
    BibtexParseError,
    Corpus,
    Status,
    Study,
    corpus_stats,
    merge,
    normalized_title,
    parse_bibtex,
    serialize_bibtex,
)

from conftest import make_review_corpora


def _study(key, title, status=Status.TO_EVALUATE, **kwargs):
    return Study(key=key, title=title, status=status, **kwargs)


class TestParse:
    def test_empty_file(self):
        corpus = parse_bibtex("")
        assert len(corpus) == 0
        assert corpus.warnings == []

    def test_single_entry_status_included(self):
        corpus = parse_bibtex(
            "@article{k1,\n title={T},\n abstract={A},\n keywords={x},\n status={included},\n}"
        )
        assert len(corpus) == 1
        assert corpus.studies[0].status is Status.INCLUDED

    def test_status_tokens_case_insensitive(self):
        for token, expected in [
            ("Included", Status.INCLUDED),
            ("EXCLUDED", Status.EXCLUDED),
            ("ToEvaluate", Status.TO_EVALUATE),
            ("to evaluate", Status.TO_EVALUATE),
            ("to_evaluate", Status.TO_EVALUATE),
        ]:
            corpus = parse_bibtex(
                f"@article{{k,title={{T}},abstract={{A}},keywords={{}},status={{{token}}}}}"
            )
            assert corpus.studies[0].status is expected, token

    def test_dataset2_shaped_counts(self):
        previous, new = make_review_corpora()
        merged = merge(previous, new)
        text = serialize_bibtex(merged)
        corpus = parse_bibtex(text)
        assert len(corpus) == 110
        counts = corpus_stats(corpus)
        assert (counts.included, counts.excluded, counts.to_evaluate) == (63, 34, 13)

    def test_missing_title_rejected(self):
        corpus = parse_bibtex("@article{k1, abstract={A}, status={included}}")
        assert len(corpus) == 0
        assert any("missing title" in w for w in corpus.warnings)

    def test_missing_status_rejected(self):
        corpus = parse_bibtex("@article{k1, title={T}}")
        assert len(corpus) == 0
        assert any("missing status" in w for w in corpus.warnings)

    def test_unknown_status_rejected(self):
        corpus = parse_bibtex("@article{k1, title={T}, status={maybe}}")
        assert len(corpus) == 0
        assert any("unrecognized status" in w for w in corpus.warnings)

    def test_missing_abstract_warns_but_keeps(self):
        corpus = parse_bibtex("@article{k1, title={T}, keywords={}, status={included}}")
        assert len(corpus) == 1
        assert corpus.studies[0].abstract == ""
        assert any("missing abstract" in w for w in corpus.warnings)

    def test_references_semicolon_list(self):
        corpus = parse_bibtex(
            "@article{k1, title={T}, abstract={}, keywords={}, references={a; b; c}, status={included}}"
        )
        assert corpus.studies[0].references == ["a", "b", "c"]

    def test_self_reference_dropped(self):
        corpus = parse_bibtex(
            "@article{k1, title={T}, abstract={}, keywords={}, references={k1; b}, status={included}}"
        )
        assert corpus.studies[0].references == ["b"]
        assert any("self-reference" in w for w in corpus.warnings)

    def test_keywords_comma_list(self):
        corpus = parse_bibtex(
            "@article{k1, title={T}, abstract={}, keywords={testing, aspects , tools}, status={included}}"
        )
        assert corpus.studies[0].keywords == ["testing", "aspects", "tools"]

    def test_unknown_fields_preserved(self):
        corpus = parse_bibtex(
            "@article{k1, title={T}, abstract={}, keywords={}, status={included}, year={2007}, author={Someone}}"
        )
        assert corpus.studies[0].extra_fields == {"year": "2007", "author": "Someone"}

    def test_duplicate_key_keeps_first(self):
        text = (
            "@article{k1, title={First}, abstract={}, keywords={}, status={included}}\n"
            "@article{k1, title={Second}, abstract={}, keywords={}, status={excluded}}"
        )
        corpus = parse_bibtex(text)
        assert len(corpus) == 1
        assert corpus.studies[0].title == "First"
        assert any("duplicate key" in w for w in corpus.warnings)

    def test_unbalanced_braces_error_names_offset_and_key(self):
        with pytest.raises(BibtexParseError) as exc:
            parse_bibtex("@article{badkey, title={unclosed")
        err = exc.value
        assert err.key == "badkey"
        assert err.offset >= 0
        assert "byte" in str(err)

    def test_quoted_values(self):
        corpus = parse_bibtex(
            '@article{k1, title="Quoted Title", abstract={}, keywords={}, status="included"}'
        )
        assert corpus.studies[0].title == "Quoted Title"

    def test_nested_braces_in_value(self):
        corpus = parse_bibtex(
            "@article{k1, title={About {SQL} engines}, abstract={}, keywords={}, status={included}}"
        )
        assert corpus.studies[0].title == "About {SQL} engines"

    def test_comment_block_skipped(self):
        corpus = parse_bibtex(
            "@comment{ignore me}\n@article{k1, title={T}, abstract={}, keywords={}, status={included}}"
        )
        assert len(corpus) == 1


class TestRoundTrip:
    def test_empty_corpus(self):
        assert serialize_bibtex(Corpus()) == ""

    def test_single_study_round_trip(self):
        study = _study(
            "k1",
            "A Title",
            Status.INCLUDED,
            abstract="Some abstract",
            keywords=["kw1", "kw2"],
            references=["r1", "r2"],
            doi="10.1/xyz",
            extra_fields={"year": "2007"},
        )
        corpus = Corpus(studies=[study])
        again = parse_bibtex(serialize_bibtex(corpus))
        assert again == corpus

    def test_all_statuses_preserved(self):
        corpus = Corpus(
            studies=[
                _study("a", "TA", Status.INCLUDED),
                _study("b", "TB", Status.EXCLUDED),
                _study("c", "TC", Status.TO_EVALUATE),
            ]
        )
        again = parse_bibtex(serialize_bibtex(corpus))
        assert [s.status for s in again] == [Status.INCLUDED, Status.EXCLUDED, Status.TO_EVALUATE]
        assert again == corpus

    def test_fifty_study_fixture_round_trip(self):
        previous, new = make_review_corpora(n_included=20, n_excluded=20, n_new=10, seed=3)
        corpus = merge(previous, new)
        assert len(corpus) == 50
        again = parse_bibtex(serialize_bibtex(corpus))
        assert again == corpus
        # And a second hop is bit-stable.
        assert serialize_bibtex(again) == serialize_bibtex(corpus)


class TestMerge:
    def test_self_merge_idempotent(self, small_corpus):
        merged = merge(small_corpus, small_corpus)
        assert merged == small_corpus

    def test_single_overlap(self):
        x = _study("x", "Shared Study", Status.INCLUDED)
        y = _study("y", "Fresh Study", Status.TO_EVALUATE)
        previous = Corpus(studies=[x])
        new = Corpus(studies=[_study("x", "Shared Study", Status.TO_EVALUATE), y])
        merged = merge(previous, new)
        assert merged.keys() == ["x", "y"]
        assert merged.get("x").status is Status.INCLUDED
        assert merged.get("y").status is Status.TO_EVALUATE

    def test_97_plus_13_gives_110(self):
        previous, new = make_review_corpora()
        assert len(previous) == 97
        assert len(new) == 13
        merged = merge(previous, new)
        assert len(merged) == 110

    def test_doi_match_detects_duplicate(self):
        previous = Corpus(studies=[_study("a", "Title One", Status.INCLUDED, doi="10.1/A")])
        new = Corpus(studies=[_study("b", "Different Title", Status.TO_EVALUATE, doi="10.1/a")])
        merged = merge(previous, new)
        assert merged.keys() == ["a"]
        assert any("duplicates" in w for w in merged.warnings)

    def test_normalized_title_match_detects_duplicate(self):
        previous = Corpus(studies=[_study("a", "Testing: Aspect-Oriented Programs!", Status.EXCLUDED)])
        new = Corpus(studies=[_study("b", "testing aspect oriented programs", Status.TO_EVALUATE)])
        merged = merge(previous, new)
        assert merged.keys() == ["a"]

    def test_new_statuses_forced_to_toevaluate(self):
        previous = Corpus(studies=[_study("a", "Old", Status.INCLUDED)])
        new = Corpus(studies=[_study("b", "New", Status.INCLUDED)])
        merged = merge(previous, new)
        assert merged.get("b").status is Status.TO_EVALUATE
        assert any("forced to toevaluate" in w for w in merged.warnings)

    def test_merge_never_duplicates_keys(self):
        previous, new = make_review_corpora(seed=11)
        merged = merge(previous, new)
        keys = merged.keys()
        assert len(keys) == len(set(keys))


class TestStats:
    def test_empty(self):
        counts = corpus_stats(Corpus())
        assert (counts.included, counts.excluded, counts.to_evaluate) == (0, 0, 0)
        assert counts.total == 0

    def test_dataset2_shape(self, dataset2_corpus):
        counts = corpus_stats(dataset2_corpus)
        assert (counts.included, counts.excluded, counts.to_evaluate) == (63, 34, 13)
        assert counts.total == 110

    def test_all_toevaluate(self):
        corpus = Corpus(studies=[_study(f"k{i}", f"T{i}") for i in range(5)])
        counts = corpus_stats(corpus)
        assert (counts.included, counts.excluded, counts.to_evaluate) == (0, 0, 5)


def test_normalized_title():
    assert normalized_title("  Aspect-Oriented   Testing, 2007!") == "aspect oriented testing 2007"


def test_corpus_rejects_duplicate_keys():
    with pytest.raises(ValueError):
        Corpus(studies=[_study("k", "A"), _study("k", "B")])
