"""Heuristic linkers: hand-scored fixtures and contract invariants."""

import json

import pytest

from apitrove.apimap import build_api_map, manifest_from_dict
from apitrove.errors import SourceMismatchError
from apitrove.linkers import (
    DEFAULT_THRESHOLDS,
    CodeLinkWeights,
    LinkerConfig,
    LinkerDescriptor,
    default_descriptor,
    extract_code_facts,
    link_code_snippet,
    link_library_text,
    link_post,
    load_linker_config,
    run_linker,
)
from apitrove.model import ContentRecord, LinkKind, SourceKind

GUAVA_FQN = "com.google.common.base.Object.hashCode()"
READ_FQN = "java.io.Reader.read(char[],int,int)"


@pytest.fixture
def map_db():
    return build_api_map(
        [
            manifest_from_dict(
                {
                    "library_id": "guava",
                    "display_name": "Guava",
                    "aliases": ["google guava"],
                    "ecosystem": "maven",
                    "apis": [GUAVA_FQN],
                }
            ),
            manifest_from_dict(
                {
                    "library_id": "jdk",
                    "display_name": "JDK",
                    "ecosystem": "maven",
                    "apis": [READ_FQN],
                }
            ),
        ]
    )


def snippet(code: str) -> ContentRecord:
    return ContentRecord(content_id="code:1", source=SourceKind.CODE_SNIPPET, body=code)


def post(body: str, title: str = "") -> ContentRecord:
    return ContentRecord(content_id="qa:1", source=SourceKind.QA_POST, title=title, body=body)


def tweet(text: str) -> ContentRecord:
    return ContentRecord(content_id="mb:1", source=SourceKind.MICROBLOG, body=text)


def cve(description: str, products: str = "") -> ContentRecord:
    metadata = {"affected_products": products} if products else {}
    return ContentRecord(
        content_id="cve:1", source=SourceKind.CVE_ENTRY, body=description, metadata=metadata
    )


class TestCodeFacts:
    def test_imports_and_calls(self):
        facts = extract_code_facts(
            "import com.google.common.base.Object;\n"
            "int n = read(buf, 0, 10);\n"
            "Object.hashCode();\n"
        )
        assert facts.imports == ("com.google.common.base.Object",)
        assert ("read", 3) in facts.invocations
        assert ("hashCode", 0) in facts.invocations

    def test_wildcard_import(self):
        facts = extract_code_facts("import com.google.common.base.*;\n")
        assert facts.imports == ("com.google.common.base",)

    def test_keywords_are_not_calls(self):
        facts = extract_code_facts("if (x) { while (y) { f(a); } }")
        assert facts.invocations == (("f", 1),)

    def test_nested_calls_count_top_level_commas(self):
        facts = extract_code_facts("g(h(a, b), c)")
        assert ("g", 2) in facts.invocations
        assert ("h", 2) in facts.invocations

    def test_unclosed_call_dropped(self):
        assert extract_code_facts("broken(a, b").invocations == ()


class TestLinkCodeSnippet:
    def test_import_plus_call_scores_full_confidence(self, map_db):
        # Hand-scored: 0.5 arity + 0.4 import prefix + 0.1 class token = 1.0.
        record = snippet(
            "import com.google.common.base.Object;\n"
            "int h = Object.hashCode();\n"
        )
        links = link_code_snippet(record, map_db, default_descriptor(SourceKind.CODE_SNIPPET))
        assert [(l.target_key, l.confidence) for l in links] == [(GUAVA_FQN, 1.0)]

    def test_unmapped_calls_produce_nothing(self, map_db):
        record = snippet("System.out.println(greeting);")
        assert link_code_snippet(record, map_db, default_descriptor(SourceKind.CODE_SNIPPET)) == []

    def test_arity_match_alone_scores_base_weight(self, map_db):
        # Hand-scored: arity 3 matches read(char[],int,int), no other evidence.
        record = snippet("char[] buf = new char[16];\nint n = read(buf, 0, 10);\n")
        links = link_code_snippet(record, map_db, default_descriptor(SourceKind.CODE_SNIPPET))
        assert [(l.target_key, l.confidence) for l in links] == [(READ_FQN, 0.5)]

    def test_arity_mismatch_drops_below_threshold(self, map_db):
        record = snippet("int n = read(buf);\n")
        assert link_code_snippet(record, map_db, default_descriptor(SourceKind.CODE_SNIPPET)) == []

    def test_adding_matching_import_never_lowers_confidence(self, map_db):
        desc = LinkerDescriptor(
            linker_id="code",
            supported_source=SourceKind.CODE_SNIPPET,
            produces=LinkKind.API,
            threshold=0.0,
        )
        bare = snippet("int n = read(buf, 0, 10);\n")
        with_import = snippet("import java.io.Reader;\nint n = read(buf, 0, 10);\n")
        base = {l.target_key: l.confidence for l in link_code_snippet(bare, map_db, desc)}
        boosted = {
            l.target_key: l.confidence for l in link_code_snippet(with_import, map_db, desc)
        }
        for target, confidence in base.items():
            assert boosted[target] >= confidence

    def test_source_mismatch(self, map_db):
        with pytest.raises(SourceMismatchError):
            link_code_snippet(
                post("body"), map_db, default_descriptor(SourceKind.CODE_SNIPPET)
            )

    def test_links_are_pure_and_ordered(self, map_db):
        record = snippet(
            "import com.google.common.base.Object;\n"
            "Object.hashCode();\nint n = read(buf, 0, 10);\n"
        )
        desc = default_descriptor(SourceKind.CODE_SNIPPET)
        first = link_code_snippet(record, map_db, desc)
        second = link_code_snippet(record, map_db, desc)
        assert first == second
        confidences = [l.confidence for l in first]
        assert confidences == sorted(confidences, reverse=True)


class TestLinkPost:
    def test_code_span_class_and_library_score(self, map_db):
        # Hand-scored: 0.4 simple name in code span + 0.3 class substring
        # ("Object" inside "Objects") + 0.2 library name; the qualified form
        # "Object.hashCode" does not occur, so no +0.1.
        record = post("You can use `Objects.hashCode` from guava for this.")
        links = link_post(record, map_db, default_descriptor(SourceKind.QA_POST))
        assert [(l.target_key, l.confidence) for l in links] == [(GUAVA_FQN, pytest.approx(0.9))]

    def test_full_evidence_scores_one(self, map_db):
        record = post(
            "Working with com.google.common.base here. Try ```Object.hashCode()``` "
            "for identity hashing."
        )
        links = link_post(record, map_db, default_descriptor(SourceKind.QA_POST))
        assert [(l.target_key, l.confidence) for l in links] == [(GUAVA_FQN, 1.0)]

    def test_prose_read_is_ambiguous_and_rejected(self, map_db):
        record = post("I like to read books in the library every evening.")
        assert link_post(record, map_db, default_descriptor(SourceKind.QA_POST)) == []

    def test_empty_body_post_fails_gate(self, map_db):
        record = post("", title="General question about style")
        assert link_post(record, map_db, default_descriptor(SourceKind.QA_POST)) == []

    def test_indented_code_counts_as_code_region(self, map_db):
        record = post("Example:\n\n    int h = Object.hashCode();\n\nfrom guava")
        links = link_post(record, map_db, default_descriptor(SourceKind.QA_POST))
        assert links[0].confidence == 1.0

    def test_source_mismatch(self, map_db):
        with pytest.raises(SourceMismatchError):
            link_post(tweet("hello"), map_db, default_descriptor(SourceKind.QA_POST))


class TestLinkLibraryText:
    def test_tweet_with_name_and_cue(self, map_db):
        # Hand-scored: 0.6 name + 0.4 "release" cue.
        links = link_library_text(
            tweet("new guava release fixes caching bug"),
            map_db.library_refs(),
            default_descriptor(SourceKind.MICROBLOG),
        )
        assert [(l.target_key, l.confidence) for l in links] == [("guava", 1.0)]

    def test_fruit_tweet_rejected_at_default_threshold(self, map_db):
        # Name match alone is 0.6, below the 0.7 microblog default.
        links = link_library_text(
            tweet("I love guava smoothies"),
            map_db.library_refs(),
            default_descriptor(SourceKind.MICROBLOG),
        )
        assert links == []

    def test_cue_stem_matches_inflections(self, map_db):
        links = link_library_text(
            tweet("guava deprecated this method"),
            map_db.library_refs(),
            default_descriptor(SourceKind.MICROBLOG),
        )
        assert links and links[0].confidence == 1.0

    def test_cve_name_match(self):
        jackson = manifest_from_dict(
            {"library_id": "jackson-databind", "apis": ["com.fasterxml.jackson.databind.ObjectMapper.readValue(java.lang.String)"]}
        )
        db = build_api_map([jackson])
        links = link_library_text(
            cve("A deserialization flaw in jackson-databind before 2.9.10 allows remote code execution."),
            db.library_refs(),
            default_descriptor(SourceKind.CVE_ENTRY),
        )
        assert [(l.target_key, l.confidence) for l in links] == [("jackson-databind", 0.8)]

    def test_cve_product_metadata_adds_weight(self):
        jackson = manifest_from_dict(
            {"library_id": "jackson-databind", "apis": ["com.fasterxml.jackson.databind.ObjectMapper.readValue(java.lang.String)"]}
        )
        db = build_api_map([jackson])
        links = link_library_text(
            cve(
                "A deserialization flaw in jackson-databind allows remote code execution.",
                products="fasterxml:jackson-databind",
            ),
            db.library_refs(),
            default_descriptor(SourceKind.CVE_ENTRY),
        )
        assert [(l.target_key, l.confidence) for l in links] == [("jackson-databind", 1.0)]

    def test_word_boundary_blocks_partial_names(self, map_db):
        links = link_library_text(
            tweet("the guavapie release is out"),
            map_db.library_refs(),
            default_descriptor(SourceKind.MICROBLOG),
        )
        assert links == []

    def test_ties_order_by_target(self, map_db):
        links = link_library_text(
            tweet("comparing guava and jdk in the new release"),
            map_db.library_refs(),
            default_descriptor(SourceKind.MICROBLOG),
        )
        assert [l.target_key for l in links] == ["guava", "jdk"]
        assert all(l.confidence == 1.0 for l in links)

    def test_source_mismatch(self, map_db):
        with pytest.raises(SourceMismatchError):
            link_library_text(
                post("text"), map_db.library_refs(), default_descriptor(SourceKind.MICROBLOG)
            )

    def test_descriptor_source_must_match_record(self, map_db):
        with pytest.raises(SourceMismatchError):
            link_library_text(
                cve("jackson-databind flaw"),
                map_db.library_refs(),
                default_descriptor(SourceKind.MICROBLOG),
            )


class TestContracts:
    def test_emitted_confidence_bounded_by_threshold_and_one(self, map_db):
        records = [
            snippet("import com.google.common.base.Object;\nObject.hashCode();"),
            post("`Objects.hashCode` from guava"),
        ]
        config = LinkerConfig()
        for record in records:
            for link in run_linker(record, map_db, config) or []:
                desc = config.descriptors[record.source]
                assert desc.threshold <= link.confidence <= 1.0

    def test_produced_kind_matches_descriptor(self, map_db):
        config = LinkerConfig()
        code_links = run_linker(
            snippet("import com.google.common.base.Object;\nObject.hashCode();"),
            map_db,
            config,
        )
        assert all(l.kind is LinkKind.API for l in code_links)
        tweet_links = run_linker(tweet("new guava release"), map_db, config)
        assert all(l.kind is LinkKind.LIBRARY for l in tweet_links)

    def test_unlinked_source_gets_none(self, map_db):
        record = ContentRecord(
            content_id="video:1", source=SourceKind.VIDEO_METADATA, title="Guava talk"
        )
        assert run_linker(record, map_db, LinkerConfig()) is None

    def test_descriptor_kind_validation(self):
        with pytest.raises(ValueError):
            LinkerDescriptor(
                linker_id="bad",
                supported_source=SourceKind.MICROBLOG,
                produces=LinkKind.API,
                threshold=0.5,
            )

    def test_default_thresholds(self):
        assert DEFAULT_THRESHOLDS[SourceKind.QA_POST] == 0.5
        assert DEFAULT_THRESHOLDS[SourceKind.CODE_SNIPPET] == 0.5
        assert DEFAULT_THRESHOLDS[SourceKind.MICROBLOG] == 0.7
        assert DEFAULT_THRESHOLDS[SourceKind.CVE_ENTRY] == 0.8


class TestLinkerConfigFile:
    def test_overrides_applied(self, tmp_path, map_db):
        config_path = tmp_path / "linkers.json"
        config_path.write_text(
            json.dumps(
                {
                    "thresholds": {"microblog": 0.9},
                    "cues": ["launch"],
                    "weights": {"code": {"class_token": 0.2}},
                }
            )
        )
        config = load_linker_config(config_path)
        assert config.descriptors[SourceKind.MICROBLOG].threshold == 0.9
        assert config.cues == ("launch",)
        assert config.code_weights == CodeLinkWeights(class_token=0.2)
        # A cue outside the configured lexicon no longer helps.
        links = link_library_text(
            tweet("new guava release"),
            map_db.library_refs(),
            config.descriptors[SourceKind.MICROBLOG],
            config.text_weights,
            config.cues,
        )
        assert links == []
