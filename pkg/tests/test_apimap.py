"""API map: manifest loading, map building, and library lookup."""

import io
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apitrove.apimap import (
    ApiMapDatabase,
    build_api_map,
    load_library_manifest,
    lookup_candidates,
    lookup_library,
    manifest_from_dict,
)
from apitrove.errors import (
    DuplicateLibraryIdError,
    DuplicateSignatureError,
    ManifestSyntaxError,
)
from apitrove.model import parse_api_query

GUAVA_FQN = "com.google.common.base.Object.hashCode()"


def manifest_bytes(**overrides) -> bytes:
    doc = {
        "library_id": "guava",
        "display_name": "Guava",
        "aliases": ["google guava"],
        "ecosystem": "maven",
        "apis": [GUAVA_FQN],
    }
    doc.update(overrides)
    return json.dumps(doc).encode("utf-8")


class TestLoadManifest:
    def test_single_api_manifest(self):
        manifest = load_library_manifest(io.BytesIO(manifest_bytes()))
        assert manifest.library.library_id == "guava"
        assert [a.render() for a in manifest.apis] == [GUAVA_FQN]

    def test_zero_apis_rejected(self):
        with pytest.raises(ManifestSyntaxError):
            load_library_manifest(manifest_bytes(apis=[]))

    def test_parameter_types_parsed(self):
        manifest = load_library_manifest(
            manifest_bytes(library_id="jdk", apis=["java.io.Reader.read(char[],int,int)"])
        )
        assert manifest.apis[0].parameter_types == ("char[]", "int", "int")

    def test_duplicate_signature_rejected(self):
        with pytest.raises(DuplicateSignatureError):
            load_library_manifest(manifest_bytes(apis=[GUAVA_FQN, GUAVA_FQN]))

    def test_unqualified_signature_rejected(self):
        with pytest.raises(ManifestSyntaxError):
            load_library_manifest(manifest_bytes(apis=["hashCode()"]))

    def test_not_json_rejected(self):
        with pytest.raises(ManifestSyntaxError):
            load_library_manifest(b"library_id: guava")

    def test_missing_library_id_rejected(self):
        doc = {"apis": [GUAVA_FQN]}
        with pytest.raises(ManifestSyntaxError):
            load_library_manifest(json.dumps(doc).encode())

    def test_alias_repeating_id_rejected(self):
        with pytest.raises(ManifestSyntaxError):
            load_library_manifest(manifest_bytes(aliases=["guava"]))

    def test_accepts_str_stream(self):
        manifest = load_library_manifest(io.StringIO(manifest_bytes().decode()))
        assert manifest.library.display_name == "Guava"


def _manifest(lib_id: str, *fqns: str):
    return manifest_from_dict({"library_id": lib_id, "apis": list(fqns)})


class TestBuildApiMap:
    def test_simple_name_projection(self):
        db = build_api_map([_manifest("guava", GUAVA_FQN)])
        assert db.by_simple_name["hashCode"] == {("guava", GUAVA_FQN)}

    def test_shared_fqn_maps_to_both_libraries(self):
        db = build_api_map([_manifest("libA", "x.Y.read()"), _manifest("libB", "x.Y.read()")])
        assert db.by_fqn["x.Y.read()"] == {"libA", "libB"}

    def test_empty_input_gives_empty_map(self):
        db = build_api_map([])
        assert db.is_empty()
        assert db.by_fqn == {}

    def test_duplicate_library_id_rejected(self):
        with pytest.raises(DuplicateLibraryIdError):
            build_api_map([_manifest("guava", GUAVA_FQN), _manifest("guava", "a.B.m()")])


class TestLookupLibrary:
    def test_exact_fqn_lookup(self):
        db = build_api_map([_manifest("guava", GUAVA_FQN)])
        libs = lookup_library(parse_api_query(GUAVA_FQN), db)
        assert [l.library_id for l in libs] == ["guava"]

    def test_simple_name_fans_out_sorted(self):
        # Hand enumeration: both manifests export a read method, so the
        # simple-name query returns both libraries in slug order.
        db = build_api_map(
            [
                _manifest("libA", "x.Y.read()"),
                _manifest("jdk", "java.io.Reader.read(char[],int,int)"),
            ]
        )
        libs = lookup_library(parse_api_query("read"), db)
        assert [l.library_id for l in libs] == ["jdk", "libA"]

    def test_unknown_api_returns_empty(self):
        db = build_api_map([_manifest("guava", GUAVA_FQN)])
        assert lookup_library(parse_api_query("no.such.Cls.m()"), db) == []

    def test_empty_param_query_falls_back_to_any_arity(self):
        db = build_api_map([_manifest("jdk", "java.io.Reader.read(char[],int,int)")])
        libs = lookup_library(parse_api_query("java.io.Reader.read()"), db)
        assert [l.library_id for l in libs] == ["jdk"]

    def test_exact_match_beats_arity_fallback(self):
        db = build_api_map(
            [_manifest("libA", "x.Y.m()"), _manifest("libB", "x.Y.m(int)")]
        )
        pairs = lookup_candidates(parse_api_query("x.Y.m()"), db)
        assert pairs == [("libA", "x.Y.m()")]

    def test_mismatched_params_do_not_fall_back(self):
        db = build_api_map([_manifest("jdk", "java.io.Reader.read(char[],int,int)")])
        assert lookup_library(parse_api_query("java.io.Reader.read(long)"), db) == []

    def test_class_qualified_query_filters_by_class(self):
        db = build_api_map(
            [
                _manifest("jdk", "java.io.Reader.read(char[],int,int)"),
                _manifest("libA", "x.Y.read()"),
            ]
        )
        pairs = lookup_candidates(parse_api_query("Reader.read"), db)
        assert pairs == [("jdk", "java.io.Reader.read(char[],int,int)")]

    def test_lookup_is_order_stable(self):
        db = build_api_map(
            [_manifest("b", "x.Y.go()"), _manifest("a", "z.W.go()"), _manifest("c", "q.R.go()")]
        )
        runs = [
            [l.library_id for l in lookup_library(parse_api_query("go"), db)]
            for _ in range(5)
        ]
        assert all(run == ["a", "b", "c"] for run in runs)


_SLUG = st.from_regex(r"[a-z][a-z0-9-]{0,8}", fullmatch=True)
_FQN = st.from_regex(r"[a-z]{1,4}(\.[a-z]{1,4}){0,2}\.[A-Z][a-z]{0,4}\.[a-z]{1,6}", fullmatch=True)


@st.composite
def manifest_lists(draw):
    lib_ids = draw(st.lists(_SLUG, min_size=1, max_size=8, unique=True))
    manifests = []
    for lib_id in lib_ids:
        fqns = draw(st.lists(_FQN, min_size=1, max_size=8, unique=True))
        manifests.append(_manifest(lib_id, *(f + "()" for f in fqns)))
    return manifests


def assert_projection_invariant(db: ApiMapDatabase) -> None:
    projected = {
        (parse_api_query(fqn).method_name, lib, fqn)
        for fqn, libs in db.by_fqn.items()
        for lib in libs
    }
    flattened = {
        (name, lib, fqn)
        for name, pairs in db.by_simple_name.items()
        for lib, fqn in pairs
    }
    assert projected == flattened


@given(manifest_lists())
@settings(max_examples=50)
def test_projection_invariant(manifests):
    assert_projection_invariant(build_api_map(manifests))


@given(manifest_lists(), st.randoms())
@settings(max_examples=50)
def test_build_is_permutation_invariant(manifests, rng):
    shuffled = list(manifests)
    rng.shuffle(shuffled)
    assert build_api_map(shuffled) == build_api_map(manifests)
