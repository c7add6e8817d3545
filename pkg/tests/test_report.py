import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lingaudit.report import (
    canonical_json,
    render_markdown,
    write_bytes_atomic,
    write_report_csvs,
    write_text_atomic,
)

json_scalars = st.one_of(
    st.none(),
    st.booleans(),
    st.integers(min_value=-(2**53), max_value=2**53),
    st.floats(allow_nan=False, allow_infinity=False),
    st.text(max_size=30),
)
json_values = st.recursive(
    json_scalars,
    lambda children: st.one_of(
        st.lists(children, max_size=5),
        st.dictionaries(st.text(max_size=10), children, max_size=5),
    ),
    max_leaves=25,
)


class TestCanonicalJson:
    def test_keys_sorted(self):
        assert canonical_json({"b": 1, "a": 2}) == '{"a":2,"b":1}\n'

    def test_compact_separators_and_trailing_newline(self):
        out = canonical_json({"a": [1, 2], "b": "x"})
        assert out == '{"a":[1,2],"b":"x"}\n'

    def test_floats_use_17_digits(self):
        assert canonical_json(0.1) == "0.10000000000000001\n"
        assert canonical_json(1.5) == "1.5\n"

    def test_ints_stay_bare(self):
        assert canonical_json(7) == "7\n"
        assert canonical_json(True) == "true\n"
        assert canonical_json(None) == "null\n"

    def test_non_ascii_escaped(self):
        assert "\\u" in canonical_json({"k": "café"})

    def test_nan_rejected(self):
        with pytest.raises(ValueError, match="non-finite"):
            canonical_json({"x": float("nan")})
        with pytest.raises(ValueError, match="non-finite"):
            canonical_json([float("inf")])

    def test_non_string_key_rejected(self):
        with pytest.raises(TypeError, match="non-string report key"):
            canonical_json({1: "x"})

    def test_unserializable_rejected(self):
        with pytest.raises(TypeError, match="unserializable"):
            canonical_json({"x": object()})

    @given(value=json_values)
    @settings(max_examples=300, deadline=None)
    def test_round_trips_through_json(self, value):
        text = canonical_json(value)
        assert text.endswith("\n")
        back = json.loads(text)
        assert self.equivalent(value, back)

    @given(value=json_values)
    @settings(max_examples=150, deadline=None)
    def test_deterministic(self, value):
        assert canonical_json(value) == canonical_json(value)

    @classmethod
    def equivalent(cls, a, b) -> bool:
        if isinstance(a, bool) or isinstance(b, bool):
            return a is b if isinstance(a, bool) and isinstance(b, bool) else False
        if isinstance(a, float) or isinstance(b, float):
            return (
                isinstance(a, (int, float))
                and isinstance(b, (int, float))
                and math.isclose(float(a), float(b), rel_tol=0, abs_tol=0)
            )
        if isinstance(a, dict):
            return (
                isinstance(b, dict)
                and set(a) == set(b)
                and all(cls.equivalent(a[k], b[k]) for k in a)
            )
        if isinstance(a, list):
            return (
                isinstance(b, list)
                and len(a) == len(b)
                and all(cls.equivalent(x, y) for x, y in zip(a, b))
            )
        return a == b


class TestAtomicWrites:
    def test_creates_and_replaces(self, tmp_path):
        target = tmp_path / "out.txt"
        write_text_atomic(target, "first\n")
        assert target.read_text() == "first\n"
        write_text_atomic(target, "second\n")
        assert target.read_text() == "second\n"
        leftovers = [p for p in tmp_path.iterdir() if p != target]
        assert leftovers == []

    def test_bytes_variant(self, tmp_path):
        target = tmp_path / "out.bin"
        write_bytes_atomic(target, b"\x00\x01")
        assert target.read_bytes() == b"\x00\x01"


@pytest.fixture(scope="module")
def full_report(tmp_path_factory):
    from conftest import build_bundle
    from test_engine import load_bundle
    from lingaudit.engine import run_audit
    from lingaudit.sampling import SamplingPlan

    paths = build_bundle(tmp_path_factory.mktemp("report_bundle"))
    corpus, annotations = load_bundle(paths)
    return run_audit(corpus, annotations, SamplingPlan(sample_size=50, trials=2, seed=7))


class TestRenderMarkdown:
    def test_sections_present(self, full_report):
        text = render_markdown(full_report)
        assert "bundle" in text
        assert "ROUGE-L" in text or "rouge" in text.lower()
        assert "Components for 95% variance" in text
        assert "## Structure" in text
        # Notes render only when present; the full bundle has nothing to note.
        assert "## Notes" not in text

    def test_rare_patterns_fold_into_other_row(self, full_report):
        report = json.loads(canonical_json(full_report))
        report["structural"]["pos_patterns"] = [
            {"pattern": "VERB NOUN", "count": 995, "frequency": 0.995, "exemplar": "go home"},
            {"pattern": "VERB ADV", "count": 3, "frequency": 0.003, "exemplar": "go fast"},
            {"pattern": "NOUN", "count": 2, "frequency": 0.002, "exemplar": "cup"},
        ]
        text = render_markdown(report)
        assert "| other | 0.5 | — |" in text
        assert "VERB ADV" not in text

    def test_skipped_sections_render_as_markers(self):
        from conftest import corpus_from_texts
        from lingaudit.engine import AnnotationBundle, run_audit
        from lingaudit.sampling import SamplingPlan

        corpus = corpus_from_texts(["go left now", "stop there"], "bare")
        report = run_audit(corpus, AnnotationBundle(), SamplingPlan())
        text = render_markdown(report)
        assert "skipped:" in text


class TestReportCsvs:
    def test_full_bundle_writes_all_sections(self, full_report, tmp_path):
        written = write_report_csvs(full_report, tmp_path)
        names = {p.name for p in written.values()}
        assert {
            "length_histogram.csv",
            "pos_patterns.csv",
            "verb_objects.csv",
            "adverbial_profile.csv",
            "numeric_profile.csv",
            "structures.csv",
        } <= names
        histogram = (tmp_path / "length_histogram.csv").read_text().strip().split("\n")
        assert histogram[0] == "length,count"
        total = sum(int(line.split(",")[1]) for line in histogram[1:])
        assert total == full_report["stats"]["n_sentences"]

    def test_pos_csv_keeps_the_full_tail(self, full_report, tmp_path):
        report = json.loads(canonical_json(full_report))
        report["structural"]["pos_patterns"] = [
            {"pattern": "VERB NOUN", "count": 995, "frequency": 0.995, "exemplar": "go home"},
            {"pattern": "NOUN", "count": 2, "frequency": 0.002, "exemplar": "cup"},
        ]
        write_report_csvs(report, tmp_path)
        text = (tmp_path / "pos_patterns.csv").read_text()
        assert "VERB NOUN" in text
        assert "NOUN" in text and "other" not in text

    def test_skipped_sections_write_no_file(self, tmp_path):
        from conftest import corpus_from_texts
        from lingaudit.engine import AnnotationBundle, run_audit
        from lingaudit.sampling import SamplingPlan

        corpus = corpus_from_texts(["go left now", "stop there"], "bare")
        report = run_audit(corpus, AnnotationBundle(), SamplingPlan())
        write_report_csvs(report, tmp_path)
        assert not (tmp_path / "pos_patterns.csv").exists()
        assert not (tmp_path / "verb_objects.csv").exists()
        assert (tmp_path / "length_histogram.csv").exists()
        assert (tmp_path / "structures.csv").exists()
