import json
import shutil

import pytest

from twistsheaf.corpus import (
    TAGS, CorpusError, cases_dir, diff, load_cases, regenerate, verify_all,
)


def test_every_case_passes():
    summary = verify_all()
    assert summary.ok, json.dumps(summary.to_json(), indent=1)
    assert len(summary.outcomes) >= 20


def test_every_value_is_tagged():
    for case in load_cases():
        for entry in case.expected:
            assert entry["provenance"]["tag"] in TAGS


def test_required_cases_present():
    names = {c.name for c in load_cases()}
    assert {"cusp-5-6-mult-ideal", "ssheaf-trivial-floor", "tate-metric-e-minus-pi"} <= names


def test_derived_values_regenerate():
    for case in load_cases():
        regen = regenerate(case)
        for entry in case.expected:
            if entry["provenance"]["tag"] == "DERIVED":
                assert not diff(entry["value"], regen[entry["path"]], entry.get("tolerance", 1e-9))


@pytest.fixture
def corpus_copy(tmp_path):
    for p in cases_dir().glob("*.json"):
        shutil.copy(p, tmp_path / p.name)
    return tmp_path


def test_untagged_value_rejected(corpus_copy):
    path = corpus_copy / "cusp-resolve.json"
    data = json.loads(path.read_text())
    del data["expected"][0]["provenance"]
    path.write_text(json.dumps(data))
    with pytest.raises(CorpusError):
        load_cases(corpus_copy)


def test_drift_is_reported_structurally(corpus_copy):
    path = corpus_copy / "cusp-5-6-mult-ideal.json"
    data = json.loads(path.read_text())
    data["expected"][0]["value"] = [[0, 0]]
    path.write_text(json.dumps(data))
    summary = verify_all(corpus_copy)
    bad = {o.name: o for o in summary.outcomes if not o.ok}
    assert set(bad) == {"cusp-5-6-mult-ideal"}
    sources = {d["source"] for d in bad["cusp-5-6-mult-ideal"].drift}
    assert sources == {"implementation", "oracle"}


def test_diff_tolerances():
    assert diff({"a": [1.0, 2]}, {"a": [1.0 + 1e-12, 2]}, 1e-9) == []
    assert diff([1, 2], [1, 2, 3], 0)[0]["at"] == "/"
    assert diff({"a": 1}, {"b": 1}, 0)
    assert diff(True, 1, 0)
