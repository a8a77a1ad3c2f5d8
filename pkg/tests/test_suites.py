import json

import jsonschema
import pytest

from mintime.cli import REPORT_SCHEMA
from mintime.errors import UnknownTheorem
from mintime.suites import THEOREMS, default_subjects, run_theorem_suite


@pytest.mark.parametrize("theorem", THEOREMS)
def test_report_matches_schema(theorem):
    rep = run_theorem_suite(theorem, default_subjects(theorem, 2, 2), seed=2)
    doc = json.loads(json.dumps(rep.to_json()))
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["theorem"] == theorem
    assert rep.summary()["queries"] == len(rep.records) > 0


def test_reports_are_deterministic():
    a = run_theorem_suite("cor5.3", default_subjects("cor5.3", 4, 2), seed=4)
    b = run_theorem_suite("cor5.3", default_subjects("cor5.3", 4, 2), seed=4)
    assert json.dumps(a.to_json(), sort_keys=True) == json.dumps(b.to_json(), sort_keys=True)


def test_thread_count_does_not_change_report(monkeypatch):
    subjects = default_subjects("prop4.2", 5, 3)
    monkeypatch.setenv("MINTIME_THREADS", "1")
    serial = run_theorem_suite("prop4.2", subjects, seed=5).to_json()
    monkeypatch.setenv("MINTIME_THREADS", "3")
    threaded = run_theorem_suite("prop4.2", subjects, seed=5).to_json()
    assert serial == threaded


def test_unknown_theorem():
    with pytest.raises(UnknownTheorem):
        run_theorem_suite("thm9.9", [])
