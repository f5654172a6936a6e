import json

from hypothesis import given, strategies as st

from fnv import Report, render_report
from fnv.model import Diagnostic
from fnv.report import report_from_json


def test_empty_text():
    assert render_report(Report.build("0.1.0", "x", [])) == "0 errors, 0 warnings\n"


def test_one_error_json_summary():
    r = Report.build("0.1.0", "x", [Diagnostic("R1", "error", "missing", "V:Spoiler")])
    text = render_report(r, "json")
    assert '"summary":{"errors":1,"warnings":0}' in text
    assert list(json.loads(text)) == ["tool_version", "subject", "diagnostics", "summary"]


def test_code_order():
    r = Report.build("0.1.0", "x", [
        Diagnostic("N6", "warning", "unused", "N:A.Speed"),
        Diagnostic("N1", "error", "two senders", "N:S"),
    ])
    lines = render_report(r).splitlines()
    assert lines == ["N1 error N:S: two senders", "N6 warning N:A.Speed: unused", "1 error, 1 warning"]


codes = st.sampled_from(["N1", "N6", "R1", "R4", "F3", "B2", "P0"])
diagnostics = st.builds(
    Diagnostic, codes, st.sampled_from(["error", "warning"]), st.text(max_size=20),
    st.text(max_size=10), st.one_of(st.none(), st.integers(1, 99)), st.one_of(st.none(), st.integers(1, 99)),
).filter(lambda d: (d.line is None) == (d.column is None))


@given(st.lists(diagnostics, max_size=8))
def test_json_round_trip_and_counts(ds):
    r = Report.build("0.1.0", "subj", ds)
    back = report_from_json(render_report(r, "json"))
    assert back == r
    assert r.summary["errors"] == sum(d.severity == "error" for d in r.diagnostics)
    assert r.summary["warnings"] == sum(d.severity == "warning" for d in r.diagnostics)
