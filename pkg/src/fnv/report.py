"""Diagnostic reports as text or JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .model import ERROR, WARNING, Diagnostic, sort_diagnostics


@dataclass(frozen=True)
class Report:
    tool_version: str
    subject: str
    diagnostics: tuple[Diagnostic, ...] = ()
    summary: dict = field(default_factory=dict)

    @classmethod
    def build(cls, tool_version, subject, diagnostics) -> "Report":
        diagnostics = tuple(sort_diagnostics(diagnostics))
        summary = {
            "errors": sum(d.severity == ERROR for d in diagnostics),
            "warnings": sum(d.severity == WARNING for d in diagnostics),
        }
        return cls(tool_version, subject, diagnostics, summary)

    @property
    def errors(self) -> int:
        return self.summary.get("errors", 0)


def _plural(n, word):
    return f"{n} {word}" + ("" if n == 1 else "s")


def summary_line(report: Report) -> str:
    return f"{_plural(report.summary['errors'], 'error')}, {_plural(report.summary['warnings'], 'warning')}"


def _diag_json(d: Diagnostic) -> dict:
    out = {"code": d.code, "severity": d.severity, "subject": d.subject, "message": d.message}
    if d.line is not None:
        out["line"] = d.line
        out["column"] = d.column
    return out


def render_report(report: Report, format: str = "text") -> str:
    if format == "json":
        payload = {
            "tool_version": report.tool_version,
            "subject": report.subject,
            "diagnostics": [_diag_json(d) for d in report.diagnostics],
            "summary": {"errors": report.summary["errors"], "warnings": report.summary["warnings"]},
        }
        return json.dumps(payload, ensure_ascii=False, separators=(",", ":")) + "\n"
    if format != "text":
        raise ValueError(f"unknown report format {format!r}")
    lines = [f"{d.code} {d.severity} {d.subject}: {d.message}" for d in report.diagnostics]
    lines.append(summary_line(report))
    return "\n".join(lines) + "\n"


def report_from_json(text: str) -> Report:
    data = json.loads(text)
    diagnostics = tuple(
        Diagnostic(d["code"], d["severity"], d["message"], d["subject"], d.get("line"), d.get("column"))
        for d in data["diagnostics"]
    )
    return Report(data["tool_version"], data["subject"], diagnostics, dict(data["summary"]))
