#!/usr/bin/env python3
"""Run reports for verify / obstruct / classify, as JSON or CSV."""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

logger = logging.getLogger(__name__)

PURE_VERIFIED = "PURE_VERIFIED"
OBSTRUCTED_VERIFIED = "OBSTRUCTED_VERIFIED"
EXTERNAL_CITATION = "EXTERNAL_CITATION"
MISMATCH = "MISMATCH"
VERIFIED_STATUSES = (PURE_VERIFIED, OBSTRUCTED_VERIFIED, EXTERNAL_CITATION, MISMATCH)

SCHEMA_VERSION = 1

CSV_FIELDS = [
    "name", "parameter", "status_claimed", "status_verified", "method",
    "lambda", "su3_valid", "cond1", "cond2", "cond3", "phi_positive",
    "certificate", "detail", "seconds",
]


@dataclass
class ReportEntry:
    name: str
    status_claimed: str
    status_verified: str
    parameter: str | None = None
    flags: dict[str, bool] = field(default_factory=dict)
    lambda_value: str | None = None
    method: str | None = None
    certificate: str | None = None
    detail: str = ""
    seconds: float | None = None

    def __post_init__(self):
        if self.status_verified not in VERIFIED_STATUSES:
            raise ValueError(f"unknown verified status {self.status_verified!r}")

    @property
    def label(self) -> str:
        return self.name if self.parameter is None else f"{self.name}({self.parameter})"

    def to_dict(self, canonical: bool = False) -> dict:
        data = asdict(self)
        if canonical:
            data.pop("seconds")
        return data


@dataclass
class RunReport:
    command: str
    entries: list[ReportEntry] = field(default_factory=list)
    searches: list[ReportEntry] = field(default_factory=list)

    def add(self, entry: ReportEntry) -> None:
        self.entries.append(entry)

    def summary(self) -> dict[str, int]:
        counts = {status: 0 for status in VERIFIED_STATUSES}
        for entry in self.entries:
            counts[entry.status_verified] += 1
        return counts

    @property
    def mismatches(self) -> list[ReportEntry]:
        return [e for e in self.entries if e.status_verified == MISMATCH]

    @property
    def exit_status(self) -> int:
        return 1 if self.mismatches else 0

    def to_dict(self, canonical: bool = False) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "entries": [e.to_dict(canonical) for e in self.entries],
            "searches": [e.to_dict(canonical) for e in self.searches],
            "summary": self.summary(),
            "exit_status": self.exit_status,
        }

    def to_json(self, canonical: bool = False) -> str:
        return json.dumps(self.to_dict(canonical), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for e in self.entries:
            row = {
                "name": e.name,
                "parameter": e.parameter or "",
                "status_claimed": e.status_claimed,
                "status_verified": e.status_verified,
                "method": e.method or "",
                "lambda": e.lambda_value or "",
                "certificate": e.certificate or "",
                "detail": e.detail,
                "seconds": "" if e.seconds is None else f"{e.seconds:.3f}",
            }
            for flag in ("su3_valid", "cond1", "cond2", "cond3", "phi_positive"):
                row[flag] = "" if flag not in e.flags else int(e.flags[flag])
            writer.writerow(row)
        return buffer.getvalue()


def parse_report(text: str) -> RunReport:
    """Read a report produced by RunReport.to_json."""
    data = json.loads(text)
    if data.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema {data.get('schema')!r}")

    def entry(raw: dict) -> ReportEntry:
        return ReportEntry(**{k: v for k, v in raw.items() if k in ReportEntry.__dataclass_fields__})

    return RunReport(
        command=data["command"],
        entries=[entry(e) for e in data["entries"]],
        searches=[entry(e) for e in data.get("searches", [])],
    )


def export_report(report: RunReport, fmt: str = "json", output_path: str | None = None, canonical: bool = False) -> str:
    """Write the report to output_path (or return it) in json or csv."""
    text = report.to_csv() if fmt == "csv" else report.to_json(canonical) + "\n"
    if output_path:
        Path(output_path).write_text(text)
        logger.info("report written to %s", output_path)
    return text


def format_table(report: RunReport) -> str:
    """Plain-text summary, one line per entry."""
    lines = []
    width = max((len(e.label) for e in report.entries + report.searches), default=4)
    for e in report.entries:
        extra = f"  [{e.method}]" if e.method else ""
        lines.append(f"  {e.label:<{width}}  {e.status_verified:<20}{extra}")
        if e.status_verified == MISMATCH and e.detail:
            lines.append(f"  {'':<{width}}  {e.detail}")
    if report.searches:
        lines.append("")
        lines.append("Searches (no effect on exit status):")
        for e in report.searches:
            lines.append(f"  {e.label:<{width}}  {e.detail}")
    lines.append("")
    counts = report.summary()
    lines.append("Summary: " + ", ".join(f"{k}={v}" for k, v in counts.items() if v))
    return "\n".join(lines)
