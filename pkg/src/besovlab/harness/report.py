"""Check records and their JSON / CSV serialisation."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

__all__ = ["REPORT_VERSION", "FIELDS", "CheckReport", "emit_report", "render_report"]

REPORT_VERSION = "1.0"

FIELDS = (
    "check_id", "params", "lhs", "rhs", "ratio", "tolerance", "pass",
    "stderr_mc", "runtime_ms", "seed", "flags",
)


@dataclass(frozen=True)
class CheckReport:
    check_id: str
    params: str
    lhs: float
    rhs: float
    ratio: float | None
    tolerance: float
    passed: bool
    stderr_mc: float | None = None
    runtime_ms: int = 0
    seed: int = 0
    flags: tuple[str, ...] = field(default_factory=tuple)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        d["flags"] = list(self.flags)
        return {k: _clean(d[k]) for k in FIELDS}


def ratio_of(lhs: float, rhs: float) -> float | None:
    return lhs / rhs if rhs > 0 else None


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _json_text(reports, config_echo) -> str:
    doc = {
        "version": REPORT_VERSION,
        "config_echo": config_echo or {},
        "checks": [r.as_dict() for r in reports],
        "summary": {"total": len(reports), "passed": sum(r.passed for r in reports)},
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _csv_text(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for r in reports:
        d = r.as_dict()
        row = []
        for k in FIELDS:
            v = d[k]
            if k == "flags":
                v = "|".join(v)
            elif k == "pass":
                v = "true" if v else "false"
            elif v is None:
                v = ""
            elif isinstance(v, float):
                v = repr(v)
            row.append(v)
        w.writerow(row)
    return buf.getvalue()


def render_report(reports, fmt: str = "json", config_echo: dict | None = None) -> str:
    fmt = fmt.lower()
    if fmt == "json":
        return _json_text(reports, config_echo)
    if fmt == "csv":
        return _csv_text(reports)
    raise ValueError(f"unknown report format {fmt!r}; use json or csv")


def emit_report(reports, fmt: str, path: str, config_echo: dict | None = None) -> None:
    """Write the report; ``path='-'`` writes to stdout."""
    text = render_report(reports, fmt, config_echo)
    if path == "-":
        import sys

        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
