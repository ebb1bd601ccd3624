"""Self-describing tabular results written as CSV or JSON."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

from . import __version__

__all__ = ["SCHEMA_VERSION", "SweepResult"]

SCHEMA_VERSION = 1


def _cell(v):
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


@dataclass
class SweepResult:
    """Rows of named columns plus metadata echoed as ``#`` comment lines in CSV."""

    columns: list
    rows: list = field(default_factory=list)
    command: str = ""
    seed: int | None = None
    timestamp: bool = True

    def add(self, **values) -> None:
        missing = set(self.columns) - set(values)
        if missing:
            raise KeyError(f"missing columns: {sorted(missing)}")
        self.rows.append({k: values[k] for k in self.columns})

    def meta(self) -> dict:
        m = {
            "schema_version": SCHEMA_VERSION,
            "tool": f"shape4d {__version__}",
            "command": self.command,
            "seed": self.seed,
        }
        if self.timestamp:
            m["generated"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return m

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.meta().items():
            buf.write(f"# {k}: {v}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_cell(r[c]) for c in self.columns])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"meta": self.meta(), "columns": list(self.columns), "rows": self.rows}
        return json.dumps(doc, indent=2, default=float) + "\n"

    def render(self, fmt: str = "csv") -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown output format {fmt!r}")
