"""Reports: deterministic metrics documents with a reproducibility digest.

A report is JSON-serializable and carries four blocks: ``config`` (echo of
what ran), ``provenance`` (digests and seeds of inputs), ``metrics`` (the
numbers), and ``runtime`` (wall-clock seconds).  The report digest covers
everything except ``runtime``, so two runs of the same experiment match
digests even though they never take exactly the same time.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DatasetError

__all__ = ["Report", "emit_report", "load_report"]

REPORT_VERSION = 1


def _jsonable(value):
    """Recursively convert numpy scalars/arrays and tuples for JSON."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


@dataclass(frozen=True)
class Report:
    """One run's outcome."""

    kind: str
    config: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    runtime: dict = field(default_factory=dict)
    version: int = REPORT_VERSION

    def digested_content(self) -> dict:
        """Everything the digest covers (runtime excluded)."""
        return {
            "version": self.version,
            "kind": self.kind,
            "config": _jsonable(self.config),
            "provenance": _jsonable(self.provenance),
            "metrics": _jsonable(self.metrics),
        }

    def digest(self) -> str:
        blob = json.dumps(self.digested_content(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def to_json_dict(self) -> dict:
        data = self.digested_content()
        data["runtime"] = _jsonable(self.runtime)
        data["digest"] = self.digest()
        return data


def _write_text_summary(report: Report, path: Path) -> None:
    lines = [f"kind: {report.kind}", f"digest: {report.digest()}", ""]
    for block in ("config", "provenance", "metrics", "runtime"):
        data = getattr(report, block)
        if not data:
            continue
        lines.append(f"[{block}]")
        for key in sorted(data):
            value = _jsonable(data[key])
            if isinstance(value, list) and value and isinstance(value[0], (list, dict)):
                lines.append(f"{key} = <{len(value)} rows; see CSV>")
            else:
                lines.append(f"{key} = {value}")
        lines.append("")
    path.write_text("\n".join(lines))


def _write_csvs(report: Report, out_dir: Path, basename: str) -> list[Path]:
    written = []
    metrics = report.metrics
    if "confusion" in metrics:
        path = out_dir / f"{basename}_confusion.csv"
        matrix = np.asarray(metrics["confusion"])
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["true\\pred"] + list(range(matrix.shape[1])))
            for i, row in enumerate(matrix):
                writer.writerow([i] + [int(v) for v in row])
        written.append(path)
    if "history" in metrics:
        rows = metrics["history"]
        if rows:
            path = out_dir / f"{basename}_history.csv"
            keys = list(rows[0])
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(keys)
                for row in rows:
                    writer.writerow([row.get(k, "") for k in keys])
            written.append(path)
    if "per_distance" in metrics:
        rows = metrics["per_distance"]
        if rows:
            path = out_dir / f"{basename}_sweep.csv"
            keys = [k for k in rows[0] if k != "per_char"]
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(keys)
                for row in rows:
                    writer.writerow([row.get(k, "") for k in keys])
            written.append(path)
    return written


def emit_report(report: Report, out_dir: str | Path, basename: str = "report") -> Path:
    """Write the JSON report plus a text summary and CSV side tables.

    Returns the JSON path.  The JSON embeds the digest; reloading verifies
    it, so a hand-edited report is rejected rather than trusted.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / f"{basename}.json"
    json_path.write_text(json.dumps(report.to_json_dict(), sort_keys=True, indent=2) + "\n")
    _write_text_summary(report, out_dir / f"{basename}.txt")
    _write_csvs(report, out_dir, basename)
    return json_path


def load_report(path: str | Path) -> Report:
    """Read a JSON report back, verifying its embedded digest."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DatasetError(f"report is not valid JSON: {exc}") from exc
    try:
        report = Report(
            kind=data["kind"],
            config=data.get("config", {}),
            provenance=data.get("provenance", {}),
            metrics=data.get("metrics", {}),
            runtime=data.get("runtime", {}),
            version=data["version"],
        )
        claimed = data["digest"]
    except KeyError as exc:
        raise DatasetError(f"report misses field {exc}") from exc
    if report.version != REPORT_VERSION:
        raise DatasetError(f"unsupported report version {report.version!r}")
    if report.digest() != claimed:
        raise DatasetError(f"report digest mismatch in {path}")
    return report
