"""Machine-readable run reports: deterministic JSON and CSV emission.

A run aggregates named checks into one document.  Identical configuration
and tool version must produce byte-identical documents, so serialization
sorts every key, orders rows by index, and writes the wall-time field as 0
(the measured times are kept in memory for the human summary only; a
genuine timing in the canonical file would defeat reproducibility audits).
Default file names carry a content hash of the configuration, and existing
reports are never silently replaced by different bytes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from ._version import __version__
from .outcomes import CheckReport, Outcome

#: index column names per check-name prefix (fixed CSV headers per check type)
_INDEX_COLUMNS = (
    ("ckn-bound", ("k", "n")),
    ("ckn-oracle", ("k", "n")),
    ("root-series-magnitude", ("p", "i")),
    ("root-series-bound", ("k", "n")),
    ("factorial-inequality", ("p", "n", "k")),
    ("diag-derivative", ("p", "k", "n", "x")),
    ("substitution-assembly", ("n", "k", "x")),
    ("substitution-coefficients", ("n",)),
    ("transform-quasianalytic", ("n",)),
    ("quasianalytic", ("n",)),
    ("log-convex", ("n",)),
    ("monotone", ("n",)),
    ("derivation-closed", ("n",)),
    ("inclusion", ("n",)),
    ("bang-lower-bounds", ("n",)),
    ("bang-membership", ("n",)),
    ("bang-sharpness", ("n",)),
    ("seq-show", ("n",)),
    ("transform-values", ("n",)),
)


def index_columns_for(name: str) -> tuple[str, ...]:
    for prefix, cols in _INDEX_COLUMNS:
        if name.startswith(prefix):
            return cols
    return ("i0",)


@dataclass
class CheckResult:
    """One executed check plus run metadata."""

    report: CheckReport
    ms: float = 0.0
    certificate: dict | None = None


@dataclass
class RunReport:
    """Aggregate of an invocation: config echo plus every check result, in
    execution order.  No result is ever dropped from the aggregate."""

    config: dict
    checks: list[CheckResult] = field(default_factory=list)
    tool_version: str = __version__

    def add(self, report: CheckReport, ms: float = 0.0, certificate: dict | None = None) -> None:
        self.checks.append(CheckResult(report=report, ms=ms, certificate=certificate))

    def outcomes(self) -> list[Outcome]:
        return [c.report.verdict.outcome for c in self.checks]

    def exit_code(self) -> int:
        """0 all confirmed; 1 any refuted; 2 any inconclusive, none refuted."""
        outs = self.outcomes()
        if any(o is Outcome.REFUTED for o in outs):
            return 1
        if any(o is Outcome.INCONCLUSIVE for o in outs):
            return 2
        return 0

    # -- serialization -----------------------------------------------------

    def as_dict(self) -> dict:
        return {
            "tool_version": self.tool_version,
            "config": self.config,
            "checks": [
                {
                    "name": c.report.name,
                    "claim": c.report.claim,
                    "params": {k: v for k, v in c.report.params},
                    "verdict": c.report.verdict.as_dict(),
                    "evidence": [r.as_dict() for r in c.report.rows],
                    "certificate": c.certificate,
                    # measured time lives in the human summary only;
                    # the canonical document must be byte-reproducible
                    "ms": 0,
                }
                for c in self.checks
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"

    def config_hash(self) -> str:
        payload = json.dumps(
            {"config": self.config, "tool_version": self.tool_version},
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]

    def summary_lines(self) -> list[str]:
        lines = []
        for c in self.checks:
            lines.append(
                f"[{c.report.verdict.outcome.value:<12}] {c.report.name} "
                f"(rows={len(c.report.rows)}, {c.ms:.0f} ms)"
            )
        return lines


#: fixed column layouts demanded by the documented file formats; anything
#: not listed falls back to index + lo/hi/verdict/note + sorted extras
_SPECIAL_SCHEMAS = (
    ("ckn-bound", ("k", "n", "c_num", "c_den", "bound_upper", "verdict")),
    (
        "bang-",
        ("n", "lower_bound_log", "value_log_lo", "value_log_hi", "ceiling_log", "verdict"),
    ),
)


def _row_mapping(report: CheckReport, row) -> dict[str, str]:
    idx_cols = index_columns_for(report.name)
    mapping = {name: str(v) for name, v in zip(idx_cols, row.index)}
    mapping.update(
        {
            "lo": row.lo,
            "hi": row.hi,
            "value_log_lo": row.lo,
            "value_log_hi": row.hi,
            "bound_upper": row.hi,
            "verdict": row.outcome.value if row.outcome else "",
            "note": row.note,
        }
    )
    for key, value in row.extra:
        mapping[key] = value
    return mapping


def check_to_csv(report: CheckReport) -> str:
    """Fixed-header CSV for one check.

    Checks with a documented file format use its exact column set; others
    use index columns, the enclosure columns, verdict, note, and the
    check's extra columns in sorted order.
    """
    headers: list[str] | None = None
    for prefix, cols in _SPECIAL_SCHEMAS:
        if report.name.startswith(prefix):
            headers = list(cols)
            break
    if headers is None:
        idx_cols = index_columns_for(report.name)
        extra_keys = sorted({k for row in report.rows for k, _ in row.extra})
        headers = list(idx_cols) + ["lo", "hi", "verdict", "note"] + extra_keys
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["# check", report.name])
    writer.writerow(["# claim", report.claim])
    writer.writerow(["# verdict", report.verdict.outcome.value, report.verdict.reason.value])
    for key, value in report.params:
        writer.writerow(["# param", key, value])
    writer.writerow(headers)
    for row in report.rows:
        mapping = _row_mapping(report, row)
        writer.writerow([mapping.get(h, "") for h in headers])
    return buf.getvalue()


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name).strip("_")


def write_report(run: RunReport, out: str | None, fmt: str) -> list[Path]:
    """Write the run document.

    JSON: a single document (default name ``report-<confighash>.json`` under
    the ``out`` directory when ``out`` is a directory or missing).  CSV: one
    fixed-header file per check plus a summary table, under a directory.
    Existing files are only acceptable when byte-identical (append-only
    audit contract); conflicting content raises ``FileExistsError``.
    """
    written: list[Path] = []
    if fmt == "json":
        text = run.to_json()
        if out is None:
            target = Path("reports") / f"report-{run.config_hash()}.json"
        else:
            target = Path(out)
            if target.suffix != ".json":
                target = target / f"report-{run.config_hash()}.json"
        _write_once(target, text)
        written.append(target)
        return written
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    base = Path(out) if out is not None else Path("reports") / f"report-{run.config_hash()}"
    if base.suffix == ".csv":
        if len(run.checks) != 1:
            raise ValueError("single .csv output requires exactly one check; pass a directory")
        _write_once(base, check_to_csv(run.checks[0].report))
        return [base]
    base.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["check", "claim", "verdict", "reason", "rows", "ms"])
    for i, c in enumerate(run.checks):
        writer.writerow(
            [
                c.report.name,
                c.report.claim,
                c.report.verdict.outcome.value,
                c.report.verdict.reason.value,
                str(len(c.report.rows)),
                "0",
            ]
        )
        per_check = base / f"{i:02d}__{_slug(c.report.name)}.csv"
        _write_once(per_check, check_to_csv(c.report))
        written.append(per_check)
    summary = base / "summary.csv"
    _write_once(summary, buf.getvalue())
    written.append(summary)
    return written


def _write_once(target: Path, text: str) -> None:
    target.parent.mkdir(parents=True, exist_ok=True)
    if target.exists():
        existing = target.read_text(encoding="utf-8")
        if existing == text:
            return
        raise FileExistsError(
            f"{target} exists with different content; reports are append-only"
        )
    target.write_text(text, encoding="utf-8")
