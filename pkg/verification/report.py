"""
Verification Reports

Case records of a sweep, the per-suite summary and the JSON/text renderings.
Values are CycNum JSON so that two runs of one sweep give identical reports;
timings are the only run-dependent fields and are left out of the hash.
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

import config
from cyclo.number import CycNum


logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
ERROR = "error"
BUDGET = "budget"
STATUSES = (PASS, FAIL, ERROR, BUDGET)


def to_jsonable(value: Any) -> Any:
    """CycNum, Fraction and nested containers as JSON-ready data."""
    if isinstance(value, CycNum):
        return value.to_json()
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


@dataclass
class CaseRecord:
    """
    Outcome of one verification case.

    Attributes:
        case_id (str): Stable key, e.g. "zw/p3-inert/chi=c1.0/alpha=zeta3/psi=2"
        suite (str): Suite name
        inputs (Dict[str, Any]): Labels of the case inputs
        status (str): One of STATUSES
        lhs (Any): Computed side (JSON)
        rhs (Any): Expected side (JSON)
        note (str): Exception text or extra detail
        seconds (float): Wall time of the case
    """
    case_id: str
    suite: str
    inputs: Dict[str, Any]
    status: str
    lhs: Any = None
    rhs: Any = None
    note: str = ""
    seconds: float = 0.0

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        data = {"id": self.case_id, "suite": self.suite, "inputs": self.inputs,
                "status": self.status, "lhs": self.lhs, "rhs": self.rhs, "note": self.note}
        if include_timing:
            data["seconds"] = round(self.seconds, 6)
        return data


@dataclass
class Report:
    """
    All case records of a run with the sweep that produced them.

    Attributes:
        spec (Dict[str, Any]): The sweep specification as a dict
        records (List[CaseRecord]): Records sorted by case id
    """
    spec: Dict[str, Any]
    records: List[CaseRecord] = field(default_factory=list)

    def __post_init__(self):
        self.records = sorted(self.records, key=lambda r: r.case_id)

    @property
    def passed(self) -> bool:
        """True when no case failed or raised; budget skips do not count."""
        return all(r.status in (PASS, BUDGET) for r in self.records)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def counts(self) -> Dict[str, Dict[str, int]]:
        """Status counts per suite (timing-free)."""
        counts: Dict[str, Dict[str, int]] = {}
        for r in self.records:
            suite = counts.setdefault(r.suite, {s: 0 for s in STATUSES})
            suite[r.status] += 1
        return {k: counts[k] for k in sorted(counts)}

    def summary(self) -> Dict[str, Dict[str, Any]]:
        """
        Status counts and timing statistics per suite.

        Returns:
            {suite: {"cases", "pass", "fail", "error", "budget",
                     "mean_seconds", "max_seconds", "p90_seconds"}}
        """
        summary = {}
        for suite, counts in self.counts().items():
            times = np.array([r.seconds for r in self.records if r.suite == suite])
            summary[suite] = {"cases": int(times.size), **counts,
                              "mean_seconds": float(np.mean(times)),
                              "max_seconds": float(np.max(times)),
                              "p90_seconds": float(np.percentile(times, 90))}
        return summary

    def _hashed_part(self) -> Dict[str, Any]:
        return {"artifact": {"name": config.ARTIFACT_NAME, "version": config.ARTIFACT_VERSION},
                "spec": self.spec, "counts": self.counts(),
                "cases": [r.to_dict(include_timing=False) for r in self.records]}

    def digest(self) -> str:
        """sha256 of the report without timing fields."""
        text = json.dumps(self._hashed_part(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def to_dict(self) -> Dict[str, Any]:
        data = self._hashed_part()
        data["summary"] = self.summary()
        data["cases"] = [r.to_dict() for r in self.records]
        data["passed"] = self.passed
        data["sha256"] = self.digest()
        return data

    def write(self, output_file: str) -> None:
        """Write the JSON report, creating parent directories."""
        path = Path(output_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")
        logger.info(f"Report written to {path} ({len(self.records)} cases)")

    def format_text(self) -> str:
        """Human-readable summary with failing cases listed."""
        lines = ["=" * 80, f"    {config.ARTIFACT_NAME} {config.ARTIFACT_VERSION} VERIFICATION REPORT",
                 "=" * 80, ""]
        if not self.records:
            lines.append("No cases.")
        for suite, s in self.summary().items():
            lines.append(f"{suite:<18} {s['pass']:>6} pass {s['fail']:>4} fail "
                         f"{s['error']:>4} error {s['budget']:>4} budget   "
                         f"mean {s['mean_seconds']:.4f}s  p90 {s['p90_seconds']:.4f}s  "
                         f"max {s['max_seconds']:.4f}s")
        bad = [r for r in self.records if r.status in (FAIL, ERROR)]
        if bad:
            lines.append("")
            lines.append("FAILURES")
            lines.append("-" * 80)
            for r in bad:
                lines.append(f"[{r.status}] {r.case_id}" + (f": {r.note}" if r.note else ""))
        lines.append("")
        lines.append(f"Result: {'PASS' if self.passed else 'FAIL'}   sha256 {self.digest()}")
        lines.append("=" * 80)
        return "\n".join(lines)


def load_report(path: str) -> Dict[str, Any]:
    """Read a JSON report written by Report.write."""
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def failing_ids(report_data: Dict[str, Any], statuses: Optional[List[str]] = None) -> List[str]:
    """Case ids of a loaded report with the given statuses (fail and error by default)."""
    wanted = statuses or [FAIL, ERROR]
    return [case["id"] for case in report_data.get("cases", []) if case["status"] in wanted]
