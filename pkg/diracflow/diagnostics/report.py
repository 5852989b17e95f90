import json
import math
import os
from typing import Dict, List, NamedTuple, Sequence

import numpy as np

from diracflow.common.logger import Logger


class Check(NamedTuple):
    """
    One quantitative claim evaluated on a run

    :param name: Short identifier
    :param residual: Measured deviation (nan when not measurable)
    :param tolerance: Largest accepted residual
    :param anchor: Statement the check encodes
    :param skipped: True when the check is vacuous for this run
    :param detail: Free text, e.g. the measured value or the offending time
    """

    name: str
    residual: float
    tolerance: float
    anchor: str = ""
    skipped: bool = False
    detail: str = ""

    @property
    def passed(self) -> bool:
        if self.skipped:
            return True
        return bool(self.residual <= self.tolerance)

    @property
    def verdict(self) -> str:
        if self.skipped:
            return "skip"
        return "pass" if self.passed else "fail"


def make_check(name: str, residual: float, tolerance: float, anchor: str = "", detail: str = "") -> Check:
    residual = float(residual)
    if math.isnan(residual):
        residual = math.inf
    return Check(name, residual, float(tolerance), anchor, False, detail)


def skipped_check(name: str, anchor: str = "", detail: str = "") -> Check:
    return Check(name, 0.0, 0.0, anchor, True, detail)


class DiagnosticsReport:
    """
    Checks plus the time series they were computed from

    :param checks: Evaluated checks
    :param series: Name to (times, values) pairs
    """

    def __init__(self, checks: Sequence[Check] = (), series: Dict = None):
        self.checks: List[Check] = list(checks)
        self.series: Dict[str, tuple] = {} if series is None else dict(series)

    def add(self, check: Check) -> "DiagnosticsReport":
        self.checks.append(check)
        return self

    def add_series(self, name: str, times: np.ndarray, values: np.ndarray) -> "DiagnosticsReport":
        self.series[name] = (np.asarray(times, dtype=float), np.asarray(values))
        return self

    def merge(self, other: "DiagnosticsReport") -> "DiagnosticsReport":
        self.checks.extend(other.checks)
        self.series.update(other.series)
        return self

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[Check]:
        return [check for check in self.checks if not check.passed]

    def get(self, name: str) -> Check:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def to_json(self, header: str = None) -> Dict:
        doc = {
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "residual": c.residual if math.isfinite(c.residual) else None,
                    "tolerance": c.tolerance,
                    "verdict": c.verdict,
                    "anchor": c.anchor,
                    "detail": c.detail,
                }
                for c in self.checks
            ],
        }
        if header is not None:
            doc["provenance"] = header
        return doc

    def to_text(self) -> str:
        rows = [("check", "residual", "tolerance", "verdict")]
        for c in self.checks:
            rows.append(
                (c.name, "{:.3e}".format(c.residual), "{:.1e}".format(c.tolerance), c.verdict)
            )
        widths = [max(len(row[i]) for row in rows) for i in range(4)]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
        lines.append("{} of {} checks passed".format(sum(c.passed for c in self.checks), len(self.checks)))
        return "\n".join(lines)

    def write(self, logdir: str, header: str = None, formats: List[str] = ["csv"]) -> None:
        """
        Write report.json, report.txt and one series file per series

        :param logdir: Output directory
        :param header: Provenance line
        :param formats: Logger formats for the series
        """
        os.makedirs(logdir, exist_ok=True)
        with open(os.path.join(logdir, "report.json"), "w") as file:
            json.dump(self.to_json(header), file, indent=2)
            file.write("\n")
        with open(os.path.join(logdir, "report.txt"), "w") as file:
            if header is not None:
                file.write("# {}\n".format(header))
            file.write(self.to_text())
            file.write("\n")
        for name, (times, values) in self.series.items():
            logger = Logger(logdir, formats=[f for f in formats if f != "stdout"], name="series_{}".format(name), header=header)
            for t, value in zip(times, values):
                logger.write({"t": float(t), name: float(np.real(value))}, "t")
            logger.close()
