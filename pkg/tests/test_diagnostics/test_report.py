import json
import math

from diracflow.diagnostics import Check, DiagnosticsReport, make_check, skipped_check


class TestCheck:
    def test_verdicts(self):
        assert make_check("a", 1e-10, 1e-9).verdict == "pass"
        assert make_check("a", 1e-8, 1e-9).verdict == "fail"
        assert skipped_check("a").verdict == "skip"
        assert skipped_check("a").passed

    def test_nan_fails(self):
        check = make_check("a", float("nan"), 1.0)
        assert math.isinf(check.residual)
        assert not check.passed


class TestDiagnosticsReport:
    def make(self):
        report = DiagnosticsReport([make_check("spectrum_drift", 1e-12, 1e-8, "isospectral")])
        report.add(make_check("nilpotent", 1e-6, 1e-9, "d d = 0", "worst at t=2"))
        report.add(skipped_check("dolbeault", detail="beta = 0"))
        report.add_series("tr_M", [0.0, 1.0], [4.0, 1.0])
        return report

    def test_summary(self):
        report = self.make()
        assert not report.passed
        assert [c.name for c in report.failures] == ["nilpotent"]
        assert report.get("dolbeault").skipped
        assert isinstance(report.get("nilpotent"), Check)

    def test_merge(self):
        report = self.make().merge(DiagnosticsReport([make_check("x", 0, 0)]))
        assert len(report.checks) == 4
        assert "tr_M" in report.series

    def test_text(self):
        text = self.make().to_text()
        assert text.splitlines()[0].split() == ["check", "residual", "tolerance", "verdict"]
        assert "nilpotent" in text and "fail" in text
        assert text.splitlines()[-1] == "2 of 3 checks passed"

    def test_write(self, tmp_path):
        self.make().write(str(tmp_path), header="config-hash: 1")
        doc = json.loads((tmp_path / "report.json").read_text())
        assert doc["passed"] is False
        assert doc["provenance"] == "config-hash: 1"
        assert [c["verdict"] for c in doc["checks"]] == ["pass", "fail", "skip"]
        assert (tmp_path / "report.txt").read_text().startswith("# config-hash: 1\n")
        lines = (tmp_path / "series_tr_M.csv").read_text().splitlines()
        assert lines == ["# config-hash: 1", "t,tr_M", "0.0,4.0", "1.0,1.0"]
