"""Campaigns and report rendering."""

import json

import pytest

from mediatrix.config import settings
from mediatrix.core.exceptions import ConfigOutOfRange
from mediatrix.domain.protocol import MediatorMode
from mediatrix.schemas.report import RunReport, RunSummary, StepRow
from mediatrix.services.campaign_service import campaign_service
from mediatrix.services.fuzz_service import FuzzConfig, fuzz_service
from mediatrix.services.protocol_service import protocol_service
from mediatrix.services.reporting_service import format_value, reporting_service


class TestFormatting:
    @pytest.mark.parametrize(
        ("value", "expected"),
        [
            (None, ""),
            (True, "true"),
            (False, "false"),
            (0.1, "0.10000000000000001"),
            (3, "3"),
            ([1, 2, 3], "1;2;3"),
            ([], ""),
        ],
    )
    def test_cells(self, value, expected):
        assert format_value(value) == expected


class TestReporting:
    @pytest.fixture
    def report(self) -> RunReport:
        return RunReport(
            name="demo",
            mediator_mode="classical",
            seed=7,
            rows=[StepRow(step=0, negativity_ab=0.0, negativity_a_gb=0.0, negativity_ag_b=0.0, ensemble_terms=1)],
            summary=RunSummary(final_negativity_ab=0.0, theorem_pass=True),
        )

    def test_csv_layout(self, report):
        lines = reporting_service.render_csv(report).splitlines()
        assert lines[0] == "# mediatrix-report-v1"
        assert lines[1] == "# kind=run"
        assert lines[2] == "step,negativity_ab,negativity_a_gb,negativity_ag_b,ensemble_terms,certificate_residual"
        assert lines[3] == "0,0,0,0,1,"
        assert "# summary" in lines
        assert "theorem_pass,true" in lines
        assert "wall_time_ms," in lines

    def test_json_round_trips_through_the_schema(self, report):
        text = reporting_service.render(report, "json")
        assert RunReport.model_validate(json.loads(text)) == report

    def test_default_format_from_settings(self, report, monkeypatch):
        monkeypatch.setattr(settings, "report_format", "json")
        assert reporting_service.render(report).startswith("{")

    def test_write_creates_parents(self, report, tmp_path):
        target = reporting_service.write(report, tmp_path / "nested" / "run.csv")
        assert target.read_text().startswith("# mediatrix-report-v1\n")


class TestProtocolReports:
    def test_bmv_report_rows(self):
        report = protocol_service.run_report("bmv", protocol_service.bmv_scenario(MediatorMode.CLASSICAL))
        assert [row.step for row in report.rows] == [0, 1, 2, 3]
        assert report.summary.theorem_pass is True
        assert report.summary.wall_time_ms is None
        assert not report.violation

    def test_quantum_report_has_no_verdict(self):
        report = protocol_service.run_report("bmv", protocol_service.bmv_scenario("quantum"))
        assert report.summary.theorem_pass is None
        assert all(row.ensemble_terms is None for row in report.rows)
        assert abs(report.summary.final_negativity_ab - 0.5) <= 1e-9


class TestFuzzCampaign:
    def test_small_campaign_passes(self):
        report = campaign_service.run_fuzz_campaign(11, FuzzConfig(d_g=2, max_steps=3, count=6))
        assert [row.index for row in report.rows] == list(range(6))
        assert not report.violation
        assert report.summary.count == 6
        assert report.summary.max_final_negativity_ab <= settings.theorem_tol

    def test_rows_depend_only_on_seed(self):
        config = FuzzConfig(d_g=2, max_steps=2, count=4)
        first = campaign_service.run_fuzz_campaign(5, config)
        second = campaign_service.run_fuzz_campaign(5, config)
        assert reporting_service.render_csv(first) == reporting_service.render_csv(second)

    def test_empty_campaign(self):
        report = campaign_service.run_fuzz_campaign(0, FuzzConfig(count=0))
        assert report.rows == []
        assert report.summary.max_final_negativity_ab is None
        assert not report.violation

    def test_caps(self):
        with pytest.raises(ConfigOutOfRange, match="dG"):
            campaign_service.run_fuzz_campaign(0, FuzzConfig(d_g=5, count=1))
        with pytest.raises(ConfigOutOfRange, match="seed"):
            campaign_service.run_fuzz_campaign(-1, FuzzConfig(count=1))

    def test_stream_is_lazy_but_checked_eagerly(self):
        with pytest.raises(ConfigOutOfRange):
            fuzz_service.fuzz_protocols(0, FuzzConfig(max_steps=11))
        pairs = list(fuzz_service.fuzz_protocols(3, FuzzConfig(count=2, max_steps=1)))
        assert len(pairs) == 2
        assert pairs[0][0] != pairs[1][0]


class TestLoccCampaign:
    def test_identity_sweep(self):
        report = campaign_service.run_locc_campaign(1, 2, rounds=2, alphabet=2, generator="identity")
        assert not report.violation
        assert all(row.mediator_dim == 4 for row in report.rows)

    def test_random_sweep(self):
        report = campaign_service.run_locc_campaign(2, 3, rounds=2, alphabet=2)
        assert not report.violation
        assert report.summary.max_choi_deviation <= settings.theorem_tol

    def test_rounds_above_cap(self):
        with pytest.raises(ConfigOutOfRange, match="rounds"):
            campaign_service.run_locc_campaign(0, 1, rounds=5, alphabet=2)
