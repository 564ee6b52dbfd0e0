import json
import math
import os

import pytest
from pydantic import ValidationError

from core.audit import AuditReport, AuditStatus
from core.degree import DegreeReport
from core.errors import BadParams, ReportIoError
from tools.audit_tools import NoShowAuditTool, TwinAuditTool, audit_config
from tools.base_tool import spec_from_args
from tools.degree_tools import DegreeReportTool
from tools.nau_tools import NauScanTool
from tools.witness_tools import NoShowWitnessTool, TwinWitnessTool, search_config
from utils.project_organizer import ProjectOrganizer, write_atomic


def test_spec_from_args_maps_cli_knobs():
    spec = spec_from_args("rotated_dictator", 3, 1, winner=2, angle=0.5)
    assert spec.params == {"winner": 2, "rotation_angle": 0.5}
    assert spec_from_args("constant", 3, 2).params == {}


def test_execute_returns_json_and_saves_it(workdir):
    tool = DegreeReportTool()
    text = tool.execute(rule="dictator", k=3, dim=1, winner=1)
    report = DegreeReport.model_validate_json(text)
    assert report.d == [1, 0, 0]
    saved = ProjectOrganizer.load(ProjectOrganizer.SaveType.DEGREES, "degree_report_dictator_k3_n1.json")
    assert saved == text
    assert os.path.isfile(workdir / "degrees" / "degree_report_dictator_k3_n1.json")


def test_execute_folds_errors_into_json():
    out = json.loads(TwinAuditTool().execute(rule="dictator", k=2, dim=1, winner=1, save=False))
    assert out["error"].startswith("PreconditionViolated")
    out = json.loads(DegreeReportTool().execute(rule="borda", k=3, dim=1, save=False))
    assert out["error"].startswith("BadParams")


def test_tools_describe_themselves():
    for tool in (TwinAuditTool(), NoShowAuditTool(), DegreeReportTool(), TwinWitnessTool(),
                 NoShowWitnessTool(), NauScanTool()):
        param = tool.to_param()
        assert param["type"] == "function"
        assert param["function"]["name"] == tool.name
        assert {"rule", "k", "dim"} <= set(param["function"]["parameters"]["required"])


def test_audit_tools_report_success():
    tool = TwinAuditTool()
    report = tool.run(spec_from_args("dictator", 3, 1, winner=1))
    assert isinstance(report, AuditReport)
    assert tool.succeeded(report)

    noshow = NoShowAuditTool()
    family_report = noshow.run(spec_from_args("constant", 2, 1))
    assert family_report.status is AuditStatus.PROVED_WITH_WITNESS
    assert noshow.succeeded(family_report)
    assert not tool.succeeded(tool.run(spec_from_args("normalized_mean", 3, 1)))


def test_audit_config_defaults():
    cfg = audit_config(level=2, multistarts=3, seed=5)
    assert cfg.degree.subdivision_level == 2
    assert cfg.antipode.multistarts == 3 and cfg.antipode.seed == 5
    assert cfg.y_net_size == 64


def test_zero_sizes_are_not_replaced_by_defaults():
    with pytest.raises(ValidationError):
        audit_config(multistarts=0)
    with pytest.raises(ValidationError):
        audit_config(net_size=0)
    with pytest.raises(ValidationError):
        search_config(0, seed=0)
    with pytest.raises(BadParams):
        NauScanTool().run(spec_from_args("dictator", 3, 1, winner=1), net_size=0)


def test_degree_tool_flags_negative_findings():
    tool = DegreeReportTool()
    assert tool.succeeded(tool.run(spec_from_args("dictator", 3, 1, winner=2)))
    assert not tool.succeeded(tool.run(spec_from_args("normalized_mean", 3, 1)))


def test_witness_tools_save_certificates(workdir):
    text = TwinWitnessTool().execute(rule="constant", k=3, dim=1, net_size=8)
    assert json.loads(text)["certificate"]["verified"]
    assert os.path.isfile(workdir / "certificates" / "witness_twin_constant_k3_n1.json")

    outcome = NoShowWitnessTool().run(spec_from_args("dictator", 2, 1, winner=1), net_size=8)
    assert NoShowWitnessTool().succeeded(outcome)


@pytest.mark.parametrize("angle,certified", [(math.pi / 3, True), (math.pi, False)])
def test_nau_scan_tool(angle, certified):
    tool = NauScanTool()
    scan = tool.run(spec_from_args("rotated_dictator", 3, 1, winner=1, angle=angle))
    assert tool.succeeded(scan) is certified
    assert scan.net["size"] == 720


def test_nau_scan_of_a_dictator_diagonal():
    scan = NauScanTool().run(spec_from_args("dictator", 3, 2, winner=1), net_size=500)
    assert scan.gap == pytest.approx(math.pi)
    assert scan.certified


# ---------------------------------------------------------------------------
# Work directory
# ---------------------------------------------------------------------------

def test_organizer_creates_and_loads(workdir):
    ProjectOrganizer.init_all_subdirs()
    for sub in ("reports", "degrees", "certificates", "scans"):
        assert os.path.isdir(workdir / sub)
    assert ProjectOrganizer.get_save_dir(ProjectOrganizer.SaveType.SCANS).endswith("scans/")
    with pytest.raises(ReportIoError):
        ProjectOrganizer.load(ProjectOrganizer.SaveType.REPORTS, "missing.json")


def test_write_atomic_replaces_and_cleans_up(tmp_path):
    target = tmp_path / "out" / "report.json"
    write_atomic(str(target), "first")
    write_atomic(str(target), "second")
    assert target.read_text() == "second"
    assert os.listdir(target.parent) == ["report.json"]


def test_write_atomic_reports_unwritable_paths(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ReportIoError) as excinfo:
        write_atomic(str(blocker / "report.json"), "text")
    assert excinfo.value.path == str(blocker / "report.json")
