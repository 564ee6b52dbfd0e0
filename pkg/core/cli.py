"""
Command line

    python -m core.cli audit-twin --rule dictator --winner 1 --k 3 --dim 1 --seed 42

Exit codes: 0 for a positive result (a proof with witness, consistent
degrees, a certified scan, a found violation), 2 for a structured negative
finding, 1 for errors and usage problems.
"""

import argparse
import csv
import io
import sys
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ValidationError, model_validator
from rich.markup import escape

from core import settings
from core.audit import AuditReport
from core.conditions import NauScanResult, SearchOutcome, ViolationCertificate
from core.degree import DegreeReport
from core.errors import TopochoiceError
from core.rules import RuleSpec
from tools.audit_tools import NoShowAuditTool, TwinAuditTool
from tools.base_tool import Tool, spec_from_args
from tools.degree_tools import DegreeReportTool
from tools.nau_tools import NauScanTool
from tools.witness_tools import NoShowWitnessTool, TwinWitnessTool
from utils.logger import console, get_logger
from utils.project_organizer import write_atomic

logger = get_logger("cli")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2


class Command(str, Enum):
    AUDIT_TWIN = "audit-twin"
    AUDIT_NOSHOW = "audit-noshow"
    DEGREE = "degree"
    WITNESS_TWIN = "witness-twin"
    WITNESS_NOSHOW = "witness-noshow"
    NAU_SCAN = "nau-scan"


FAMILY_COMMANDS = {Command.AUDIT_NOSHOW, Command.WITNESS_NOSHOW}

TOOLS: Dict[Command, Tool] = {
    Command.AUDIT_TWIN: TwinAuditTool(),
    Command.AUDIT_NOSHOW: NoShowAuditTool(),
    Command.DEGREE: DegreeReportTool(),
    Command.WITNESS_TWIN: TwinWitnessTool(),
    Command.WITNESS_NOSHOW: NoShowWitnessTool(),
    Command.NAU_SCAN: NauScanTool(),
}


class ReportFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class RunConfig(BaseModel):
    command: Command
    rule_spec: Optional[RuleSpec] = None
    family_spec: Optional[RuleSpec] = None
    net_size: Optional[int] = None
    subdivision_level: Optional[int] = None
    multistarts: Optional[int] = None
    seed: int = settings.DEFAULT_SEED
    output_path: Optional[str] = None
    format: ReportFormat = ReportFormat.JSON

    @model_validator(mode="after")
    def _one_spec_matching_command(self) -> "RunConfig":
        if (self.rule_spec is None) == (self.family_spec is None):
            raise ValueError("give exactly one of --rule / --family")
        wants_family = self.command in FAMILY_COMMANDS
        if wants_family and self.family_spec is None:
            raise ValueError(f"{self.command.value} takes --family, not --rule")
        if not wants_family and self.rule_spec is None:
            raise ValueError(f"{self.command.value} takes --rule, not --family")
        return self

    @property
    def spec(self) -> RuleSpec:
        return self.family_spec if self.family_spec is not None else self.rule_spec


class _Parser(argparse.ArgumentParser):
    """Usage errors print the grammar and exit 1"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="topochoice", description="Topological social choice audits on spheres")
    parser.add_argument("command", choices=[c.value for c in Command])
    target = parser.add_mutually_exclusive_group(required=True)
    target.add_argument("--rule", help="builtin rule name")
    target.add_argument("--family", help="builtin rule family name (no-show commands)")
    parser.add_argument("--winner", type=int, help="dictating voter (1-based)")
    parser.add_argument("--angle", type=float, help="rotation angle in radians")
    parser.add_argument("--k", type=int, required=True, help="number of voters")
    parser.add_argument("--dim", type=int, required=True, help="sphere dimension n")
    parser.add_argument("--net-size", type=int, help="sample net size")
    parser.add_argument("--level", type=int, help="icosphere subdivision level (S^2 degrees)")
    parser.add_argument("--multistarts", type=int, help="antipodal-point search starts")
    parser.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    parser.add_argument("--out", help="report path (default: standard output)")
    parser.add_argument("--format", choices=[f.value for f in ReportFormat], default=ReportFormat.JSON.value)
    return parser


def parse_config(argv: List[str]) -> RunConfig:
    args = build_parser().parse_args(argv)
    spec = spec_from_args(args.rule or args.family, args.k, args.dim, args.winner, args.angle)
    return RunConfig(
        command=args.command,
        rule_spec=spec if args.rule else None,
        family_spec=spec if args.family else None,
        net_size=args.net_size,
        subdivision_level=args.level,
        multistarts=args.multistarts,
        seed=args.seed,
        output_path=args.out,
        format=args.format,
    )


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------

DEGREE_COLUMNS = ["rule", "alpha_or_pair", "degree", "additivity_ok"]
CERTIFICATE_COLUMNS = ["rule", "condition", "kind", "focal_voter", "partner_voter",
                       "d_before", "d_after", "margin", "verified"]
AUDIT_COLUMNS = ["mode", "status"] + DEGREE_COLUMNS + CERTIFICATE_COLUMNS[1:]
SCAN_COLUMNS = ["map", "worst_point", "gap", "gap_deg", "mesh", "lipschitz_bound", "certified",
                "certificate_slack"]


def _degree_rows(report: DegreeReport) -> List[dict]:
    rows = [{"rule": report.rule_name, "alpha_or_pair": str(a), "degree": d, "additivity_ok": report.additivity_ok}
            for a, d in enumerate(report.d, start=1)]
    rows += [{"rule": report.rule_name, "alpha_or_pair": f"{p.i}-{p.j}", "degree": p.deg,
              "additivity_ok": report.additivity_ok} for p in report.D]
    return rows


def _certificate_row(cert: ViolationCertificate) -> dict:
    return {
        "rule": cert.rule_name, "condition": cert.condition.value, "kind": cert.kind.value,
        "focal_voter": cert.focal_voter, "partner_voter": cert.partner_voter,
        "d_before": cert.d_before, "d_after": cert.d_after, "margin": cert.margin, "verified": cert.verified,
    }


def _csv_table(report: BaseModel):
    if isinstance(report, DegreeReport):
        return DEGREE_COLUMNS, _degree_rows(report)
    if isinstance(report, ViolationCertificate):
        return CERTIFICATE_COLUMNS, [_certificate_row(report)]
    if isinstance(report, SearchOutcome):
        return CERTIFICATE_COLUMNS, [_certificate_row(report.certificate)] if report.found else []
    if isinstance(report, AuditReport):
        head = {"mode": report.mode.value, "status": report.status.value}
        rows = [{**head, **row} for row in _degree_rows(report.degrees)]
        if report.certificate is not None:
            rows.append({**head, **_certificate_row(report.certificate)})
        for row in rows:
            row["rule"] = report.rule_name
        return AUDIT_COLUMNS, rows
    if isinstance(report, NauScanResult):
        return SCAN_COLUMNS, [{
            "map": report.map_provenance, "worst_point": " ".join(repr(c) for c in report.worst_point),
            "gap": report.gap, "gap_deg": report.gap_deg, "mesh": report.net.get("mesh"),
            "lipschitz_bound": report.lipschitz_bound, "certified": report.certified,
            "certificate_slack": report.certificate_slack,
        }]
    raise TypeError(f"no CSV layout for {type(report).__name__}")


def render_report(report: BaseModel, format: ReportFormat = ReportFormat.JSON) -> str:
    if ReportFormat(format) is ReportFormat.JSON:
        return report.model_dump_json(by_alias=True, indent=2) + "\n"
    columns, rows = _csv_table(report)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def emit_report(report: BaseModel, format: ReportFormat = ReportFormat.JSON, path: Optional[str] = None) -> None:
    text = render_report(report, format)
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        write_atomic(path, text)
        logger.info(f"📄 report written to {path}")


def run(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_ERROR
    except ValidationError as e:
        console.print(f"[red]invalid arguments:[/red] {escape(str(e))}")
        return EXIT_ERROR

    tool = TOOLS[cfg.command]
    try:
        report = tool.run(cfg.spec, net_size=cfg.net_size, level=cfg.subdivision_level,
                          multistarts=cfg.multistarts, seed=cfg.seed)
        emit_report(report, cfg.format, cfg.output_path)
    except (TopochoiceError, ValidationError) as e:
        console.print(f"[red]{type(e).__name__}:[/red] {escape(str(e))}")
        return EXIT_ERROR
    return EXIT_OK if tool.succeeded(report) else EXIT_NEGATIVE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
