from typing import Optional

from core import settings
from core.degree import DegreeConfig, DegreeReport, coordinate_degrees
from core.rules import RuleSpec, rule_from_spec
from tools.base_tool import RULE_PARAMETERS, Tool
from utils.project_organizer import ProjectOrganizer


class DegreeReportTool(Tool):
    name: str = "degree_report"
    description: str = ("Degrees of every single-voter and twin-pair restriction of a rule on S^1 or S^2, "
                        "with the additivity check D[i,j] = d_i + d_j.")
    parameters: dict = {
        "type": "object",
        "properties": {
            **RULE_PARAMETERS,
            "level": {"type": "integer", "description": "Icosphere subdivision level for S^2 (default 5)."},
        },
        "required": ["rule", "k", "dim"],
    }

    save_type = ProjectOrganizer.SaveType.DEGREES

    def run(self, spec: RuleSpec, net_size: Optional[int] = None, level: Optional[int] = None,
            multistarts: Optional[int] = None, seed: int = settings.DEFAULT_SEED) -> DegreeReport:
        cfg = DegreeConfig(subdivision_level=settings.ICOSPHERE_LEVEL if level is None else level, seed=seed)
        return coordinate_degrees(rule_from_spec(spec), cfg)

    def succeeded(self, report: DegreeReport) -> bool:
        return report.complete and report.additivity_ok


if __name__ == "__main__":
    print(DegreeReportTool().execute(rule="normalized_mean", k=3, dim=1, save=False))
