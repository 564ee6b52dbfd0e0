from typing import Optional

from core import settings
from core.conditions import NauScanResult, scan_nau
from core.errors import BadParams
from core.rules import RuleSpec, diagonal_map, rule_from_spec
from core.sphere_core import default_net
from tools.base_tool import RULE_PARAMETERS, Tool
from utils.project_organizer import ProjectOrganizer

DEFAULT_SCAN_SIZE = 720


class NauScanTool(Tool):
    name: str = "nau_scan"
    description: str = ("Scan the diagonal x -> f(x,..,x) of a rule for Nowhere Anti-Unanimity; "
                        "certified when the smallest gap to -x beats (1 + L) * mesh.")
    parameters: dict = {
        "type": "object",
        "properties": {
            **RULE_PARAMETERS,
            "net_size": {"type": "integer", "description": f"Net size (default {DEFAULT_SCAN_SIZE})."},
        },
        "required": ["rule", "k", "dim"],
    }

    save_type = ProjectOrganizer.SaveType.SCANS

    def run(self, spec: RuleSpec, net_size: Optional[int] = None, level: Optional[int] = None,
            multistarts: Optional[int] = None, seed: int = settings.DEFAULT_SEED) -> NauScanResult:
        rule = rule_from_spec(spec)
        if net_size is None:
            net_size = DEFAULT_SCAN_SIZE
        if net_size < 1:
            raise BadParams(f"nau scan needs a net of at least one point, got {net_size}")
        net = default_net(rule.dim_n, net_size, seed)
        return scan_nau(diagonal_map(rule), net, rule.lipschitz_bound)

    def succeeded(self, report: NauScanResult) -> bool:
        return report.certified
