"""
Witness search tools

Net-and-refine searches for Twin / Participation violations. They work on any
rule, including ones the degree machinery cannot handle, but only report what
they actually find.
"""

from typing import Optional

from core import settings
from core.conditions import SearchConfig, SearchOutcome, search_noshow_violation, search_twin_violation
from core.rules import RuleSpec, family_from_spec, rule_from_spec
from tools.base_tool import RULE_PARAMETERS, Tool
from utils.project_organizer import ProjectOrganizer

_SEARCH_PARAMETERS = {
    "type": "object",
    "properties": {
        **RULE_PARAMETERS,
        "net_size": {"type": "integer", "description": "Points per voter slot in the search net (default 16)."},
    },
    "required": ["rule", "k", "dim"],
}


def search_config(net_size: Optional[int], seed: int) -> SearchConfig:
    return SearchConfig(net_size=settings.SEARCH_NET_SIZE if net_size is None else net_size, seed=seed)


class TwinWitnessTool(Tool):
    name: str = "witness_twin"
    description: str = "Search profiles for a verified Twin Condition violation of a rule."
    parameters: dict = _SEARCH_PARAMETERS

    save_type = ProjectOrganizer.SaveType.CERTIFICATES

    def run(self, spec: RuleSpec, net_size: Optional[int] = None, level: Optional[int] = None,
            multistarts: Optional[int] = None, seed: int = settings.DEFAULT_SEED) -> SearchOutcome:
        return search_twin_violation(rule_from_spec(spec), search_config(net_size, seed))

    def succeeded(self, report: SearchOutcome) -> bool:
        return report.found


class NoShowWitnessTool(Tool):
    name: str = "witness_noshow"
    description: str = "Search abstention profiles for a verified Participation Condition violation of a family."
    parameters: dict = _SEARCH_PARAMETERS

    save_type = ProjectOrganizer.SaveType.CERTIFICATES

    def run(self, spec: RuleSpec, net_size: Optional[int] = None, level: Optional[int] = None,
            multistarts: Optional[int] = None, seed: int = settings.DEFAULT_SEED) -> SearchOutcome:
        return search_noshow_violation(family_from_spec(spec), spec.k, search_config(net_size, seed))

    def succeeded(self, report: SearchOutcome) -> bool:
        return report.found
