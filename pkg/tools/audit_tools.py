"""
Audit tools

End-to-end impossibility audits: degrees, pair choice, antipodal point and
a verified violation certificate for the Twin or the Participation Condition.
"""

from typing import Optional

from core import settings
from core.audit import AuditConfig, AuditReport, AuditStatus, run_noshow_audit, run_twin_audit
from core.conditions import AntipodeConfig
from core.degree import DegreeConfig
from core.rules import RuleSpec, family_from_spec, rule_from_spec
from tools.base_tool import RULE_PARAMETERS, Tool


def audit_config(net_size: Optional[int] = None, level: Optional[int] = None,
                 multistarts: Optional[int] = None, seed: int = settings.DEFAULT_SEED) -> AuditConfig:
    level = settings.ICOSPHERE_LEVEL if level is None else level
    multistarts = settings.MULTISTARTS if multistarts is None else multistarts
    return AuditConfig(
        degree=DegreeConfig(subdivision_level=level, seed=seed),
        antipode=AntipodeConfig(multistarts=multistarts, seed=seed),
        y_net_size=64 if net_size is None else net_size,
        seed=seed,
    )


_AUDIT_PARAMETERS = {
    "type": "object",
    "properties": {
        **RULE_PARAMETERS,
        "net_size": {"type": "integer", "description": "Size of the net y is drawn from (default 64)."},
        "level": {"type": "integer", "description": "Icosphere subdivision level for S^2 degrees."},
        "multistarts": {"type": "integer", "description": "Starts for the antipodal-point search."},
    },
    "required": ["rule", "k", "dim"],
}


class TwinAuditTool(Tool):
    name: str = "audit_twin"
    description: str = ("Prove that a rule violates the Twin Condition: compute coordinate degrees, "
                        "pick a pair whose restriction is not of degree 1, and build a verified witness.")
    parameters: dict = _AUDIT_PARAMETERS

    def run(self, spec: RuleSpec, net_size: Optional[int] = None, level: Optional[int] = None,
            multistarts: Optional[int] = None, seed: int = settings.DEFAULT_SEED) -> AuditReport:
        return run_twin_audit(rule_from_spec(spec), audit_config(net_size, level, multistarts, seed))

    def succeeded(self, report: AuditReport) -> bool:
        return report.status is AuditStatus.PROVED_WITH_WITNESS


class NoShowAuditTool(Tool):
    name: str = "audit_noshow"
    description: str = ("Prove that a rule family violates the Participation Condition at k voters "
                        "by auditing its (k+1)-voter member.")
    parameters: dict = _AUDIT_PARAMETERS

    def run(self, spec: RuleSpec, net_size: Optional[int] = None, level: Optional[int] = None,
            multistarts: Optional[int] = None, seed: int = settings.DEFAULT_SEED) -> AuditReport:
        return run_noshow_audit(family_from_spec(spec), spec.k, audit_config(net_size, level, multistarts, seed))

    def succeeded(self, report: AuditReport) -> bool:
        return report.status is AuditStatus.PROVED_WITH_WITNESS


if __name__ == "__main__":
    print(TwinAuditTool().execute(rule="dictator", k=3, dim=1, winner=1, save=False))
