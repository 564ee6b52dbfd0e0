import json
from abc import ABC, abstractmethod
from typing import Any, ClassVar, Dict, Optional

from pydantic import BaseModel, ValidationError

from core import settings
from core.errors import TopochoiceError
from core.rules import RuleSpec
from utils.logger import get_logger
from utils.project_organizer import ProjectOrganizer

logger = get_logger("tools")

RULE_PARAMETERS: Dict[str, Any] = {
    "rule": {
        "type": "string",
        "description": "Builtin rule (or rule family for no-show tools): dictator, constant, "
                       "normalized_mean, antagonistic_mean, karcher_mean, rotated_dictator.",
    },
    "k": {"type": "integer", "description": "Number of voters (the abstention size for no-show tools)."},
    "dim": {"type": "integer", "description": "Sphere dimension n; points live in R^(n+1)."},
    "winner": {"type": "integer", "description": "Dictating voter for dictator / rotated_dictator."},
    "angle": {"type": "number", "description": "Rotation angle in radians for rotated_dictator."},
    "seed": {"type": "integer", "description": "Seed for every random draw (default 0)."},
}


def spec_from_args(rule: str, k: int, dim: int, winner: Optional[int] = None,
                   angle: Optional[float] = None) -> RuleSpec:
    params: Dict[str, Any] = {}
    if winner is not None:
        params["winner"] = winner
    if angle is not None:
        params["rotation_angle"] = angle
    return RuleSpec(name=rule, k=k, dim_n=dim, params=params)


class Tool(BaseModel, ABC):
    """A command the CLI dispatches to; also callable as a function-calling tool

    ``run`` returns the typed report, ``execute`` wraps it the way a tool
    caller expects: JSON text, saved under the work directory, with errors
    folded into ``{"error": ...}``.
    """

    name: str
    description: str
    parameters: dict

    save_type: ClassVar[str] = ProjectOrganizer.SaveType.REPORTS

    @abstractmethod
    def run(self, spec: RuleSpec, net_size: Optional[int] = None, level: Optional[int] = None,
            multistarts: Optional[int] = None, seed: int = settings.DEFAULT_SEED) -> BaseModel:
        ...

    @abstractmethod
    def succeeded(self, report: BaseModel) -> bool:
        """False for structured negative findings"""

    def execute(self, rule: str, k: int, dim: int, winner: Optional[int] = None, angle: Optional[float] = None,
                save: bool = True, **knobs) -> str:
        try:
            spec = spec_from_args(rule, k, dim, winner, angle)
            report = self.run(spec, **knobs)
            text = report.model_dump_json(by_alias=True, indent=2)
            if save:
                ProjectOrganizer.save(self.save_type, text, f"{self.name}_{spec.name}_k{k}_n{dim}.json")
            return text
        except (TopochoiceError, ValidationError) as e:
            logger.error(f"❌ {self.name} failed: {e}")
            return json.dumps({"error": f"{type(e).__name__}: {e}"})

    def to_param(self) -> dict:
        return {
            "type": "function",
            "function": {"name": self.name, "description": self.description, "parameters": self.parameters},
        }
