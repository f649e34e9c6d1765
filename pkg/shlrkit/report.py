"""Command reports and their canonical JSON and text renderings."""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Union

from shlrkit import config
from shlrkit.algebra import Element
from shlrkit.linalg import DegreeWindow

Verdict = Union[bool, str]


def canonical(value: Any) -> Any:
    """JSON-ready copy of ``value``: rationals as ``"p/q"``, elements in normal form, keys as strings."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, (Element, DegreeWindow)):
        return str(value)
    if isinstance(value, dict):
        return {str(k): canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [canonical(v) for v in value]
    return str(value)


@dataclass
class Report:
    """Outcome of one command.

    Args:
        command: Command name.
        config: Effective settings.
        inputs: The declarations the command read, in canonical text.
        verdicts: ``name -> True | False | "inconclusive"``.
        witnesses: Data backing the verdicts.
        obstruction_log: Per-weight records of constructions that solve
            obstructions.
    """

    command: str
    config: Dict[str, Any]
    inputs: Dict[str, Any] = field(default_factory=dict)
    verdicts: Dict[str, Verdict] = field(default_factory=dict)
    witnesses: Dict[str, Any] = field(default_factory=dict)
    obstruction_log: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v is True for v in self.verdicts.values())

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_data(self) -> Dict[str, Any]:
        return canonical(
            {
                "schema": config.REPORT_SCHEMA,
                "command": self.command,
                "config": self.config,
                "inputs": self.inputs,
                "verdicts": self.verdicts,
                "witnesses": self.witnesses,
                "obstruction_log": self.obstruction_log,
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_data(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines: List[str] = []
        _text_lines(self.to_data(), 0, lines)
        return "\n".join(lines) + "\n"

    def render(self, output: str = config.DEFAULT_OUTPUT) -> str:
        return self.to_text() if output == "text" else self.to_json()


def _scalar(value: Any) -> str:
    return value if isinstance(value, str) else json.dumps(value)


def _text_lines(value: Any, depth: int, lines: List[str]) -> None:
    pad = "  " * depth
    if isinstance(value, dict):
        for key in sorted(value):
            item = value[key]
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{pad}{key}:")
                _text_lines(item, depth + 1, lines)
            elif isinstance(item, str) and "\n" in item:
                lines.append(f"{pad}{key}: |")
                lines.extend(f"{pad}  {row}" for row in item.rstrip("\n").split("\n"))
            else:
                lines.append(f"{pad}{key}: {_scalar(item) if not isinstance(item, (dict, list)) else '-'}")
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{pad}-")
                _text_lines(item, depth + 1, lines)
            else:
                lines.append(f"{pad}- {_scalar(item) if not isinstance(item, (dict, list)) else '-'}")
