from __future__ import annotations

"""Load text report templates from ``templates.yaml``."""

from importlib import resources
from typing import Any, Dict

import yaml
from jinja2 import Template


def _load_templates() -> dict:
    """Return dictionary of template definitions from YAML."""
    with resources.files(__package__).joinpath("templates.yaml").open(
        "r", encoding="utf-8"
    ) as fh:
        return yaml.safe_load(fh)


_data = _load_templates()

# Dictionaries with descriptions and compiled templates
DESCRIPTIONS: Dict[str, str] = {}
TEMPLATES: Dict[str, Template] = {}

for _name, _info in _data.items():
    DESCRIPTIONS[_name] = _info.get("description", "")
    TEMPLATES[_name] = Template(_info["template"], trim_blocks=True, lstrip_blocks=True)

STATE_SUMMARY = TEMPLATES["state_summary"]
CIRCUIT_SUMMARY = TEMPLATES["circuit_summary"]
MC_VERDICT = TEMPLATES["mc_verdict"]
ORACLE_SUMMARY = TEMPLATES["oracle_summary"]


def render(name: str, **context: Any) -> str:
    """Render template ``name``; unknown names raise ``KeyError``."""
    return TEMPLATES[name].render(**context).rstrip("\n")
