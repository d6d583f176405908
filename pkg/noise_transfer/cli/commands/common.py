"""Helpers shared by the subcommands."""

from __future__ import annotations

import logging
import math
from pathlib import Path

from colorama import Fore, Style

from ...core.config import output_dir
from ...core.domains import explicit, lattice, sign_split
from ...core.exceptions import DomainError
from ...core.schema import DomainPartition, Quadrature, RunConfig, StateModel
from ...core.states import cat, coherent, default_partition, gkp, squeezed, vacuum
from ...core.storage import write_json
from ...core.utils import config_hash, parse_domains

logger = logging.getLogger(__name__)


def digest(cfg: RunConfig) -> str:
    """Hash of every flag that shapes the result (the output path is not one)."""
    return config_hash(cfg.model_dump(mode="json", by_alias=True, exclude={"path"}))


def prepare_output(cfg: RunConfig) -> Path:
    """Create the output directory and store the run config in it."""
    out = Path(cfg.path) if cfg.path else output_dir()
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "run_config.json", cfg)
    return out


def state_from(cfg: RunConfig) -> StateModel:
    rotation = math.pi / 2 if cfg.rotated else 0.0
    match cfg.state:
        case "cat":
            return cat(_required(cfg.alpha, "--alpha"), rotation)
        case "coherent":
            return coherent(_required(cfg.alpha, "--alpha"), rotation)
        case "squeezed":
            return squeezed(_required(cfg.delta2, "--delta2"), rotation)
        case "vacuum":
            return vacuum(rotation)
        case "gkp":
            mu = cfg.mu if cfg.mu is not None else 0
            return gkp(mu, _required(cfg.delta2, "--delta2"), rotation)
    raise DomainError(f"Unknown state: {cfg.state}")


def partition_from(cfg: RunConfig, state: StateModel, quadrature: Quadrature) -> DomainPartition:
    try:
        kind, period, offset = parse_domains(cfg.domains)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    match kind:
        case "auto":
            return default_partition(state, quadrature)
        case "sign":
            return sign_split()
        case "single":
            return explicit(())
    try:
        return lattice(period, offset)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc


def _required(value, flag: str):
    if value is None:
        raise DomainError(f"{flag} is required for this state")
    return value


def verdict_line(passed: bool, text: str) -> str:
    colour = Fore.GREEN if passed else Fore.RED
    tag = "PASS" if passed else "FAIL"
    return f"{colour}{tag}{Style.RESET_ALL} {text}"
