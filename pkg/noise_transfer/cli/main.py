"""Entry point of the ``noise_transfer`` command line.

Every subcommand writes figure-ready CSV/JSON into ``--path`` (or the
configured output directory) together with ``run_config.json``.  A run can
be repeated from that file with ``--config run_config.json``.

Exit codes: 0 success, 2 invalid flags or parameters, 3 numerical failure,
4 unbalanced feedforward, 5 Monte Carlo disagreement.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from colorama import Fore, Style
from colorama import init as colorama_init
from pydantic import ValidationError

from ..core.config import log_level
from ..core.exceptions import (
    ConfigMismatchError,
    DomainError,
    NumericError,
    UnbalancedCircuitError,
)
from ..core.schema import RunConfig
from ..core.storage import read_json
from .commands import COMMANDS

logger = logging.getLogger(__name__)

EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_UNBALANCED = 4


def _add_state_flags(p: argparse.ArgumentParser, states: Sequence[str]) -> None:
    p.add_argument("--state", choices=states)
    p.add_argument("--alpha", type=float)
    p.add_argument("--mu", type=int, choices=(0, 1))
    p.add_argument("--delta2", type=float)
    p.add_argument("--rotated", action="store_true", help="rotate the state by pi/2")


def _add_loss_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=("ideal", "lossy"), default="ideal")
    p.add_argument("--delta2", type=float)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--eta-g", dest="eta_g", type=float, default=1.0)
    p.add_argument("--eta-m", dest="eta_m", type=float, default=1.0)
    p.add_argument("--eta-d", dest="eta_d", type=float, default=1.0)
    p.add_argument("--rounds", type=int, default=1)


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", choices=("csv", "json"), default="json")
    p.add_argument("--path", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="noise_transfer", description=__doc__.splitlines()[0])
    parser.add_argument("--config", type=Path, help="JSON run config instead of flags")
    sub = parser.add_subparsers(dest="command")
    base_states = ("cat", "gkp", "vacuum", "coherent", "squeezed")

    p = sub.add_parser("state-stats", help="density grid and domain statistics")
    _add_state_flags(p, base_states)
    p.add_argument("--quadrature", choices=("q", "p"), default="q")
    p.add_argument("--domains", default="auto", help="auto | sign | single | lattice:PERIOD[:OFFSET]")
    _add_output_flags(p)

    p = sub.add_parser("sweep", help="variance along a parameter")
    families = (*base_states, "gkp0", "gkp1", "gkp+", "gkp-")
    p.add_argument("--state", choices=families)
    p.add_argument("--states", nargs="+", choices=families)
    p.add_argument("--param", choices=("alpha", "delta2"))
    p.add_argument("--from", dest="start", type=float)
    p.add_argument("--to", dest="stop", type=float)
    p.add_argument("--steps", type=int)
    _add_output_flags(p)

    p = sub.add_parser("circuit", help="analytic teleportation report")
    _add_loss_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("mc", help="Monte Carlo check of the analytic report")
    _add_loss_flags(p)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mu", type=int, choices=(0, 1))
    p.add_argument("--spike-model", dest="spike_model", choices=("gaussian", "exact"), default="gaussian")
    p.add_argument("--noisy-readout", dest="noisy_readout", action="store_true")
    _add_output_flags(p)

    p = sub.add_parser("loss-oracle", help="convolution oracle for loss or gain")
    _add_state_flags(p, base_states)
    p.add_argument("--quadrature", choices=("q", "p"), default="q")
    p.add_argument("--channel", choices=("loss", "amp"), default="loss")
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--gain", type=float)
    _add_output_flags(p)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.config is not None:
        return read_json(args.config, RunConfig)
    if args.command is None:
        raise DomainError("a subcommand or --config is required")
    flags = {k: v for k, v in vars(args).items() if k != "config" and v is not None}
    return RunConfig.model_validate(flags)


def _fail(code: int, message: str) -> int:
    print(f"{Fore.RED}error{Style.RESET_ALL}: {message}", file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    colorama_init()
    logging.basicConfig(
        level=log_level(),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        logger.info("Process: cli | Command: %s", cfg.command)
        return COMMANDS[cfg.command](cfg)
    except UnbalancedCircuitError as exc:
        return _fail(EXIT_UNBALANCED, str(exc))
    except (DomainError, ConfigMismatchError, ValidationError, json.JSONDecodeError, OSError) as exc:
        return _fail(EXIT_VALIDATION, str(exc))
    except NumericError as exc:
        return _fail(EXIT_NUMERIC, str(exc))


if __name__ == "__main__":
    sys.exit(main())
