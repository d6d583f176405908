"""``loss-oracle``: convolution oracle for single-mode loss or gain."""

from __future__ import annotations

import logging

from pydantic import ValidationError

from ...analysis.oracle import amplifier, loss, push_marginal, summary, validate_transfer
from ...core.exceptions import DomainError
from ...core.schema import RunConfig
from ...core.states import density_grid
from ...core.storage import write_csv, write_json
from .common import digest, prepare_output, state_from, verdict_line

logger = logging.getLogger(__name__)


def run(cfg: RunConfig) -> int:
    state = state_from(cfg)
    try:
        if cfg.channel == "amp":
            if cfg.gain is None:
                raise DomainError("--gain is required for --channel amp")
            spec = amplifier(cfg.gain)
        else:
            spec = loss(cfg.eta)
    except ValidationError as exc:
        raise DomainError(str(exc)) from exc
    result = validate_transfer(state, cfg.quadrature, spec)
    out = prepare_output(cfg)
    key = digest(cfg)
    write_json(out / "oracle.json", {"config_hash": key, "summary": result.model_dump(mode="json")})
    if cfg.out == "csv":
        pushed = push_marginal(density_grid(state, cfg.quadrature), spec)
        write_csv(out / "oracle_grid.csv", ["x", "density"], pushed.rows(), [f"config_hash={key}"])
    print(summary(result))
    localized = result.regime == "localized"
    print(verdict_line(localized, f"rel_err={result.rel_err:.3g} regime={result.regime}"))
    return 0
