"""Subcommand implementations."""

from . import circuit, loss_oracle, mc, state_stats, sweep

COMMANDS = {
    "state-stats": state_stats.run,
    "sweep": sweep.run,
    "circuit": circuit.run,
    "mc": mc.run,
    "loss-oracle": loss_oracle.run,
}

__all__ = ["COMMANDS", "circuit", "loss_oracle", "mc", "state_stats", "sweep"]
