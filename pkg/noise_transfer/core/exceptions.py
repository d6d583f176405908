"""Exception types raised across the package.

All of them derive from the builtin exception a caller would naturally
catch, so code written against ``ValueError``/``KeyError`` keeps working.
"""

from __future__ import annotations

__all__ = [
    "DomainError",
    "NumericError",
    "UnbalancedCircuitError",
    "ConsumedModeError",
    "UnboundSymbolError",
    "ConfigMismatchError",
]


class DomainError(ValueError):
    """A parameter lies outside its declared range."""


class NumericError(RuntimeError):
    """Integration or tabulation failed to produce a usable result."""


class UnbalancedCircuitError(ValueError):
    """Binned feedforward applied to signals that do not sit on the lattice."""


class ConsumedModeError(KeyError):
    """The mode was measured earlier and can no longer be addressed."""


class UnboundSymbolError(KeyError):
    """A noise symbol has no variance binding."""


class ConfigMismatchError(ValueError):
    """Two artefacts that should describe the same run disagree."""
