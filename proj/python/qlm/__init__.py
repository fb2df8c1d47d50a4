"""Python access to the QLM solver (energies in hartree, lengths in bohr)."""

from ._core import (
    DomainError,
    NoBoundState,
    NonConvergence,
    __version__,
    converge,
    energies,
    expint_ei,
    table_csv,
)

__all__ = [
    "DomainError",
    "NoBoundState",
    "NonConvergence",
    "__version__",
    "converge",
    "energies",
    "expint_ei",
    "table_csv",
]
