"""
Type-B uncertainty budgets from sensitivity coefficients.

Each systematic effect contributes `|k_i| * sigma_xi`, the product of its frequency
sensitivity and the uncertainty of its noise independent variable. Contributions
combine in quadrature:

    u_B**2 = sum_i k_i**2 * sigma_xi**2

A variable with its own type-B uncertainty enters with
`sigma_xi**2 = sigma_xi(tau)**2 + sigma_xi_B**2`, see `BudgetEntry.from_components`.
"""

from dataclasses import dataclass

import numpy as np
from loguru import logger

from nsceval.errors import DomainError, EmptyBudgetError


@dataclass(frozen=True)
class BudgetEntry:
    """One systematic effect of a budget."""

    name: str
    """Effect name"""
    k: float
    """Frequency sensitivity coefficient"""
    sigma_x: float
    """Uncertainty of the noise independent variable"""

    def __post_init__(self):
        if not self.sigma_x >= 0:
            raise DomainError(
                f"NIV uncertainty of '{self.name}' must be >= 0, got {self.sigma_x}"
            )

    @classmethod
    def from_components(cls, name, k, sigma_x, sigma_x_b=0.0):
        """Entry whose NIV uncertainty combines a statistical and a type-B part."""
        if sigma_x < 0 or sigma_x_b < 0:
            raise DomainError(f"NIV uncertainties of '{name}' must be >= 0")
        return cls(name, k, float(np.hypot(sigma_x, sigma_x_b)))

    @property
    def contribution(self):
        """Frequency uncertainty `|k| * sigma_x` caused by this effect"""
        return abs(self.k) * self.sigma_x


@dataclass(frozen=True)
class Budget:
    """Root-sum-square combination of budget entries."""

    entries: tuple[BudgetEntry, ...]
    u_b: float

    def as_rows(self):
        """Entries as dictionaries, for printing"""
        return [
            {
                "name": e.name,
                "k": e.k,
                "sigma_x": e.sigma_x,
                "contribution": e.contribution,
            }
            for e in self.entries
        ]


def budget(entries):
    """
    Combine budget entries in quadrature.

    Parameters
    ----------
    entries : sequence of BudgetEntry
        At least one entry

    Returns
    -------
    Budget
        Entries and `u_B = sqrt(sum(contribution**2))`
    """
    entries = tuple(entries)
    if not entries:
        raise EmptyBudgetError("Budget needs at least one entry")
    contributions = np.array([e.contribution for e in entries])
    u_b = float(np.sqrt(np.sum(contributions**2)))
    logger.info("Combined {} budget entries: u_B = {}", len(entries), u_b)
    return Budget(entries, u_b)
