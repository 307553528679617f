"""Bribery games in rating systems: equilibria, dynamics and calibration."""

from ._core import *  # noqa: F401,F403
from ._core import (  # noqa: F401
    BriberyError,
    InvalidInput,
    Market,
    NonConvergence,
    PayoffMatrix,
    SellerState,
)

__version__ = "0.1.0"


def example1_market():
    """The worked duopoly: 5 raters at 0.2, 2 raters at 0.5, 20 buyers, k = 2."""
    return Market(
        [SellerState.uniform("i", 5, 0.2), SellerState.uniform("j", 2, 0.5)],
        total_buyers=20,
        profit_per_purchase=2.0,
    )
