"""Single-payment credit default swap pricing.

The contract makes one premium payment: at maturity T if the reference loan
survives, or at the average default time tau = T/2 (accrued pro rata) if it
defaults. The protection seller pays (1 - R) x notional at tau on default.
Discounting is continuous. Per unit notional:

    protection         = (1 - R) * pd * D(r, tau)
    premium(s)         = s * [(1 - pd) * T * D(r, T) + pd * tau * D(r, tau)]
    fair spread s*     = protection / annuity

where D(r, t) = exp(-r t) and the bracket is the annuity value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DataError
from .exposure import ExposureQuote


def discount(rate: float, t: float) -> float:
    """Continuously compounded discount factor exp(-rate * t)."""
    if t < 0:
        raise DataError(f"time must be >= 0, got {t}")
    return math.exp(-rate * t)


@dataclass(frozen=True)
class CdsTerms:
    notional: float
    maturity: float
    risk_free_rate: float
    pd: float
    recovery_rate: float

    def __post_init__(self):
        if self.notional < 0:
            raise DataError(f"notional must be >= 0, got {self.notional}")
        if self.maturity <= 0:
            raise DataError(f"maturity must be positive, got {self.maturity}")
        if not 0.0 <= self.pd <= 1.0:
            raise DataError(f"pd out of [0, 1]: {self.pd}")
        if not 0.0 <= self.recovery_rate <= 1.0:
            raise DataError(f"recovery rate out of [0, 1]: {self.recovery_rate}")


@dataclass(frozen=True)
class CdsQuote:
    spread_per_annum: float
    spread_bps: float
    premium_leg_value: float
    protection_leg_value: float


def fair_spread(terms: CdsTerms) -> CdsQuote:
    """Spread equating the premium and protection legs.

    The annuity is strictly positive for any maturity > 0 (whichever of the
    survival and default branches has weight, its time factor is positive),
    so the quotient is always defined; pd = 0 and R = 1 give exactly 0.
    """
    tau = terms.maturity / 2.0
    d_tau = discount(terms.risk_free_rate, tau)
    d_mat = discount(terms.risk_free_rate, terms.maturity)
    protection_unit = (1.0 - terms.recovery_rate) * terms.pd * d_tau
    annuity_unit = (1.0 - terms.pd) * terms.maturity * d_mat + terms.pd * tau * d_tau
    spread = protection_unit / annuity_unit
    return CdsQuote(
        spread_per_annum=spread,
        spread_bps=spread * 1e4,
        premium_leg_value=spread * annuity_unit * terms.notional,
        protection_leg_value=protection_unit * terms.notional,
    )


def price_for_loan(quote: ExposureQuote, maturity_years: float, risk_free_rate: float) -> CdsQuote:
    """Protection on one loan: notional = EAD, maturity = remaining term."""
    terms = CdsTerms(
        notional=quote.ead,
        maturity=maturity_years,
        risk_free_rate=risk_free_rate,
        pd=quote.pd,
        recovery_rate=quote.recovery_rate,
    )
    return fair_spread(terms)
