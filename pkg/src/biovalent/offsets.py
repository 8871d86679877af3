"""Offset pricing: land withdrawn from intensive use, and carbon credits.

Recovery after protection is linear: the gain after ``t`` years is
``c0 * t / t_rec`` where ``c0`` is the biodiversity impact (BDe per m2) of the
land under continued use. The footprint is balanced against the gain averaged
over the offsetting horizon.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError, ScenarioError

M2_PER_HA = 10_000.0


def restoration_gain(c0: float, t_rec: float, t_i: float) -> float:
    if not 0 <= t_i <= t_rec:
        raise DomainError(f"t_i={t_i} outside [0, {t_rec}]")
    return c0 - c0 * ((t_rec - t_i) / t_rec)


def average_gain(c0: float, t_rec: float, horizon: float, discrete: bool = False) -> float:
    """Mean gain over the horizon.

    Continuous mean of the ramp is ``c0 * H / (2 t_rec)``; the discrete variant
    averages whole years t = 1..H, giving ``c0 * (H + 1) / (2 t_rec)``.
    """
    if not 0 < horizon <= t_rec:
        raise DomainError(f"horizon {horizon} must lie in (0, {t_rec}]")
    if c0 < 0:
        raise DomainError("c0 must be >= 0")
    if discrete:
        return c0 * (horizon + 1) / (2 * t_rec)
    return c0 * horizon / (2 * t_rec)


def required_area(footprint_bde: float, avg_gain: float) -> float:
    """Hectares whose averaged gain balances the footprint."""
    if avg_gain <= 0:
        raise ScenarioError(f"average gain must be positive, got {avg_gain}")
    return footprint_bde / avg_gain / M2_PER_HA


def offset_cost(area_ha: float, land_price: float) -> float:
    return area_ha * land_price


def annualize(total: float, horizon: float) -> float:
    return total / horizon


def carbon_offset_cost(tonnes: float, unit_price: float, fx: float = 1.0) -> float:
    return tonnes * unit_price * fx


@dataclass(frozen=True)
class OffsetScenario:
    """One candidate offsetting country.

    Give either ``c0`` (impact of intensive forestry per m2, from which the
    averaged gain is derived) or a reported averaged ``gain`` directly.
    """

    name: str
    country: str
    land_price: float                  # EUR per ha
    c0: float | None = None
    gain: float | None = None          # averaged gain, BDe per m2
    t_rec: float = 100.0
    horizon: float = 30.0
    fraction: float = 1.0              # share of the footprint offset
    discrete: bool = False
    notes: str = ""

    def __post_init__(self):
        if (self.c0 is None) == (self.gain is None):
            raise ScenarioError(f"scenario {self.name!r}: give exactly one of c0 or gain")
        if self.c0 is not None and self.c0 < 0:
            raise ScenarioError(f"scenario {self.name!r}: c0 must be >= 0")
        if not 0 < self.horizon <= self.t_rec:
            raise ScenarioError(f"scenario {self.name!r}: need 0 < horizon <= t_rec")
        if self.land_price <= 0:
            raise ScenarioError(f"scenario {self.name!r}: land price must be positive")
        if not 0 <= self.fraction <= 1:
            raise ScenarioError(f"scenario {self.name!r}: fraction must lie in [0, 1]")

    @property
    def average_gain(self) -> float:
        if self.gain is not None:
            return self.gain
        return average_gain(self.c0, self.t_rec, self.horizon, self.discrete)


@dataclass(frozen=True)
class OffsetQuote:
    scenario: str
    offset_bde: float           # footprint covered
    required_area: float        # ha
    total_cost: float           # EUR
    annual_cost: float          # EUR per year over the horizon
    average_gain: float         # BDe per m2
    horizon: float


def quote_offset(scenario: OffsetScenario, footprint_bde: float) -> OffsetQuote:
    covered = footprint_bde * scenario.fraction
    gain = scenario.average_gain
    area = required_area(covered, gain)
    total = offset_cost(area, scenario.land_price)
    return OffsetQuote(scenario.name, covered, area, total,
                       annualize(total, scenario.horizon), gain, scenario.horizon)


@dataclass(frozen=True)
class CarbonOffsetQuote:
    tonnes: float
    unit_price: float
    fx_rate: float

    @property
    def cost(self) -> float:
        return carbon_offset_cost(self.tonnes, self.unit_price, self.fx_rate)
