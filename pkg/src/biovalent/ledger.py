"""Organizational consumption accounts and their price harmonization.

Monetary entries are brought from purchaser prices in the accounting year to
basic prices in the factor base year:

    harmonized = amount * (1 - inflation_factor) * (1 - bpcf)

``inflation_factor`` is the share of the nominal value attributable to price
increase since the base year (so a 10 % share removes 10 % of the amount).
Physical entries (kWh, km, ...) bypass price handling and carry their own
intensities.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import ConfigurationError, DegenerateSectorError, InputError, MappingError


MONETARY = "monetary"
PHYSICAL = "physical"
KINDS = (MONETARY, PHYSICAL)


@dataclass(frozen=True)
class LedgerEntry:
    account_id: str
    account_name: str
    year: int
    kind: str
    amount: float
    unit: str = "EUR"
    category: str = ""
    statement_line: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"entry {self.account_id}: kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == PHYSICAL and not self.unit:
            raise InputError(f"physical entry {self.account_id} needs a unit")
        if not np.isfinite(self.amount):
            raise InputError(f"entry {self.account_id}: amount is not finite")

    @property
    def is_credit(self) -> bool:
        return self.amount < 0


@dataclass(frozen=True)
class Ledger:
    entries: tuple[LedgerEntry, ...]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def credits(self) -> list[LedgerEntry]:
        return [e for e in self.entries if e.is_credit]

    @property
    def years(self) -> set[int]:
        return {e.year for e in self.entries}

    def merged(self, other: "Ledger") -> "Ledger":
        return Ledger(self.entries + other.entries)


@dataclass(frozen=True)
class PhysicalIntensity:
    """Direct per-unit intensities for a physical account (e.g. per kWh)."""

    bde_per_unit: tuple[float, float, float]
    co2e_per_unit: float
    unit: str
    eur_per_unit: float | None = None   # booked price per unit; no effect on the footprint

    def __post_init__(self):
        b = tuple(float(v) for v in self.bde_per_unit)
        if len(b) != 3 or min(b) < 0 or self.co2e_per_unit < 0:
            raise InputError("physical intensities must be three non-negative BDe values and a non-negative CO2e")
        object.__setattr__(self, "bde_per_unit", b)


@dataclass(frozen=True)
class AccountMapping:
    monetary: Mapping[str, tuple[str, str]] = field(default_factory=dict)       # id -> (region, sector)
    physical: Mapping[str, PhysicalIntensity] = field(default_factory=dict)     # id -> intensities

    def __post_init__(self):
        both = set(self.monetary) & set(self.physical)
        if both:
            raise InputError(f"accounts mapped both as monetary and physical: {sorted(both)}")


@dataclass(frozen=True)
class SectorPrices:
    """Taxes, subsidies, non-deductible VAT, trade/transport margins and total supply."""

    tax: float
    sub: float
    vat: float
    ttm: float
    sup: float


class InflationTable(dict):
    """year -> inflation factor relative to the factor base year."""

    def factor(self, year: int) -> float:
        try:
            return self[year]
        except KeyError:
            raise ConfigurationError(f"no inflation factor for year {year}") from None


def adjust_inflation(fap: float, inflation_factor: float) -> float:
    return fap * (1 - inflation_factor)


def compute_bpcf(p: SectorPrices, sector: str = "") -> float:
    """Share of the purchaser price made of taxes net of subsidies, VAT and margins."""
    margin = p.tax - p.sub + p.vat + p.ttm
    denom = p.sup + margin
    if denom == 0:
        raise DegenerateSectorError(f"basic-price denominator is zero for sector {sector!r}", sector=sector)
    return margin / denom


def compute_bpcf_table(inputs: Mapping[str, SectorPrices]) -> dict[str, float]:
    return {k: compute_bpcf(p, k) for k, p in inputs.items()}


def harmonize_price(fap: float, inflation_factor: float, bpcf: float) -> float:
    return adjust_inflation(fap, inflation_factor) * (1 - bpcf)


@dataclass(frozen=True)
class MonetaryLine:
    entry: LedgerEntry
    region: str
    sector: str
    nominal_eur: float
    harmonized_eur: float


@dataclass(frozen=True)
class PhysicalLine:
    entry: LedgerEntry
    intensity: PhysicalIntensity

    @property
    def display_eur(self) -> float:
        p = self.intensity.eur_per_unit
        return 0.0 if p is None else self.entry.amount * p


@dataclass(frozen=True)
class MappedConsumption:
    monetary: tuple[MonetaryLine, ...]
    physical: tuple[PhysicalLine, ...]

    def by_sector(self) -> dict[tuple[str, str], float]:
        out: dict[tuple[str, str], float] = OrderedDict()
        for ln in self.monetary:
            key = (ln.region, ln.sector)
            out[key] = out.get(key, 0.0) + ln.harmonized_eur
        return out

    def audit(self) -> list[dict]:
        rows = []
        for ln in self.monetary:
            rows.append({"account_id": ln.entry.account_id, "route": MONETARY,
                         "region": ln.region, "sector": ln.sector,
                         "nominal_eur": ln.nominal_eur, "harmonized_eur": ln.harmonized_eur})
        for ln in self.physical:
            rows.append({"account_id": ln.entry.account_id, "route": PHYSICAL,
                         "region": "", "sector": "", "amount": ln.entry.amount,
                         "unit": ln.entry.unit})
        return rows


def map_accounts(ledger: Ledger | Iterable[LedgerEntry], mapping: AccountMapping,
                 inflation: Mapping[int, float], bpcf: Mapping[str, float]) -> MappedConsumption:
    """Route every entry to a (region, sector) with harmonized EUR, or to its physical intensity."""
    entries = list(ledger)
    unmapped = {e.account_id for e in entries
                if (e.account_id not in mapping.physical if e.kind == PHYSICAL
                    else e.account_id not in mapping.monetary)}
    if unmapped:
        raise MappingError(unmapped)
    if not isinstance(inflation, InflationTable):
        inflation = InflationTable(inflation)
    monetary, physical = [], []
    for e in entries:
        if e.kind == PHYSICAL:
            intensity = mapping.physical[e.account_id]
            if intensity.unit and intensity.unit != e.unit:
                raise InputError(f"account {e.account_id}: entry unit {e.unit!r} "
                                 f"but intensity is per {intensity.unit!r}")
            physical.append(PhysicalLine(e, intensity))
            continue
        region, sector = mapping.monetary[e.account_id]
        try:
            b = bpcf[sector]
        except KeyError:
            raise ConfigurationError(f"no basic-price conversion factor for sector {sector!r}") from None
        hp = harmonize_price(e.amount, inflation.factor(e.year), b)
        monetary.append(MonetaryLine(e, region, sector, e.amount, hp))
    return MappedConsumption(tuple(monetary), tuple(physical))
