"""Footprints per line and category, the biodiversity equivalent, and display formatting."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .characterization import ECOSYSTEMS, FLAG_OK, ImpactFactorSet
from .errors import CategorizationError, CoverageError
from .ledger import MappedConsumption

# share of the world's plant and animal species living in each ecosystem type;
# not renormalized (they sum to 0.999)
BDE_WEIGHTS = {"terrestrial": 0.801, "freshwater": 0.096, "marine": 0.102}

PREFIXES = (("n", 1e-9), ("p", 1e-12), ("f", 1e-15))


@dataclass(frozen=True)
class EcosystemFootprint:
    terrestrial: float = 0.0
    freshwater: float = 0.0
    marine: float = 0.0

    @classmethod
    def from_array(cls, arr) -> "EcosystemFootprint":
        t, f, m = (float(v) for v in arr)
        return cls(t, f, m)

    def as_array(self) -> np.ndarray:
        return np.array([self.terrestrial, self.freshwater, self.marine])

    def __add__(self, other: "EcosystemFootprint") -> "EcosystemFootprint":
        return EcosystemFootprint(self.terrestrial + other.terrestrial,
                                  self.freshwater + other.freshwater,
                                  self.marine + other.marine)


@dataclass(frozen=True)
class BdeQuantity:
    value: float

    @property
    def display(self) -> str:
        return format_bde(self.value)

    @property
    def nano(self) -> float:
        return self.value / 1e-9


def biodiversity_equivalent(bf: EcosystemFootprint) -> BdeQuantity:
    return BdeQuantity(BDE_WEIGHTS["terrestrial"] * bf.terrestrial
                       + BDE_WEIGHTS["freshwater"] * bf.freshwater
                       + BDE_WEIGHTS["marine"] * bf.marine)


def line_footprint(amount: float, bde_per_unit, co2e_per_unit: float) -> tuple[EcosystemFootprint, float]:
    if isinstance(bde_per_unit, Mapping):
        bde_per_unit = [bde_per_unit.get(e, 0.0) for e in ECOSYSTEMS]
    b = np.asarray(bde_per_unit, dtype=float)
    return EcosystemFootprint.from_array(amount * b), amount * co2e_per_unit


@dataclass(frozen=True)
class LineFootprint:
    account_id: str
    category: str
    statement_line: str
    kind: str
    nominal_eur: float        # purchaser price as booked (amount x eur_per_unit for physical lines)
    consumption_eur: float    # harmonized EUR, or display-equivalent EUR for physical lines
    bf: EcosystemFootprint
    co2e_kg: float
    flag: str = FLAG_OK

    @property
    def bde(self) -> float:
        return biodiversity_equivalent(self.bf).value


def compute_line_footprints(mapped: MappedConsumption, factors: ImpactFactorSet | None,
                            strict: bool = True) -> list[LineFootprint]:
    """Footprint of every mapped ledger line.

    A monetary line whose (region, sector) has no factor raises CoverageError in
    strict mode and contributes zero with a ``missing_factor`` flag otherwise.
    """
    out = []
    for ln in mapped.monetary:
        if factors is not None and factors.has(ln.region, ln.sector):
            bde, co2, flag = factors.factors(ln.region, ln.sector)
        elif strict:
            raise CoverageError(f"no impact factor for ({ln.region}, {ln.sector}) "
                                f"needed by account {ln.entry.account_id}")
        else:
            bde, co2, flag = np.zeros(3), 0.0, "missing_factor"
        bf, co2e = line_footprint(ln.harmonized_eur, bde, co2)
        e = ln.entry
        out.append(LineFootprint(e.account_id, e.category, e.statement_line, "monetary",
                                 ln.nominal_eur, ln.harmonized_eur, bf, co2e, flag))
    for ln in mapped.physical:
        e = ln.entry
        bf, co2e = line_footprint(e.amount, ln.intensity.bde_per_unit, ln.intensity.co2e_per_unit)
        out.append(LineFootprint(e.account_id, e.category, e.statement_line, "physical",
                                 ln.display_eur, ln.display_eur, bf, co2e))
    return out


def carbon_footprint(lines: Iterable) -> float:
    """Total kgCO2e. Accepts LineFootprint objects or plain kg numbers."""
    return float(sum(getattr(ln, "co2e_kg", ln) for ln in lines))


def total_bf(lines: Iterable[LineFootprint]) -> EcosystemFootprint:
    acc = EcosystemFootprint()
    for ln in lines:
        acc = acc + ln.bf
    return acc


@dataclass(frozen=True)
class CategoryFootprint:
    category: str
    consumption_eur: float
    nominal_eur: float
    bf: EcosystemFootprint
    co2e_kg: float
    n_lines: int

    @property
    def bde(self) -> BdeQuantity:
        return biodiversity_equivalent(self.bf)

    @property
    def bde_intensity(self) -> float | None:
        """BDe per EUR, undefined (None) without positive consumption."""
        return self.bde.value / self.consumption_eur if self.consumption_eur > 0 else None

    @property
    def co2e_intensity(self) -> float | None:
        return self.co2e_kg / self.consumption_eur if self.consumption_eur > 0 else None


def aggregate_categories(lines: Sequence[LineFootprint], category_map: Mapping[str, str] | None = None,
                         key: str = "category") -> list[CategoryFootprint]:
    """Sum lines per category (or per ``statement_line`` with ``key=``) in first-seen order.

    ``category_map`` renames fine-grained tags to broad categories; tags absent
    from a supplied map are an error so that the partition stays complete.
    """
    groups: dict[str, list[LineFootprint]] = {}
    for ln in lines:
        tag = getattr(ln, key)
        if not tag:
            raise CategorizationError(f"line {ln.account_id} carries no {key}")
        if category_map is not None:
            if tag not in category_map:
                raise CategorizationError(f"{key} {tag!r} (line {ln.account_id}) is not in the category map")
            tag = category_map[tag]
        groups.setdefault(tag, []).append(ln)
    out = []
    for cat, members in groups.items():
        out.append(CategoryFootprint(
            cat,
            float(sum(m.consumption_eur for m in members)),
            float(sum(m.nominal_eur for m in members)),
            total_bf(members),
            carbon_footprint(members),
            len(members),
        ))
    return out


def format_bde(value: float, decimals: int = 2) -> str:
    """Render with an n/p/f prefix so the mantissa lies in [1, 1000); scientific otherwise."""
    if not math.isfinite(value):
        raise ValueError("cannot format a non-finite BDe value")
    for prefix, scale in PREFIXES:
        m = round(value / scale, decimals)
        if 1 <= abs(m) < 1000:
            return f"{m:.{decimals}f} {prefix}BDe"
    return f"{value:.{decimals}e} BDe"


_DISPLAY = re.compile(r"^\s*([-+0-9.eE]+)\s*([npf]?)BDe\s*$")


def parse_bde(text: str) -> float:
    m = _DISPLAY.match(text)
    if not m:
        raise ValueError(f"not a BDe display string: {text!r}")
    scale = dict(PREFIXES).get(m.group(2), 1.0)
    return float(m.group(1)) * scale
