"""From attributed driver quantities to biodiversity impact factors per euro.

The chain, per stressor: shares of each impact region in a demand column ->
equal split of region shares over the characterization countries it stands
for -> multiply by the stressor intensity (unit/EUR) -> multiply by the
country's effective characterization factor -> sum over countries and drivers.
Climate gases skip the location step and use global factors.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import units
from .errors import ConcordanceError, InputError, StructuralError, UnitError
from .mrio import (
    AttributionTensor,
    EconomicCore,
    IntensityTable,
    RegionSectorIndex,
    SatelliteTable,
    footprint_intensity,
    source_attribution,
)

logger = logging.getLogger(__name__)

ECOSYSTEMS = ("terrestrial", "freshwater", "marine")
GLOBAL_CODE = "GLO"
EXCLUDED = "EXCLUDED"

FLAG_OK = "ok"
FLAG_ZERO_COVERAGE = "zero_coverage"
FLAG_ZERO_DEMAND = "zero_demand"


@dataclass(frozen=True)
class RegionConcordance:
    """MRIO region -> characterization countries. ``continents`` is optional (country -> code)."""

    mapping: Mapping[str, tuple[str, ...]]
    continents: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        seen: dict[str, str] = {}
        for region, countries in self.mapping.items():
            if not countries:
                raise ConcordanceError(f"region {region!r} maps to no countries")
            for c in countries:
                if c in seen:
                    raise ConcordanceError(
                        f"country {c!r} listed under both {seen[c]!r} and {region!r}")
                seen[c] = region
        object.__setattr__(self, "mapping", {r: tuple(cs) for r, cs in self.mapping.items()})
        object.__setattr__(self, "continents", dict(self.continents))

    def frequency(self, region: str) -> int:
        return len(self.countries_of(region))

    def countries_of(self, region: str) -> tuple[str, ...]:
        try:
            return self.mapping[region]
        except KeyError:
            raise ConcordanceError(f"MRIO region {region!r} is missing from the region concordance") from None


@dataclass(frozen=True)
class DriverConcordance:
    """MRIO stressor -> [(characterization driver, weight)], or an exclusion reason."""

    mapping: Mapping[str, tuple[tuple[str, float], ...]]
    excluded: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for stressor, targets in self.mapping.items():
            targets = tuple((d, float(w)) for d, w in targets)
            if not targets:
                raise ConcordanceError(f"stressor {stressor!r} has no target drivers")
            ws = np.array([w for _, w in targets])
            if (ws <= 0).any() or abs(ws.sum() - 1.0) > 1e-9:
                raise ConcordanceError(f"weights for {stressor!r} must be positive and sum to 1")
            clean[stressor] = targets
        both = set(clean) & set(self.excluded)
        if both:
            raise ConcordanceError(f"stressors both mapped and excluded: {sorted(both)}")
        for s, why in self.excluded.items():
            if not why:
                raise ConcordanceError(f"excluded stressor {s!r} needs a reason")
        object.__setattr__(self, "mapping", clean)
        object.__setattr__(self, "excluded", dict(self.excluded))

    @classmethod
    def averaged(cls, mapping: Mapping[str, Sequence[str]],
                 excluded: Mapping[str, str] | None = None) -> "DriverConcordance":
        """Uniform weights over each stressor's targets."""
        return cls({s: tuple((d, 1.0 / len(ds)) for d in ds) for s, ds in mapping.items()},
                   excluded or {})

    def covers(self, stressor: str) -> bool:
        return stressor in self.mapping or stressor in self.excluded


@dataclass
class CoverageReport:
    missing: Counter = field(default_factory=Counter)        # (driver, ecosystem) -> zeroed cells
    fallbacks: Counter = field(default_factory=Counter)      # (driver, level) -> cells
    excluded: dict = field(default_factory=dict)             # stressor -> reason
    zero_share_columns: dict = field(default_factory=dict)   # stressor -> count
    warnings: list = field(default_factory=list)

    def warn(self, msg: str):
        logger.warning(msg)
        self.warnings.append(msg)

    def finalize(self):
        """Turn accumulated missing-cell counts into warnings."""
        for (driver, eco), n in sorted(self.missing.items()):
            self.warn(f"{driver}/{eco}: {n} country cells without a factor, set to zero")

    def as_dict(self) -> dict:
        return {
            "missing_cells": {f"{d}|{e}": n for (d, e), n in sorted(self.missing.items())},
            "fallback_cells": {f"{d}|{lvl}": n for (d, lvl), n in sorted(self.fallbacks.items())},
            "excluded_stressors": dict(sorted(self.excluded.items())),
            "zero_share_columns": dict(sorted(self.zero_share_columns.items())),
            "warnings": list(self.warnings),
        }


class CharacterizationTable:
    """cf[driver, location, ecosystem] with a per-driver denominator unit.

    Locations are country codes, continent codes, or ``GLO``; the latter two
    serve as fallbacks for countries without their own value.
    """

    def __init__(self, cells: Mapping[tuple[str, str, str], float], driver_units: Mapping[str, str]):
        for (d, loc, eco), v in cells.items():
            if eco not in ECOSYSTEMS:
                raise InputError(f"unknown ecosystem {eco!r} for driver {d!r}")
            if not np.isfinite(v) or v < 0:
                raise InputError(f"characterization factor for ({d}, {loc}, {eco}) must be finite and >= 0")
            if d not in driver_units:
                raise UnitError(f"driver {d!r} has no unit")
        self.cells = dict(cells)
        self.driver_units = dict(driver_units)
        self._ecosystems: dict[str, set] = {}
        for d, _, eco in self.cells:
            self._ecosystems.setdefault(d, set()).add(eco)

    def __contains__(self, driver: str) -> bool:
        return driver in self._ecosystems

    def unit(self, driver: str) -> str:
        return self.driver_units[driver]

    def ecosystems(self, driver: str) -> set:
        return self._ecosystems.get(driver, set())

    def lookup(self, driver: str, country: str, ecosystem: str,
               continent: str | None = None) -> tuple[float, str]:
        """Value and the level it was found at: country, continent, global or missing."""
        for loc, level in ((country, "country"), (continent, "continent"), (GLOBAL_CODE, "global")):
            if loc is None:
                continue
            v = self.cells.get((driver, loc, ecosystem))
            if v is not None:
                return v, level
        return 0.0, "missing"

    def scaled(self, alpha: float) -> "CharacterizationTable":
        return CharacterizationTable({k: alpha * v for k, v in self.cells.items()}, self.driver_units)


@dataclass(frozen=True)
class ClimateCharacterization:
    """Global climate factors per kg of gas, and GWP100 CO2-equivalence factors.

    Per-gas factors may give ``terrestrial`` plus ``aquatic`` (applied to both
    freshwater and marine) or explicit ``freshwater``/``marine`` values.
    """

    cf: Mapping[str, Mapping[str, float]]
    gwp: Mapping[str, float]

    def __post_init__(self):
        if self.gwp.get("CO2", 1.0) != 1.0:
            raise InputError("CO2 must have gwp = 1")
        for gas, g in self.gwp.items():
            if g < 0:
                raise InputError(f"gwp for {gas} is negative")
        for gas, by_eco in self.cf.items():
            for eco, v in by_eco.items():
                if eco not in (*ECOSYSTEMS, "aquatic"):
                    raise InputError(f"unknown climate ecosystem key {eco!r} for {gas}")
                if v < 0:
                    raise InputError(f"climate factor for {gas}/{eco} is negative")

    def factors(self, gas: str = "CO2") -> np.ndarray:
        try:
            by_eco = self.cf[gas]
        except KeyError:
            raise ConcordanceError(f"no climate characterization factor for {gas!r}") from None
        aquatic = by_eco.get("aquatic", 0.0)
        return np.array([
            by_eco.get("terrestrial", 0.0),
            by_eco.get("freshwater", aquatic),
            by_eco.get("marine", aquatic),
        ])

    def gwp_of(self, gas: str) -> float:
        if gas == "CO2":
            return 1.0
        try:
            return float(self.gwp[gas])
        except KeyError:
            raise ConcordanceError(f"no gwp for gas {gas!r}") from None


class ImpactFactorSet:
    """BDe fraction per EUR by ecosystem, and kgCO2e per EUR, for every (region, sector)."""

    def __init__(self, index: RegionSectorIndex, bde_per_eur, co2e_per_eur,
                 coverage_flag: Sequence[str] | None = None, provenance: dict | None = None):
        n = len(index)
        bde = np.array(bde_per_eur, dtype=float).reshape(n, len(ECOSYSTEMS))
        co2 = np.array(co2e_per_eur, dtype=float).reshape(n)
        if not (np.all(np.isfinite(bde)) and np.all(np.isfinite(co2))):
            raise InputError("impact factors must be finite")
        if (bde < 0).any() or (co2 < 0).any():
            raise InputError("impact factors must be non-negative")
        if coverage_flag is None:
            coverage_flag = [FLAG_ZERO_COVERAGE if not (bde[i].any() or co2[i]) else FLAG_OK
                             for i in range(n)]
        if len(coverage_flag) != n:
            raise StructuralError("one coverage flag per (region, sector) is required")
        self.index = index
        self.bde_per_eur = bde
        self.co2e_per_eur = co2
        self.coverage_flag = tuple(coverage_flag)
        self.provenance = dict(provenance or {})

    def __eq__(self, other):
        if not isinstance(other, ImpactFactorSet):
            return NotImplemented
        return (self.index == other.index
                and np.array_equal(self.bde_per_eur, other.bde_per_eur)
                and np.array_equal(self.co2e_per_eur, other.co2e_per_eur)
                and self.coverage_flag == other.coverage_flag)

    def __repr__(self):
        return (f"ImpactFactorSet({self.index.n_regions} regions x {self.index.n_sectors} sectors, "
                f"{sum(f != FLAG_OK for f in self.coverage_flag)} flagged)")

    def has(self, region: str, sector: str) -> bool:
        return region in self.index.regions and sector in self.index.sectors

    def factors(self, region: str, sector: str) -> tuple[np.ndarray, float, str]:
        n = self.index.position(region, sector)
        return self.bde_per_eur[n], float(self.co2e_per_eur[n]), self.coverage_flag[n]


# --------------------------------------------------------------------------- operations


def driver_share(t) -> tuple[np.ndarray, np.ndarray]:
    """Normalize each demand column over impact regions; zero columns stay zero and are flagged."""
    values = t.values if isinstance(t, AttributionTensor) else np.asarray(t, dtype=float)
    if (values < 0).any():
        raise InputError("attribution entries must be >= 0")
    totals = values.sum(axis=0)
    degenerate = totals == 0
    share = np.divide(values, totals, out=np.zeros_like(values), where=~degenerate)
    return share, degenerate


def allocate_to_countries(share, regions: Sequence[str],
                          concordance: RegionConcordance) -> tuple[tuple[str, ...], np.ndarray]:
    """Split each region's share equally over its countries. Returns (countries, unit[c, col])."""
    share = np.asarray(share, dtype=float)
    if share.shape[0] != len(regions):
        raise StructuralError(f"{share.shape[0]} share rows but {len(regions)} regions")
    countries: list[str] = []
    rows = []
    for i, region in enumerate(regions):
        cs = concordance.countries_of(region)
        countries.extend(cs)
        rows.append(np.repeat(share[i:i + 1] / len(cs), len(cs), axis=0))
    return tuple(countries), np.vstack(rows)


def driver_monetary_factor(unit, intensity) -> np.ndarray:
    """Located stressor per EUR: country allocation times the column intensity."""
    u = np.asarray(unit, dtype=float)
    inten = intensity.values if isinstance(intensity, IntensityTable) else np.asarray(intensity, dtype=float)
    if u.ndim != 2 or inten.shape != (u.shape[1],):
        raise StructuralError(f"allocation {u.shape} and intensity {inten.shape} do not share the column index")
    return u * inten[np.newaxis, :]


@dataclass(frozen=True)
class EffectiveCF:
    values: np.ndarray      # (countries, ecosystems)
    unit: str               # denominator unit, e.g. m2
    excluded: bool = False
    note: str = ""


def map_driver_categories(stressor: str, concordance: DriverConcordance,
                          cf: CharacterizationTable, countries: Sequence[str],
                          continents: Mapping[str, str] | None = None,
                          report: CoverageReport | None = None) -> EffectiveCF:
    """Weighted combination of the characterization drivers a stressor maps to."""
    continents = continents or {}
    if stressor in concordance.excluded:
        reason = concordance.excluded[stressor]
        if report is not None:
            report.excluded[stressor] = reason
        return EffectiveCF(np.zeros((len(countries), len(ECOSYSTEMS))), "", True, reason)
    if stressor not in concordance.mapping:
        raise ConcordanceError(f"stressor {stressor!r} is neither mapped nor excluded in the driver concordance")
    targets = concordance.mapping[stressor]
    unit = None
    out = np.zeros((len(countries), len(ECOSYSTEMS)))
    for driver, weight in targets:
        if driver not in cf:
            raise ConcordanceError(f"driver {driver!r} (for {stressor!r}) has no characterization factors")
        du = units.denominator(cf.unit(driver))
        if unit is None:
            unit = du
        elif du != unit:
            raise UnitError(f"targets of {stressor!r} mix units {unit!r} and {du!r}")
        covered = cf.ecosystems(driver)
        for e, eco in enumerate(ECOSYSTEMS):
            if eco not in covered:
                continue
            for c, country in enumerate(countries):
                v, level = cf.lookup(driver, country, eco, continents.get(country))
                if report is not None and level != "country":
                    if level == "missing":
                        report.missing[(driver, eco)] += 1
                    else:
                        report.fallbacks[(driver, level)] += 1
                out[c, e] += weight * v
    return EffectiveCF(out, unit or "")


def biodiversity_factor(dr, cf_eff: EffectiveCF | np.ndarray, dr_unit: str | None = None,
                        cf_unit: str | None = None) -> np.ndarray:
    """bd[c, col, eco] = dr[c, col] * cf_eff[c, eco] (BDe fraction per EUR)."""
    dr = np.asarray(dr, dtype=float)
    if isinstance(cf_eff, EffectiveCF):
        cf_unit = cf_unit or cf_eff.unit
        cf_vals = cf_eff.values
    else:
        cf_vals = np.asarray(cf_eff, dtype=float)
    if cf_vals.shape[0] != dr.shape[0]:
        raise StructuralError(f"{dr.shape[0]} located rows but {cf_vals.shape[0]} CF rows")
    scale = 1.0
    if dr_unit and cf_unit:
        scale = units.conversion(dr_unit, cf_unit)
    return scale * dr[:, :, np.newaxis] * cf_vals[:, np.newaxis, :]


def co2e_intensity(gas_intensities: Mapping[str, np.ndarray], climate: ClimateCharacterization) -> np.ndarray:
    """kgCO2e per EUR from per-gas kg/EUR intensities."""
    total = None
    for gas, inten in gas_intensities.items():
        term = climate.gwp_of(gas) * np.asarray(inten, dtype=float)
        total = term if total is None else total + term
    if total is None:
        raise InputError("no greenhouse-gas intensities supplied")
    return total


def climate_biodiversity_factor(co2e_per_eur, climate: ClimateCharacterization,
                                gas_intensities: Mapping[str, np.ndarray] | None = None) -> np.ndarray:
    """Climate factor per (column, ecosystem).

    CO2e is characterized with the CO2 factor. Gases that carry their own
    factor in ``climate.cf`` are taken out of the CO2e pool and characterized
    directly when their intensities are supplied.
    """
    pool = np.array(co2e_per_eur, dtype=float)
    if (pool < 0).any():
        raise InputError("co2e_per_eur must be >= 0")
    out = np.zeros((pool.size, len(ECOSYSTEMS)))
    for gas, inten in (gas_intensities or {}).items():
        if gas == "CO2" or gas not in climate.cf:
            continue
        inten = np.asarray(inten, dtype=float)
        out += np.outer(inten, climate.factors(gas))
        pool = pool - climate.gwp_of(gas) * inten
    out += np.outer(np.maximum(pool, 0.0), climate.factors("CO2"))
    return out


def total_factor(located: Iterable[np.ndarray], climate_factors, index: RegionSectorIndex,
                 co2e_per_eur=None, zero_demand=None, provenance: dict | None = None) -> ImpactFactorSet:
    """Sum located factors over countries and drivers, add climate; flag empty columns.

    ``located`` items are either (countries, columns, ecosystems) arrays or
    already country-summed (columns, ecosystems) arrays.
    """
    n = len(index)
    bde = np.zeros((n, len(ECOSYSTEMS)))
    for arr in located:
        arr = np.asarray(arr, dtype=float)
        bde += arr.sum(axis=0) if arr.ndim == 3 else arr
    climate_factors = np.asarray(climate_factors, dtype=float)
    if climate_factors.size:
        bde += climate_factors.reshape(n, len(ECOSYSTEMS))
    co2 = np.zeros(n) if co2e_per_eur is None else np.asarray(co2e_per_eur, dtype=float)
    zd = np.zeros(n, dtype=bool) if zero_demand is None else np.asarray(zero_demand, dtype=bool)
    flags = []
    for i in range(n):
        if zd[i]:
            flags.append(FLAG_ZERO_DEMAND)
        elif not bde[i].any() and co2[i] == 0:
            flags.append(FLAG_ZERO_COVERAGE)
        else:
            flags.append(FLAG_OK)
    return ImpactFactorSet(index, bde, co2, flags, provenance)


# --------------------------------------------------------------------------- full chain


@dataclass(frozen=True)
class FactorInputs:
    """Everything needed to derive an ImpactFactorSet.

    ``attribution_core``/``attribution_satellite`` locate the drivers (shares);
    ``intensity_core``/``intensity_satellite`` give per-EUR magnitudes. They may
    be the same tables or tables of different base years.
    """

    intensity_core: EconomicCore
    intensity_satellite: SatelliteTable
    regions: RegionConcordance
    drivers: DriverConcordance
    cf: CharacterizationTable
    climate: ClimateCharacterization
    gases: Mapping[str, str] = field(default_factory=dict)   # satellite row -> gas
    attribution_core: EconomicCore | None = None
    attribution_satellite: SatelliteTable | None = None


def build_factor_set(inp: FactorInputs, report: CoverageReport | None = None) -> tuple[ImpactFactorSet, CoverageReport]:
    report = report if report is not None else CoverageReport()
    core_i = inp.intensity_core
    core_a = inp.attribution_core or core_i
    sat_i = inp.intensity_satellite
    sat_a = inp.attribution_satellite or sat_i
    index = core_i.index
    if core_a.index != index:
        raise StructuralError("attribution and intensity tables must share the region/sector index")
    sat_i.check_length(len(index))
    sat_a.check_length(len(index))

    L_i = core_i.L
    L_a = L_i if core_a is core_i else core_a.L

    regions = index.regions
    countries = None
    located = []
    gas_intensities: dict[str, np.ndarray] = {}
    zero_demand = np.zeros(len(index), dtype=bool)

    for name in sat_i.names:
        unit = sat_i.unit(name)
        inten = footprint_intensity(sat_i.row(name), L_i, core_i.Y, core_i.x, index, name, unit)
        zero_demand |= inten.zero_demand
        if name in inp.gases:
            gas = inp.gases[name]
            kg = inten.values * units.conversion(unit, "kg")
            gas_intensities[gas] = gas_intensities.get(gas, 0.0) + kg
            continue
        if not inp.drivers.covers(name):
            raise ConcordanceError(f"stressor {name!r} is neither mapped nor excluded in the driver concordance")
        if name in inp.drivers.excluded:
            report.excluded[name] = inp.drivers.excluded[name]
            continue
        if name not in sat_a.names:
            raise StructuralError(f"stressor {name!r} missing from the attribution satellite table")
        att = source_attribution(sat_a.row(name), L_a, core_a.Y, core_a.x, index, name, sat_a.unit(name))
        share, degenerate = driver_share(att)
        # columns with intensity but no located attribution lose their mass: record it
        lost = degenerate & (inten.values > 0)
        if lost.any():
            report.zero_share_columns[name] = int(lost.sum())
            report.warn(f"{name}: {int(lost.sum())} columns have intensity but no located source; contribution dropped")
        cs, unit_alloc = allocate_to_countries(share, regions, inp.regions)
        if countries is None:
            countries = cs
        dr = driver_monetary_factor(unit_alloc, inten)
        eff = map_driver_categories(name, inp.drivers, inp.cf, cs, inp.regions.continents, report)
        bd = biodiversity_factor(dr, eff, unit, eff.unit)
        located.append(bd.sum(axis=0))

    report.finalize()
    co2e = co2e_intensity(gas_intensities, inp.climate) if gas_intensities else np.zeros(len(index))
    climate = climate_biodiversity_factor(co2e, inp.climate, gas_intensities)
    provenance = {
        "intensity_year": core_i.year,
        "attribution_year": core_a.year,
        "stressors": list(sat_i.names),
        "climate_gases": dict(inp.gases),
    }
    return total_factor(located, climate, index, co2e, zero_demand, provenance), report
