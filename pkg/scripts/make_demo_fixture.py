#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixture in src/biovalent/data/demo/.

Five MRIO regions (two of them rest-of-world aggregates) x five sectors, two
base years (shares from the older table, intensities from the newer one), a
small characterization table with continental/global fallbacks and gaps, and
a university-style ledger. Deterministic for a fixed seed.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from biovalent.mrio import EconomicCore, RegionSectorIndex, SatelliteTable
from biovalent.schemas import write_core, write_csv, write_satellite

OUT = Path(__file__).resolve().parents[1] / "src" / "biovalent" / "data" / "demo"

REGIONS = ("FI", "BR", "DE", "WE", "WL")
SECTORS = ("AGR", "FOR", "ENE", "MAN", "SRV")
COUNTRIES = {
    "FI": [("FIN", "EU")],
    "BR": [("BRA", "SA")],
    "DE": [("DEU", "EU")],
    "WE": [("NOR", "EU"), ("CHE", "EU"), ("ISL", "EU"), ("SRB", "EU")],
    "WL": [("ARG", "SA"), ("CHL", "SA"), ("PER", "SA"), ("COL", "SA"), ("VEN", "SA")],
}

# stressor -> (unit, dominant sector, per-EUR-of-output scale)
STRESSORS = {
    "Cropland - Cereal grains nec": ("km2", "AGR", 4e-7),
    "Cropland - Fodder crops-Cattle": ("km2", "AGR", 2e-7),
    "Permanent pastures - Grazing-Cattle": ("km2", "AGR", 6e-7),
    "Forest area - Forestry": ("km2", "FOR", 3e-6),
    "Forest area - Marginal use": ("km2", "FOR", 5e-7),
    "Other land Use: Total": ("km2", "SRV", 2e-8),
    "Water Consumption Blue - Agriculture": ("Mm3", "AGR", 1e-7),
    "Water Consumption Blue - Electricity": ("Mm3", "ENE", 5e-8),
    "NOx - combustion - air": ("kg", "ENE", 8e-4),
    "NH3 - combustion - air": ("kg", "AGR", 4e-4),
    "P - agriculture - water": ("kg", "AGR", 5e-5),
    "N - agriculture - water": ("kg", "AGR", 2e-4),
    "CO2 - combustion - air": ("kg", "ENE", 1.5),
    "CH4 - combustion - air": ("kg", "AGR", 8e-3),
    "N2O - combustion - air": ("kg", "AGR", 6e-4),
}

# land productivity differs by region: tropical and rest-of-world regions use more land per EUR
REGION_LAND = {"FI": 1.0, "BR": 3.0, "DE": 0.6, "WE": 0.8, "WL": 2.5}


def economy(rng, index: RegionSectorIndex, year: int, role: str) -> EconomicCore:
    n = len(index)
    A = rng.uniform(0, 1, (n, n))
    # trade is thinner than domestic sourcing
    for a in range(n):
        for b in range(n):
            if a // index.n_sectors != b // index.n_sectors:
                A[a, b] *= 0.15
    A *= 0.45 / A.sum(axis=0, keepdims=True)
    final = rng.uniform(1e9, 3e10, n)
    x = np.linalg.solve(np.eye(n) - A, final)
    Z = A * x[np.newaxis, :]
    R = index.n_regions
    Y = np.zeros((n, R))
    for a in range(n):
        home = a // index.n_sectors
        w = rng.uniform(0.2, 1.0, R)
        w[home] += 3.0
        Y[a] = final[a] * w / w.sum()
    # drop rounding noise so that x = Z1 + Y1 holds after the CSV round trip
    return EconomicCore(index, np.round(Z, 2), np.round(Y, 2), None, year, role)


def satellite(rng, index: RegionSectorIndex, core: EconomicCore) -> SatelliteTable:
    names, units, rows = [], [], []
    for name, (unit, home, scale) in STRESSORS.items():
        v = np.zeros(len(index))
        for n, (r, s) in enumerate(index.pairs()):
            share = 1.0 if s == home else rng.uniform(0.0, 0.08)
            land = REGION_LAND[r] if unit == "km2" else 1.0
            v[n] = core.x[n] * scale * share * land * rng.uniform(0.6, 1.4)
        names.append(name)
        units.append(unit)
        rows.append(np.round(v, 6))
    return SatelliteTable(tuple(names), tuple(units), np.vstack(rows))


def characterization_rows(rng) -> list[list]:
    # (driver, unit, ecosystems, FIN-level base, tropical multiplier)
    drivers = [
        ("Land stress: Annual crops", "PDF/m2", ("terrestrial",), 3.1e-17, 60),
        ("Land stress: Permanent crops", "PDF/m2", ("terrestrial",), 2.7e-17, 55),
        ("Land stress: Pasture", "PDF/m2", ("terrestrial",), 2.2e-17, 50),
        ("Land stress: Intensive forestry", "PDF/m2", ("terrestrial",), 2.65e-17, 86),
        ("Land stress: Extensive forestry", "PDF/m2", ("terrestrial",), 1.1e-17, 80),
        ("Land stress: Urban", "PDF/m2", ("terrestrial",), 3.6e-17, 45),
        ("Water stress", "PDF/m3", ("terrestrial", "freshwater"), 4.0e-15, 20),
        ("Photochemical ozone formation", "PDF/kg", ("terrestrial",), 1.5e-15, 4),
        ("Terrestrial acidification", "PDF/kg", ("terrestrial",), 3.0e-15, 6),
        ("Freshwater eutrophication", "PDF/kg", ("freshwater",), 2.0e-13, 8),
        ("Marine eutrophication", "PDF/kg", ("marine",), 4.0e-15, 3),
    ]
    tropical = {"BRA", "ARG", "CHL", "PER", "COL", "VEN"}
    # cells intentionally absent so that fallbacks (continent, then global) are exercised
    gaps = {("ISL", None), ("VEN", None), ("SRB", "Water stress")}
    rows = []
    for driver, unit, ecos, base, mult in drivers:
        for region, countries in COUNTRIES.items():
            for iso, _ in countries:
                if (iso, None) in gaps or (iso, driver) in gaps:
                    continue
                if iso == "FIN" and driver == "Land stress: Intensive forestry":
                    f = 1.0
                else:
                    f = (mult if iso in tropical else 1.0) * rng.uniform(0.7, 1.3)
                for eco in ecos:
                    scale = 0.3 if eco == "freshwater" and driver == "Water stress" else 1.0
                    rows.append([driver, iso, eco, float(f"{base * f * scale:.4g}"), unit])
        for eco in ecos:
            rows.append([driver, "EU", eco, float(f"{base * 1.1:.4g}"), unit])
            # no global value for urban land: Venezuela stays uncovered there
            if driver != "Land stress: Urban":
                rows.append([driver, "GLO", eco, float(f"{base * 12:.4g}"), unit])
    return rows


LEDGER = [
    # account_id, name, year, kind, amount, unit, category, statement_line
    ("4000", "Salaries", 2023, "monetary", 41_000_000, "EUR", "Staff-related services", "Staff expenses"),
    ("4010", "Occupational health care", 2023, "monetary", 1_250_000, "EUR", "Staff-related services", "Staff expenses"),
    ("6800", "Depreciation of buildings", 2023, "monetary", 900_000, "EUR", "Construction and maintenance", "Depreciation"),
    ("6810", "Depreciation of machinery", 2023, "monetary", 420_000, "EUR", "Machinery and supplies", "Depreciation"),
    ("7100", "Research grants paid", 2023, "monetary", 1_300_000, "EUR", "Other services", "Grants"),
    ("5000", "Laboratory chemicals", 2023, "monetary", 1_800_000, "EUR", "Machinery and supplies", "Raw materials, equipment, and goods"),
    ("5010", "IT hardware", 2023, "monetary", 2_600_000, "EUR", "IT supplies, licenses and services", "Raw materials, equipment, and goods"),
    ("5020", "Furniture", 2022, "monetary", 640_000, "EUR", "Machinery and supplies", "Raw materials, equipment, and goods"),
    ("5030", "Paper and office supplies", 2023, "monetary", 310_000, "EUR", "Office supplies", "Raw materials, equipment, and goods"),
    ("5040", "Imported lab equipment", 2023, "monetary", 950_000, "EUR", "Machinery and supplies", "Raw materials, equipment, and goods"),
    ("5900", "Supplier credit note", 2023, "monetary", -120_000, "EUR", "Machinery and supplies", "Raw materials, equipment, and goods"),
    ("6000", "Catering and food services", 2023, "monetary", 1_700_000, "EUR", "Food and related services", "Services"),
    ("6010", "Coffee and tea", 2023, "monetary", 180_000, "EUR", "Food and related services", "Services"),
    ("6020", "Cleaning services", 2023, "monetary", 1_100_000, "EUR", "Cleaning and waste", "Services"),
    ("6030", "Software licenses", 2023, "monetary", 2_300_000, "EUR", "IT supplies, licenses and services", "Services"),
    ("6040", "Consulting", 2023, "monetary", 900_000, "EUR", "Other services", "Services"),
    ("6100", "Building rents", 2023, "monetary", 9_800_000, "EUR", "Rents", "Rents"),
    ("6200", "Flights", 2023, "physical", 6_500_000, "pkm", "Business travel", "Travel"),
    ("6210", "Hotels", 2023, "monetary", 650_000, "EUR", "Business travel", "Travel"),
    ("6220", "Rail and bus", 2023, "monetary", 210_000, "EUR", "Business travel", "Travel"),
    ("6300", "District heat", 2023, "physical", 42_000, "MWh", "Heat", "Other"),
    ("6310", "Electricity", 2023, "physical", 31_000_000, "kWh", "Electricity", "Other"),
    ("6320", "Water and sewage", 2023, "monetary", 260_000, "EUR", "Water", "Other"),
    ("6330", "Waste management", 2023, "monetary", 330_000, "EUR", "Cleaning and waste", "Other"),
    ("6340", "Maintenance and repairs", 2023, "monetary", 1_400_000, "EUR", "Construction and maintenance", "Other"),
    ("6350", "Postage and printing", 2023, "monetary", 190_000, "EUR", "Office supplies", "Other"),
]

MAPPING = {
    "4000": ("FI", "SRV"), "4010": ("FI", "SRV"), "6800": ("FI", "MAN"), "6810": ("DE", "MAN"),
    "7100": ("FI", "SRV"), "5000": ("DE", "MAN"), "5010": ("WE", "MAN"), "5020": ("FI", "FOR"),
    "5030": ("FI", "FOR"), "5040": ("DE", "MAN"), "5900": ("DE", "MAN"), "6000": ("FI", "AGR"),
    "6010": ("BR", "AGR"), "6020": ("FI", "SRV"), "6030": ("WL", "SRV"), "6040": ("FI", "SRV"),
    "6100": ("FI", "SRV"), "6210": ("FI", "SRV"), "6220": ("FI", "ENE"), "6320": ("FI", "ENE"),
    "6330": ("FI", "SRV"), "6340": ("FI", "MAN"), "6350": ("FI", "FOR"),
}
# account -> (bde terrestrial, freshwater, marine per unit, kgCO2e per unit, unit, EUR per unit)
PHYSICAL = {
    "6200": (2.0e-17, 1.5e-18, 8.0e-19, 0.15, "pkm", 0.11),
    "6300": (1.2e-13, 4.0e-15, 1.0e-15, 150.0, "MWh", 78.0),
    "6310": (6.0e-17, 5.0e-18, 1.0e-18, 0.07, "kWh", 0.09),
}


def main(out: Path, seed: int) -> None:
    rng = np.random.default_rng(seed)
    out.mkdir(parents=True, exist_ok=True)
    index = RegionSectorIndex(REGIONS, SECTORS)
    core_2011 = economy(rng, index, 2011, "attribution")
    core_2019 = economy(rng, index, 2019, "intensity")
    write_core(core_2011, out / "core_2011.csv", out / "final_demand_2011.csv")
    write_core(core_2019, out / "core_2019.csv", out / "final_demand_2019.csv")
    write_satellite(satellite(rng, index, core_2011), index, out / "satellite_2011.csv")
    write_satellite(satellite(rng, index, core_2019), index, out / "satellite_2019.csv")

    write_csv(out / "region_concordance.csv", ["mrio_region", "country_iso3", "continent"],
              [[r, iso, cont] for r, cs in COUNTRIES.items() for iso, cont in cs])
    write_csv(out / "driver_concordance.csv", ["mrio_stressor", "lcia_driver", "weight"], [
        ["Cropland - Cereal grains nec", "Land stress: Annual crops", ""],
        ["Cropland - Cereal grains nec", "Land stress: Permanent crops", ""],
        ["Cropland - Fodder crops-Cattle", "Land stress: Annual crops", ""],
        ["Permanent pastures - Grazing-Cattle", "Land stress: Pasture", ""],
        ["Forest area - Forestry", "Land stress: Intensive forestry", ""],
        ["Forest area - Forestry", "Land stress: Extensive forestry", ""],
        ["Forest area - Marginal use", "EXCLUDED", "no data available in the MRIO satellite"],
        ["Other land Use: Total", "Land stress: Urban", "1"],
        ["Water Consumption Blue - Total", "Water stress", ""],
        ["NOx - combustion - air", "Photochemical ozone formation", ""],
        ["NH3 - combustion - air", "Terrestrial acidification", ""],
        ["P - agriculture - water", "Freshwater eutrophication", ""],
        ["N - agriculture - water", "Marine eutrophication", ""],
    ])
    write_csv(out / "characterization.csv", ["driver", "country_iso3", "ecosystem", "cf", "unit"],
              characterization_rows(rng))

    write_csv(out / "ledger.csv", ["account_id", "account_name", "year", "kind", "amount", "unit",
                                   "category", "statement_line"], LEDGER)
    rows = [[a, r, s, "", "", "", "", "", ""] for a, (r, s) in MAPPING.items()]
    rows += [[a, "", "", t, f, m, c, u, p] for a, (t, f, m, c, u, p) in PHYSICAL.items()]
    write_csv(out / "account_mapping.csv", ["account_id", "consumption_region", "sector", "bde_terrestrial",
                                            "bde_freshwater", "bde_marine", "co2e_per_unit", "unit",
                                            "eur_per_unit"], rows)
    write_csv(out / "basic_prices.csv", ["sector", "tax", "sub", "vat", "ttm", "sup"], [
        ["AGR", 4.0, 9.0, 1.5, 22.0, 100.0],
        ["FOR", 1.0, 0.5, 0.5, 8.0, 100.0],
        ["ENE", 12.0, 1.0, 2.0, 3.0, 100.0],
        ["MAN", 2.0, 0.0, 1.0, 14.0, 100.0],
        ["SRV", 1.0, 0.0, 3.0, 1.0, 100.0],
    ])
    write_csv(out / "inflation.csv", ["year", "inflation_factor"], [[2022, 0.12], [2023, 0.16]])
    print(f"fixture written to {out}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=OUT)
    ap.add_argument("--seed", type=int, default=2023)
    args = ap.parse_args()
    main(args.out, args.seed)
