"""Strict CSV readers and writers for every file the pipeline consumes or emits.

All files are UTF-8 with a header row and '.' as decimal separator. Readers
reject unknown columns, missing required columns and unparseable numbers with
a ParseError naming the file, the data row (1 = first row after the header)
and the column.
"""

from __future__ import annotations

import csv
import math
from collections import OrderedDict
from typing import Iterable, Sequence

import numpy as np

from .characterization import (
    ECOSYSTEMS,
    EXCLUDED,
    CharacterizationTable,
    DriverConcordance,
    ImpactFactorSet,
    RegionConcordance,
)
from .errors import ParseError, StructuralError
from .ledger import (
    KINDS,
    MONETARY,
    AccountMapping,
    InflationTable,
    Ledger,
    LedgerEntry,
    PhysicalIntensity,
    SectorPrices,
)
from .mrio import EconomicCore, RegionSectorIndex, SatelliteTable

FACTOR_COLUMNS = ("consumption_region", "sector", "ecosystem", "bde_per_eur", "co2e_per_eur", "coverage_flag")
LEDGER_COLUMNS = ("account_id", "account_name", "year", "kind", "amount", "unit", "category", "statement_line")
MAPPING_COLUMNS = ("account_id", "consumption_region", "sector", "bde_terrestrial", "bde_freshwater",
                   "bde_marine", "co2e_per_unit", "unit", "eur_per_unit")


def _open(path):
    try:
        return open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise FileNotFoundError(f"input file not found: {path}") from None


def read_rows(path, required: Sequence[str], optional: Sequence[str] = ()) -> list[tuple[int, dict]]:
    """(row number, record) pairs after validating the header against the schema."""
    with _open(path) as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError("file is empty", str(path)) from None
        if header and header[0].startswith("﻿"):
            header[0] = header[0][1:]
        unknown = [h for h in header if h not in required and h not in optional]
        if unknown:
            raise ParseError("unknown column", str(path), None, unknown[0])
        missing = [c for c in required if c not in header]
        if missing:
            raise ParseError("missing required column", str(path), None, missing[0])
        dupes = [h for h in header if header.count(h) > 1]
        if dupes:
            raise ParseError("duplicate column", str(path), None, dupes[0])
        rows = []
        for i, raw in enumerate(reader, start=1):
            if not raw or all(not c.strip() for c in raw):
                continue
            if len(raw) != len(header):
                raise ParseError(f"expected {len(header)} fields, found {len(raw)}", str(path), i)
            rows.append((i, {h: v.strip() for h, v in zip(header, raw)}))
    return rows


def parse_number(text: str, path, row, column, allow_blank: bool = False) -> float | None:
    if text == "" and allow_blank:
        return None
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", str(path), row, column) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite number: {text!r}", str(path), row, column)
    return v


def parse_int(text: str, path, row, column) -> int:
    if text == "":
        raise ParseError("value is required", str(path), row, column)
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"not an integer: {text!r}", str(path), row, column) from None


def fmt(v: float) -> str:
    """Shortest repr that round-trips exactly."""
    return repr(float(v))


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(r)


# --------------------------------------------------------------------------- matrices

def _read_matrix(path) -> tuple[list[str], list[str], np.ndarray]:
    with _open(path) as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("file is empty", str(path))
    cols = [c.strip() for c in rows[0][1:]]
    labels, data = [], []
    for i, r in enumerate(rows[1:], start=1):
        if len(r) != len(cols) + 1:
            raise ParseError(f"expected {len(cols) + 1} fields, found {len(r)}", str(path), i)
        labels.append(r[0].strip())
        data.append([parse_number(v.strip(), path, i, cols[j]) for j, v in enumerate(r[1:])])
    return labels, cols, np.array(data, dtype=float).reshape(len(labels), len(cols))


def read_core(z_path, y_path, x_path=None, year: int | None = None, role: str = "intensity") -> EconomicCore:
    """Z (rows and columns ``region:sector``), Y (rows ``region:sector``, columns consuming regions)."""
    rl, cl, Z = _read_matrix(z_path)
    if rl != cl:
        raise ParseError("row labels must equal column labels", str(z_path))
    try:
        index = RegionSectorIndex.from_labels(cl)
    except StructuralError as exc:
        raise ParseError(str(exc), str(z_path)) from None
    yl, yc, Y = _read_matrix(y_path)
    if yl != cl:
        raise ParseError("row labels must match the economic core", str(y_path))
    if tuple(yc) != index.regions:
        raise ParseError(f"columns must be the consuming regions {list(index.regions)} in order", str(y_path))
    x = None
    if x_path is not None:
        xl, xc, X = _read_matrix(x_path)
        if xl != cl or len(xc) != 1:
            raise ParseError("gross output must be one column over the core's labels", str(x_path))
        x = X[:, 0]
    return EconomicCore(index, Z, Y, x, year, role)


def write_core(core: EconomicCore, z_path, y_path) -> None:
    labels = core.index.labels()
    write_csv(z_path, ["region:sector", *labels], ([lab, *map(fmt, row)] for lab, row in zip(labels, core.Z)))
    write_csv(y_path, ["region:sector", *core.index.regions],
              ([lab, *map(fmt, row)] for lab, row in zip(labels, core.Y)))


def read_satellite(path, index: RegionSectorIndex) -> SatelliteTable:
    with _open(path) as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("file is empty", str(path))
    header = [h.strip() for h in rows[0]]
    if header[:2] != ["stressor", "unit"]:
        raise ParseError("first columns must be 'stressor' and 'unit'", str(path), None, header[0])
    if header[2:] != index.labels():
        raise ParseError("value columns must match the economic core labels", str(path))
    names, units, vals = [], [], []
    for i, r in enumerate(rows[1:], start=1):
        if len(r) != len(header):
            raise ParseError(f"expected {len(header)} fields, found {len(r)}", str(path), i)
        if not r[1].strip():
            raise ParseError("unit is required", str(path), i, "unit")
        names.append(r[0].strip())
        units.append(r[1].strip())
        vals.append([parse_number(v.strip(), path, i, header[j + 2]) for j, v in enumerate(r[2:])])
    return SatelliteTable(tuple(names), tuple(units), np.array(vals).reshape(len(names), len(index)))


def write_satellite(table: SatelliteTable, index: RegionSectorIndex, path) -> None:
    write_csv(path, ["stressor", "unit", *index.labels()],
              ([n, u, *map(fmt, v)] for n, u, v in zip(table.names, table.units, table.values)))


# --------------------------------------------------------------------------- characterization

def read_characterization(path) -> CharacterizationTable:
    cells, units = {}, {}
    for i, r in read_rows(path, ("driver", "country_iso3", "ecosystem", "cf", "unit")):
        d, loc, eco = r["driver"], r["country_iso3"], r["ecosystem"]
        if eco not in ECOSYSTEMS:
            raise ParseError(f"ecosystem must be one of {ECOSYSTEMS}", str(path), i, "ecosystem")
        v = parse_number(r["cf"], path, i, "cf")
        if v < 0:
            raise ParseError("characterization factor must be >= 0", str(path), i, "cf")
        if d in units and units[d] != r["unit"]:
            raise ParseError(f"driver {d!r} uses unit {units[d]!r} elsewhere", str(path), i, "unit")
        units[d] = r["unit"]
        if (d, loc, eco) in cells:
            raise ParseError(f"duplicate factor for ({d}, {loc}, {eco})", str(path), i)
        cells[(d, loc, eco)] = v
    return CharacterizationTable(cells, units)


def read_region_concordance(path) -> RegionConcordance:
    mapping: dict[str, list[str]] = OrderedDict()
    continents = {}
    for i, r in read_rows(path, ("mrio_region", "country_iso3"), ("continent",)):
        if not r["mrio_region"] or not r["country_iso3"]:
            raise ParseError("region and country are required", str(path), i)
        mapping.setdefault(r["mrio_region"], []).append(r["country_iso3"])
        if r.get("continent"):
            continents[r["country_iso3"]] = r["continent"]
    return RegionConcordance({k: tuple(v) for k, v in mapping.items()}, continents)


def read_driver_concordance(path) -> DriverConcordance:
    """Rows ``stressor, driver, weight``; blank weights mean a plain average.

    ``EXCLUDED`` in the driver column marks a stressor left out, with the reason
    in the weight column.
    """
    targets: dict[str, list[tuple[str, float | None]]] = OrderedDict()
    excluded = {}
    for i, r in read_rows(path, ("mrio_stressor", "lcia_driver", "weight")):
        s, d = r["mrio_stressor"], r["lcia_driver"]
        if d == EXCLUDED:
            if not r["weight"]:
                raise ParseError("excluded stressors need a reason in the weight column", str(path), i, "weight")
            excluded[s] = r["weight"]
            continue
        w = parse_number(r["weight"], path, i, "weight", allow_blank=True)
        targets.setdefault(s, []).append((d, w))
    mapping = {}
    for s, ts in targets.items():
        if all(w is None for _, w in ts):
            mapping[s] = tuple((d, 1.0 / len(ts)) for d, _ in ts)
        elif any(w is None for _, w in ts):
            raise ParseError(f"stressor {s!r} mixes blank and explicit weights", str(path), None, "weight")
        else:
            mapping[s] = tuple(ts)
    return DriverConcordance(mapping, excluded)


# --------------------------------------------------------------------------- factor set exchange

def export_factor_set(fs: ImpactFactorSet, path) -> None:
    rows = []
    for n, (region, sector) in enumerate(fs.index.pairs()):
        for e, eco in enumerate(ECOSYSTEMS):
            rows.append([region, sector, eco, fmt(fs.bde_per_eur[n, e]), fmt(fs.co2e_per_eur[n]),
                         fs.coverage_flag[n]])
    write_csv(path, FACTOR_COLUMNS, rows)


def import_factor_set(path) -> ImpactFactorSet:
    recs = read_rows(path, FACTOR_COLUMNS)
    if not recs:
        raise ParseError("factor set has no rows", str(path))
    regions = list(OrderedDict.fromkeys(r["consumption_region"] for _, r in recs))
    sectors = list(OrderedDict.fromkeys(r["sector"] for _, r in recs))
    index = RegionSectorIndex(tuple(regions), tuple(sectors))
    n = len(index)
    bde = np.full((n, len(ECOSYSTEMS)), np.nan)
    co2 = np.full(n, np.nan)
    flags: list[str | None] = [None] * n
    for i, r in recs:
        pos = index.position(r["consumption_region"], r["sector"])
        if r["ecosystem"] not in ECOSYSTEMS:
            raise ParseError(f"ecosystem must be one of {ECOSYSTEMS}", str(path), i, "ecosystem")
        e = ECOSYSTEMS.index(r["ecosystem"])
        if not np.isnan(bde[pos, e]):
            raise ParseError("duplicate (region, sector, ecosystem) row", str(path), i)
        bde[pos, e] = parse_number(r["bde_per_eur"], path, i, "bde_per_eur")
        c = parse_number(r["co2e_per_eur"], path, i, "co2e_per_eur")
        if not np.isnan(co2[pos]) and co2[pos] != c:
            raise ParseError("co2e_per_eur differs between ecosystem rows of one sector", str(path), i,
                             "co2e_per_eur")
        co2[pos] = c
        if flags[pos] is not None and flags[pos] != r["coverage_flag"]:
            raise ParseError("coverage_flag differs between ecosystem rows of one sector", str(path), i,
                             "coverage_flag")
        flags[pos] = r["coverage_flag"]
    if np.isnan(bde).any():
        n_miss = int(np.isnan(bde).sum())
        raise ParseError(f"{n_miss} (region, sector, ecosystem) rows are missing", str(path))
    return ImpactFactorSet(index, bde, co2, flags)


# --------------------------------------------------------------------------- ledger side

def parse_ledger(path) -> Ledger:
    entries = []
    for i, r in read_rows(path, LEDGER_COLUMNS):
        if not r["account_id"]:
            raise ParseError("account_id is required", str(path), i, "account_id")
        year = parse_int(r["year"], path, i, "year")
        kind = r["kind"]
        if kind not in KINDS:
            raise ParseError(f"kind must be one of {KINDS}", str(path), i, "kind")
        amount = parse_number(r["amount"], path, i, "amount")
        unit = r["unit"] or ("EUR" if kind == MONETARY else "")
        if not unit:
            raise ParseError("physical entries need a unit", str(path), i, "unit")
        entries.append(LedgerEntry(r["account_id"], r["account_name"], year, kind, amount, unit,
                                   r["category"], r["statement_line"]))
    return Ledger(tuple(entries))


def read_account_mapping(path) -> AccountMapping:
    monetary, physical = {}, {}
    for i, r in read_rows(path, ("account_id",), MAPPING_COLUMNS[1:]):
        aid = r["account_id"]
        if aid in monetary or aid in physical:
            raise ParseError(f"account {aid!r} mapped twice", str(path), i, "account_id")
        region, sector = r.get("consumption_region", ""), r.get("sector", "")
        nums = {c: parse_number(r.get(c, ""), path, i, c, allow_blank=True)
                for c in ("bde_terrestrial", "bde_freshwater", "bde_marine", "co2e_per_unit", "eur_per_unit")}
        has_intensity = any(nums[c] is not None for c in nums if c != "eur_per_unit")
        if region or sector:
            if not (region and sector):
                raise ParseError("monetary mapping needs both region and sector", str(path), i)
            if has_intensity:
                raise ParseError("row gives both a sector and direct intensities", str(path), i)
            monetary[aid] = (region, sector)
        elif has_intensity:
            bde = tuple(nums[c] or 0.0 for c in ("bde_terrestrial", "bde_freshwater", "bde_marine"))
            if min(bde) < 0 or (nums["co2e_per_unit"] or 0.0) < 0:
                raise ParseError("intensities must be >= 0", str(path), i)
            physical[aid] = PhysicalIntensity(bde, nums["co2e_per_unit"] or 0.0, r.get("unit", ""),
                                              nums["eur_per_unit"])
        else:
            raise ParseError("row maps to neither a sector nor intensities", str(path), i)
    return AccountMapping(monetary, physical)


def read_basic_prices(path) -> dict[str, SectorPrices]:
    out = {}
    for i, r in read_rows(path, ("sector", "tax", "sub", "vat", "ttm", "sup")):
        vals = [parse_number(r[c], path, i, c) for c in ("tax", "sub", "vat", "ttm", "sup")]
        out[r["sector"]] = SectorPrices(*vals)
    return out


def read_inflation(path) -> InflationTable:
    out = InflationTable()
    for i, r in read_rows(path, ("year", "inflation_factor")):
        out[parse_int(r["year"], path, i, "year")] = parse_number(r["inflation_factor"], path, i,
                                                                  "inflation_factor")
    return out
