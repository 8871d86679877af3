"""Run configuration: a TOML file of input paths, base years, gases, scenarios and plot settings.

Relative paths are resolved against the directory holding the config file.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigurationError
from .offsets import CarbonOffsetQuote, OffsetQuote, OffsetScenario
from .quadrant import DEFAULT_SHARES

DATA_DIR = Path(__file__).parent / "data"
DEMO_CONFIG = DATA_DIR / "demo" / "config.toml"
CASE_STATEMENT = DATA_DIR / "case_2023.toml"


@dataclass(frozen=True)
class TableSet:
    core: Path
    final_demand: Path
    satellite: Path
    gross_output: Path | None = None
    year: int | None = None


@dataclass(frozen=True)
class Aggregation:
    pattern: str
    name: str


@dataclass(frozen=True)
class ClimateConfig:
    gases: dict[str, str] = field(default_factory=dict)          # satellite row -> gas
    gwp: dict[str, float] = field(default_factory=lambda: {"CO2": 1.0})
    cf: dict[str, dict[str, float]] = field(default_factory=dict)


@dataclass(frozen=True)
class CarbonConfig:
    price: float = 0.0          # per tCO2e in ``currency``
    fx_rate: float = 1.0        # EUR per unit of ``currency``
    currency: str = "EUR"


@dataclass(frozen=True)
class StatementConfig:
    revenue: tuple[tuple[str, float], ...] = ()
    gains: tuple[tuple[str, float], ...] = ()
    line_order: tuple[str, ...] = ()
    deduct_carbon_cost: bool = False


@dataclass(frozen=True)
class RunConfig:
    path: Path
    characterization: Path | None = None
    region_concordance: Path | None = None
    driver_concordance: Path | None = None
    intensity: TableSet | None = None
    attribution: TableSet | None = None
    factor_set: Path | None = None
    ledger: Path | None = None
    account_mapping: Path | None = None
    basic_prices: Path | None = None
    inflation: Path | None = None
    aggregate: tuple[Aggregation, ...] = ()
    climate: ClimateConfig = field(default_factory=ClimateConfig)
    carbon: CarbonConfig = field(default_factory=CarbonConfig)
    statement: StatementConfig = field(default_factory=StatementConfig)
    scenarios: dict[str, OffsetScenario] = field(default_factory=dict)
    categories: dict[str, str] | None = None
    iso_shares: tuple[float, ...] = DEFAULT_SHARES
    strict: bool = True

    @property
    def precomputed(self) -> bool:
        return self.factor_set is not None


def _check_keys(section: str, data: dict, allowed: set[str]):
    extra = set(data) - allowed
    if extra:
        raise ConfigurationError(f"unknown key(s) in [{section}]: {sorted(extra)}")


def _path(base: Path, value, key: str) -> Path | None:
    if value in (None, ""):
        return None
    if not isinstance(value, str):
        raise ConfigurationError(f"{key} must be a path string")
    p = Path(value)
    return p if p.is_absolute() else base / p


def _table_set(base: Path, data: dict, section: str) -> TableSet:
    _check_keys(section, data, {"core", "final_demand", "satellite", "gross_output", "year"})
    for k in ("core", "final_demand", "satellite"):
        if k not in data:
            raise ConfigurationError(f"[{section}] needs {k!r}")
    return TableSet(_path(base, data["core"], "core"), _path(base, data["final_demand"], "final_demand"),
                    _path(base, data["satellite"], "satellite"),
                    _path(base, data.get("gross_output"), "gross_output"), data.get("year"))


def _lines(items: Any, section: str) -> tuple[tuple[str, float], ...]:
    out = []
    for it in items or ():
        if not isinstance(it, dict) or set(it) != {"line", "eur"}:
            raise ConfigurationError(f"[[{section}]] entries need exactly 'line' and 'eur'")
        out.append((str(it["line"]), float(it["eur"])))
    return tuple(out)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None
    return config_from_dict(raw, path)


def config_from_dict(raw: dict, path: Path) -> RunConfig:
    base = Path(path).parent
    _check_keys("top level", raw, {"run", "inputs", "aggregate", "climate", "carbon", "statement",
                                   "scenarios", "categories", "quadrant"})
    run = raw.get("run", {})
    _check_keys("run", run, {"name", "strict"})
    inputs = raw.get("inputs", {})
    _check_keys("inputs", inputs, {"characterization", "region_concordance", "driver_concordance",
                                   "intensity", "attribution", "factor_set", "ledger", "account_mapping",
                                   "basic_prices", "inflation"})
    p = {k: _path(base, inputs.get(k), k) for k in
         ("characterization", "region_concordance", "driver_concordance", "factor_set", "ledger",
          "account_mapping", "basic_prices", "inflation")}
    intensity = _table_set(base, inputs["intensity"], "inputs.intensity") if "intensity" in inputs else None
    attribution = _table_set(base, inputs["attribution"], "inputs.attribution") if "attribution" in inputs else None
    if p["factor_set"] is None:
        missing = [k for k in ("characterization", "region_concordance", "driver_concordance") if p[k] is None]
        if intensity is None:
            missing.append("intensity")
        if missing:
            raise ConfigurationError(f"[inputs] needs {missing} unless a precomputed factor_set is given")

    aggs = []
    for a in raw.get("aggregate", []):
        _check_keys("aggregate", a, {"pattern", "name"})
        aggs.append(Aggregation(a["pattern"], a["name"]))

    cl = raw.get("climate", {})
    _check_keys("climate", cl, {"gases", "gwp", "cf"})
    gwp = {"CO2": 1.0, **{k: float(v) for k, v in cl.get("gwp", {}).items()}}
    climate = ClimateConfig(dict(cl.get("gases", {})), gwp,
                            {g: {e: float(v) for e, v in d.items()} for g, d in cl.get("cf", {}).items()})

    cb = raw.get("carbon", {})
    _check_keys("carbon", cb, {"price", "fx_rate", "currency"})
    carbon = CarbonConfig(float(cb.get("price", 0.0)), float(cb.get("fx_rate", 1.0)), cb.get("currency", "EUR"))

    st = raw.get("statement", {})
    _check_keys("statement", st, {"revenue", "gains", "line_order", "deduct_carbon_cost"})
    statement = StatementConfig(_lines(st.get("revenue"), "statement.revenue"),
                                _lines(st.get("gains"), "statement.gains"),
                                tuple(st.get("line_order", ())), bool(st.get("deduct_carbon_cost", False)))

    scenarios = {}
    for name, sc in raw.get("scenarios", {}).items():
        _check_keys(f"scenarios.{name}", sc, {"country", "c0", "gain", "t_rec", "horizon_years",
                                              "land_price_eur_per_ha", "fraction", "discrete", "notes"})
        try:
            scenarios[name] = OffsetScenario(
                name=name, country=sc.get("country", name), land_price=float(sc["land_price_eur_per_ha"]),
                c0=sc.get("c0"), gain=sc.get("gain"), t_rec=float(sc.get("t_rec", 100.0)),
                horizon=float(sc.get("horizon_years", 30.0)), fraction=float(sc.get("fraction", 1.0)),
                discrete=bool(sc.get("discrete", False)), notes=sc.get("notes", ""))
        except KeyError as exc:
            raise ConfigurationError(f"[scenarios.{name}] needs {exc.args[0]!r}") from None

    q = raw.get("quadrant", {})
    _check_keys("quadrant", q, {"shares"})
    shares = tuple(float(s) for s in q.get("shares", DEFAULT_SHARES))

    return RunConfig(
        path=Path(path), intensity=intensity, attribution=attribution, aggregate=tuple(aggs),
        climate=climate, carbon=carbon, statement=statement, scenarios=scenarios,
        categories=dict(raw["categories"]) if "categories" in raw else None,
        iso_shares=shares, strict=bool(run.get("strict", True)), **p)


def load_statement_case(path=CASE_STATEMENT):
    """Build an ImpactStatement from statement-level line items (no ledger, no MRIO).

    Offset lines are taken as given; the average gain is implied by footprint and area.
    """
    from .statement import ExpenseLine, assemble_statement

    path = Path(path)
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    _check_keys("top level", raw, {"carbon", "deduct_carbon_cost", "revenue", "expenses", "gains", "offsets"})
    try:
        expenses = [ExpenseLine(str(e["line"]), float(e["eur"]), float(e.get("co2e_kg", 0.0)),
                                float(e.get("bde", 0.0))) for e in raw.get("expenses", [])]
        carbon = None
        if "carbon" in raw:
            c = raw["carbon"]
            _check_keys("carbon", c, {"tonnes", "price", "currency", "fx_rate"})
            carbon = CarbonOffsetQuote(float(c["tonnes"]), float(c["price"]), float(c.get("fx_rate", 1.0)))
        offsets = {}
        for name, o in raw.get("offsets", {}).items():
            _check_keys(f"offsets.{name}", o, {"offset_bde", "area_ha", "total_cost", "annual_cost", "horizon"})
            bde, area = float(o["offset_bde"]), float(o["area_ha"])
            offsets[name] = OffsetQuote(name, bde, area, float(o["total_cost"]), float(o["annual_cost"]),
                                        bde / (area * 1e4), float(o["horizon"]))
    except KeyError as exc:
        raise ConfigurationError(f"{path}: missing key {exc.args[0]!r}") from None
    return assemble_statement(_lines(raw.get("revenue"), "revenue"), expenses, _lines(raw.get("gains"), "gains"),
                              carbon, offsets, bool(raw.get("deduct_carbon_cost", False)))
