"""End-to-end orchestration: ingest, factors, harmonize, footprint, offsets, statement, quadrant."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import schemas
from .characterization import (
    ClimateCharacterization,
    CoverageReport,
    FactorInputs,
    ImpactFactorSet,
    build_factor_set,
)
from .config import RunConfig
from .errors import BiovalentError, ConfigurationError, SelectionError, StageError
from .footprint import (
    CategoryFootprint,
    LineFootprint,
    aggregate_categories,
    biodiversity_equivalent,
    carbon_footprint,
    compute_line_footprints,
    format_bde,
    total_bf,
)
from .ledger import MappedConsumption, compute_bpcf_table, map_accounts
from .mrio import aggregate_stressor_rows, leontief_inverse, row_diagnostics
from .offsets import CarbonOffsetQuote, OffsetQuote, quote_offset
from .quadrant import QuadrantData, quadrant_data, render_quadrant
from .statement import ExpenseLine, ImpactStatement, assemble_statement, statement_record, statement_rows

logger = logging.getLogger(__name__)

STAGES = ("ingest", "factors", "harmonize", "footprint", "offsets", "statement", "quadrant")


@dataclass
class PipelineResult:
    factor_set: ImpactFactorSet | None = None
    coverage: CoverageReport = field(default_factory=CoverageReport)
    mapped: MappedConsumption | None = None
    lines: list[LineFootprint] = field(default_factory=list)
    categories: list[CategoryFootprint] = field(default_factory=list)
    statement_lines: list[CategoryFootprint] = field(default_factory=list)
    offsets: dict[str, OffsetQuote] = field(default_factory=dict)
    carbon: CarbonOffsetQuote | None = None
    statement: ImpactStatement | None = None
    quadrants: list[QuadrantData] = field(default_factory=list)
    outputs: list[Path] = field(default_factory=list)

    @property
    def total_bde(self) -> float:
        return biodiversity_equivalent(total_bf(self.lines)).value

    @property
    def total_co2e_kg(self) -> float:
        return carbon_footprint(self.lines)


def _stage(name: str, fn: Callable, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except (BiovalentError, FileNotFoundError, OSError, ValueError, KeyError) as exc:
        raise StageError(name, exc) from exc


def _rel(cfg: RunConfig, p: Path | None) -> str | None:
    if p is None:
        return None
    try:
        return str(p.relative_to(cfg.path.parent))
    except ValueError:
        return p.name


# --------------------------------------------------------------------------- stages

def load_factor_inputs(cfg: RunConfig) -> FactorInputs:
    inten = schemas.read_core(cfg.intensity.core, cfg.intensity.final_demand, cfg.intensity.gross_output,
                              cfg.intensity.year, "intensity")
    sat_i = schemas.read_satellite(cfg.intensity.satellite, inten.index)
    core_a = sat_a = None
    if cfg.attribution is not None:
        core_a = schemas.read_core(cfg.attribution.core, cfg.attribution.final_demand,
                                   cfg.attribution.gross_output, cfg.attribution.year, "attribution")
        sat_a = schemas.read_satellite(cfg.attribution.satellite, core_a.index)
    for agg in cfg.aggregate:
        sat_i = aggregate_stressor_rows(sat_i, agg.pattern, agg.name)
        if sat_a is not None:
            sat_a = aggregate_stressor_rows(sat_a, agg.pattern, agg.name)
    if not cfg.characterization.exists():
        raise FileNotFoundError(f"characterization file not found: {cfg.characterization}")
    return FactorInputs(
        intensity_core=inten,
        intensity_satellite=sat_i,
        regions=schemas.read_region_concordance(cfg.region_concordance),
        drivers=schemas.read_driver_concordance(cfg.driver_concordance),
        cf=schemas.read_characterization(cfg.characterization),
        climate=ClimateCharacterization(cfg.climate.cf, cfg.climate.gwp),
        gases=cfg.climate.gases,
        attribution_core=core_a,
        attribution_satellite=sat_a,
    )


def derive_factors(cfg: RunConfig) -> tuple[ImpactFactorSet, CoverageReport]:
    if cfg.precomputed:
        fs = schemas.import_factor_set(cfg.factor_set)
        fs.provenance.update({"mode": "precomputed", "source": _rel(cfg, cfg.factor_set)})
        return fs, CoverageReport()
    inputs = load_factor_inputs(cfg)
    fs, report = build_factor_set(inputs)
    fs.provenance.update({
        "mode": "derived",
        "intensity_tables": [_rel(cfg, p) for p in (cfg.intensity.core, cfg.intensity.final_demand,
                                                    cfg.intensity.satellite)],
        "attribution_tables": None if cfg.attribution is None else [
            _rel(cfg, p) for p in (cfg.attribution.core, cfg.attribution.final_demand, cfg.attribution.satellite)],
        "characterization": _rel(cfg, cfg.characterization),
        "region_concordance": _rel(cfg, cfg.region_concordance),
        "driver_concordance": _rel(cfg, cfg.driver_concordance),
    })
    return fs, report


def _require(cfg: RunConfig, *keys: str):
    missing = [k for k in keys if getattr(cfg, k) is None]
    if missing:
        raise ConfigurationError(f"[inputs] needs {missing}")


def harmonize(cfg: RunConfig) -> MappedConsumption:
    _require(cfg, "ledger", "account_mapping", "basic_prices", "inflation")
    ledger = schemas.parse_ledger(cfg.ledger)
    mapping = schemas.read_account_mapping(cfg.account_mapping)
    bpcf = compute_bpcf_table(schemas.read_basic_prices(cfg.basic_prices))
    inflation = schemas.read_inflation(cfg.inflation)
    return map_accounts(ledger, mapping, inflation, bpcf)


def _ordered(groups: list[CategoryFootprint], order: tuple[str, ...]) -> list[CategoryFootprint]:
    if not order:
        return groups
    rank = {name: i for i, name in enumerate(order)}
    return sorted(groups, key=lambda g: rank.get(g.category, len(rank)))


def build_statement(cfg: RunConfig, res: PipelineResult, scenario: str | None) -> ImpactStatement:
    expenses = [ExpenseLine(g.category, g.nominal_eur, g.co2e_kg, g.bde.value) for g in res.statement_lines]
    offsets = res.offsets
    if scenario is not None:
        if scenario not in offsets:
            raise SelectionError(f"unknown offset scenario {scenario!r}; available: {sorted(offsets)}")
        offsets = {scenario: offsets[scenario]}
    return assemble_statement(cfg.statement.revenue, expenses, cfg.statement.gains, res.carbon, offsets,
                              cfg.statement.deduct_carbon_cost)


def run_pipeline(cfg: RunConfig, out_dir=None, fmt: str = "csv", scenario: str | None = None,
                 until: str = "quadrant", write: tuple[str, ...] | None = None) -> PipelineResult:
    """Run the stages up to ``until`` and write the selected outputs into ``out_dir``.

    ``write`` picks among ``factors``, ``footprint``, ``statement``, ``quadrant``;
    by default everything computed is written. Nothing is written if any stage
    fails, and files from a failed write are removed.
    """
    if fmt not in ("csv", "json"):
        raise ConfigurationError(f"format must be csv or json, got {fmt!r}")
    if until not in STAGES:
        raise ConfigurationError(f"unknown stage {until!r}")
    stop = STAGES.index(until)
    res = PipelineResult()

    mapped = None
    if stop >= STAGES.index("harmonize"):
        # ledger inputs are read first so that bad ledgers fail before the costly factor stage
        mapped = _stage("ingest", harmonize, cfg)
    res.factor_set, res.coverage = _stage("factors", derive_factors, cfg)
    if mapped is not None:
        res.mapped = mapped
    if stop >= STAGES.index("footprint"):
        res.lines = _stage("footprint", compute_line_footprints, mapped, res.factor_set, cfg.strict)
        res.categories = _stage("footprint", aggregate_categories, res.lines, cfg.categories)
        res.statement_lines = _stage("footprint", lambda: _ordered(
            aggregate_categories(res.lines, key="statement_line"), cfg.statement.line_order))
    if stop >= STAGES.index("offsets"):
        total = res.total_bde
        res.offsets = _stage("offsets", lambda: {n: quote_offset(s, total) for n, s in cfg.scenarios.items()})
        res.carbon = CarbonOffsetQuote(res.total_co2e_kg / 1000, cfg.carbon.price, cfg.carbon.fx_rate)
    if stop >= STAGES.index("statement"):
        res.statement = _stage("statement", build_statement, cfg, res, scenario)
    if stop >= STAGES.index("quadrant"):
        res.quadrants = _stage("quadrant", lambda: [
            quadrant_data(res.categories, "bde", res.total_bde),
            quadrant_data(res.categories, "co2e", res.total_co2e_kg),
        ])

    if out_dir is not None:
        _stage("write", write_outputs, cfg, res, Path(out_dir), fmt, write)
    return res


# --------------------------------------------------------------------------- serialization

def _opt(v):
    return "" if v is None else schemas.fmt(v)


FOOTPRINT_COLUMNS = ("level", "name", "consumption_eur", "nominal_eur", "bde", "bde_display", "tco2e",
                     "bde_intensity", "co2e_intensity", "bde_share", "co2e_share", "consumption_share",
                     "nominal_share", "bf_terrestrial", "bf_freshwater", "bf_marine")


def _share(part: float, whole: float) -> float | None:
    return part / whole if whole else None


def footprint_records(res: PipelineResult) -> list[dict]:
    """Rows per category, per statement line and for the total.

    Shares are given against the total footprint and against both harmonized
    and nominal consumption, since either denominator may be wanted.
    """
    recs = []
    total = aggregate_categories(res.lines, {c: "Total" for c in {ln.category for ln in res.lines}})[0]

    def add(level, g: CategoryFootprint):
        recs.append({
            "level": level, "name": g.category, "consumption_eur": g.consumption_eur,
            "nominal_eur": g.nominal_eur, "bde": g.bde.value, "bde_display": format_bde(g.bde.value),
            "tco2e": g.co2e_kg / 1000, "bde_intensity": g.bde_intensity, "co2e_intensity": g.co2e_intensity,
            "bde_share": _share(g.bde.value, total.bde.value), "co2e_share": _share(g.co2e_kg, total.co2e_kg),
            "consumption_share": _share(g.consumption_eur, total.consumption_eur),
            "nominal_share": _share(g.nominal_eur, total.nominal_eur),
            "bf_terrestrial": g.bf.terrestrial, "bf_freshwater": g.bf.freshwater, "bf_marine": g.bf.marine,
        })

    for g in res.categories:
        add("category", g)
    for g in res.statement_lines:
        add("statement_line", g)
    add("total", total)
    return recs


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def write_outputs(cfg: RunConfig, res: PipelineResult, out: Path, fmt: str,
                  which: tuple[str, ...] | None = None) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    jobs: list[tuple[Path, Callable[[Path], None]]] = []
    want = set(which) if which is not None else {"factors", "footprint", "statement", "quadrant"}
    if "factors" in want and res.factor_set is not None:
        fs = res.factor_set
        jobs.append((out / "factors.csv", lambda p: schemas.export_factor_set(fs, p)))
        jobs.append((out / "factors.meta.json",
                     lambda p: _write_json(p, {"provenance": fs.provenance, "coverage": res.coverage.as_dict()})))
    if "footprint" in want and res.lines:
        recs = footprint_records(res)
        if fmt == "json":
            jobs.append((out / "footprint.json", lambda p: _write_json(p, recs)))
        else:
            jobs.append((out / "footprint.csv", lambda p: schemas.write_csv(
                p, FOOTPRINT_COLUMNS,
                ([r[c] if isinstance(r[c], str) else _opt(r[c]) for c in FOOTPRINT_COLUMNS] for r in recs))))
    if "statement" in want and res.statement is not None:
        st = res.statement
        if fmt == "json":
            jobs.append((out / "statement.json", lambda p: _write_json(p, statement_record(st))))
        else:
            jobs.append((out / "statement.csv", lambda p: schemas.write_csv(
                p, ("section", "line", "k_eur", "tco2e", "nbde"),
                ([r["section"], r["line"], r["k_eur"], r["tco2e"], r["nbde"]] for r in statement_rows(st)))))
    if "quadrant" in want and res.quadrants:
        svg = render_quadrant(res.quadrants, cfg.iso_shares)
        jobs.append((out / "quadrant.svg", lambda p: p.write_text(svg, encoding="utf-8")))

    written: list[Path] = []
    try:
        for path, job in jobs:
            job(path)
            written.append(path)
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        raise
    res.outputs = written
    return written


def validate(cfg: RunConfig) -> list[str]:
    """Load every input and run structural checks. Returns human-readable findings (empty = clean)."""
    findings = []
    if not cfg.precomputed:
        inputs = load_factor_inputs(cfg)
        pairs = [(inputs.intensity_core, inputs.intensity_satellite)]
        if inputs.attribution_core is not None:
            pairs.append((inputs.attribution_core, inputs.attribution_satellite))
        for core, sat in pairs:
            leontief_inverse(core.A)
            for d in row_diagnostics(sat, core):
                where = f"{d['stressor']!r} ({core.role} table, {core.year})"
                if d["negative_cells"]:
                    findings.append(f"stressor {where} has {d['negative_cells']} negative cells")
                if d["zero_output_cells"]:
                    findings.append(f"stressor {where} is recorded at {d['zero_output_cells']} zero-output sectors")
        for name in inputs.intensity_satellite.names:
            if name not in inputs.gases and not inputs.drivers.covers(name):
                findings.append(f"stressor {name!r} is neither mapped, excluded nor a climate gas")
        for region in inputs.intensity_core.index.regions:
            if region not in inputs.regions.mapping:
                findings.append(f"MRIO region {region!r} missing from the region concordance")
        for stressor, targets in inputs.drivers.mapping.items():
            for driver, _ in targets:
                if driver not in inputs.cf:
                    findings.append(f"driver {driver!r} (for {stressor!r}) has no characterization factors")
        fs_index = inputs.intensity_core.index
    else:
        fs_index = schemas.import_factor_set(cfg.factor_set).index
    if cfg.ledger is not None:
        mapped = harmonize(cfg)
        for ln in mapped.monetary:
            if ln.region not in fs_index.regions or ln.sector not in fs_index.sectors:
                findings.append(f"account {ln.entry.account_id} maps to unknown ({ln.region}, {ln.sector})")
        if cfg.categories is not None:
            for ln in (*mapped.monetary, *mapped.physical):
                if ln.entry.category not in cfg.categories:
                    findings.append(f"category {ln.entry.category!r} missing from [categories]")
    return findings
