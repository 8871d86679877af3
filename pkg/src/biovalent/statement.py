"""Financial-environmental impact statement: income statement plus footprint columns.

All arithmetic is in EUR, kgCO2e and BDe fractions; k EUR, tonnes and nBDe
appear only when rendering.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import SelectionError
from .offsets import CarbonOffsetQuote, OffsetQuote

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExpenseLine:
    name: str
    eur: float
    co2e_kg: float = 0.0
    bde: float = 0.0


@dataclass
class ImpactStatement:
    revenue: list[tuple[str, float]]
    expenses: list[ExpenseLine]
    gains: list[tuple[str, float]] = field(default_factory=list)
    carbon_offset: CarbonOffsetQuote | None = None
    biodiversity_offsets: dict[str, OffsetQuote] = field(default_factory=dict)
    deduct_carbon_cost: bool = False
    warnings: list[str] = field(default_factory=list)

    @property
    def total_revenue(self) -> float:
        return sum(v for _, v in self.revenue)

    @property
    def total_gains(self) -> float:
        return sum(v for _, v in self.gains)

    @property
    def total_expenses(self) -> float:
        return sum(e.eur for e in self.expenses)

    @property
    def total_co2e_kg(self) -> float:
        return sum(e.co2e_kg for e in self.expenses)

    @property
    def total_bde(self) -> float:
        return sum(e.bde for e in self.expenses)

    @property
    def carbon_offset_cost(self) -> float:
        return self.carbon_offset.cost if self.carbon_offset is not None else 0.0

    @property
    def net_income(self) -> float:
        """Net income before any offset pricing."""
        return self.total_revenue + self.total_gains - self.total_expenses


@dataclass(frozen=True)
class NetPosition:
    scenario: str | None
    net_income_eur: float
    co2e_kg: float
    bde: float


def assemble_statement(revenue: Mapping[str, float] | Sequence[tuple[str, float]],
                       expenses: Sequence[ExpenseLine],
                       gains: Mapping[str, float] | Sequence[tuple[str, float]] = (),
                       carbon_offset: CarbonOffsetQuote | None = None,
                       biodiversity_offsets: Mapping[str, OffsetQuote] | None = None,
                       deduct_carbon_cost: bool = False) -> ImpactStatement:
    """Collect the statement lines. Expense lines with a footprint but no money get a warning."""
    rev = list(revenue.items()) if isinstance(revenue, Mapping) else list(revenue)
    gl = list(gains.items()) if isinstance(gains, Mapping) else list(gains)
    warnings = []
    for e in expenses:
        if e.eur == 0 and (e.co2e_kg or e.bde):
            msg = f"statement line {e.name!r} has a footprint but no financial amount"
            logger.warning(msg)
            warnings.append(msg)
    return ImpactStatement(rev, list(expenses), gl, carbon_offset,
                           dict(biodiversity_offsets or {}), deduct_carbon_cost, warnings)


def net_positions(statement: ImpactStatement, scenario: str | None = None) -> NetPosition:
    """Net income and net footprints, optionally after offsetting in ``scenario``.

    Offsetting subtracts the annualized biodiversity offset cost from net
    income. The carbon offset cost is subtracted only when the statement asks
    for it (``deduct_carbon_cost``); the carbon column is netted either way.
    """
    co2e, bde = statement.total_co2e_kg, statement.total_bde
    if scenario is None:
        return NetPosition(None, statement.net_income, co2e, bde)
    try:
        quote = statement.biodiversity_offsets[scenario]
    except KeyError:
        raise SelectionError(f"unknown offset scenario {scenario!r}; "
                             f"available: {sorted(statement.biodiversity_offsets)}") from None
    income = statement.net_income - quote.annual_cost
    if statement.deduct_carbon_cost:
        income -= statement.carbon_offset_cost
    carbon_offset_kg = statement.carbon_offset.tonnes * 1000 if statement.carbon_offset else 0.0
    return NetPosition(scenario, income, _net(co2e, carbon_offset_kg), _net(bde, quote.offset_bde))


def _net(gross: float, offset: float) -> float:
    # rounding dust from a full offset is reported as an exact zero
    v = gross - offset
    return 0.0 if abs(v) <= 1e-12 * abs(gross) else v


# --------------------------------------------------------------------------- rendering

def _thousands(v: float) -> str:
    """Integer with a space as thousands separator, e.g. -444 265."""
    n = int(round(v))
    s = f"{abs(n):,}".replace(",", " ")
    return f"-{s}" if n < 0 else s


def k_eur(v: float) -> str:
    return _thousands(v / 1000)


def tonnes(kg: float) -> str:
    return _thousands(kg / 1000)


def nbde(v: float) -> str:
    return f"{v / 1e-9:.2f}"


def statement_rows(st: ImpactStatement) -> list[dict]:
    """Table rows (section, line, k_eur, tco2e, nbde) in display form; '-' marks empty cells."""
    rows = []

    def add(section, line, eur=None, kg=None, bde=None):
        rows.append({
            "section": section,
            "line": line,
            "k_eur": "-" if eur is None else k_eur(eur),
            "tco2e": "-" if kg is None else tonnes(kg),
            "nbde": "-" if bde is None else nbde(bde),
        })

    for name, v in st.revenue:
        add("Revenue", name, v)
    for e in st.expenses:
        add("Expenses / Footprints", e.name, e.eur, e.co2e_kg, e.bde)
    add("Expenses / Footprints", "Total Expenses / Footprints", st.total_expenses, st.total_co2e_kg, st.total_bde)
    for name, v in st.gains:
        add("Losses and Gains", name, v)
    if st.carbon_offset is not None:
        add("Impact pricing", "Carbon offsets", st.carbon_offset_cost, -st.carbon_offset.tonnes * 1000, None)
    for name, q in st.biodiversity_offsets.items():
        add("Impact pricing", f"Biodiversity offsets in {name}", q.annual_cost, None, -q.offset_bde)
    base = net_positions(st)
    add("Net Income / Footprint", "Net footprint without offsets", base.net_income_eur, base.co2e_kg, base.bde)
    for name in st.biodiversity_offsets:
        p = net_positions(st, name)
        add("Net Income / Footprint", f"Net footprint with offsets in {name}",
            p.net_income_eur, p.co2e_kg, p.bde)
    return rows


def statement_record(st: ImpactStatement) -> dict:
    """Full-precision JSON-ready form of the statement and its net positions."""
    nets = [net_positions(st)] + [net_positions(st, s) for s in st.biodiversity_offsets]
    return {
        "revenue": [{"line": n, "eur": v} for n, v in st.revenue],
        "expenses": [{"line": e.name, "eur": e.eur, "co2e_kg": e.co2e_kg, "bde": e.bde} for e in st.expenses],
        "totals": {"eur": st.total_expenses, "co2e_kg": st.total_co2e_kg, "bde": st.total_bde},
        "gains": [{"line": n, "eur": v} for n, v in st.gains],
        "carbon_offset": None if st.carbon_offset is None else {
            "tonnes": st.carbon_offset.tonnes, "unit_price": st.carbon_offset.unit_price,
            "fx_rate": st.carbon_offset.fx_rate, "cost_eur": st.carbon_offset_cost},
        "biodiversity_offsets": {
            n: {"offset_bde": q.offset_bde, "area_ha": q.required_area, "total_cost_eur": q.total_cost,
                "annual_cost_eur": q.annual_cost, "average_gain": q.average_gain, "horizon": q.horizon}
            for n, q in st.biodiversity_offsets.items()},
        "deduct_carbon_cost": st.deduct_carbon_cost,
        "net_positions": [{"scenario": p.scenario, "net_income_eur": p.net_income_eur,
                           "co2e_kg": p.co2e_kg, "bde": p.bde} for p in nets],
        "rows": statement_rows(st),
        "warnings": list(st.warnings),
    }


def render_text(st: ImpactStatement) -> str:
    rows = statement_rows(st)
    w = max(len(r["line"]) for r in rows) + 2
    head = f"{'':<{w}}{'k EUR':>12}{'tCO2e':>10}{'nBDe':>10}"
    out = [head]
    section = None
    for r in rows:
        if r["section"] != section:
            section = r["section"]
            out.append(section)
        out.append(f"  {r['line']:<{w - 2}}{r['k_eur']:>12}{r['tco2e']:>10}{r['nbde']:>10}")
    return "\n".join(out) + "\n"
