import pytest

from biovalent.config import load_statement_case
from biovalent.errors import SelectionError
from biovalent.offsets import CarbonOffsetQuote, OffsetScenario, quote_offset
from biovalent.statement import (
    ExpenseLine,
    assemble_statement,
    k_eur,
    nbde,
    net_positions,
    render_text,
    statement_record,
    statement_rows,
)


def _small(deduct=False):
    expenses = [ExpenseLine("Staff", 800.0, 10.0, 1e-9), ExpenseLine("Travel", 200.0, 40.0, 3e-9)]
    quotes = {"X": quote_offset(OffsetScenario("X", "X", land_price=1000, gain=1e-16), 4e-9)}
    return assemble_statement({"Funding": 1100.0}, expenses, {"Gains": -50.0},
                              CarbonOffsetQuote(0.05, 100.0, 1.0), quotes, deduct)


def test_totals_and_net_income():
    st = _small()
    assert st.total_expenses == 1000.0 and st.total_co2e_kg == 50.0
    assert st.total_bde == pytest.approx(4e-9)
    assert st.net_income == pytest.approx(50.0)


def test_offsetting_subtracts_annual_cost_and_nets_footprints():
    st = _small()
    annual = st.biodiversity_offsets["X"].annual_cost
    # 4e-9 / 1e-16 = 4e7 m2 = 4000 ha at 1000 EUR, over 30 years
    assert annual == pytest.approx(4_000_000 / 30)
    p = net_positions(st, "X")
    assert p.net_income_eur == pytest.approx(50.0 - annual)
    assert (p.co2e_kg, p.bde) == (0.0, 0.0)


def test_carbon_cost_only_deducted_on_request():
    assert net_positions(_small(True), "X").net_income_eur == pytest.approx(
        net_positions(_small(False), "X").net_income_eur - 5.0)


def test_unknown_scenario():
    with pytest.raises(SelectionError, match="available"):
        net_positions(_small(), "Y")


def test_footprint_without_money_warns(caplog):
    st = assemble_statement({}, [ExpenseLine("Heat", 0.0, 5.0, 0.0)])
    assert st.warnings and "Heat" in caplog.text


def test_rendering():
    assert k_eur(-444_264_900.0) == "-444 265"
    assert k_eur(1_234.0) == "1"
    assert nbde(68.79e-9) == "68.79"
    rows = statement_rows(_small())
    assert rows[0] == {"section": "Revenue", "line": "Funding", "k_eur": "1", "tco2e": "-", "nbde": "-"}
    assert [r["line"] for r in rows if r["section"] == "Net Income / Footprint"] == [
        "Net footprint without offsets", "Net footprint with offsets in X"]
    text = render_text(_small())
    assert text.splitlines()[0].split() == ["k", "EUR", "tCO2e", "nBDe"]
    rec = statement_record(_small())
    assert rec["totals"]["eur"] == 1000.0 and len(rec["net_positions"]) == 2


def test_case_statement_round_numbers():
    st = load_statement_case()
    rows = {r["line"]: r for r in statement_rows(st)}
    assert rows["Total Expenses / Footprints"] == {
        "section": "Expenses / Footprints", "line": "Total Expenses / Footprints",
        "k_eur": "243 742", "tco2e": "25 640", "nbde": "68.79"}
    assert rows["Other"]["nbde"] == "37.54" and rows["Raw materials, equipment, and goods"]["nbde"] == "11.15"
    assert rows["Net footprint without offsets"]["k_eur"] == "-8 486"
    assert rows["Net footprint with offsets in Finland"]["k_eur"] == "-444 265"
    assert rows["Net footprint with offsets in Brazil"]["k_eur"] == "-9 091"
    assert rows["Carbon offsets"]["k_eur"] == "2 379"
