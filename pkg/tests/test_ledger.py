import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from biovalent.errors import ConfigurationError, DegenerateSectorError, InputError, MappingError
from biovalent.ledger import (
    AccountMapping,
    InflationTable,
    Ledger,
    LedgerEntry,
    PhysicalIntensity,
    SectorPrices,
    adjust_inflation,
    compute_bpcf,
    harmonize_price,
    map_accounts,
)

IF_GRID = (-0.05, 0.0, 0.1, 0.3)
BPCF_GRID = (-0.667, 0.0, 0.3)
FAP_GRID = (0.0, 1.0, 100.0, -250.0, 1234567.89)


def test_grid_matches_closed_form_exactly():
    for fap, i, b in itertools.product(FAP_GRID, IF_GRID, BPCF_GRID):
        assert harmonize_price(fap, i, b) == fap * (1 - i) * (1 - b)
        # two-step form agrees with the single expression
        assert harmonize_price(fap, i, b) == adjust_inflation(fap, i) * (1 - b)


def test_worked_example():
    assert harmonize_price(100, 0.1, 0.3) == pytest.approx(63.0, rel=1e-15)


@given(st.floats(-1e9, 1e9), st.floats(-0.5, 0.9), st.floats(-0.9, 0.9))
def test_credit_notes_keep_sign(fap, i, b):
    assert harmonize_price(-fap, i, b) == -harmonize_price(fap, i, b)


def test_bpcf():
    # margin = 4 - 9 + 1.5 + 22 = 18.5 on a supply of 100
    assert compute_bpcf(SectorPrices(4, 9, 1.5, 22, 100)) == pytest.approx(18.5 / 118.5)
    # subsidies outweighing taxes and margins give a negative factor
    assert compute_bpcf(SectorPrices(0, 40, 0, 0, 100)) == pytest.approx(-40 / 60)
    with pytest.raises(DegenerateSectorError):
        compute_bpcf(SectorPrices(0, 10, 0, 0, 10), "X")


def _ledger():
    return Ledger((
        LedgerEntry("1", "chemicals", 2023, "monetary", 1000.0, "EUR", "Supplies", "Raw"),
        LedgerEntry("2", "credit", 2022, "monetary", -200.0, "EUR", "Supplies", "Raw"),
        LedgerEntry("3", "power", 2023, "physical", 5000.0, "kWh", "Electricity", "Other"),
    ))


def _mapping():
    return AccountMapping({"1": ("DE", "MAN"), "2": ("DE", "MAN")},
                          {"3": PhysicalIntensity((1e-16, 0, 0), 0.1, "kWh", 0.08)})


def test_map_accounts():
    m = map_accounts(_ledger(), _mapping(), {2022: 0.1, 2023: 0.2}, {"MAN": 0.25})
    assert [ln.harmonized_eur for ln in m.monetary] == pytest.approx([1000 * 0.8 * 0.75, -200 * 0.9 * 0.75])
    assert m.by_sector() == {("DE", "MAN"): pytest.approx(600 - 135)}
    assert m.physical[0].display_eur == pytest.approx(400.0)
    assert len(m.audit()) == 3
    assert [e.account_id for e in _ledger().credits] == ["2"]


def test_unmapped_accounts_listed():
    extra = Ledger(_ledger().entries + (LedgerEntry("9", "x", 2023, "monetary", 1.0),))
    with pytest.raises(MappingError) as ei:
        map_accounts(extra, _mapping(), {2022: 0.1, 2023: 0.2}, {"MAN": 0.25})
    assert "9" in str(ei.value)


def test_missing_year_or_sector():
    with pytest.raises(ConfigurationError, match="2022"):
        map_accounts(_ledger(), _mapping(), {2023: 0.2}, {"MAN": 0.25})
    with pytest.raises(ConfigurationError, match="MAN"):
        map_accounts(_ledger(), _mapping(), {2022: 0.1, 2023: 0.2}, {})
    assert InflationTable({2023: 0.2}).factor(2023) == 0.2


def test_physical_unit_mismatch():
    mapping = AccountMapping({"1": ("DE", "MAN"), "2": ("DE", "MAN")},
                             {"3": PhysicalIntensity((1e-16, 0, 0), 0.1, "MWh")})
    with pytest.raises(InputError, match="MWh"):
        map_accounts(_ledger(), mapping, {2022: 0.1, 2023: 0.2}, {"MAN": 0.25})


def test_entry_validation():
    with pytest.raises(InputError):
        LedgerEntry("1", "x", 2023, "barter", 1.0)
    with pytest.raises(InputError):
        LedgerEntry("1", "x", 2023, "physical", 1.0, "")
    with pytest.raises(InputError):
        AccountMapping({"1": ("A", "b")}, {"1": PhysicalIntensity((0, 0, 0), 0, "kWh")})
    with pytest.raises(InputError):
        PhysicalIntensity((-1, 0, 0), 0, "kWh")
