from decimal import Decimal

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from biovalent.characterization import ImpactFactorSet
from biovalent.errors import CategorizationError, CoverageError
from biovalent.footprint import (
    EcosystemFootprint,
    aggregate_categories,
    biodiversity_equivalent,
    carbon_footprint,
    compute_line_footprints,
    format_bde,
    line_footprint,
    parse_bde,
    total_bf,
)
from biovalent.ledger import AccountMapping, Ledger, LedgerEntry, PhysicalIntensity, map_accounts
from biovalent.mrio import RegionSectorIndex


def bde(t, f, m):
    return biodiversity_equivalent(EcosystemFootprint(t, f, m)).value


def test_weights():
    assert bde(1, 0, 0) == 0.801
    assert bde(0, 1, 0) == 0.096
    assert bde(0, 0, 1) == 0.102
    # weights are not renormalized
    assert bde(1, 1, 1) == pytest.approx(0.999, abs=1e-15)


def test_linearity_on_random_triples():
    rng = np.random.default_rng(2023)
    x = rng.uniform(-1, 1, (1000, 3))
    y = rng.uniform(-1, 1, (1000, 3))
    a, b = rng.uniform(-10, 10, (2, 1000))
    for i in range(1000):
        lhs = bde(*(a[i] * x[i] + b[i] * y[i]))
        rhs = a[i] * bde(*x[i]) + b[i] * bde(*y[i])
        assert abs(lhs - rhs) <= 1e-12


@pytest.mark.parametrize("value, text", [
    (6.879e-8, "68.79 nBDe"),
    (4.70e-8, "47.00 nBDe"),
    (9.318e-10, "931.80 pBDe"),
    (2.5e-13, "250.00 fBDe"),
    (1e-15, "1.00 fBDe"),
    (5e-16, "5.00e-16 BDe"),
    (0.0, "0.00e+00 BDe"),
    (-6.879e-8, "-68.79 nBDe"),
    (1.2e-6, "1.20e-06 BDe"),
])
def test_format_examples(value, text):
    assert format_bde(value) == text


def test_format_rounding_moves_to_larger_prefix():
    # 999.996 p rounds to 1000.00 p, which belongs to the nano range
    assert format_bde(999.996e-12) == "1.00 nBDe"


def _oracle_prefix(v: float) -> str | None:
    """Largest prefix whose 2-decimal mantissa lies in [1, 1000), from exact decimal arithmetic."""
    for p, e in (("n", -9), ("p", -12), ("f", -15)):
        m = (Decimal(v) * Decimal(10) ** -e).quantize(Decimal("0.01"))
        if 1 <= m < 1000:
            return p
    return None


def test_prefix_rule_on_random_magnitudes():
    rng = np.random.default_rng(9)
    for v in 10 ** rng.uniform(-18, -6, 1000):
        s = format_bde(float(v))
        p = _oracle_prefix(float(v))
        if p is None:
            assert "e" in s and s.endswith(" BDe")
            assert float(s.split()[0]) == pytest.approx(v, rel=1e-2)
        else:
            num, unit = s.split()
            assert unit == f"{p}BDe"
            assert 1 <= float(num) < 1000
            assert parse_bde(s) == pytest.approx(v, rel=6e-3)


@given(st.floats(1e-15, 9.9e-7))
def test_parse_round_trip(v):
    s = format_bde(v)
    scale = {"n": 1e-9, "p": 1e-12, "f": 1e-15}[s.split()[1][0]]
    # within half a unit of the second decimal of the mantissa
    assert abs(parse_bde(s) - v) <= 0.005 * scale * (1 + 1e-9)


def test_merged_ledger_is_additive():
    a, b = _mapped(), _mapped()
    merged = type(a)(a.monetary + b.monetary, a.physical + b.physical)
    fs = _factors()
    one = compute_line_footprints(a, fs)
    both = compute_line_footprints(merged, fs)
    assert total_bf(both) == total_bf(one) + total_bf(one)
    assert carbon_footprint(both) == 2 * carbon_footprint(one)


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_bde("68.79 kBDe")
    with pytest.raises(ValueError):
        format_bde(float("nan"))


def test_line_footprint():
    bf, co2 = line_footprint(100.0, [1e-15, 2e-15, 0.0], 0.5)
    assert bf == EcosystemFootprint(1e-13, 2e-13, 0.0)
    assert co2 == 50.0
    bf, _ = line_footprint(2.0, {"marine": 1.0}, 0.0)
    assert bf.marine == 2.0 and bf.terrestrial == 0.0


def _mapped():
    ledger = Ledger((
        LedgerEntry("1", "a", 2023, "monetary", 1000.0, "EUR", "Food", "Services"),
        LedgerEntry("2", "b", 2023, "monetary", 500.0, "EUR", "IT", "Services"),
        LedgerEntry("3", "c", 2023, "monetary", -100.0, "EUR", "Food", "Raw"),
        LedgerEntry("4", "d", 2023, "physical", 10.0, "MWh", "Heat", "Other"),
    ))
    mapping = AccountMapping({"1": ("FI", "a"), "2": ("FI", "b"), "3": ("BR", "a")},
                             {"4": PhysicalIntensity((1e-12, 0, 0), 100.0, "MWh", 80.0)})
    return map_accounts(ledger, mapping, {2023: 0.0}, {"a": 0.0, "b": 0.0})


def _factors():
    idx = RegionSectorIndex(("FI", "BR"), ("a", "b"))
    bde = np.array([[1e-15, 1e-16, 0], [2e-15, 0, 0], [5e-14, 0, 1e-16], [0, 0, 0]])
    return ImpactFactorSet(idx, bde, [0.5, 0.2, 0.9, 0.0])


def test_line_footprints_and_partition():
    lines = compute_line_footprints(_mapped(), _factors())
    assert lines[0].bf == EcosystemFootprint(1e-12, 1e-13, 0.0)
    assert lines[2].co2e_kg == pytest.approx(-90.0)            # credit note reduces
    assert lines[3].nominal_eur == 800.0 and lines[3].co2e_kg == 1000.0
    cats = aggregate_categories(lines)
    assert [c.category for c in cats] == ["Food", "IT", "Heat"]
    total = biodiversity_equivalent(total_bf(lines)).value
    assert sum(c.bde.value for c in cats) == pytest.approx(total, rel=1e-12)
    assert sum(c.co2e_kg for c in cats) == pytest.approx(carbon_footprint(lines))
    by_line = aggregate_categories(lines, key="statement_line")
    assert {c.category: c.n_lines for c in by_line} == {"Services": 2, "Raw": 1, "Other": 1}
    broad = aggregate_categories(lines, {"Food": "Goods", "IT": "Goods", "Heat": "Energy"})
    assert [c.category for c in broad] == ["Goods", "Energy"]
    with pytest.raises(CategorizationError):
        aggregate_categories(lines, {"Food": "Goods"})


def test_intensity_undefined_without_consumption():
    lines = compute_line_footprints(_mapped(), _factors())
    raw = [c for c in aggregate_categories(lines, key="statement_line") if c.category == "Raw"][0]
    assert raw.consumption_eur < 0 and raw.bde_intensity is None and raw.co2e_intensity is None


def test_missing_factor_strict_and_lenient():
    small = ImpactFactorSet(RegionSectorIndex(("FI",), ("a", "b")), np.zeros((2, 3)), [0.0, 0.0])
    with pytest.raises(CoverageError, match="BR"):
        compute_line_footprints(_mapped(), small)
    lines = compute_line_footprints(_mapped(), small, strict=False)
    assert lines[2].flag == "missing_factor" and lines[2].co2e_kg == 0.0
