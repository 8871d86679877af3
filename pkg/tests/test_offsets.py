import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from biovalent.errors import DomainError, ScenarioError
from biovalent.offsets import (
    CarbonOffsetQuote,
    OffsetScenario,
    annualize,
    average_gain,
    carbon_offset_cost,
    offset_cost,
    quote_offset,
    required_area,
    restoration_gain,
)


def test_ramp_endpoints():
    assert restoration_gain(2.65e-17, 100, 0) == 0.0
    assert restoration_gain(2.65e-17, 100, 100) == 2.65e-17
    assert restoration_gain(2.65e-17, 100, 30) == pytest.approx(0.3 * 2.65e-17, rel=1e-12)
    with pytest.raises(DomainError):
        restoration_gain(1.0, 100, 101)


def test_average_gain_oracles():
    c0, t_rec, H = 2.65e-17, 100.0, 30.0
    # continuous: mean of the ramp by fine trapezoid integration
    g = np.array([restoration_gain(c0, t_rec, ti) for ti in np.linspace(0, H, 301)])
    assert np.mean(g[:-1] + g[1:]) / 2 == pytest.approx(average_gain(c0, t_rec, H), rel=1e-9)
    # discrete: arithmetic mean of whole years 1..H
    yearly = [restoration_gain(c0, t_rec, y) for y in range(1, 31)]
    assert sum(yearly) / 30 == pytest.approx(average_gain(c0, t_rec, H, discrete=True), rel=1e-12)


def test_average_gain_reference_value():
    assert average_gain(2.65e-17, 100, 30) == pytest.approx(3.975e-18, rel=1e-12)
    # the reference figure 3.97e-18 is a truncation to three significant figures
    assert math.floor(average_gain(2.65e-17, 100, 30) / 1e-20) == 397


def test_domain_errors():
    with pytest.raises(DomainError):
        average_gain(1.0, 100, 0)
    with pytest.raises(DomainError):
        average_gain(1.0, 100, 150)
    with pytest.raises(ScenarioError):
        required_area(1e-9, 0.0)


def test_chain_hand_values():
    # 68.79e-9 BDe / 3.42e-16 BDe per m2 = 2.0114e8 m2 = 20,114 ha
    area = required_area(68.79e-9, 3.42e-16)
    assert area == pytest.approx(68.79e-9 / 3.42e-16 / 1e4, rel=1e-15)
    assert area == pytest.approx(20114.035, rel=1e-7)
    assert offset_cost(area, 901) == pytest.approx(18_122_745.6, rel=1e-8)
    assert annualize(offset_cost(area, 901), 30) == pytest.approx(604_091.5, rel=1e-7)


@given(st.floats(1e-12, 1e-6), st.floats(1e-19, 1e-14), st.floats(1, 1e5), st.floats(1, 100))
def test_annual_times_horizon_is_total(fp, gain, price, horizon):
    q = quote_offset(OffsetScenario("x", "X", price, gain=gain, horizon=horizon), fp)
    assert q.annual_cost * q.horizon == pytest.approx(q.total_cost, rel=1e-14)
    assert q.required_area * q.average_gain * 1e4 == pytest.approx(fp, rel=1e-14)


def test_fraction_scales_linearly():
    full = quote_offset(OffsetScenario("x", "X", 100, gain=1e-17), 1e-9)
    half = quote_offset(OffsetScenario("x", "X", 100, gain=1e-17, fraction=0.5), 1e-9)
    assert half.total_cost == pytest.approx(full.total_cost / 2)
    assert half.offset_bde == 0.5e-9


def test_scenario_validation():
    with pytest.raises(ScenarioError, match="exactly one"):
        OffsetScenario("x", "X", 100)
    with pytest.raises(ScenarioError, match="exactly one"):
        OffsetScenario("x", "X", 100, c0=1.0, gain=1.0)
    with pytest.raises(ScenarioError):
        OffsetScenario("x", "X", 0, gain=1.0)
    with pytest.raises(ScenarioError):
        OffsetScenario("x", "X", 100, gain=1.0, horizon=200)
    with pytest.raises(ScenarioError):
        OffsetScenario("x", "X", 100, gain=1.0, fraction=1.5)
    with pytest.raises(ScenarioError):
        quote_offset(OffsetScenario("x", "X", 100, c0=0.0), 1e-9)


def test_c0_and_discrete_scenarios():
    s = OffsetScenario("x", "X", 100, c0=2.65e-17)
    assert s.average_gain == pytest.approx(3.975e-18)
    d = OffsetScenario("x", "X", 100, c0=2.65e-17, discrete=True)
    assert d.average_gain == pytest.approx(2.65e-17 * 31 / 200)


def test_carbon_cost():
    assert carbon_offset_cost(10, 96, 0.9) == pytest.approx(864.0)
    assert CarbonOffsetQuote(10, 96, 1.0).cost == 960.0
