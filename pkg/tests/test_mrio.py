import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biovalent.errors import DegenerateSectorError, InputError, ProductivityError, StructuralError, UnitError
from biovalent.mrio import (
    EconomicCore,
    RegionSectorIndex,
    SatelliteTable,
    aggregate_stressor_rows,
    build_coefficients,
    column_demand,
    derive_output,
    footprint_intensity,
    leontief_inverse,
    source_attribution,
)

from conftest import attribution_oracle, neumann, random_economy


def test_closed_form_2x2_inverse():
    a, b, c, d = 0.2, 0.3, 0.1, 0.4
    det = (1 - a) * (1 - d) - b * c
    expected = np.array([[1 - d, b], [c, 1 - a]]) / det
    np.testing.assert_allclose(leontief_inverse(np.array([[a, b], [c, d]])), expected, rtol=1e-14)


def test_iterative_matches_direct():
    _, A, _, _ = random_economy(np.random.default_rng(1), 4, 3)
    np.testing.assert_allclose(leontief_inverse(A, "iterative"), leontief_inverse(A), atol=1e-10)


def test_unproductive_system_rejected():
    with pytest.raises(ProductivityError, match="spectral radius"):
        leontief_inverse(np.array([[0.5, 0.6], [0.6, 0.5]]))


def test_column_sums_above_one_but_productive_accepted():
    # column 0 sums to 1.1, yet the spectral radius is below 1
    A = np.array([[0.1, 0.0], [1.0, 0.1]])
    L = leontief_inverse(A)
    np.testing.assert_allclose((np.eye(2) - A) @ L, np.eye(2), atol=1e-12)


def test_bad_shapes_and_values():
    with pytest.raises(StructuralError):
        leontief_inverse(np.zeros((2, 3)))
    with pytest.raises(InputError):
        leontief_inverse(np.array([[np.nan, 0], [0, 0]]))
    with pytest.raises(ValueError):
        leontief_inverse(np.zeros((2, 2)), method="lu")


def test_derive_output_and_coefficients():
    Z = np.array([[10.0, 20.0], [30.0, 5.0]])
    Y = np.array([[70.0], [15.0]])
    x = derive_output(Z, Y)
    np.testing.assert_array_equal(x, [100.0, 50.0])
    np.testing.assert_allclose(build_coefficients(Z, x), [[0.1, 0.4], [0.3, 0.1]])


def test_zero_output_with_inputs_is_degenerate():
    idx = RegionSectorIndex(("R",), ("a", "b"))
    with pytest.raises(DegenerateSectorError) as ei:
        build_coefficients(np.array([[0.0, 1.0], [0.0, 1.0]]), np.array([5.0, 0.0]), idx)
    assert (ei.value.region, ei.value.sector) == ("R", "b")


def test_zero_output_without_inputs_is_fine():
    A = build_coefficients(np.array([[1.0, 0.0], [0.0, 0.0]]), np.array([5.0, 0.0]))
    np.testing.assert_array_equal(A, [[0.2, 0.0], [0.0, 0.0]])


def test_core_validation():
    idx = RegionSectorIndex(("A", "B"), ("p",))
    Z = np.array([[1.0, 2.0], [3.0, 4.0]])
    Y = np.array([[5.0, 1.0], [2.0, 2.0]])
    core = EconomicCore(idx, Z, Y)
    np.testing.assert_array_equal(core.x, [9.0, 11.0])
    with pytest.raises(StructuralError, match="consuming regions"):
        EconomicCore(idx, Z, Y[:, :1])
    with pytest.raises(InputError, match="negative"):
        EconomicCore(idx, -Z, Y)
    with pytest.raises(InputError, match="below intermediate use"):
        EconomicCore(idx, Z, Y, x=np.array([2.0, 11.0]))


def test_core_does_not_freeze_caller_arrays():
    idx = RegionSectorIndex(("A",), ("p", "q"))
    Z = np.array([[1.0, 0.0], [0.0, 1.0]])
    EconomicCore(idx, Z, np.ones((2, 1)))
    Z[0, 0] = 2.0   # still writable


def test_index_labels_round_trip_and_order():
    idx = RegionSectorIndex(("FI", "BR"), ("AGR", "SRV"))
    assert idx.labels() == ["FI:AGR", "FI:SRV", "BR:AGR", "BR:SRV"]
    assert RegionSectorIndex.from_labels(idx.labels()) == idx
    assert idx.position("BR", "AGR") == 2
    with pytest.raises(StructuralError, match="row-major"):
        RegionSectorIndex.from_labels(["FI:AGR", "BR:AGR", "FI:SRV", "BR:SRV"])
    with pytest.raises(StructuralError, match="duplicate"):
        RegionSectorIndex(("FI", "FI"), ("AGR",))


def test_attribution_hand_example():
    # 2 regions x 1 product; values worked out by hand
    L = np.array([[1.25, 0.5], [0.25, 1.5]])
    Y = np.array([[40.0, 10.0], [20.0, 60.0]])
    f = np.array([10.0, 30.0])
    x = np.array([100.0, 200.0])
    t = source_attribution(f, L, Y, x)
    np.testing.assert_allclose(t.values, [[6.0, 4.25], [6.0, 13.875]], rtol=1e-14)


def test_attribution_matches_loop_oracle():
    rng = np.random.default_rng(7)
    index, A, Y, x = random_economy(rng, 3, 2)
    f = rng.uniform(0, 5, len(index))
    t = source_attribution(f, leontief_inverse(A), Y, x, index)
    np.testing.assert_allclose(t.values, attribution_oracle(f, leontief_inverse(A), Y, x, 3), rtol=1e-12)


def test_attribution_keeps_negative_stressors():
    # a net removal (negative stressor) must not be clipped
    L = np.eye(2)
    Y = np.array([[1.0, 0.0], [0.0, 1.0]])
    t = source_attribution(np.array([-2.0, 3.0]), L, Y, np.array([1.0, 1.0]))
    assert t.values.sum() == pytest.approx(1.0)


def test_stressor_at_zero_output_rejected():
    with pytest.raises(DegenerateSectorError):
        source_attribution(np.array([1.0, 1.0]), np.eye(2), np.ones((2, 1)), np.array([1.0, 0.0]))


def test_intensity_definition_and_zero_demand():
    L = np.array([[1.25, 0.5], [0.25, 1.5]])
    Y = np.array([[40.0, 0.0], [20.0, 0.0]])
    f = np.array([10.0, 30.0])
    x = np.array([100.0, 200.0])
    it = footprint_intensity(f, L, Y, x)
    assert it.values[0] == pytest.approx(12.0 / 60.0)
    assert it.values[1] == 0.0 and it.zero_demand.tolist() == [False, True]


def test_column_demand_sums_origins():
    idx = RegionSectorIndex(("A", "B"), ("p", "q"))
    Y = np.arange(8, dtype=float).reshape(4, 2)
    # column (A,p) = Y[(A,p),A] + Y[(B,p),A] = 0 + 4
    np.testing.assert_array_equal(column_demand(Y, idx), [0 + 4, 2 + 6, 1 + 5, 3 + 7])


def test_aggregate_rows():
    t = SatelliteTable(("W - a", "X", "W - b"), ("Mm3", "kg", "Mm3"), np.array([[1.0, 2.0], [5.0, 5.0], [3.0, 4.0]]))
    agg = aggregate_stressor_rows(t, "W - ", "W")
    assert agg.names == ("W", "X")
    np.testing.assert_array_equal(agg.row("W"), [4.0, 6.0])
    mixed = SatelliteTable(("W - a", "W - b"), ("Mm3", "m3"), np.ones((2, 2)))
    with pytest.raises(UnitError):
        aggregate_stressor_rows(mixed, "W - ", "W")


def test_aggregate_no_match_warns(caplog):
    t = SatelliteTable(("X",), ("kg",), np.ones((1, 2)))
    assert aggregate_stressor_rows(t, "nothing", "N") is t
    assert "matched no satellite rows" in caplog.text


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), regions=st.integers(1, 4), sectors=st.integers(1, 3))
def test_attribution_conserves_total_stressor(seed, regions, sectors):
    rng = np.random.default_rng(seed)
    index, A, Y, x = random_economy(rng, regions, sectors)
    f = rng.uniform(0, 10, len(index))
    t = source_attribution(f, leontief_inverse(A), Y, x, index)
    # with a consistent x, everything produced is attributed to some final demand column
    assert t.values.sum() == pytest.approx(f.sum(), rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_leontief_matches_neumann(seed):
    _, A, _, _ = random_economy(np.random.default_rng(seed), 3, 2)
    np.testing.assert_allclose(leontief_inverse(A), neumann(A), atol=1e-8)
