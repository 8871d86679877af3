"""Biodiversity-equivalent and carbon footprint accounting from input-output tables to impact statements."""

from .characterization import (
    ECOSYSTEMS,
    CharacterizationTable,
    ClimateCharacterization,
    DriverConcordance,
    ImpactFactorSet,
    RegionConcordance,
    build_factor_set,
)
from .footprint import BDE_WEIGHTS, biodiversity_equivalent, format_bde
from .mrio import EconomicCore, RegionSectorIndex, SatelliteTable, leontief_inverse, source_attribution
from .offsets import OffsetScenario, quote_offset
from .pipeline import run_pipeline

__version__ = "0.1.0"
