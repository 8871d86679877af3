"""Multi-regional input-output engine.

Builds technical coefficients, solves the Leontief system and attributes each
satellite stressor to the region where it physically occurs and to the
(consuming region, product) column whose final demand drives it.

Matrices are dense numpy arrays over a flattened (region, sector) index with
the region as the outer loop.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateSectorError,
    InputError,
    ProductivityError,
    StructuralError,
    UnitError,
)

logger = logging.getLogger(__name__)

LABEL_SEP = ":"
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class RegionSectorIndex:
    regions: tuple[str, ...]
    sectors: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        object.__setattr__(self, "sectors", tuple(self.sectors))
        for axis, codes in (("region", self.regions), ("sector", self.sectors)):
            if not codes:
                raise StructuralError(f"empty {axis} list")
            dupes = sorted({c for c in codes if codes.count(c) > 1})
            if dupes:
                raise StructuralError(f"duplicate {axis} codes: {dupes}")
        object.__setattr__(self, "_region_pos", {r: i for i, r in enumerate(self.regions)})
        object.__setattr__(self, "_sector_pos", {s: i for i, s in enumerate(self.sectors)})

    def __len__(self) -> int:
        return len(self.regions) * len(self.sectors)

    @property
    def n_regions(self) -> int:
        return len(self.regions)

    @property
    def n_sectors(self) -> int:
        return len(self.sectors)

    def position(self, region: str, sector: str) -> int:
        try:
            return self._region_pos[region] * self.n_sectors + self._sector_pos[sector]
        except KeyError:
            raise StructuralError(f"unknown region/sector pair ({region!r}, {sector!r})") from None

    def region_position(self, region: str) -> int:
        try:
            return self._region_pos[region]
        except KeyError:
            raise StructuralError(f"unknown region {region!r}") from None

    def locate(self, n: int) -> tuple[str, str]:
        r, s = divmod(n, self.n_sectors)
        return self.regions[r], self.sectors[s]

    def pairs(self) -> list[tuple[str, str]]:
        return [(r, s) for r in self.regions for s in self.sectors]

    def labels(self) -> list[str]:
        return [f"{r}{LABEL_SEP}{s}" for r, s in self.pairs()]

    @classmethod
    def from_labels(cls, labels: Sequence[str]) -> "RegionSectorIndex":
        """Recover the index from ``region:sector`` labels in row-major order."""
        pairs = []
        for lab in labels:
            if lab.count(LABEL_SEP) != 1:
                raise StructuralError(f"label {lab!r} is not of the form region{LABEL_SEP}sector")
            pairs.append(tuple(p.strip() for p in lab.split(LABEL_SEP)))
        regions = list(dict.fromkeys(p[0] for p in pairs))
        sectors = list(dict.fromkeys(p[1] for p in pairs))
        index = cls(tuple(regions), tuple(sectors))
        if [tuple(p) for p in pairs] != index.pairs():
            raise StructuralError("labels do not enumerate a complete region x sector grid "
                                  "in row-major (region outer) order")
        return index

    def permuted(self, region_order: Sequence[str]) -> tuple["RegionSectorIndex", np.ndarray]:
        """New index with regions reordered, plus the gather array old->new positions."""
        new = RegionSectorIndex(tuple(region_order), self.sectors)
        if sorted(new.regions) != sorted(self.regions):
            raise StructuralError("permutation must contain exactly the same regions")
        take = np.array([self.position(r, s) for r, s in new.pairs()])
        return new, take


def _as_matrix(a, name: str) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1) if name == "Y" else arr
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains NaN or Inf")
    return arr


@dataclass(frozen=True)
class EconomicCore:
    """Z (inter-industry flows), Y (final demand per consuming region), x (gross output).

    ``x`` is derived from Z and Y when omitted. ``year`` and ``role`` tag the table
    so that shares and intensities may come from differently dated tables.
    """

    index: RegionSectorIndex
    Z: np.ndarray
    Y: np.ndarray
    x: np.ndarray | None = None
    year: int | None = None
    role: str = "intensity"

    def __post_init__(self):
        n = len(self.index)
        Z = _as_matrix(self.Z, "Z")
        Y = _as_matrix(self.Y, "Y")
        if Z.shape != (n, n):
            raise StructuralError(f"Z has shape {Z.shape}, expected ({n}, {n}) from the index")
        if Y.shape != (n, self.index.n_regions):
            raise StructuralError(
                f"Y has shape {Y.shape}, expected ({n}, {self.index.n_regions}) "
                "(rows region:sector, columns consuming regions)")
        if (Z < 0).any():
            raise InputError("Z has negative entries")
        if (Y < 0).any():
            raise InputError("Y has negative entries")
        if self.x is None:
            x = derive_output(Z, Y)
        else:
            x = np.array(self.x, dtype=float)
            if x.shape != (n,):
                raise StructuralError(f"x has shape {x.shape}, expected ({n},)")
            if not np.all(np.isfinite(x)) or (x < 0).any():
                raise InputError("x must be finite and non-negative")
            tol = 1e-6 * max(float(x.max()), 0.0)
            short = x < Z.sum(axis=1) - tol
            if short.any():
                r, s = self.index.locate(int(np.flatnonzero(short)[0]))
                raise InputError(f"gross output below intermediate use at ({r}, {s})")
        for name, arr in (("Z", Z), ("Y", Y), ("x", x)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def A(self) -> np.ndarray:
        return build_coefficients(self.Z, self.x, self.index)

    @property
    def L(self) -> np.ndarray:
        return leontief_inverse(self.A)


@dataclass(frozen=True)
class SatelliteTable:
    """Stressor accounts: one named row per stressor with its physical unit."""

    names: tuple[str, ...]
    units: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        names, units = tuple(self.names), tuple(self.units)
        values = np.atleast_2d(np.array(self.values, dtype=float))
        if len(set(names)) != len(names):
            raise StructuralError("satellite row names must be unique")
        if len(units) != len(names) or values.shape[0] != len(names):
            raise StructuralError("satellite names, units and values disagree in length")
        if any(not u for u in units):
            raise UnitError("every satellite row needs a unit")
        if not np.all(np.isfinite(values)):
            raise InputError("satellite values contain NaN or Inf")
        values.setflags(write=False)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "units", units)
        object.__setattr__(self, "values", values)

    def row(self, name: str) -> np.ndarray:
        return self.values[self._pos(name)]

    def unit(self, name: str) -> str:
        return self.units[self._pos(name)]

    def _pos(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise StructuralError(f"no satellite row named {name!r}") from None

    def check_length(self, n: int):
        if self.values.shape[1] != n:
            raise StructuralError(f"satellite vectors have length {self.values.shape[1]}, expected {n}")


@dataclass(frozen=True)
class AttributionTensor:
    """values[i, (j,k)]: stressor occurring in region i driven by demand column (j,k)."""

    index: RegionSectorIndex
    values: np.ndarray
    stressor: str = ""
    unit: str = ""

    @property
    def column_totals(self) -> np.ndarray:
        return self.values.sum(axis=0)


@dataclass(frozen=True)
class IntensityTable:
    """Stressor per euro of final consumption for each (consuming region, product)."""

    index: RegionSectorIndex
    values: np.ndarray
    zero_demand: np.ndarray = field(default=None)
    stressor: str = ""
    unit: str = ""

    def __post_init__(self):
        if self.zero_demand is None:
            object.__setattr__(self, "zero_demand", np.zeros(len(self.values), dtype=bool))


def derive_output(Z, Y) -> np.ndarray:
    """Gross output as intermediate use plus final demand."""
    Z = np.asarray(Z, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y.reshape(-1, 1)
    if Z.ndim != 2 or Z.shape[0] != Z.shape[1]:
        raise StructuralError(f"Z must be square, got shape {Z.shape} (rows vs columns)")
    if Y.shape[0] != Z.shape[0]:
        raise StructuralError(f"Y has {Y.shape[0]} rows but Z has {Z.shape[0]} (row axis)")
    if not (np.all(np.isfinite(Z)) and np.all(np.isfinite(Y))):
        raise InputError("Z and Y must be finite")
    return Z.sum(axis=1) + Y.sum(axis=1)


def _name_position(index: RegionSectorIndex | None, n: int) -> str:
    if index is None:
        return f"column {n + 1}"
    r, s = index.locate(n)
    return f"({r}, {s})"


def build_coefficients(Z, x, index: RegionSectorIndex | None = None) -> np.ndarray:
    Z = np.asarray(Z, dtype=float)
    x = np.asarray(x, dtype=float)
    if Z.ndim != 2 or Z.shape[0] != Z.shape[1] or x.shape != (Z.shape[1],):
        raise StructuralError(f"Z {Z.shape} and x {x.shape} are incompatible")
    zero = x == 0
    bad = zero & (Z != 0).any(axis=0)
    if bad.any():
        n = int(np.flatnonzero(bad)[0])
        loc = index.locate(n) if index is not None else (None, None)
        raise DegenerateSectorError(
            f"zero output with nonzero inputs at {_name_position(index, n)}", *loc)
    safe = np.where(zero, 1.0, x)
    return Z / safe[np.newaxis, :]


def spectral_radius(A) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(A)))) if len(A) else 0.0


def leontief_inverse(A, method: str = "direct", tol: float = 1e-12,
                     max_iter: int = 10_000) -> np.ndarray:
    """Total requirements (I - A)^-1.

    ``method="iterative"`` sums the power series instead of factorizing, for large
    sparse-ish systems where a dense solve is too costly.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise StructuralError(f"A must be square, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError("A contains NaN or Inf")
    n = A.shape[0]
    eye = np.eye(n)
    # column sums below 1 bound the spectral radius; only fall back to eigenvalues otherwise
    if n and np.abs(A).sum(axis=0).max() >= 1.0:
        rho = spectral_radius(A)
        if rho >= 1.0:
            raise ProductivityError(f"spectral radius {rho:.6g} >= 1, system is not productive")
    if method == "direct":
        try:
            L = np.linalg.solve(eye - A, eye)
        except np.linalg.LinAlgError as exc:
            raise ProductivityError(f"I - A is singular: {exc}") from exc
    elif method == "iterative":
        L = eye.copy()
        term = eye.copy()
        for _ in range(max_iter):
            term = term @ A
            L += term
            if np.abs(term).max() < tol:
                break
        else:
            raise ProductivityError("power series did not converge")
    else:
        raise ValueError(f"unknown method {method!r}")
    resid = np.abs((eye - A) @ L - eye).max() if n else 0.0
    if resid > RESIDUAL_TOL:
        raise ProductivityError(f"inverse residual {resid:.3g} exceeds {RESIDUAL_TOL}")
    return L


def _stressor_intensity(f, x, index):
    f = np.asarray(f, dtype=float)
    x = np.asarray(x, dtype=float)
    if f.shape != x.shape:
        raise StructuralError(f"stressor vector {f.shape} does not match output {x.shape}")
    bad = (x == 0) & (f != 0)
    if bad.any():
        n = int(np.flatnonzero(bad)[0])
        loc = index.locate(n) if index is not None else (None, None)
        raise DegenerateSectorError(
            f"stressor recorded at zero-output sector {_name_position(index, n)}", *loc)
    return np.divide(f, x, out=np.zeros_like(f), where=x != 0)


def _resolve_index(index, n, n_regions):
    if index is not None:
        if len(index) != n or index.n_regions != n_regions:
            raise StructuralError("index does not match matrix dimensions")
        return index
    if n % n_regions:
        raise StructuralError(f"N={n} is not a multiple of {n_regions} consuming regions")
    return RegionSectorIndex(tuple(f"R{r}" for r in range(n_regions)),
                             tuple(f"S{s}" for s in range(n // n_regions)))


def source_attribution(f, L, Y, x, index: RegionSectorIndex | None = None,
                       stressor: str = "", unit: str = "") -> AttributionTensor:
    """Attribute stressor ``f`` to (impact region) x (consuming region, product).

    Equivalent to diagonalizing the stressor, taking the consumption-based
    account of every final-demand column, and summing source sectors into
    their region.
    """
    L = np.asarray(L, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y.reshape(-1, 1)
    n = L.shape[0]
    if L.shape != (n, n) or Y.shape[0] != n:
        raise StructuralError(f"L {L.shape} and Y {Y.shape} are incompatible")
    index = _resolve_index(index, n, Y.shape[1])
    R, S = index.n_regions, index.n_sectors
    s = _stressor_intensity(f, x, index)

    # M[n, r, k] = s[n] * L[n, (r, k)] ; Yr[r, k, j] = Y[(r, k), j]
    M = (s[:, np.newaxis] * L).reshape(n, R, S)
    Yr = Y.reshape(R, S, R)
    per_source = np.einsum("nrk,rkj->njk", M, Yr)          # (n, j, k)
    values = per_source.reshape(R, S, R * S).sum(axis=1)     # sum source sectors
    return AttributionTensor(index, values, stressor, unit)


def footprint_intensity(f, L, Y, x, index: RegionSectorIndex | None = None,
                        stressor: str = "", unit: str = "",
                        attribution: AttributionTensor | None = None) -> IntensityTable:
    """Embodied stressor per euro of final demand for each (consuming region, product)."""
    if attribution is None:
        attribution = source_attribution(f, L, Y, x, index, stressor, unit)
    index = attribution.index
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y.reshape(-1, 1)
    R, S = index.n_regions, index.n_sectors
    demand = Y.reshape(R, S, R).sum(axis=0).T.reshape(-1)    # (j, k) flattened
    totals = attribution.column_totals
    zero = demand == 0
    values = np.divide(totals, demand, out=np.zeros_like(totals), where=~zero)
    if zero.any():
        logger.debug("%s: %d columns with zero final demand", stressor or "stressor", int(zero.sum()))
    return IntensityTable(index, values, zero, stressor or attribution.stressor,
                          unit or attribution.unit)


def column_demand(Y, index: RegionSectorIndex) -> np.ndarray:
    """Final demand of consuming region j for product k, summed over origin regions."""
    R, S = index.n_regions, index.n_sectors
    return np.asarray(Y, dtype=float).reshape(R, S, R).sum(axis=0).T.reshape(-1)


def aggregate_stressor_rows(table: SatelliteTable, pattern: str, new_name: str) -> SatelliteTable:
    """Replace rows whose name matches ``pattern`` (regex, anchored at start) by their sum."""
    rx = re.compile(pattern)
    hit = [i for i, nm in enumerate(table.names) if rx.match(nm)]
    if not hit:
        logger.warning("pattern %r matched no satellite rows; table unchanged", pattern)
        return table
    units = {table.units[i] for i in hit}
    if len(units) > 1:
        raise UnitError(f"rows matching {pattern!r} carry different units: {sorted(units)}")
    keep = [i for i in range(len(table.names)) if i not in hit]
    if new_name in (table.names[i] for i in keep):
        raise StructuralError(f"aggregate name {new_name!r} collides with an existing row")
    # aggregate takes the slot of the first matched row
    names, units_out, rows = [], [], []
    first = hit[0]
    for i in range(len(table.names)):
        if i == first:
            names.append(new_name)
            units_out.append(table.units[i])
            rows.append(table.values[hit].sum(axis=0))
        elif i in keep:
            names.append(table.names[i])
            units_out.append(table.units[i])
            rows.append(table.values[i])
    return SatelliteTable(tuple(names), tuple(units_out), np.vstack(rows))


def row_diagnostics(table: SatelliteTable, core: EconomicCore) -> list[dict]:
    """Per-row sanity figures; negative or zero-output stressors are reported, not repaired."""
    out = []
    x = core.x
    for name, unit, f in zip(table.names, table.units, table.values):
        out.append({
            "stressor": name,
            "unit": unit,
            "total": float(f.sum()),
            "negative_cells": int((f < 0).sum()),
            "zero_output_cells": int(((x == 0) & (f != 0)).sum()),
        })
    return out
