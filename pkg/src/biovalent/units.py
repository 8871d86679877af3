"""Tiny unit vocabulary: normalization and scale conversion between stressor units."""

from __future__ import annotations

from .errors import UnitError

_SUPERSCRIPTS = str.maketrans({"²": "2", "³": "3"})

# unit -> (base unit, multiplier to base)
SCALES = {
    "m2": ("m2", 1.0),
    "ha": ("m2", 1e4),
    "km2": ("m2", 1e6),
    "m3": ("m3", 1.0),
    "Mm3": ("m3", 1e6),
    "kg": ("kg", 1.0),
    "g": ("kg", 1e-3),
    "t": ("kg", 1e3),
    "kt": ("kg", 1e6),
    "Gg": ("kg", 1e6),
    "kWh": ("kWh", 1.0),
    "MWh": ("kWh", 1e3),
    "TJ": ("kWh", 1e12 / 3.6e6),
}


def normalize(unit: str) -> str:
    """Strip whitespace, fold superscripts, drop a year suffix (``m2*yr`` -> ``m2``).

    Case is kept: ``Mm3`` and ``mm3`` differ.
    """
    u = unit.translate(_SUPERSCRIPTS).replace(" ", "")
    for suffix in ("*yr", "*a", "/yr", "·yr"):
        if u.endswith(suffix) and len(u) > len(suffix):
            u = u[: -len(suffix)]
            break
    return u


def denominator(unit: str) -> str:
    """The per-unit part of a characterization unit (``PDF/m2`` -> ``m2``)."""
    u = unit.translate(_SUPERSCRIPTS).replace(" ", "")
    if "/" in u:
        u = u.split("/", 1)[1]
    return normalize(u)


def conversion(src: str, dst: str) -> float:
    """Multiplier turning a quantity in ``src`` into ``dst``."""
    a, b = normalize(src), normalize(dst)
    if a == b:
        return 1.0
    if a in SCALES and b in SCALES and SCALES[a][0] == SCALES[b][0]:
        return SCALES[a][1] / SCALES[b][1]
    raise UnitError(f"cannot convert {src!r} to {dst!r}")
