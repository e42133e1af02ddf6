"""Physical constants and unit conversion.

Everything internal to the package runs in Hartree atomic units
(hbar = 1, m_e = 1, e = 1, lengths in Bohr). Lab-facing quantities
(trap frequencies in kHz, bond lengths in pm, binding energies in
kcal/mol) are converted at module boundaries with the table below.

kHz values are ordinary (non-angular) frequencies, as quoted by trap
experiments; the kHz <-> energy conversion therefore carries a factor
2*pi on top of the atomic time unit.
"""

from __future__ import annotations

import math

from .errors import UnsupportedUnit

# CODATA 2018
BOHR_PM = 52.9177210903               # Bohr radius in picometers
HARTREE_KCAL_PER_MOL = 627.5094740631
HARTREE_INV_CM = 219474.6313632
ATOMIC_TIME_S = 2.4188843265857e-17   # hbar / E_h
AMU_IN_ELECTRON_MASSES = 1822.888486209

# 1 kHz of ordinary frequency as an energy in Hartree: E = 2*pi*hbar*nu
KHZ_TO_HARTREE = 2.0 * math.pi * 1.0e3 * ATOMIC_TIME_S

_ALIASES = {
    "au": "au", "a.u.": "au", "hartree": "au", "ha": "au",
    "khz": "khz",
    "cm-1": "cm-1", "cm^-1": "cm-1", "1/cm": "cm-1", "invcm": "cm-1",
    "kcal/mol": "kcal/mol", "kcalmol": "kcal/mol",
    "pm": "pm",
    "bohr": "bohr", "a0": "bohr",
    "u": "u", "amu": "u", "dalton": "u",
    "me": "me", "m_e": "me",
}

# factor that takes a value in the unit to the group's atomic unit
_ENERGY = {"au": 1.0,
           "khz": KHZ_TO_HARTREE,
           "cm-1": 1.0 / HARTREE_INV_CM,
           "kcal/mol": 1.0 / HARTREE_KCAL_PER_MOL}
_LENGTH = {"bohr": 1.0, "pm": 1.0 / BOHR_PM}
_MASS = {"me": 1.0, "u": AMU_IN_ELECTRON_MASSES}

_GROUPS = (_ENERGY, _LENGTH, _MASS)


def _normalize(unit: str) -> str:
    key = str(unit).strip().lower()
    if key not in _ALIASES:
        raise UnsupportedUnit(f"unknown unit {unit!r}")
    return _ALIASES[key]


def unit_convert(value: float, from_unit: str, to_unit: str) -> float:
    """Convert ``value`` between two units of the same dimension.

    Supported: energy/frequency {au, kHz, cm-1, kcal/mol} (identified
    through hbar = 1), length {bohr, pm}, mass {me, u}. Conversions
    across dimension groups raise UnsupportedUnit.
    """
    src = _normalize(from_unit)
    dst = _normalize(to_unit)
    if src == dst:
        return float(value)
    for group in _GROUPS:
        if src in group and dst in group:
            return float(value) * group[src] / group[dst]
    raise UnsupportedUnit(f"cannot convert {from_unit!r} to {to_unit!r}")
