"""Conversion of the handful of units accepted in scenario files.

Everything downstream works in SI. Rates are angular (rad/s); a value quoted
as ``2pi*Hz`` is multiplied by 2π, plain ``Hz`` is taken as 1/s.
"""

import math

from .errors import UnitError

TWO_PI = 2.0 * math.pi

_SCALE = {
    "m": 1.0,
    "mm": 1e-3,
    "um": 1e-6,
    "µm": 1e-6,
    "μm": 1e-6,
    "nm": 1e-9,
    "W": 1.0,
    "mW": 1e-3,
    "uW": 1e-6,
    "Pa": 1.0,
    "mbar": 100.0,
    "K": 1.0,
    "Hz": 1.0,
    "rad/s": 1.0,
    "1/s": 1.0,
    "2pi*Hz": TWO_PI,
    "2π×Hz": TWO_PI,
    "2pi Hz": TWO_PI,
    "kg": 1.0,
    "kg/m^3": 1.0,
    "g/cm^3": 1000.0,
    "m^2": 1.0,
    "um^2": 1e-12,
    "µm^2": 1e-12,
    "1": 1.0,
    "": 1.0,
}

UNITS = frozenset(_SCALE)


def _scale(unit):
    try:
        return _SCALE[unit.strip() if unit.strip() else unit]
    except KeyError:
        raise UnitError(unit) from None


def to_si(value, unit):
    """Convert ``value`` expressed in ``unit`` to SI.

    >>> to_si(7e-9, "mbar")
    7e-07
    """
    return float(value) * _scale(unit)


def from_si(value, unit):
    return float(value) / _scale(unit)


def hz_label(rate):
    """Format an angular rate the way it is usually quoted: ``2π×<f> Hz``."""
    return f"2π×{rate / TWO_PI:.4g} Hz"
