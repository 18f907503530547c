"""Conversions between ordinary frequencies (GHz, MHz) and angular frequencies in rad/ns.

Everything inside the package is angular (rad/ns) with times in ns. Ordinary
frequencies only appear at the I/O boundary.
"""

import math

TWO_PI = 2.0 * math.pi


def from_ghz(nu):
    return TWO_PI * nu


def from_mhz(nu):
    return TWO_PI * 1e-3 * nu


def to_ghz(omega):
    return omega / TWO_PI


def to_mhz(omega):
    return omega / (TWO_PI * 1e-3)
