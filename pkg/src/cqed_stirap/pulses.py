"""Gaussian pump/Stokes envelopes, the three-level Lambda Hamiltonian and its counterdiabatic drive.

Basis order is ``(|1>, |2>, |3>)``: ground, metastable target, excited. The
pump couples 1-3, the Stokes field couples 2-3 and the counterdiabatic (CD)
field couples 1-2. Times are in ns, frequencies in rad/ns.

Every function broadcasts over ``t`` and over array-valued schedule fields,
which is how parameter sweeps evaluate many schedules at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, UndefinedAngleError

ENVELOPE_FLOOR = 1e-12


@dataclass(frozen=True)
class PulseSchedule:
    """Pump/Stokes peak amplitudes (rad/ns), Stokes delay ``t_s`` and width ``sigma`` (ns).

    ``t_s < 0`` means the Stokes pulse comes first (counter-intuitive order).
    """

    omega_p: float
    omega_s: float
    t_s: float
    sigma: float

    def __post_init__(self):
        if np.any(np.asarray(self.sigma) <= 0):
            raise InvalidInputError("sigma must be > 0")
        if np.any(np.asarray(self.omega_p) < 0) or np.any(np.asarray(self.omega_s) < 0):
            raise InvalidInputError("pulse amplitudes must be >= 0")


@dataclass(frozen=True)
class DriveConfig:
    """One-photon detuning ``delta_1``, two-photon detuning ``delta_2`` (rad/ns) and CD switch."""

    delta_1: float = 0.0
    delta_2: float = 0.0
    cd_enabled: bool = False
    cd_scale: float = 1.0

    def __post_init__(self):
        if np.any(np.asarray(self.cd_scale) < 0):
            raise InvalidInputError("cd_scale must be >= 0")


def envelopes(t, s: PulseSchedule):
    t = np.asarray(t, dtype=float)
    two_var = 2.0 * s.sigma ** 2
    pump = s.omega_p * np.exp(-t ** 2 / two_var)
    stokes = s.omega_s * np.exp(-(t - s.t_s) ** 2 / two_var)
    return pump, stokes


def envelope_derivatives(t, s: PulseSchedule):
    t = np.asarray(t, dtype=float)
    pump, stokes = envelopes(t, s)
    var = s.sigma ** 2
    return -t / var * pump, -(t - s.t_s) / var * stokes


def _tail_angle(t, s):
    # exact for equal widths: ln(pump/stokes) is linear in t
    slope = -s.t_s / s.sigma ** 2
    with np.errstate(divide="ignore"):
        x = np.log(s.omega_p) - np.log(s.omega_s) + slope * (t - 0.5 * s.t_s)
    ax = np.abs(x)
    e = np.exp(-ax)
    theta = np.where(x < 0, np.arctan(e), 0.5 * np.pi - np.arctan(e))
    sech = 2.0 * e / (1.0 + e * e)
    theta_dot = np.where(np.isfinite(x), 0.5 * slope * sech, 0.0)
    return theta, theta_dot


def mixing_angle(t, s: PulseSchedule):
    """Return ``(theta, theta_dot)`` with ``tan(theta) = Omega_p(t) / Omega_s(t)``.

    ``theta_dot`` is evaluated analytically from the envelopes and their
    derivatives. Where both envelopes are below ``1e-12`` rad/ns the angle
    comes from the log-ratio of the two Gaussians, which stays finite in the
    tails.
    """
    t = np.asarray(t, dtype=float)
    if np.any((np.asarray(s.omega_p) == 0) & (np.asarray(s.omega_s) == 0)):
        raise UndefinedAngleError("both pump and Stokes amplitudes are zero")
    pump, stokes = envelopes(t, s)
    dpump, dstokes = envelope_derivatives(t, s)
    norm2 = pump ** 2 + stokes ** 2
    tail = (pump < ENVELOPE_FLOOR) & (stokes < ENVELOPE_FLOOR)
    with np.errstate(invalid="ignore", divide="ignore"):
        theta = np.arctan2(pump, stokes)
        theta_dot = (dpump * stokes - pump * dstokes) / norm2
    if np.any(tail):
        tail_theta, tail_dot = _tail_angle(t, s)
        theta = np.where(tail, tail_theta, theta)
        theta_dot = np.where(tail, tail_dot, theta_dot)
    return theta, theta_dot


def cd_envelope_closed_form(t, s: PulseSchedule):
    """Sech-shaped CD Rabi frequency for equal pump and Stokes amplitudes.

    ``Omega_a(t) = -(t_s/sigma^2) sech[-(t_s/sigma^2)(t - t_s/2)]``
    """
    if np.any(np.asarray(s.omega_p) != np.asarray(s.omega_s)):
        raise InvalidInputError("closed-form CD drive needs omega_p == omega_s; use cd_generic")
    t = np.asarray(t, dtype=float)
    k = -s.t_s / s.sigma ** 2
    with np.errstate(over="ignore"):
        return k / np.cosh(k * (t - 0.5 * s.t_s))


def cd_generic(s: PulseSchedule, t):
    """CD Rabi frequency ``2 * theta_dot`` for arbitrary pump/Stokes amplitudes."""
    return 2.0 * mixing_angle(t, s)[1]


def lambda_matrix(omega_p, omega_s, omega_a=0.0, delta_1=0.0, delta_2=0.0):
    """Assemble ``H`` (shape ``(..., 3, 3)``) from instantaneous Rabi frequencies and detunings."""
    omega_p, omega_s, omega_a, delta_1, delta_2 = np.broadcast_arrays(
        *(np.asarray(x, dtype=float) for x in (omega_p, omega_s, omega_a, delta_1, delta_2)))
    h = np.zeros(omega_p.shape + (3, 3), dtype=complex)
    h[..., 2, 0] = h[..., 0, 2] = 0.5 * omega_p
    h[..., 2, 1] = h[..., 1, 2] = 0.5 * omega_s
    h[..., 1, 0] = -0.5j * omega_a
    h[..., 0, 1] = 0.5j * omega_a
    h[..., 2, 2] = delta_1
    h[..., 1, 1] = delta_2
    return h


def lambda_hamiltonian(t, s: PulseSchedule, d: DriveConfig):
    pump, stokes = envelopes(t, s)
    if d.cd_enabled:
        omega_a = d.cd_scale * cd_generic(s, t)
    else:
        omega_a = 0.0
    return lambda_matrix(pump, stokes, omega_a, d.delta_1, d.delta_2)


def dark_state(t, s: PulseSchedule):
    """Zero-energy eigenstate ``cos(theta)|1> - sin(theta)|2>`` of the resonant Hamiltonian."""
    theta, _ = mixing_angle(t, s)
    theta = np.asarray(theta)
    psi = np.zeros(theta.shape + (3,), dtype=complex)
    psi[..., 0] = np.cos(theta)
    psi[..., 1] = -np.sin(theta)
    return psi


def adiabaticity_ratio(t, s: PulseSchedule):
    """``|theta_dot| / Omega_0`` with ``Omega_0 = sqrt(Omega_p^2 + Omega_s^2)``; ``inf`` below the floor."""
    pump, stokes = envelopes(t, s)
    omega0 = np.hypot(pump, stokes)
    _, theta_dot = mixing_angle(t, s)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.abs(theta_dot) / omega0
    return np.where(omega0 < ENVELOPE_FLOOR, np.inf, ratio)
