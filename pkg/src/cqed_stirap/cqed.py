"""Driven transmon-cavity Hamiltonian, polariton basis and Lambda-system transition table.

Tensor ordering is ``qubit (x) cavity``. The qubit basis is ``(|g>, |e>)``, so
the product-state index of ``|s, n>`` is ``s * (n_max + 1) + n`` with
``s = 0`` for ``g`` and ``s = 1`` for ``e``. All frequencies are angular, in
rad/ns, and ``hbar = 1``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import units
from .errors import InvalidInputError, NestingError, TruncationError
from .linalg import dagger, hermitian_eig, kron

MIN_N_MAX = 4
DISPERSIVE_WARN_RATIO = 0.2
NESTED_LEVELS = 4
REFERENCE_FREQUENCIES = {
    "omega_q_ghz": 5.0, "omega_r_ghz": 10.0, "omega_d_ghz": 4.9, "g_ghz": 0.5,
    "omega_drive_mhz": 30.0, "kappa_mhz": 3.0, "gamma_q_mhz": 0.2,
}


@dataclass(frozen=True)
class SystemParams:
    """Circuit-QED parameters in rad/ns (angular frequencies).

    Use :meth:`from_frequencies` to build one from GHz/MHz values and
    :meth:`reference` for the reference operating point.
    """

    omega_q: float
    omega_r: float
    omega_d: float
    g: float
    omega_drive: float
    kappa: float
    gamma_q: float
    n_max: int = 10

    def __post_init__(self):
        for name in ("omega_q", "omega_r", "omega_d"):
            if not getattr(self, name) > 0:
                raise InvalidInputError(f"{name} must be > 0, got {getattr(self, name)}")
        for name in ("g", "omega_drive", "kappa", "gamma_q"):
            if not getattr(self, name) >= 0:
                raise InvalidInputError(f"{name} must be >= 0, got {getattr(self, name)}")
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise InvalidInputError(f"n_max must be a non-negative integer, got {self.n_max}")

    @classmethod
    def from_frequencies(cls, omega_q_ghz, omega_r_ghz, omega_d_ghz, g_ghz,
                         omega_drive_mhz, kappa_mhz, gamma_q_mhz, n_max=10):
        return cls(
            omega_q=units.from_ghz(omega_q_ghz),
            omega_r=units.from_ghz(omega_r_ghz),
            omega_d=units.from_ghz(omega_d_ghz),
            g=units.from_ghz(g_ghz),
            omega_drive=units.from_mhz(omega_drive_mhz),
            kappa=units.from_mhz(kappa_mhz),
            gamma_q=units.from_mhz(gamma_q_mhz),
            n_max=int(n_max),
        )

    @classmethod
    def reference(cls, n_max=10):
        """Reference operating point: 5/10/4.9/0.5 GHz, 30/3/0.2 MHz."""
        return cls.from_frequencies(**REFERENCE_FREQUENCIES, n_max=n_max)

    @property
    def omega_q_rot(self):
        return self.omega_q - self.omega_d

    @property
    def omega_r_rot(self):
        return self.omega_r - self.omega_d

    @property
    def detuning(self):
        """Cavity-qubit detuning, rotating-frame cavity minus qubit frequency."""
        return self.omega_r_rot - self.omega_q_rot

    @property
    def chi(self):
        """Dispersive shift ``g**2 / detuning``; ``inf`` at zero detuning."""
        if self.detuning == 0:
            return np.inf
        return self.g ** 2 / self.detuning

    @property
    def dispersive_ratio(self):
        if self.detuning == 0:
            return np.inf
        return abs(self.g / self.detuning)

    @property
    def nesting_bounds(self):
        return self.omega_q - 3.0 * self.chi, self.omega_q - self.chi

    @property
    def nesting_ok(self):
        lo, hi = self.nesting_bounds
        return bool(lo < self.omega_d < hi)

    def replace(self, **changes):
        fields = {k: getattr(self, k) for k in self.__dataclass_fields__}
        fields.update(changes)
        return type(self)(**fields)


def operators(n_max):
    """Return ``(a, sigma_minus, sigma_z)`` on the ``2 (n_max + 1)`` product space."""
    dim = n_max + 1
    a_cav = np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)
    sm = np.array([[0, 1], [0, 0]], dtype=complex)  # |g><e|
    sz = np.diag([-1.0, 1.0]).astype(complex)
    eye_q = np.eye(2)
    eye_c = np.eye(dim)
    return kron(eye_q, a_cav), kron(sm, eye_c), kron(sz, eye_c)


def basis_index(qubit, n, n_max):
    """Product-state index of ``|qubit, n>`` with ``qubit`` in ``{'g', 'e'}``."""
    return {"g": 0, "e": 1}[qubit] * (n_max + 1) + n


def build_hrwa(p: SystemParams) -> np.ndarray:
    """Rotating-frame Hamiltonian of the driven Jaynes-Cummings model.

    ``H = (wq~/2) sz + wr~ (a^dag a + 1/2) + g (a^dag s- + a s+) + Omega_d (s- + s+)``
    """
    if p.n_max < MIN_N_MAX:
        raise TruncationError(f"n_max must be >= {MIN_N_MAX}, got {p.n_max}")
    a, sm, sz = operators(p.n_max)
    ad, sp = dagger(a), dagger(sm)
    eye = np.eye(a.shape[0])
    h = (0.5 * p.omega_q_rot * sz
         + p.omega_r_rot * (ad @ a + 0.5 * eye)
         + p.g * (ad @ sm + a @ sp)
         + p.omega_drive * (sm + sp))
    return 0.5 * (h + dagger(h))


@dataclass(frozen=True)
class DressedPair:
    theta: float
    plus: np.ndarray
    minus: np.ndarray
    energy_plus: float
    energy_minus: float


def dressed_state_analytic(p: SystemParams, n: int) -> DressedPair:
    """Closed-form undriven JC doublet ``|+-, n>`` built from ``|e, n>`` and ``|g, n+1>``.

    The drive strength in ``p`` is ignored. ``theta`` satisfies
    ``tan(theta) = -2 g sqrt(n+1) / detuning`` on the branch ``[0, pi]``,
    which keeps ``|+, n>`` paired with the upper energy for either sign of
    the detuning.
    """
    if n < 0:
        raise InvalidInputError(f"photon index must be >= 0, got {n}")
    if n + 1 > p.n_max:
        raise TruncationError(f"n + 1 = {n + 1} exceeds n_max = {p.n_max}")
    coupling = 2.0 * p.g * np.sqrt(n + 1)
    theta = float(np.arctan2(coupling, -p.detuning))
    dim = 2 * (p.n_max + 1)
    e_n = np.zeros(dim, dtype=complex)
    g_n1 = np.zeros(dim, dtype=complex)
    e_n[basis_index("e", n, p.n_max)] = 1.0
    g_n1[basis_index("g", n + 1, p.n_max)] = 1.0
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    root = 0.5 * np.sqrt(p.detuning ** 2 + coupling ** 2)
    centre = p.omega_r_rot * (n + 1)
    return DressedPair(
        theta=theta,
        plus=c * e_n + s * g_n1,
        minus=-s * e_n + c * g_n1,
        energy_plus=centre + root,
        energy_minus=centre - root,
    )


@dataclass(frozen=True)
class PolaritonBasis:
    params: SystemParams
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    nested_labels: tuple
    chi: float
    nesting_ok: bool

    @property
    def hilbert_dim(self):
        return self.eigenvalues.shape[0]

    def state(self, label):
        """Polariton ``|label>`` for label in 1..4."""
        return self.eigenvectors[:, self.nested_labels[label - 1]]


def polariton_basis(p: SystemParams) -> PolaritonBasis:
    h = build_hrwa(p)
    evals, evecs = hermitian_eig(h)
    evals.setflags(write=False)
    evecs.setflags(write=False)
    if p.dispersive_ratio > DISPERSIVE_WARN_RATIO:
        warnings.warn(f"g/detuning = {p.dispersive_ratio:.3f} is outside the dispersive regime",
                      stacklevel=2)
    ok = p.nesting_ok
    if not ok:
        lo, hi = (units.to_ghz(x) for x in p.nesting_bounds)
        warnings.warn(f"drive frequency {units.to_ghz(p.omega_d):.4f} GHz is outside the nesting "
                      f"window ({lo:.4f}, {hi:.4f}) GHz", stacklevel=2)
    return PolaritonBasis(
        params=p,
        eigenvalues=evals,
        eigenvectors=evecs,
        nested_labels=tuple(range(NESTED_LEVELS)),
        chi=p.chi,
        nesting_ok=ok,
    )


@dataclass(frozen=True)
class TransitionTable:
    """Matrix elements and rates between the four nested polaritons.

    Arrays are 4x4 and indexed ``[i - 1, j - 1]`` for the transition ``i <-> j``.
    ``omega_trans[i, j] = E_i - E_j`` is the polariton energy gap, in rad/ns.
    """

    C: np.ndarray
    Q: np.ndarray
    gamma: np.ndarray
    omega_trans: np.ndarray

    def c(self, i, j):
        return self.C[i - 1, j - 1]

    def q(self, i, j):
        return self.Q[i - 1, j - 1]

    def rate(self, i, j):
        return self.gamma[i - 1, j - 1]

    def frequency(self, i, j):
        return self.omega_trans[i - 1, j - 1]

    @property
    def lambda_rates(self):
        """``(gamma_31, gamma_32, gamma_21)`` in rad/ns."""
        return self.rate(3, 1), self.rate(3, 2), self.rate(2, 1)


def transition_table(p: SystemParams, b: PolaritonBasis) -> TransitionTable:
    if not b.nesting_ok:
        raise NestingError("polariton basis is not in the nesting regime; "
                           "refusing to extract the Lambda system")
    a, sm, _ = operators(b.params.n_max)
    vecs = b.eigenvectors[:, list(b.nested_labels)]
    c = np.abs(dagger(vecs) @ dagger(a) @ vecs)
    q = np.abs(dagger(vecs) @ dagger(sm) @ vecs)
    energies = b.eigenvalues[list(b.nested_labels)]
    omega = energies[:, None] - energies[None, :]
    gamma = p.kappa * c ** 2 + p.gamma_q * q ** 2
    for arr in (c, q, gamma, omega):
        arr.setflags(write=False)
    return TransitionTable(C=c, Q=q, gamma=gamma, omega_trans=omega)


def lambda_system(p: SystemParams) -> TransitionTable:
    """Polariton basis plus transition table in one call."""
    return transition_table(p, polariton_basis(p))


def truncation_deviation(p: SystemParams) -> dict:
    """Max absolute change of C, Q, gamma and omega when ``n_max`` is doubled."""
    base = lambda_system(p)
    wide = lambda_system(p.replace(n_max=2 * p.n_max))
    return {
        "C": float(np.max(np.abs(base.C - wide.C))),
        "Q": float(np.max(np.abs(base.Q - wide.Q))),
        "gamma": float(np.max(np.abs(base.gamma - wide.gamma))),
        "omega": float(np.max(np.abs(base.omega_trans - wide.omega_trans))),
    }
