"""Fixed-step RK4 Lindblad integrator and Uhlmann fidelity for small density matrices.

Density matrices may carry leading batch dimensions, ``(..., d, d)``. A
batch is a set of independent trajectories sharing one time grid. Each one
evolves bit-identically to how it would evolve on its own.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import IntegratorDivergedError, InvalidInputError
from .linalg import dagger, matrix_sqrt_psd

MAX_TRACE_DRIFT = 1e-6
MIN_EIGENVALUE = -1e-6
# max number of (time, batch) matrices evaluated per Hamiltonian call
_CHUNK_BUDGET = 200_000


def projector(i, j, dim=3):
    """``|i><j|`` for 1-based level labels."""
    m = np.zeros((dim, dim), dtype=complex)
    m[i - 1, j - 1] = 1.0
    return m


def radiative_jumps(gamma_31, gamma_32, gamma_21):
    """Jump operators ``sqrt(g31)|1><3|``, ``sqrt(g32)|2><3|`` and ``sqrt(g21)|1><2|`` as (rate, op) pairs."""
    rates = (gamma_31, gamma_32, gamma_21)
    if any(r < 0 for r in rates):
        raise InvalidInputError(f"decay rates must be >= 0, got {rates}")
    return [
        (gamma_31, np.sqrt(gamma_31) * projector(1, 3)),
        (gamma_32, np.sqrt(gamma_32) * projector(2, 3)),
        (gamma_21, np.sqrt(gamma_21) * projector(1, 2)),
    ]


@dataclass(frozen=True)
class LindbladModel:
    """Time-dependent generator for the master equation.

    ``hamiltonian`` maps an array of times of shape ``(T,)`` to matrices of
    shape ``(T, ..., d, d)``. ``jumps`` holds ``(rate, operator)`` pairs whose
    operators already include the ``sqrt(rate)`` factor.
    """

    hamiltonian: Callable[[np.ndarray], np.ndarray]
    jumps: Sequence = field(default_factory=list)

    @property
    def jump_operators(self):
        return [op for _, op in self.jumps]


@dataclass(frozen=True)
class IntegratorConfig:
    t0: float = -100.0
    tf: float = 100.0
    dt: float = 0.01
    store_states: bool = False

    def __post_init__(self):
        if not self.t0 < self.tf:
            raise InvalidInputError(f"need t0 < tf, got [{self.t0}, {self.tf}]")
        if not self.dt > 0:
            raise InvalidInputError(f"dt must be > 0, got {self.dt}")
        if self.dt > (self.tf - self.t0) / 100 * (1 + 1e-12):
            raise InvalidInputError("dt must be at most (tf - t0)/100")

    @property
    def n_steps(self):
        n = int(round((self.tf - self.t0) / self.dt))
        if abs(n * self.dt - (self.tf - self.t0)) > 1e-9 * (self.tf - self.t0):
            raise InvalidInputError(f"dt = {self.dt} does not divide the window [{self.t0}, {self.tf}]")
        return n

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(self.n_steps + 1)


@dataclass(frozen=True)
class EvolutionResult:
    """Recorded trajectory. ``populations`` has shape ``(T, ..., d)``."""

    times: np.ndarray
    populations: np.ndarray
    final_state: np.ndarray
    max_trace_drift: np.ndarray
    min_eigenvalue: np.ndarray
    states: np.ndarray | None = None

    @property
    def final_populations(self):
        return self.populations[-1]

    @property
    def max_populations(self):
        return self.populations.max(axis=0)

    def fidelity_trace(self, level=2, convention="unsquared"):
        """Fidelity against the pure target ``|level><level|`` at every recorded time."""
        p = np.clip(self.populations[..., level - 1], 0.0, None)
        return p if convention == "squared" else np.sqrt(p)


def dissipator(op, rho):
    """``(2 O rho O^dag - rho O^dag O - O^dag O rho) / 2``."""
    od = dagger(op)
    odo = od @ op
    return 0.5 * (2.0 * op @ rho @ od - rho @ odo - odo @ rho)


def rhs(m: LindbladModel, t, rho):
    """``d rho / dt = -i [H(t), rho] + sum_j D[O_j] rho``."""
    h = m.hamiltonian(np.atleast_1d(np.asarray(t, dtype=float)))[0]
    out = -1j * (h @ rho - rho @ h)
    for op in m.jump_operators:
        out = out + dissipator(op, rho)
    return out


def _fused_rhs(jump_super, anticomm):
    # same generator as rhs(), with the anticommutator folded into a non-Hermitian H
    # and sum_j O rho O^dag applied as a d^2 x d^2 matrix on the row-major vec(rho)
    if jump_super is None:
        def f(h, rho):
            return -1j * (h @ rho - rho @ h)
        return f

    d2 = jump_super.shape[0]

    def f(h, rho):
        hr = (h - 0.5j * anticomm) @ rho
        # stacked (1, d^2) rows keep every trajectory independent of the batch size
        sandwich = (rho.reshape(rho.shape[:-2] + (1, d2)) @ jump_super).reshape(rho.shape)
        return -1j * (hr - dagger(hr)) + sandwich

    return f


def _prepare_jumps(m):
    ops = [np.asarray(op, dtype=complex) for op in m.jump_operators]
    ops = [op for op in ops if np.any(op != 0)]
    if not ops:
        return None, None
    # vec(O rho O^dag) = (O kron conj(O)) vec(rho) for row-major vec; stored transposed
    jump_super = sum(np.kron(op, op.conj()) for op in ops).T.copy()
    anticomm = sum(dagger(op) @ op for op in ops)
    return jump_super, anticomm


def _min_eigenvalue(rho):
    # eigvalsh rejects non-finite input; a blown-up state counts as -inf
    finite = np.all(np.isfinite(rho), axis=(-2, -1))
    safe = np.where(finite[..., None, None], rho, 0.0)
    return np.where(finite, np.linalg.eigvalsh(safe).min(axis=-1), -np.inf)


def _trace_drift(rho, trace0):
    drift = np.abs(np.real(np.trace(rho, axis1=-2, axis2=-1)) - trace0)
    return np.where(np.isfinite(drift), drift, np.inf)


def integrate(m: LindbladModel, cfg: IntegratorConfig, rho0, raise_on_divergence=True,
              eig_stride=1) -> EvolutionResult:
    """Integrate the master equation with fixed-step RK4 from ``cfg.t0`` to ``cfg.tf``.

    After every step the state is re-Hermitized; the trace is left alone and
    its drift is reported instead. Raises :class:`IntegratorDivergedError`
    when the trace drifts by more than 1e-6 or an eigenvalue drops below
    -1e-6 (unless ``raise_on_divergence`` is false).

    The minimum eigenvalue is checked every ``eig_stride`` steps (always
    including the final step); the trace is checked at every step.
    """
    rho = np.array(rho0, dtype=complex)
    if rho.shape[-1] != rho.shape[-2]:
        raise InvalidInputError(f"density matrix must be square, got {rho.shape}")
    n = cfg.n_steps
    dt = cfg.dt
    batch = rho.shape[:-2]
    dim = rho.shape[-1]
    jump_super, anticomm = _prepare_jumps(m)
    f = _fused_rhs(jump_super, anticomm)

    trace0 = np.real(np.trace(rho, axis1=-2, axis2=-1))
    pops = np.empty((n + 1,) + batch + (dim,))
    pops[0] = np.real(np.diagonal(rho, axis1=-2, axis2=-1))
    states = np.empty((n + 1,) + rho.shape, dtype=complex) if cfg.store_states else None
    if states is not None:
        states[0] = rho
    drift = _trace_drift(rho, trace0)
    min_eig = _min_eigenvalue(rho)

    chunk = max(1, min(n, _CHUNK_BUDGET // max(1, int(np.prod(batch, dtype=int)))))
    half = 0.5 * dt
    for start in range(0, n, chunk):
        count = min(chunk, n - start)
        stage_t = cfg.t0 + dt * (start + 0.5 * np.arange(2 * count + 1))
        hs = m.hamiltonian(stage_t)
        buf = np.empty((count,) + rho.shape, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore"):
            for k in range(count):
                h0, h1, h2 = hs[2 * k], hs[2 * k + 1], hs[2 * k + 2]
                k1 = f(h0, rho)
                k2 = f(h1, rho + half * k1)
                k3 = f(h1, rho + half * k2)
                k4 = f(h2, rho + dt * k3)
                rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                rho = 0.5 * (rho + dagger(rho))
                buf[k] = rho
        sl = slice(start + 1, start + 1 + count)
        pops[sl] = np.real(np.diagonal(buf, axis1=-2, axis2=-1))
        if states is not None:
            states[sl] = buf
        drift = np.maximum(drift, _trace_drift(buf, trace0).max(axis=0))
        picked = buf[(start + 1 + np.arange(count)) % eig_stride == 0] if eig_stride > 1 else buf
        if start + count == n and eig_stride > 1:
            picked = np.concatenate([picked, buf[-1:]])
        if len(picked):
            min_eig = np.minimum(min_eig, _min_eigenvalue(picked).min(axis=0))

    result = EvolutionResult(
        times=cfg.times,
        populations=pops,
        final_state=rho,
        max_trace_drift=drift,
        min_eigenvalue=min_eig,
        states=states,
    )
    if raise_on_divergence and (np.any(drift > MAX_TRACE_DRIFT) or np.any(min_eig < MIN_EIGENVALUE)):
        raise IntegratorDivergedError(
            f"integration diverged (trace drift {np.max(drift):.2e}, min eigenvalue "
            f"{np.min(min_eig):.2e}); try a smaller dt",
            max_trace_drift=drift, min_eigenvalue=min_eig)
    return result


def propagate_state(hamiltonian, cfg: IntegratorConfig, psi0):
    """RK4 solution of ``i d psi/dt = H(t) psi`` on the grid of ``cfg``; returns ``(times, psi(t))``."""
    psi = np.array(psi0, dtype=complex)
    n = cfg.n_steps
    dt = cfg.dt
    out = np.empty((n + 1,) + psi.shape, dtype=complex)
    out[0] = psi
    hs = hamiltonian(cfg.t0 + 0.5 * dt * np.arange(2 * n + 1))

    def f(h, v):
        return -1j * (h @ v[..., None])[..., 0]

    for k in range(n):
        h0, h1, h2 = hs[2 * k], hs[2 * k + 1], hs[2 * k + 2]
        k1 = f(h0, psi)
        k2 = f(h1, psi + 0.5 * dt * k1)
        k3 = f(h1, psi + 0.5 * dt * k2)
        k4 = f(h2, psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = psi
    return cfg.times, out


def pure_state(level, dim=3):
    return projector(level, level, dim)


def fidelity(rho_f, rho_t, convention="unsquared"):
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho_t) rho_f sqrt(rho_t)))**2``.

    ``convention="unsquared"`` returns the square root of that quantity.
    """
    if convention not in ("squared", "unsquared"):
        raise InvalidInputError(f"unknown fidelity convention {convention!r}")
    root_t = matrix_sqrt_psd(rho_t)
    inner = root_t @ rho_f @ root_t
    inner = 0.5 * (inner + dagger(inner))
    f = float(np.real(np.trace(matrix_sqrt_psd(inner))))
    f = min(max(f, 0.0), 1.0)
    return f * f if convention == "squared" else f
