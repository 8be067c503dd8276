"""Lindblad generators, time evolution and the trace-power diagnostics.

The dissipator follows the ordering

    d rho/dt = -i[H, rho] - 1/2 sum_l h_l (Q Q^+ rho + rho Q Q^+ - 2 Q^+ rho Q)

i.e. ``Q^+`` plays the role of the usual jump operator. Channels are never
silently conjugated: a channel built from ``sigma_-`` pumps population up.
The coefficient form uses

    -1/2 sum_{n,m} h_nm (L_m L_n^+ rho + rho L_m L_n^+ - 2 L_n^+ rho L_m).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.linalg import expm

from . import linalg
from .density import DensityMatrix, InvalidStateError, spectrum

HERMITIAN_TOL = 1e-10
TRACELESS_TOL = 1e-9
ORTHO_TOL = 1e-9
DEFAULT_H_MAX = 1e-3
# Probabilities below this are treated as exactly zero in fractional powers.
ZERO_PROB = 1e-14


def _frozen(m) -> np.ndarray:
    a = linalg.as_matrix(m).copy()
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GKSModel:
    """Hamiltonian plus dissipator over an operator basis with a hermitian
    coefficient matrix ``coeff[n, m] = h_nm``."""

    hamiltonian: np.ndarray
    lindblad_ops: tuple
    coeff: np.ndarray
    dims: tuple = ()

    def __post_init__(self):
        h = _frozen(self.hamiltonian)
        ops = tuple(_frozen(L) for L in self.lindblad_ops)
        c = _frozen(np.atleast_2d(np.asarray(self.coeff, dtype=complex)) if len(ops) else np.zeros((0, 0)))
        if linalg.hermiticity_deviation(h) > HERMITIAN_TOL:
            raise ValueError("hamiltonian is not hermitian")
        if c.shape != (len(ops), len(ops)):
            raise ValueError(f"coeff shape {c.shape} does not match {len(ops)} operators")
        if linalg.hermiticity_deviation(c) > HERMITIAN_TOL:
            raise ValueError("coefficient matrix is not hermitian")
        for k, L in enumerate(ops):
            if L.shape != h.shape:
                raise ValueError(f"operator {k} has shape {L.shape}, expected {h.shape}")
            if abs(np.trace(L)) > TRACELESS_TOL:
                raise ValueError(f"operator {k} is not traceless")
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "lindblad_ops", ops)
        object.__setattr__(self, "coeff", c)
        object.__setattr__(self, "dims", tuple(self.dims) or (h.shape[0],))

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]


@dataclass(frozen=True, eq=False)
class DiagonalModel:
    """Hamiltonian plus independent channels ``(rate h_l, operator Q_l)``."""

    hamiltonian: np.ndarray
    channels: tuple = field(default=())
    dims: tuple = ()

    def __post_init__(self):
        h = _frozen(self.hamiltonian)
        if linalg.hermiticity_deviation(h) > HERMITIAN_TOL:
            raise ValueError("hamiltonian is not hermitian")
        chans = []
        for rate, op in self.channels:
            rate = float(np.real_if_close(rate))
            q = _frozen(op)
            if q.shape != h.shape:
                raise ValueError(f"channel operator has shape {q.shape}, expected {h.shape}")
            chans.append((rate, q))
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "channels", tuple(chans))
        object.__setattr__(self, "dims", tuple(self.dims) or (h.shape[0],))

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @property
    def rates(self) -> np.ndarray:
        return np.array([r for r, _ in self.channels], dtype=float)

    @property
    def completely_positive(self) -> bool:
        return bool(np.all(self.rates >= 0.0))

    @property
    def hermitian_channels(self) -> bool:
        return all(linalg.is_hermitian(q) for _, q in self.channels)


Model = Union[GKSModel, DiagonalModel]


def diagonalize_gks(g: GKSModel) -> DiagonalModel:
    """Rewrite a coefficient-form model as independent channels.

    With ``coeff = V diag(w) V^+`` the rates are ``w`` and
    ``Q_l = sum_m conj(V[m, l]) L_m``.
    """
    if not g.lindblad_ops:
        return DiagonalModel(g.hamiltonian, (), g.dims)
    eig = linalg.hermitian_eig(g.coeff)
    ops = np.array(g.lindblad_ops)
    channels = []
    for lam, rate in enumerate(eig.eigenvalues):
        q = np.tensordot(np.conj(eig.eigenvectors[:, lam]), ops, axes=1)
        channels.append((float(rate), q))
    return DiagonalModel(g.hamiltonian, tuple(channels), g.dims)


def _rho_array(model: Model, rho) -> np.ndarray:
    data = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if data.shape != (model.dim, model.dim):
        raise ValueError(f"state shape {data.shape} does not match model dimension {model.dim}")
    return data


def generator(model: Model, rho) -> np.ndarray:
    """Time derivative ``d rho/dt`` of the master equation."""
    r = _rho_array(model, rho)
    H = model.hamiltonian
    out = -1j * (H @ r - r @ H)
    if isinstance(model, GKSModel):
        ops = model.lindblad_ops
        for n, Ln in enumerate(ops):
            Lnd = linalg.dagger(Ln)
            for m, Lm in enumerate(ops):
                h = model.coeff[n, m]
                if h == 0:
                    continue
                A = Lm @ Lnd
                out -= 0.5 * h * (A @ r + r @ A - 2.0 * Lnd @ r @ Lm)
    else:
        for rate, Q in model.channels:
            if rate == 0.0:
                continue
            Qd = linalg.dagger(Q)
            A = Q @ Qd
            out -= 0.5 * rate * (A @ r + r @ A - 2.0 * Qd @ r @ Q)
    return out


def liouvillian(model: Model) -> np.ndarray:
    """Superoperator acting on row-major ``vec(rho)``.

    Uses ``vec(A X B) = (A kron B^T) vec(X)``.
    """
    if isinstance(model, GKSModel):
        model = diagonalize_gks(model)
    d = model.dim
    eye = np.eye(d)
    H = model.hamiltonian
    sup = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    for rate, Q in model.channels:
        Qd = linalg.dagger(Q)
        A = Q @ Qd
        sup -= 0.5 * rate * (np.kron(A, eye) + np.kron(eye, A.T) - 2.0 * np.kron(Qd, Q.T))
    return sup


def step_euler(model: Model, rho, dt: float) -> np.ndarray:
    """First-order short-time solution; returned unvalidated on purpose."""
    r = _rho_array(model, rho)
    if dt < 0:
        raise ValueError("dt must be non-negative")
    return r + dt * generator(model, r)


def _rk4_step(model: Model, r: np.ndarray, h: float) -> np.ndarray:
    k1 = generator(model, r)
    k2 = generator(model, r + 0.5 * h * k1)
    k3 = generator(model, r + 0.5 * h * k2)
    k4 = generator(model, r + h * k3)
    return r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class TrajectoryError(InvalidStateError):
    """A snapshot along a trajectory failed validation."""

    def __init__(self, report, time: float):
        self.time = float(time)
        super().__init__(report, where=f"t={time:.12g}")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: tuple

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(zip(self.times, self.states))


def _check_grid(times) -> np.ndarray:
    t = np.asarray(times, dtype=float).reshape(-1)
    if t.size == 0:
        raise ValueError("time grid is empty")
    if t[0] != 0.0:
        raise ValueError("time grid must start at 0")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return t


def _snapshot(data: np.ndarray, dims, t: float) -> DensityMatrix:
    try:
        return DensityMatrix(data, dims)
    except InvalidStateError as exc:
        raise TrajectoryError(exc.report, t) from None


def evolve(model: Model, rho0: DensityMatrix, times, method: str = "rk4",
           h_max: float = DEFAULT_H_MAX) -> Trajectory:
    """Integrate the master equation on a time grid.

    ``method="exact"`` applies ``expm(L dt)`` of the vectorized generator
    between grid points; ``method="rk4"`` uses classical fixed-step RK4 with
    substeps no longer than ``h_max``.
    """
    t = _check_grid(times)
    r = _rho_array(model, rho0)
    dims = rho0.dims
    states = [rho0]
    if method == "exact":
        sup = liouvillian(model)
        cache: dict[float, np.ndarray] = {}
        vec = r.reshape(-1)
        for k in range(1, t.size):
            dt = float(t[k] - t[k - 1])
            key = round(dt, 15)
            if key not in cache:
                cache[key] = expm(sup * dt)
            vec = cache[key] @ vec
            states.append(_snapshot(vec.reshape(r.shape), dims, t[k]))
    elif method == "rk4":
        if h_max <= 0:
            raise ValueError("h_max must be positive")
        cur = r.copy()
        for k in range(1, t.size):
            dt = float(t[k] - t[k - 1])
            n = max(1, int(np.ceil(dt / h_max - 1e-9)))
            h = dt / n
            for _ in range(n):
                cur = _rk4_step(model, cur, h)
            states.append(_snapshot(cur, dims, t[k]))
            cur = np.array(states[-1].data)
    else:
        raise ValueError(f"unknown method {method!r}")
    return Trajectory(t, tuple(states))


def _as_diagonal(model: Model) -> DiagonalModel:
    return diagonalize_gks(model) if isinstance(model, GKSModel) else model


def channel_weights(model: DiagonalModel, basis: np.ndarray) -> np.ndarray:
    """``W[m, n] = sum_l h_l |<m|Q_l|n>|^2`` in the eigenbasis of rho."""
    d = basis.shape[0]
    w = np.zeros((d, d))
    bd = linalg.dagger(basis)
    for rate, Q in model.channels:
        w += rate * np.abs(bd @ Q @ basis) ** 2
    return w


def _safe_power(p: np.ndarray, s: float) -> np.ndarray:
    out = np.zeros_like(p)
    nz = p > ZERO_PROB
    out[nz] = p[nz] ** s
    return out


def trace_power_rate(model: Model, rho: DensityMatrix, q: float) -> float:
    """``d/dt Tr rho^q`` from the eigen-expansion of rho.

    Computes ``-q sum_{m,n,l} h_l |<m|Q_l|n>|^2 P_m (P_m^(q-1) - P_n^(q-1))``.
    Zero probabilities contribute nothing: ``P_m = 0`` kills its term and
    ``P_n^(q-1)`` at ``P_n = 0`` is taken as zero.
    """
    if q <= 0:
        raise ValueError("q must be positive")
    model = _as_diagonal(model)
    spec = spectrum(rho)
    p = spec.probabilities
    w = channel_weights(model, spec.basis)
    pq1 = _safe_power(p, q - 1.0)
    pm = p[:, None]
    terms = w * pm * (pq1[:, None] - pq1[None, :])
    return float(-q * terms.sum())


def trace_power_rate_symmetric(model: Model, rho: DensityMatrix, q: float) -> float:
    """Symmetrized form, valid only when every channel operator is hermitian:
    ``-(q/2) sum h_l |<m|Q_l|n>|^2 (P_m - P_n)(P_m^(q-1) - P_n^(q-1))``."""
    if q <= 0:
        raise ValueError("q must be positive")
    model = _as_diagonal(model)
    if not model.hermitian_channels:
        raise ValueError("symmetrized rate requires hermitian channel operators")
    spec = spectrum(rho)
    p = spec.probabilities
    w = channel_weights(model, spec.basis)
    pq1 = _safe_power(p, q - 1.0)
    terms = w * (p[:, None] - p[None, :]) * (pq1[:, None] - pq1[None, :])
    return float(-0.5 * q * terms.sum())


def purity_rate(model: Model, rho: DensityMatrix) -> float:
    return trace_power_rate(model, rho, 2.0)


def _normalize(v) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(-1)


def positivity_probe(model: Model, psi0, psi1, dt: float) -> float:
    """Short-time population ``dt sum_l h_l |<psi0|Q_l|psi1>|^2`` of a state
    orthogonal to the initial pure eigenstate ``psi0`` of H.

    A negative value means the first-order solution already has a negative
    diagonal element, so the model cannot be completely positive.
    """
    model = _as_diagonal(model)
    a = _normalize(psi0)
    b = _normalize(psi1)
    if a.size != model.dim or b.size != model.dim:
        raise ValueError("state vectors do not match model dimension")
    if abs(np.vdot(a, b)) > ORTHO_TOL:
        raise ValueError("psi0 and psi1 are not orthogonal")
    Ha = model.hamiltonian @ a
    energy = np.vdot(a, Ha) / np.vdot(a, a)
    if np.linalg.norm(Ha - energy * a) > 1e-9:
        raise ValueError("psi0 is not an eigenvector of the hamiltonian")
    total = 0.0
    for rate, Q in model.channels:
        total += rate * abs(np.vdot(a, Q @ b)) ** 2
    return float(dt * total)


__all__ = [
    "GKSModel", "DiagonalModel", "Trajectory", "TrajectoryError",
    "diagonalize_gks", "generator", "liouvillian", "step_euler", "evolve",
    "trace_power_rate", "trace_power_rate_symmetric", "purity_rate",
    "positivity_probe",
]
