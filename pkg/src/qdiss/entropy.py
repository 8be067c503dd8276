"""Tsallis / von Neumann entropies, conditional q-entropy and entropy rates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.special import logsumexp

from . import lindblad
from .density import DensityMatrix, marginal, parse_parties, spectrum
from .linalg import eigvalsh_desc

ZERO_PROB = 1e-14
DEFAULT_Q_GRID = (0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0)
# Eigenvalues closer than this count as tied when comparing spectra.
TIE_TOL = 1e-10


def _check_q(q: float) -> float:
    q = float(q)
    if not q > 0 or not math.isfinite(q):
        raise ValueError(f"Tsallis index must be a positive finite number, got {q}")
    return q


def _probs(rho: DensityMatrix) -> np.ndarray:
    p = spectrum(rho).probabilities
    return p[p > ZERO_PROB]


def _log_power_sum(p: np.ndarray, q: float) -> float:
    """``log sum_m P_m^q`` without underflow at large q."""
    return float(logsumexp(q * np.log(p)))


def von_neumann(rho: DensityMatrix) -> float:
    p = _probs(rho)
    return float(-np.sum(p * np.log(p)))


def tsallis_entropy(rho: DensityMatrix, q: float) -> float:
    """``(1 - sum P_m^q)/(q - 1)``, with the von Neumann entropy at q = 1."""
    q = _check_q(q)
    if q == 1.0:
        return von_neumann(rho)
    p = _probs(rho)
    return float(-math.expm1(_log_power_sum(p, q)) / (q - 1.0))


@dataclass(frozen=True)
class ConditionalEntropyResult:
    value: float
    q: float
    conditioned_on: tuple
    numerator: float
    denominator: float


def _check_condition(rho: DensityMatrix, condition_on) -> tuple:
    parties = parse_parties(condition_on)
    if not parties or parties[0] < 0 or parties[-1] >= rho.n_parties:
        raise ValueError(f"invalid conditioning set {condition_on!r}")
    if len(parties) == rho.n_parties:
        raise ValueError("conditioning set must be a proper subset of the parties")
    return tuple(parties)


def conditional_q_entropy(rho: DensityMatrix, condition_on, q: float) -> ConditionalEntropyResult:
    """``(S_q(AB) - S_q(A)) / (1 + (1 - q) S_q(A))`` with A the conditioning
    marginal.

    For q != 1 the denominator equals ``sum_a p_a^q``, which lets the value
    be formed as ``(1 - sum_AB / sum_A)/(q - 1)`` in log space; this keeps
    large q (1e3 and beyond) free of underflow.
    """
    q = _check_q(q)
    parties = _check_condition(rho, condition_on)
    cond = marginal(rho, parties)
    s_ab = tsallis_entropy(rho, q)
    s_a = tsallis_entropy(cond, q)
    numerator = s_ab - s_a
    if q == 1.0:
        return ConditionalEntropyResult(numerator, q, parties, numerator, 1.0)
    log_a = _log_power_sum(_probs(cond), q)
    log_ab = _log_power_sum(_probs(rho), q)
    denominator = math.exp(log_a)
    if not math.isfinite(log_a):
        raise ValueError("non-positive denominator in conditional q-entropy")
    with np.errstate(over="ignore"):
        # beyond double range the ratio saturates to -inf/(q-1)
        value = float(-np.expm1(log_ab - log_a) / (q - 1.0))
    return ConditionalEntropyResult(value, q, parties, numerator, denominator)


def _top(values: np.ndarray) -> tuple[float, int]:
    lmax = float(values[0])
    return lmax, int(np.sum(values >= lmax - TIE_TOL))


def conditional_sign_at_infinity(rho: DensityMatrix, condition_on) -> int:
    """Sign of the conditional q-entropy as q grows without bound.

    Returns -1, 0 or +1. The sign is that of ``lambda_max(marginal) -
    lambda_max(rho)``; on a tie the larger multiplicity of the top eigenvalue
    wins (a larger joint multiplicity gives -1) and a full tie gives 0.
    """
    parties = _check_condition(rho, condition_on)
    joint = eigvalsh_desc(rho.data)
    cond = eigvalsh_desc(marginal(rho, parties).data)
    lj, mj = _top(joint)
    lc, mc = _top(cond)
    if lc - lj > TIE_TOL:
        return 1
    if lj - lc > TIE_TOL:
        return -1
    if mj > mc:
        return -1
    if mj < mc:
        return 1
    return 0


def tsallis_rate(model, rho: DensityMatrix, q: float) -> float:
    """``d/dt S_q`` along the master equation.

    With hermitian channel operators the symmetrized double sum is used
    directly; otherwise the rate follows from ``d/dt Tr rho^q`` by the chain
    rule. At q = 1 the von Neumann rate
    ``sum h |<m|Q|n>|^2 P_m (ln P_m - ln P_n)`` is returned, with zero
    probabilities dropped.
    """
    q = _check_q(q)
    diag = lindblad.diagonalize_gks(model) if isinstance(model, lindblad.GKSModel) else model
    if q == 1.0:
        spec = spectrum(rho)
        p = spec.probabilities
        w = lindblad.channel_weights(diag, spec.basis)
        logp = np.zeros_like(p)
        nz = p > ZERO_PROB
        logp[nz] = np.log(p[nz])
        mask = nz[:, None] & nz[None, :]
        terms = w * p[:, None] * (logp[:, None] - logp[None, :])
        return float(np.sum(np.where(mask, terms, 0.0)))
    if diag.hermitian_channels:
        return -lindblad.trace_power_rate_symmetric(diag, rho, q) / (q - 1.0)
    return -lindblad.trace_power_rate(diag, rho, q) / (q - 1.0)


def q_scan(rho: DensityMatrix, condition_on, q_grid: Iterable[float] = DEFAULT_Q_GRID):
    return [conditional_q_entropy(rho, condition_on, q) for q in q_grid]
