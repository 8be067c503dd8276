"""Catalog of states and operators: Werner families, the eight three-qubit
basis states and their named combinations, Pauli operators and the 3-spin
Heisenberg Hamiltonian.

Qubit basis ordering is ``|up> = index 0``, ``|down> = index 1`` so that
``sigma_z = diag(1, -1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import DensityMatrix, from_pure
from .linalg import kron_all

SQRT2 = np.sqrt(2.0)

PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "+": np.array([[0, 1], [0, 0]], dtype=complex),
    "-": np.array([[0, 0], [1, 0]], dtype=complex),
}
_AXIS_ALIASES = {"plus": "+", "minus": "-", "p": "+", "m": "-"}


def pauli(axis: str, party: int = 0, n_parties: int = 1) -> np.ndarray:
    """Single-site Pauli or ladder operator embedded in an n-qubit space."""
    key = _AXIS_ALIASES.get(str(axis).lower(), str(axis).lower())
    if key not in PAULI or key == "i":
        raise ValueError(f"unknown axis {axis!r}; expected x, y, z, + or -")
    if n_parties < 1 or not 0 <= party < n_parties:
        raise ValueError(f"party {party} invalid for {n_parties} qubits")
    factors = [PAULI["i"]] * n_parties
    factors[party] = PAULI[key]
    return kron_all(factors)


def spin_dot(a: int, b: int, n_parties: int) -> np.ndarray:
    """``sigma_a . sigma_b`` on an n-qubit register."""
    return sum(pauli(ax, a, n_parties) @ pauli(ax, b, n_parties) for ax in "xyz")


def heisenberg_3spin() -> np.ndarray:
    """``sigma_A.sigma_B + sigma_A.sigma_C + (1/2) sigma_B.sigma_C``.

    The factor one half binds to the BC coupling only; the fully symmetric
    sum would have just two distinct levels instead of 5/2, -3/2, -7/2.
    """
    return spin_dot(0, 1, 3) + spin_dot(0, 2, 3) + 0.5 * spin_dot(1, 2, 3)


def basis_ket(bits: str) -> np.ndarray:
    """Computational-basis ket from a string of ``u``/``d`` (or 0/1) symbols."""
    idx = 0
    for ch in bits:
        if ch in "u0":
            b = 0
        elif ch in "d1":
            b = 1
        else:
            raise ValueError(f"bad basis symbol {ch!r}")
        idx = 2 * idx + b
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[idx] = 1.0
    return v


def _comb(*terms: tuple[float, str]) -> np.ndarray:
    v = sum(c * basis_ket(b) for c, b in terms)
    return v / np.linalg.norm(v)


_BASE_STATES = {
    "Q1+": _comb((1, "uuu")),
    "Q1-": _comb((1, "ddd")),
    "Q2+": _comb((1, "uud"), (1, "udu"), (1, "duu")),
    "Q2-": _comb((1, "ddu"), (1, "dud"), (1, "udd")),
    "D1+": _comb((1, "uud"), (1, "udu"), (-2, "duu")),
    "D1-": _comb((1, "ddu"), (1, "dud"), (-2, "udd")),
    "D2+": _comb((1, "uud"), (-1, "udu")),
    "D2-": _comb((1, "ddu"), (-1, "dud")),
}
_NAMED = {
    "GHZ+": (_BASE_STATES["Q1+"] + _BASE_STATES["Q1-"]) / SQRT2,
    "GHZ-": (_BASE_STATES["Q1+"] - _BASE_STATES["Q1-"]) / SQRT2,
    "GFR+": _BASE_STATES["D2+"],
    "GFR-": _BASE_STATES["D2-"],
    "WRR+": _BASE_STATES["Q2+"],
    "WRR-": _BASE_STATES["Q2-"],
    "WRr+": _BASE_STATES["D1+"],
    "WRr-": _BASE_STATES["D1-"],
}
CATALOG = {**_BASE_STATES, **_NAMED}
BASE_LABELS = tuple(_BASE_STATES)
TABLE_LABELS = ("GHZ+", "GHZ-", "GFR+", "GFR-", "WRr+", "WRr-", "WRR+", "WRR-")
# Heisenberg eigenvalue assigned to each catalog state.
HEISENBERG_LEVEL = {
    "GHZ": 2.5, "WRR": 2.5, "Q1": 2.5, "Q2": 2.5,
    "GFR": -1.5, "D2": -1.5,
    "WRr": -3.5, "D1": -3.5,
}


def canonical_label(label: str) -> str:
    """Normalize CLI spellings such as ``GHZ[+]``, ``ghz+`` or ``GFF+``."""
    s = str(label).strip().replace("[", "").replace("]", "").replace("±", "")
    s = s.replace("⁺", "+").replace("⁻", "-").replace("−", "-")
    if s.upper().startswith("GFF"):
        s = "GHZ" + s[3:]
    for known in CATALOG:
        # WRr and WRR differ only by case, so compare exactly first.
        if s == known:
            return known
    matches = [k for k in CATALOG if k.upper() == s.upper()]
    if len(matches) == 1:
        return matches[0]
    raise ValueError(f"unknown state label {label!r}")


@dataclass(frozen=True)
class ThreeQubitState:
    label: str
    amplitudes: np.ndarray

    @property
    def family(self) -> str:
        return self.label[:-1]

    def density(self) -> DensityMatrix:
        return from_pure(self.amplitudes, (2, 2, 2))


def three_qubit(label: str) -> ThreeQubitState:
    key = canonical_label(label)
    amps = CATALOG[key].copy()
    amps.setflags(write=False)
    return ThreeQubitState(key, amps)


@dataclass(frozen=True)
class WernerParams:
    x: float
    levels: int = 2
    parties: int = 2

    def __post_init__(self):
        if not 0.0 <= self.x <= 1.0:
            raise ValueError(f"Werner weight x={self.x} outside [0, 1]")
        if self.levels < 2 or self.parties < 2:
            raise ValueError("need levels >= 2 and parties >= 2")


def ghz_vector(levels: int, parties: int) -> np.ndarray:
    """``sum_i |i...i> / sqrt(N)``; for two qubits this is (|uu> + |dd>)/sqrt 2."""
    d = levels ** parties
    v = np.zeros(d, dtype=complex)
    stride = sum(levels ** k for k in range(parties))
    v[[i * stride for i in range(levels)]] = 1.0
    return v / np.sqrt(levels)


def werner(params: WernerParams) -> DensityMatrix:
    n, p = params.levels, params.parties
    d = n ** p
    psi = ghz_vector(n, p)
    data = (1.0 - params.x) / d * np.eye(d) + params.x * np.outer(psi, psi.conj())
    return DensityMatrix(data, (n,) * p)


def werner_threshold(levels: int, parties: int) -> float:
    if levels < 2 or parties < 2:
        raise ValueError("need levels >= 2 and parties >= 2")
    return 1.0 / (1.0 + levels ** (parties - 1))


def bell_state() -> np.ndarray:
    """(|dd> + |uu>)/sqrt 2, the two-qubit maximally entangled reference state."""
    return ghz_vector(2, 2)


def named_state(name: str) -> DensityMatrix:
    """Resolve an initial-state name used by configs."""
    key = name.strip()
    if key.lower() in ("bell", "psi2"):
        return from_pure(bell_state(), (2, 2))
    if all(ch in "ud01" for ch in key):
        return from_pure(basis_ket(key), (2,) * len(key))
    if key.lower() == "plus":
        return from_pure(np.array([1, 1]) / SQRT2, (2,))
    return three_qubit(key).density()
