"""Density matrices with enforced quantum-state invariants."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import linalg

TRACE_TOL = 1e-9
HERMITIAN_TOL = 1e-10
# Eigenvalues in [-CLAMP_TOL, 0) are round-off and read as zero; anything
# more negative is a genuine positivity violation.
CLAMP_TOL = 1e-9
NORM_TOL = 1e-9


class InvalidStateError(ValueError):
    """Raised when a matrix fails the density-matrix invariants."""

    def __init__(self, report: "ValidationReport", where: str = ""):
        self.report = report
        prefix = f"{where}: " if where else ""
        super().__init__(prefix + report.describe())


@dataclass(frozen=True)
class ValidationReport:
    trace_deviation: float
    hermiticity_deviation: float
    min_eigenvalue: float
    trace_ok: bool
    hermitian_ok: bool
    positive_ok: bool

    @property
    def ok(self) -> bool:
        return self.trace_ok and self.hermitian_ok and self.positive_ok

    def describe(self) -> str:
        failures = []
        if not self.trace_ok:
            failures.append(f"trace deviation {self.trace_deviation:.3e}")
        if not self.hermitian_ok:
            failures.append(f"hermiticity deviation {self.hermiticity_deviation:.3e}")
        if not self.positive_ok:
            failures.append(f"minimum eigenvalue {self.min_eigenvalue:.3e}")
        return "valid" if not failures else "invalid state (" + ", ".join(failures) + ")"


def validate(rho) -> ValidationReport:
    """Check trace, hermiticity and positivity without raising."""
    data = rho.data if isinstance(rho, DensityMatrix) else linalg.as_matrix(rho)
    tr_dev = float(abs(np.trace(data) - 1.0))
    h_dev = linalg.hermiticity_deviation(data)
    min_eig = float(linalg.eigvalsh_desc(data)[-1])
    return ValidationReport(
        trace_deviation=tr_dev,
        hermiticity_deviation=h_dev,
        min_eigenvalue=min_eig,
        trace_ok=tr_dev <= TRACE_TOL,
        hermitian_ok=h_dev <= HERMITIAN_TOL,
        positive_ok=min_eig >= -CLAMP_TOL,
    )


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated density matrix on a composite space.

    ``dims`` lists the subsystem dimensions, factor 0 being party A. The
    underlying array is made read-only on construction.
    """

    data: np.ndarray
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        data = linalg.as_matrix(self.data).copy()
        dims = tuple(int(d) for d in self.dims) if self.dims else (data.shape[0],)
        if int(np.prod(dims)) != data.shape[0]:
            raise ValueError(f"dims {dims} do not match matrix size {data.shape[0]}")
        report = validate(data)
        if not report.ok:
            raise InvalidStateError(report)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def __repr__(self) -> str:
        return f"DensityMatrix(dims={list(self.dims)}, purity={purity(self):.6g})"

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "re": self.data.real.tolist(),
            "im": self.data.imag.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DensityMatrix":
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        return cls(re + 1j * im, tuple(obj["dims"]))


def from_pure(vector: Sequence[complex], dims: Sequence[int] | None = None) -> DensityMatrix:
    """Projector onto a normalized state vector."""
    psi = np.asarray(vector, dtype=np.complex128).reshape(-1)
    dims = tuple(dims) if dims is not None else (psi.size,)
    if int(np.prod(dims)) != psi.size:
        raise ValueError(f"vector length {psi.size} does not match dims {dims}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"state vector is not normalized (norm {norm:.12g})")
    return DensityMatrix(np.outer(psi, psi.conj()), dims)


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    d = int(np.prod(dims))
    return DensityMatrix(np.eye(d) / d, tuple(dims))


def product(*states: DensityMatrix) -> DensityMatrix:
    data = linalg.kron_all([s.data for s in states])
    dims = tuple(d for s in states for d in s.dims)
    return DensityMatrix(data, dims)


def purity(rho: DensityMatrix) -> float:
    """``Tr rho^2`` computed as the squared Frobenius norm."""
    return float(np.sum(np.abs(rho.data) ** 2))


@dataclass(frozen=True)
class ProbabilitySpectrum:
    probabilities: np.ndarray
    basis: np.ndarray


def spectrum(rho: DensityMatrix) -> ProbabilitySpectrum:
    """Eigen-expansion ``rho = sum_m P_m |m><m|`` with round-off clamped."""
    eig = linalg.hermitian_eig(rho.data, tol=HERMITIAN_TOL)
    p = np.where(eig.eigenvalues < 0.0, 0.0, eig.eigenvalues)
    p = p / p.sum()
    return ProbabilitySpectrum(p, eig.eigenvectors)


def parse_parties(parties) -> list[int]:
    """Accept ``"AB"``, ``["A", "C"]`` or ``[0, 2]`` and return sorted indices."""
    if isinstance(parties, (int, np.integer)):
        parties = [parties]
    out = set()
    for p in parties:
        if isinstance(p, str):
            for ch in p.replace(",", "").replace(" ", ""):
                if not ch.isalpha():
                    raise ValueError(f"bad party label {p!r}")
                out.add(ord(ch.upper()) - ord("A"))
        else:
            out.add(int(p))
    return sorted(out)


def party_names(parties: Iterable[int]) -> str:
    return "".join(chr(ord("A") + p) for p in sorted(parties))


def _normalize_parties(rho: DensityMatrix, keep) -> list[int]:
    keep = parse_parties(keep)
    if not keep:
        raise ValueError("party set must be nonempty")
    if keep[0] < 0 or keep[-1] >= rho.n_parties:
        raise ValueError(f"parties {keep} out of range for {rho.n_parties} subsystems")
    return keep


def marginal(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the parties in ``keep`` (ascending order)."""
    keep = _normalize_parties(rho, keep)
    data = linalg.partial_trace(rho.data, rho.dims, keep)
    return DensityMatrix(data, tuple(rho.dims[k] for k in keep))
