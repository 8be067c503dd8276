"""Dense complex linear algebra used throughout the package.

Operators are plain 2-D ``numpy`` arrays of dtype ``complex128``. Composite
systems use the convention that subsystem 0 is the leftmost tensor factor
(party A), so a basis index of a system with ``dims = [d0, d1, ...]`` is the
row-major multi-index ``(i0, i1, ...)``.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite square complex matrix."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def hermiticity_deviation(m: np.ndarray) -> float:
    """Largest absolute entry of ``m - m^dagger``."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - dagger(m))))


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return hermiticity_deviation(m) <= tol


def kron(a, b) -> np.ndarray:
    """Kronecker product of two square matrices.

    ``kron(a, b)[i*db + k, j*db + l] == a[i, j] * b[k, l]``.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    return np.kron(a, b)


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    if not mats:
        raise ValueError("need at least one factor")
    out = as_matrix(mats[0])
    for m in mats[1:]:
        out = kron(out, m)
    return out


def _check_dims(n: int, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"invalid subsystem dimensions {dims}")
    if int(np.prod(dims)) != n:
        raise ValueError(f"dims {dims} do not multiply to matrix size {n}")
    return dims


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Parameters
    ----------
    m : array_like
        Square matrix on the composite space.
    dims : sequence of int
        Subsystem dimensions, factor 0 leftmost.
    keep : iterable of int
        Subsystems to retain. The output keeps them in ascending order.

    Returns
    -------
    numpy.ndarray
        Reduced matrix of size ``prod(dims[k] for k in keep)``.
    """
    m = as_matrix(m)
    dims = _check_dims(m.shape[0], dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise ValueError(f"keep {keep} out of range for {len(dims)} subsystems")
    n = len(dims)
    if len(keep) == n:
        return m.copy()
    traced = [k for k in range(n) if k not in keep]
    t = m.reshape(dims + dims)
    # Contract row/col axes of each traced subsystem, highest first so
    # remaining axis numbers stay valid.
    for k in sorted(traced, reverse=True):
        nrem = t.ndim // 2
        t = np.trace(t, axis1=k, axis2=k + nrem)
    d = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d, d)


def partial_transpose(m, dims: Sequence[int], party: int) -> np.ndarray:
    """Transpose the indices of subsystem ``party`` only."""
    m = as_matrix(m)
    dims = _check_dims(m.shape[0], dims)
    n = len(dims)
    if not 0 <= party < n:
        raise ValueError(f"party {party} out of range")
    t = m.reshape(dims + dims)
    axes = list(range(2 * n))
    axes[party], axes[party + n] = axes[party + n], axes[party]
    return t.transpose(axes).reshape(m.shape)


def permute_subsystems(m, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors; new factor ``j`` is old factor ``perm[j]``."""
    m = as_matrix(m)
    dims = _check_dims(m.shape[0], dims)
    n = len(dims)
    perm = list(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of {n} subsystems")
    t = m.reshape(dims + dims)
    t = t.transpose(perm + [p + n for p in perm])
    return t.reshape(m.shape)


def permute_vector(v, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    dims = _check_dims(v.shape[0], dims)
    return v.reshape(dims).transpose(list(perm)).reshape(-1)


class HermitianEigenSystem(NamedTuple):
    """Eigenvalues in non-increasing order with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def hermitian_eig(m, tol: float = HERMITIAN_TOL) -> HermitianEigenSystem:
    m = as_matrix(m)
    dev = hermiticity_deviation(m)
    if dev > tol:
        raise ValueError(f"matrix is not hermitian (deviation {dev:.3e})")
    h = 0.5 * (m + dagger(m))
    w, v = np.linalg.eigh(h)
    return HermitianEigenSystem(w[::-1].copy(), v[:, ::-1].copy())


def eigvalsh_desc(m) -> np.ndarray:
    m = as_matrix(m)
    return np.linalg.eigvalsh(0.5 * (m + dagger(m)))[::-1]


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a
