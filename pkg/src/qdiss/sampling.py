"""Random states and models for property tests and demos."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import linalg
from .lindblad import DiagonalModel, GKSModel


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a Ginibre ensemble."""
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    r = g @ linalg.dagger(g)
    return r / np.trace(r).real


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (a + linalg.dagger(a))


def random_traceless(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return a - np.trace(a) / dim * np.eye(dim)


def random_gks(rng: np.random.Generator, dim: int, n_ops: int = 3, positive: bool = True,
               scale: float = 0.3, dims: Sequence[int] = ()) -> GKSModel:
    ops = [random_traceless(rng, dim) / np.sqrt(dim) for _ in range(n_ops)]
    b = rng.normal(size=(n_ops, n_ops)) + 1j * rng.normal(size=(n_ops, n_ops))
    coeff = scale * (b @ linalg.dagger(b) if positive else 0.5 * (b + linalg.dagger(b)))
    return GKSModel(random_hermitian(rng, dim), tuple(ops), coeff, tuple(dims))


def random_diagonal(rng: np.random.Generator, dim: int, n_channels: int = 3,
                    hermitian: bool = False, positive: bool = True,
                    scale: float = 0.3, dims: Sequence[int] = ()) -> DiagonalModel:
    chans = []
    for _ in range(n_channels):
        q = random_hermitian(rng, dim) if hermitian else random_traceless(rng, dim)
        q = q / np.linalg.norm(q)
        rate = scale * rng.uniform(0.2, 1.0)
        if not positive:
            rate *= rng.choice([-1.0, 1.0])
        chans.append((rate, q))
    return DiagonalModel(random_hermitian(rng, dim), tuple(chans), tuple(dims))
