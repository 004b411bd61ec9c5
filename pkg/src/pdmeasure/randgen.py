"""Seeded random objects for property checks and the ``verify`` suite."""

from __future__ import annotations

import numpy as np


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_ket(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = _ginibre(rng, dim, 1)[:, 0]
    return v / np.linalg.norm(v)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    g = _ginibre(rng, dim, rank or dim)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = _ginibre(rng, dim, dim)
    return 0.5 * (g + g.conj().T)


def random_dephasing(n: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-diagonal PSD matrix: the Gram matrix of ``n`` random unit vectors."""
    v = _ginibre(rng, n, rng.integers(1, n + 1))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    r = v @ v.conj().T
    np.fill_diagonal(r, 1.0)
    return r


def random_overcomplete(dim: int, n_bases: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Probe vectors from ``n_bases`` random orthonormal bases plus weights
    ``1/n_bases`` so that the weighted projectors resolve the identity."""
    probes = np.concatenate([random_unitary(dim, rng).T for _ in range(n_bases)])
    weights = np.full(probes.shape[0], 1.0 / n_bases)
    return probes, weights
