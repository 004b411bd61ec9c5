"""Dense linear algebra and quantum-state primitives.

Matrices are plain complex ``numpy`` arrays. Composite spaces use the
row-major, first-factor-major index convention ``i_a * dim_b + i_b``, which
is exactly what :func:`numpy.kron` produces; every partial trace in the
package relies on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
EIGEN_CLAMP = 1e-10
NORM_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def as_matrix(m) -> np.ndarray:
    """Return the underlying complex array of a matrix-like object."""
    if isinstance(m, DensityMatrix):
        return m.matrix
    return np.asarray(m, dtype=complex)


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector."""

    amplitudes: np.ndarray
    tol: float = NORM_TOL

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > self.tol:
            raise ValueError(f"state is not normalized: |psi|^2 = {norm2!r}")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def normalized(cls, amplitudes) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(amps / norm)

    @classmethod
    def basis(cls, dim: int, k: int) -> "PureState":
        amps = np.zeros(dim, dtype=complex)
        amps[k] = 1.0
        return cls(amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace operator.

    Validation happens on construction; instances are read-only afterwards.
    """

    matrix: np.ndarray
    hermitian_tol: float = HERMITIAN_TOL
    trace_tol: float = TRACE_TOL
    eigen_tol: float = EIGEN_CLAMP

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        herm_dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
        if herm_dev > self.hermitian_tol:
            raise ValueError(f"matrix is not Hermitian (max deviation {herm_dev:.3e})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > self.trace_tol:
            raise ValueError(f"trace is {tr!r}, expected 1")
        lam_min = np.linalg.eigvalsh(m).min()
        if lam_min < -self.eigen_tol:
            raise ValueError(f"matrix has negative eigenvalue {lam_min:.3e}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def tensor(a, b) -> np.ndarray:
    """Kronecker product; index of the pair (i_a, i_b) is ``i_a * dim_b + i_b``."""
    return np.kron(as_matrix(a), as_matrix(b))


def _keep_index(keep) -> int:
    if keep in (0, "A", "a"):
        return 0
    if keep in (1, "B", "b"):
        return 1
    raise ValueError(f"keep must select factor 0/'A' or 1/'B', got {keep!r}")


def partial_trace_array(m: np.ndarray, dims: tuple[int, int], keep) -> np.ndarray:
    """Partial trace of a raw (not necessarily normalized) operator."""
    da, db = dims
    m = np.asarray(m)
    if m.shape != (da * db, da * db):
        raise ValueError(f"dims {dims} do not match operator of shape {m.shape}")
    t = m.reshape(da, db, da, db)
    if _keep_index(keep) == 0:
        return np.einsum("ajbj->ab", t)
    return np.einsum("iaib->ab", t)


def partial_trace(rho, dims: tuple[int, int], keep) -> DensityMatrix:
    """Reduced density matrix over the kept factor of a bipartite state."""
    return DensityMatrix(partial_trace_array(as_matrix(rho), dims, keep))


def hermitian_eigenvalues(m, tol: float = 1e-10) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix in descending order."""
    m = as_matrix(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    # LAPACK heevd on the symmetrized matrix
    herm = 0.5 * (m + m.conj().T)
    return np.linalg.eigvalsh(herm)[::-1]


def entropy_of_spectrum(lam, clamp: float = EIGEN_CLAMP) -> float:
    lam = np.asarray(lam, dtype=float)
    if lam.size and lam.min() < -clamp:
        raise ValueError(f"eigenvalue {lam.min():.3e} below -{clamp:g}: not a valid state")
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log2(lam)))


def von_neumann_entropy(rho, clamp: float = EIGEN_CLAMP) -> float:
    """Entropy in bits, ``-sum l log2 l`` with ``0 log 0 = 0``.

    Eigenvalues in ``[-clamp, 0)`` are treated as zero; anything more
    negative is rejected.
    """
    return entropy_of_spectrum(hermitian_eigenvalues(rho), clamp)


def overlap(a, b) -> complex:
    """<a|b>, conjugating the first argument."""
    va = np.asarray(a, dtype=complex).reshape(-1)
    vb = np.asarray(b, dtype=complex).reshape(-1)
    if va.shape != vb.shape:
        raise ValueError(f"dimension mismatch: {va.shape[0]} vs {vb.shape[0]}")
    return complex(np.vdot(va, vb))


def max_abs_diff(a, b) -> float:
    """Entrywise max-norm distance, the tolerance metric used throughout."""
    return float(np.max(np.abs(as_matrix(a) - as_matrix(b))))
