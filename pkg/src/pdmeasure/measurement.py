"""Generalized measurement as an isometry from the object into object x meter.

A measurement is the indexed family ``(probe_a, output_a, nu_a)``. The
coherent map is

    V = sum_a sqrt(nu_a) |output_a>_A |a>_B <probe_a|_A

with ``|a>_B`` the computational basis of the meter, ordered by entry index.
The joint space is ordered object-major: joint index ``i * n_entries + a``.
Dephasing multiplies the coherence between meter branches ``a`` and ``b`` by
``R[a, b]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .qstate import DensityMatrix, as_matrix, partial_trace_array

COMPLETENESS_TOL = 1e-10
ISOMETRY_TOL = 1e-10
PSD_TOL = 1e-10


class CompletenessError(ValueError):
    """Weighted probe projectors do not resolve the identity."""

    def __init__(self, deviation: float, tol: float):
        super().__init__(f"completeness deviation {deviation:.3e} exceeds tolerance {tol:.1e}")
        self.deviation = deviation
        self.tol = tol


def _readonly(a, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MeasurementSpec:
    """Probe states, output states and multiplicity weights.

    ``probes`` and ``outputs`` are ``(n_entries, dim)`` arrays of normalized
    rows; ``weights`` has length ``n_entries``. Construction fails with
    :class:`CompletenessError` if ``sum nu |probe><probe|`` misses the
    identity by more than ``tol`` in max-norm.
    """

    probes: np.ndarray
    outputs: np.ndarray
    weights: np.ndarray
    tol: float = COMPLETENESS_TOL
    norm_tol: float = 1e-10
    completeness_deviation: float = field(init=False)

    def __post_init__(self):
        probes = _readonly(self.probes, complex)
        outputs = _readonly(self.outputs, complex)
        weights = _readonly(self.weights, float)
        if probes.ndim != 2 or outputs.shape != probes.shape:
            raise ValueError(f"probes {probes.shape} and outputs {outputs.shape} must be equal (n, dim) arrays")
        if weights.shape != (probes.shape[0],):
            raise ValueError(f"need one weight per entry, got {weights.shape} for {probes.shape[0]} entries")
        if probes.shape[0] == 0:
            raise ValueError("measurement needs at least one entry")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        for name, states in (("probe", probes), ("output", outputs)):
            norms = np.linalg.norm(states, axis=1)
            live = weights > 0
            bad = np.flatnonzero(live & (np.abs(norms - 1.0) > self.norm_tol))
            if bad.size:
                raise ValueError(f"{name} state of entry {bad[0]} is not normalized (norm {norms[bad[0]]!r})")
        object.__setattr__(self, "probes", probes)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "weights", weights)
        resolved = np.einsum("a,ai,aj->ij", weights, probes, probes.conj())
        dev = float(np.max(np.abs(resolved - np.eye(self.dim))))
        object.__setattr__(self, "completeness_deviation", dev)
        if dev > self.tol:
            raise CompletenessError(dev, self.tol)

    @classmethod
    def from_entries(cls, entries: Sequence[tuple], tol: float = COMPLETENESS_TOL) -> "MeasurementSpec":
        """Build from ``(probe, output, nu)`` triples."""
        probes, outputs, weights = zip(*entries)
        return cls(
            np.array([np.asarray(p, dtype=complex).reshape(-1) for p in probes]),
            np.array([np.asarray(o, dtype=complex).reshape(-1) for o in outputs]),
            np.array(weights, dtype=float),
            tol=tol,
        )

    @property
    def dim(self) -> int:
        return self.probes.shape[1]

    @property
    def n_entries(self) -> int:
        return self.probes.shape[0]

    meter_dim = n_entries

    @property
    def entries(self) -> Iterator[tuple[np.ndarray, np.ndarray, float]]:
        for p, o, w in zip(self.probes, self.outputs, self.weights):
            yield p, o, float(w)


@dataclass(frozen=True, eq=False)
class DephasingMatrix:
    """Unit-diagonal, Hermitian, positive semidefinite branch-coherence matrix."""

    r: np.ndarray
    tol: float = PSD_TOL

    def __post_init__(self):
        r = np.asarray(self.r, dtype=complex)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ValueError(f"dephasing matrix must be square, got {r.shape}")
        if np.any(np.abs(np.diag(r) - 1.0) > 1e-12):
            raise ValueError("dephasing matrix must have unit diagonal")
        if np.max(np.abs(r - r.conj().T)) > self.tol:
            raise ValueError("dephasing matrix must be Hermitian")
        lam_min = np.linalg.eigvalsh(0.5 * (r + r.conj().T)).min()
        if lam_min < -self.tol:
            raise ValueError(f"dephasing matrix is not positive semidefinite (eigenvalue {lam_min:.3e})")
        object.__setattr__(self, "r", _readonly(r, complex))

    @classmethod
    def coherent(cls, n: int) -> "DephasingMatrix":
        return cls(np.ones((n, n)))

    @classmethod
    def dequantized(cls, n: int) -> "DephasingMatrix":
        return cls(np.eye(n))

    @property
    def size(self) -> int:
        return self.r.shape[0]


@dataclass(frozen=True, eq=False)
class Isometry:
    """Matrix of shape ``(out_dim, in_dim)``; not validated on construction,
    see :func:`check_isometry`."""

    matrix: np.ndarray

    @property
    def in_dim(self) -> int:
        return self.matrix.shape[1]

    @property
    def out_dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class Povm:
    elements: np.ndarray  # (n, dim, dim)

    def __len__(self) -> int:
        return self.elements.shape[0]

    def completeness_deviation(self) -> float:
        total = self.elements.sum(axis=0)
        return float(np.max(np.abs(total - np.eye(total.shape[0]))))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.elements).min())


def build_isometry(spec: MeasurementSpec, tol: float = ISOMETRY_TOL) -> Isometry:
    d, n = spec.dim, spec.n_entries
    amp = np.sqrt(spec.weights)
    # V[i*n + a, j] = sqrt(nu_a) output_a[i] conj(probe_a[j])
    v = np.einsum("a,ai,aj->iaj", amp, spec.outputs, spec.probes.conj()).reshape(d * n, d)
    iso = Isometry(_readonly(v, complex))
    dev = check_isometry(iso)
    if dev > max(tol, spec.tol):
        raise CompletenessError(dev, max(tol, spec.tol))
    return iso


def check_isometry(v: Isometry) -> float:
    """``max |V^+ V - I|``; the caller decides pass/fail."""
    m = v.matrix
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[1]))))


def apply_coherent(v: Isometry, rho) -> DensityMatrix:
    m = v.matrix
    r = as_matrix(rho)
    if r.shape != (v.in_dim, v.in_dim):
        raise ValueError(f"state of dim {r.shape[0]} does not match isometry input dim {v.in_dim}")
    return DensityMatrix(m @ r @ m.conj().T)


def _check_dephasing(spec: MeasurementSpec, r) -> np.ndarray:
    if not isinstance(r, DephasingMatrix):
        r = DephasingMatrix(r)
    if r.size != spec.n_entries:
        raise ValueError(f"dephasing matrix size {r.size} != number of entries {spec.n_entries}")
    return r.r


def _branch_amplitudes(spec: MeasurementSpec, rho) -> np.ndarray:
    """``K[a, b] = sqrt(nu_a nu_b) <probe_a| rho |probe_b>``."""
    r = as_matrix(rho)
    if r.shape != (spec.dim, spec.dim):
        raise ValueError(f"state of dim {r.shape[0]} does not match measurement dim {spec.dim}")
    amp = np.sqrt(spec.weights)
    p = spec.probes.conj() * amp[:, None]
    return p @ r @ p.conj().T


def apply_dephased_array(spec: MeasurementSpec, r: np.ndarray, rho) -> np.ndarray:
    d, n = spec.dim, spec.n_entries
    k = _branch_amplitudes(spec, rho) * r
    out = np.einsum("ai,ab,bj->iajb", spec.outputs, k, spec.outputs.conj())
    return out.reshape(d * n, d * n)


def apply_dephased(spec: MeasurementSpec, r, rho) -> DensityMatrix:
    """Dephased measurement map on a state of the object.

    Output lives on object x meter; ``r`` may be a :class:`DephasingMatrix`
    or a raw array that is validated first.
    """
    return DensityMatrix(apply_dephased_array(spec, _check_dephasing(spec, r), rho))


def povm_elements(spec: MeasurementSpec) -> Povm:
    e = np.einsum("a,ai,aj->aij", spec.weights, spec.probes, spec.probes.conj())
    return Povm(_readonly(e, complex))


def outcome_distribution(spec: MeasurementSpec, rho) -> np.ndarray:
    r = as_matrix(rho)
    if r.shape != (spec.dim, spec.dim):
        raise ValueError(f"state of dim {r.shape[0]} does not match measurement dim {spec.dim}")
    p = spec.weights * np.einsum("ai,ij,aj->a", spec.probes.conj(), r, spec.probes).real
    return p


def gram_matrix(spec: MeasurementSpec) -> np.ndarray:
    """``Q[a, b] = <output_a|output_b>``."""
    return spec.outputs.conj() @ spec.outputs.T


def contract_to_meter(spec: MeasurementSpec, r, rho) -> DensityMatrix:
    """Meter state after tracing out the object.

    Branch coherences pick up the output overlap ``<output_b|output_a>`` on
    top of the dephasing factor.
    """
    rr = _check_dephasing(spec, r)
    k = _branch_amplitudes(spec, rho)
    return DensityMatrix(rr * gram_matrix(spec).T * k)


def meter_state(spec: MeasurementSpec, r, rho) -> DensityMatrix:
    """Same as :func:`contract_to_meter` but via the full joint state."""
    joint = apply_dephased_array(spec, _check_dephasing(spec, r), rho)
    return DensityMatrix(partial_trace_array(joint, (spec.dim, spec.n_entries), keep="B"))


def object_state(spec: MeasurementSpec, r, rho) -> DensityMatrix:
    joint = apply_dephased_array(spec, _check_dephasing(spec, r), rho)
    return DensityMatrix(partial_trace_array(joint, (spec.dim, spec.n_entries), keep="A"))


def minimal_basis_states(spec: MeasurementSpec) -> np.ndarray:
    """Meter vectors ``|kl>`` with ``V = sum_kl |k>_A |kl>_B <l|_A``.

    Returns an array indexed ``[k, l, a]``.
    """
    amp = np.sqrt(spec.weights)
    return np.einsum("a,al,ak->kla", amp, spec.probes.conj(), spec.outputs)


def minimal_basis_gram(spec: MeasurementSpec) -> np.ndarray:
    """``G[k', l', k, l] = <k'l'|kl>``, evaluated from object-space overlaps only."""
    # sum_a nu_a <probe_a|l><k|output_a><output_a|k'><l'|probe_a>
    return np.einsum(
        "a,al,ak,am,an->mnkl",
        spec.weights,
        spec.probes.conj(),
        spec.outputs,
        spec.outputs.conj(),
        spec.probes,
    )


def isometry_from_minimal_basis(states: np.ndarray) -> np.ndarray:
    d, _, n = states.shape
    # V[k*n + a, l] = states[k, l, a]
    return np.transpose(states, (0, 2, 1)).reshape(d * n, d)


PRESETS = ("projective", "entangling", "soft", "selected", "complete-transfer")


def preset(kind: str, dim: int, probes=None, outputs=None, weights=None, tol: float = COMPLETENESS_TOL) -> MeasurementSpec:
    """Named special cases of the generalized measurement.

    ``projective`` and ``entangling`` share the same coherent map (computational
    basis duplicated into the meter); they differ only in the dephasing that is
    paired with them. ``soft`` takes an arbitrary complete probe set; its
    outputs default to the probes. ``selected`` keeps the computational basis as
    probes and replaces the outputs. ``complete-transfer`` sends every outcome
    to ``|0>``.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    basis = np.eye(dim, dtype=complex)
    if kind in ("projective", "entangling"):
        return MeasurementSpec(basis, basis, np.ones(dim), tol=tol)
    if kind == "complete-transfer":
        zeros = np.zeros((dim, dim), dtype=complex)
        zeros[:, 0] = 1.0
        return MeasurementSpec(basis, zeros, np.ones(dim), tol=tol)
    if kind == "selected":
        if outputs is None:
            raise ValueError("selected preset needs an output set")
        outputs = np.asarray(outputs, dtype=complex)
        if outputs.shape != (dim, dim):
            raise ValueError(f"selected preset needs {dim} outputs of dim {dim}, got {outputs.shape}")
        return MeasurementSpec(basis, outputs, np.ones(dim), tol=tol)
    if kind == "soft":
        if probes is None:
            raise ValueError("soft preset needs a probe set")
        probes = np.asarray(probes, dtype=complex)
        if probes.ndim != 2 or probes.shape[1] != dim:
            raise ValueError(f"soft probes must be (n, {dim}), got {probes.shape}")
        if weights is None:
            weights = np.full(probes.shape[0], dim / probes.shape[0])
        outputs = probes if outputs is None else np.asarray(outputs, dtype=complex)
        return MeasurementSpec(probes, outputs, weights, tol=tol)
    raise ValueError(f"unknown preset {kind!r}; choose from {', '.join(PRESETS)}")
