"""Entanglement and Holevo information of the continual qubit measurement.

All sphere integrals here run over a :class:`~pdmeasure.bloch.QuadratureGrid`
with the normalized measure ``dnu = D dV / V`` (``D = 2``). The polar angle of
the pure input is ``s``; the compression coefficient is ``q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bloch import BlochPoint, QuadratureGrid, as_compression, bloch_kets, gauss_legendre_polar
from .qstate import DensityMatrix, von_neumann_entropy

QUBIT = 2
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _weighted_projector_sum(weights: np.ndarray, kets: np.ndarray) -> np.ndarray:
    return np.einsum("n,ni,nj->ij", weights, kets, kets.conj())


def channel_A_output(alpha: BlochPoint, q, grid: QuadratureGrid) -> DensityMatrix:
    """Object state left by the coherent measurement of the pure input ``alpha``.

    ``rho = (D/V) sum_beta w_beta |<beta|alpha>|^2 |e_beta><e_beta|``.
    """
    q = as_compression(q).q
    probes = bloch_kets(grid.theta, grid.phi)
    outputs = bloch_kets(q * grid.theta, grid.phi)
    psi = bloch_kets(alpha.theta, alpha.phi)
    born = np.abs(probes.conj() @ psi) ** 2
    w = QUBIT * grid.weights / grid.volume * born
    return DensityMatrix(_weighted_projector_sum(w, outputs))


def post_measurement_object_state(s: float, q, grid: QuadratureGrid) -> DensityMatrix:
    return channel_A_output(BlochPoint(s, 0.0), q, grid)


def entanglement(s: float, q, grid: QuadratureGrid) -> float:
    """Entropy of entanglement (bits) between object and meter for input angle ``s``."""
    return von_neumann_entropy(post_measurement_object_state(s, q, grid))


def entanglement_surface(s_values, q_values, grid: QuadratureGrid) -> np.ndarray:
    """``E[i, j] = entanglement(s_values[i], q_values[j])``."""
    return np.array([[entanglement(s, q, grid) for q in q_values] for s in s_values])


# Taylor coefficients of p1 in h = 1 - q about q = 1
_P1_SERIES = (1.0 / 3.0, 1.0 / 9.0 + math.pi**2 / 16.0, 7.0 * math.pi**2 / 96.0 - 7.0 / 54.0)


def p1_closed_form(q: float, limit_window: float = 1e-6) -> float:
    """Weight of ``|0>`` in the object state for input ``|1>`` (``s = pi``).

    ``p1 = (3 - 2q^2 + cos pi q) / (4(1 - q^2)) - (1 - cos pi q) / (4(4 - q^2))``,
    replaced by its second-order series in ``1 - q`` near ``q = 1``, where
    the first term is 0/0.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q!r}")
    if abs(1.0 - q) < limit_window:
        h = 1.0 - q
        c0, c1, c2 = _P1_SERIES
        return c0 + h * (c1 + h * c2)
    c = math.cos(math.pi * q)
    return (3.0 - 2.0 * q * q + c) / (4.0 * (1.0 - q * q)) - (1.0 - c) / (4.0 * (4.0 - q * q))


@dataclass(frozen=True, eq=False)
class EnsembleChannelOutputs:
    """Channel outputs ``rho(alpha)`` with input probabilities ``p_alpha``."""

    states: np.ndarray  # (n, d, d)
    probs: np.ndarray
    average: np.ndarray
    prob_tol: float = 1e-10
    average_tol: float = 1e-12

    def __post_init__(self):
        states = np.asarray(self.states, dtype=complex)
        probs = np.asarray(self.probs, dtype=float)
        avg = np.asarray(self.average, dtype=complex)
        if states.ndim != 3 or probs.shape != states.shape[:1]:
            raise ValueError(f"states {states.shape} and probabilities {probs.shape} do not line up")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > self.prob_tol:
            raise ValueError(f"probabilities must be nonnegative and sum to 1 (sum {probs.sum()!r})")
        dev = np.max(np.abs(np.einsum("n,nij->ij", probs, states) - avg))
        if dev > self.average_tol:
            raise ValueError(f"average state inconsistent with members (deviation {dev:.3e})")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "average", avg)

    @classmethod
    def from_members(cls, states, probs) -> "EnsembleChannelOutputs":
        states = np.asarray(states, dtype=complex)
        probs = np.asarray(probs, dtype=float)
        return cls(states, probs, np.einsum("n,nij->ij", probs, states))


def holevo(e: EnsembleChannelOutputs) -> float:
    """``S[average] - sum p S[rho(alpha)]`` in bits."""
    member = sum(p * von_neumann_entropy(rho) for p, rho in zip(e.probs, e.states))
    return von_neumann_entropy(e.average) - member


def channel_A_average(q, grid: QuadratureGrid) -> DensityMatrix:
    """Ensemble-average object state ``(1/V) int dV |e_beta><e_beta|``."""
    q = as_compression(q).q
    outputs = bloch_kets(q * grid.theta, grid.phi)
    return DensityMatrix(_weighted_projector_sum(grid.weights / grid.volume, outputs))


def channel_B_average_embedded(q, grid: QuadratureGrid) -> DensityMatrix:
    """Ensemble-average meter state mapped into ``H_A (x) H_A``.

    ``(1/V) int dV |beta>|e*_beta><e*_beta|<beta|``, complex conjugation taken
    in the computational basis.
    """
    q = as_compression(q).q
    probes = bloch_kets(grid.theta, grid.phi)
    outputs = bloch_kets(q * grid.theta, grid.phi).conj()
    joint = np.einsum("ni,nj->nij", probes, outputs).reshape(len(grid), 4)
    return DensityMatrix(_weighted_projector_sum(grid.weights / grid.volume, joint))


@dataclass(frozen=True)
class InfoCurvePoint:
    q: float
    I_A: float
    I_B: float


def mean_member_entropy(q, grid: QuadratureGrid, s_nodes: int = 24) -> float:
    """Average of ``S[rho_A(alpha)]`` over the uniform ensemble of pure inputs.

    The member entropy depends only on the polar angle, so the average is a
    one-dimensional Gauss-Legendre rule in that angle.
    """
    if s_nodes < 8:
        raise ValueError(f"s_nodes must be at least 8, got {s_nodes}")
    theta, w = gauss_legendre_polar(s_nodes)
    return float(sum(wi * entanglement(t, q, grid) for t, wi in zip(theta, w / 2.0)))


def holevo_point(q, grid: QuadratureGrid, s_nodes: int = 24) -> InfoCurvePoint:
    avg = mean_member_entropy(q, grid, s_nodes)
    s_a = von_neumann_entropy(channel_A_average(q, grid))
    s_b = von_neumann_entropy(channel_B_average_embedded(q, grid))
    return InfoCurvePoint(as_compression(q).q, s_a - avg, s_b - avg)


def holevo_curves(q_values, grid: QuadratureGrid, s_nodes: int = 24) -> list[InfoCurvePoint]:
    """Holevo information kept by the object (``I_A``) and delivered to the meter (``I_B``)."""
    return [holevo_point(q, grid, s_nodes) for q in q_values]


def maximize_entanglement(
    s: float,
    grid: QuadratureGrid,
    q_bracket: tuple[float, float] = (0.5, 1.0),
    tol: float = 1e-4,
) -> tuple[float, float]:
    """Golden-section search for the ``q`` maximizing ``entanglement(s, q)``.

    A maximum on the bracket boundary is returned as such. Raises
    ``ValueError`` when both initial probes fall below both endpoints, i.e. the
    bracket holds a dip rather than a peak.
    """
    a, b = map(float, q_bracket)
    if not 0.0 <= a <= b <= 1.0:
        raise ValueError(f"bracket must satisfy 0 <= a <= b <= 1, got {q_bracket}")

    def f(q):
        return entanglement(s, q, grid)

    if b - a <= tol:
        q = a if a == b else 0.5 * (a + b)
        return q, f(q)
    fa, fb = f(a), f(b)
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    if max(fc, fd) < min(fa, fb):
        raise ValueError(f"bracket {q_bracket} does not enclose a maximum of E(s={s:g}, q)")
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    candidates = [(fc, c), (fd, d), (fa, q_bracket[0]), (fb, q_bracket[1])]
    e_best, q_best = max(candidates)
    return float(q_best), float(e_best)

