"""Qubit Bloch-sphere geometry and quadrature for the continual measurement.

States are parameterized as ``cos(theta/2)|0> + exp(i phi) sin(theta/2)|1>``.
The sphere integral uses Gauss-Legendre nodes in ``theta`` (with the
``sin(theta)`` Jacobian folded into the weights) and the uniform periodic
rule in ``phi``. Gauss nodes are interior, so no node sits on a pole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .measurement import MeasurementSpec
from .qstate import PureState

SPHERE_VOLUME = 4.0 * math.pi


@dataclass(frozen=True)
class BlochPoint:
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta!r}")
        object.__setattr__(self, "phi", float(self.phi) % (2.0 * math.pi))

    def unit_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])


@dataclass(frozen=True)
class CompressionMap:
    """``theta -> q * theta``; ``q = 0`` collapses the sphere onto ``|0>``."""

    q: float

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"compression coefficient must lie in [0, 1], got {self.q!r}")


def as_compression(q) -> CompressionMap:
    return q if isinstance(q, CompressionMap) else CompressionMap(float(q))


def bloch_kets(theta, phi) -> np.ndarray:
    """Vectorized Bloch states, shape ``(..., 2)``."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack([np.cos(theta / 2) + 0j, np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)


def state_from_bloch(p: BlochPoint) -> PureState:
    return PureState(bloch_kets(p.theta, p.phi))


def compress(p: BlochPoint, m) -> BlochPoint:
    return BlochPoint(as_compression(m).q * p.theta, p.phi)


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Flattened tensor-product rule over the sphere; node ``i * phi_nodes + j``
    pairs theta node ``i`` with phi node ``j``."""

    theta_nodes: int
    phi_nodes: int
    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray
    volume: float = SPHERE_VOLUME

    def __len__(self) -> int:
        return self.weights.shape[0]

    @property
    def nodes(self):
        for t, p, w in zip(self.theta, self.phi, self.weights):
            yield BlochPoint(float(t), float(p)), float(w)

    def rotated(self, dphi: float) -> "QuadratureGrid":
        """Same rule with every node shifted by ``dphi`` in azimuth."""
        phi = np.mod(self.phi + dphi, 2.0 * math.pi)
        phi.setflags(write=False)
        return QuadratureGrid(self.theta_nodes, self.phi_nodes, self.theta, phi, self.weights, self.volume)


def gauss_legendre_polar(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes in ``(0, pi)`` and weights for ``int_0^pi f(theta) sin(theta) dtheta``."""
    x, w = np.polynomial.legendre.leggauss(n)
    theta = 0.5 * math.pi * (x + 1.0)
    return theta, 0.5 * math.pi * w * np.sin(theta)


@lru_cache(maxsize=32)
def build_grid(theta_nodes: int, phi_nodes: int) -> QuadratureGrid:
    if theta_nodes < 2 or phi_nodes < 1:
        raise ValueError(f"need theta_nodes >= 2 and phi_nodes >= 1, got {theta_nodes} x {phi_nodes}")
    theta, wt = gauss_legendre_polar(theta_nodes)
    phi = 2.0 * math.pi * np.arange(phi_nodes) / phi_nodes
    wp = 2.0 * math.pi / phi_nodes
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    ww = np.repeat(wt * wp, phi_nodes)
    arrays = [tt.ravel(), pp.ravel(), ww]
    for a in arrays:
        a.setflags(write=False)
    return QuadratureGrid(theta_nodes, phi_nodes, *arrays)


def continuum_measurement(q, grid: QuadratureGrid, dim: int = 2, tol: float = 1e-8) -> MeasurementSpec:
    """Discretized nonselected measurement: every grid node is an outcome.

    Probes sit at the nodes, outputs at the compressed nodes, and
    ``nu = dim * w / V``. The achieved completeness deviation is available as
    ``spec.completeness_deviation``.
    """
    if dim != 2:
        raise NotImplementedError("only qubit (dim=2) grids are provided")
    q = as_compression(q).q
    probes = bloch_kets(grid.theta, grid.phi)
    outputs = bloch_kets(q * grid.theta, grid.phi)
    nu = dim * grid.weights / grid.volume
    return MeasurementSpec(probes, outputs, nu, tol=tol)
