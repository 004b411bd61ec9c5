"""Independent cross-checks.

Nothing here reuses the quadrature, state parameterization or map
application of the main modules: the sphere integrals use composite Simpson
in the polar angle (or plain Monte Carlo), the Bloch kets are spelled out
locally, and the Choi matrix is assembled entry by entry from the defining
double sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measurement import MeasurementSpec

MAX_CHOI_ENTRIES = 8
CP_TOL = 1e-10


@dataclass(frozen=True)
class OracleReport:
    name: str
    main: float
    oracle: float
    abs_diff: float
    resolution: str
    tol: float = math.inf

    @property
    def passed(self) -> bool:
        return bool(self.abs_diff <= self.tol)

    @classmethod
    def compare(cls, name: str, main: float, oracle: float, resolution: str, tol: float = math.inf) -> "OracleReport":
        return cls(name, float(main), float(oracle), abs(float(main) - float(oracle)), resolution, tol)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.name}: main={self.main:.12g} oracle={self.oracle:.12g} "
            f"diff={self.abs_diff:.3e} tol={self.tol:.1e} [{self.resolution}]"
        )


def _ket(theta, phi):
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    up = np.cos(0.5 * theta)
    down = np.sin(0.5 * theta) * (np.cos(phi) + 1j * np.sin(phi))
    return np.stack([up.astype(complex), down], axis=-1)


def _entropy_bits(rho: np.ndarray) -> float:
    lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    lam = lam[lam > 1e-300]
    return float(-np.sum(lam * np.log2(lam)))


# -- Monte Carlo ---------------------------------------------------------------


def mc_integrate_rho(s: float, q: float, sample_count: int, seed: int) -> np.ndarray:
    """Monte-Carlo estimate of the object state after measuring ``(s, 0)``.

    Directions are uniform on the sphere (``cos theta`` uniform in [-1, 1],
    ``phi`` uniform). The measure has total mass 2, so the estimate is twice
    the sample mean. Uses numpy's PCG64 stream seeded with ``seed``.
    """
    if sample_count < 10_000:
        raise ValueError(f"sample_count must be at least 1e4, got {sample_count}")
    rng = np.random.default_rng(seed)
    cos_t = rng.uniform(-1.0, 1.0, sample_count)
    phi = rng.uniform(0.0, 2.0 * math.pi, sample_count)
    theta = np.arccos(cos_t)
    psi = _ket(s, 0.0)
    born = np.abs(_ket(theta, phi).conj() @ psi) ** 2
    out = _ket(q * theta, phi)
    rho = 2.0 * np.einsum("n,ni,nj->ij", born, out, out.conj()) / sample_count
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


# -- complete positivity ---------------------------------------------------------


def choi_matrix(spec: MeasurementSpec, r) -> np.ndarray:
    """``C = sum_ij |i><j| (x) M(|i><j|)`` built from the defining double sum.

    ``r`` is used as given (no validation), so invalid dephasing matrices can
    be probed.
    """
    r = np.asarray(r, dtype=complex)
    d, n = spec.dim, spec.n_entries
    if n > MAX_CHOI_ENTRIES:
        raise ValueError(f"Choi check limited to {MAX_CHOI_ENTRIES} entries, spec has {n}")
    dout = d * n
    choi = np.zeros((d * dout, d * dout), dtype=complex)
    for i in range(d):
        for j in range(d):
            block = np.zeros((dout, dout), dtype=complex)
            for a in range(n):
                pa = spec.probes[a]
                ket_a = np.kron(spec.outputs[a], np.eye(n)[a])
                for b in range(n):
                    pb = spec.probes[b]
                    ket_b = np.kron(spec.outputs[b], np.eye(n)[b])
                    # <probe_a|i><j|probe_b>
                    amp = np.conj(pa[i]) * pb[j]
                    coeff = r[a, b] * math.sqrt(spec.weights[a] * spec.weights[b]) * amp
                    block += coeff * np.outer(ket_a, ket_b.conj())
            choi[i * dout:(i + 1) * dout, j * dout:(j + 1) * dout] = block
    return choi


def choi_cp_check(spec: MeasurementSpec, r, tol: float = CP_TOL) -> OracleReport:
    """Minimum Choi eigenvalue; passes iff it is at least ``-tol``."""
    lam_min = float(np.linalg.eigvalsh(choi_matrix(spec, r)).min())
    # report the shortfall below zero so that abs_diff <= tol means pass
    shortfall = max(0.0, -lam_min)
    return OracleReport(
        "choi_min_eigenvalue",
        lam_min,
        0.0,
        shortfall,
        f"entries={spec.n_entries} dim={spec.dim}",
        tol,
    )


# -- fine-grid references ------------------------------------------------------


def _simpson(n_intervals: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Simpson nodes/weights on [0, pi]; ``n_intervals`` must be even."""
    if n_intervals % 2:
        n_intervals += 1
    x = np.linspace(0.0, math.pi, n_intervals + 1)
    w = np.ones(n_intervals + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return x, w * (math.pi / n_intervals) / 3.0


def _sphere_rule(n: int):
    theta, wt = _simpson(n)
    n_phi = max(n, 4)
    phi = 2.0 * math.pi * (np.arange(n_phi) + 0.5) / n_phi
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    ww = np.outer(wt * np.sin(theta), np.full(n_phi, 2.0 * math.pi / n_phi))
    return tt.ravel(), pp.ravel(), ww.ravel()


def simpson_object_state(s: float, q: float, n: int) -> np.ndarray:
    theta, phi, w = _sphere_rule(n)
    born = np.abs(_ket(theta, phi).conj() @ _ket(s, 0.0)) ** 2
    out = _ket(q * theta, phi)
    return np.einsum("n,ni,nj->ij", w * born / (2.0 * math.pi), out, out.conj())


def simpson_p1(q: float, n: int) -> float:
    """``int_0^pi sin(t) sin^2(t/2) cos^2(q t/2) dt`` by composite Simpson."""
    t, w = _simpson(n)
    return float(np.sum(w * np.sin(t) * np.sin(t / 2) ** 2 * np.cos(q * t / 2) ** 2))


def simpson_holevo_pair(q: float, n: int) -> tuple[float, float]:
    theta, phi, w = _sphere_rule(n)
    w = w / (4.0 * math.pi)
    out = _ket(q * theta, phi)
    rho_a = np.einsum("n,ni,nj->ij", w, out, out.conj())
    joint = (_ket(theta, phi)[:, :, None] * out.conj()[:, None, :]).reshape(-1, 4)
    rho_b = np.einsum("n,ni,nj->ij", w, joint, joint.conj())
    s_t, s_w = _simpson(n)
    s_w = s_w * np.sin(s_t) / 2.0
    mean_s = sum(wi * _entropy_bits(simpson_object_state(t, q, n)) for t, wi in zip(s_t, s_w) if wi > 0)
    return _entropy_bits(rho_a) - mean_s, _entropy_bits(rho_b) - mean_s


def _richardson(values: list[float], ratio: float, order: int = 4) -> float:
    """Extrapolate the last two members of a refinement sequence of a
    ``h^order`` method."""
    f = ratio**order
    return values[-1] + (values[-1] - values[-2]) / (f - 1.0)


QUANTITIES = ("entanglement", "holevo_pair", "p1")


def fine_grid_reference(
    quantity: str,
    params: dict,
    main: float | tuple[float, float],
    base_nodes: int = 32,
    multiplier: int = 2,
    tol: float = 1e-6,
) -> list[OracleReport]:
    """Recompute ``quantity`` with Simpson at ``base``, ``base*m``, ``base*m^2``
    polar intervals and compare the extrapolated value with ``main``.

    ``params`` holds ``s`` and/or ``q``; ``main`` is the production value (a
    pair for ``holevo_pair``). Returns one report per scalar, with the
    refinement sequence in the resolution descriptor.
    """
    levels = [base_nodes * multiplier**k for k in range(3)]
    q = float(params["q"])
    if quantity == "entanglement":
        s = float(params["s"])
        seqs = [[_entropy_bits(simpson_object_state(s, q, n)) for n in levels]]
        names = [f"entanglement(s={s:.6g},q={q:.6g})"]
        mains = [main]
    elif quantity == "p1":
        seqs = [[simpson_p1(q, n) for n in levels]]
        names = [f"p1(q={q:.6g})"]
        mains = [main]
    elif quantity == "holevo_pair":
        pairs = [simpson_holevo_pair(q, n) for n in levels]
        seqs = [[p[0] for p in pairs], [p[1] for p in pairs]]
        names = [f"I_A(q={q:.6g})", f"I_B(q={q:.6g})"]
        mains = list(main)
    else:
        raise ValueError(f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}")
    reports = []
    for name, seq, m in zip(names, seqs, mains):
        extrap = _richardson(seq, multiplier)
        desc = "simpson " + " ".join(f"{n}:{v:.12g}" for n, v in zip(levels, seq))
        reports.append(OracleReport.compare(name, m, extrap, desc, tol))
    return reports
