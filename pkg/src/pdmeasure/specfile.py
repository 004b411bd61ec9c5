"""Line-oriented text formats for measurement specs and input states.

Spec file::

    # comments and blank lines are ignored
    dim = 2
    tol = 1e-8            # optional, completeness tolerance
    entry = 1 ; 1,0,0,0 ; 1,0,0,0
    entry = 1 ; 0,0,1,0 ; 0,0,1,0

Each ``entry`` is ``nu ; probe ; output`` where a state is written as ``2*dim``
comma-separated reals ``re0,im0,re1,im1,...``. States must be normalized to
within ``tol`` and are renormalized exactly after parsing.

State file: either a single line with one state vector in the same notation,
or ``dim`` lines, each one row of a density matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measurement import MeasurementSpec
from .qstate import DensityMatrix

DEFAULT_TOL = 1e-8


class SpecFileError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(where + message)


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _parse_reals(text: str, lineno: int) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in text.split(",")])
    except ValueError:
        raise SpecFileError(f"expected comma-separated decimals, got {text.strip()!r}", lineno) from None


def _parse_complex(text: str, dim: int, lineno: int) -> np.ndarray:
    vals = _parse_reals(text, lineno)
    if vals.size != 2 * dim:
        raise SpecFileError(f"expected {2 * dim} reals for a dim-{dim} state, got {vals.size}", lineno)
    return vals[0::2] + 1j * vals[1::2]


def _normalize(v: np.ndarray, tol: float, what: str, lineno: int) -> np.ndarray:
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > tol:
        raise SpecFileError(f"{what} state has norm {norm:.12g}, not 1 within {tol:g}", lineno)
    return v / norm


@dataclass
class ParsedSpec:
    dim: int
    tol: float
    probes: np.ndarray
    outputs: np.ndarray
    weights: np.ndarray

    def to_spec(self, tol: float | None = None) -> MeasurementSpec:
        """Validated spec; completeness is checked against ``tol`` (file value by default)."""
        return MeasurementSpec(self.probes, self.outputs, self.weights, tol=self.tol if tol is None else tol)


def parse_spec_text(text: str) -> ParsedSpec:
    dim = None
    tol = DEFAULT_TOL
    raw_entries = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = _strip(line)
        if not body:
            continue
        if "=" not in body:
            raise SpecFileError(f"expected 'key = value', got {body!r}", lineno)
        key, value = (part.strip() for part in body.split("=", 1))
        if key == "dim":
            try:
                dim = int(value)
            except ValueError:
                raise SpecFileError(f"dim must be an integer, got {value!r}", lineno) from None
            if dim < 1:
                raise SpecFileError("dim must be positive", lineno)
        elif key == "tol":
            try:
                tol = float(value)
            except ValueError:
                raise SpecFileError(f"tol must be a number, got {value!r}", lineno) from None
            if not tol > 0:
                raise SpecFileError("tol must be positive", lineno)
        elif key == "entry":
            raw_entries.append((lineno, value))
        else:
            raise SpecFileError(f"unknown key {key!r}", lineno)
    if dim is None:
        raise SpecFileError("missing 'dim = D' line")
    if not raw_entries:
        raise SpecFileError("no 'entry' lines")

    probes, outputs, weights = [], [], []
    for lineno, value in raw_entries:
        parts = value.split(";")
        if len(parts) != 3:
            raise SpecFileError("entry must be 'nu ; probe ; output'", lineno)
        try:
            nu = float(parts[0])
        except ValueError:
            raise SpecFileError(f"weight must be a number, got {parts[0].strip()!r}", lineno) from None
        if nu < 0:
            raise SpecFileError("weight must be nonnegative", lineno)
        probes.append(_normalize(_parse_complex(parts[1], dim, lineno), tol, "probe", lineno))
        outputs.append(_normalize(_parse_complex(parts[2], dim, lineno), tol, "output", lineno))
        weights.append(nu)
    return ParsedSpec(dim, tol, np.array(probes), np.array(outputs), np.array(weights))


def read_spec_file(path) -> ParsedSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec_text(fh.read())


def _format_state(v) -> str:
    return ",".join(f"{x:.17g}" for c in np.asarray(v, dtype=complex) for x in (c.real, c.imag))


def format_spec(spec: MeasurementSpec, tol: float | None = None) -> str:
    lines = [f"dim = {spec.dim}"]
    if tol is not None:
        lines.append(f"tol = {tol:g}")
    for probe, output, nu in spec.entries:
        lines.append(f"entry = {nu:.17g} ; {_format_state(probe)} ; {_format_state(output)}")
    return "\n".join(lines) + "\n"


def parse_state_text(text: str, dim: int, tol: float = DEFAULT_TOL) -> DensityMatrix:
    rows = [(lineno, _strip(line)) for lineno, line in enumerate(text.splitlines(), start=1)]
    rows = [(n, body) for n, body in rows if body]
    if len(rows) == 1:
        lineno, body = rows[0]
        v = _normalize(_parse_complex(body, dim, lineno), tol, "input", lineno)
        return DensityMatrix(np.outer(v, v.conj()))
    if len(rows) == dim:
        m = np.array([_parse_complex(body, dim, n) for n, body in rows])
        try:
            return DensityMatrix(m, hermitian_tol=tol, trace_tol=tol, eigen_tol=tol)
        except ValueError as exc:
            raise SpecFileError(f"invalid density matrix: {exc}") from None
    raise SpecFileError(f"state file needs 1 line (vector) or {dim} lines (density matrix), got {len(rows)}")


def read_state_file(path, dim: int, tol: float = DEFAULT_TOL) -> DensityMatrix:
    with open(path, encoding="utf-8") as fh:
        return parse_state_text(fh.read(), dim, tol)
