"""Command-line front-end.

Subcommands ``fig2``, ``fig3``, ``measure``, ``p1``, ``povm-check`` and
``verify``. Exit status: 0 success, 1 validation error, 2 failed check,
3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import information as info
from . import measurement as ms
from . import oracle
from .bloch import build_grid
from .qstate import partial_trace, von_neumann_entropy
from .randgen import random_dephasing, random_overcomplete
from .specfile import SpecFileError, read_spec_file, read_state_file

EXIT_OK, EXIT_VALIDATION, EXIT_CHECK, EXIT_IO = 0, 1, 2, 3

DEFAULTS = {
    "theta_nodes": 96,
    "phi_nodes": 48,
    "s_steps": 61,
    "q_steps": 101,
    "s_nodes": 24,
    "seed": 20050606,
}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def _grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--theta-nodes", type=int, default=DEFAULTS["theta_nodes"], help="Gauss-Legendre nodes in theta")
    p.add_argument("--phi-nodes", type=int, default=DEFAULTS["phi_nodes"], help="uniform nodes in phi")


def _out_args(p: argparse.ArgumentParser, default: str) -> None:
    p.add_argument("--out", default=default, help="CSV output path ('-' for stdout)")
    p.add_argument("--no-figure", action="store_true", help="skip the PNG rendered next to the CSV")
    p.add_argument("--workers", type=int, default=1, help="worker processes for the sweep")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdmeasure", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fig2", help="entanglement E(s, q) table")
    _grid_args(p)
    p.add_argument("--s-steps", type=int, default=DEFAULTS["s_steps"])
    p.add_argument("--q-steps", type=int, default=DEFAULTS["q_steps"])
    p.add_argument("--s", type=float, nargs="+", help="explicit s values (rad), overrides --s-steps")
    p.add_argument("--q", type=float, nargs="+", help="explicit q values, overrides --q-steps")
    _out_args(p, "fig2.csv")

    p = sub.add_parser("fig3", help="Holevo information curves I_A(q), I_B(q)")
    _grid_args(p)
    p.add_argument("--q-steps", type=int, default=DEFAULTS["q_steps"])
    p.add_argument("--q", type=float, nargs="+", help="explicit q values, overrides --q-steps")
    p.add_argument("--s-nodes", type=int, default=DEFAULTS["s_nodes"], help="ensemble polar-angle nodes")
    _out_args(p, "fig3.csv")

    p = sub.add_parser("measure", help="apply a measurement spec to an input state")
    p.add_argument("--spec", required=True, help="measurement spec file")
    p.add_argument("--state", required=True, help="state file (vector or density matrix)")
    p.add_argument("--tol", type=float, help="completeness tolerance (overrides the file's tol)")
    p.add_argument("--dephasing", choices=("coherent", "dequantized"), default="coherent")

    p = sub.add_parser("p1", help="closed-form p1(q) against quadrature")
    p.add_argument("--theta-nodes", type=int, default=128)
    p.add_argument("--q-steps", type=int, default=11)
    p.add_argument("--q", type=float, nargs="+", help="explicit q values")
    p.add_argument("--tol", type=float, default=1e-8, help="allowed closed-form/quadrature difference")
    p.add_argument("--out", default="-")

    p = sub.add_parser("povm-check", help="validate the POVM of a spec file")
    p.add_argument("--spec", required=True)
    p.add_argument("--tol", type=float, help="completeness tolerance (default: the file's tol)")

    p = sub.add_parser("verify", help="run the oracle cross-check suite")
    _grid_args(p)
    p.add_argument("--seed", type=int, default=DEFAULTS["seed"])
    p.add_argument("--tol", type=float, help="override every check tolerance")
    p.add_argument("--s", type=float, default=math.pi, help="input angle for --target-e")
    p.add_argument("--q", type=float, help="compression for --target-e")
    p.add_argument("--target-e", type=float, help="expected entanglement at (--s, --q)")
    p.add_argument("--samples", type=int, default=200_000, help="Monte-Carlo sample count")
    return parser


def _as_list(value) -> list:
    if value is None:
        return []
    return value if isinstance(value, list) else [value]


def validate(args) -> list[str]:
    """Collect every flag violation; nothing is computed before this passes."""
    errors = []

    def at_least(name, minimum):
        value = getattr(args, name, None)
        if value is not None and value < minimum:
            errors.append(f"--{name.replace('_', '-')} must be >= {minimum}, got {value}")

    at_least("theta_nodes", 2)
    at_least("phi_nodes", 1)
    at_least("s_steps", 2)
    at_least("q_steps", 2)
    at_least("s_nodes", 8)
    at_least("workers", 1)
    at_least("samples", 10_000)
    for value in _as_list(getattr(args, "q", None)):
        if not 0.0 <= value <= 1.0:
            errors.append(f"--q values must lie in [0, 1], got {value}")
    for value in _as_list(getattr(args, "s", None)):
        if not 0.0 <= value <= math.pi:
            errors.append(f"--s values must lie in [0, pi], got {value}")
    tol = getattr(args, "tol", None)
    if tol is not None and not tol > 0:
        errors.append(f"--tol must be positive, got {tol}")
    if args.command == "verify" and (args.target_e is None) != (args.q is None):
        errors.append("--target-e and --q must be given together")
    return errors


def _q_values(args) -> np.ndarray:
    return np.array(args.q) if args.q else np.linspace(0.0, 1.0, args.q_steps)


def _map(fn, items, workers: int):
    if workers == 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _fig2_point(task):
    s, q, nt, nphi = task
    return info.entanglement(s, q, build_grid(nt, nphi))


def _fig3_point(task):
    q, nt, nphi, s_nodes = task
    return info.holevo_point(q, build_grid(nt, nphi), s_nodes)


def _write_csv(path: str, header: list[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    if path == "-":
        sys.stdout.write(buf.getvalue())
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from None


def _figure_path(args) -> Path | None:
    if args.out == "-" or args.no_figure:
        return None
    return Path(args.out).with_suffix(".png")


def cmd_fig2(args) -> int:
    s_values = np.array(args.s) if args.s else np.linspace(0.0, math.pi, args.s_steps)
    q_values = _q_values(args)
    tasks = [(s, q, args.theta_nodes, args.phi_nodes) for s in s_values for q in q_values]
    e_bits = np.array(_map(_fig2_point, tasks, args.workers)).reshape(len(s_values), len(q_values))
    rows = ((s, q, e_bits[i, j]) for i, s in enumerate(s_values) for j, q in enumerate(q_values))
    _write_csv(args.out, ["s", "q", "E_bits"], rows)
    fig = _figure_path(args)
    if fig is not None:
        from .plotting import plot_entanglement_surface

        plot_entanglement_surface(s_values, q_values, e_bits, fig)
    return EXIT_OK


def cmd_fig3(args) -> int:
    q_values = _q_values(args)
    tasks = [(q, args.theta_nodes, args.phi_nodes, args.s_nodes) for q in q_values]
    points = _map(_fig3_point, tasks, args.workers)
    _write_csv(args.out, ["q", "I_A_bits", "I_B_bits"], ((p.q, p.I_A, p.I_B) for p in points))
    fig = _figure_path(args)
    if fig is not None:
        from .plotting import plot_holevo_curves

        plot_holevo_curves(q_values, [p.I_A for p in points], [p.I_B for p in points], fig)
    return EXIT_OK


def _load_spec(path: str):
    try:
        parsed = read_spec_file(path)
    except OSError as exc:
        raise CliError(f"cannot read spec {path}: {exc}", EXIT_IO) from None
    except SpecFileError as exc:
        raise CliError(f"{path}: {exc}", EXIT_VALIDATION) from None
    return parsed


def _matrix_lines(m: np.ndarray, indent: str = "  ") -> list[str]:
    return [indent + " ".join(f"({fmt(z.real)},{fmt(z.imag)})" for z in row) for row in m]


def cmd_measure(args) -> int:
    parsed = _load_spec(args.spec)
    try:
        spec = parsed.to_spec(args.tol)
    except ms.CompletenessError as exc:
        raise CliError(f"{args.spec}: {exc}", EXIT_VALIDATION) from None
    try:
        rho = read_state_file(args.state, spec.dim, parsed.tol if args.tol is None else args.tol)
    except OSError as exc:
        raise CliError(f"cannot read state {args.state}: {exc}", EXIT_IO) from None
    except SpecFileError as exc:
        raise CliError(f"{args.state}: {exc}", EXIT_VALIDATION) from None

    n = spec.n_entries
    r = ms.DephasingMatrix.coherent(n) if args.dephasing == "coherent" else ms.DephasingMatrix.dequantized(n)
    joint = ms.apply_dephased(spec, r, rho)
    rho_a = partial_trace(joint, (spec.dim, n), keep="A")
    rho_b = ms.contract_to_meter(spec, r, rho)
    probs = ms.outcome_distribution(spec, rho)

    out = [f"measurement: dim={spec.dim} entries={n} completeness_deviation={spec.completeness_deviation:.3e}"]
    out.append(f"dephasing: {args.dephasing}")
    out.append("outcome_distribution: " + " ".join(fmt(p) for p in probs))
    out.append("object_state:")
    out += _matrix_lines(rho_a.matrix)
    out.append("meter_state:")
    out += _matrix_lines(rho_b.matrix)
    out.append(f"object_entropy_bits: {fmt(von_neumann_entropy(rho_a))}")
    out.append(f"meter_entropy_bits: {fmt(von_neumann_entropy(rho_b))}")
    if args.dephasing == "coherent" and rho.purity() > 1 - 1e-10:
        out.append(f"entanglement_bits: {fmt(von_neumann_entropy(rho_a))}")
    print("\n".join(out))
    return EXIT_OK


def cmd_p1(args) -> int:
    grid = build_grid(args.theta_nodes, 1)
    rows, worst = [], 0.0
    for q in _q_values(args):
        closed = info.p1_closed_form(float(q))
        quad = info.post_measurement_object_state(math.pi, q, grid).matrix[0, 0].real
        worst = max(worst, abs(closed - quad))
        rows.append((q, closed, quad, abs(closed - quad)))
    _write_csv(args.out, ["q", "p1_closed", "p1_quadrature", "abs_diff"], rows)
    return EXIT_OK if worst <= args.tol else EXIT_CHECK


def cmd_povm_check(args) -> int:
    parsed = _load_spec(args.spec)
    tol = parsed.tol if args.tol is None else args.tol
    spec = parsed.to_spec(tol=math.inf)
    povm = ms.povm_elements(spec)
    dev = povm.completeness_deviation()
    lam_min = povm.min_eigenvalue()
    print(f"elements: {len(povm)}")
    print("traces: " + " ".join(fmt(np.trace(e).real) for e in povm.elements))
    print(f"min_eigenvalue: {lam_min:.3e}")
    print(f"completeness_deviation: {dev:.3e} (tol {tol:.1e})")
    ok = dev <= tol and lam_min >= -ms.PSD_TOL
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_CHECK


def verify_reports(args) -> list[oracle.OracleReport]:
    """The oracle suite behind ``pdmeasure verify``."""
    tol = args.tol
    grid = build_grid(args.theta_nodes, args.phi_nodes)
    rng = np.random.default_rng(args.seed)
    reports = []

    def t(default):
        return default if tol is None else tol

    # complete positivity: coherent, dequantized, and a random small overcomplete spec
    ent = ms.preset("entangling", 2)
    reports.append(oracle.choi_cp_check(ent, np.ones((2, 2)), tol=t(1e-12)))
    reports.append(oracle.choi_cp_check(ent, np.eye(2), tol=t(1e-12)))
    probes, weights = random_overcomplete(2, 3, rng)
    outputs = np.array([np.roll(p, 1) for p in probes])
    soft = ms.preset("soft", 2, probes=probes, outputs=outputs, weights=weights)
    reports.append(oracle.choi_cp_check(soft, random_dephasing(soft.n_entries, rng), tol=t(1e-10)))

    # Simpson refinement against the Gauss-Legendre production path
    reports += oracle.fine_grid_reference(
        "entanglement", {"s": math.pi, "q": 0.7978}, info.entanglement(math.pi, 0.7978, grid), tol=t(1e-6)
    )
    reports += oracle.fine_grid_reference("p1", {"q": 0.5}, info.p1_closed_form(0.5), tol=t(1e-8))
    for q in (0.0, 1.0):
        p = info.holevo_point(q, grid)
        reports += oracle.fine_grid_reference("holevo_pair", {"q": q}, (p.I_A, p.I_B), tol=t(1e-6))

    # Monte Carlo: statistical tolerance scales as N^-1/2 from 3e-3 at 1e6
    mc_tol = t(3e-3 * math.sqrt(1e6 / args.samples))
    for s, q in ((math.pi, 0.5), (math.pi / 2, 0.5), (math.pi, 1.0)):
        main = info.post_measurement_object_state(s, q, grid).matrix
        mc = oracle.mc_integrate_rho(s, q, args.samples, args.seed)
        k = np.unravel_index(np.argmax(np.abs(main - mc)), main.shape)
        reports.append(
            oracle.OracleReport(
                f"mc_object_state(s={s:.6g},q={q:.6g})[{k[0]},{k[1]}]",
                float(main[k].real),
                float(mc[k].real),
                float(np.abs(main - mc).max()),
                f"N={args.samples} seed={args.seed} worst entry",
                mc_tol,
            )
        )

    if args.target_e is not None:
        e = info.entanglement(args.s, args.q, grid)
        reports.append(
            oracle.OracleReport.compare(
                f"target_entanglement(s={args.s:.6g},q={args.q:.6g})",
                e,
                args.target_e,
                f"{args.theta_nodes}x{args.phi_nodes}",
                t(1e-3),
            )
        )
    return reports


def cmd_verify(args) -> int:
    reports = verify_reports(args)
    for r in reports:
        print(r.line())
    failed = sum(not r.passed for r in reports)
    print(f"{len(reports) - failed}/{len(reports)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK


COMMANDS = {
    "fig2": cmd_fig2,
    "fig3": cmd_fig3,
    "measure": cmd_measure,
    "p1": cmd_p1,
    "povm-check": cmd_povm_check,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    errors = validate(args)
    if errors:
        for e in errors:
            print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
