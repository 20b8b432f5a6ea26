"""Command-line frontend: build states, project, compute ladders, sweep noise.

Subcommands
-----------
``project``   one projection, JSON result to stdout
``measures``  full D_k / C_k ladder, JSON to stdout
``sweep``     white-noise sweep of a base state, CSV output
``validate``  state (and optional symmetry) validation, diagnostics only

Exit codes: 0 success, 2 on spec/validation errors, 3 when a projection
diverged (the best finite iterate is still printed).

State specs are inline JSON or ``@file.json``; see
:mod:`expfam.states` for the schema.  Symmetry specs take ``none``,
``auto-permutation`` or JSON like
``{"permutations": [[1,0,2]], "pauli": ["XXX"]}``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .measures import distance, interaction_ladder
from .pauli import num_qubits
from .projection import ProjectionConfig
from .states import StateValidationError, state_from_spec, validate_state, white_noise_mix
from .symmetry import (
    GroupTooLargeError,
    auto_permutation_generators,
    generate_group,
    is_invariant_state,
    parse_symmetry_spec,
)

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_DIVERGED = 3


class SpecError(Exception):
    """User-facing input error; maps to exit code 2."""


def _load_json_arg(text: str, what: str):
    raw = text
    if text.startswith("@"):
        try:
            with open(text[1:], "r", encoding="utf-8") as handle:
                raw = handle.read()
        except OSError as exc:
            raise SpecError(f"cannot read {what} file {text[1:]!r}: {exc}") from exc
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON for {what}: {exc}") from exc


def _build_state(spec_text: str) -> np.ndarray:
    spec = _load_json_arg(spec_text, "state spec")
    try:
        return state_from_spec(spec)
    except (StateValidationError, ValueError) as exc:
        raise SpecError(f"invalid state spec: {exc}") from exc


def _build_symmetry(symmetry_text: str | None, rho: np.ndarray):
    """Return (generators, group) or (None, None)."""
    if symmetry_text is None or symmetry_text == "none":
        return None, None
    n = num_qubits(rho.shape[0])
    if symmetry_text == "auto-permutation":
        generators = auto_permutation_generators(rho)
        if not generators:
            raise SpecError("state is not fully permutation symmetric; cannot auto-reduce")
    else:
        spec = _load_json_arg(symmetry_text, "symmetry spec")
        try:
            generators = parse_symmetry_spec(spec, n)
        except ValueError as exc:
            raise SpecError(f"invalid symmetry spec: {exc}") from exc
        if not is_invariant_state(rho, generators):
            raise SpecError("state is not invariant under the declared symmetry generators")
    try:
        group = generate_group(generators, n=n)
    except GroupTooLargeError as exc:
        raise SpecError(str(exc)) from exc
    return generators, group


def _config_from_args(args) -> ProjectionConfig:
    return ProjectionConfig(
        omega=args.omega,
        max_sweeps=args.max_sweeps,
        tol=args.tol,
        variance_floor=args.variance_floor,
        theta_cap=args.theta_cap,
    )


def _round_floats(obj, digits: int = 12):
    if isinstance(obj, float):
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, dict):
        return {key: _round_floats(value, digits) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(value, digits) for value in obj]
    return obj


def _emit(payload: dict, out_path: str | None) -> None:
    text = json.dumps(_round_floats(payload), indent=2, sort_keys=False)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--state", required=True, help="state spec: inline JSON or @file")
    parser.add_argument("--method", choices=("iterative", "dual", "both"), default="iterative")
    parser.add_argument("--symmetry", default="none",
                        help="'none', 'auto-permutation', inline JSON, or @file")
    parser.add_argument("--omega", type=float, default=None, help="underrelaxation in (0, 1]")
    parser.add_argument("--max-sweeps", type=int, default=None)
    parser.add_argument("--tol", type=float, default=1e-8, help="moment-residual tolerance")
    parser.add_argument("--variance-floor", type=float, default=1e-12,
                        help="skip updates whose term variance falls below this")
    parser.add_argument("--theta-cap", type=float, default=50.0,
                        help="flag a run as diverged when a coefficient passes this")
    parser.add_argument("--out", default=None, help="write output to a file instead of stdout")


def cmd_project(args) -> int:
    rho = _build_state(args.state)
    _, group = _build_symmetry(args.symmetry, rho)
    result = distance(rho, args.k, method=args.method, config=_config_from_args(args), symmetry=group)
    payload = result.to_dict()
    if args.emit_state and result.best is not None:
        payload["tau"] = [[[z.real, z.imag] for z in row] for row in result.best.tau]
    if args.history:
        for name, run in result.runs.items():
            payload["runs"][name]["history"] = [[r, d] for r, d in run.history]
    _emit(payload, args.out)
    diverged = any(run.diverged for run in result.runs.values())
    return EXIT_DIVERGED if diverged else EXIT_OK


def cmd_measures(args) -> int:
    rho = _build_state(args.state)
    _, group = _build_symmetry(args.symmetry, rho)
    ks = _parse_k_list(args.k_list) if args.k_list else None
    report = interaction_ladder(
        rho, config=_config_from_args(args), method=args.method, symmetry=group, ks=ks
    )
    _emit(report.to_dict(), args.out)
    diverged = any(diag.get("diverged") for diag in report.diagnostics.values())
    return EXIT_DIVERGED if diverged else EXIT_OK


def _parse_k_list(text: str) -> list:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise SpecError(f"invalid k list {text!r}") from exc


def _sweep_point(payload) -> dict:
    """One sweep row; module-level so process pools can pickle it."""
    (spec_text, symmetry_text, p, ks, method, omega, max_sweeps, tol, variance_floor, theta_cap) = payload
    base = _build_state(spec_text)
    rho = white_noise_mix(base, p)
    _, group = _build_symmetry(symmetry_text, rho)
    config = ProjectionConfig(
        omega=omega, max_sweeps=max_sweeps, tol=tol,
        variance_floor=variance_floor, theta_cap=theta_cap,
    )
    row = {"p": p, "status": "ok"}
    try:
        report = interaction_ladder(rho, config=config, method=method, symmetry=group, ks=ks)
    except Exception as exc:  # recorded per row; the sweep continues
        row["status"] = f"error:{exc}"
        return row
    n = report.n
    for k in range(1, n):
        if k in report.distances:
            row[f"D{k}"] = report.distances[k]
    for k, entry in report.interactions.items():
        row[f"C{k}"] = entry["difference"]
    for k, diag in report.diagnostics.items():
        row[f"residual_k{k}"] = diag["residual"]
        row[f"converged_k{k}"] = int(bool(diag["converged"]))
        row[f"sweeps_k{k}"] = diag["sweeps"]
        if diag["diverged"]:
            row["status"] = f"diverged:k={k}"
    return row


def cmd_sweep(args) -> int:
    base = _build_state(args.state)  # validates the spec before launching workers
    n = num_qubits(base.shape[0])
    if args.p_count < 1:
        raise SpecError("p grid needs at least one point")
    if not (0.0 <= args.p_start <= 1.0 and 0.0 <= args.p_stop <= 1.0):
        raise SpecError("p grid must lie within [0, 1]")
    _build_symmetry(args.symmetry, white_noise_mix(base, args.p_start))
    ks = _parse_k_list(args.k_list) if args.k_list else list(range(1, n))
    grid = np.linspace(args.p_start, args.p_stop, args.p_count)
    symmetry_text = None if args.symmetry == "none" else args.symmetry
    jobs = [
        (args.state, symmetry_text, float(p), ks, args.method,
         args.omega, args.max_sweeps, args.tol, args.variance_floor, args.theta_cap)
        for p in sorted(grid)
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(job) for job in jobs]

    columns = ["p"]
    columns += [f"D{k}" for k in range(1, n) if any(f"D{k}" in row for row in rows)]
    columns += [f"C{k}" for k in range(2, n + 1) if any(f"C{k}" in row for row in rows)]
    for k in ks:
        columns += [f"residual_k{k}", f"converged_k{k}", f"sweeps_k{k}"]
    columns.append("status")

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format_cell(row.get(col, "")) for col in columns])
    text = buffer.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _format_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def cmd_validate(args) -> int:
    spec = _load_json_arg(args.state, "state spec")
    try:
        rho = state_from_spec(spec)
        rho = validate_state(rho)
    except StateValidationError as exc:
        _emit({"valid": False, "violation": exc.violation, "detail": str(exc)}, args.out)
        return EXIT_SPEC
    except ValueError as exc:
        raise SpecError(f"invalid state spec: {exc}") from exc
    payload = {"valid": True, "n": num_qubits(rho.shape[0])}
    if args.symmetry != "none":
        try:
            _build_symmetry(args.symmetry, rho)
        except SpecError as exc:
            _emit({"valid": False, "violation": "symmetry", "detail": str(exc)}, args.out)
            return EXIT_SPEC
        payload["symmetry"] = "verified"
    _emit(payload, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expfam",
        description="Project density matrices onto k-local thermal-state families "
        "and compute the associated complexity measures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_project = sub.add_parser("project", help="project one state onto a single family")
    _add_common_flags(p_project)
    p_project.add_argument("--k", type=int, required=True, help="maximum interaction weight")
    p_project.add_argument("--emit-state", action="store_true", help="include the projected matrix")
    p_project.add_argument("--history", action="store_true", help="include per-sweep history")
    p_project.set_defaults(func=cmd_project)

    p_measures = sub.add_parser("measures", help="full distance/interaction ladder")
    _add_common_flags(p_measures)
    p_measures.add_argument("--k-list", default=None, help="comma-separated ladder rungs")
    p_measures.set_defaults(func=cmd_measures)

    p_sweep = sub.add_parser("sweep", help="white-noise sweep of a base state, CSV output")
    _add_common_flags(p_sweep)
    p_sweep.add_argument("--p-start", type=float, default=0.0)
    p_sweep.add_argument("--p-stop", type=float, default=1.0)
    p_sweep.add_argument("--p-count", type=int, default=11)
    p_sweep.add_argument("--k-list", default=None, help="comma-separated ladder rungs")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel workers for sweep points")
    p_sweep.set_defaults(func=cmd_sweep)

    p_validate = sub.add_parser("validate", help="validate a state spec (and symmetry)")
    p_validate.add_argument("--state", required=True)
    p_validate.add_argument("--symmetry", default="none")
    p_validate.add_argument("--out", default=None)
    p_validate.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except (StateValidationError, GroupTooLargeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
