"""Command-line surface: build, verify, and export artifacts.

Subcommands
    arrange    exact arrangement as JSON
    critical   critical/indeterminacy points and value groups as JSON
    matrix     intersection matrix as CSV, or cycle catalog + radical as JSON
    orbit      monodromy orbit verification report as JSON
    integrate  randomized center-vanishing report as JSON
    verify     full pipeline for d = 1..d_max; JSON report, CSV summary and
               one arrangement figure per degree
    plot       arrangement figure (SVG)

Exit codes: 0 all good, 1 verification failures, 2 bad configuration,
3 internal/numerical error.  MONODROMY_LAB_THREADS caps worker threads for
the integral trials.  Reports are byte-deterministic for a fixed
configuration and seed; timings go to the console only.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .arrangement import arrangement_to_json, genericity_check
from .critical import count_summary, critical_to_json
from .cycles import (
    alternating_line_sums,
    catalog_to_json,
    center_pair_consistency,
    matrix_to_csv,
    radical,
    rank_of_block,
)
from .errors import InvalidParameterError, MonodromyLabError
from .integrals import (
    ExactDifferential,
    FDifferential,
    Poly2,
    check_center_vanishing,
    form_scale,
    integrate,
    trace_oval,
)
from .jsonio import dump_json, fmt_float, frac_str
from .linalg import exact_det
from .monodromy import monodromy_generators, preserves_pairing, verify_orbit_generation
from .pipeline import FibrationData, build_pipeline
from .plotting import arrangement_figure

D_MAX_DEFAULT = 5

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_INTERNAL = 3


@dataclass
class RunConfig:
    command: str
    d: int = 2
    d_max: int = D_MAX_DEFAULT
    epsilon: Fraction = Fraction(0)
    seed: int = 0
    s: float = 0.1
    trials: int = 20
    fmt: str = "json"
    out: str | None = None
    tolerance_overrides: dict = field(default_factory=dict)


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidParameterError(f"not a rational number: {text!r}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monodromy-lab",
        description="Arrangements, vanishing cycles, monodromy orbits and "
                    "Abelian integrals for the generic line family.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_d=True):
        if with_d:
            p.add_argument("--d", type=int, default=2, help="degree parameter (default 2)")
        p.add_argument("--d-max", type=int, default=D_MAX_DEFAULT,
                       help=f"largest allowed degree (default {D_MAX_DEFAULT})")
        p.add_argument("--epsilon", type=str, default="0",
                       help="rational perturbation p/q of the last line (default 0)")
        p.add_argument("--seed", type=int, default=0, help="seed for random draws")
        p.add_argument("--format", dest="fmt", choices=("json", "csv", "svg"),
                       default=None, help="output format")
        p.add_argument("--out", type=str, default=None, help="output path")
        p.add_argument("--s", type=str, default="0.1",
                       help="oval offset fraction in (0, 1/2] (default 0.1)")
        p.add_argument("--trials", type=int, default=20,
                       help="random form draws per center (default 20)")

    for name, help_text in (
        ("arrange", "build the exact arrangement"),
        ("critical", "locate and classify all critical points"),
        ("matrix", "export the intersection matrix or cycle catalog"),
        ("orbit", "verify monodromy orbit generation"),
        ("integrate", "run the randomized center-vanishing check"),
        ("plot", "render the arrangement figure"),
    ):
        common(sub.add_parser(name, help=help_text))
    common(sub.add_parser("verify", help="run every check for d = 1..d_max"), with_d=False)
    return parser


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig(
        command=args.command,
        d=getattr(args, "d", 1),
        d_max=args.d_max,
        epsilon=_parse_fraction(args.epsilon),
        seed=args.seed,
        s=float(_parse_fraction(args.s)),
        trials=args.trials,
        fmt=args.fmt or ("svg" if args.command == "plot" else "json"),
        out=args.out,
    )
    if cfg.d_max < 1:
        raise InvalidParameterError(f"--d-max must be >= 1, got {cfg.d_max}")
    if cfg.command != "verify" and not 1 <= cfg.d <= cfg.d_max:
        raise InvalidParameterError(f"--d must be in 1..{cfg.d_max}, got {cfg.d}")
    if not 0 < cfg.s <= 0.5:
        raise InvalidParameterError(f"--s must be in (0, 1/2], got {cfg.s}")
    if cfg.trials < 1:
        raise InvalidParameterError(f"--trials must be >= 1, got {cfg.trials}")
    if cfg.command == "integrate" and cfg.d < 2:
        raise InvalidParameterError("no center singularities exist for d < 2")
    if cfg.command == "plot" and cfg.fmt != "svg":
        raise InvalidParameterError(f"plot supports --format svg, got {cfg.fmt}")
    return cfg


def _emit(text: str, out: str | None, default_name: str | None = None) -> None:
    if out is None and default_name is None:
        sys.stdout.write(text)
        return
    path = Path(out or default_name)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    print(f"wrote {path}")


def emit_report(report: dict, path: str | Path) -> Path:
    """Write a report as deterministic JSON (sorted keys, fixed layout)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dump_json(report, path)
    return path


# --- verification -------------------------------------------------------------

def _check(name: str, expected, actual) -> dict:
    return {"name": name, "expected": expected, "actual": actual,
            "pass": expected == actual}


def _verify_degree(d: int, cfg: RunConfig) -> tuple[dict, FibrationData]:
    data = build_pipeline(d, cfg.epsilon)
    checks: list[dict] = []

    rep = genericity_check(data.arr)
    checks.append(_check("genericity_empty", True,
                         not rep["parallel_pairs"] and not rep["concurrent_triples"]))

    n_lines = 2 * d + 2
    summary = count_summary(data.arr, data.points, data.indeterminacy)
    checks.append(_check("vertex_count", n_lines * (n_lines - 1) // 2, len(data.arr.vertices)))
    checks.append(_check("type1_count", d * (d + 1), summary["type1"]))
    checks.append(_check("type2_count", d * (d - 1), summary["type2"]))
    checks.append(_check("type3_count", d * d, summary["type3"]))
    checks.append(_check("total_critical", 3 * d * d, summary["total"]))
    checks.append(_check("indeterminacy_count", (d + 1) ** 2, summary["indeterminacy"]))
    checks.append(_check("p_face_count", d * (d - 1) // 2, len(data.p_sub.bounded_faces)))
    checks.append(_check("q_face_count", d * (d - 1) // 2, len(data.q_sub.bounded_faces)))
    checks.append(_check("h1_dim_identity", d * (2 * d + 1),
                         3 * d * d - summary["boundary_kernel_dim"]))

    if d == 1:
        checks.append(_check("d1_cycle_catalog", ["deltaP_1", "deltaQ_1", "sigma_1"],
                             [c.name for c in data.cycles]))
        checks.append(_check("d1_zero_matrix", True,
                             all(v == 0 for row in data.matrix.entries for v in row)))

    checks.append(_check("rank_P", d * (d - 1), rank_of_block(data.matrix, "P")))
    checks.append(_check("rank_Q", d * (d - 1), rank_of_block(data.matrix, "Q")))
    checks.append(_check("radical_dim", 3 * d * d - 2 * d * (d - 1),
                         len(radical(data.matrix))))
    checks.append(_check("line_sums_in_radical", True,
                         all(r["in_radical"] and r["in_radical_reversed"]
                             for r in alternating_line_sums(
                                 data.arr, data.cycles, data.points, data.matrix))))

    orbit_rep = verify_orbit_generation(data.matrix, data.cycles, data.groups, data.points)
    checks.append(_check("orbit_quotient_ranks", True, orbit_rep["pass"]))

    gens = monodromy_generators(data.matrix, data.cycles, data.groups)
    checks.append(_check("operators_preserve_pairing", True,
                         all(preserves_pairing(op, data.matrix) for op in gens)))
    checks.append(_check("operators_unimodular", True,
                         all(abs(exact_det(op.matrix)) == 1 for op in gens)))

    integral_rep = None
    if 2 <= d <= 3:
        tol = cfg.tolerance_overrides
        integral_rep = check_center_vanishing(
            data.arr, data.points, trials=cfg.trials, seed=cfg.seed, s=cfg.s,
            vanish_tol=tol.get("vanish_tol", 1e-6),
            control_tol=tol.get("control_tol", 1e-3))
        checks.append(_check("center_vanishing", True, integral_rep["pass"]))

        center = data.points[
            next(i for i, p in enumerate(data.points) if p.kind in ("CenterP", "CenterQ"))]
        trace = trace_oval(data.arr, data.points, center, s=cfg.s)
        quad_tol = cfg.tolerance_overrides.get("quad_tol", 1e-8)
        df_form = FDifferential(data.arr)
        dg_form = ExactDifferential(data.arr, Poly2({(1, 0): 1, (0, 1): -2, (1, 1): 1}))
        df_val, _ = integrate(df_form, trace)
        dg_val, _ = integrate(dg_form, trace)
        checks.append(_check("quadrature_dF_vanishes", True,
                             abs(df_val) <= quad_tol * max(1.0, form_scale(df_form, trace))))
        checks.append(_check("quadrature_dG_vanishes", True,
                             abs(dg_val) <= quad_tol * max(1.0, form_scale(dg_form, trace))))

    section = {
        "d": d,
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
        "orbit": orbit_rep,
        "value_group_count": len(data.groups),
        "center_pair_diagnostic": center_pair_consistency(
            data.matrix, data.cycles, data.points),
    }
    if integral_rep is not None:
        section["integral_summary"] = {
            "pass": integral_rep["pass"],
            "centers": [
                {"kind": c["kind"], "t": c["t"],
                 "log_pass_count": c["log_pass_count"],
                 "control_nonzero_count": c["control_nonzero_count"],
                 "winding_all_zero": c["winding_all_zero"]}
                for c in integral_rep["centers"]
            ],
        }
    return section, data


def _cmd_verify(cfg: RunConfig) -> int:
    out_dir = Path(cfg.out or "reports")
    sections = []
    all_pass = True
    for d in range(1, cfg.d_max + 1):
        t0 = time.perf_counter()
        section, data = _verify_degree(d, cfg)
        elapsed = time.perf_counter() - t0
        sections.append(section)
        all_pass = all_pass and section["pass"]
        for c in section["checks"]:
            status = "PASS" if c["pass"] else "FAIL"
            print(f"[{status}] d={d} {c['name']}: expected {c['expected']}, got {c['actual']}")
        print(f"d={d} done in {elapsed:.2f}s")
        arrangement_figure(data.arr, data.points, data.indeterminacy,
                           out_dir / f"arrangement_d{d}.svg", fmt="svg")

    report = {
        "config": {
            "d_max": cfg.d_max,
            "epsilon": frac_str(cfg.epsilon),
            "seed": cfg.seed,
            "s": fmt_float(cfg.s),
            "trials": cfg.trials,
        },
        "sections": sections,
        "pass": all_pass,
    }
    emit_report(report, out_dir / "verification_report.json")

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["d", "check", "expected", "actual", "pass"])
    for section in sections:
        for c in section["checks"]:
            writer.writerow([section["d"], c["name"], c["expected"], c["actual"], c["pass"]])
    (out_dir / "verify_summary.csv").write_text(buf.getvalue())

    print(f"wrote {out_dir / 'verification_report.json'}")
    print(f"wrote {out_dir / 'verify_summary.csv'}")
    print("overall:", "PASS" if all_pass else "FAIL")
    return EXIT_OK if all_pass else EXIT_VERIFY_FAILED


def _flat_integral_runs(rep: dict) -> list[dict]:
    runs = []
    for c in rep["centers"]:
        center = {"kind": c["kind"], "x": c["x"], "y": c["y"], "value": c["value"]}
        for trial in c["log_trials"] + c["control_trials"]:
            runs.append({
                "d": rep["d"],
                "center": center,
                "t": c["t"],
                "form": trial["form"],
                "integral": trial["integral"],
                "error_estimate": trial["error_estimate"],
                "pass": trial.get("pass", trial.get("nonzero")),
            })
    return runs


def _dispatch(cfg: RunConfig) -> int:
    if cfg.command == "verify":
        return _cmd_verify(cfg)

    if cfg.command == "plot":
        data = build_pipeline(cfg.d, cfg.epsilon)
        out = cfg.out or f"arrangement_d{cfg.d}.svg"
        path = arrangement_figure(data.arr, data.points, data.indeterminacy, out, cfg.fmt)
        print(f"wrote {path}")
        return EXIT_OK

    if cfg.command == "arrange":
        data = build_pipeline(cfg.d, cfg.epsilon)
        doc = arrangement_to_json(data.arr)
        doc["genericity"] = genericity_check(data.arr)
        _emit(dump_json(doc), cfg.out)
        return EXIT_OK

    if cfg.command == "critical":
        data = build_pipeline(cfg.d, cfg.epsilon)
        doc = critical_to_json(data.points, data.indeterminacy, data.groups)
        doc["counts"] = count_summary(data.arr, data.points, data.indeterminacy)
        _emit(dump_json(doc), cfg.out)
        return EXIT_OK

    if cfg.command == "matrix":
        data = build_pipeline(cfg.d, cfg.epsilon)
        if cfg.fmt == "csv":
            _emit(matrix_to_csv(data.matrix, data.cycles), cfg.out)
        else:
            doc = catalog_to_json(data.matrix, data.cycles, data.points)
            doc["line_sums"] = alternating_line_sums(
                data.arr, data.cycles, data.points, data.matrix)
            _emit(dump_json(doc), cfg.out)
        return EXIT_OK

    if cfg.command == "orbit":
        data = build_pipeline(cfg.d, cfg.epsilon)
        rep = verify_orbit_generation(data.matrix, data.cycles, data.groups, data.points)
        _emit(dump_json(rep), cfg.out)
        return EXIT_OK if rep["pass"] else EXIT_VERIFY_FAILED

    if cfg.command == "integrate":
        data = build_pipeline(cfg.d, cfg.epsilon)
        rep = check_center_vanishing(data.arr, data.points, trials=cfg.trials,
                                     seed=cfg.seed, s=cfg.s)
        doc = {
            "d": rep["d"], "seed": rep["seed"], "s": rep["s"],
            "trials": rep["trials"], "pass": rep["pass"],
            "runs": _flat_integral_runs(rep),
        }
        _emit(dump_json(doc), cfg.out)
        return EXIT_OK if rep["pass"] else EXIT_VERIFY_FAILED

    raise InvalidParameterError(f"unknown command {cfg.command!r}")


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
    except InvalidParameterError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _dispatch(cfg)
    except MonodromyLabError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - last-resort guard
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
