"""Command-line front end: binds run configurations to experiments and writes
plot-ready CSV/JSON outputs plus a reproducibility manifest.

Output schemas (column order fixed, floats written with 17 significant digits):

    records.csv       sample_seed,dq_abs,k0,b,b_prime,delta
    theta_sweep.csv   theta,gamma_mean,gamma_stderr,b_mean,b_stderr,n_kept,n_trimmed
    defect_sweep.csv  d,gamma_mean,gamma_stderr,b_mean,b_stderr,q_mean,q_stderr,n_kept,n_trimmed
    summary.json      scatter-run headline numbers (violation counts, b, b')
    stats.json        Weibull fit parameters and the chaos parameter
    manifest.json     resolved configuration, seeds, RNG id, output digests

Exit codes: 0 success, 2 configuration/validation error, 3 bound-violation
detected by `check`.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .curvature import ensemble_deltaQ_ratios
from .ensembles import RNG_ALGORITHM, EnsembleKind, EnsembleSpec, sample, spawn_seed
from .experiments import (
    ExperimentError,
    RunManifest,
    scatter_bound_test,
    sweep_defect,
    sweep_theta,
)
from .level_stats import (
    UnfoldingError,
    gamma_chaos,
    pool_spacing_samples,
    spacing_sample_from_levels,
    weibull_fit,
)
from .models import (
    MODEL_D_CHAOTIC_SCALE,
    MODEL_D_DEFAULT_DIM,
    MODEL_E_DEFAULT_FIELD,
    ModelConfig,
    model_d,
    model_e,
    sector_eigenvalues,
    sz_sector_indices,
)

__all__ = ["main", "entry_point"]

A_CHOICES = ("1/2^N", "1/N")


class CliError(Exception):
    """Configuration problem; maps to exit code 2."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path: Path, header: list, rows: list) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _resolve_a_value(a_choice: str, n_qubits: int) -> float:
    if a_choice == "1/2^N":
        return 2.0**-n_qubits
    if a_choice == "1/N":
        return 1.0 / n_qubits
    raise CliError(f"unknown a-choice {a_choice!r}; expected one of {A_CHOICES}")


def _write_manifest(out_dir: Path, master_seed: int, config: dict, outputs: list) -> None:
    manifest = RunManifest(
        tool_version=__version__,
        created_utc=datetime.datetime.now(datetime.timezone.utc).isoformat(),
        master_seed=master_seed,
        rng_algorithm=RNG_ALGORITHM,
        config=config,
        outputs={p.name: _sha256(p) for p in outputs},
    )
    _write_json(out_dir / "manifest.json", manifest.to_dict())


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("QCBOUND_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise CliError(f"QCBOUND_THREADS={env!r} is not an integer") from None
    return 1


def _load_config_file(args) -> None:
    """Fill argparse namespace from a JSON config; explicit flags win."""
    if not getattr(args, "config", None):
        return
    try:
        payload = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config file {args.config}: {exc}") from exc
    if not isinstance(payload, dict):
        raise CliError("config file must hold a JSON object")
    reserved = {"func", "defaults", "config", "subcommand"}
    for key, value in payload.items():
        dest = key.replace("-", "_")
        if dest in reserved or not hasattr(args, dest):
            raise CliError(f"unknown config key {key!r}")
        if getattr(args, dest) is None:
            setattr(args, dest, value)
    return


def _apply_defaults(args, defaults: dict) -> None:
    for dest, value in defaults.items():
        if getattr(args, dest, None) is None:
            setattr(args, dest, value)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

CHECK_DEFAULTS = {
    "qubits": None,  # family-dependent, resolved below
    "ensemble": "GUE",
    "samples": 3000,
    "seed": 0,
    "out": ".",
    "a_choice": "1/2^N",
    "a_coeffs": "0.1,0.2,0.3",
    "lam": 0.5,
}


def _cmd_check(args) -> int:
    _apply_defaults(args, CHECK_DEFAULTS)
    if args.samples is None or args.samples < 1:
        raise CliError("--samples must be a positive integer")
    if isinstance(args.a_coeffs, (list, tuple)):
        coeffs = tuple(float(v) for v in args.a_coeffs)
    else:
        coeffs = tuple(float(v) for v in str(args.a_coeffs).split(","))
    config = ModelConfig(
        family=args.model,
        n_qubits=args.qubits or 0,
        ensemble=args.ensemble,
        a_coeffs=coeffs,
        lam=float(args.lam),
    )
    a_value = _resolve_a_value(args.a_choice, config.n_qubits)
    result = scatter_bound_test(
        config,
        samples=args.samples,
        master_seed=args.seed,
        a_value=a_value,
        threads=_threads(args),
    )
    out = _out_dir(args)
    records_path = out / "records.csv"
    _write_csv(
        records_path,
        ["sample_seed", "dq_abs", "k0", "b", "b_prime", "delta"],
        [
            [str(r.seed), _fmt(r.dq_abs), _fmt(r.k0), _fmt(r.b), _fmt(r.b_prime), _fmt(r.delta)]
            for r in result.records
        ],
    )
    summary_path = out / "summary.json"
    _write_json(
        summary_path,
        {
            "model": result.model_tag,
            "samples_requested": args.samples,
            "samples_recorded": len(result.records),
            "rejected": result.n_rejected,
            "violations_b": result.violations_b,
            "violations_b_prime": result.violations_b_prime,
            "b": result.b,
            "b_prime": result.b_prime,
            "a_choice": args.a_choice,
        },
    )
    config_dict = {
        "subcommand": "check",
        "model": config.to_dict(),
        "samples": args.samples,
        "a_choice": args.a_choice,
    }
    _write_manifest(out, args.seed, config_dict, [records_path, summary_path])
    print(
        f"{result.model_tag}: {len(result.records)} samples, "
        f"violations_b={result.violations_b}, "
        f"violations_b_prime={result.violations_b_prime}"
    )
    if result.violations_b > 0:
        print("bound violation detected: |dQ0/dtau| exceeded b sqrt|K0|", file=sys.stderr)
        return 3
    return 0


SWEEP_THETA_DEFAULTS = {
    "points": 16,
    "realizations": 100,
    "dim": MODEL_D_DEFAULT_DIM,
    "chaotic_scale": MODEL_D_CHAOTIC_SCALE,
    "seed": 0,
    "out": ".",
    "unfold_degree": 6,
    "unfold_trim": 0.05,
    "outlier_k": 1.5,
    "gamma_mode": "pooled",
}


def _cmd_sweep_theta(args) -> int:
    _apply_defaults(args, SWEEP_THETA_DEFAULTS)
    if args.points < 2:
        raise CliError("--points must be at least 2")
    if args.realizations < 4:
        raise CliError("--realizations must be at least 4 (outlier trimming)")
    grid = np.linspace(0.0, math.pi / 2.0, args.points)
    rows = sweep_theta(
        grid,
        realizations=args.realizations,
        master_seed=args.seed,
        dim=args.dim,
        chaotic_scale=args.chaotic_scale,
        poly_degree=args.unfold_degree,
        edge_trim=args.unfold_trim,
        outlier_k=args.outlier_k,
        per_realization_gamma=(args.gamma_mode == "per-realization"),
        threads=_threads(args),
    )
    out = _out_dir(args)
    csv_path = out / "theta_sweep.csv"
    _write_csv(
        csv_path,
        ["theta", "gamma_mean", "gamma_stderr", "b_mean", "b_stderr", "n_kept", "n_trimmed"],
        [
            [_fmt(r.param), _fmt(r.gamma_mean), _fmt(r.gamma_stderr),
             _fmt(r.b_mean), _fmt(r.b_stderr), str(r.n_kept), str(r.n_trimmed)]
            for r in rows
        ],
    )
    config_dict = {
        "subcommand": "sweep-theta",
        "points": args.points,
        "realizations": args.realizations,
        "dim": args.dim,
        "chaotic_scale": args.chaotic_scale,
        "unfolding": {"degree": args.unfold_degree, "edge_trim": args.unfold_trim},
        "outlier_k": args.outlier_k,
        "gamma_mode": args.gamma_mode,
    }
    _write_manifest(out, args.seed, config_dict, [csv_path])
    print(f"theta sweep: {len(rows)} rows -> {csv_path}")
    return 0


SWEEP_DEFECT_DEFAULTS = {
    "points": 26,
    "d_max": 2.5,
    "realizations": 100,
    "qubits": 9,
    "h": MODEL_E_DEFAULT_FIELD,
    "coupling": 1.0,
    "seed": 0,
    "out": ".",
    "unfold_degree": 6,
    "unfold_trim": 0.05,
    "outlier_k": 1.5,
    "gamma_mode": "pooled",
    "sector": "restricted",
}


def _cmd_sweep_defect(args) -> int:
    _apply_defaults(args, SWEEP_DEFECT_DEFAULTS)
    if args.points < 2:
        raise CliError("--points must be at least 2")
    if args.d_max <= 0:
        raise CliError("--d-max must be positive")
    if args.realizations < 4:
        raise CliError("--realizations must be at least 4 (outlier trimming)")
    grid = np.linspace(0.0, args.d_max, args.points)
    rows = sweep_defect(
        grid,
        realizations=args.realizations,
        n_qubits=args.qubits,
        h=args.h,
        J=args.coupling,
        master_seed=args.seed,
        sector_restricted=(args.sector == "restricted"),
        poly_degree=args.unfold_degree,
        edge_trim=args.unfold_trim,
        outlier_k=args.outlier_k,
        per_realization_gamma=(args.gamma_mode == "per-realization"),
        threads=_threads(args),
    )
    out = _out_dir(args)
    csv_path = out / "defect_sweep.csv"
    _write_csv(
        csv_path,
        ["d", "gamma_mean", "gamma_stderr", "b_mean", "b_stderr",
         "q_mean", "q_stderr", "n_kept", "n_trimmed"],
        [
            [_fmt(r.param), _fmt(r.gamma_mean), _fmt(r.gamma_stderr),
             _fmt(r.b_mean), _fmt(r.b_stderr), _fmt(r.q_mean), _fmt(r.q_stderr),
             str(r.n_kept), str(r.n_trimmed)]
            for r in rows
        ],
    )
    config_dict = {
        "subcommand": "sweep-defect",
        "points": args.points,
        "d_max": args.d_max,
        "realizations": args.realizations,
        "n_qubits": args.qubits,
        "h": args.h,
        "J": args.coupling,
        "sector": args.sector,
        "unfolding": {"degree": args.unfold_degree, "edge_trim": args.unfold_trim},
        "outlier_k": args.outlier_k,
        "gamma_mode": args.gamma_mode,
    }
    _write_manifest(out, args.seed, config_dict, [csv_path])
    print(f"defect sweep: {len(rows)} rows -> {csv_path}")
    return 0


STATS_DEFAULTS = {
    "dim": MODEL_D_DEFAULT_DIM,
    "draws": 100,
    "theta": math.pi / 2.0,
    "d_value": 0.25,
    "qubits": 9,
    "h": MODEL_E_DEFAULT_FIELD,
    "coupling": 1.0,
    "seed": 0,
    "out": ".",
    "unfold_degree": 6,
    "unfold_trim": 0.05,
    "sector": "restricted",
}

STATS_SOURCES = ("GOE", "GUE", "PoissonDiagonal", "D", "E")


def _cmd_stats(args) -> int:
    _apply_defaults(args, STATS_DEFAULTS)
    if args.draws < 1:
        raise CliError("--draws must be positive")
    samples = []
    n_failed = 0
    for i in range(args.draws):
        seed = spawn_seed(args.seed, i)
        if args.source in ("GOE", "GUE", "PoissonDiagonal"):
            spec = EnsembleSpec(EnsembleKind(args.source), args.dim)
            eigs = np.linalg.eigvalsh(sample(spec, seed).matrix)
        elif args.source == "D":
            eigs = np.linalg.eigvalsh(model_d(args.theta, seed, dim=args.dim).matrix)
        else:  # E
            ham = model_e(n_qubits=args.qubits, d=args.d_value, h=args.h,
                          J=args.coupling, seed=seed)
            if args.sector == "restricted":
                eigs = sector_eigenvalues(ham, sz_sector_indices(args.qubits))
            else:
                eigs = np.linalg.eigvalsh(ham.matrix)
        try:
            samples.append(
                spacing_sample_from_levels(
                    eigs, source=args.source,
                    poly_degree=args.unfold_degree, edge_trim=args.unfold_trim,
                )
            )
        except UnfoldingError as exc:
            n_failed += 1
            print(f"draw {i} skipped: {exc}", file=sys.stderr)
    if n_failed > args.draws // 2:
        raise CliError(f"{n_failed}/{args.draws} draws failed to unfold")
    pooled = pool_spacing_samples(samples, source=f"{args.source} pooled")
    fit = weibull_fit(pooled)
    gamma = gamma_chaos(fit)
    out = _out_dir(args)
    stats_path = out / "stats.json"
    _write_json(
        stats_path,
        {
            "source": args.source,
            "draws": args.draws,
            "draws_failed": n_failed,
            "n_spacings": fit.n_samples,
            "weibull_a": fit.a,
            "weibull_c": fit.c,
            "log_likelihood": fit.log_likelihood,
            "n_floored": fit.n_floored,
            "gamma": gamma,
        },
    )
    config_dict = {
        "subcommand": "stats",
        "source": args.source,
        "draws": args.draws,
        "dim": args.dim,
        "theta": args.theta,
        "d_value": args.d_value,
        "n_qubits": args.qubits,
        "h": args.h,
        "J": args.coupling,
        "sector": args.sector,
        "unfolding": {"degree": args.unfold_degree, "edge_trim": args.unfold_trim},
    }
    _write_manifest(out, args.seed, config_dict, [stats_path])
    print(f"{args.source}: weibull a={fit.a:.5f} c={fit.c:.5f} gamma={gamma:.5f}")
    return 0


REPORT_DEFAULTS = {"seed": 0, "out": "."}


def _cmd_report_ensembles(args) -> int:
    _apply_defaults(args, REPORT_DEFAULTS)
    report = ensemble_deltaQ_ratios()
    print(f"<sqrt|K|> GOE = {report.mean_sqrtK_goe:.6f}")
    print(f"<sqrt|K|> GUE = {report.mean_sqrtK_gue:.6f}")
    print(f"<sqrt|K|> GSE = {report.mean_sqrtK_gse:.6f}")
    print(f"DQ_GOE/DQ_GUE = {report.ratio_goe_gue:.2f}")
    print(f"DQ_GOE/DQ_GSE = {report.ratio_goe_gse:.2f}")
    out = _out_dir(args)
    _write_manifest(out, args.seed, {"subcommand": "report-ensembles"}, [])
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    p.add_argument("--out", type=str, default=None, help="output directory (default .)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker cap (falls back to QCBOUND_THREADS, then 1)")
    p.add_argument("--config", type=str, default=None,
                   help="JSON config file mirroring the flags; flags win on conflict")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcbound",
        description="Entanglement-rate curvature bound: scatter tests, chaos sweeps, reports.",
    )
    parser.add_argument("--version", action="version", version=f"qcbound {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("check", help="scatter test of the bound over perturbation draws")
    p.add_argument("--model", required=True, choices=["A", "B", "C"])
    p.add_argument("--qubits", type=int, default=None)
    p.add_argument("--ensemble", choices=["GOE", "GUE"], default=None,
                   help="perturbation ensemble for model C")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--a-choice", dest="a_choice", choices=list(A_CHOICES), default=None)
    p.add_argument("--a-coeffs", dest="a_coeffs", type=str, default=None,
                   help="model A field coefficients, comma separated")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="model A coupling strength")
    _add_common(p)
    p.set_defaults(func=_cmd_check, defaults=CHECK_DEFAULTS)

    p = sub.add_parser("sweep-theta", help="chaos/bound sweep of the Poisson-GOE rotation")
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--realizations", type=int, default=None)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--chaotic-scale", dest="chaotic_scale", type=float, default=None)
    p.add_argument("--unfold-degree", dest="unfold_degree", type=int, default=None)
    p.add_argument("--unfold-trim", dest="unfold_trim", type=float, default=None)
    p.add_argument("--outlier-k", dest="outlier_k", type=float, default=None)
    p.add_argument("--gamma-mode", dest="gamma_mode",
                   choices=["pooled", "per-realization"], default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_sweep_theta, defaults=SWEEP_THETA_DEFAULTS)

    p = sub.add_parser("sweep-defect", help="chaos/bound/entanglement sweep of the defect chain")
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--d-max", dest="d_max", type=float, default=None)
    p.add_argument("--realizations", type=int, default=None)
    p.add_argument("--qubits", type=int, default=None)
    p.add_argument("--h", type=float, default=None, help="homogeneous field")
    p.add_argument("--J", dest="coupling", type=float, default=None, help="bond coupling")
    p.add_argument("--sector", choices=["restricted", "full"], default=None,
                   help="spacing statistics within the largest sigma_z sector or the full spectrum")
    p.add_argument("--unfold-degree", dest="unfold_degree", type=int, default=None)
    p.add_argument("--unfold-trim", dest="unfold_trim", type=float, default=None)
    p.add_argument("--outlier-k", dest="outlier_k", type=float, default=None)
    p.add_argument("--gamma-mode", dest="gamma_mode",
                   choices=["pooled", "per-realization"], default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_sweep_defect, defaults=SWEEP_DEFECT_DEFAULTS)

    p = sub.add_parser("stats", help="spacing-distribution fit and chaos parameter")
    p.add_argument("--source", required=True, choices=list(STATS_SOURCES))
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--draws", type=int, default=None)
    p.add_argument("--theta", type=float, default=None, help="rotation angle for source D")
    p.add_argument("--d-value", dest="d_value", type=float, default=None,
                   help="defect strength for source E")
    p.add_argument("--qubits", type=int, default=None)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--J", dest="coupling", type=float, default=None)
    p.add_argument("--sector", choices=["restricted", "full"], default=None)
    p.add_argument("--unfold-degree", dest="unfold_degree", type=int, default=None)
    p.add_argument("--unfold-trim", dest="unfold_trim", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_stats, defaults=STATS_DEFAULTS)

    p = sub.add_parser("report-ensembles", help="mean sqrt-curvature ratios across ensembles")
    _add_common(p)
    p.set_defaults(func=_cmd_report_ensembles, defaults=REPORT_DEFAULTS)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _load_config_file(args)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ExperimentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry_point() -> None:  # pragma: no cover - thin wrapper
    raise SystemExit(main())
