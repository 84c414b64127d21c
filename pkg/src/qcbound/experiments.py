"""Experiment protocols: inequality scatter tests, theta sweeps, defect sweeps.

Seeding layout (see ensembles.RNG_ALGORITHM): a scatter run derives the base
Hamiltonian seed as spawn_seed(master, 0) and the i-th perturbation seed as
spawn_seed(master, i + 1); a sweep derives the seed of realization r at grid
index t as spawn_seed(master, t, r).  Results are reduced in task-index order,
so outputs are identical for any worker count.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .curvature import BoundRecord, bound_b, bound_b_prime, level_curvature
from .ensembles import spawn_seed
from .entanglement import EntanglementInputs, dQ0_dtau, ground_state_site_overlaps, mean_bipartite_Q
from .level_stats import (
    UnfoldingError,
    gamma_chaos,
    pool_spacing_samples,
    spacing_sample_from_levels,
    weibull_fit,
)
from .models import (
    MODEL_D_CHAOTIC_SCALE,
    MODEL_E_DEFAULT_FIELD,
    ModelConfig,
    build_scatter_model,
    model_d,
    model_e,
    sector_eigenvalues,
    sz_sector_indices,
)
from .quantum import DegenerateSpectrumError, eigensystem

__all__ = [
    "ExperimentError",
    "BOUND_SLACK_RTOL",
    "TrimResult",
    "ScatterResult",
    "SweepRow",
    "RunManifest",
    "trim_outliers",
    "scatter_bound_test",
    "sweep_theta",
    "sweep_defect",
]

logger = logging.getLogger(__name__)

# Slack allowed on the proved inequality, relative to b (pure float roundoff).
BOUND_SLACK_RTOL = 1e-9


class ExperimentError(RuntimeError):
    """An experiment-level contract was violated (bad model, too many failures)."""


@dataclass(frozen=True)
class TrimResult:
    kept: np.ndarray
    trimmed: np.ndarray


@dataclass(frozen=True)
class ScatterResult:
    """All records of one inequality scatter run over perturbation draws."""

    model_tag: str
    master_seed: int
    records: list
    violations_b: int
    violations_b_prime: int
    n_rejected: int
    b: float
    b_prime: float


@dataclass(frozen=True)
class SweepRow:
    """Aggregated statistics at one sweep-parameter value."""

    param: float
    gamma_mean: float
    gamma_stderr: float
    b_mean: float
    b_stderr: float
    n_kept: int
    n_trimmed: int
    q_mean: float | None = None
    q_stderr: float | None = None
    n_failed: int = 0


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to bit-reproduce a run plus digests of its outputs."""

    tool_version: str
    created_utc: str
    master_seed: int
    rng_algorithm: str
    config: dict
    outputs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "tool_version": self.tool_version,
            "created_utc": self.created_utc,
            "master_seed": self.master_seed,
            "rng_algorithm": self.rng_algorithm,
            "config": self.config,
            "outputs": self.outputs,
        }


def trim_outliers(values, k: float = 1.5) -> TrimResult:
    """Split values by Tukey fences [Q1 - k IQR, Q3 + k IQR]."""
    x = np.asarray(values, dtype=float)
    if x.size < 4:
        raise ValueError(f"need at least 4 values to trim, got {x.size}")
    q1, q3 = np.percentile(x, [25.0, 75.0])
    iqr = q3 - q1
    mask = (x >= q1 - k * iqr) & (x <= q3 + k * iqr)
    return TrimResult(kept=x[mask], trimmed=x[~mask])


def _run_indexed(task, n_tasks: int, threads: int) -> list:
    """Evaluate task(i) for i in range(n_tasks), results in index order."""
    if threads <= 1:
        return [task(i) for i in range(n_tasks)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(task, range(n_tasks)))


def scatter_bound_test(
    config: ModelConfig,
    samples: int = 3000,
    master_seed: int = 0,
    a_value: float | None = None,
    threads: int = 1,
) -> ScatterResult:
    """Sample the inequality over perturbation draws on a fixed base Hamiltonian.

    Per sample: draw V with a child seed, compute |dQ^0/dtau|, K_0, and the
    saturation index delta against the per-model constants b and b'.  Draws
    rejected by the degeneracy guard are logged; more than 1% of them aborts
    (the model is misconfigured).
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    h0, v_sampler = build_scatter_model(config, h0_seed=spawn_seed(master_seed, 0))
    decomposition = eigensystem(h0)
    decomposition.require_nondegenerate()
    n = config.n_qubits
    overlaps = ground_state_site_overlaps(decomposition, n)
    b = bound_b(decomposition)
    b_prime = bound_b_prime(decomposition, n, a_value)
    u = decomposition.eigenvectors

    def one_sample(i: int):
        seed = spawn_seed(master_seed, i + 1)
        v = v_sampler(seed)
        inputs = EntanglementInputs(
            decomposition=decomposition,
            v=v,
            v_eig=u.conj().T @ v.matrix @ u,
            n_qubits=n,
        )
        try:
            dq_abs = abs(dQ0_dtau(inputs, site_overlaps=overlaps))
            k0 = level_curvature(0, inputs)
        except DegenerateSpectrumError as exc:
            logger.warning("sample %d (seed %d) rejected: %s", i, seed, exc)
            return None
        delta = dq_abs - b * math.sqrt(abs(k0))
        return BoundRecord(
            seed=seed, dq_abs=dq_abs, k0=k0, b=b, b_prime=b_prime, delta=delta
        )

    results = _run_indexed(one_sample, samples, threads)
    records = [r for r in results if r is not None]
    n_rejected = samples - len(records)
    if n_rejected > max(1, 0.01 * samples):
        raise ExperimentError(
            f"{n_rejected}/{samples} degenerate-sample rejections; "
            "model is misconfigured"
        )
    slack = BOUND_SLACK_RTOL * b
    violations_b = sum(
        1 for r in records if r.dq_abs > r.b * math.sqrt(abs(r.k0)) + slack
    )
    violations_b_prime = sum(
        1 for r in records if r.dq_abs > r.b_prime * math.sqrt(abs(r.k0))
    )
    return ScatterResult(
        model_tag=config.tag,
        master_seed=master_seed,
        records=records,
        violations_b=violations_b,
        violations_b_prime=violations_b_prime,
        n_rejected=n_rejected,
        b=b,
        b_prime=b_prime,
    )


def _aggregate_row(
    param: float,
    b_values: list,
    spacing_samples: list,
    gammas_per_draw: list,
    q_values,
    n_failed: int,
    realizations: int,
    outlier_k: float,
    source: str,
    per_realization_gamma: bool,
) -> SweepRow:
    if n_failed > 0.10 * realizations:
        raise ExperimentError(
            f"{n_failed}/{realizations} draws failed at parameter {param:g}"
        )
    b_arr = np.asarray(b_values, dtype=float)
    trim = trim_outliers(b_arr, k=outlier_k)
    kept_mask = np.isin(b_arr, trim.kept)
    n_kept = int(trim.kept.size)
    b_stderr = (
        float(np.std(trim.kept, ddof=1) / math.sqrt(n_kept)) if n_kept > 1 else 0.0
    )

    if per_realization_gamma:
        g = np.asarray(gammas_per_draw, dtype=float)
        gamma_mean = float(g.mean())
        gamma_stderr = float(np.std(g, ddof=1) / math.sqrt(g.size)) if g.size > 1 else 0.0
    else:
        pooled = pool_spacing_samples(spacing_samples, source=source)
        gamma_mean = gamma_chaos(weibull_fit(pooled))
        gamma_stderr = 0.0  # single pooled fit; no realization scatter available

    q_mean = q_stderr = None
    if q_values is not None:
        q_arr = np.asarray(q_values, dtype=float)[kept_mask]
        q_mean = float(q_arr.mean())
        q_stderr = (
            float(np.std(q_arr, ddof=1) / math.sqrt(q_arr.size)) if q_arr.size > 1 else 0.0
        )

    return SweepRow(
        param=param,
        gamma_mean=gamma_mean,
        gamma_stderr=gamma_stderr,
        b_mean=float(trim.kept.mean()),
        b_stderr=b_stderr,
        n_kept=n_kept,
        n_trimmed=realizations - n_kept,
        q_mean=q_mean,
        q_stderr=q_stderr,
        n_failed=n_failed,
    )


def bound_b_from_eigenvalues(eigenvalues: np.ndarray) -> float:
    """b computed straight from a sorted eigenvalue vector."""
    gaps = eigenvalues[1:] - eigenvalues[0]
    if gaps[0] <= 0:
        raise DegenerateSpectrumError("degenerate ground state")
    return 8.0 * math.sqrt(float(np.sum(1.0 / gaps)))


def sweep_theta(
    theta_grid,
    realizations: int = 100,
    master_seed: int = 0,
    dim: int = 128,
    chaotic_scale: float = MODEL_D_CHAOTIC_SCALE,
    poly_degree: int = 6,
    edge_trim: float = 0.05,
    outlier_k: float = 1.5,
    per_realization_gamma: bool = False,
    threads: int = 1,
) -> list:
    """Chaos and bound statistics of the Poisson/GOE rotation over a theta grid.

    Per grid point: ``realizations`` seeded draws; from each, the bound
    constant b of the ground state and the unfolded spacing sample.  The chaos
    parameter comes from a pooled Weibull fit by default.
    """
    theta_grid = [float(t) for t in theta_grid]
    rows = []
    for t_index, theta in enumerate(theta_grid):

        def one_draw(r: int):
            seed = spawn_seed(master_seed, t_index, r)
            h = model_d(theta, seed, dim=dim, chaotic_scale=chaotic_scale)
            eigs = np.linalg.eigvalsh(h.matrix)
            try:
                b = bound_b_from_eigenvalues(eigs)
                sample = spacing_sample_from_levels(
                    eigs, source=f"model-D theta={theta:g}",
                    poly_degree=poly_degree, edge_trim=edge_trim,
                )
            except (UnfoldingError, DegenerateSpectrumError) as exc:
                logger.warning("theta=%g draw %d failed: %s", theta, r, exc)
                return None
            return b, sample

        results = _run_indexed(one_draw, realizations, threads)
        ok = [r for r in results if r is not None]
        samples = [s for _, s in ok]
        gammas = (
            [gamma_chaos(weibull_fit(s)) for s in samples] if per_realization_gamma else []
        )
        rows.append(
            _aggregate_row(
                param=theta,
                b_values=[b for b, _ in ok],
                spacing_samples=samples,
                gammas_per_draw=gammas,
                q_values=None,
                n_failed=realizations - len(ok),
                realizations=realizations,
                outlier_k=outlier_k,
                source=f"model-D theta={theta:g} pooled",
                per_realization_gamma=per_realization_gamma,
            )
        )
    return rows


def sweep_defect(
    d_grid,
    realizations: int = 100,
    n_qubits: int = 9,
    h: float = MODEL_E_DEFAULT_FIELD,
    J: float = 1.0,
    master_seed: int = 0,
    sector_restricted: bool = True,
    poly_degree: int = 6,
    edge_trim: float = 0.05,
    outlier_k: float = 1.5,
    per_realization_gamma: bool = False,
    threads: int = 1,
) -> list:
    """Chaos, bound, and entanglement statistics of the defect chain over d.

    Spacing statistics default to the largest total-sigma_z sector (mixing
    symmetry sectors fakes Poisson statistics); b and the ground-state Q come
    from the full spectrum.
    """
    d_grid = [float(d) for d in d_grid]
    sector = sz_sector_indices(n_qubits) if sector_restricted else None
    rows = []
    for d_index, d in enumerate(d_grid):

        def one_draw(r: int):
            seed = spawn_seed(master_seed, d_index, r)
            ham = model_e(n_qubits=n_qubits, d=d, h=h, J=J, seed=seed)
            decomposition = eigensystem(ham)
            spectrum = (
                sector_eigenvalues(ham, sector)
                if sector is not None
                else decomposition.eigenvalues
            )
            try:
                b = bound_b(decomposition)
                sample = spacing_sample_from_levels(
                    spectrum, source=f"model-E d={d:g}",
                    poly_degree=poly_degree, edge_trim=edge_trim,
                )
            except (UnfoldingError, DegenerateSpectrumError) as exc:
                logger.warning("d=%g draw %d failed: %s", d, r, exc)
                return None
            q = mean_bipartite_Q(decomposition.vector(0), n_qubits)
            return b, q, sample

        results = _run_indexed(one_draw, realizations, threads)
        ok = [r for r in results if r is not None]
        samples = [s for _, _, s in ok]
        gammas = (
            [gamma_chaos(weibull_fit(s)) for s in samples] if per_realization_gamma else []
        )
        rows.append(
            _aggregate_row(
                param=d,
                b_values=[b for b, _, _ in ok],
                spacing_samples=samples,
                gammas_per_draw=gammas,
                q_values=[q for _, q, _ in ok],
                n_failed=realizations - len(ok),
                realizations=realizations,
                outlier_k=outlier_k,
                source=f"model-E d={d:g} pooled",
                per_realization_gamma=per_realization_gamma,
            )
        )
    return rows
