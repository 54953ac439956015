"""Seeded Monte Carlo experiment runner with CSV output.

Every trial draws its randomness from a Philox stream keyed by
``(master_seed, trial_index)``, so trials are independent, reorderable, and
individually reproducible; a config plus a master seed determines every
output byte.  Per-trial wall time is recorded only when ``timing`` is
enabled, since measured clocks would break byte-level reproducibility of the
emitted CSV.

Test matrices are Gaussian-factor products ``G1 @ G2^T`` (exactly rank k
almost surely); an optional ``kappa`` reshapes the spectrum geometrically to
hit a target condition number, ``sparsity`` zeroes a fraction of columns to
exercise the uniform-vs-length sampling gap, and noise is an i.i.d. Gaussian
matrix rescaled so its spectral norm matches the requested level against
``||A||_2 = 1``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, fields

import numpy as np

from .cluster import (
    ClusterLabels,
    SubspaceSpec,
    clustering_accuracy,
    clustering_matrix,
    generate_union_of_subspaces,
    labels_from_clustering_matrix,
)
from .cur import approx_error, build_cur, randomized_cur, verify_characterization
from .deim import deim_cur
from .errors import ConfigError, NoiseDominatesError
from .linalg import COLS, ROWS
from .sampling import leverage_dist, length_dist, min_sample_size_rv, noisy_stability_floor, uniform_dist

KINDS = ("success_prob", "noise_stability", "deim_check", "clustering")
SCHEMES = ("uniform", "length", "leverage")

CSV_HEADER = "trial,scheme,d1,d2,success,rel_err_2,rel_err_F,ms"


@dataclass(frozen=True)
class TrialRecord:
    """One Monte Carlo outcome; ``success`` means the CUR was exact at the config tolerance."""

    trial_index: int
    scheme: str
    d1: int
    d2: int
    success: bool
    rel_error_spectral: float
    rel_error_frobenius: float
    wall_time_ms: float


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description; see :func:`config_from_text` for the file form."""

    kind: str
    m: int = 0
    n: int = 0
    k: int = 0
    sigma: float = 0.0
    scheme: str = "length"
    d_grid: tuple | None = None
    eps: float | None = None
    delta: float | None = None
    big_c: float = 1.0
    trials: int = 100
    master_seed: int = 0
    out_path: str | None = None
    kappa: float | None = None
    sparsity: float = 0.0
    tol: float = 1e-8
    dedup: bool = False
    timing: bool = False
    dims: tuple | None = None
    points: tuple | None = None
    d_max: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"must be one of {KINDS}", field="kind")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"must be one of {SCHEMES}", field="scheme")
        if self.trials < 1:
            raise ConfigError("must be >= 1", field="trials")
        if self.sigma < 0.0:
            raise ConfigError("must be >= 0", field="sigma")
        if not (0.0 <= self.sparsity < 1.0):
            raise ConfigError("must lie in [0, 1)", field="sparsity")
        if self.tol <= 0.0:
            raise ConfigError("must be positive", field="tol")
        if self.d_grid is not None and any(d < 1 for d in self.d_grid):
            raise ConfigError("grid values must be >= 1", field="d_grid")
        if self.kind == "clustering":
            if self.dims is None or self.points is None:
                raise ConfigError("clustering needs dims and points", field="dims")
            if self.m < 1:
                raise ConfigError("ambient dimension must be >= 1", field="m")
            SubspaceSpec(self.m, tuple(self.dims), tuple(self.points))
        else:
            if self.m < 1 or self.n < 1:
                raise ConfigError("matrix sizes must be >= 1", field="m")
            if not (1 <= self.k <= min(self.m, self.n)):
                raise ConfigError("rank must satisfy 1 <= k <= min(m, n)", field="k")
            if self.sparsity > 0.0 and (1.0 - self.sparsity) * self.n < self.k:
                raise ConfigError("too many zeroed columns for the target rank", field="sparsity")
        if self.d_grid is None and self.kind in ("success_prob", "noise_stability"):
            if self.eps is None or self.delta is None:
                raise ConfigError("give d_grid or both eps and delta", field="d_grid")

    def resolved_d_grid(self) -> tuple:
        """The draw-count grid, computing it from (eps, delta, big_c) when absent.

        The sample-size formula is evaluated at the nominal stable rank
        ``r = k`` (the attainable maximum for a rank-k matrix).
        """
        if self.d_grid is not None:
            return tuple(int(d) for d in self.d_grid)
        if self.kind == "deim_check":
            return (int(self.k),)
        if self.kind == "clustering":
            k = sum(self.dims)
            return (max(k, math.ceil(4.0 * k * math.log(k))) if k > 1 else 1,)
        return (min_sample_size_rv(float(self.k), self.eps, self.delta, self.big_c),)


_INT_FIELDS = {"m", "n", "k", "trials", "master_seed", "d_max"}
_FLOAT_FIELDS = {"sigma", "eps", "delta", "big_c", "kappa", "sparsity", "tol"}
_BOOL_FIELDS = {"dedup", "timing"}
_TUPLE_FIELDS = {"d_grid", "dims", "points"}


def config_from_mapping(mapping) -> ExperimentConfig:
    """Build a config from a plain dict of strings or values; names checked strictly."""
    known = {f.name for f in fields(ExperimentConfig)}
    converted = {}
    for key, value in mapping.items():
        if key not in known:
            raise ConfigError("unknown field", field=key)
        try:
            if isinstance(value, str):
                if key in _INT_FIELDS:
                    value = int(value)
                elif key in _FLOAT_FIELDS:
                    value = float(value)
                elif key in _BOOL_FIELDS:
                    value = value.strip().lower() in ("1", "true", "yes", "on")
                elif key in _TUPLE_FIELDS:
                    value = tuple(int(tok) for tok in value.split(",") if tok.strip())
        except ValueError as exc:
            raise ConfigError(f"bad value {value!r}", field=key) from exc
        converted[key] = value
    if "kind" not in converted:
        raise ConfigError("required", field="kind")
    return ExperimentConfig(**converted)


def config_from_text(text) -> ExperimentConfig:
    """Parse a ``key = value`` block (``#`` comments allowed) into a config."""
    mapping = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value, got {raw!r}", line=lineno)
        key, _, value = line.partition("=")
        mapping[key.strip()] = value.strip()
    return config_from_mapping(mapping)


def trial_generator(master_seed, trial_index) -> np.random.Generator:
    """Philox stream for one trial, independent across trial indices."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(trial_index),))
    return np.random.Generator(np.random.Philox(ss))


def lowrank_gaussian(m, n, k, rng, kappa=None) -> np.ndarray:
    """Rank-k Gaussian-factor matrix, optionally reshaped to condition number ``kappa``."""
    a = rng.standard_normal((m, k)) @ rng.standard_normal((n, k)).T
    if kappa is not None and k > 1:
        w, s, vt = np.linalg.svd(a, full_matrices=False)
        target = s[0] * float(kappa) ** (-np.arange(k) / (k - 1.0))
        a = (w[:, :k] * target) @ vt[:k, :]
    return a


def zero_out_columns(a, fraction, rng) -> np.ndarray:
    """Zero a random ``fraction`` of columns (sparse-column stress case)."""
    a = a.copy()
    n = a.shape[1]
    count = int(round(fraction * n))
    if count > 0:
        cols = rng.choice(n, size=count, replace=False)
        a[:, cols] = 0.0
    return a


def spectral_noise(shape, sigma, rng) -> np.ndarray:
    """I.i.d. Gaussian noise rescaled so ``||E||_2`` equals ``sigma`` exactly.

    The raw Gaussian block is always drawn, so stream consumption does not
    depend on ``sigma``.
    """
    e = rng.standard_normal(shape)
    if sigma == 0.0:
        return np.zeros(shape)
    return e * (float(sigma) / np.linalg.norm(e, 2))


def _axis_dists(a, scheme, k):
    if scheme == "uniform":
        return uniform_dist(a.shape[0], ROWS), uniform_dist(a.shape[1], COLS)
    if scheme == "length":
        return length_dist(a, ROWS), length_dist(a, COLS)
    return leverage_dist(a, k, ROWS), leverage_dist(a, k, COLS)


def _clock(cfg):
    return time.perf_counter if cfg.timing else (lambda: 0.0)


def run_success_probability_experiment(cfg: ExperimentConfig):
    """Exact-recovery success rates for sampled CUR over a draw-count grid.

    Returns ``(records, summary)``; the summary carries one aggregate row
    per grid point.
    """
    records = []
    groups = []
    trial_index = 0
    now = _clock(cfg)
    for d in cfg.resolved_d_grid():
        successes = 0
        err_sum = 0.0
        group_start = trial_index
        for _ in range(cfg.trials):
            t0 = now()
            rng = trial_generator(cfg.master_seed, trial_index)
            a = lowrank_gaussian(cfg.m, cfg.n, cfg.k, rng, cfg.kappa)
            if cfg.sparsity > 0.0:
                a = zero_out_columns(a, cfg.sparsity, rng)
            row_dist, col_dist = _axis_dists(a, cfg.scheme, cfg.k)
            factors = randomized_cur(a, row_dist, col_dist, d, d, rng, dedup=cfg.dedup)
            norm_f = np.linalg.norm(a)
            rel_f = approx_error(a, factors, "frobenius") / norm_f
            rel_2 = approx_error(a, factors, "spectral") / np.linalg.norm(a, 2)
            success = rel_f <= cfg.tol
            successes += int(success)
            err_sum += rel_f
            records.append(TrialRecord(
                trial_index=trial_index,
                scheme=cfg.scheme,
                d1=d,
                d2=d,
                success=success,
                rel_error_spectral=rel_2,
                rel_error_frobenius=rel_f,
                wall_time_ms=(now() - t0) * 1e3,
            ))
            trial_index += 1
        groups.append({
            "kind": cfg.kind,
            "scheme": cfg.scheme,
            "d1": d,
            "d2": d,
            "trials": cfg.trials,
            "successes": successes,
            "success_rate": successes / cfg.trials,
            "mean_rel_err_F": err_sum / cfg.trials,
            "first_trial": group_start,
        })
    return records, {"groups": groups}


def run_noise_experiment(cfg: ExperimentConfig):
    """Sample a noisy observation, test exactness on the clean matrix underneath.

    Per trial the indices are drawn from distributions of ``A + E`` while the
    success flag checks ``A = C U^+ R`` on the clean entries; the noisy-factor
    errors are recorded in the trial rows relative to the clean matrix norms.
    The summary carries the per-trial stability floors and error-to-noise
    ratios; trials whose noise dominates a row or column are counted as
    skipped rather than failing the run.
    """
    records = []
    groups = []
    alpha_per_trial = []
    beta_per_trial = []
    ratio_per_trial = []
    trial_index = 0
    now = _clock(cfg)
    for d in cfg.resolved_d_grid():
        successes = 0
        completed = 0
        skipped = 0
        ratios = []
        group_start = trial_index
        for _ in range(cfg.trials):
            t0 = now()
            rng = trial_generator(cfg.master_seed, trial_index)
            a = lowrank_gaussian(cfg.m, cfg.n, cfg.k, rng, cfg.kappa)
            if cfg.sparsity > 0.0:
                a = zero_out_columns(a, cfg.sparsity, rng)
            a = a / np.linalg.norm(a, 2)
            e = spectral_noise(a.shape, cfg.sigma, rng)
            a_tilde = a + e
            try:
                floors = noisy_stability_floor(a, e)
            except NoiseDominatesError:
                skipped += 1
                trial_index += 1
                continue
            alpha_per_trial.append(floors.alpha)
            beta_per_trial.append(floors.beta)
            row_dist, col_dist = _axis_dists(a_tilde, cfg.scheme, cfg.k)
            noisy = randomized_cur(a_tilde, row_dist, col_dist, d, d, rng, dedup=cfg.dedup)
            clean = build_cur(a, noisy.I, noisy.J)
            rel_f_clean = approx_error(a, clean, "frobenius") / np.linalg.norm(a)
            success = rel_f_clean <= cfg.tol
            err_2_noisy = approx_error(a, noisy, "spectral")
            rel_f_noisy = approx_error(a, noisy, "frobenius") / np.linalg.norm(a)
            ratio = err_2_noisy / cfg.sigma if cfg.sigma > 0.0 else float("nan")
            ratios.append(ratio)
            ratio_per_trial.append(ratio)
            successes += int(success)
            completed += 1
            records.append(TrialRecord(
                trial_index=trial_index,
                scheme=cfg.scheme,
                d1=d,
                d2=d,
                success=success,
                rel_error_spectral=err_2_noisy,
                rel_error_frobenius=rel_f_noisy,
                wall_time_ms=(now() - t0) * 1e3,
            ))
            trial_index += 1
        groups.append({
            "kind": cfg.kind,
            "scheme": cfg.scheme,
            "d1": d,
            "d2": d,
            "sigma": cfg.sigma,
            "trials": cfg.trials,
            "completed": completed,
            "skipped": skipped,
            "successes": successes,
            "success_rate": successes / completed if completed else float("nan"),
            "median_err_to_noise": float(np.median(ratios)) if ratios else float("nan"),
            "first_trial": group_start,
        })
    return records, {
        "groups": groups,
        "alpha_per_trial": alpha_per_trial,
        "beta_per_trial": beta_per_trial,
        "ratio_per_trial": ratio_per_trial,
    }


def run_deim_experiment(cfg: ExperimentConfig):
    """Deterministic-selection exactness over seeded random rank-k matrices."""
    records = []
    successes = 0
    now = _clock(cfg)
    for trial_index in range(cfg.trials):
        t0 = now()
        rng = trial_generator(cfg.master_seed, trial_index)
        a = lowrank_gaussian(cfg.m, cfg.n, cfg.k, rng, cfg.kappa)
        factors = deim_cur(a, cfg.k)
        rel_f = approx_error(a, factors, "frobenius") / np.linalg.norm(a)
        rel_2 = approx_error(a, factors, "spectral") / np.linalg.norm(a, 2)
        success = rel_f <= cfg.tol
        successes += int(success)
        records.append(TrialRecord(
            trial_index=trial_index,
            scheme="deim",
            d1=cfg.k,
            d2=cfg.k,
            success=success,
            rel_error_spectral=rel_2,
            rel_error_frobenius=rel_f,
            wall_time_ms=(now() - t0) * 1e3,
        ))
    groups = [{
        "kind": cfg.kind,
        "scheme": "deim",
        "d1": cfg.k,
        "d2": cfg.k,
        "trials": cfg.trials,
        "successes": successes,
        "success_rate": successes / cfg.trials,
    }]
    return records, {"groups": groups}


def run_clustering_experiment(cfg: ExperimentConfig):
    """End-to-end subspace clustering through sampled CUR decompositions.

    ``success`` means perfect clustering accuracy; the summary additionally
    reports how many trials produced a verified-exact CUR and whether every
    such trial clustered perfectly (the deterministic guarantee).
    """
    spec = SubspaceSpec(cfg.m, tuple(cfg.dims), tuple(cfg.points))
    d_max = cfg.d_max if cfg.d_max is not None else max(spec.dims)
    d = cfg.resolved_d_grid()[0]
    records = []
    successes = 0
    exact_count = 0
    exact_and_perfect = 0
    now = _clock(cfg)
    for trial_index in range(cfg.trials):
        t0 = now()
        rng = trial_generator(cfg.master_seed, trial_index)
        a, model = generate_union_of_subspaces(spec, rng)
        k = model.total_rank
        row_dist, col_dist = _axis_dists(a, cfg.scheme, k)
        factors = randomized_cur(a, row_dist, col_dist, d, d, rng, dedup=cfg.dedup)
        report = verify_characterization(a, factors.I, factors.J, cfg.tol)
        w = clustering_matrix(factors, d_max)
        pred = labels_from_clustering_matrix(w)
        truth = ClusterLabels(labels=model.ground_truth, num_clusters=len(spec.dims))
        acc = clustering_accuracy(pred, truth)
        rel_f = approx_error(a, factors, "frobenius") / np.linalg.norm(a)
        rel_2 = approx_error(a, factors, "spectral") / np.linalg.norm(a, 2)
        success = acc == 1.0
        successes += int(success)
        if report.all_hold:
            exact_count += 1
            exact_and_perfect += int(success)
        records.append(TrialRecord(
            trial_index=trial_index,
            scheme=cfg.scheme,
            d1=d,
            d2=d,
            success=success,
            rel_error_spectral=rel_2,
            rel_error_frobenius=rel_f,
            wall_time_ms=(now() - t0) * 1e3,
        ))
    groups = [{
        "kind": cfg.kind,
        "scheme": cfg.scheme,
        "d1": d,
        "d2": d,
        "trials": cfg.trials,
        "successes": successes,
        "success_rate": successes / cfg.trials,
        "exact_curs": exact_count,
        "exact_and_perfect": exact_and_perfect,
    }]
    return records, {"groups": groups}


_RUNNERS = {
    "success_prob": run_success_probability_experiment,
    "noise_stability": run_noise_experiment,
    "deim_check": run_deim_experiment,
    "clustering": run_clustering_experiment,
}


def run_experiment(cfg: ExperimentConfig):
    """Dispatch on ``cfg.kind``."""
    return _RUNNERS[cfg.kind](cfg)


def _format_value(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def emit_csv(records, summary, path) -> None:
    """Write trial rows plus a ``# summary`` comment block, deterministically formatted."""
    groups = summary.get("groups", []) if isinstance(summary, dict) else list(summary)
    with open(path, "w", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in records:
            fh.write(",".join([
                str(r.trial_index),
                r.scheme,
                str(r.d1),
                str(r.d2),
                "1" if r.success else "0",
                _format_value(r.rel_error_spectral),
                _format_value(r.rel_error_frobenius),
                _format_value(r.wall_time_ms),
            ]) + "\n")
        fh.write("# summary\n")
        for group in groups:
            parts = [f"{key}={_format_value(val)}" for key, val in group.items()]
            fh.write("# " + " ".join(parts) + "\n")
