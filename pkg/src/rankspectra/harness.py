"""Experiment runner: data -> correlation matrix -> spectrum -> artifacts.

Artifacts per experiment: ``eigenvalues.csv``, ``histogram.csv``,
``stieltjes.csv``, and ``summary.json`` (fixed schemas, floats written with
17 significant digits so every value round-trips exactly). Also provides
the variance scan and the Stieltjes convergence scan used to probe the
concentration and convergence propositions.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .data import MARGINS, sample_matrix
from .errors import DomainError, ValidationError
from .faststats import correlation_matrix, standardize
from .gramlab import TruncationConfig, truncated_matrix
from .kernels import KERNEL_IDS, kernel_spec
from .limitlaw import SemicircleLaw, corollary_radius, sc_stieltjes
from .spectra import SpectralSummary, empirical_stieltjes, spectral_summary, sym_eigenvalues

DEFAULT_BINS = 60
DEFAULT_Z_PROBES = (1j,)

#: Published schema of summary.json (jsonschema draft 2020-12 subset).
SUMMARY_SCHEMA = {
    "type": "object",
    "properties": {
        "statistic": {"enum": list(KERNEL_IDS)},
        "n": {"type": "integer", "minimum": 2},
        "p": {"type": "integer", "minimum": 2},
        "gamma": {"type": "number", "exclusiveMinimum": 0},
        "radius": {"type": "number", "exclusiveMinimum": 0},
        "ks": {"type": "number", "minimum": 0, "maximum": 1},
        "second_moment_empirical": {"type": "number", "minimum": 0},
        "second_moment_theory": {"type": "number", "minimum": 0},
        "stieltjes_gaps": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "seed": {"type": "integer"},
        "margin": {"enum": list(MARGINS)},
        "elapsed_seconds": {"type": "number", "minimum": 0},
        "version": {"type": "string"},
    },
    "required": [
        "statistic", "n", "p", "gamma", "radius", "ks",
        "second_moment_empirical", "second_moment_theory", "stieltjes_gaps",
        "seed", "margin", "elapsed_seconds", "version",
    ],
    "additionalProperties": False,
}


@dataclass(frozen=True)
class ExperimentConfig:
    statistic: str
    n: int
    p: int
    seed: int = 0
    margin: str = "uniform01"
    bins: int = DEFAULT_BINS
    trials: int = 1
    truncation_T: int | None = None
    z_probes: tuple = DEFAULT_Z_PROBES
    out_dir: str | Path | None = None
    threads: int | str = "auto"

    def __post_init__(self):
        spec = kernel_spec(self.statistic)
        if self.n < spec.order:
            raise ValidationError(
                f"{self.statistic} needs n >= {spec.order}, got n={self.n}"
            )
        if self.p < 2:
            raise ValidationError(f"need p >= 2, got p={self.p}")
        if self.margin not in MARGINS:
            raise ValidationError(f"unknown margin {self.margin!r}")
        if self.bins < 10:
            raise ValidationError(f"bins must be >= 10, got {self.bins}")
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        if self.truncation_T is not None and self.truncation_T < 1:
            raise ValidationError(f"truncation must be >= 1, got {self.truncation_T}")
        for z in self.z_probes:
            if complex(z).imag <= 0:
                raise DomainError(f"z probe {z} not in the upper half-plane")
        if not (self.threads == "auto" or (isinstance(self.threads, int) and self.threads >= 1)):
            raise ValidationError(f"threads must be 'auto' or a positive int, got {self.threads!r}")

    @property
    def gamma(self) -> float:
        return self.p / self.n


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    gamma: float
    radius: float
    ks: float
    second_moment_empirical: float
    second_moment_theory: float
    stieltjes_gaps: list
    elapsed_seconds: float
    version: str
    summary: SpectralSummary


def _apply_threads(threads) -> None:
    if threads == "auto":
        return
    import numba

    numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))


def _f17(v: float) -> str:
    return format(float(v), ".17g")


def _json_scalar(v) -> str:
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, bool):
        raise TypeError("no boolean summary fields")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return _f17(v)


def _write_summary_json(path: Path, summary: dict) -> None:
    # hand-rolled emitter: floats carry exactly 17 significant digits
    lines = []
    for key, val in summary.items():
        if isinstance(val, (list, tuple)):
            body = ", ".join(_json_scalar(x) for x in val)
            lines.append(f'  "{key}": [{body}]')
        else:
            lines.append(f'  "{key}": {_json_scalar(val)}')
    path.write_text("{\n" + ",\n".join(lines) + "\n}\n")


def validate_summary(summary: dict) -> None:
    import jsonschema

    jsonschema.validate(summary, SUMMARY_SCHEMA)


def _standardized_matrix(cfg: ExperimentConfig) -> np.ndarray:
    m = sample_matrix(cfg.n, cfg.p, cfg.margin, cfg.seed)
    if cfg.truncation_T is not None:
        corr = truncated_matrix(m, TruncationConfig(cfg.truncation_T, cfg.statistic))
    else:
        corr = correlation_matrix(cfg.statistic, m)
    return standardize(corr).entries


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run one experiment and, if ``cfg.out_dir`` is set, write artifacts.

    With ``truncation_T`` set, the analyzed matrix is the truncated
    second-order matrix (the decomposition laboratory) instead of the full
    U-statistic matrix; everything downstream is unchanged.
    """
    _apply_threads(cfg.threads)
    t0 = time.perf_counter()
    w = _standardized_matrix(cfg)
    radius = corollary_radius(cfg.statistic, cfg.gamma)
    law = SemicircleLaw(radius)
    summary = spectral_summary(
        w, law, cfg.bins, (-1.5 * radius, 1.5 * radius), cfg.z_probes
    )
    gaps = [abs(s - sc_stieltjes(z, radius)) for z, s in summary.stieltjes_samples]
    elapsed = time.perf_counter() - t0
    result = ExperimentResult(
        config=cfg,
        gamma=cfg.gamma,
        radius=radius,
        ks=summary.ks_to_law,
        second_moment_empirical=summary.second_moment,
        second_moment_theory=law.second_moment,
        stieltjes_gaps=gaps,
        elapsed_seconds=elapsed,
        version=__version__,
        summary=summary,
    )
    if cfg.out_dir is not None:
        write_artifacts(result, Path(cfg.out_dir))
    return result


def write_artifacts(result: ExperimentResult, out_dir: Path) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = result.config
    s = result.summary

    rows = [f"{i + 1},{_f17(ev)}" for i, ev in enumerate(s.eigenvalues)]
    (out_dir / "eigenvalues.csv").write_text("index,eigenvalue\n" + "\n".join(rows) + "\n")

    h = s.histogram
    rows = [
        f"{_f17(h.edges[b])},{_f17(h.edges[b + 1])},{_f17(h.density[b])},{h.counts[b]}"
        for b in range(h.counts.size)
    ]
    (out_dir / "histogram.csv").write_text("bin_lo,bin_hi,density,count\n" + "\n".join(rows) + "\n")

    rows = []
    for z, sv in s.stieltjes_samples:
        mt = sc_stieltjes(z, result.radius)
        rows.append(
            ",".join(_f17(v) for v in (z.real, z.imag, sv.real, sv.imag, mt.real, mt.imag))
        )
    (out_dir / "stieltjes.csv").write_text(
        "re_z,im_z,re_s,im_s,re_m_theta,im_m_theta\n" + "\n".join(rows) + "\n"
    )

    summary = {
        "statistic": cfg.statistic,
        "n": cfg.n,
        "p": cfg.p,
        "gamma": result.gamma,
        "radius": result.radius,
        "ks": result.ks,
        "second_moment_empirical": result.second_moment_empirical,
        "second_moment_theory": result.second_moment_theory,
        "stieltjes_gaps": list(result.stieltjes_gaps),
        "seed": cfg.seed,
        "margin": cfg.margin,
        "elapsed_seconds": result.elapsed_seconds,
        "version": result.version,
    }
    validate_summary(summary)
    _write_summary_json(out_dir / "summary.json", summary)


def _derived_seed(seed: int, *key: int) -> int:
    ss = np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class VarianceScanRow:
    p: int
    n: int
    variance: float


@dataclass(frozen=True)
class VarianceScan:
    statistic: str
    z: complex
    rows: list[VarianceScanRow]
    slope: float


def run_variance_scan(statistic: str, p_list, gamma: float, trials: int, z: complex, seed: int) -> VarianceScan:
    """Sample variance of s_W(z) per dimension, with the log-log slope.

    The concentration bound predicts variance O(p^-2), so the fitted slope
    should sit near -2.
    """
    if trials < 50:
        raise ValidationError(f"trials must be >= 50, got {trials}")
    z = complex(z)
    if z.imag <= 0:
        raise DomainError(f"Im z must be positive, got z={z}")
    order = kernel_spec(statistic).order
    rows = []
    for pi, p in enumerate(p_list):
        n = round(p / gamma)
        if n < order:
            raise ValidationError(f"p={p} at gamma={gamma} gives n={n} < {order}")
        svals = np.empty(trials, dtype=np.complex128)
        for t in range(trials):
            cfg_seed = _derived_seed(seed, pi, t)
            m = sample_matrix(n, p, "uniform01", cfg_seed)
            w = standardize(correlation_matrix(statistic, m))
            svals[t] = empirical_stieltjes(sym_eigenvalues(w.entries), z)
        var = float(np.mean(np.abs(svals - svals.mean()) ** 2))
        rows.append(VarianceScanRow(p=int(p), n=n, variance=var))
    logs = np.log([r.p for r in rows])
    logv = np.log([r.variance for r in rows])
    slope = float(np.polyfit(logs, logv, 1)[0])
    return VarianceScan(statistic=statistic, z=z, rows=rows, slope=slope)


@dataclass(frozen=True)
class StieltjesConvergenceRow:
    z: complex
    mean_s: complex
    m_theta: complex
    gap: float


def run_stieltjes_convergence(statistic: str, n: int, p: int, trials: int, z_probes, seed: int) -> list[StieltjesConvergenceRow]:
    """|mean over trials of s_W(z) - m_theta(z)| per probe."""
    if trials < 20:
        raise ValidationError(f"trials must be >= 20, got {trials}")
    probes = [complex(z) for z in z_probes]
    for z in probes:
        if z.imag <= 0:
            raise DomainError(f"Im z must be positive, got z={z}")
    radius = corollary_radius(statistic, p / n)
    svals = np.empty((trials, len(probes)), dtype=np.complex128)
    for t in range(trials):
        m = sample_matrix(n, p, "uniform01", _derived_seed(seed, t))
        eigs = sym_eigenvalues(standardize(correlation_matrix(statistic, m)).entries)
        for k, z in enumerate(probes):
            svals[t, k] = empirical_stieltjes(eigs, z)
    rows = []
    for k, z in enumerate(probes):
        mean_s = complex(svals[:, k].mean())
        mt = sc_stieltjes(z, radius)
        rows.append(StieltjesConvergenceRow(z=z, mean_s=mean_s, m_theta=mt, gap=abs(mean_s - mt)))
    return rows
