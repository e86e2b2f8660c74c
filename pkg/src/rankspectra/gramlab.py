"""Numeric laboratory for the Hoeffding-decomposition constructions.

The leading second-order matrix, its truncated version, the pair-indexed
feature matrix, and the exact Gram identity that ties them together, plus
Monte Carlo probes of the cross-moment, Frobenius-norm, and quadratic-form
concentration behavior behind the semicircle limit. All operations work on
unit-interval data: uniform01 samples are used directly, any other margin
is mapped through ranks / (n + 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import SampleMatrix, column_ranks
from .errors import DomainError, MarginError, MemoryGuardError, ValidationError
from .faststats import CorrMatrix
from .kernels import kernel_spec
from .limitlaw import g_closed, lambda_r, psi, sum_lambda_sq


@dataclass(frozen=True)
class TruncationConfig:
    """Truncation level and the kernel whose eigen-system scaling applies."""

    T: int
    kernel: str = "hoeffding-d"

    def __post_init__(self):
        if self.T < 1:
            raise ValidationError(f"truncation must be >= 1, got {self.T}")
        kernel_spec(self.kernel)

    @property
    def order(self) -> int:
        return kernel_spec(self.kernel).order

    @property
    def h2_factor(self) -> int:
        return kernel_spec(self.kernel).h2_factor

    @property
    def sigma_T(self) -> float:
        return math.sqrt(sum_lambda_sq(self.T, self.h2_factor))

    def lambdas(self) -> np.ndarray:
        """Eigenvalues for r <= T, scaled by sqrt(h2_factor) per g-factor."""
        return math.sqrt(self.h2_factor) * lambda_r(np.arange(1, self.T + 1))


@dataclass(frozen=True)
class FeatureMatrix:
    """Normalized pair-feature matrix: M = n(n-1)/2 rows, p columns.

    Rows follow lexicographic pair order; ``pairs[t]`` holds the 0-based
    sample indices (i1, i2) of row t. Entries have unit variance under
    uniform data by construction of ``sigma_T``.
    """

    values: np.ndarray
    pairs: np.ndarray
    sigma_T: float
    config: TruncationConfig
    n: int

    @property
    def M(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


def _unit_data(m: SampleMatrix) -> np.ndarray:
    """Values in [0, 1]: direct for uniform margins, rank-mapped otherwise."""
    if m.margin == "uniform01":
        if m.values.min() < 0.0 or m.values.max() > 1.0:
            raise MarginError("uniform01 sample contains values outside [0, 1]")
        return m.values
    out = np.empty_like(m.values)
    for j in range(m.p):
        out[:, j] = column_ranks(m.values[:, j]) / (m.n + 1.0)
    return out


def _pair_features_g(x: np.ndarray, scale: float) -> np.ndarray:
    """Column-wise g values over sample pairs: (M, p) from (n, p) data."""
    n, p = x.shape
    i1, i2 = np.triu_indices(n, k=1)
    out = np.empty((i1.size, p))
    for j in range(p):
        col = x[:, j]
        out[:, j] = scale * g_closed(col[i1], col[i2])
    return out


def _pair_features_series(x: np.ndarray, cfg: TruncationConfig) -> np.ndarray:
    """Truncated-series pair features sum_{r<=T} lambda_r psi_r psi_r."""
    n, p = x.shape
    lam = cfg.lambdas()
    r = np.arange(1, cfg.T + 1)
    i1, i2 = np.triu_indices(n, k=1)
    out = np.empty((i1.size, p))
    for j in range(p):
        ps = psi(r, x[:, j])            # (T, n)
        prod = (ps.T * lam) @ ps        # (n, n), sum_r lambda_r psi psi
        out[:, j] = prod[i1, i2]
    return out


def _assemble_unit_diag(features: np.ndarray, order: int, n: int, kernel: str) -> CorrMatrix:
    p = features.shape[1]
    scale = order * (order - 1) / (n * (n - 1.0))
    entries = scale * (features.T @ features)
    entries = (entries + entries.T) / 2.0  # exact symmetry for the dataclass
    np.fill_diagonal(entries, 1.0)
    return CorrMatrix(p=p, entries=entries, statistic=kernel, n=n)


def leading_matrix(m: SampleMatrix, kernel_id: str) -> CorrMatrix:
    """Leading second-order matrix: off-diagonal entries
    (m(m-1)/(n(n-1))) sum_{i1<i2} g(X_{i1,j}, X_{i2,j}) g(X_{i1,k}, X_{i2,k}),
    with g carrying the kernel's sqrt(h2-factor) scale, and unit diagonal."""
    spec = kernel_spec(kernel_id)
    x = _unit_data(m)
    feats = _pair_features_g(x, math.sqrt(spec.h2_factor))
    return _assemble_unit_diag(feats, spec.order, m.n, kernel_id)


def truncated_matrix(m: SampleMatrix, cfg: TruncationConfig) -> CorrMatrix:
    """Like :func:`leading_matrix` with g replaced by its T-term series."""
    x = _unit_data(m)
    feats = _pair_features_series(x, cfg)
    return _assemble_unit_diag(feats, cfg.order, m.n, cfg.kernel)


def build_feature_matrix(m: SampleMatrix, cfg: TruncationConfig) -> FeatureMatrix:
    """Normalized feature matrix with rows indexed by sample pairs."""
    x = _unit_data(m)
    feats = _pair_features_series(x, cfg) / cfg.sigma_T
    i1, i2 = np.triu_indices(m.n, k=1)
    pairs = np.stack([i1, i2], axis=1).astype(np.int64)
    return FeatureMatrix(values=feats, pairs=pairs, sigma_T=cfg.sigma_T, config=cfg, n=m.n)


def feature_bound(cfg: TruncationConfig) -> float:
    """Uniform entry bound sigma_T^-1 (sup |psi|)^2 sum_{r<=T} lambda_r."""
    return 2.0 * float(cfg.lambdas().sum()) / cfg.sigma_T


def gram_identity_residual(m: SampleMatrix, cfg: TruncationConfig) -> float:
    """Max entrywise gap between sqrt(n)(R_T - I) and its Gram form.

    Path (a) standardizes :func:`truncated_matrix`; path (b) rescales the
    diagonal-removed Gram matrix of the normalized features. The identity
    is exact algebra, so the gap is pure floating-point noise.
    """
    n = m.n
    cm = truncated_matrix(m, cfg)
    path_a = math.sqrt(n) * (cm.entries - np.eye(cm.p))

    fm = build_feature_matrix(m, cfg)
    M = fm.M
    p = fm.p
    s = fm.values.T @ fm.values / M
    gram = math.sqrt(M / p) * (s - np.diag(np.diag(s)))
    order = cfg.order
    coef = order * (order - 1) * math.sqrt(p * M) * cfg.sigma_T**2 / (math.sqrt(n) * (n - 1))
    path_b = coef * gram
    return float(np.abs(path_a - path_b).max())


def _validate_tuples(tuples) -> tuple[np.ndarray, int]:
    arr = np.asarray(tuples, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
        raise IndexError("expected a nonempty list of (i1, i2) pairs")
    if np.any(arr[:, 0] < 1) or np.any(arr[:, 0] >= arr[:, 1]):
        raise IndexError("pairs must satisfy 1 <= i1 < i2")
    return arr, int(arr.max())


def cross_moment_mc(tuples, cfg: TruncationConfig, trials: int, seed: int) -> tuple[float, float]:
    """Monte Carlo estimate of E[prod_q A~_{i_q, 1}] with standard error.

    ``tuples`` are 1-based sample-index pairs (i1, i2) from the pair set;
    repeats are allowed. Any index appearing exactly once forces a zero
    expectation, while e.g. the (1,2)(2,3)(1,3) triple has expectation
    sigma_T^-3 sum_{r<=T} lambda_r^3.
    """
    arr, n_pts = _validate_tuples(tuples)
    if trials < 2:
        raise ValidationError(f"trials must be >= 2, got {trials}")
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    x = gen.random((trials, n_pts))
    lam = cfg.lambdas()
    r = np.arange(1, cfg.T + 1)
    ps = psi(r, x)                                  # (T, trials, n_pts)
    prod = np.ones(trials)
    for i1, i2 in arr:
        a = np.tensordot(lam, ps[:, :, i1 - 1] * ps[:, :, i2 - 1], axes=(0, 0))
        prod = prod * (a / cfg.sigma_T)
    est = math.fsum(prod) / trials
    var = math.fsum((prod - est) ** 2) / (trials - 1)
    return est, math.sqrt(var / trials)


#: 20 tuple patterns in which some sample index appears exactly once, so
#: the cross moment vanishes. Used by the vanishing-moment test battery.
SINGLETON_PATTERNS = (
    ((1, 2),),
    ((1, 2), (3, 4)),
    ((1, 2), (2, 3)),
    ((1, 2), (1, 3)),
    ((1, 2), (2, 3), (3, 4)),
    ((1, 2), (1, 3), (1, 4)),
    ((1, 2), (3, 4), (5, 6)),
    ((1, 2), (2, 3), (2, 4)),
    ((1, 2), (1, 2), (1, 3)),
    ((1, 2), (2, 3), (1, 3), (1, 4)),
    ((1, 2), (2, 3), (1, 3), (4, 5)),
    ((1, 2), (1, 2), (3, 4)),
    ((1, 3), (2, 3), (2, 4)),
    ((1, 2), (3, 4), (4, 5)),
    ((1, 4), (2, 4), (3, 4)),
    ((1, 2), (2, 4), (1, 4), (3, 5)),
    ((1, 2), (1, 3), (2, 3), (1, 2), (4, 5)),
    ((1, 2), (1, 2), (2, 3), (2, 4)),
    ((1, 5), (2, 5), (3, 5), (4, 5)),
    ((1, 2), (2, 3), (1, 3), (5, 6)),
)


def has_singleton_index(tuples) -> bool:
    flat = [i for pair in tuples for i in pair]
    return any(flat.count(i) == 1 for i in set(flat))


def _trial_generator(seed: int, trial: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF, spawn_key=(trial,))
    return np.random.Generator(np.random.Philox(ss))


def _feature_values(x: np.ndarray, cfg: TruncationConfig) -> np.ndarray:
    return _pair_features_series(x, cfg) / cfg.sigma_T


def s_minus_identity_frobenius(
    n: int, p: int, cfg: TruncationConfig, trials: int, seed: int
) -> tuple[float, float]:
    """Monte Carlo estimate of E || A~^T A~ / M - I_p ||_F^2."""
    if trials < 30:
        raise ValidationError(f"trials must be >= 30, got {trials}")
    if n < 2 or p < 1:
        raise ValidationError(f"need n >= 2 and p >= 1, got n={n}, p={p}")
    M = n * (n - 1) // 2
    vals = np.empty(trials)
    for t in range(trials):
        x = _trial_generator(seed, t).random((n, p))
        a = _feature_values(x, cfg)
        s = a.T @ a / M
        d = s - np.eye(p)
        vals[t] = float((d * d).sum())
    est = math.fsum(vals) / trials
    var = math.fsum((vals - est) ** 2) / (trials - 1)
    return est, math.sqrt(var / trials)


def resolvent_quadratic_gap(
    n: int,
    p: int,
    cfg: TruncationConfig,
    z: complex,
    trials: int,
    seed: int,
    control: bool = False,
) -> tuple[float, float]:
    """Monte Carlo estimate of (1 / (p^3 M^2)) E |A~_1^T B_1 A~_1 - tr B_1|^2.

    B_1 = A~_{-1} (y^{-1/2} D_0(S_{-1}) - z)^{-1} A~_{-1}^T is evaluated
    through its p-dimensional factors, never as an M x M matrix. With
    ``control=True`` the features are replaced by independent signs, the
    classical setting with the same concentration behavior.
    """
    z = complex(z)
    if z.imag <= 0:
        raise DomainError(f"Im z must be positive, got z={z}")
    if trials < 2:
        raise ValidationError(f"trials must be >= 2, got {trials}")
    if p < 2:
        raise ValidationError(f"need p >= 2, got p={p}")
    M = n * (n - 1) // 2
    if M > 5000:
        raise MemoryGuardError(f"M = n(n-1)/2 = {M} exceeds the guard M <= 5000")
    y_n = p / M
    vals = np.empty(trials)
    for t in range(trials):
        gen = _trial_generator(seed, t)
        if control:
            a = gen.integers(0, 2, size=(M, p)).astype(np.float64) * 2.0 - 1.0
        else:
            a = _feature_values(gen.random((n, p)), cfg)
        v = a[:, 0]
        rest = a[:, 1:]
        s_rest = rest.T @ rest / M
        d0 = s_rest - np.diag(np.diag(s_rest))
        q = np.linalg.inv(d0 / math.sqrt(y_n) - z * np.eye(p - 1))
        w = rest.T @ v
        quad = complex(w @ q @ w)
        tr_b = M * complex(np.trace(q @ s_rest))
        vals[t] = abs(quad - tr_b) ** 2
    scale = 1.0 / (p**3 * M**2)
    est = math.fsum(vals) / trials
    var = math.fsum((vals - est) ** 2) / (trials - 1)
    return scale * est, scale * math.sqrt(var / trials)
