"""Production-speed pair statistics and correlation matrix assembly.

Each fast path reduces the kernel's permutation sum to rank counting:

* Hoeffding's D: one pivot point; the sum over the four remaining indices
  collapses to a polynomial in the pivot's marginal ranks and bivariate
  rank, O(n log n) per pair.
* BKR's R: two pivots (one per coordinate); same collapse per ordered pivot
  pair using a joint rank table, O(n^2) per pair.
* tau*: counting point pairs separated in both coordinates, O(n^2) per pair.

The overall scale of each reduction relative to the paper-normalized kernel
was calibrated against :func:`rankspectra.kernels.u_statistic_naive` on
small-n data (constant across datasets to 1e-10) and is frozen below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from .data import SampleMatrix, column_ranks
from .errors import SizeError, ValidationError
from .kernels import kernel_bound, kernel_spec

#: Calibrated scale constants mapping the counting reductions to the
#: kernel normalization (1/16 and 1/32 permutation-sum prefactors).
CAL_HOEFFDING_D = 1.0 / 16.0
CAL_BKR_R = 1.0 / 32.0
CAL_BDY_TAUSTAR = 1.0

_CAL = {
    "hoeffding-d": CAL_HOEFFDING_D,
    "bkr-r": CAL_BKR_R,
    "bdy-taustar": CAL_BDY_TAUSTAR,
}

#: Rank counts are accumulated in int64/float64; beyond this the products
#: in the pivot polynomials lose integer exactness.
MAX_N = 10**5


@dataclass(frozen=True)
class CorrMatrix:
    """Symmetric p x p rank-correlation matrix with unit diagonal."""

    p: int
    entries: np.ndarray
    statistic: str
    n: int

    def __post_init__(self):
        e = self.entries
        if e.shape != (self.p, self.p):
            raise ValidationError(f"entries shape {e.shape} != ({self.p}, {self.p})")
        if not np.all(np.diag(e) == 1.0):
            raise ValidationError("diagonal entries must be exactly 1")
        if not np.array_equal(e, e.T):
            raise ValidationError("entries must be exactly symmetric")
        off = e[~np.eye(self.p, dtype=bool)]
        bound = kernel_bound(self.statistic) + 1e-12
        if off.size and np.abs(off).max() > bound:
            raise ValidationError(
                f"off-diagonal entry exceeds kernel bound {bound:.6g}"
            )


@dataclass(frozen=True)
class WMatrix:
    """Standardized matrix sqrt(n) (R - I), zero diagonal."""

    p: int
    entries: np.ndarray
    gamma: float


def _checked_ranks(x: np.ndarray, y: np.ndarray, kernel_id: str):
    spec = kernel_spec(kernel_id)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("x and y must be 1-d vectors of equal length")
    n = x.size
    if n < spec.order:
        raise SizeError(f"{kernel_id} needs n >= {spec.order}, got n={n}")
    if n > MAX_N:
        raise SizeError(f"n={n} exceeds the overflow guard n <= {MAX_N}")
    return column_ranks(x), column_ranks(y)


def pair_stat(kernel_id: str, x, y) -> float:
    """Fast single-pair statistic, equal to the naive U-statistic."""
    r, s = _checked_ranks(x, y, kernel_id)
    scale = _CAL[kernel_id]
    if kernel_id == "hoeffding-d":
        xinv = np.argsort(r, kind="stable").astype(np.int64)
        return scale * float(_accel.pair_raw_d(r, s, xinv))
    if kernel_id == "bkr-r":
        return scale * float(_accel.pair_raw_r(r, s))
    return scale * float(_accel.pair_raw_t(r, s))


def correlation_matrix(kernel_id: str, m: SampleMatrix) -> CorrMatrix:
    """Assemble the p x p matrix of pairwise statistics, unit diagonal.

    Upper-triangle pairs are distributed over numba workers; entries depend
    only on per-column ranks, so the result is identical for any worker
    count and invariant under strictly increasing column transforms.
    """
    spec = kernel_spec(kernel_id)
    if m.n < spec.order:
        raise SizeError(f"{kernel_id} needs n >= {spec.order}, got n={m.n}")
    if m.n > MAX_N:
        raise SizeError(f"n={m.n} exceeds the overflow guard n <= {MAX_N}")
    ranks = np.empty((m.p, m.n), dtype=np.int64)
    for j in range(m.p):
        try:
            ranks[j] = column_ranks(m.values[:, j])
        except ValidationError as exc:
            raise type(exc)(f"column {j}: {exc}") from exc
    jj, kk = np.triu_indices(m.p, k=1)
    jj = jj.astype(np.int64)
    kk = kk.astype(np.int64)
    out = np.eye(m.p)
    scale = _CAL[kernel_id]
    if kernel_id == "hoeffding-d":
        xinv = np.argsort(ranks, axis=1, kind="stable").astype(np.int64)
        _accel.corr_matrix_d(ranks, xinv, jj, kk, scale, out)
    elif kernel_id == "bkr-r":
        _accel.corr_matrix_r(ranks, jj, kk, scale, out)
    else:
        _accel.corr_matrix_t(ranks, jj, kk, scale, out)
    return CorrMatrix(p=m.p, entries=out, statistic=kernel_id, n=m.n)


def standardize(r: CorrMatrix) -> WMatrix:
    """sqrt(n) (R - I), with gamma = p / n."""
    w = math.sqrt(r.n) * (r.entries - np.eye(r.p))
    return WMatrix(p=r.p, entries=w, gamma=r.p / r.n)
