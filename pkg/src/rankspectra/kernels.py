"""Exact kernel evaluation and naive U-statistics for the three rank
correlations: Hoeffding's D (order 5), Blum-Kiefer-Rosenblatt's R (order 6),
and Bergsma-Dassios-Yanagimoto's tau* (order 4).

Everything here enumerates permutations literally and serves as the ground
truth for the fast paths in :mod:`rankspectra.faststats`. Permutation sums
are integers, so results are exact rationals rounded once at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations

import numpy as np

from . import _accel
from .errors import ArityError, ComplexityGuardError, SizeError, TiesError, ValidationError

KERNEL_IDS = ("hoeffding-d", "bkr-r", "bdy-taustar")

#: Default cap on the number of indicator terms C(n, m) * m! a naive
#: U-statistic call may enumerate. n <= 12 passes for all three kernels.
DEFAULT_TERM_BUDGET = 10**9


@dataclass(frozen=True)
class KernelSpec:
    kernel_id: str
    order: int              # m
    prefactor: int          # permutation sum is divided by this
    h2_factor: int          # h2 = factor * h_{D,2}
    perm_sum: object        # batch integer permutation sum

    @property
    def n_perms(self) -> int:
        return math.factorial(self.order)


_SPECS = {
    "hoeffding-d": KernelSpec("hoeffding-d", 5, 16, 1, _accel.perm_sum_d),
    "bkr-r": KernelSpec("bkr-r", 6, 32, 2, _accel.perm_sum_r),
    "bdy-taustar": KernelSpec("bdy-taustar", 4, 16, 3, _accel.perm_sum_t),
}


def kernel_spec(kernel_id: str) -> KernelSpec:
    try:
        return _SPECS[kernel_id]
    except KeyError:
        raise ValidationError(
            f"unknown kernel {kernel_id!r}; expected one of {KERNEL_IDS}"
        ) from None


def kernel_order(kernel_id: str) -> int:
    return kernel_spec(kernel_id).order


@lru_cache(maxsize=8)
def _perm_table(m: int) -> np.ndarray:
    return np.array(list(permutations(range(m))), dtype=np.int64)


def _check_ties(v: np.ndarray, what: str) -> None:
    if np.unique(v).size != v.size:
        raise TiesError(f"tied values in {what}")


def _batch_kernel_values(spec: KernelSpec, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Kernel values for a (B, m) batch of point tuples."""
    sums = spec.perm_sum(
        np.ascontiguousarray(xs, dtype=np.float64),
        np.ascontiguousarray(ys, dtype=np.float64),
        _perm_table(spec.order),
    )
    return sums / float(spec.prefactor)


def kernel_eval(kernel_id: str, pts) -> float:
    """Evaluate the kernel on m points given as (z1, z2) pairs.

    The permutation sum follows each kernel's own indicator convention
    (non-strict for D and R, strict for tau*), which never matters on
    tie-free inputs.
    """
    spec = kernel_spec(kernel_id)
    pts = np.asarray(pts, dtype=np.float64)
    if pts.shape != (spec.order, 2):
        raise ArityError(
            f"{kernel_id} expects {spec.order} points, got shape {pts.shape}"
        )
    _check_ties(pts[:, 0], "first coordinate")
    _check_ties(pts[:, 1], "second coordinate")
    return float(_batch_kernel_values(spec, pts[None, :, 0], pts[None, :, 1])[0])


def u_statistic_naive(
    kernel_id: str,
    x,
    y,
    term_budget: int = DEFAULT_TERM_BUDGET,
) -> float:
    """Exact U-statistic: average of the kernel over all C(n, m) subsets."""
    spec = kernel_spec(kernel_id)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("x and y must be 1-d vectors of equal length")
    n = x.size
    m = spec.order
    if n < m:
        raise SizeError(f"{kernel_id} needs n >= {m}, got n={n}")
    _check_ties(x, "x")
    _check_ties(y, "y")
    n_subsets = math.comb(n, m)
    if n_subsets * spec.n_perms > term_budget:
        raise ComplexityGuardError(
            f"C({n},{m}) * {m}! = {n_subsets * spec.n_perms} indicator terms "
            f"exceeds budget {term_budget}"
        )
    subsets = np.array(list(combinations(range(n), m)), dtype=np.int64)
    sums = spec.perm_sum(x[subsets], y[subsets], _perm_table(m))
    # integer total: exact, independent of enumeration order
    return float(int(sums.sum())) / (spec.prefactor * n_subsets)


def _mc_batches(spec: KernelSpec, fixed: np.ndarray, mc_draws: int, seed: int):
    """(B, m) coordinate arrays: ``fixed`` points then fresh uniform pairs."""
    n_fixed = fixed.shape[0]
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    fresh = gen.random((mc_draws, spec.order - n_fixed, 2))
    xs = np.empty((mc_draws, spec.order))
    ys = np.empty((mc_draws, spec.order))
    xs[:, :n_fixed] = fixed[:, 0]
    ys[:, :n_fixed] = fixed[:, 1]
    xs[:, n_fixed:] = fresh[:, :, 0]
    ys[:, n_fixed:] = fresh[:, :, 1]
    return xs, ys


def _mc_estimate(values: np.ndarray) -> tuple[float, float]:
    est = math.fsum(values) / values.size
    var = math.fsum((values - est) ** 2) / (values.size - 1)
    return est, math.sqrt(var / values.size)


def project_h1(kernel_id: str, z, mc_draws: int, seed: int) -> tuple[float, float]:
    """Monte Carlo estimate of h1(z; P0 x P0) with its standard error.

    Averages the kernel over tuples (z, Z2, ..., Zm) with fresh uniform
    pairs. Degenerate kernels make this statistically zero at every z.
    """
    if mc_draws < 10**3:
        raise ValidationError(f"mc_draws must be >= 1000, got {mc_draws}")
    spec = kernel_spec(kernel_id)
    z = np.asarray(z, dtype=np.float64).reshape(1, 2)
    xs, ys = _mc_batches(spec, z, mc_draws, seed)
    return _mc_estimate(_batch_kernel_values(spec, xs, ys))


def project_h2(kernel_id: str, z1, z2, mc_draws: int, seed: int) -> tuple[float, float]:
    """Monte Carlo estimate of h2(z1, z2; P0 x P0) with standard error."""
    if mc_draws < 10**3:
        raise ValidationError(f"mc_draws must be >= 1000, got {mc_draws}")
    spec = kernel_spec(kernel_id)
    fixed = np.asarray([z1, z2], dtype=np.float64)
    if fixed.shape != (2, 2):
        raise ValidationError("z1 and z2 must be (z_1, z_2) pairs")
    _check_ties(fixed[:, 0], "first coordinate of (z1, z2)")
    _check_ties(fixed[:, 1], "second coordinate of (z1, z2)")
    xs, ys = _mc_batches(spec, fixed, mc_draws, seed)
    return _mc_estimate(_batch_kernel_values(spec, xs, ys))


@lru_cache(maxsize=8)
def kernel_bound(kernel_id: str) -> float:
    """sup |h| over all rank patterns of m points.

    The kernel is symmetric and rank-based, so the first coordinate can be
    fixed to 1..m and the supremum taken over the m! patterns of the second.
    """
    spec = kernel_spec(kernel_id)
    m = spec.order
    pats = _perm_table(m).astype(np.float64) + 1.0
    xs = np.broadcast_to(np.arange(1.0, m + 1.0), pats.shape).copy()
    return float(np.abs(_batch_kernel_values(spec, xs, pats)).max())
