"""Closed-form semicircle law objects and the limiting radius algebra.

Also houses the eigen-system of the Hoeffding h2 projection,
lambda_r = sqrt(3) / (pi^2 r^2) and psi_r(x) = sqrt(2) cos(pi r x), whose
squared eigenvalues sum to 1/30 (via zeta(4) = pi^4 / 90). The R and tau*
kernels share the system with lambda scaled by sqrt(2) and sqrt(3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError
from .kernels import kernel_spec

#: sum_r lambda_r^2 = (3 / pi^4) zeta(4) = 1/30 for the Hoeffding system.
SUM_LAMBDA_SQ_LIMIT = 1.0 / 30.0


def _require_radius(r: float) -> None:
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")


def sc_density(x, r: float):
    """Semicircle density (2 / (pi r^2)) sqrt((r^2 - x^2)_+)."""
    _require_radius(r)
    x = np.asarray(x, dtype=np.float64)
    out = 2.0 / (math.pi * r * r) * np.sqrt(np.clip(r * r - x * x, 0.0, None))
    return float(out) if out.ndim == 0 else out


def sc_cdf(x, r: float):
    """Semicircle CDF: 1/2 + x sqrt(r^2 - x^2) / (pi r^2) + arcsin(x/r) / pi."""
    _require_radius(r)
    x = np.asarray(x, dtype=np.float64)
    xc = np.clip(x, -r, r)
    out = 0.5 + xc * np.sqrt(r * r - xc * xc) / (math.pi * r * r) + np.arcsin(xc / r) / math.pi
    out = np.where(x <= -r, 0.0, np.where(x >= r, 1.0, out))
    return float(out) if out.ndim == 0 else out


def sc_stieltjes(z: complex, r: float) -> complex:
    """Stieltjes transform m_r(z) = -(2 / r^2)(z - sqrt(z^2 - r^2)).

    The square root branch is not pinned by the formula; of the two
    candidates exactly one maps the upper half-plane into itself, and that
    one is returned.
    """
    _require_radius(r)
    z = complex(z)
    if z.imag <= 0:
        raise DomainError(f"Im z must be positive, got z={z}")
    w = np.sqrt(complex(z * z - r * r))
    m = -(2.0 / (r * r)) * (z - w)
    if m.imag <= 0:
        m = -(2.0 / (r * r)) * (z + w)
    return complex(m)


def sc_quantile(q: float, r: float) -> float:
    """Inverse CDF on [-r, r] by bracketed root finding."""
    _require_radius(r)
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"quantile level must be in [0, 1], got {q}")
    if q == 0.0:
        return -r
    if q == 1.0:
        return r
    return brentq(lambda x: sc_cdf(x, r) - q, -r, r, xtol=1e-14, rtol=8.9e-16)


@dataclass(frozen=True)
class SemicircleLaw:
    """Wigner semicircle law with center 0 and radius ``radius``."""

    radius: float

    def __post_init__(self):
        _require_radius(self.radius)

    def density(self, x):
        return sc_density(x, self.radius)

    def cdf(self, x):
        return sc_cdf(x, self.radius)

    def stieltjes(self, z: complex) -> complex:
        return sc_stieltjes(z, self.radius)

    def quantile(self, q: float) -> float:
        return sc_quantile(q, self.radius)

    @property
    def second_moment(self) -> float:
        return self.radius * self.radius / 4.0


def radius_theta(m_order: int, gamma: float, sum_lambda_sq: float) -> float:
    """Limiting radius m(m-1) sqrt(2 gamma) sum_r lambda_r^2."""
    if m_order < 2:
        raise DomainError(f"kernel order must be >= 2, got {m_order}")
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    if not sum_lambda_sq > 0:
        raise DomainError(f"sum of squared eigenvalues must be positive, got {sum_lambda_sq}")
    return m_order * (m_order - 1) * math.sqrt(2.0 * gamma) * sum_lambda_sq


def corollary_radius(kernel_id: str, gamma: float) -> float:
    """Closed-form radius per statistic: 2 sqrt(2 gamma)/3, 2 sqrt(2 gamma),
    or 6 sqrt(2 gamma)/5 for D, R, tau* respectively."""
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    root = math.sqrt(2.0 * gamma)
    kernel_spec(kernel_id)  # validates the id
    if kernel_id == "hoeffding-d":
        return 2.0 * root / 3.0
    if kernel_id == "bkr-r":
        return 2.0 * root
    return 6.0 * root / 5.0


# ---------------------------------------------------------------------------
# Hoeffding eigen-system
# ---------------------------------------------------------------------------


def lambda_r(r) -> np.ndarray | float:
    """Eigenvalues sqrt(3) / (pi^2 r^2) of the Hoeffding h2 projection."""
    r = np.asarray(r, dtype=np.float64)
    out = math.sqrt(3.0) / (math.pi * math.pi * r * r)
    return float(out) if out.ndim == 0 else out


def psi(r, x) -> np.ndarray | float:
    """Orthonormal eigenfunctions sqrt(2) cos(pi r x) on [0, 1]."""
    out = math.sqrt(2.0) * np.cos(math.pi * np.multiply.outer(np.asarray(r, dtype=np.float64), np.asarray(x, dtype=np.float64)))
    return float(out) if out.ndim == 0 else out


def sum_lambda_sq(T: int, h2_factor: float = 1.0) -> float:
    """Partial sum of squared eigenvalues, optionally h2-factor scaled."""
    if T < 1:
        raise DomainError(f"truncation must be >= 1, got {T}")
    idx = np.arange(1, T + 1, dtype=np.float64)
    return h2_factor * 3.0 / math.pi**4 * float(np.sum(idx**-4))


def lambda_sq_tail_bound(T: int, h2_factor: float = 1.0) -> float:
    """Upper bound h2_factor * 3 / (pi^4 * 3 T^3) on the dropped tail."""
    if T < 1:
        raise DomainError(f"truncation must be >= 1, got {T}")
    return h2_factor * 3.0 / (math.pi**4 * 3.0 * T**3)


def g_closed(x, y):
    """Hoeffding projection factor (sqrt(3)/6)(3x^2 + 3y^2 - 6 max(x,y) + 2)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if np.any(x < 0) or np.any(x > 1) or np.any(y < 0) or np.any(y > 1):
        raise DomainError("g_closed is defined on [0, 1]^2")
    out = math.sqrt(3.0) / 6.0 * (3 * x * x + 3 * y * y - 6 * np.maximum(x, y) + 2)
    return float(out) if out.ndim == 0 else out


def g_series(x, y, T: int = 2000):
    """Partial sum over r <= T of lambda_r psi_r(x) psi_r(y).

    Plain partial sums converge like 1/T on the diagonal x = y, where the
    cosine terms stop oscillating; pair with :func:`lambda_sq_tail_bound`
    when reporting truncation error of squared-eigenvalue sums.
    """
    if T < 1:
        raise DomainError(f"truncation must be >= 1, got {T}")
    r = np.arange(1, T + 1, dtype=np.float64)
    lam = lambda_r(r)
    px = psi(r, x)
    py = psi(r, y)
    out = np.tensordot(lam, px * py, axes=(0, 0))
    return float(out) if out.ndim == 0 else out
