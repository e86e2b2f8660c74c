"""Reproducible sample generation, ranking, and monotone transforms.

Columns are drawn from independent counter-based streams keyed by
``(seed, column, attempt)``, so a column's values depend only on the seed
and its index: growing ``p`` or reordering the generation schedule never
changes earlier columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TiesError, ValidationError

MARGINS = ("uniform01", "standard-normal", "standard-cauchy", "exponential1")

#: Strictly increasing maps usable with :func:`monotone_transform`.
MONOTONE_MAPS = {
    "identity": lambda x: x,
    "cube": lambda x: x**3,
    "exp": np.exp,
    "arctan": np.arctan,
    "affine": lambda x: 2.0 * x + 1.0,
}

_MAX_TIE_RETRIES = 100


@dataclass(frozen=True)
class SampleMatrix:
    """An n-by-p block of continuous observations.

    ``margin`` and ``seed`` record provenance: they describe how ``values``
    were generated, not a distributional guarantee after transforms.
    ``retries`` counts tie-triggered redraws across all columns.
    """

    n: int
    p: int
    values: np.ndarray
    margin: str
    seed: int
    retries: int = 0

    def __post_init__(self):
        if self.values.shape != (self.n, self.p):
            raise ValidationError(
                f"values shape {self.values.shape} != ({self.n}, {self.p})"
            )

    def column(self, j: int) -> np.ndarray:
        return self.values[:, j]


def _column_generator(seed: int, column: int, attempt: int) -> np.random.Generator:
    # Philox is counter based: streams for distinct (seed, column, attempt)
    # never overlap and are independent of generation order.
    ss = np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF, spawn_key=(column, attempt))
    return np.random.Generator(np.random.Philox(ss))


def _draw_column(seed: int, column: int, margin: str, n: int, attempt: int) -> np.ndarray:
    gen = _column_generator(seed, column, attempt)
    if margin == "uniform01":
        return gen.random(n)
    if margin == "standard-normal":
        return gen.standard_normal(n)
    if margin == "standard-cauchy":
        return gen.standard_cauchy(n)
    if margin == "exponential1":
        return gen.standard_exponential(n)
    raise ValidationError(f"unknown margin {margin!r}; expected one of {MARGINS}")


def sample_matrix(n: int, p: int, margin: str, seed: int) -> SampleMatrix:
    """Draw an i.i.d. n-by-p sample with tie-free columns.

    A floating-point collision inside a column triggers a redraw of that
    column from a fresh substream, at most 100 times, after which a
    ``TiesError`` is raised.
    """
    if n < 2 or p < 2:
        raise ValidationError(f"need n >= 2 and p >= 2, got n={n}, p={p}")
    if margin not in MARGINS:
        raise ValidationError(f"unknown margin {margin!r}; expected one of {MARGINS}")
    values = np.empty((n, p))
    retries = 0
    for j in range(p):
        for attempt in range(_MAX_TIE_RETRIES + 1):
            col = _draw_column(seed, j, margin, n, attempt)
            if np.unique(col).size == n:
                values[:, j] = col
                break
            retries += 1
        else:
            raise TiesError(
                f"column {j}: ties persisted through {_MAX_TIE_RETRIES} redraws"
            )
    return SampleMatrix(n=n, p=p, values=values, margin=margin, seed=seed, retries=retries)


def column_ranks(x: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ranks[i] = #{j : x[j] <= x[i]}; ties are an error."""
    x = np.asarray(x)
    if x.ndim != 1:
        raise ValidationError("column_ranks expects a 1-d vector")
    if np.unique(x).size != x.size:
        raise TiesError("tied values in rank input")
    order = np.argsort(x, kind="stable")
    ranks = np.empty(x.size, dtype=np.int64)
    ranks[order] = np.arange(1, x.size + 1)
    return ranks


def monotone_transform(m: SampleMatrix, transforms) -> SampleMatrix:
    """Apply named strictly increasing maps column by column.

    ``transforms`` is a single map id or a length-p sequence of ids from
    ``MONOTONE_MAPS``. Ranks of every column are unchanged.
    """
    if isinstance(transforms, str):
        transforms = [transforms] * m.p
    if len(transforms) != m.p:
        raise ValidationError(f"need {m.p} transform ids, got {len(transforms)}")
    out = np.empty_like(m.values)
    for j, name in enumerate(transforms):
        try:
            fn = MONOTONE_MAPS[name]
        except KeyError:
            raise ValidationError(
                f"unknown transform {name!r}; expected one of {sorted(MONOTONE_MAPS)}"
            ) from None
        out[:, j] = fn(m.values[:, j])
    return SampleMatrix(
        n=m.n, p=m.p, values=out, margin=m.margin, seed=m.seed, retries=m.retries
    )
