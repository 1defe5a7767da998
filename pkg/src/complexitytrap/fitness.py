"""Nonlinear fitness-complexity ranking of countries and products.

One step maps (F, Q) to

    F~_c = sum_p M_cp Q_p
    Q~_p = 1 / sum_c M_cp / F_c
    F = F~ / mean(F~),  Q = Q~ / mean(Q~)

Sums are taken over sorted terms so that relabelling countries or products
permutes the output bit-for-bit.
"""

from __future__ import annotations

import logging
from typing import Iterator, NamedTuple, Optional

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.stats import rankdata

from .panel import CountryProductMatrix, FitnessResult, ValidationError

log = logging.getLogger(__name__)

FLOOR = 1e-12
DEFAULT_MAX_ITER = 1000
DEFAULT_TOL = 1e-8
RANK_WINDOW = 10
SCHEMES = ("sequential", "simultaneous")

# relative change at or below this counts as an exact fixed point
_STATIONARY = 4 * np.finfo(float).eps


class Step(NamedTuple):
    fitness: np.ndarray
    complexity: np.ndarray
    floored: bool


def _as_array(m) -> np.ndarray:
    arr = m.m if isinstance(m, CountryProductMatrix) else np.asarray(m)
    arr = arr.astype(float)
    if arr.ndim != 2 or arr.size == 0:
        raise ValidationError("fitness needs a non-empty 2-D matrix")
    if (arr.sum(axis=1) == 0).any() or (arr.sum(axis=0) == 0).any():
        raise ValidationError("matrix has an all-zero row or column")
    return arr


def _sorted_sum(a: np.ndarray) -> np.ndarray:
    """Row sums over ascending terms; the C layout pins numpy's summation order."""
    return np.ascontiguousarray(np.sort(a, axis=-1)).sum(axis=-1)


def _normalized(v: np.ndarray) -> np.ndarray:
    return v / (_sorted_sum(v) / v.size)


def _fitness_update(m: np.ndarray, q: np.ndarray) -> np.ndarray:
    return _normalized(_sorted_sum(m * q[None, :]))


def _complexity_update(m: np.ndarray, f: np.ndarray, floor: float):
    low = f < floor
    inv = 1.0 / np.maximum(f, floor)
    q = 1.0 / _sorted_sum((m * inv[:, None]).T)
    return _normalized(q), bool(low.any())


def fitness_step(m, fitness, complexity, *, floor: float = FLOOR,
                 scheme: str = "sequential") -> Step:
    """Apply one fitness-complexity update.

    With ``scheme="sequential"`` (default) the complexity update uses the
    freshly normalised fitness of this step; ``"simultaneous"`` uses the
    incoming fitness for both updates. The two share their fixed points.
    Fitness values below ``floor`` are clamped inside the reciprocal sum and
    reported through ``Step.floored``.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    arr = _as_array(m)
    f = np.asarray(fitness, dtype=float)
    q = np.asarray(complexity, dtype=float)
    if f.shape != (arr.shape[0],) or q.shape != (arr.shape[1],):
        raise ValidationError("fitness/complexity length does not match matrix")
    f_new = _fitness_update(arr, q)
    q_new, floored = _complexity_update(
        arr, f_new if scheme == "sequential" else f, floor)
    return Step(f_new, q_new, floored)


def iterates(m, fitness0=None, complexity0=None, *, floor: float = FLOOR,
             scheme: str = "sequential") -> Iterator[tuple[int, Step]]:
    """Endless stream ``(n, Step)`` for n = 1, 2, ... from the given start."""
    arr = _as_array(m)
    f = np.ones(arr.shape[0]) if fitness0 is None else _normalized(
        np.asarray(fitness0, dtype=float))
    q = np.ones(arr.shape[1]) if complexity0 is None else _normalized(
        np.asarray(complexity0, dtype=float))
    n = 0
    while True:
        n += 1
        step = fitness_step(arr, f, q, floor=floor, scheme=scheme)
        f, q = step.fitness, step.complexity
        yield n, step


def _ranking(f: np.ndarray) -> np.ndarray:
    return rankdata(-f, method="min")


def _max_rel_change(new: np.ndarray, old: np.ndarray, floor: float) -> float:
    mask = (new > floor) & (old > floor)
    if not mask.any():
        return 0.0
    return float(np.max(np.abs(new[mask] - old[mask]) / old[mask]))


def bipartite_components(m) -> int:
    """Number of connected components of the country-product graph."""
    arr = _as_array(m)
    adj = sparse.bmat([[None, sparse.csr_matrix(arr)],
                       [sparse.csr_matrix(arr.T), None]])
    return int(connected_components(adj, directed=False)[0])


def iterate_fitness(m: CountryProductMatrix, max_iter: int = DEFAULT_MAX_ITER,
                    tol: float = DEFAULT_TOL, *, floor: float = FLOOR,
                    rank_window: int = RANK_WINDOW, scheme: str = "sequential",
                    fitness0: Optional[np.ndarray] = None,
                    complexity0: Optional[np.ndarray] = None) -> FitnessResult:
    """Iterate :func:`fitness_step` from the all-ones start until convergence.

    Convergence needs both a maximum relative change below ``tol`` among
    components above ``floor`` and an unchanged country ranking over the
    last ``rank_window`` iterations. A step that reproduces its input to
    rounding is a fixed point and ends the run at once. Running out of
    ``max_iter`` is not an error; the result then has ``converged=False``.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if not tol > 0:
        raise ValueError("tol must be positive")
    arr = _as_array(m)
    f = np.ones(arr.shape[0]) if fitness0 is None else _normalized(
        np.asarray(fitness0, dtype=float))
    q = np.ones(arr.shape[1]) if complexity0 is None else _normalized(
        np.asarray(complexity0, dtype=float))
    rank = _ranking(f)
    last_change = 0
    floored = False
    converged = False
    n = 0
    for n, step in iterates(arr, f, q, floor=floor, scheme=scheme):
        floored |= step.floored
        change = max(_max_rel_change(step.fitness, f, floor),
                     _max_rel_change(step.complexity, q, floor))
        new_rank = _ranking(step.fitness)
        if not np.array_equal(new_rank, rank):
            last_change = n
        rank = new_rank
        f, q = step.fitness, step.complexity
        if change <= _STATIONARY or (change < tol and n - last_change >= rank_window):
            converged = True
            break
        if n >= max_iter:
            break
    if not converged:
        log.info("fitness did not converge in %d iterations (year %s)",
                 max_iter, getattr(m, "year", None))
    if isinstance(m, CountryProductMatrix):
        year, countries, products = m.year, m.countries, m.products
    else:
        year = 0
        countries = tuple(f"c{i}" for i in range(arr.shape[0]))
        products = tuple(f"p{j}" for j in range(arr.shape[1]))
    return FitnessResult(year=year, countries=countries, products=products,
                         fitness=f, complexity=q, iterations=n,
                         converged=converged, rank_stable_at=last_change,
                         floored=floored, n_components=bipartite_components(arr))


def rank_of(fit: FitnessResult) -> dict[str, int]:
    """Competition ranks, 1 for the highest fitness; ties share the smaller rank."""
    return dict(zip(fit.countries, _ranking(fit.fitness).astype(int).tolist()))
