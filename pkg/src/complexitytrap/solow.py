"""Capital accumulation with a subsistence threshold in the saving rate.

    Y = A K^alpha L^(1 - alpha)
    s(K) = s_max / (1 + exp(K_F - K))        (sigmoid mode)
    K' = s(K) Y + (1 - delta) K

Equilibria are the zeros of g(K) = s(K) Y(K) - delta K.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

from .panel import (Equilibrium, EquilibriumSet, SolowParams, TrajectoryPoint,
                    ValidationError)

log = logging.getLogger(__name__)

DEFAULT_N_SCAN = 2000
# lower end of the log-spaced scan, relative to K_max
SCAN_DECADES = 14


def production(p: SolowParams, K):
    K = np.asarray(K, dtype=float)
    y = p.A * np.power(K, p.alpha) * p.L ** (1.0 - p.alpha)
    return float(y) if y.ndim == 0 else y


def saving_rate(p: SolowParams, K):
    if p.saving_mode == "constant":
        s = np.full_like(np.asarray(K, dtype=float), p.s_max)
    else:
        s = p.s_max * expit(np.asarray(K, dtype=float) - p.K_F)
    return float(s) if s.ndim == 0 else s


def step_capital(p: SolowParams, K):
    K = np.asarray(K, dtype=float)
    nxt = saving_rate(p, K) * production(p, K) + (1.0 - p.delta) * K
    return nxt if np.ndim(nxt) else float(nxt)


def net_investment(p: SolowParams, K):
    """``g(K) = s(K) Y(K) - delta K``, the one-step change in capital."""
    K = np.asarray(K, dtype=float)
    g = saving_rate(p, K) * production(p, K) - p.delta * K
    return g if np.ndim(g) else float(g)


def simulate(p: SolowParams, K0: float, T: int) -> list[TrajectoryPoint]:
    """Iterate the capital map; returns ``T + 1`` points for t = 0..T."""
    if T < 1:
        raise ValidationError("T must be >= 1")
    if K0 < 0:
        raise ValidationError("K0 must be >= 0")
    out = []
    k = float(K0)
    for t in range(T + 1):
        out.append(TrajectoryPoint(t, k, production(p, k), saving_rate(p, k)))
        k = step_capital(p, k)
    return out


def map_slope(p: SolowParams, K: float, rel: float = 1e-6) -> float:
    """Central-difference derivative of the capital map at ``K``."""
    h = rel * max(K, 1e-300)
    return (step_capital(p, K + h) - step_capital(p, K - h)) / (2 * h)


def find_equilibria(p: SolowParams, K_max: float, n_scan: int = DEFAULT_N_SCAN,
                    rtol: float = 1e-10) -> EquilibriumSet:
    """Fixed points of the capital map in ``[0, K_max]`` with stability labels.

    ``g`` is scanned on a log-spaced grid from ``K_max * 1e-14`` to ``K_max``;
    each sign change is refined with Brent's method. A root is stable when
    ``g`` crosses from positive to negative. ``K = 0`` is always a fixed
    point; it is stable iff ``g`` is negative just above zero.
    """
    if not K_max > 0:
        raise ValidationError("K_max must be positive")
    if n_scan < 100:
        raise ValidationError("n_scan must be >= 100")
    ks = np.geomspace(K_max * 10.0 ** -SCAN_DECADES, K_max, n_scan)
    g = net_investment(p, ks)
    sign = np.sign(g)
    eqs = [Equilibrium(0.0, "unstable" if sign[0] > 0 else "stable")]
    for i in range(n_scan - 1):
        if sign[i] == 0:
            continue
        j = i + 1
        if sign[j] == 0:
            # exact zero on the grid: classify by its neighbours
            if j + 1 < n_scan and sign[j + 1] != sign[i] and sign[j + 1] != 0:
                eqs.append(Equilibrium(float(ks[j]),
                                       "stable" if sign[i] > 0 else "unstable"))
            continue
        if sign[i] != sign[j]:
            root = brentq(lambda k: net_investment(p, k), ks[i], ks[j],
                          xtol=1e-300, rtol=rtol, maxiter=500)
            eqs.append(Equilibrium(float(root), "stable" if sign[i] > 0 else "unstable"))
    diags = []
    if g[-1] > 0:
        msg = f"g(K_max={K_max:g}) > 0: an equilibrium may lie above K_max"
        log.warning(msg)
        diags.append(msg)
    return EquilibriumSet(tuple(eqs), tuple(diags))


def constant_saving_steady_state(p: SolowParams) -> float:
    """Closed-form ``(s A / delta)^(1 / (1 - alpha)) L`` for constant saving."""
    return (p.s_max * p.A / p.delta) ** (1.0 / (1.0 - p.alpha)) * p.L
