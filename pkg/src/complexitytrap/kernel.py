"""Nadaraya-Watson regression with a Gaussian (product) kernel.

Bootstrap bands resample (x, y) pairs. Because the weights of a resample are
the original weights counted with multiplicity, every resample reduces to two
matrix products against a count matrix, so the whole band costs about as
much as ``B`` plain weighted sums.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .panel import KernelEstimate, ValidationError

SUPPORT_FLOOR = 5.0
DEFAULT_GRID_N = 100
DEFAULT_B = 1000
DEFAULT_LEVEL = 0.90
_CHUNK = 256


def bandwidth_default(xs: Sequence[float]) -> float:
    """Silverman's rule, ``1.06 min(sd, IQR/1.34) n^(-1/5)``.

    Falls back to the standard deviation alone when the IQR is zero.
    """
    x = np.asarray(xs, dtype=float)
    if x.size < 2 or np.ptp(x) == 0:
        raise ValidationError("bandwidth needs at least two distinct values")
    sd = float(np.std(x, ddof=1))
    q75, q25 = np.percentile(x, [75, 25])
    spread = min(sd, (q75 - q25) / 1.34) or sd
    return 1.06 * spread * x.size ** (-0.2)


def default_grid(xs: Sequence[float], n: int = DEFAULT_GRID_N) -> np.ndarray:
    x = np.asarray(xs, dtype=float)
    return np.linspace(x.min(), x.max(), n)


def default_grid_2d(x1s, x2s, n: int = DEFAULT_GRID_N) -> np.ndarray:
    """Row-major product grid: ``x1`` varies slowest."""
    g1, g2 = default_grid(x1s, n), default_grid(x2s, n)
    return np.column_stack([np.repeat(g1, g2.size), np.tile(g2, g1.size)])


def _log_weights(xs: np.ndarray, grid: np.ndarray, hs: Sequence[float]) -> np.ndarray:
    """``-sum_d (g_d - x_d)^2 / (2 h_d^2)`` with shape (G, n)."""
    out = np.zeros((grid.shape[0], xs.shape[0]))
    for d, h in enumerate(hs):
        out -= (grid[:, d, None] - xs[None, :, d]) ** 2 / (2.0 * h * h)
    return out


def _prepare(xcols, ys, grid, hs):
    ys = np.asarray(ys, dtype=float)
    xs = np.column_stack([np.asarray(c, dtype=float) for c in xcols])
    if ys.ndim != 1 or ys.size == 0:
        raise ValidationError("kernel regression needs at least one observation")
    if xs.shape[0] != ys.size:
        raise ValidationError("x and y have different lengths")
    grid = np.asarray(grid, dtype=float).reshape(-1, len(xcols))
    hs = tuple(float(h) for h in hs)
    if not all(h > 0 for h in hs):
        raise ValidationError("bandwidth must be positive")
    logw = _log_weights(xs, grid, hs)
    # rescale each grid row by its largest weight; the ratio is unchanged
    scaled = np.exp(logw - logw.max(axis=1, keepdims=True))
    return ys, grid, hs, np.exp(logw), scaled


def _fit(xcols, ys, grid, hs) -> KernelEstimate:
    ys, grid, hs, w, scaled = _prepare(xcols, ys, grid, hs)
    # centring on one response value makes a constant response exact
    ref = ys[0]
    est = (scaled @ (ys - ref)) / scaled.sum(axis=1) + ref
    n_eff = w.sum(axis=1)
    g = grid[:, 0] if len(xcols) == 1 else grid
    return KernelEstimate(grid=g, estimate=est, bandwidth=hs, n_effective=n_eff,
                          supported=n_eff >= SUPPORT_FLOOR)


def nw_1d(xs, ys, grid, h: float) -> KernelEstimate:
    """Kernel-weighted mean of ``ys`` at each grid point."""
    return _fit([xs], ys, grid, (h,))


def nw_2d(x1s, x2s, ys, grid, h1: float, h2: float) -> KernelEstimate:
    """Two-variable version with product weights; ``grid`` is a (G, 2) array."""
    return _fit([x1s, x2s], ys, grid, (h1, h2))


def resample_counts(n: int, B: int, seed: int) -> np.ndarray:
    """Multiplicity of each observation in each of ``B`` resamples, shape (B, n).

    Resample ``b`` draws from its own stream seeded by ``(seed, b)``, so any
    subset of resamples can be regenerated independently.
    """
    counts = np.empty((B, n))
    for b in range(B):
        idx = np.random.default_rng([seed, b]).integers(0, n, size=n)
        counts[b] = np.bincount(idx, minlength=n)
    return counts


def bootstrap_band(xs, ys, grid, h, B: int = DEFAULT_B, level: float = DEFAULT_LEVEL,
                   seed: int = 0, x2s=None) -> KernelEstimate:
    """Point estimate plus percentile bootstrap band.

    Pass ``x2s`` (and a pair ``h``) for the two-variable estimator. A
    resample with no numerical support at a grid point contributes nothing
    there; the number of such omissions is reported as ``n_omitted``. The
    band is widened where needed so it always contains the point estimate.
    """
    if B < 100:
        raise ValidationError("bootstrap needs B >= 100")
    if not 0 < level < 1:
        raise ValidationError("level must lie in (0, 1)")
    xcols = [xs] if x2s is None else [xs, x2s]
    hs = (h,) if x2s is None else tuple(h)
    base = _fit(xcols, ys, grid, hs)
    ys, _, _, _, scaled = _prepare(xcols, ys, grid, hs)
    counts = resample_counts(ys.size, B, seed)
    num = np.empty((B, scaled.shape[0]))
    den = np.empty_like(num)
    ref = ys[0]
    wy = scaled * (ys - ref)[None, :]
    for lo in range(0, B, _CHUNK):
        c = counts[lo:lo + _CHUNK]
        num[lo:lo + _CHUNK] = c @ wy.T
        den[lo:lo + _CHUNK] = c @ scaled.T
    with np.errstate(invalid="ignore", divide="ignore"):
        boot = np.where(den > 0, num / den + ref, np.nan)
    omitted = int(np.isnan(boot).sum())
    tail = (1.0 - level) / 2.0
    lo_q, hi_q = np.nanquantile(boot, [tail, 1.0 - tail], axis=0)
    lo_q = np.minimum(lo_q, base.estimate)
    hi_q = np.maximum(hi_q, base.estimate)
    return KernelEstimate(grid=base.grid, estimate=base.estimate,
                          bandwidth=base.bandwidth, n_effective=base.n_effective,
                          supported=base.supported, ci_low=lo_q, ci_high=hi_q,
                          n_omitted=omitted)


def kernel_1d(xs, ys, grid=None, h: Optional[float] = None, B: Optional[int] = DEFAULT_B,
              level: float = DEFAULT_LEVEL, seed: int = 0,
              grid_n: int = DEFAULT_GRID_N) -> KernelEstimate:
    """Convenience wrapper filling in the default grid and bandwidth.

    ``B=None`` (or 0) skips the bootstrap.
    """
    grid = default_grid(xs, grid_n) if grid is None else grid
    h = bandwidth_default(xs) if h is None else h
    if not B:
        return nw_1d(xs, ys, grid, h)
    return bootstrap_band(xs, ys, grid, h, B=B, level=level, seed=seed)


def kernel_2d(x1s, x2s, ys, grid=None, h=None, B: Optional[int] = DEFAULT_B,
              level: float = DEFAULT_LEVEL, seed: int = 0,
              grid_n: int = DEFAULT_GRID_N) -> KernelEstimate:
    grid = default_grid_2d(x1s, x2s, grid_n) if grid is None else grid
    if h is None:
        h = (bandwidth_default(x1s), bandwidth_default(x2s))
    if not B:
        return nw_2d(x1s, x2s, ys, grid, *h)
    return bootstrap_band(x1s, ys, grid, h, B=B, level=level, seed=seed, x2s=x2s)


def threshold(k: KernelEstimate, fraction: float = 0.5) -> Optional[float]:
    """Lowest supported grid point where the estimate exceeds ``fraction`` of its maximum.

    Only meaningful in one dimension. Returns ``None`` when no point is
    supported or the supported maximum is not positive.
    """
    if k.dim != 1:
        raise ValidationError("threshold needs a 1-D estimate")
    sup = k.supported
    if not sup.any():
        return None
    top = float(k.estimate[sup].max())
    if not top > 0:
        return None
    idx = np.nonzero(sup & (k.estimate > fraction * top))[0]
    return float(k.grid[idx[0]])
