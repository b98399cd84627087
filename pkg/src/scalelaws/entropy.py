"""Color and pattern Shannon entropies, (k, s) surfaces and the log-scale fit."""

from __future__ import annotations

import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .cascade import ScalePyramid, quantize_array
from .imagecube import ImageCube, color_labels
from .necklace import PatternMap, class_counts

LN7 = math.log(7.0)


def entropy_of_counts(counts) -> float:
    """Plug-in Shannon entropy in nats; an empty tally has entropy 0.

    Counts are sorted first so the value depends only on the multiset of counts.
    """
    c = np.sort(np.asarray(counts, dtype=np.float64).ravel())
    c = c[c > 0]
    total = c.sum()
    if total == 0:
        return 0.0
    p = c / total
    h = float(-(p * np.log(p)).sum())
    return max(h, 0.0) + 0.0  # no negative zero


def fmt(x) -> str:
    """Shortest round-trip decimal for CSV output, locale independent."""
    return repr(float(x) + 0.0)


def label_entropy(labels: np.ndarray) -> float:
    _, counts = np.unique(labels, return_counts=True)
    return entropy_of_counts(counts)


def shannon_entropy(cube: ImageCube) -> float:
    """Entropy of the distribution of distinct color tuples."""
    return label_entropy(color_labels(cube.samples))


def pattern_entropy(pm: PatternMap | np.ndarray) -> float:
    """Entropy of the 7-class occurrence distribution.

    Accepts a PatternMap or a raw 7-vector of counts.
    """
    counts = pm.counts if isinstance(pm, PatternMap) else pm
    return entropy_of_counts(counts)


def default_workers() -> int:
    env = os.environ.get("SCALELAWS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def level_statistics(reduced: np.ndarray, k: int, color=True, pattern=True):
    """(S_C, S_H, pattern counts) of one cascade level given its reduced samples."""
    labels = color_labels(quantize_array(reduced, k))
    s_c = label_entropy(labels) if color else math.nan
    counts = class_counts(labels) if pattern else None
    s_h = entropy_of_counts(counts) if pattern else math.nan
    return s_c, s_h, counts


@dataclass
class Sweep:
    """Raw per-cell statistics of a (k, s) grid."""

    k_grid: np.ndarray
    s_grid: np.ndarray
    S_C: np.ndarray
    S_H: np.ndarray
    counts: np.ndarray  # (len(k), len(s), 7), zero when patterns were skipped


def sweep(cube: ImageCube, k_grid, s_grid, color=True, pattern=True,
          workers: int | None = None, pyramid: ScalePyramid | None = None) -> Sweep:
    """Evaluate every (k, s) cell; each cell is computed in isolation so the
    result does not depend on the worker count."""
    k_grid = np.asarray(list(k_grid), dtype=np.int64)
    s_grid = np.asarray(list(s_grid), dtype=np.int64)
    _check_grid(cube, k_grid, s_grid)
    pyramid = pyramid or ScalePyramid(cube)
    workers = workers or default_workers()
    S_C = np.full((len(k_grid), len(s_grid)), np.nan)
    S_H = np.full_like(S_C, np.nan)
    counts = np.zeros((len(k_grid), len(s_grid), 7), dtype=np.int64)

    def run(ks_index):
        ki, si, reduced = ks_index
        return ki, si, level_statistics(reduced, int(k_grid[ki]), color, pattern)

    jobs = []
    for si, s in enumerate(s_grid):
        reduced = pyramid[int(s)]
        jobs.extend((ki, si, reduced) for ki in range(len(k_grid)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs, chunksize=16))
    else:
        results = [run(j) for j in jobs]
    for ki, si, (s_c, s_h, cnt) in results:
        S_C[ki, si] = s_c
        S_H[ki, si] = s_h
        if cnt is not None:
            counts[ki, si] = cnt
    return Sweep(k_grid, s_grid, S_C, S_H, counts)


def _check_grid(cube: ImageCube, k_grid: np.ndarray, s_grid: np.ndarray) -> None:
    if len(k_grid) == 0 or len(s_grid) == 0:
        raise ValueError("empty grid")
    if np.any(np.diff(k_grid) <= 0) or np.any(np.diff(s_grid) <= 0):
        raise ValueError("grids must be strictly ascending")
    if k_grid[0] < 1 or k_grid[-1] > cube.k_max:
        raise ValueError(f"k grid outside [1, {cube.k_max}]")
    smax = min(cube.width, cube.height)
    if s_grid[0] < 1 or s_grid[-1] > smax:
        raise ValueError(f"s grid outside [1, {smax}]")


@dataclass
class EntropySurface:
    k_grid: np.ndarray
    s_grid: np.ndarray
    S_C: np.ndarray  # indexed [k index, s index]
    S_H: np.ndarray

    def column(self, s: int, which: str = "S_H") -> np.ndarray:
        return getattr(self, which)[:, self.s_index(s)]

    def s_index(self, s: int) -> int:
        hits = np.nonzero(self.s_grid == s)[0]
        if len(hits) == 0:
            raise KeyError(f"scale {s} not in surface")
        return int(hits[0])

    def k_index(self, k: int) -> int:
        hits = np.nonzero(self.k_grid == k)[0]
        if len(hits) == 0:
            raise KeyError(f"level {k} not in surface")
        return int(hits[0])

    def at(self, k: int, s: int) -> tuple[float, float]:
        ki, si = self.k_index(k), self.s_index(s)
        return float(self.S_C[ki, si]), float(self.S_H[ki, si])

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("k,s,S_C,S_H\n")
        for ki, k in enumerate(self.k_grid):
            for si, s in enumerate(self.s_grid):
                out.write(f"{k},{s},{fmt(self.S_C[ki, si])},{fmt(self.S_H[ki, si])}\n")
        return out.getvalue()


def entropy_surface(cube: ImageCube, k_grid=None, s_grid=None,
                    workers: int | None = None) -> EntropySurface:
    """S_C and S_H over the cascade.  Defaults: k = 1..k_max, s = 1..min(W, Hgt)//2."""
    if k_grid is None:
        k_grid = range(1, cube.k_max + 1)
    if s_grid is None:
        s_grid = range(1, max(min(cube.width, cube.height) // 2, 1) + 1)
    sw = sweep(cube, k_grid, s_grid, workers=workers)
    return EntropySurface(sw.k_grid, sw.s_grid, sw.S_C, sw.S_H)


def surface_from_sweep(sw: Sweep, s_limit: int | None = None) -> EntropySurface:
    keep = sw.s_grid <= s_limit if s_limit is not None else np.ones(len(sw.s_grid), bool)
    return EntropySurface(sw.k_grid, sw.s_grid[keep], sw.S_C[:, keep], sw.S_H[:, keep])


# ------------------------------------------------------------- log-scale law


@dataclass
class FitResult:
    a: float
    b: float
    sigma_a: float
    sigma_b: float
    rms_residual: float
    n_points: int
    abscissa: str = "nominal"

    def to_dict(self) -> dict:
        d = asdict(self)
        return {"a": d["a"], "b": d["b"], "sigma_a": d["sigma_a"],
                "sigma_b": d["sigma_b"], "rms": d["rms_residual"],
                "n": d["n_points"], "abscissa": d["abscissa"]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def log_scale_abscissa(s, N: int, abscissa: str = "nominal") -> np.ndarray:
    """ln(s/N), or with ``retained`` ln(s / (s*floor(N/s))) = -ln floor(N/s).

    ``retained`` measures scale against the extent actually kept after the
    crop to whole blocks; both agree whenever s divides N.
    """
    s = np.asarray(s, dtype=np.float64)
    if abscissa == "nominal":
        return np.log(s / N)
    if abscissa == "retained":
        return -np.log(np.floor(N / s))
    raise ValueError(f"unknown abscissa {abscissa!r}")


def fit_log_scale(S_of_s, N: int, abscissa: str = "nominal") -> FitResult:
    """Ordinary least squares of S against ln(s/N).

    Standard errors come from the OLS covariance with residual variance
    sum(e^2)/(n-2).
    """
    pts = np.asarray(list(S_of_s), dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise ValueError("need at least 3 (s, S) points")
    s, S = pts[:, 0], pts[:, 1]
    if np.any(s < 1):
        raise ValueError("scales must be >= 1")
    x = log_scale_abscissa(s, N, abscissa)
    if np.ptp(x) == 0:
        raise ValueError("degenerate abscissa: all scales equal")
    X = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(X, S, rcond=None)
    resid = S - X @ coef
    n = len(S)
    var = float(resid @ resid) / (n - 2)
    cov = var * np.linalg.inv(X.T @ X)
    return FitResult(
        a=float(coef[0]),
        b=float(coef[1]),
        sigma_a=float(math.sqrt(max(cov[0, 0], 0.0))),
        sigma_b=float(math.sqrt(max(cov[1, 1], 0.0))),
        rms_residual=float(math.sqrt(float(resid @ resid) / n)),
        n_points=n,
        abscissa=abscissa,
    )


def max_over_k(surface: EntropySurface, s: int) -> tuple[int, float]:
    """(k*, S_H max) at scale s; ties go to the smallest k."""
    col = surface.column(s, "S_H")
    i = int(np.argmax(col))
    return int(surface.k_grid[i]), float(col[i])
