"""Entropy production across scale and integral-fluctuation statistics."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .cascade import ScalePyramid
from .entropy import Sweep, fmt, sweep
from .imagecube import ImageCube

COLOR = "color"
PATTERN = "pattern"


@dataclass(frozen=True)
class OmegaPair:
    """Scale-averaged exp(+/- dS) at one cascade level.

    ``omega_literal_*`` keep the literal prefactor used for the pattern mode,
    1/(N/2 - 1) over N/2 terms; in color mode they equal the plain means.
    """

    omega_plus: float
    omega_minus: float
    k: int
    n_terms: int
    omega_literal_plus: float
    omega_literal_minus: float
    mode: str = PATTERN

    @property
    def deviation(self) -> float:
        return max(abs(self.omega_plus - 1.0), abs(self.omega_minus - 1.0))


def _square_side(cube: ImageCube, minimum: int) -> int:
    if cube.width != cube.height:
        raise ValueError(
            f"fluctuation analysis needs a square image, got {cube.width}x{cube.height}"
        )
    if cube.width < minimum:
        raise ValueError(f"side {cube.width} below the minimum {minimum}")
    return cube.width


def scale_range(N: int, mode: str) -> range:
    """Scales whose entropies enter the sum: 1..N (color) or 1..N/2+1 (pattern)."""
    if mode == COLOR:
        return range(1, N + 1)
    if mode == PATTERN:
        return range(1, N // 2 + 2)
    raise ValueError(f"unknown mode {mode!r}")


def omega_from_entropies(S, k: int, mode: str) -> OmegaPair:
    """Omega from entropies S(s) at consecutive scales s = 1, 2, ..."""
    dS = np.diff(np.asarray(S, dtype=np.float64))
    n = len(dS)
    plus = float(np.exp(dS).sum())
    minus = float(np.exp(-dS).sum())
    norm = n if mode == COLOR else n - 1
    return OmegaPair(
        omega_plus=plus / n,
        omega_minus=minus / n,
        k=int(k),
        n_terms=n,
        omega_literal_plus=plus / norm,
        omega_literal_minus=minus / norm,
        mode=mode,
    )


def _series_sweep(cube, k_grid, mode, workers, pyramid) -> Sweep:
    N = _square_side(cube, 3 if mode == COLOR else 6)
    scales = scale_range(N, mode)
    return sweep(cube, k_grid, scales, color=(mode == COLOR),
                 pattern=(mode == PATTERN), workers=workers, pyramid=pyramid)


def _entropies(sw: Sweep, ki: int, mode: str) -> np.ndarray:
    return sw.S_C[ki] if mode == COLOR else sw.S_H[ki]


def omegas(cube: ImageCube, k_grid, mode: str = PATTERN, workers=None,
           pyramid: ScalePyramid | None = None, sw: Sweep | None = None) -> list[OmegaPair]:
    """OmegaPair for every k of ``k_grid``; ``sw`` may carry a precomputed sweep
    whose s grid starts at 1 and covers the mode's scale range."""
    if sw is None:
        sw = _series_sweep(cube, k_grid, mode, workers, pyramid)
    N = _square_side(cube, 3 if mode == COLOR else 6)
    n_scales = len(scale_range(N, mode))
    if not np.array_equal(sw.s_grid[:n_scales], np.arange(1, n_scales + 1)):
        raise ValueError("sweep does not cover consecutive scales from 1")
    out = []
    for k in k_grid:
        ki = int(np.nonzero(sw.k_grid == k)[0][0])
        out.append(omega_from_entropies(_entropies(sw, ki, mode)[:n_scales], k, mode))
    return out


def omega_image(cube: ImageCube, k: int, workers=None) -> OmegaPair:
    """Mean of exp(+/- dS) over the N-1 color-entropy steps s -> s+1, s = 1..N-1."""
    return omegas(cube, [k], COLOR, workers)[0]


def omega_patterns(cube: ImageCube, k: int, workers=None) -> OmegaPair:
    """Mean of exp(+/- dS_H) over the N/2 pattern-entropy steps s -> s+1, s = 1..N/2."""
    return omegas(cube, [k], PATTERN, workers)[0]


def delta_entropy_series(cube: ImageCube, k: int, mode: str = PATTERN,
                         workers=None) -> list[tuple[int, float]]:
    """(s, S(s+1) - S(s)) for every step entering the Omega sums."""
    sw = _series_sweep(cube, [k], mode, workers, None)
    S = _entropies(sw, 0, mode)
    return [(int(s), float(d)) for s, d in zip(sw.s_grid[:-1], np.diff(S))]


def omega_csv(pairs) -> str:
    out = io.StringIO()
    out.write("k,omega_plus,omega_minus,omega_literal_plus,omega_literal_minus,n_terms\n")
    for p in pairs:
        out.write(
            f"{p.k},{fmt(p.omega_plus)},{fmt(p.omega_minus)},"
            f"{fmt(p.omega_literal_plus)},{fmt(p.omega_literal_minus)},{p.n_terms}\n"
        )
    return out.getvalue()


def jensen_holds(pair: OmegaPair, deltas) -> bool:
    """Omega_+ >= exp(mean dS) and Omega_- >= exp(-mean dS)."""
    mean = float(np.mean([d for _, d in deltas])) if deltas else 0.0
    eps = 1e-12
    return (pair.omega_plus >= math.exp(mean) - eps
            and pair.omega_minus >= math.exp(-mean) - eps)
