"""Seeded generators for the synthetic image families.

All randomness goes through ``numpy.random.Generator(PCG64(seed))``; the
algorithm name is written into each cube's provenance.
"""

from __future__ import annotations

import numpy as np

from .imagecube import ImageCube

RNG_ALGORITHM = "numpy.random.Generator(PCG64)"

PAVEMENT_MOTIF = np.array(
    [
        [0, 0, 0, 1, 1, 0, 0, 2],
        [0, 0, 1, 0, 0, 2, 1, 3],
    ]
)


def _rng(seed: int) -> np.random.Generator:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.PCG64(seed))


def _two_channel(f: np.ndarray, N: int) -> np.ndarray:
    """Map a value field in [0, N^2) to (f//N + f%N, N + f//N - f%N)."""
    q, r = np.divmod(f, N)
    return np.stack([q + r, N + q - r], axis=-1)


def gen_plane(N: int) -> ImageCube:
    """Two-channel plane: channel 0 = c + l, channel 1 = N + c - l; dynamics 2N."""
    if N < 2:
        raise ValueError("N must be >= 2")
    line, col = np.mgrid[0:N, 0:N]
    samples = np.stack([col + line, N + col - line], axis=-1)
    return ImageCube(samples, f"gen_plane(N={N})")


def gen_random(N: int, seed: int) -> ImageCube:
    """All N^2 channel pairs (a, b), 0 <= a, b < N, at random distinct positions."""
    if N < 2:
        raise ValueError("N must be >= 2")
    perm = _rng(seed).permutation(N * N)
    a, b = np.divmod(perm, N)
    samples = np.stack([a, b], axis=-1).reshape(N, N, 2)
    return ImageCube(samples, f"gen_random(N={N}, seed={seed}); rng={RNG_ALGORITHM}")


def hilbert_field(m: int, seed: int = 0, randomized: bool = True,
                  per_level: bool = False) -> np.ndarray:
    """Bijective value field of side 2^m built by 4-way subdivision.

    A cell of value v splits into four subcells 4v + P, P a permutation of
    [0, 1, 2, 3] laid out in raster order.  P is the identity unless
    ``randomized``; randomized draws are per cell, or one per refinement
    level with ``per_level``.
    """
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer (N = 2^m), got {m!r}")
    m = int(m)
    rng = _rng(seed)
    identity = np.arange(4)
    f = (rng.permutation(4) if randomized else identity).reshape(2, 2)
    for _ in range(1, m):
        n = f.shape[0]
        if not randomized:
            P = np.broadcast_to(identity, (n * n, 4))
        elif per_level:
            P = np.broadcast_to(rng.permutation(4), (n * n, 4))
        else:
            P = rng.permuted(np.tile(identity, (n * n, 1)), axis=1)
        P = P.reshape(n, n, 2, 2)
        f = (4 * f[:, :, None, None] + P).transpose(0, 2, 1, 3).reshape(2 * n, 2 * n)
    return f


def gen_hilbert(m: int, seed: int = 0, randomized: bool = True,
                per_level: bool = False) -> ImageCube:
    """Hilbert-type fractal of side N = 2^m mapped onto two channels of dynamics 2N."""
    f = hilbert_field(m, seed, randomized, per_level)
    N = f.shape[0]
    prov = (f"gen_hilbert(m={int(m)}, seed={seed}, randomized={randomized}, "
            f"per_level={per_level}); rng={RNG_ALGORITHM}")
    return ImageCube(_two_channel(f, N), prov)


def gen_pavement(rows: int, cols: int) -> ImageCube:
    """Single-channel pavement on which the 7 necklace classes appear equally.

    Lines alternate the two motif rows.  Columns run back and forth across
    the motif (0..7, 6..1, 0..7, ...), i.e. each extension is the mirror of
    the previous one, so every seam repeats a class pair already present.
    """
    mh, mw = PAVEMENT_MOTIF.shape
    if rows < mh or cols < mw or rows % mh or cols % mw:
        raise ValueError(
            f"pavement size must be a positive multiple of {mh}x{mw}, got {rows}x{cols}"
        )
    period = 2 * (mw - 1)
    phase = np.arange(cols) % period
    col_index = np.where(phase < mw, phase, period - phase)
    samples = np.tile(PAVEMENT_MOTIF[:, col_index], (rows // mh, 1))
    return ImageCube(samples, f"gen_pavement(rows={rows}, cols={cols})")
