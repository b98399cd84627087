"""The (k, s) cascade: box reduction to scale s, then euclidean division by k."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imagecube import ImageCube


@dataclass(frozen=True)
class CascadeParams:
    k: int
    s: int

    def validate(self, cube: ImageCube) -> None:
        if not 1 <= self.k <= cube.k_max:
            raise ValueError(f"k={self.k} outside [1, {cube.k_max}]")
        if not 1 <= self.s <= min(cube.width, cube.height):
            raise ValueError(
                f"s={self.s} outside [1, {min(cube.width, cube.height)}]"
            )


def reduce_array(samples: np.ndarray, s: int) -> np.ndarray:
    """Non-overlapping s x s block means of an (H, W, C) array.

    Trailing lines/columns that do not fill a whole block are dropped.
    """
    h, w, c = samples.shape
    if not 1 <= s <= min(h, w):
        raise ValueError(f"scale s={s} outside [1, {min(h, w)}]")
    if s == 1:
        return samples
    hh, ww = h // s, w // s
    blocks = samples[: hh * s, : ww * s].reshape(hh, s, ww, s, c)
    return blocks.sum(axis=(1, 3)) / (s * s)


def block_reduce(cube: ImageCube, s: int) -> ImageCube:
    if s == 1:
        return cube
    return ImageCube(reduce_array(cube.samples, s), cube.provenance)


def quantize_array(samples: np.ndarray, k: int) -> np.ndarray:
    if k < 1:
        raise ValueError(f"dynamics divisor k must be >= 1, got {k}")
    if k == 1:
        return np.floor(samples)
    return np.floor(samples / k)


def quantize(cube: ImageCube, k: int) -> ImageCube:
    return ImageCube(quantize_array(cube.samples, k), cube.provenance)


def cascade_level(cube: ImageCube, p: CascadeParams) -> ImageCube:
    """C(k, s): reduce first, then quantize."""
    p.validate(cube)
    return quantize(block_reduce(cube, p.s), p.k)


class ScalePyramid:
    """Caches block reductions of one cube so every k reuses them."""

    def __init__(self, cube: ImageCube):
        self.cube = cube
        self._levels: dict[int, np.ndarray] = {1: cube.samples}

    def __getitem__(self, s: int) -> np.ndarray:
        try:
            return self._levels[s]
        except KeyError:
            r = reduce_array(self.cube.samples, s)
            r.flags.writeable = False
            self._levels[s] = r
            return r

    def level(self, k: int, s: int) -> np.ndarray:
        return quantize_array(self[s], k)
