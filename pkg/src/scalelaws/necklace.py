"""2x2 local patterns reduced to the 7 unlabeled necklaces (4, 4)."""

from __future__ import annotations

import enum
import io
import itertools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .imagecube import ImageCube, color_labels

# positions of a quad in perimeter order: (x,y) (x+1,y) (x+1,y+1) (x,y+1)
SIDE_PAIRS = ((0, 1), (1, 2), (2, 3), (3, 0))
DIAGONAL_PAIRS = ((0, 2), (1, 3))
PAIRS = SIDE_PAIRS + DIAGONAL_PAIRS


def canonical_necklace(quad) -> str:
    """Minimal first-occurrence relabeling over the 4 rotations."""
    quad = list(quad)
    best = None
    for r in range(4):
        rotated = quad[r:] + quad[:r]
        seen = {}
        word = "".join(str(seen.setdefault(x, len(seen))) for x in rotated)
        if best is None or word < best:
            best = word
    return best


def _pair_energy(word: str) -> float:
    total = 0.0
    for i, j in SIDE_PAIRS:
        total += word[i] == word[j]
    for i, j in DIAGONAL_PAIRS:
        total += (word[i] == word[j]) / math.sqrt(2.0)
    return total


class PatternClass(enum.Enum):
    N0000 = "0000"
    N0001 = "0001"
    N0011 = "0011"
    N0012 = "0012"
    N0101 = "0101"
    N0102 = "0102"
    N0123 = "0123"

    @property
    def index(self) -> int:
        return _INDEX[self]

    @property
    def hamiltonian_weight(self) -> float:
        return _pair_energy(self.value)

    @classmethod
    def from_index(cls, i: int) -> "PatternClass":
        return CLASSES[i]

    def __str__(self):
        return self.value


CLASSES = tuple(PatternClass)
CLASS_NAMES = tuple(c.value for c in CLASSES)
_INDEX = {c: i for i, c in enumerate(CLASSES)}
_BY_WORD = {c.value: c for c in CLASSES}


def classify_quad(quad) -> PatternClass:
    """Necklace class of 4 colors given in perimeter order.

    Colors may be scalars or equal-length tuples; equality is exact.
    """
    quad = list(quad)
    if len(quad) != 4:
        raise ValueError(f"a quad has 4 colors, got {len(quad)}")
    keys = []
    for q in quad:
        keys.append(tuple(q) if isinstance(q, (tuple, list, np.ndarray)) else (q,))
    if len({len(k) for k in keys}) != 1:
        raise ValueError("colors of a quad must have the same channel count")
    return _BY_WORD[canonical_necklace(keys)]


def hamiltonian_value(c: PatternClass) -> float:
    """Sum over the 6 pixel pairs of delta / distance (1 for sides, sqrt 2 for diagonals)."""
    return c.hamiltonian_weight


def _build_lookup() -> np.ndarray:
    # 6-bit equality code of the pairs in PAIRS -> class index
    lut = np.full(64, -1, dtype=np.int8)
    for labels in itertools.product(range(4), repeat=4):
        code = sum(
            int(labels[i] == labels[j]) << b for b, (i, j) in enumerate(PAIRS)
        )
        lut[code] = classify_quad(labels).index
    return lut


CODE_LOOKUP = _build_lookup()


def classify_labels(labels: np.ndarray) -> np.ndarray:
    """Class index for every 2x2 anchor of an integer label grid (Hgt, W)."""
    h, w = labels.shape
    if h < 2 or w < 2:
        return np.zeros((max(h - 1, 0), max(w - 1, 0)), dtype=np.int8)
    corners = (labels[:-1, :-1], labels[:-1, 1:], labels[1:, 1:], labels[1:, :-1])
    code = np.zeros((h - 1, w - 1), dtype=np.uint8)
    for bit, (i, j) in enumerate(PAIRS):
        code |= (corners[i] == corners[j]).view(np.uint8) << np.uint8(bit)
    return CODE_LOOKUP[code]


def class_counts(labels: np.ndarray) -> np.ndarray:
    """Occurrence tally of the 7 classes over a label grid."""
    cls = classify_labels(labels)
    return np.bincount(cls.ravel(), minlength=7).astype(np.int64)


@dataclass(frozen=True, eq=False)
class PatternMap:
    """Class index (0..6, ordered as CLASSES) per anchor, shape (Hgt-1, W-1)."""

    grid: np.ndarray

    @property
    def counts(self) -> np.ndarray:
        return np.bincount(self.grid.ravel(), minlength=7).astype(np.int64)

    @property
    def anchors(self) -> int:
        return int(self.grid.size)

    def counts_by_class(self) -> dict[PatternClass, int]:
        return {c: int(n) for c, n in zip(CLASSES, self.counts)}

    def __getitem__(self, xy) -> PatternClass:
        x, y = xy
        return CLASSES[int(self.grid[y, x])]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("pattern,count\n")
        for name, n in zip(CLASS_NAMES, self.counts):
            out.write(f"{name},{int(n)}\n")
        return out.getvalue()

    def save_pgm(self, path) -> None:
        """8-bit PGM with class index i stored as round(i * 255 / 6)."""
        h, w = self.grid.shape
        gray = np.round(self.grid.astype(np.float64) * 255.0 / 6.0).astype(np.uint8)
        Path(path).write_bytes(f"P5\n{w} {h}\n255\n".encode() + gray.tobytes())


def pattern_map(cube: ImageCube) -> PatternMap:
    """Classify every anchor (x, y), 0 <= x < W-1, 0 <= y < Hgt-1, without wrap-around.

    A cube narrower than 2 pixels yields an empty map.
    """
    grid = classify_labels(color_labels(cube.samples))
    grid.flags.writeable = False
    return PatternMap(grid)
