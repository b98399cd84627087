"""Independent oracles shared by the test modules."""

import itertools
import math
from collections import Counter

import numpy as np


def brute_necklace(quad):
    """Lexicographic minimum over the 4 rotations and all injective relabelings onto 0..3."""
    symbols = sorted(set(quad), key=repr)
    best = None
    for image in itertools.permutations(range(4), len(symbols)):
        relabel = dict(zip(symbols, image))
        for r in range(4):
            rotated = quad[r:] + quad[:r]
            word = "".join(str(relabel[x]) for x in rotated)
            if best is None or word < best:
                best = word
    return best


def set_partitions(n):
    """All set partitions of range(n), as label tuples in restricted-growth form."""
    def grow(prefix, top):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for v in range(top + 2):
            yield from grow(prefix + [v], max(top, v))
    yield from grow([0], 0)


def counter_entropy(counter):
    total = sum(counter.values())
    return -sum(c / total * math.log(c / total) for c in counter.values())


def pixel_tuples(samples):
    h, w, c = samples.shape
    return [tuple(samples[y, x].tolist()) for y in range(h) for x in range(w)]


def block_means_oracle(samples, s):
    """Pure-python s x s block means with cropping."""
    h, w, c = samples.shape
    out = []
    for by in range(h // s):
        row = []
        for bx in range(w // s):
            acc = [0.0] * c
            for y in range(by * s, by * s + s):
                for x in range(bx * s, bx * s + s):
                    for ch in range(c):
                        acc[ch] += samples[y, x, ch]
            row.append([a / (s * s) for a in acc])
        out.append(row)
    return np.array(out, dtype=np.float64).reshape(h // s, w // s, c)
