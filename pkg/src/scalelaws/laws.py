"""Full analysis of one image and the L1/L2/L3 verdicts."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import __version__
from .cascade import ScalePyramid
from .entropy import (EntropySurface, FitResult, Sweep, fit_log_scale,
                      max_over_k, surface_from_sweep, sweep)
from .fluctuation import COLOR, PATTERN, OmegaPair, omegas
from .imagecube import ColorCensus, ImageCube, color_census
from .necklace import CLASS_NAMES

SCHEMA_VERSION = "1.0"
ABUNDANCE_NORMALIZATION = "sum-over-k-then-renormalize"


@dataclass(frozen=True)
class LawConfig:
    l1_target: float = -2.0
    tol_l1: float = 0.01
    tol_l1_intercept: float = 0.1
    l1_abscissa: str = "retained"
    l2_target: float = 1.74
    tol_l2: float = 0.013
    tol_l3: float = 0.01
    probe_scales: tuple = (1, 2, 4, 8, 16)
    k_step: int = 1
    s_max: int | None = None
    abundance_scale: int = 1
    fci_threshold: float = 0.999
    workers: int | None = None

    def synthetic(self) -> "LawConfig":
        """Widened tolerances for generated images."""
        return replace(self, tol_l1=0.05, tol_l2=0.02, tol_l3=0.02)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["probe_scales"] = list(self.probe_scales)
        d.pop("workers")
        return d


@dataclass
class LawReport:
    census: ColorCensus
    config: LawConfig
    N: int
    k_grid: list
    l1_fit: FitResult
    l1_per_k: list
    l2_probes: list  # (s, k_star, S_star)
    l3_omegas: list  # OmegaPair per k, pattern mode
    image_omegas: list  # OmegaPair per k, color mode
    abundance: list
    provenance: str
    surface: EntropySurface = field(repr=False, default=None)
    timing_s: float = 0.0

    # verdicts are always recomputed from the stored numbers
    @property
    def l1_pass(self) -> bool:
        c = self.config
        return (abs(self.l1_fit.a - c.l1_target) <= c.tol_l1
                and abs(self.l1_fit.b) <= c.tol_l1_intercept)

    @property
    def l2_values(self) -> np.ndarray:
        return np.array([v for _, _, v in self.l2_probes])

    @property
    def l2_mean(self) -> float:
        return float(self.l2_values.mean())

    @property
    def l2_spread(self) -> float:
        v = self.l2_values
        return float(v.max() - v.min())

    @property
    def l2_pass(self) -> bool:
        c = self.config
        v = self.l2_values
        return bool(np.all(np.abs(v - c.l2_target) <= c.tol_l2) and self.l2_spread <= c.tol_l2)

    @property
    def l3_max_deviation(self) -> float:
        return max(p.deviation for p in self.l3_omegas)

    @property
    def l3_pass(self) -> bool:
        return self.l3_max_deviation <= self.config.tol_l3

    @property
    def informational(self) -> bool:
        """Verdicts on non-FCI inputs are reported but carry no claim."""
        return not self.census.is_fci

    def verdicts(self) -> dict:
        return {"L1": self.l1_pass, "L2": self.l2_pass, "L3": self.l3_pass}

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "provenance": self.provenance,
            "config": self.config.to_dict(),
            "N": self.N,
            "k_grid": {"first": self.k_grid[0], "last": self.k_grid[-1],
                       "count": len(self.k_grid), "step": self.config.k_step},
            "census": self.census.to_dict(),
            "informational": self.informational,
            "L1": {
                "fit": self.l1_fit.to_dict(),
                "target": self.config.l1_target,
                "tol": self.config.tol_l1,
                "tol_intercept": self.config.tol_l1_intercept,
                "per_k": self.l1_per_k,
                "pass": self.l1_pass,
            },
            "L2": {
                "probes": [{"s": s, "k_star": k, "S_star": v} for s, k, v in self.l2_probes],
                "mean": self.l2_mean,
                "spread": self.l2_spread,
                "target": self.config.l2_target,
                "tol": self.config.tol_l2,
                "pass": self.l2_pass,
            },
            "L3": {
                "omegas": [_omega_dict(p) for p in self.l3_omegas],
                "max_deviation": self.l3_max_deviation,
                "tol": self.config.tol_l3,
                "pass": self.l3_pass,
            },
            "image_omegas": [_omega_dict(p) for p in self.image_omegas],
            "abundance": {
                "scale": self.config.abundance_scale,
                "normalization": ABUNDANCE_NORMALIZATION,
                "percent": dict(zip(CLASS_NAMES, self.abundance)),
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def summary(self) -> str:
        tag = " (informational: not fully colored)" if self.informational else ""
        lines = [
            f"census: {self.census.distinct_colors}/{self.census.total_pixels} "
            f"distinct colors, fraction {self.census.fraction:.6f}{tag}",
            f"L1: a = {self.l1_fit.a:.4f} +/- {self.l1_fit.sigma_a:.4f}, "
            f"b = {self.l1_fit.b:.4f} -> {'pass' if self.l1_pass else 'FAIL'}",
            "L2: " + ", ".join(f"s={s}: {v:.4f} (k={k})" for s, k, v in self.l2_probes)
            + f" -> {'pass' if self.l2_pass else 'FAIL'}",
            f"L3: max |Omega - 1| = {self.l3_max_deviation:.4f} over {len(self.l3_omegas)} "
            f"levels -> {'pass' if self.l3_pass else 'FAIL'}",
            "abundance %: " + ", ".join(f"{n} {a:.2f}" for n, a in zip(CLASS_NAMES, self.abundance)),
        ]
        return "\n".join(lines)


def _omega_dict(p: OmegaPair) -> dict:
    return {"k": p.k, "omega_plus": p.omega_plus, "omega_minus": p.omega_minus,
            "omega_literal_plus": p.omega_literal_plus,
            "omega_literal_minus": p.omega_literal_minus, "n_terms": p.n_terms}


def abundance_from_counts(counts: np.ndarray) -> list[float]:
    """counts: (n_k, 7) tallies.  Per-k fractions summed over k, as percentages."""
    counts = np.asarray(counts, dtype=np.float64)
    totals = counts.sum(axis=1, keepdims=True)
    frac = np.divide(counts, totals, out=np.zeros_like(counts), where=totals > 0)
    integral = frac.sum(axis=0)
    return (100.0 * integral / integral.sum()).tolist()


def abundance_profile(cube: ImageCube, s: int = 1, workers=None) -> list[float]:
    """Relative abundance (%) of the 7 classes integrated over k = 1..k_max at scale s."""
    sw = sweep(cube, range(1, cube.k_max + 1), [s], color=False, workers=workers)
    return abundance_from_counts(sw.counts[:, 0, :])


def default_k_grid(cube: ImageCube, k_step: int = 1) -> list[int]:
    if k_step < 1:
        raise ValueError("k_step must be >= 1")
    ks = list(range(1, cube.k_max + 1, k_step))
    if ks[-1] != cube.k_max:
        ks.append(cube.k_max)
    return ks


def analysis_sweep(cube: ImageCube, k_grid, workers=None) -> Sweep:
    """One sweep over s = 1..N that feeds surfaces, fits and both Omega modes."""
    N = cube.width
    return sweep(cube, k_grid, range(1, N + 1), workers=workers,
                 pyramid=ScalePyramid(cube))


def verify_laws(cube: ImageCube, config: LawConfig | None = None) -> LawReport:
    config = config or LawConfig()
    if cube.width != cube.height:
        raise ValueError(
            f"law verification needs a square image, got {cube.width}x{cube.height}"
        )
    N = cube.width
    if N < 6:
        raise ValueError("image side must be >= 6")
    s_max = config.s_max or N // 2
    if not 3 <= s_max <= N:
        raise ValueError(f"s_max={s_max} outside [3, {N}]")
    probes = [s for s in config.probe_scales if 1 <= s <= s_max]
    if not probes:
        raise ValueError("no probe scale within [1, s_max]")

    started = time.perf_counter()
    census = color_census(cube, config.fci_threshold)
    k_grid = default_k_grid(cube, config.k_step)
    sw = analysis_sweep(cube, k_grid, config.workers)
    surface = surface_from_sweep(sw, s_max)

    fit_scales = np.arange(1, s_max + 1)
    l1_fit = fit_log_scale(zip(fit_scales, surface.S_C[0, :s_max]), N, config.l1_abscissa)
    l1_per_k = []
    for ki, k in enumerate(k_grid):
        f = fit_log_scale(zip(fit_scales, surface.S_C[ki, :s_max]), N, config.l1_abscissa)
        l1_per_k.append({"k": k, "a": f.a, "sigma_a": f.sigma_a, "b": f.b})

    l2 = [(s, *max_over_k(surface, s)) for s in probes]
    l3 = omegas(cube, k_grid, PATTERN, sw=sw)
    img = omegas(cube, k_grid, COLOR, sw=sw)

    si = int(np.nonzero(sw.s_grid == config.abundance_scale)[0][0])
    if k_grid == list(range(1, cube.k_max + 1)):
        abundance = abundance_from_counts(sw.counts[:, si, :])
    else:
        abundance = abundance_profile(cube, config.abundance_scale, config.workers)

    return LawReport(
        census=census, config=config, N=N, k_grid=k_grid, l1_fit=l1_fit,
        l1_per_k=l1_per_k, l2_probes=l2, l3_omegas=l3, image_omegas=img,
        abundance=abundance, provenance=cube.provenance, surface=surface,
        timing_s=time.perf_counter() - started,
    )


def self_consistent(report: LawReport) -> bool:
    """Recompute every verdict from the serialized numbers and compare."""
    d = report.to_dict()
    l1, l2, l3 = d["L1"], d["L2"], d["L3"]
    v1 = (abs(l1["fit"]["a"] - l1["target"]) <= l1["tol"]
          and abs(l1["fit"]["b"]) <= l1["tol_intercept"])
    vals = [p["S_star"] for p in l2["probes"]]
    v2 = all(abs(v - l2["target"]) <= l2["tol"] for v in vals) and (max(vals) - min(vals)) <= l2["tol"]
    dev = max(max(abs(o["omega_plus"] - 1), abs(o["omega_minus"] - 1)) for o in l3["omegas"])
    v3 = dev <= l3["tol"]
    pct = sum(d["abundance"]["percent"].values())
    return (v1 == l1["pass"] and v2 == l2["pass"] and v3 == l3["pass"]
            and abs(pct - 100.0) <= 1e-9)
