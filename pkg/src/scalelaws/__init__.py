"""Multiscale color and 2x2 pattern statistics of multi-channel images."""

__version__ = "0.1.0"

from .cascade import CascadeParams, block_reduce, cascade_level, quantize
from .entropy import (EntropySurface, FitResult, entropy_surface, fit_log_scale,
                      max_over_k, pattern_entropy, shannon_entropy)
from .fluctuation import OmegaPair, delta_entropy_series, omega_image, omega_patterns
from .imagecube import (ColorCensus, FormatError, ImageCube, color_census,
                        load_image, save_image)
from .laws import LawConfig, LawReport, abundance_profile, verify_laws
from .necklace import (PatternClass, PatternMap, classify_quad, hamiltonian_value,
                       pattern_map)
from .synth import gen_hilbert, gen_pavement, gen_plane, gen_random

__all__ = [
    "CascadeParams", "block_reduce", "cascade_level", "quantize",
    "EntropySurface", "FitResult", "entropy_surface", "fit_log_scale",
    "max_over_k", "pattern_entropy", "shannon_entropy",
    "OmegaPair", "delta_entropy_series", "omega_image", "omega_patterns",
    "ColorCensus", "FormatError", "ImageCube", "color_census", "load_image",
    "save_image", "LawConfig", "LawReport", "abundance_profile", "verify_laws",
    "PatternClass", "PatternMap", "classify_quad", "hamiltonian_value",
    "pattern_map", "gen_hilbert", "gen_pavement", "gen_plane", "gen_random",
]
