"""Benchmarking harness for robustness of deepfake detectors.

Five pieces: a seeded image-degradation engine, a corpus builder that
synthesizes challenge splits with pseudo-fakes, threshold-free AUC scoring,
the score-fusion primitives used by challenge entrants, and a phase-aware
scoring service with public/private re-ranking.
"""

__version__ = "0.1.0"

from .image import ImageBuffer
from .rng import RngStream

__all__ = ["ImageBuffer", "RngStream", "__version__"]
