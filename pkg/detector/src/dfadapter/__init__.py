"""Reference detector adapter for the deepfake-robustness harness.

Classical residual-statistics baseline with a scikit-learn style estimator,
batch submission writer, and the line-delimited streaming scoring protocol.
Talks to the harness only through its published file formats and protocols.
"""

__version__ = "0.1.0"

from .features import FEATURE_NAMES, N_FEATURES, featurize, featurize_file, load_image
from .model import (
    BaselineModel,
    ResidualForensicsClassifier,
    fit_baseline,
    read_manifest_items,
    run,
    score_image,
    tta_views,
)
from .protocol import handle_line, serve_stream

__all__ = [
    "FEATURE_NAMES",
    "N_FEATURES",
    "BaselineModel",
    "ResidualForensicsClassifier",
    "featurize",
    "featurize_file",
    "fit_baseline",
    "handle_line",
    "load_image",
    "read_manifest_items",
    "run",
    "score_image",
    "serve_stream",
    "tta_views",
]
