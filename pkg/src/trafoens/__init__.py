"""Linear, log-linear and transformation ensembles of probabilistic predictions.

Subpackages are plain modules: :mod:`dist` (target distributions),
:mod:`panel` (member predictions and I/O), :mod:`scoring`, :mod:`pooling`,
:mod:`weights`, :mod:`evalmetrics`, :mod:`minimax`, :mod:`toytram` and the
command line in :mod:`cli`.
"""

__version__ = "0.1.0"

from .dist import TargetDistribution, get_dist  # noqa: E402
from .errors import TrafoEnsError  # noqa: E402
from .panel import MemberPanel, Outcomes, OrderedSampleSpace, load_panel, pdf_from_cdf  # noqa: E402
from .pooling import (  # noqa: E402
    pool,
    pool_linear,
    pool_loglinear_cdf,
    pool_loglinear_pdf,
    pool_transformation,
)
from .scoring import brier, instance_scores, mean_score, nll, rps  # noqa: E402
from .weights import TuneConfig, tune_weights  # noqa: E402

__all__ = [
    "__version__",
    "TargetDistribution",
    "get_dist",
    "TrafoEnsError",
    "MemberPanel",
    "Outcomes",
    "OrderedSampleSpace",
    "load_panel",
    "pdf_from_cdf",
    "pool",
    "pool_linear",
    "pool_loglinear_cdf",
    "pool_loglinear_pdf",
    "pool_transformation",
    "brier",
    "instance_scores",
    "mean_score",
    "nll",
    "rps",
    "TuneConfig",
    "tune_weights",
]
