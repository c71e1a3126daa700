"""Bayesian group factor analysis.

Thin wrapper over the compiled core. Matrices are numpy float64 arrays;
binary activity matrices come back as int arrays.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__, fit as _fit, FitConfig, PriorMode

_PRIORS = {"gfa": PriorMode.group_ard, "bfa": PriorMode.shared_ard, "fa": PriorMode.none}


def fit_views(data, K=10, prior="gfa", seed=0, **options):
    """Fit a DataCollection with keyword options.

    `prior` is "gfa", "bfa" or "fa". Remaining keywords are FitConfig fields.
    """
    config = FitConfig()
    config.K = K
    config.seed = seed
    config.hyper.prior_mode = _PRIORS[prior]
    for name, value in options.items():
        if not hasattr(config, name):
            raise TypeError(f"unknown option {name!r}")
        setattr(config, name, value)
    return _fit(data, config)
