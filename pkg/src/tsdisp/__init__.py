"""Asymptotic dispersion relations for Tollmien-Schlichting waves.

Modules:

* :mod:`tsdisp.specfun`: Airy primitives and the Tietjens function
* :mod:`tsdisp.profiles`: base flows and critical layers
* :mod:`tsdisp.rayleigh`: inviscid (Rayleigh) integrals and Riccati checks
* :mod:`tsdisp.dispersion`: dispersion residuals, root solver, neutral points
* :mod:`tsdisp.asymptotics`: closed-form marginal-curve predictions
* :mod:`tsdisp.oscheck`: Orr-Sommerfeld oracle (compound matrices)
* :mod:`tsdisp.cli`: the ``tsd`` command
"""

from .asymptotics import BranchPrediction, half_space_prediction, predict, strip_prediction
from .dispersion import FlowPoint, NeutralPoints, max_growth_rate, neutral_points, solve_c, sweep_alpha
from .oscheck import os_determinant, os_eigenvalue
from .profiles import Domain, ShearProfile, make_exponential_half_space, make_parabolic_strip, make_profile
from .specfun import tietjens, tietjens_real_zero, tietjens_value

__version__ = "0.1.0"

__all__ = [
    "BranchPrediction",
    "Domain",
    "FlowPoint",
    "half_space_prediction",
    "NeutralPoints",
    "ShearProfile",
    "make_exponential_half_space",
    "make_parabolic_strip",
    "make_profile",
    "max_growth_rate",
    "neutral_points",
    "os_determinant",
    "os_eigenvalue",
    "predict",
    "solve_c",
    "strip_prediction",
    "sweep_alpha",
    "tietjens",
    "tietjens_real_zero",
    "tietjens_value",
]
