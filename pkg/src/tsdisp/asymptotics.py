"""Closed-form marginal-curve predictions and branch expansions.

Half-space, with s = U'(0), k = |U''(0)|, u = U+::

    alpha_-  = 1.005 s^(5/4) u^(-3/2) nu^(1/4)
    alpha_+  = (2 pi^2)^(-1/6) s^(11/6) k^(-1/3) u^(-5/3) nu^(1/6)
    c        = (u^2/s) alpha (1 + sigma)      on the upper branch
    sigma    = e^{i pi/4} nu^(1/2) s^(5/2) / (alpha^2 u^3) - i pi alpha k u^2 / s^3
    c        = 2.2959 (u^2/s) alpha           at the lower branch

Strip, with s = |U'(1)|, k = |U''(1)|, j2 = int_0^1 U^2::

    alpha_-  = C j2^(-3/7) s^(5/7) nu^(1/7)
    alpha_+  = (2 pi^2)^(-1/11) s k^(-2/11) j2^(-5/11) nu^(1/11)
    c        = (j2/s) alpha^2 (1 + sigma)
    sigma    = +-e^{i pi/4} nu^(1/2) s^(5/2) / (alpha^(7/2) j2^(3/2)) - i pi alpha^2 j2 k / s^3

The strip constant C and the sign of the first sigma term depend on the sign
convention of the strip relation (see :mod:`tsdisp.dispersion`): the
``"printed"`` convention gives C = 1.7302 with c = -0.6392 (j2/s) alpha^2 < 0,
the ``"mirrored"`` one C = (z0 (1 - Ti(z0)))^(3/7) with c = (j2/s) alpha^2 / (1 - Ti(z0)).
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

from scipy.optimize import brentq

from .dispersion import STRIP_CONVENTIONS, secant
from .profiles import Domain, ShearProfile
from .rayleigh import square_integral
from .specfun import tietjens_real_zero, tietjens_value

__all__ = [
    "BranchPrediction",
    "ScaledBranch",
    "ConvergenceWarning",
    "LOWER_HALF_CONSTANT",
    "LOWER_HALF_SPEED",
    "LOWER_STRIP_CONSTANT",
    "LOWER_STRIP_SPEED",
    "derived_constants",
    "half_space_prediction",
    "strip_prediction",
    "predict",
    "lower_branch_relation",
    "lower_branch_sigma",
    "lower_branch_neutral",
]

# reference leading-order constants
LOWER_HALF_CONSTANT = 1.005
LOWER_HALF_SPEED = 2.2959
LOWER_STRIP_CONSTANT = 1.7302
LOWER_STRIP_SPEED = -0.6392

E4 = cmath.exp(1j * math.pi / 4)


class ConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class DerivedConstants:
    z0: float
    ti0: float
    half_constant: float  # alpha_- nu^(-1/4) for s = u = 1
    half_speed: float  # c / alpha at the lower branch
    strip_constant_mirrored: float
    strip_speed_mirrored: float
    strip_constant_printed: float
    strip_speed_printed: float


@lru_cache(maxsize=1)
def derived_constants() -> DerivedConstants:
    """Lower-branch constants recomputed from the real zero of Im Ti."""
    z = tietjens_real_zero()
    gap = 1.0 - z.ti_at_z0
    neg = -1.0 - z.ti_at_z0
    return DerivedConstants(
        z0=z.z0,
        ti0=z.ti_at_z0,
        half_constant=(z.z0 * gap) ** 0.75,
        half_speed=1.0 / gap,
        strip_constant_mirrored=(z.z0 * gap) ** (3 / 7),
        strip_speed_mirrored=1.0 / gap,
        strip_constant_printed=(z.z0 * -neg) ** (3 / 7),
        strip_speed_printed=1.0 / neg,
    )


@dataclass(frozen=True)
class ScaledBranch:
    """Upper-branch variables alpha = nu^a alpha~, sigma = nu^b sigma~; lower c = nu^g c~."""

    alpha_exponent: float
    sigma_exponent: float
    c_exponent: float
    alpha_tilde_plus: float
    sigma_tilde: Callable[[float], complex]
    c_tilde_lower: Callable[[float], complex]


@dataclass(frozen=True)
class BranchPrediction:
    nu: float
    alpha_minus: float
    alpha_plus: float
    c_lower: Callable[[float], complex]
    c_upper: Callable[[float], complex]
    sigma: Callable[[float, float], complex]
    scaled: ScaledBranch
    domain: Domain

    @property
    def has_band(self) -> bool:
        return self.alpha_minus < self.alpha_plus


def half_space_prediction(profile: ShearProfile, nu: float) -> BranchPrediction:
    if profile.domain is not Domain.HALF_SPACE:
        raise ValueError("half_space_prediction needs a half-space profile")
    s = profile.wall_slope
    k = abs(profile.wall_curvature)
    u = profile.u_plus
    base = u * u / s

    def sigma(alpha: float, nu_: float) -> complex:
        return E4 * math.sqrt(nu_) * s ** 2.5 / (alpha ** 2 * u ** 3) - 1j * math.pi * alpha * k * u * u / s ** 3

    def sigma_tilde(at: float) -> complex:
        return E4 * s ** 2.5 / (at * at * u ** 3) - 1j * math.pi * at * k * u * u / s ** 3

    alpha_plus = (nu * s ** 11 / (2 * math.pi ** 2 * k * k * u ** 10)) ** (1 / 6) if k > 0 else math.inf
    return BranchPrediction(
        nu=nu,
        alpha_minus=LOWER_HALF_CONSTANT * s ** 1.25 * u ** -1.5 * nu ** 0.25,
        alpha_plus=alpha_plus,
        c_lower=lambda alpha: complex(LOWER_HALF_SPEED * base * alpha),
        c_upper=lambda alpha: base * alpha * (1 + sigma(alpha, nu)),
        sigma=sigma,
        scaled=ScaledBranch(
            alpha_exponent=1 / 6,
            sigma_exponent=1 / 6,
            c_exponent=1 / 4,
            alpha_tilde_plus=alpha_plus * nu ** (-1 / 6),
            sigma_tilde=sigma_tilde,
            c_tilde_lower=lambda at: complex(LOWER_HALF_SPEED * base * at),
        ),
        domain=Domain.HALF_SPACE,
    )


def strip_prediction(profile: ShearProfile, nu: float, convention: str = "mirrored") -> BranchPrediction:
    if profile.domain is not Domain.STRIP:
        raise ValueError("strip_prediction needs a strip profile")
    if convention not in STRIP_CONVENTIONS:
        raise ValueError(f"convention must be one of {STRIP_CONVENTIONS}")
    s = abs(profile.wall_slope)
    k = abs(profile.wall_curvature)
    j2 = square_integral(profile)
    base = j2 / s
    if convention == "printed":
        const, speed, sign = LOWER_STRIP_CONSTANT, LOWER_STRIP_SPEED, -1.0
    else:
        d = derived_constants()
        const, speed, sign = d.strip_constant_mirrored, d.strip_speed_mirrored, 1.0

    def sigma(alpha: float, nu_: float) -> complex:
        return (sign * E4 * math.sqrt(nu_) * s ** 2.5 / (alpha ** 3.5 * j2 ** 1.5)
                - 1j * math.pi * alpha * alpha * j2 * k / s ** 3)

    def sigma_tilde(at: float) -> complex:
        return sign * E4 * s ** 2.5 / (at ** 3.5 * j2 ** 1.5) - 1j * math.pi * at * at * j2 * k / s ** 3

    alpha_plus = (2 * math.pi ** 2) ** (-1 / 11) * s * k ** (-2 / 11) * j2 ** (-5 / 11) * nu ** (1 / 11)
    return BranchPrediction(
        nu=nu,
        alpha_minus=const * s ** (5 / 7) * j2 ** (-3 / 7) * nu ** (1 / 7),
        alpha_plus=alpha_plus,
        c_lower=lambda alpha: complex(speed * base * alpha * alpha),
        c_upper=lambda alpha: base * alpha * alpha * (1 + sigma(alpha, nu)),
        sigma=sigma,
        scaled=ScaledBranch(
            alpha_exponent=1 / 11,
            sigma_exponent=2 / 11,
            c_exponent=2 / 7,
            alpha_tilde_plus=alpha_plus * nu ** (-1 / 11),
            sigma_tilde=sigma_tilde,
            c_tilde_lower=lambda at: complex(speed * base * at * at),
        ),
        domain=Domain.STRIP,
    )


def predict(profile: ShearProfile, nu: float, **kw) -> BranchPrediction:
    if profile.domain is Domain.HALF_SPACE:
        return half_space_prediction(profile, nu)
    return strip_prediction(profile, nu, **kw)


def lower_branch_relation(profile: ShearProfile, alpha_tilde: float, seed: complex | None = None) -> complex:
    """Root c~ of Ti(alpha~^(1/3) c~ / s^(2/3)) = 1 - (alpha~/c~) u^2/s (alpha~ = alpha nu^(-1/4))."""
    if profile.domain is not Domain.HALF_SPACE:
        raise ValueError("lower_branch_relation needs a half-space profile")
    s = profile.wall_slope
    u2 = profile.u_plus ** 2
    scale = alpha_tilde ** (1 / 3) / s ** (2 / 3)

    def f(ct):
        return tietjens_value(scale * ct) - 1 + alpha_tilde * u2 / (ct * s)

    if seed is None:
        seed = LOWER_HALF_SPEED * u2 * alpha_tilde / s
    res = secant(f, complex(seed))
    if not res.converged:
        warnings.warn(f"lower-branch relation did not converge at alpha~={alpha_tilde:.6g}", ConvergenceWarning)
    return res.root


def lower_branch_sigma(profile: ShearProfile, alpha_tilde: float) -> complex:
    """Large-alpha~ closure: alpha~ = c~ s u^-2 (1 - sigma) with sigma ~ e^{i pi/4} s^(5/2) / (alpha~^2 u^3)."""
    return E4 * profile.wall_slope ** 2.5 / (alpha_tilde ** 2 * profile.u_plus ** 3)


def lower_branch_neutral(profile: ShearProfile, lo: float = 0.5, hi: float = 2.0) -> tuple[float, complex]:
    """alpha~ where the rescaled lower-branch root has Im c~ = 0, with that c~."""

    def im(at):
        return lower_branch_relation(profile, at).imag

    at = brentq(im, lo, hi, xtol=1e-12)
    return at, lower_branch_relation(profile, at)
