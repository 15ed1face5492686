"""Shear profiles with complex-argument evaluation and the critical layer."""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Domain",
    "ShearProfile",
    "CriticalLayerData",
    "NoCriticalLayerError",
    "make_exponential_half_space",
    "make_parabolic_strip",
    "make_profile",
    "critical_layer",
    "PROFILES",
]


class Domain(str, enum.Enum):
    HALF_SPACE = "half_space"
    STRIP = "strip"


Evaluator = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class ShearProfile:
    """An analytic base flow U_s given by ``eval(y) -> (U, U', U'')``.

    ``eval`` must accept complex arrays; the critical layer is complex as soon
    as Im c != 0.  For the strip only y in [0, 1] is used (even profile, wall
    at y = 1).
    """

    name: str
    domain: Domain
    eval: Evaluator = field(repr=False)
    u_plus: float | None = None
    decay_rate: float | None = None
    params: dict = field(default_factory=dict)

    def __call__(self, y):
        return self.eval(np.asarray(y, dtype=complex))

    def u(self, y):
        return self(y)[0]

    @property
    def wall(self) -> float:
        return 0.0 if self.domain is Domain.HALF_SPACE else 1.0

    @property
    def wall_slope(self) -> float:
        return float(np.real(self(self.wall)[1]))

    @property
    def wall_curvature(self) -> float:
        return float(np.real(self(self.wall)[2]))

    @property
    def y_max(self) -> float:
        """Far-field truncation for the half-space, where U_s has converged to ~1e-13."""
        if self.domain is Domain.STRIP:
            return 1.0
        return max(30.0, 10.0 / self.decay_rate)


def make_exponential_half_space(u_plus: float = 1.0) -> ShearProfile:
    """U_s(y) = u_plus (1 - exp(-y))."""
    if u_plus == 0:
        raise ValueError("u_plus must be non-zero")

    def ev(y):
        e = np.exp(-y)
        return u_plus * (1.0 - e), u_plus * e, -u_plus * e

    return ShearProfile(
        "exponential", Domain.HALF_SPACE, ev, u_plus=float(u_plus), decay_rate=1.0,
        params={"u_plus": float(u_plus)},
    )


def make_parabolic_strip() -> ShearProfile:
    """Plane Poiseuille flow U_s(y) = 1 - y^2 on [-1, 1]."""

    def ev(y):
        # factored so U keeps its relative accuracy near the wall
        return (1.0 - y) * (1.0 + y), -2.0 * y, -2.0 * np.ones_like(y)

    return ShearProfile("parabolic", Domain.STRIP, ev)


PROFILES = {
    "exponential": make_exponential_half_space,
    "parabolic": make_parabolic_strip,
}


def make_profile(name: str, **params) -> ShearProfile:
    try:
        factory = PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}") from None
    return factory(**params)


class NoCriticalLayerError(RuntimeError):
    pass


@dataclass(frozen=True)
class CriticalLayerData:
    """Critical point y_c, the Airy scale gamma_tilde and Lambda.

    For the strip, ``distance`` is 1 - y_c and ``gamma_tilde`` uses the
    inward slope -U'(y_c), so that gamma_tilde * distance is real positive
    for real positive c.
    """

    y_c: complex
    gamma_tilde: complex
    lambda_big: complex
    slope: complex
    curvature: complex
    distance: complex
    iterations: int

    @property
    def airy_argument(self) -> complex:
        return self.gamma_tilde * self.distance


_EPS = np.finfo(float).eps


def _newton(profile: ShearProfile, c: complex, y0: complex, tol: float, maxiter: int):
    y = y0
    scale = max(abs(c), 1e-300)
    wall = profile.wall
    for it in range(1, maxiter + 1):
        with np.errstate(all="ignore"):  # runaway iterates are caught below
            u, du, _ = profile(y)
        r = complex(u) - c
        if abs(r) < tol * scale:
            return y, it
        du = complex(du)
        if du == 0 or not cmath.isfinite(du) or not cmath.isfinite(r):
            break
        step = r / du
        y = y - step
        # roundoff in U - c can exceed tol |c| when y_c hugs the wall
        if abs(step) < max(tol * abs(y - wall), 8 * _EPS * abs(y)):
            return y, it
    with np.errstate(all="ignore"):
        u = complex(profile(y)[0])
    if cmath.isfinite(u) and abs(u - c) < tol * scale:
        return y, maxiter
    raise NoCriticalLayerError(f"Newton did not converge for c={c}")


def critical_layer(
    profile: ShearProfile,
    c: complex,
    alpha: float,
    nu: float,
    tol: float = 1e-12,
    maxiter: int = 50,
) -> CriticalLayerData:
    """Root y_c of U_s(y_c) = c near the wall, with gamma_tilde and Lambda."""
    c = complex(c)
    if c == 0:
        raise NoCriticalLayerError("c = 0 puts the critical layer on the wall")
    wall = profile.wall
    slope0 = profile.wall_slope
    seed = wall + c / slope0
    try:
        y_c, its = _newton(profile, c, seed, tol, maxiter)
    except NoCriticalLayerError:
        # damped restart from a perturbed seed
        seed2 = wall + 0.5 * c / slope0 * (1 + 1e-3j)
        y_c, its = _newton(profile, c, seed2, tol, maxiter)
        its += maxiter
    _, du, d2u = profile(y_c)
    du, d2u = complex(du), complex(d2u)
    if profile.domain is Domain.HALF_SPACE:
        distance = y_c
        inward = du
        lam = slope0 * y_c / c
    else:
        distance = 1.0 - y_c
        inward = -du
        lam = slope0 * (y_c - 1.0) / c
    gamma = (alpha * inward / nu) ** (1.0 / 3.0)
    return CriticalLayerData(y_c, gamma, lam, du, d2u, distance, its)
