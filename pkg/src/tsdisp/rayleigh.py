"""Inviscid (slow) side of the dispersion relation.

Half-space: the integral Omega_0(0, c) and the Riccati equation for Omega.
Strip: the integrals omega_2, omega_4 and the Riccati equation for omega.

All critical-layer integrals are evaluated on a contour indented around y_c
on the side dictated by Im c > 0.  For Im c > 0 this equals the real-axis
integral; for real or negative Im c it is its analytic continuation, so the
dispersion residual stays analytic across the neutral curve.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.integrate import quad, solve_ivp

from .profiles import Domain, ShearProfile, critical_layer
from .quadrature import path_rule, segment_integral

__all__ = [
    "PoleProximityError",
    "RiccatiPoleWarning",
    "RayleighSide",
    "StripIntegrals",
    "Limits",
    "indented_path",
    "omega0",
    "omega0_side",
    "omega0_limits",
    "strip_integrals",
    "square_integral",
    "integral_I",
    "integral_limits_I",
    "integrate_omega_ode",
    "integrate_Omega_ode",
]

POLE_DISTANCE = 1e-6


class PoleProximityError(ValueError):
    pass


class RiccatiPoleWarning(RuntimeWarning):
    pass


def _root(profile: ShearProfile, c: complex) -> complex:
    # alpha and nu are irrelevant for the location of y_c
    return critical_layer(profile, c, 1.0, 1.0).y_c


def indented_path(profile: ShearProfile, c: complex, y_c: complex | None = None) -> list[complex]:
    """Polygon from the wall into the flow that passes y_c on the side of Im c < 0.

    The half-space path ends at ``profile.y_max``; the strip path ends at 0.
    """
    if y_c is None:
        y_c = _root(profile, c)
    wall = profile.wall
    inward = 1.0 if profile.domain is Domain.HALF_SPACE else -1.0
    far = profile.y_max if profile.domain is Domain.HALF_SPACE else 0.0
    slope = profile.wall_slope
    depth_along = inward * (y_c - wall).real
    if depth_along <= 0:
        if complex(c).imag > 0:
            return [wall, far]  # y_c is behind the wall: the real axis is a valid path
        raise PoleProximityError(f"critical layer {y_c} lies outside the flow domain")
    # for Im c > 0, Im y_c has the sign of U'; the path keeps to the other side
    side = -math.copysign(1.0, slope)
    r = abs(y_c - wall)
    excess = max(0.0, side * y_c.imag)  # how far y_c has crossed to the path's side
    h = 0.5 * r + excess
    w = r
    x_turn = wall + inward * (depth_along + w)
    if inward * (far - x_turn) <= 0:
        raise PoleProximityError("critical layer too far from the wall for indentation")
    return [wall, wall + 1j * side * h, x_turn + 1j * side * h, x_turn, far]


def _check_pole(du: np.ndarray, c: complex) -> None:
    # relative to |c|: near the wall |U - c| is itself of order |c|
    m = float(np.min(np.abs(du))) if du.size else np.inf
    if m < POLE_DISTANCE * abs(c):
        raise PoleProximityError(f"quadrature node within {m:.2e} of the critical layer (|c| = {abs(c):.2e})")


@dataclass(frozen=True)
class RayleighSide:
    omega0_at_0: complex
    quadrature_error: float


def omega0_side(profile: ShearProfile, c: complex) -> RayleighSide:
    """Omega_0(0, c) with an error estimate (coarse vs fine rule)."""
    if profile.domain is not Domain.HALF_SPACE:
        raise ValueError("omega0 needs a half-space profile")
    c = complex(c)
    up = profile.u_plus
    w2 = (up - c) ** 2
    y_c = _root(profile, c)
    rule = path_rule(indented_path(profile, c, y_c), singular=y_c)

    def integrand(z):
        d = profile.u(z) - c
        return d * d / w2 - w2 / (d * d)

    _check_pole(profile.u(rule.nodes) - c, c)
    val, err = rule.integrate_with_error(integrand)
    scale = -1.0 / w2
    return RayleighSide(scale * val, abs(scale) * err)


def omega0(profile: ShearProfile, c: complex) -> complex:
    """Omega_0(0, c) = -(U+ - c)^-2 int_0^inf [(U - c)^2/(U+ - c)^2 - (U+ - c)^2/(U - c)^2] dz."""
    return omega0_side(profile, c).omega0_at_0


class Limits(NamedTuple):
    im_part: float
    re_leading: float


def omega0_limits(profile: ShearProfile, c: float) -> Limits:
    """Limits of Omega_0(0, c + i0) for real c.

    Im Omega_0 -> -pi U_c'' / U_c'^3 and Re Omega_0 ~ -1 / (U_c'^2 y_c), with
    U_c', U_c'' taken at the real critical layer.
    """
    c = float(np.real(c))
    if not 0 < c < profile.u_plus:
        raise ValueError("need 0 < c < u_plus")
    cl = critical_layer(profile, c, 1.0, 1.0)
    d1, d2, yc = cl.slope.real, cl.curvature.real, cl.y_c.real
    return Limits(-math.pi * d2 / d1 ** 3, -1.0 / (d1 ** 2 * yc))


@dataclass(frozen=True)
class StripIntegrals:
    """omega_2(y) = int_y^0 (U - c)^2, j2 = int_0^1 (U - c)^2, j4 = int_0^1 omega_2^2 / (U - c)^2."""

    c: complex
    omega2_profile: Callable[[np.ndarray], np.ndarray]
    omega2_at_1: complex
    omega4_at_1: complex
    j2: complex
    j4: complex
    quadrature_error: float


def _omega2_fn(profile: ShearProfile, c: complex):
    def y_sq(z):
        d = profile.u(z) - c
        return d * d

    def omega2(y):
        y = np.asarray(y, dtype=complex)
        return -segment_integral(y_sq, np.zeros_like(y), y, panels=2)

    return omega2, y_sq


def strip_integrals(profile: ShearProfile, c: complex) -> StripIntegrals:
    if profile.domain is not Domain.STRIP:
        raise ValueError("strip_integrals needs a strip profile")
    c = complex(c)
    omega2, y_sq = _omega2_fn(profile, c)
    j2 = complex(-omega2(1.0))
    y_c = _root(profile, c)
    # path runs 1 -> 0; flip the sign for int_0^1
    rule = path_rule(indented_path(profile, c, y_c), singular=y_c)
    _check_pole(profile.u(rule.nodes) - c, c)

    def integrand(z):
        return omega2(z) ** 2 / y_sq(z)

    val, err = rule.integrate_with_error(integrand)
    j4 = -val
    return StripIntegrals(c, omega2, -j2, j4, j2, j4, err)


def integral_I(profile: ShearProfile, f, c: complex, upper: float = 1.0) -> complex:
    """I(c) = int_upper^0 f(z) / (U - c)^2 dz on the strip, continued from Im c > 0."""
    c = complex(c)
    y_c = _root(profile, c)
    rule = path_rule(indented_path(profile, c, y_c), singular=y_c)
    _check_pole(profile.u(rule.nodes) - c, c)
    return rule.integrate(lambda z: f(z) / (profile.u(z) - c) ** 2)


def _derivative(f, y: complex, r: float = 1e-2, n: int = 32) -> complex:
    # Cauchy integral on a small circle
    theta = 2 * np.pi * np.arange(n) / n
    e = np.exp(1j * theta)
    return complex(np.mean(f(y + r * e) / (r * e)))


def integral_limits_I(profile: ShearProfile, f, c: float) -> Limits:
    """Limits of I(c) = int_1^0 f / (U - c)^2 as Im c -> 0+ for real c.

    Im I -> -pi U_c''/U_c'^3 f(y_c) + pi/U_c'^2 f'(y_c) and
    Re I ~ -f(y_c) / (U_1' c), U_1' the wall slope.
    """
    c = float(np.real(c))
    cl = critical_layer(profile, c, 1.0, 1.0)
    yc = cl.y_c.real
    d1, d2 = cl.slope.real, cl.curvature.real
    fy = complex(f(np.asarray(yc, dtype=complex)))
    dfy = _derivative(f, yc)
    im = -math.pi * d2 / d1 ** 3 * fy + math.pi / d1 ** 2 * dfy
    re = -fy / (profile.wall_slope * c)
    return Limits(float(np.real(im)), float(np.real(re)))


_ODE_OPTS = dict(method="DOP853", rtol=1e-12, atol=1e-30)


def integrate_omega_ode(profile: ShearProfile, c: complex, alpha: float) -> complex:
    """omega(1) for omega' = -alpha^2 Y + omega^2 / Y, omega(0) = 0, Y = (U - c)^2."""
    c = complex(c)
    if c.imag <= 0:
        raise ValueError("integrate_omega_ode needs Im c > 0")
    if alpha == 0:
        return 0j
    a2 = alpha * alpha

    def rhs(y, w):
        d = complex(profile.u(y)) - c
        yy = d * d
        return [-a2 * yy + w[0] * w[0] / yy]

    sol = solve_ivp(rhs, (0.0, 1.0), [0j], **_ODE_OPTS)
    if not sol.success:
        raise RuntimeError(f"omega Riccati integration failed: {sol.message}")
    return complex(sol.y[0, -1])


def integrate_Omega_ode(profile: ShearProfile, c: complex, alpha: float) -> complex:
    """Omega(0) for Omega' = alpha^2 Y Omega^2 - 1/Y, integrated from y_max down to 0.

    Omega starts from its limit 1 / (alpha (U+ - c)^2).  Where |Omega| becomes
    large the reciprocal omega = 1/Omega (which obeys the companion Riccati
    equation) is integrated instead; each such crossing is reported with a
    RiccatiPoleWarning giving its location.
    """
    if profile.domain is not Domain.HALF_SPACE:
        raise ValueError("integrate_Omega_ode needs a half-space profile")
    c = complex(c)
    if c.imag <= 0:
        raise ValueError("integrate_Omega_ode needs Im c > 0")
    a2 = alpha * alpha
    start = 1.0 / (alpha * (profile.u_plus - c) ** 2)
    big = 1e3 * max(1.0, abs(start))

    def rhs_big(y, w):
        d = complex(profile.u(y)) - c
        yy = d * d
        return [a2 * yy * w[0] * w[0] - 1.0 / yy]

    def rhs_small(y, w):
        d = complex(profile.u(y)) - c
        yy = d * d
        return [-a2 * yy + w[0] * w[0] / yy]

    def leave_big(y, w):
        return abs(w[0]) - big

    def leave_small(y, w):
        return abs(w[0]) - big

    leave_big.terminal = leave_small.terminal = True
    leave_big.direction = leave_small.direction = 1

    y, value, reciprocal = profile.y_max, start, False
    for _ in range(100):
        rhs, event = (rhs_small, leave_small) if reciprocal else (rhs_big, leave_big)
        sol = solve_ivp(rhs, (y, 0.0), [value], events=event, **_ODE_OPTS)
        if not sol.success:
            raise RuntimeError(f"Omega Riccati integration failed: {sol.message}")
        y_end, v_end = sol.t[-1], complex(sol.y[0, -1])
        if y_end <= 0.0 or sol.status == 0:
            return 1.0 / v_end if reciprocal else v_end
        if not reciprocal:
            warnings.warn(f"Omega has a pole near y = {y_end:.6g}", RiccatiPoleWarning, stacklevel=2)
        y, value, reciprocal = y_end, 1.0 / v_end, not reciprocal
    raise RuntimeError("too many Riccati switches")


def square_integral(profile: ShearProfile) -> float:
    """int_0^1 U^2 on the strip (the c -> 0 value of j2)."""
    if profile.domain is not Domain.STRIP:
        raise ValueError("square_integral needs a strip profile")
    return quad(lambda y: float(np.real(profile.u(y))) ** 2, 0.0, 1.0, epsabs=0, epsrel=1e-13)[0]
