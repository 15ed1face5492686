"""Asymptotic dispersion relations of Tollmien-Schlichting waves and their roots.

Half-space::

    Lambda Ti(g y_c) = 1 - (a/c)(U+ - c)^2/U'(0)
                       + (a^2/c)(U+ - c)^4/U'(0) [1/(U'(0) c) + Omega_0(0, c)]

Strip (wall at y = 1, U'(1) < 0, j2 = int_0^1 (U - c)^2, j4 = int_0^1 omega_2^2/(U - c)^2)::

    Lambda Ti(g (1 - y_c)) = s [1 + a^2 j2/(U'(1) c) - a^4 j4/(U'(1) c) + a^4 j2^2/(U'(1) c)^2]

with s = +1 for the ``"mirrored"`` convention (the half-space relation seen
from the upper wall, the default) and s = -1 for ``"printed"``, the opposite
overall sign.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .profiles import CriticalLayerData, Domain, ShearProfile, critical_layer
from .rayleigh import omega0, square_integral, strip_integrals
from .specfun import tietjens_real_zero, tietjens_value

log = logging.getLogger(__name__)

__all__ = [
    "FlowPoint",
    "ResidualEval",
    "SecantResult",
    "NoUnstableBandError",
    "secant",
    "residual",
    "residual_half",
    "residual_strip",
    "solve_c",
    "sweep_alpha",
    "neutral_points",
    "NeutralPoints",
    "SweepAbortedError",
    "alpha_bracket_grid",
    "lower_branch_seed",
    "max_growth_rate",
    "STRIP_CONVENTIONS",
]

STRIP_CONVENTIONS = ("mirrored", "printed")
RESIDUAL_TOL = 1e-10
STEP_TOL = 1e-12


@dataclass(frozen=True)
class ResidualEval:
    lhs: complex
    rhs: complex
    parts: dict
    critical: CriticalLayerData

    @property
    def value(self) -> complex:
        return self.lhs - self.rhs


def residual_half(profile: ShearProfile, alpha: float, nu: float, c: complex) -> ResidualEval:
    if profile.domain is not Domain.HALF_SPACE:
        raise ValueError("residual_half needs a half-space profile")
    c = complex(c)
    cl = critical_layer(profile, c, alpha, nu)
    z = cl.airy_argument
    if abs(z) < 1.0:
        log.debug("Airy argument |g y_c| = %.3g < 1: outside the asymptotic regime", abs(z))
    lhs = cl.lambda_big * tietjens_value(z)
    s = profile.wall_slope
    w = (profile.u_plus - c) ** 2
    parts = {
        "one": 1.0 + 0j,
        "alpha1": -(alpha / c) * w / s,
        "alpha2": (alpha * alpha / c) * w * w / s * (1.0 / (s * c) + omega0(profile, c)),
    }
    return ResidualEval(lhs, sum(parts.values()), parts, cl)


def residual_strip(
    profile: ShearProfile, alpha: float, nu: float, c: complex, convention: str = "mirrored"
) -> ResidualEval:
    if profile.domain is not Domain.STRIP:
        raise ValueError("residual_strip needs a strip profile")
    if convention not in STRIP_CONVENTIONS:
        raise ValueError(f"convention must be one of {STRIP_CONVENTIONS}")
    c = complex(c)
    cl = critical_layer(profile, c, alpha, nu)
    z = cl.airy_argument
    if abs(z) < 1.0:
        log.debug("Airy argument |g (1 - y_c)| = %.3g < 1: outside the asymptotic regime", abs(z))
    lhs = cl.lambda_big * tietjens_value(z)
    si = strip_integrals(profile, c)
    s = profile.wall_slope
    a2 = alpha * alpha
    sign = 1.0 if convention == "mirrored" else -1.0
    parts = {
        "one": sign * (1.0 + 0j),
        "alpha2": sign * a2 * si.j2 / (s * c),
        "alpha4_j4": -sign * a2 * a2 * si.j4 / (s * c),
        "alpha4_j2sq": sign * a2 * a2 * si.j2 ** 2 / (s * c) ** 2,
    }
    return ResidualEval(lhs, sum(parts.values()), parts, cl)


def residual(profile: ShearProfile, alpha: float, nu: float, c: complex, **kw) -> ResidualEval:
    if profile.domain is Domain.HALF_SPACE:
        return residual_half(profile, alpha, nu, c)
    return residual_strip(profile, alpha, nu, c, **kw)


@dataclass(frozen=True)
class SecantResult:
    root: complex
    fval: complex
    converged: bool
    iterations: int


def secant(
    f: Callable[[complex], complex],
    x0: complex,
    x1: complex | None = None,
    xtol: float = STEP_TOL,
    ftol: float = RESIDUAL_TOL,
    maxiter: int = 100,
    max_step: float = 0.5,
) -> SecantResult:
    """Complex secant iteration; steps are clipped to ``max_step * |x|``.

    A step landing where ``f`` is not finite is halved (up to 10 times).
    """
    if x1 is None:
        x1 = x0 * (1.0 + 1e-4) + 1e-6 * abs(x0) * 1j
    f0, f1 = f(x0), f(x1)
    if not np.isfinite(f0) or not np.isfinite(f1):
        return SecantResult(x0, f0, False, 0)
    best = (x0, f0) if abs(f0) < abs(f1) else (x1, f1)
    for it in range(1, maxiter + 1):
        if f1 == f0:
            break
        step = -f1 * (x1 - x0) / (f1 - f0)
        limit = max_step * abs(x1)
        if abs(step) > limit:
            step *= limit / abs(step)
        for _ in range(10):
            fn = f(x1 + step)
            if np.isfinite(fn):
                break
            step *= 0.5
        else:
            break
        x0, f0 = x1, f1
        x1, f1 = x1 + step, fn
        if abs(f1) < abs(best[1]):
            best = (x1, f1)
        if abs(f1) <= ftol and abs(step) <= xtol * abs(x1):
            return SecantResult(x1, f1, True, it)
        if f1 == 0:
            return SecantResult(x1, f1, True, it)
    return SecantResult(best[0], best[1], False, maxiter)


@dataclass(frozen=True)
class FlowPoint:
    alpha: float
    nu: float
    c: complex
    critical: CriticalLayerData | None
    residual_norm: float
    converged: bool = True
    iterations: int = 0

    @property
    def growth_rate(self) -> float:
        return self.alpha * self.c.imag

    @property
    def lambda_s(self) -> float:
        return abs(self.alpha)

    def lambda_f(self, u_plus: float = 1.0) -> complex:
        return complex(np.sqrt(self.alpha ** 2 + 1j * self.alpha * u_plus / self.nu))

    @classmethod
    def build(cls, profile, alpha, nu, c, residual_norm, converged, iterations=0):
        try:
            cl = critical_layer(profile, c, alpha, nu)
        except Exception:
            cl = None
        return cls(float(alpha), float(nu), complex(c), cl, float(residual_norm), bool(converged), iterations)


def solve_c(
    profile: ShearProfile,
    alpha: float,
    nu: float,
    guess: complex,
    maxiter: int = 100,
    ftol: float = RESIDUAL_TOL,
    xtol: float = STEP_TOL,
    **kw,
) -> FlowPoint:
    """Root c of the asymptotic dispersion relation near ``guess``.

    Unconverged results are returned with ``converged=False``.
    """

    def f(c):
        try:
            return residual(profile, alpha, nu, c, **kw).value
        except (ArithmeticError, ValueError, RuntimeError):
            return complex(np.inf)

    res = secant(f, complex(guess), xtol=xtol, ftol=ftol, maxiter=maxiter)
    if not np.isfinite(res.fval):
        return FlowPoint.build(profile, alpha, nu, res.root, np.inf, False, res.iterations)
    return FlowPoint.build(profile, alpha, nu, res.root, abs(res.fval), res.converged, res.iterations)


def _c_power(profile: ShearProfile) -> float:
    # c ~ alpha on the half-space, c ~ alpha^2 in the strip
    return 1.0 if profile.domain is Domain.HALF_SPACE else 2.0


class SweepAbortedError(RuntimeError):
    pass


def sweep_alpha(
    profile: ShearProfile,
    nu: float,
    alpha_grid: Sequence[float],
    seed: complex,
    abort_fraction: float = 0.5,
    **kw,
) -> list[FlowPoint]:
    """Continuation in alpha: each solve starts from the last converged root.

    The previous root is rescaled by (alpha / alpha_prev)^p with p the
    leading power of c in alpha.  Raises SweepAbortedError when more than
    ``abort_fraction`` of the points fail.
    """
    grid = np.asarray(alpha_grid, dtype=float)
    if grid.size > 1 and not (np.all(np.diff(grid) > 0) or np.all(np.diff(grid) < 0)):
        raise ValueError("alpha_grid must be strictly monotone")
    p = _c_power(profile)
    out: list[FlowPoint] = []
    last_alpha, last_c = grid[0], complex(seed)
    failures = 0
    for a in grid:
        guess = last_c * (a / last_alpha) ** p
        fp = solve_c(profile, a, nu, guess, **kw)
        if fp.converged:
            last_alpha, last_c = a, fp.c
        else:
            failures += 1
            log.info("sweep: no convergence at alpha=%.6g nu=%.3g", a, nu)
        out.append(fp)
    if failures > abort_fraction * grid.size:
        raise SweepAbortedError(f"{failures} of {grid.size} points failed")
    return out


class NoUnstableBandError(RuntimeError):
    pass


def alpha_bracket_grid(profile: ShearProfile, nu: float, n: int = 64) -> np.ndarray:
    if profile.domain is Domain.HALF_SPACE:
        lo, hi = 0.1 * nu ** 0.25, 10 * nu ** (1 / 6)
    else:
        lo, hi = 0.1 * nu ** (1 / 7), 10 * nu ** (1 / 11)
    return np.geomspace(lo, hi, n)


def lower_branch_seed(profile: ShearProfile, nu: float) -> tuple[float, complex]:
    """Leading-order (alpha, c) where the lower branch crosses Im c = 0.

    Keeps only Lambda ~ 1 and the first correction on the right-hand side,
    so that Ti(z0) = 1 - kappa alpha^p / c at the real zero z0 of Im Ti.
    """
    z0 = tietjens_real_zero()
    gap = 1.0 - z0.ti_at_z0
    s = abs(profile.wall_slope)
    if profile.domain is Domain.HALF_SPACE:
        kappa = profile.u_plus ** 2 / s
        alpha = (z0.z0 * gap) ** 0.75 * s ** 1.25 * profile.u_plus ** -1.5 * nu ** 0.25
        return alpha, complex(kappa * alpha / gap)
    j2 = square_integral(profile)
    kappa = j2 / s
    alpha = (z0.z0 ** 3 * s ** 5 / (j2 / gap) ** 3) ** (1 / 7) * nu ** (1 / 7)
    return alpha, complex(kappa * alpha ** 2 / gap)


@dataclass(frozen=True)
class NeutralPoints:
    """Lower and upper neutral wavenumbers with the sweep that bracketed them.

    Iterates as ``(alpha_minus, alpha_plus)``; a side that the sweep could
    not close is ``None`` and named in ``flags``.
    """

    alpha_minus: FlowPoint | None
    alpha_plus: FlowPoint | None
    sweep: list = field(default_factory=list)
    flags: tuple = ()

    def __iter__(self):
        yield self.alpha_minus
        yield self.alpha_plus


def _refine_crossing(profile, nu, lo: FlowPoint, hi: FlowPoint, rtol: float, **kw) -> FlowPoint:

    la, lb = math.log(lo.alpha), math.log(hi.alpha)
    cache: dict[float, FlowPoint] = {}

    def im_c(alpha):
        t = (math.log(alpha) - la) / (lb - la)
        guess = lo.c * (1 - t) + hi.c * t
        fp = solve_c(profile, alpha, nu, guess, **kw)
        if not fp.converged:
            raise RuntimeError(f"no root at alpha={alpha:.8g} while refining a neutral point")
        cache[alpha] = fp
        return fp.c.imag

    root = brentq(im_c, lo.alpha, hi.alpha, xtol=rtol * lo.alpha, rtol=rtol, maxiter=100)
    fp = cache.get(root)
    if fp is None:
        im_c(root)
        fp = cache[root]
    return fp


def neutral_points(
    profile: ShearProfile,
    nu: float,
    alpha_grid: Sequence[float] | None = None,
    rtol: float = 1e-6,
    **kw,
) -> NeutralPoints:
    """Neutral wavenumbers bounding the band where Im c > 0.

    The grid is swept outward from the grid point nearest the leading-order
    lower-branch estimate, and each sign change of Im c is then located by
    Brent's method to relative accuracy ``rtol`` in alpha.
    """
    grid = alpha_bracket_grid(profile, nu) if alpha_grid is None else np.sort(np.asarray(alpha_grid, float))
    a_seed, c_seed = lower_branch_seed(profile, nu)
    k = int(np.clip(np.searchsorted(grid, a_seed), 0, grid.size - 1))
    seed = c_seed * (grid[k] / a_seed) ** _c_power(profile)
    up = sweep_alpha(profile, nu, grid[k:], seed, abort_fraction=1.0, **kw)
    down = sweep_alpha(profile, nu, grid[: k + 1][::-1], seed, abort_fraction=1.0, **kw)[1:] if k > 0 else []
    pts = down[::-1] + up
    good = [f for f in pts if f.converged]
    if len(pts) - len(good) > 0.5 * len(pts):
        raise SweepAbortedError(f"{len(pts) - len(good)} of {len(pts)} points failed at nu={nu:.3g}")
    sign = np.array([f.c.imag > 0 for f in good])
    if not sign.any():
        raise NoUnstableBandError(f"Im c <= 0 on the whole alpha grid at nu={nu:.3g}")
    flags = []
    rises = np.flatnonzero(~sign[:-1] & sign[1:])
    falls = np.flatnonzero(sign[:-1] & ~sign[1:])
    if rises.size + falls.size > 2:
        flags.append("multiple_bands")
    lower = upper = None
    if sign[0]:
        flags.append("open_below")
    elif rises.size:
        i = rises[0]
        try:
            lower = _refine_crossing(profile, nu, good[i], good[i + 1], rtol, **kw)
        except RuntimeError:
            flags.append("refine_failed_below")
    if sign[-1]:
        flags.append("open_above")
    elif falls.size:
        j = falls[-1]
        try:
            upper = _refine_crossing(profile, nu, good[j], good[j + 1], rtol, **kw)
        except RuntimeError:
            flags.append("refine_failed_above")
    if len(good) < len(pts):
        flags.append("unconverged_points")
    for f in flags:
        log.warning("neutral_points nu=%.3g: %s", nu, f)
    return NeutralPoints(lower, upper, pts, tuple(flags))


def max_growth_rate(profile: ShearProfile, nu: float, points: Sequence[FlowPoint], rtol: float = 1e-6, **kw) -> FlowPoint:
    """Point of largest alpha Im c, polished around the best converged grid point.

    ``points`` is a sweep ordered in alpha (as in ``NeutralPoints.sweep``).
    """

    good = [f for f in points if f.converged]
    if not good:
        raise ValueError("no converged points")
    i = int(np.argmax([f.growth_rate for f in good]))
    if i == 0 or i == len(good) - 1:
        return good[i]
    lo, mid, hi = good[i - 1], good[i], good[i + 1]
    p = _c_power(profile)
    cache: dict[float, FlowPoint] = {}

    def neg_rate(alpha):
        fp = solve_c(profile, alpha, nu, mid.c * (alpha / mid.alpha) ** p, **kw)
        if not fp.converged:
            return math.inf
        cache[alpha] = fp
        return -fp.growth_rate

    res = minimize_scalar(neg_rate, bounds=(lo.alpha, hi.alpha), method="bounded",
                          options={"xatol": rtol * mid.alpha})
    best = cache.get(res.x)
    if best is None or best.growth_rate < mid.growth_rate:
        return mid
    return best
