"""Orr-Sommerfeld oracle via the compound-matrix method.

The six 2x2 minors y_ij = phi1_i phi2_j - phi1_j phi2_i of two solutions of
the fourth-order Orr-Sommerfeld system are integrated directly; this keeps
the two-dimensional subspace of admissible solutions well resolved even
though fast and slow solutions differ by exp(|lambda_f| y).

* half-space: integrate from y_max (decaying solutions e^{-alpha y},
  e^{-lambda_f y}) down to the wall; the dispersion relation is y12(0) = 0
  (psi = psi' = 0 for some combination);
* strip: integrate the even subspace (psi'(0) = psi'''(0) = 0) from the
  centreline to y = 1; the dispersion relation is y12(1) = 0.

The minors are integrated with the local WKB rate alpha + lambda_f(y)
subtracted, so the integrator sees a slowly varying solution.  The reduced
determinant ``reduced = y12 exp(-int rate)`` is analytic in c and O(1); the
full minor is ``reduced * exp(shift)``, kept in log form.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .dispersion import FlowPoint, secant
from .profiles import Domain, ShearProfile

__all__ = ["OSDeterminant", "os_determinant", "os_eigenvalue", "compound_matrix", "MIN_NU"]

MIN_NU = 1e-8
_EXPLICIT = ("RK45", "DOP853", "RK23")  # these accept complex states directly
_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def compound_matrix(a0: complex, a2: complex) -> np.ndarray:
    """Second compound of the companion matrix of psi'''' = a2 psi'' + a0 psi.

    Minor order: (12, 13, 14, 23, 24, 34).
    """
    m = np.zeros((6, 6), dtype=complex)
    m[0, 1] = 1.0
    m[1, 3] = 1.0
    m[1, 2] = 1.0
    m[2, 4] = 1.0
    m[2, 1] = a2
    m[3, 4] = 1.0
    m[4, 5] = 1.0
    m[4, 0] = -a0
    m[4, 3] = a2
    m[5, 1] = -a0
    return m


def _minors(p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    pairs = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
    return np.array([p1[i] * p2[j] - p1[j] * p2[i] for i, j in pairs])


@dataclass(frozen=True)
class OSDeterminant:
    """Wall minor y12 = reduced * exp(shift).

    ``reduced`` is analytic in c and of order one; root-finders use it.
    ``value`` may overflow for long spans, ``log_value`` does not.
    """

    reduced: complex
    shift: complex
    wall_minors: np.ndarray
    lambda_s: complex
    lambda_f: complex
    integration_span: float

    @property
    def log_value(self) -> complex:
        return cmath.log(self.reduced) + self.shift

    @property
    def value(self) -> complex:
        return self.reduced * cmath.exp(self.shift)


def _lambda_f(alpha: float, nu: float, u_minus_c) -> complex:
    return np.sqrt(alpha * alpha + 1j * alpha * u_minus_c / nu)


def os_determinant(
    profile: ShearProfile,
    alpha: float,
    nu: float,
    c: complex,
    rescale_interval: float = 0.5,
    init_scale: float = 1.0,
    rtol: float = 1e-12,
    method: str = "LSODA",
) -> OSDeterminant:
    if nu < MIN_NU:
        raise ValueError(f"os_determinant is limited to nu >= {MIN_NU:g}")
    c = complex(c)
    a2c = alpha * alpha
    k = 1j * alpha / nu

    lam_s = complex(abs(alpha))
    if profile.domain is Domain.HALF_SPACE:
        span = profile.y_max
        lam_f = _lambda_f(alpha, nu, profile.u_plus - c)
        p1 = np.array([1.0, -lam_s, lam_s ** 2, -lam_s ** 3], dtype=complex)
        p2 = np.array([1.0, -lam_f, lam_f ** 2, -lam_f ** 3], dtype=complex)
        y0 = _minors(p1, p2)
        t0, t1, direction = span, 0.0, -1.0
    else:
        span = 1.0
        lam_f = _lambda_f(alpha, nu, complex(profile.u(0.0)) - c)
        y0 = np.zeros(6, dtype=complex)
        y0[1] = 1.0
        t0, t1, direction = 0.0, 1.0, 1.0
    y0 = init_scale * y0

    def rate(y):
        # dominant growth rate of the minors in the direction of integration
        return direction * (alpha + np.sqrt(a2c + k * (profile.u(y) - c)))

    def shifted(y):
        u, _, d2u = profile(y)
        w = u - c
        sig = direction * (alpha + cmath.sqrt(a2c + k * w))
        m = compound_matrix(-a2c * a2c - k * (a2c * w + d2u), 2 * a2c + k * w)
        m[np.diag_indices(6)] -= sig
        return m

    if method in _EXPLICIT:
        def rhs(y, v):
            return shifted(y) @ v

        def pack(z):
            return z

        def unpack(v):
            return v

        jac = None
    else:
        # scipy's implicit solvers are real-only: integrate (Re, Im) pairs
        def rhs(y, v):
            o = shifted(y) @ (v[:6] + 1j * v[6:])
            return np.concatenate([o.real, o.imag])

        def jac(y, v):
            m = shifted(y)
            j = np.empty((12, 12))
            j[:6, :6] = j[6:, 6:] = m.real
            j[:6, 6:] = -m.imag
            j[6:, :6] = m.imag
            return j

        def pack(z):
            return np.concatenate([z.real, z.imag])

        def unpack(v):
            return v[:6] + 1j * v[6:]

    n_chunks = max(1, math.ceil(span / rescale_interval))
    edges = np.linspace(t0, t1, n_chunks + 1)
    norm0 = float(np.linalg.norm(y0))
    state = pack(y0 / norm0)
    log_norm = math.log(norm0)
    shift = 0j
    opts = {} if jac is None else {"jac": jac}
    for a, b in zip(edges[:-1], edges[1:]):
        sol = solve_ivp(rhs, (a, b), state, method=method, rtol=rtol, atol=1e-14, **opts)
        if not sol.success:
            raise OverflowError(f"compound-matrix integration failed: {sol.message}")
        z = unpack(sol.y[:, -1])
        nrm = float(np.linalg.norm(z))
        if not np.isfinite(nrm) or nrm == 0:
            raise OverflowError("compound-matrix minors left the representable range")
        log_norm += math.log(nrm)
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        shift += half * complex(np.dot(_GL_W, rate(mid + half * _GL_X)))
        state = pack(z / nrm)
    wall = unpack(state) * math.exp(log_norm)
    return OSDeterminant(
        reduced=complex(wall[0]),
        shift=shift,
        wall_minors=wall,
        lambda_s=lam_s,
        lambda_f=complex(lam_f),
        integration_span=float(span),
    )


def os_eigenvalue(
    profile: ShearProfile,
    alpha: float,
    nu: float,
    seed: complex,
    tol: float = 1e-10,
    maxiter: int = 40,
    **kwargs,
) -> FlowPoint:
    """Eigenvalue c of the Orr-Sommerfeld problem near ``seed``, converged when |dc| < tol."""

    def f(c):
        return os_determinant(profile, alpha, nu, c, **kwargs).reduced

    seed = complex(seed)
    # secant's step test is relative; convert the absolute tolerance
    res = secant(f, seed, xtol=tol / max(abs(seed), 1e-300), ftol=math.inf, maxiter=maxiter)
    return FlowPoint.build(profile, alpha, nu, res.root, abs(res.fval), res.converged, res.iterations)
