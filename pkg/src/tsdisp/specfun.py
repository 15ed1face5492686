"""Complex Airy function, its primitives vanishing at +infinity, and the
Tietjens function.

``ai1`` and ``ai2`` are the first and second primitives of Ai that vanish as
z -> +inf along the real axis::

    ai1(z) = -int_z^inf Ai(t) dt            ai1' = Ai
    ai2(z) =  int_z^inf (t - z) Ai(t) dt    ai2' = ai1

Using Ai'' = z Ai the second primitive reduces to ``ai2 = -Ai'(z) + z*ai1(z)``,
so only the tail integral ``F(z) = int_z^inf Ai`` has to be computed.  F is
obtained from

* composite Gauss-Legendre quadrature of Ai on a straight segment for |z| < R_ASYM,
  anchored either at 0 (F(0) = 1/3) or at a far point on the right where the
  asymptotic series is accurate, whichever avoids cancellation;
* the asymptotic series  F ~ exp(-zeta) z^(-3/4) / (2 sqrt(pi)) sum a_k zeta^-k
  for |z| >= R_ASYM and |arg z| <= 2pi/3;
* the connection formula F(z) + F(wz) + F(w^2 z) = 1, w = exp(2 pi i/3),
  for |z| >= R_ASYM beyond the Stokes line |arg z| > 2pi/3.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

__all__ = [
    "AiryTriple",
    "Regime",
    "TietjensSample",
    "TietjensZero",
    "airy",
    "airy_deriv",
    "airy_tail",
    "airy_primitives",
    "tietjens",
    "tietjens_value",
    "tietjens_asymptotic",
    "tietjens_real_zero",
    "TIETJENS_SWITCH",
    "BRANCH",
]

# principal cube root of i
BRANCH = np.exp(1j * np.pi / 6)
OMEGA = np.exp(2j * np.pi / 3)

# optimal truncation of the tail series leaves a relative error ~exp(-|zeta|)
R_ASYM = 15.0
TIETJENS_SWITCH = 8.0
ASYM_MIN = 4.0
POLE_GUARD = 1e-12
MAX_ARG = 50.0

PANEL = 2.5
_GL_X, _GL_W = np.polynomial.legendre.leggauss(40)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def _series_coefficients(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coefficients u_k (Ai), v_k (Ai') and a_k (tail integral)."""
    u = np.empty(n)
    u[0] = 1.0
    for k in range(1, n):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / (216.0 * k * (2 * k - 1))
    v = np.empty(n)
    v[0] = 1.0
    v[1:] = -(6 * np.arange(1, n) + 1) / (6 * np.arange(1, n) - 1) * u[1:]
    t = u * (-1.0) ** np.arange(n)
    a = np.empty(n)
    a[0] = t[0]
    for k in range(1, n):
        # from F' = -Ai written in the variable zeta
        a[k] = t[k] - (k - 0.5) * a[k - 1]
    return u, v, a


_U, _V, _A = _series_coefficients(40)


def _ai(z) -> tuple[np.ndarray, np.ndarray]:
    """(Ai, Ai') from scipy; adding 0.0 maps a -0.0 imaginary part to +0.0,
    which scipy otherwise mishandles on the negative real axis."""
    ai, aip, _, _ = special.airy(np.asarray(z, dtype=complex) + 0.0)
    return ai, aip


class AiryOverflowError(OverflowError):
    """Raised when Ai or its primitives cannot be represented in double precision."""


def airy(z):
    """Ai(z) for complex z (scalar or array)."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > MAX_ARG * (1 + 8 * np.finfo(float).eps)):
        raise ValueError(f"|z| must be <= {MAX_ARG}")
    ai = _ai(z)[0]
    if np.any(~np.isfinite(ai)):
        raise AiryOverflowError("Ai(z) overflows double precision")
    return ai[()]


def airy_deriv(z):
    """Ai'(z) for complex z."""
    z = np.asarray(z, dtype=complex)
    return _ai(z)[1][()]


def _tail_asymptotic(z: complex) -> complex:
    zeta = (2.0 / 3.0) * z ** 1.5
    terms = _A / zeta ** np.arange(_A.size)
    mags = np.abs(terms)
    # optimal truncation: stop at the smallest term
    stop = int(np.argmin(mags[1:])) + 1
    s = terms[:stop].sum()
    return np.exp(-zeta) * z ** -0.75 / (2.0 * math.sqrt(math.pi)) * s


def _segment_integral(a: complex, b: complex) -> complex:
    n = max(1, math.ceil(abs(b - a) / PANEL))
    h = (b - a) / n
    t = (a + h * (np.arange(n)[:, None] + _GL_X[None, :])).ravel()
    return h * np.dot(np.tile(_GL_W, n), _ai(t)[0])


def _tail_scalar(z: complex, method: str | None = None) -> complex:
    if method is None:
        method = "asym" if abs(z) >= R_ASYM else "quad"
    if method == "asym":
        if abs(np.angle(z)) <= 2 * np.pi / 3:
            return _tail_asymptotic(z)
        return 1.0 - _tail_asymptotic(OMEGA * z) - _tail_asymptotic(OMEGA ** 2 * z)
    if z.real >= 0.0:
        # march right until the asymptotic series takes over; Ai decays along
        # the way so nothing cancels
        z_far = z + max(R_ASYM - z.real, 0.0) + 1.0
        return _segment_integral(z, z_far) + _tail_asymptotic(z_far)
    return 1.0 / 3.0 - _segment_integral(0.0, z)


def airy_tail(z, method: str | None = None):
    """F(z) = int_z^inf Ai(t) dt (path to +inf), analytically continued.

    ``method`` forces the evaluation route: ``"quad"`` or ``"asym"``; by
    default it is chosen from |z|.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > MAX_ARG * (1 + 8 * np.finfo(float).eps)):
        raise ValueError(f"|z| must be <= {MAX_ARG}")
    out = np.array([_tail_scalar(complex(v), method) for v in z.ravel()]).reshape(z.shape)
    if np.any(~np.isfinite(out)):
        raise AiryOverflowError("Airy tail integral overflows double precision")
    return out[()]


@dataclass(frozen=True)
class AiryTriple:
    ai: complex
    ai1: complex
    ai2: complex


def airy_primitives(z: complex) -> AiryTriple:
    """Ai(z) together with its first and second primitives vanishing at +inf."""
    z = complex(z)
    ai, aip = _ai(z)
    f = complex(airy_tail(z))
    ai1 = -f
    ai2 = -aip + z * ai1
    return AiryTriple(complex(ai), ai1, complex(ai2))


class Regime(str, enum.Enum):
    DIRECT = "direct"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class TietjensSample:
    y: float
    value: complex
    regime: Regime


@dataclass(frozen=True)
class TietjensZero:
    z0: float
    ti_at_z0: float


def tietjens_value(y, method: str | None = None) -> complex:
    """Ti(y) = ai2(xi) / (xi ai1(xi)) with xi = -exp(i pi/6) y, for complex y.

    Written as Ti = 1 + Ai'(xi) / (xi F(xi)).  Beyond |xi| = MAX_ARG the
    ratio is taken from the asymptotic series with the exponentials scaled out.
    """
    xi = -BRANCH * complex(y)
    if abs(xi) > MAX_ARG:
        return _tietjens_scaled(xi)
    f = complex(airy_tail(xi, method))
    denom = xi * f
    if abs(denom) < POLE_GUARD:
        raise ZeroDivisionError(f"Tietjens pole: |xi Ai(xi,1)| < {POLE_GUARD} at y={y}")
    return 1.0 + complex(_ai(xi)[1]) / denom


def _optimal_sum(coeffs: np.ndarray, zeta: complex) -> complex:
    terms = coeffs / zeta ** np.arange(coeffs.size)
    stop = int(np.argmin(np.abs(terms[1:]))) + 1
    return complex(terms[:stop].sum())


_D = _A - _V * (-1.0) ** np.arange(_V.size)  # series of z F + Ai', leading term cancels


def _scaled_pieces(z: complex) -> tuple[complex, complex, complex]:
    """(zeta, F e^zeta, (z F + Ai') e^zeta) from the asymptotic series at z."""
    zeta = (2.0 / 3.0) * z ** 1.5
    norm = 1.0 / (2.0 * math.sqrt(math.pi))
    f = norm * z ** -0.75 * _optimal_sum(_A, zeta)
    g = norm * z ** 0.25 * _optimal_sum(_D, zeta)
    return zeta, f, g


def _tietjens_scaled(xi: complex) -> complex:
    """Ti = (xi F + Ai') / (xi F) at xi for large |xi|, exponentials factored out."""
    if abs(np.angle(xi)) <= 2 * np.pi / 3:
        _, f, g = _scaled_pieces(xi)
        return g / (xi * f)
    # F(xi) = 1 - F(w xi) - F(w^2 xi) and Ai'(xi) = -w^2 Ai'(w xi) - w Ai'(w^2 xi)
    z1, f1, g1 = _scaled_pieces(OMEGA * xi)
    z2, f2, g2 = _scaled_pieces(OMEGA ** 2 * xi)
    m = max(-z1.real, -z2.real, 0.0)
    e0, e1, e2 = math.exp(-m), np.exp(-z1 - m), np.exp(-z2 - m)
    den = xi * (e0 - f1 * e1 - f2 * e2)
    if m < 700 and abs(den) * math.exp(m) < POLE_GUARD:
        raise ZeroDivisionError(f"Tietjens pole: |xi Ai(xi,1)| < {POLE_GUARD} at xi={xi}")
    num = xi * e0 - OMEGA ** 2 * g1 * e1 - OMEGA * g2 * e2
    return complex(num / den)


def tietjens(y: float, switch: float = TIETJENS_SWITCH) -> TietjensSample:
    """Tietjens function at real y > 0.

    Below ``switch`` the Airy tail integral comes from quadrature, above it
    from its asymptotic series (plus the connection formula, which restores
    the constant dropped by the plain expansion of Ti at infinity).
    """
    y = float(y)
    if y <= 0:
        raise ValueError("tietjens requires y > 0")
    if y < switch:
        return TietjensSample(y, tietjens_value(y, "quad"), Regime.DIRECT)
    return TietjensSample(y, tietjens_value(y, "asym"), Regime.ASYMPTOTIC)


_ASYM_COEFFS = (1.0, 1.25 * np.exp(1j * np.pi / 4), 151.0 / 32.0 * np.exp(1j * np.pi / 2))


def tietjens_asymptotic(y: float, terms: int = 3) -> complex:
    """Partial sum of the expansion of Ti at infinity.

    Ti(y) ~ e^{i pi/4} y^{-3/2} (1 + 5/4 e^{i pi/4} y^{-3/2} + 151/32 e^{i pi/2} y^{-3})
    """
    if terms not in (1, 2, 3):
        raise ValueError("terms must be 1, 2 or 3")
    if y < ASYM_MIN:
        raise ValueError(f"expansion is unreliable below y = {ASYM_MIN}")
    x = y ** -1.5
    s = sum(coef * x ** k for k, coef in enumerate(_ASYM_COEFFS[:terms]))
    return np.exp(1j * np.pi / 4) * x * s


def tietjens_real_zero(lo: float = 2.0, hi: float = 2.6) -> TietjensZero:
    """The real point z0 where Im Ti vanishes, and the (real) value Ti(z0)."""

    def im_ti(y):
        return tietjens_value(y).imag

    f_lo, f_hi = im_ti(lo), im_ti(hi)
    if np.sign(f_lo) == np.sign(f_hi):
        raise ValueError(f"Im Ti does not change sign on ({lo}, {hi})")
    z0 = optimize.brentq(im_ti, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return TietjensZero(z0, tietjens_value(z0).real)
