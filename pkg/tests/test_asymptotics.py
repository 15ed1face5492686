import cmath
import math
import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st

import tsdisp.asymptotics as asym
from tsdisp.asymptotics import (
    LOWER_HALF_CONSTANT,
    LOWER_HALF_SPEED,
    LOWER_STRIP_CONSTANT,
    LOWER_STRIP_SPEED,
    ConvergenceWarning,
    derived_constants,
    half_space_prediction,
    lower_branch_neutral,
    lower_branch_relation,
    lower_branch_sigma,
    predict,
    strip_prediction,
)
from tsdisp.dispersion import SecantResult, solve_c
from tsdisp.profiles import make_exponential_half_space, make_parabolic_strip
from tsdisp.specfun import tietjens_real_zero

HALF = make_exponential_half_space()
STRIP = make_parabolic_strip()
E4 = cmath.exp(1j * math.pi / 4)


def test_derived_constants_recover_reference_values():
    d = derived_constants()
    assert d.half_constant == pytest.approx(LOWER_HALF_CONSTANT, abs=0.005)
    assert d.half_speed == pytest.approx(LOWER_HALF_SPEED, abs=5e-4)
    assert d.strip_constant_printed == pytest.approx(LOWER_STRIP_CONSTANT, abs=5e-4)
    assert d.strip_speed_printed == pytest.approx(LOWER_STRIP_SPEED, abs=5e-4)
    assert d.strip_speed_mirrored == d.half_speed


@pytest.mark.parametrize("nu", [1e-8, 1e-12])
def test_half_space_examples(nu):
    p = half_space_prediction(HALF, nu)
    assert p.alpha_minus == pytest.approx(1.005 * nu ** 0.25, rel=1e-14)
    assert p.alpha_plus == pytest.approx((2 * math.pi ** 2) ** (-1 / 6) * nu ** (1 / 6), rel=1e-14)
    assert p.alpha_plus == pytest.approx(0.608 * nu ** (1 / 6), rel=1e-3)
    assert p.c_lower(p.alpha_minus) / p.alpha_minus == pytest.approx(2.2959)
    assert p.has_band


def test_half_space_scaled_record():
    p = half_space_prediction(HALF, 1e-10)
    s = p.scaled
    assert (s.alpha_exponent, s.sigma_exponent, s.c_exponent) == (1 / 6, 1 / 6, 1 / 4)
    assert s.alpha_tilde_plus == pytest.approx((2 * math.pi ** 2) ** (-1 / 6))
    a = 0.01
    at = a * 1e-10 ** (-1 / 6)
    assert p.sigma(a, 1e-10) == pytest.approx(1e-10 ** (1 / 6) * s.sigma_tilde(at), rel=1e-12)


def test_half_space_sigma_is_real_at_upper_neutral_point():
    p = half_space_prediction(HALF, 1e-10)
    s = p.sigma(p.alpha_plus, 1e-10)
    assert abs(s.imag) < 1e-12 * abs(s.real)


def test_half_space_threshold():
    # alpha_- < alpha_+ below a computed threshold nu*
    nu_star = ((2 * math.pi ** 2) ** (-1 / 6) / 1.005) ** 12
    assert half_space_prediction(HALF, 0.5 * nu_star).has_band
    assert not half_space_prediction(HALF, 2 * nu_star).has_band


@given(st.floats(0.2, 5.0), st.floats(1e-14, 1e-6))
def test_half_space_free_stream_scaling(u_plus, nu):
    p = half_space_prediction(make_exponential_half_space(u_plus), nu)
    # s = k = u_plus for this family
    assert p.alpha_minus == pytest.approx(1.005 * u_plus ** -0.25 * nu ** 0.25, rel=1e-12)
    assert p.alpha_plus == pytest.approx((nu / (2 * math.pi ** 2)) ** (1 / 6) * u_plus ** (-1 / 6), rel=1e-12)


def test_strip_printed_convention_example():
    nu = 1e-10
    p = strip_prediction(STRIP, nu, convention="printed")
    assert p.alpha_minus == pytest.approx(1.7302 * 2 ** (5 / 7) * (8 / 15) ** (-3 / 7) * nu ** (1 / 7), rel=1e-12)
    # c/alpha^2 = -0.6392 omega_2(1) / U_1' with omega_2(1) = -8/15, U_1' = -2
    assert p.c_lower(1.0).real == pytest.approx(-0.6392 * (8 / 15) / 2, rel=1e-12)


def test_strip_mirrored_convention():
    p = strip_prediction(STRIP, 1e-10)
    d = derived_constants()
    assert p.alpha_minus == pytest.approx(d.strip_constant_mirrored * 2 ** (5 / 7) * (8 / 15) ** (-3 / 7) * 1e-10 ** (1 / 7))
    assert p.c_lower(1.0).real > 0


def test_strip_upper_slope_is_one_eleventh():
    a = [strip_prediction(STRIP, nu).alpha_plus for nu in (1e-12, 1e-8)]
    assert math.log(a[1] / a[0]) / math.log(1e4) == pytest.approx(1 / 11, abs=1e-12)


def test_strip_sigma_real_at_upper_neutral_point():
    p = strip_prediction(STRIP, 1e-10)
    s = p.sigma(p.alpha_plus, 1e-10)
    assert abs(s.imag) < 1e-12 * abs(s.real)


def test_prediction_dispatch_and_errors():
    assert predict(HALF, 1e-8).domain.value == "half_space"
    assert predict(STRIP, 1e-8, convention="printed").alpha_minus == strip_prediction(STRIP, 1e-8, "printed").alpha_minus
    with pytest.raises(ValueError):
        half_space_prediction(STRIP, 1e-8)
    with pytest.raises(ValueError):
        strip_prediction(HALF, 1e-8)
    with pytest.raises(ValueError):
        strip_prediction(STRIP, 1e-8, convention="other")


# ---- rescaled lower-branch relation

def test_lower_branch_neutral_point():
    at, ct = lower_branch_neutral(HALF)
    assert at == pytest.approx(1.005, rel=0.01)
    assert abs(ct.imag) < 1e-10
    # the Tietjens argument alpha~^(1/3) c~ / s^(2/3) sits at z0
    assert at ** (1 / 3) * ct.real == pytest.approx(tietjens_real_zero().z0, rel=1e-8)
    assert ct.real / at == pytest.approx(2.2959, rel=1e-3)


@pytest.mark.parametrize("at", [20.0, 80.0])
def test_lower_branch_large_alpha_closure(at):
    ct = lower_branch_relation(HALF, at)
    sigma = 1 - at / ct  # alpha~ = c~ (1 - sigma) for s = u = 1
    assert sigma * at ** 2 == pytest.approx(E4, rel=0.05)
    assert lower_branch_sigma(HALF, at) * at ** 2 == pytest.approx(E4, rel=1e-14)


def test_lower_branch_relation_flags_nonconvergence(monkeypatch):
    monkeypatch.setattr(asym, "secant", lambda f, x0, **kw: SecantResult(x0, 1.0, False, 100))
    with pytest.warns(ConvergenceWarning):
        lower_branch_relation(HALF, 1.0)


def test_lower_branch_relation_needs_half_space():
    with pytest.raises(ValueError):
        lower_branch_relation(STRIP, 1.0)


def test_lower_branch_unstable_above_neutral_point():
    with warnings.catch_warnings():
        warnings.simplefilter("error", ConvergenceWarning)
        below = lower_branch_relation(HALF, 0.8).imag
        above = lower_branch_relation(HALF, 1.3).imag
    assert below < 0 < above


def test_upper_branch_scaled_collapse():
    # sigma~ recovered from a solved root at alpha~ = alpha~_+/2, nu = 1e-10
    nu = 1e-10
    pr = half_space_prediction(HALF, nu)
    a = 0.5 * pr.alpha_plus
    fp = solve_c(HALF, a, nu, pr.c_upper(a))
    assert fp.converged
    solved = (fp.c / a - 1) * nu ** (-1 / 6)
    predicted = pr.scaled.sigma_tilde(a * nu ** (-1 / 6))
    assert abs(solved - predicted) <= 0.2 * abs(predicted)
