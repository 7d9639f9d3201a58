import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from lmoment.main_terms import mp_settings
from lmoment.shifts import ShiftTuple
from lmoment.special import (ContourSpec, PoleError, QuadratureError, build_G, contour_integral,
                             contour_integral_mp, gamma, gaussian_G, half_G, hurwitz_zeta, log_gamma,
                             pair_G, zeta, zeta_q)

SH = ShiftTuple(0.15 + 0.05j, -0.12 + 0.03j, 0.1j, 0.17 - 0.02j)


def test_log_gamma_examples():
    assert abs(log_gamma(1)) < 1e-15
    assert abs(log_gamma(0.5) - 0.5 * math.log(math.pi)) < 1e-14


@given(st.floats(-20, 20), st.floats(-30, 30))
def test_log_gamma_recurrence(x, y):
    z = complex(x, y)
    if min(abs(z - k) for k in range(-21, 1)) < 1e-3:
        return
    d = log_gamma(z + 1) - log_gamma(z) - np.log(z)
    # equality holds modulo 2 pi i
    k = round(d.imag / (2 * math.pi))
    assert abs(d - 2j * math.pi * k) <= 1e-12 * max(1.0, abs(log_gamma(z)))


def test_log_gamma_against_mpmath():
    rng = np.random.default_rng(0)
    z = rng.uniform(-15, 15, 300) + 1j * rng.uniform(-40, 40, 300)
    ours = log_gamma(z)
    ref = np.array([complex(mpmath.loggamma(complex(w))) for w in z])
    assert np.max(np.abs(ours - ref) / np.maximum(1, np.abs(ref))) < 1e-13


def test_log_gamma_pole():
    with pytest.raises(PoleError):
        log_gamma(-3.0)


def test_hurwitz_examples():
    assert abs(hurwitz_zeta(2, 1.0) - math.pi**2 / 6) < 1e-14
    assert abs(hurwitz_zeta(3, 0.5) - (2**3 - 1) * zeta(3)) < 1e-12
    assert abs(hurwitz_zeta(0, 0.3) - 0.2) < 1e-14


def test_hurwitz_against_mpmath():
    # the 1e-12 envelope holds for Re s >= -1/2, which covers every use in the package
    rng = np.random.default_rng(1)
    s = rng.uniform(-0.5, 4, 200) + 1j * rng.uniform(-50, 50, 200)
    a = rng.uniform(0.01, 1, 200)
    ours = hurwitz_zeta(s, a)
    ref = np.array([complex(mpmath.zeta(complex(x), float(y))) for x, y in zip(s, a)])
    assert np.max(np.abs(ours - ref) / np.abs(ref)) < 1e-12


def test_hurwitz_rejects_pole_and_bad_a():
    with pytest.raises(PoleError):
        hurwitz_zeta(1, 0.5)
    with pytest.raises(ValueError):
        hurwitz_zeta(2, 0.0)


def test_zeta_q_examples():
    assert abs(zeta_q(2, 5) - math.pi**2 / 6 * (1 - 1 / 25)) < 1e-14
    assert abs(zeta_q(0, 5)) < 1e-15


@given(st.floats(1.5, 6), st.floats(-30, 30), st.sampled_from([5, 7, 101, 1009]))
def test_zeta_q_factor_bound(x, y, q):
    s = complex(x, y)
    assert abs(zeta_q(s, q) - zeta(s)) <= 2 * q**-x * abs(zeta(s))


def test_contour_even_weight_gives_half():
    spec = ContourSpec(1.0, 8.0, 512)
    G = gaussian_G()
    v = contour_integral(lambda s: G(s) / s, spec)
    assert abs(v - 0.5) < 1e-12
    assert abs(contour_integral(lambda s: G(s) / s, spec.doubled()) - v) < 1e-12
    g = pair_G(SH)
    assert abs(contour_integral(lambda s: g(s) / s, ContourSpec(1.0, 12.0, 2048)) - 0.5) < 1e-10


def test_contour_full_weight_in_mp():
    # the full weight reaches ~1e45 on the line, so only the mpmath route can see 1/2
    G = build_G(SH)
    spec, dps = mp_settings(G, re_line=1.0)
    with mpmath.workdps(dps):
        v = contour_integral_mp(lambda s: G.mp(s) / s, spec, dps)
    assert abs(complex(v) - 0.5) < 1e-20


def test_contour_mellin_gamma():
    spec = ContourSpec(1.0, 40.0, 4001)
    v = contour_integral(lambda s: gamma(s), spec)
    assert abs(v - math.exp(-1)) < 1e-12
    assert abs(contour_integral(lambda s: gamma(s), spec.doubled()) - v) < 1e-12


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_contour_rejects_nonfinite():
    with pytest.raises(QuadratureError):
        contour_integral(lambda s: 1 / (s - 1), ContourSpec(1.0, 1.0, 17))


def test_build_G_zeros_and_normalization():
    G = build_G(SH)
    a, b, c, d = SH.as_tuple()
    assert abs(G(0) - 1) < 1e-15
    # |G| is ~1e21 around 1/2 + a, so a zero is judged against G one step away
    for z in (-(a + c) / 2, (a + c) / 2, -(b + d) / 2, 0.5 + a, 0.5 - a, 0.5 + d):
        assert abs(G(z)) < 1e-10 * max(1.0, abs(G(z + 1e-3)))


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_build_G_symmetries(x, y):
    s = complex(x, y)
    G = build_G(SH)
    assert abs(G(s) - G(-s)) <= 1e-12 * max(1, abs(G(s)))
    flipped = build_G(ShiftTuple(-SH.alpha, SH.beta, SH.gamma, SH.delta))
    assert abs(G(s) - flipped(s)) <= 1e-12 * max(1, abs(G(s)))
    perm = build_G(SH.permuted((2, 0, 3, 1)))
    assert abs(G(s) - perm(s)) <= 1e-11 * max(1, abs(G(s)))


def test_build_G_separation():
    with pytest.raises(ValueError):
        build_G(ShiftTuple(0.1, -0.1, 0.05, 0.02))


def test_half_G_zero_set():
    g = half_G(SH)
    assert all(abs(g(0.5 + x)) < 1e-12 and abs(g(-0.5 + x)) < 1e-12 for x in SH.as_tuple())
