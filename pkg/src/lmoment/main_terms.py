"""The six-term main term, its zero-shift value, and the gamma identities behind it."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .characters import x_factor
from .moments import gamma_factor_g
from .shifts import ShiftTuple
from .special import (ContourSpec, GWeight, PoleError, contour_integral,
                      contour_integral_mp, log_gamma, zeta, zeta_q)

POLE_GAP = 1e-4


# ---------------------------------------------------------------- six terms

@dataclass(frozen=True)
class MainTermBreakdown:
    terms: tuple[complex, ...]
    total: complex
    zeta_q: bool

    @property
    def max_term_ratio(self) -> float:
        """Largest single term over the total; large when the terms cancel."""
        return max(abs(t) for t in self.terms) / abs(self.total)


def _check_poles(a, b, c, d):
    combos = {"alpha+gamma": a + c, "alpha+delta": a + d, "beta+gamma": b + c,
              "beta+delta": b + d, "alpha-beta": a - b, "gamma-delta": c - d}
    for name, v in combos.items():
        if np.any(np.abs(v) < POLE_GAP):
            raise PoleError(f"{name} = {np.min(np.abs(v)):.2e} is too close to a zeta pole")


def _six_terms(a, b, c, d, q: int, parity: int, use_zeta_q: bool) -> np.ndarray:
    """The six terms, broadcasting over array-valued shifts."""
    if use_zeta_q:
        def Z(s):
            return zeta_q(s, q)
    else:
        Z = zeta

    def X(u):
        return x_factor(0.5 + u, parity, q)

    t1 = Z(1 + a + c) * Z(1 + a + d) * Z(1 + b + c) * Z(1 + b + d) / Z(2 + a + b + c + d)
    t2 = X(a) * X(c) * Z(1 - a + b) * Z(1 - a - c) * Z(1 + b + d) * Z(1 - c + d) / Z(2 - a + b - c + d)
    t3 = X(a) * X(d) * Z(1 - a + b) * Z(1 - a - d) * Z(1 + b + c) * Z(1 + c - d) / Z(2 - a + b + c - d)
    t4 = X(b) * X(c) * Z(1 + a - b) * Z(1 + a + d) * Z(1 - b - c) * Z(1 - c + d) / Z(2 + a - b - c + d)
    t5 = X(b) * X(d) * Z(1 + a - b) * Z(1 + a + c) * Z(1 - b - d) * Z(1 + c - d) / Z(2 + a - b + c - d)
    t6 = (X(a) * X(b) * X(c) * X(d) * Z(1 - a - c) * Z(1 - a - d) * Z(1 - b - c) * Z(1 - b - d)
          / Z(2 - a - b - c - d))
    return np.array([t1, t2, t3, t4, t5, t6])


def conjecture_main(shifts: ShiftTuple, q: int, parity: int = 0,
                    use_zeta_q: bool = True) -> MainTermBreakdown:
    a, b, c, d = shifts.as_tuple()
    _check_poles(a, b, c, d)
    terms = _six_terms(a, b, c, d, q, parity, use_zeta_q)
    return MainTermBreakdown(tuple(complex(t) for t in terms), complex(terms.sum()), use_zeta_q)


def stencil(radius: float, points: int = 6) -> tuple[np.ndarray, ...]:
    """Torus of shift tuples for the Cauchy mean.

    Each shift runs over ``points`` roots of unity times ``radius``; the
    per-shift rotations k*pi/(2*points) keep every sum and difference of two
    shifts away from zero.
    """
    w = np.exp(2j * np.pi * np.arange(points) / points)
    rot = [np.exp(1j * np.pi * k / (2 * points)) for k in range(4)]
    grids = np.meshgrid(*(radius * r * w for r in rot), indexing="ij")
    return tuple(g.ravel() for g in grids)


def conjecture_at_zero(q: int, parity: int = 0, radius: float | None = None,
                       points: int = 6, use_zeta_q: bool = True) -> float:
    """Main term at zero shifts as the torus mean of the six-term sum.

    The sum is holomorphic in the shifts, so its mean over the torus equals
    the value at the origin up to terms of order (radius log q)^points.
    """
    r = 1 / (2 * math.log(q)) if radius is None else radius
    a, b, c, d = stencil(r, points)
    _check_poles(a, b, c, d)
    vals = _six_terms(a, b, c, d, q, parity, use_zeta_q).sum(axis=0)
    return float(np.mean(vals).real)


def fourth_moment_main(q: int, use_zeta_q: bool = True, **kw) -> float:
    """Main term for the average over all primitive characters (both parities)."""
    return 0.5 * (conjecture_at_zero(q, 0, use_zeta_q=use_zeta_q, **kw)
                  + conjecture_at_zero(q, 1, use_zeta_q=use_zeta_q, **kw))


def fit_log_polynomial(qs, values, degree: int = 4) -> np.ndarray:
    """Least-squares coefficients c_0..c_degree of sum c_i (log q)^i."""
    L = np.log(np.asarray(qs, dtype=float))
    A = np.vander(L, degree + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(A, np.asarray(values, dtype=float), rcond=None)
    return coef


# ---------------------------------------------------------------- Y1, U

def diagonal_Y1(shifts: ShiftTuple, q: int | None = None) -> complex:
    a, b, c, d = shifts.as_tuple()
    for name, v in (("alpha+gamma", a + c), ("alpha+delta", a + d),
                    ("beta+gamma", b + c), ("beta+delta", b + d)):
        if abs(v) < POLE_GAP:
            raise PoleError(f"{name} too close to a zeta pole")
    return complex(zeta(1 + a + c) * zeta(1 + a + d) * zeta(1 + b + c) * zeta(1 + b + d)
                   / zeta(2 + a + b + c + d))


def x_all(shifts: ShiftTuple, q: int, parity: int = 0) -> complex:
    """X_{alpha,beta,gamma,delta}: the product of the four X(1/2 + shift)."""
    return complex(np.prod([x_factor(0.5 + x, parity, q) for x in shifts.as_tuple()]))


def diagonal_Y_minus1(shifts: ShiftTuple, q: int, parity: int = 0) -> complex:
    return x_all(shifts, q, parity) * diagonal_Y1(shifts.negated(), q)


def evaluate_U(shifts: ShiftTuple, q: int, parity: int = 0) -> complex:
    a, b, c, d = shifts.as_tuple()
    _check_poles(a, b, c, d)
    Xac = x_factor(0.5 + a, parity, q) * x_factor(0.5 + c, parity, q)
    return complex(Xac * zeta(1 - a + b) * zeta(1 - a - c) * zeta(1 + b + d) * zeta(1 - c + d)
                   / zeta(2 - a + b - c + d))


# ---------------------------------------------------------------- gamma lemmas

def _lg(z):
    return log_gamma(np.asarray(z, dtype=complex))


def gamma_threeterm(a: complex, b: complex, kind: str = "even"):
    """Both sides of the three-term gamma identity.

    ``kind="even"`` adds the third term and ``kind="odd"`` subtracts it, with
    the matching right-hand sides.
    """
    for v in (a, b, a + b):
        if abs(v - round(v.real)) < 1e-12:
            raise PoleError(f"{v} is an integer")
    t1 = np.exp(_lg(a) + _lg(1 - a - b) - _lg(1 - b))
    t2 = np.exp(_lg(b) + _lg(1 - a - b) - _lg(1 - a))
    t3 = np.exp(_lg(a) + _lg(b) - _lg(a + b))
    head = _lg((1 - a - b) / 2) - _lg((a + b) / 2) + 0.5 * math.log(math.pi)
    if kind == "even":
        lhs = t1 + t2 + t3
        rhs = np.exp(head + _lg(a / 2) - _lg((1 - a) / 2) + _lg(b / 2) - _lg((1 - b) / 2))
    elif kind == "odd":
        lhs = t1 + t2 - t3
        rhs = np.exp(head + _lg((1 + a) / 2) - _lg((2 - a) / 2) + _lg((1 + b) / 2) - _lg((2 - b) / 2))
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return complex(lhs), complex(rhs)


def bessel_gamma(a: complex, r: float):
    """Both sides of G(a+ir)/G(1-a+ir) - G(a-ir)/G(1-a-ir) = -(2i/pi) sinh(pi r) cos(pi a) G(a+ir)G(a-ir)."""
    ir = 1j * r
    lhs = np.exp(_lg(a + ir) - _lg(1 - a + ir)) - np.exp(_lg(a - ir) - _lg(1 - a - ir))
    rhs = -2j / math.pi * math.sinh(math.pi * r) * np.cos(math.pi * a) * np.exp(_lg(a + ir) + _lg(a - ir))
    return complex(lhs), complex(rhs)


def butter(v: complex, alpha: complex, gamma: complex):
    """Three-term Gamma_{alpha,gamma}(v) and its product form."""
    a, c = alpha, gamma
    three = (np.exp(_lg(0.5 - a - v) + _lg(a + c + 2 * v) - _lg(0.5 + c + v))
             + np.exp(_lg(0.5 - c - v) + _lg(a + c + 2 * v) - _lg(0.5 + a + v))
             + np.exp(_lg(0.5 - a - v) + _lg(0.5 - c - v) - _lg(1 - a - c - 2 * v)))
    prod = np.exp(0.5 * math.log(math.pi)
                  + _lg((a + c + 2 * v) / 2) - _lg((1 - a - c - 2 * v) / 2)
                  + _lg((0.5 - a - v) / 2) - _lg((0.5 + a + v) / 2)
                  + _lg((0.5 - c - v) / 2) - _lg((0.5 + c + v) / 2))
    return complex(three), complex(prod)


def _pole_distance(z: complex) -> float:
    """Distance from z to the nearest pole of Gamma (a nonpositive integer)."""
    k = min(0, round(z.real))
    return abs(z - k)


def _lemma_args(kind: str, a: complex, b) -> list[complex]:
    if kind == "bessel":
        ir = 1j * b
        return [a + ir, a - ir, 1 - a + ir, 1 - a - ir]
    return [a, b, 1 - a - b, 1 - a, 1 - b, a + b, (1 - a - b) / 2, (a + b) / 2, a / 2, b / 2,
            (1 - a) / 2, (1 - b) / 2, (1 + a) / 2, (1 + b) / 2, (2 - a) / 2, (2 - b) / 2]


def sample_gamma_points(rng, n: int, kind: str, box: float = 2.0, gap: float = 0.05) -> list[tuple]:
    """Random (a, b) in the square [-box, box]^2 (b real for the Bessel lemma), every Gamma argument at least ``gap`` from a pole."""
    out = []
    while len(out) < n:
        a = complex(*rng.uniform(-box, box, 2))
        b = float(rng.uniform(-box, box)) if kind == "bessel" else complex(*rng.uniform(-box, box, 2))
        if min(_pole_distance(z) for z in _lemma_args(kind, a, b)) >= gap:
            out.append((a, b))
    return out


def gamma_lemma(kind: str, a: complex, b) -> tuple[complex, complex]:
    """Both sides of the even/odd three-term identity or the Bessel one."""
    return bessel_gamma(a, b) if kind == "bessel" else gamma_threeterm(a, b, kind)


# ---------------------------------------------------------------- I and I_-

class _Np:
    pi = math.pi
    exp = staticmethod(np.exp)
    lg = staticmethod(_lg)
    zeta = staticmethod(zeta)

    @staticmethod
    def log(x):
        return math.log(x)


class _Mp:
    pi = property(lambda self: mpmath.pi)
    exp = staticmethod(mpmath.exp)
    lg = staticmethod(mpmath.loggamma)
    zeta = staticmethod(mpmath.zeta)
    log = staticmethod(mpmath.log)


def _log_g(B, s, shifts, sign: int):
    """log of g at shifts*sign (even parity), pi factor included."""
    out = -2 * s * B.log(B.pi)
    for x in shifts:
        x = sign * x
        out = out + B.lg((0.5 + x + s) / 2) - B.lg((0.5 + x) / 2)
    return out


def _x_all_log(B, shifts, q):
    out = 0
    for u in shifts:
        out = out - u * B.log(q / B.pi) + B.lg((0.5 - u) / 2) - B.lg((0.5 + u) / 2)
    return out


def _integrand_I(B, G, shifts, q):
    a, b, c, d = shifts

    def f(s):
        lead = (-(a + c) * B.log(q / B.pi) + 2 * s * B.log(B.pi) + _log_g(B, s, shifts, 1)
                + B.lg((0.5 - a - s) / 2) - B.lg((0.5 + a + s) / 2)
                + B.lg((0.5 - c - s) / 2) - B.lg((0.5 + c + s) / 2))
        return B.exp(lead) * G(s) * B.zeta(1 - a - c - 2 * s) * B.zeta(1 + b + d + 2 * s)
    return f


def _integrand_I_minus(B, G, shifts, q):
    a, b, c, d = shifts

    def f(s):
        lead = (_x_all_log(B, shifts, q) + (b + d) * B.log(q / B.pi) + 2 * s * B.log(B.pi)
                + _log_g(B, s, shifts, -1)
                + B.lg((0.5 + b - s) / 2) - B.lg((0.5 - b + s) / 2)
                + B.lg((0.5 + d - s) / 2) - B.lg((0.5 - d + s) / 2))
        return B.exp(lead) * G(s) * B.zeta(1 - a - c + 2 * s) * B.zeta(1 + b + d - 2 * s)
    return f


@dataclass(frozen=True)
class HalfAssembly:
    I: complex
    I_minus: complex
    U: complex
    residual: float  # |I + I_- - U|, formed before rounding I and I_- to doubles


HALF_SPEC = ContourSpec(0.25, 8.0, 1024)


def _over_s(h, spec: ContourSpec, precision: str, dps: int) -> complex:
    """(1/2 pi i) int h(s)/s ds on a line Re s > 0, with the pole at 0 peeled off.

    h(0) e^{s^2}/s integrates to h(0)/2 on any such line, so only the
    remainder, analytic at 0, goes through the trapezoid.
    """
    if spec.re_line <= 0:
        raise ValueError("line must lie right of the origin")
    if precision == "double":
        h0 = complex(h(np.array([0j]))[0])
        return h0 / 2 + contour_integral(lambda s: (h(s) - h0 * np.exp(s * s)) / s, spec)
    with mpmath.workdps(dps):
        h0 = h(mpmath.mpc(0))
        rest = contour_integral_mp(lambda s: (h(s) - h0 * mpmath.exp(s * s)) / s, spec, dps)
        return h0 / 2 + rest


def half_integrals(shifts: ShiftTuple, q: int, G: GWeight, spec: ContourSpec = HALF_SPEC,
                   precision: str = "double", dps: int = 40) -> tuple[complex, complex]:
    """The integrals I (bracketed main term) and I_- on the line Re s = spec.re_line."""
    sh = shifts.as_tuple()
    a, b, c, d = sh
    if precision == "double":
        B = _Np
        ratio = complex(zeta(1 - a + b) * zeta(1 - c + d) / zeta(2 - a + b - c + d))
        I = _over_s(_integrand_I(B, G, sh, q), spec, precision, dps)
        Im = _over_s(_integrand_I_minus(B, G, sh, q), spec, precision, dps)
        return ratio * I, ratio * Im
    if precision == "mp":
        with mpmath.workdps(dps):
            B = _Mp()
            sh = tuple(mpmath.mpc(x) for x in sh)
            a, b, c, d = sh
            ratio = (mpmath.zeta(1 - a + b) * mpmath.zeta(1 - c + d)
                     / mpmath.zeta(2 - a + b - c + d))
            I = _over_s(_integrand_I(B, G.mp, sh, q), spec, precision, dps)
            Im = _over_s(_integrand_I_minus(B, G.mp, sh, q), spec, precision, dps)
            return ratio * I, ratio * Im
    raise ValueError(f"unknown precision {precision!r}")


def mp_settings(G: GWeight, re_line: float = 0.25, tail: float = 1e-30) -> tuple[ContourSpec, int]:
    """Contour and working precision for the mpmath route.

    The height is where |G| has fallen below ``tail``; the digits cover the
    peak of |G| on the line plus a margin.
    """
    t = np.linspace(0, 40, 4001)
    mag = np.abs(G(re_line + 1j * t))
    peak = float(mag.max())
    above = np.nonzero(mag > tail)[0]
    T = float(t[above[-1]]) + 0.5 if len(above) else 4.0
    dps = 25 + max(0, int(math.ceil(math.log10(peak))))
    nodes = int(math.ceil(2 * T / 0.08)) + 1
    return ContourSpec(re_line, T, nodes), dps


def verify_half_assembly(shifts: ShiftTuple, q: int, G: GWeight, spec: ContourSpec = HALF_SPEC,
                         precision: str = "double", dps: int = 40) -> HalfAssembly:
    """I + I_- against U.  Exact when G vanishes at -(alpha+gamma)/2 and -(beta+delta)/2."""
    I, Im = half_integrals(shifts, q, G, spec, precision, dps)
    U = evaluate_U(shifts, q, 0)
    with mpmath.workdps(max(dps, 20)):
        res = float(abs(I + Im - U))
    return HalfAssembly(complex(I), complex(Im), U, res)


def claim_identity(s: complex, shifts: ShiftTuple, q: int) -> tuple[complex, complex]:
    """Both sides of the pointwise Gamma-ratio identity that turns I' into -I_-."""
    B = _Np
    sh = shifts.as_tuple()
    a, b, c, d = sh
    L = q / math.pi
    lhs = (-(a + c) * math.log(L) + B.lg((0.5 - a + s) / 2) - B.lg((0.5 + a - s) / 2)
           + B.lg((0.5 - c + s) / 2) - B.lg((0.5 + c - s) / 2)
           - 2 * s * math.log(math.pi) + _log_g(B, -s, sh, 1))
    rhs = (_x_all_log(B, sh, q) + (b + d) * math.log(L)
           + B.lg((0.5 + b - s) / 2) - B.lg((0.5 - b + s) / 2)
           + B.lg((0.5 + d - s) / 2) - B.lg((0.5 - d + s) / 2)
           + 2 * s * math.log(math.pi) + _log_g(B, s, sh, -1))
    return complex(np.exp(lhs)), complex(np.exp(rhs))


# ---------------------------------------------------------------- 2D P-integral

def p_integral(shifts: ShiftTuple, q: int, G: GWeight,
               spec_v: ContourSpec = ContourSpec(0.25, 6.0, 129),
               spec_w: ContourSpec = ContourSpec(0.05, 6.0, 129)) -> complex:
    """The double integral over v and w that carries the off-diagonal main term.

    Only a tensor-product trapezoid; it is checked through the one-variable
    assembly, not on its own.
    """
    a, b, c, d = shifts.as_tuple()
    v, hv = spec_v.points()
    w, hw = spec_w.points()
    V, W = np.meshgrid(v, w, indexing="ij")
    logq = math.log(q)
    f = (np.exp((-a - c + W / 2) * logq) * G(V) * G(W) * gamma_factor_g(V, shifts, 0) / (V * W)
         * np.exp(_lg(0.5 - a - V) + _lg(a + c + 2 * V - W / 2) - _lg(0.5 + c + V - W / 2))
         * zeta(1 - c + d + W) * zeta(a + c + 2 * V - W / 2) * zeta(1 + b + d + 2 * V + W / 2)
         / zeta(2 - a + b - c + d + W))
    return complex(zeta(1 - a + b) * f.sum() * hv * hw / (2 * math.pi) ** 2)
