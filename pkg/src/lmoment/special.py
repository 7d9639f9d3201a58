"""Complex special functions, vertical-line quadrature and the G weight.

Everything here is vectorized over numpy arrays and runs in double
precision.  A few entry points also have an mpmath twin (suffix ``_mp``)
for integrands whose cancellation exceeds what doubles can carry.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import mpmath
import numpy as np

from .shifts import ShiftTuple

LOG_2PI = math.log(2 * math.pi)

# B_2, B_4, ..., B_24
_BERNOULLI = np.array([
    1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6,
    -3617 / 510, 43867 / 798, -174611 / 330, 854513 / 138, -236364091 / 2730,
])


class PoleError(ValueError):
    """Raised when an argument sits on (or too close to) a pole."""


# ---------------------------------------------------------------- log-gamma

def _stirling(z):
    z2 = z * z
    acc = np.zeros_like(z)
    zp = z
    for k in range(1, 11):
        b = _BERNOULLI[k - 1]
        acc = acc + b / (2 * k * (2 * k - 1) * zp)
        zp = zp * z2
    return (z - 0.5) * np.log(z) - z + 0.5 * LOG_2PI + acc


def log_gamma(z):
    """Principal branch of log Gamma(z) for complex z.

    Shifts z upward by recurrence until Re z >= 10 and applies the Stirling
    series there.  Summing principal logs in the recurrence lands on the
    branch that is continuous off the negative real axis.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    bad = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(bad):
        raise PoleError(f"log_gamma pole at z={z[bad][0]}")
    shift = np.clip(np.ceil(10.0 - z.real), 0, None).astype(int)
    out = np.empty_like(z)
    for n in np.unique(shift):
        sel = shift == n
        w = z[sel]
        corr = np.zeros_like(w)
        for k in range(n):
            corr = corr + np.log(w + k)
        out[sel] = _stirling(w + n) - corr
    return out[0] if scalar else out


def gamma(z):
    return np.exp(log_gamma(z))


def gamma_ratio(a, b):
    """Gamma(a)/Gamma(b) via log-gamma."""
    return np.exp(log_gamma(a) - log_gamma(b))


# ---------------------------------------------------------------- zeta

def hurwitz_zeta(s, a, n_tail: int = 30, n_bern: int = 12):
    """Hurwitz zeta(s, a) for a in (0, 1], any complex s != 1.

    Euler-Maclaurin with the head summed to ``n_tail`` terms.  The tail point
    is raised to about |s| when |s| is large, otherwise the Bernoulli
    remainder stops shrinking.  ``s`` and ``a`` broadcast.
    """
    s = np.asarray(s, dtype=complex)
    a = np.asarray(a, dtype=float)
    if np.any(s == 1):
        raise PoleError("hurwitz_zeta pole at s=1")
    if np.any(a <= 0) or np.any(a > 1):
        raise ValueError("hurwitz_zeta requires 0 < a <= 1")
    s_b, a_b = np.broadcast_arrays(s, a)
    smax = float(np.max(np.abs(s_b))) if s_b.size else 0.0
    N = max(n_tail, int(math.ceil(0.8 * smax)))
    n = np.arange(N, dtype=float).reshape((N,) + (1,) * s_b.ndim)
    head = np.exp(-s_b * np.log(n + a_b)).sum(axis=0)
    x = N + a_b
    logx = np.log(x)
    xs = np.exp(-s_b * logx)
    tail = x * xs / (s_b - 1) + 0.5 * xs
    # term k: B_2k/(2k)! * s(s+1)...(s+2k-2) * x^{-s-2k+1}
    poch = s_b.copy()
    xpow = xs / x
    fact = 2.0
    for k in range(1, n_bern + 1):
        tail = tail + _BERNOULLI[k - 1] / fact * poch * xpow
        poch = poch * (s_b + 2 * k - 1) * (s_b + 2 * k)
        xpow = xpow / (x * x)
        fact *= (2 * k + 1) * (2 * k + 2)
    return head + tail


def zeta(s):
    return hurwitz_zeta(s, 1.0)


def zeta_q(s, q: int):
    """zeta(s) with the Euler factor at the prime q removed."""
    s = np.asarray(s, dtype=complex)
    return zeta(s) * (1 - np.exp(-s * math.log(q)))


def zeta_q_mp(s, q: int):
    return mpmath.zeta(s) * (1 - mpmath.power(q, -s))


# ---------------------------------------------------------------- quadrature

@dataclass(frozen=True)
class ContourSpec:
    """Truncated vertical line Re s = re_line, |Im s| <= height."""

    re_line: float = 1.0
    height: float = 8.0
    nodes: int = 512

    def __post_init__(self):
        if self.height <= 0:
            raise ValueError("height must be positive")
        if self.nodes < 16:
            raise ValueError("need at least 16 nodes")

    def points(self) -> tuple[np.ndarray, float]:
        t = np.linspace(-self.height, self.height, self.nodes)
        return self.re_line + 1j * t, t[1] - t[0]

    def doubled(self) -> ContourSpec:
        return ContourSpec(self.re_line, self.height, 2 * self.nodes - 1)

    def moved(self, re_line: float) -> ContourSpec:
        return ContourSpec(re_line, self.height, self.nodes)


class QuadratureError(ArithmeticError):
    pass


def contour_integral(f: Callable[[np.ndarray], np.ndarray], spec: ContourSpec) -> complex:
    """(1/2 pi i) * integral of f over the line, by the trapezoid rule.

    ``f`` receives the whole node array at once.
    """
    s, h = spec.points()
    vals = np.asarray(f(s), dtype=complex)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        raise QuadratureError(f"non-finite integrand at s={s[bad][0]}")
    w = np.full(s.shape, h)
    w[0] = w[-1] = h / 2
    return complex(np.dot(w, vals) / (2 * math.pi))


def contour_integral_mp(f: Callable, spec: ContourSpec, dps: int = 40):
    """mpmath twin of contour_integral; ``f`` is called one node at a time.

    Returns an mpc so that callers can combine large, cancelling integrals
    before dropping to double precision.
    """
    with mpmath.workdps(dps):
        T = mpmath.mpf(spec.height)
        n = spec.nodes
        h = 2 * T / (n - 1)
        c = mpmath.mpf(spec.re_line)
        acc = mpmath.mpc(0)
        for k in range(n):
            v = f(mpmath.mpc(c, -T + k * h))
            if not mpmath.isfinite(v):
                raise QuadratureError(f"non-finite integrand at node {k}")
            acc += v / 2 if k in (0, n - 1) else v
        return acc * h / (2 * mpmath.pi)


# ---------------------------------------------------------------- G weight

def _full_roots(v) -> list:
    """(xi +- eta)/2 over all unordered pairs, then 1/2 +- xi."""
    out = []
    for x, y in itertools.combinations(v, 2):
        out.extend([(x + y) / 2, (x - y) / 2])
    for x in v:
        out.extend([0.5 + x, 0.5 - x])
    return out


def _pair_roots(v) -> list:
    a, b, c, d = v
    return [(a + c) / 2, (b + d) / 2]


def _half_roots(v) -> list:
    return [r for x in v for r in (0.5 + x, 0.5 - x)]


_RECIPES = {"full": _full_roots, "pair": _pair_roots, "half": _half_roots,
            "gaussian": lambda v: []}


@dataclass(frozen=True)
class GWeight:
    """G(s) = Q(s) exp(s^2) with Q(s) = prod over roots r of (1 - s^2/r^2).

    Each root r puts zeros at +r and -r, so G is even and G(0) = 1.  The
    roots follow from the shifts by a named recipe, so the mpmath evaluation
    can rebuild them without inheriting double rounding.
    """

    shifts: ShiftTuple | None
    kind: str = "gaussian"
    zero_set: tuple[complex, ...] = field(init=False)

    def __post_init__(self):
        if self.kind not in _RECIPES:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        v = self.shifts.as_tuple() if self.shifts is not None else None
        if v is None and self.kind != "gaussian":
            raise ValueError("this weight needs shifts")
        object.__setattr__(self, "zero_set", tuple(_RECIPES[self.kind](v)))

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        s2 = s * s
        out = np.exp(s2)
        for r in self.zero_set:
            out = out * (1 - s2 / (r * r))
        return out

    def mp(self, s):
        s2 = s * s
        out = mpmath.exp(s2)
        if self.zero_set:
            for r in _RECIPES[self.kind]([mpmath.mpc(x) for x in self.shifts.as_tuple()]):
                out *= 1 - s2 / (r * r)
        return out

    def zeros(self) -> list[complex]:
        return [z for r in self.zero_set for z in (r, -r)]

    def with_shifts(self, shifts: ShiftTuple) -> GWeight:
        return GWeight(shifts if self.kind != "gaussian" else None, self.kind)


def _check_separation(combos, delta_min):
    for r in combos:
        if abs(r) < delta_min:
            raise ValueError(f"shift combination {r:.3g} below separation {delta_min}")


def build_G(shifts: ShiftTuple, delta_min: float = 1e-3) -> GWeight:
    """The full weight: zeros at (+-xi +- eta)/2 for every pair and at 1/2 +- xi.

    Taking every pair with both signs is what makes Q symmetric in the four
    shifts and invariant under flipping the sign of any one of them.
    """
    v = shifts.as_tuple()
    _check_separation([2 * r for r in _full_roots(v)[:12]], delta_min)
    return GWeight(shifts, "full")


def pair_G(shifts: ShiftTuple, delta_min: float = 1e-3) -> GWeight:
    """Only the zeros at +-(alpha+gamma)/2 and +-(beta+delta)/2.

    This is all the main-term assembly needs, and it keeps |G| small enough
    on vertical lines for double precision.
    """
    _check_separation([2 * r for r in _pair_roots(shifts.as_tuple())], delta_min)
    return GWeight(shifts, "pair")


def half_G(shifts: ShiftTuple) -> GWeight:
    """Only the zeros at +-(1/2 + xi) and +-(1/2 - xi).

    These cancel the Gamma poles of g at s = -1/2 - xi, which is what makes
    V(x) -> 1 quickly as x -> 0.
    """
    return GWeight(shifts, "half")


def gaussian_G(shifts: ShiftTuple | None = None) -> GWeight:
    """G(s) = exp(s^2): even, entire, G(0) = 1, no prescribed zeros."""
    return GWeight(None, "gaussian")
