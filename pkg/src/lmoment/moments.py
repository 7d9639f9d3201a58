"""Shifted moments by brute force and by the averaged divisor-sum route."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .arith import dirichlet_convolution, sigma_sieve
from .characters import CharacterTable, l_value_grid, x_factor
from .shifts import ShiftTuple
from .special import ContourSpec, GWeight, log_gamma

AFE_SPEC = ContourSpec(1.0, 6.0, 256)
DEFAULT_CUTOFF = 320.0


@dataclass
class MomentReport:
    q: int
    shifts: ShiftTuple
    parity: int
    brute_value: complex
    conjecture_value: complex
    runtime_ms: float = 0.0
    abs_dev: float = field(init=False)
    rel_dev: float = field(init=False)

    def __post_init__(self):
        self.abs_dev = abs(self.brute_value - self.conjecture_value)
        c = abs(self.conjecture_value)
        self.rel_dev = self.abs_dev / c if c > 0 else math.inf


def _moment(table: CharacterTable, shifts: ShiftTuple, parity: int) -> complex:
    a, b, c, d = shifts.as_tuple()
    grids = {}
    for x in {a, b, c, d}:
        grids[x] = l_value_grid(table, 0.5 + x)
    j = table.indices(parity)
    jb = (-j) % (table.q - 1)
    prod = grids[a][j] * grids[b][j] * grids[c][jb] * grids[d][jb]
    return complex(2 * prod.sum() / (table.q - 2))


def moment_even(table: CharacterTable, shifts: ShiftTuple) -> complex:
    """(2/(q-2)) sum over even primitive chi of L(1/2+a,chi)L(1/2+b,chi)L(1/2+c,chi-bar)L(1/2+d,chi-bar)."""
    return _moment(table, shifts, 0)


def moment_odd(table: CharacterTable, shifts: ShiftTuple) -> complex:
    return _moment(table, shifts, 1)


def moment(table: CharacterTable, shifts: ShiftTuple, parity: int) -> complex:
    return _moment(table, shifts, parity)


def fourth_moment(q: int | CharacterTable) -> float:
    """(1/(q-2)) sum over all primitive chi mod q of |L(1/2, chi)|^4."""
    table = q if isinstance(q, CharacterTable) else CharacterTable(q)
    L = l_value_grid(table, 0.5)[1:]
    return float(np.sum(np.abs(L) ** 4) / (table.q - 2))


def timed_report(table, shifts, parity, reference: complex) -> MomentReport:
    t0 = time.perf_counter()
    val = _moment(table, shifts, parity)
    return MomentReport(table.q, shifts, parity, val, reference, 1e3 * (time.perf_counter() - t0))


# ---------------------------------------------------------------- the V weight

def gamma_factor_g(s, shifts: ShiftTuple, parity: int):
    """g(s) = pi^{-2s} prod over shifts of Gamma((1/2+x+s+a)/2) / Gamma((1/2+x+a)/2)."""
    s = np.asarray(s, dtype=complex)
    logg = -2 * s * math.log(math.pi)
    for x in shifts.as_tuple():
        logg = logg + log_gamma((0.5 + x + s + parity) / 2) - log_gamma((0.5 + x + parity) / 2)
    return np.exp(logg)


def v_weight(x, shifts: ShiftTuple, parity: int, G: GWeight, spec: ContourSpec = ContourSpec()):
    """V(x) = (1/2 pi i) int (G(s)/s) g(s) x^{-s} ds, vectorized over x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("V needs x > 0")
    s, h = spec.points()
    w = np.full(s.shape, h)
    w[0] = w[-1] = h / 2
    kern = w * G(s) / s * gamma_factor_g(s, shifts, parity) / (2 * math.pi)
    if not np.all(np.isfinite(kern)):
        raise ArithmeticError("non-finite V kernel")
    logx = np.log(np.atleast_1d(x)).ravel()
    out = np.empty(logx.shape, dtype=complex)
    t = s.imag
    step = max(1, 2**22 // len(s))
    for i in range(0, len(logx), step):
        lx = logx[i:i + step]
        out[i:i + step] = np.exp(-spec.re_line * lx) * (np.exp(-1j * np.outer(lx, t)) @ kern)
    return out.reshape(x.shape) if x.ndim else complex(out[0])


# ---------------------------------------------------------------- divisor sums

@dataclass
class DivisorSumParts:
    s_all: complex
    s_plus: complex
    s_minus: complex
    diagonal: complex
    a1: complex
    a1_half: complex  # same sums cut at half the range

    @property
    def tail_estimate(self) -> float:
        return abs(self.a1 - self.a1_half)


def _congruent_pairs(K: int, q: int, sign: int):
    """All (m, n) with m n <= K, q not dividing m, n = sign*m mod q."""
    r = math.isqrt(K)
    ms, ns = [], []
    for m in range(1, r + 1):
        if m % q == 0:
            continue
        n0 = (sign * m) % q
        n = np.arange(n0, K // m + 1, q)
        n = n[n > 0]
        ms.append(np.full(n.shape, m))
        ns.append(n)
    # m > r forces n <= K/m < K/r, so loop over n instead
    for n in range(1, K // (r + 1) + 1):
        if n % q == 0:
            continue
        m0 = (sign * n) % q  # m = sign*n mod q as well, since sign^2 = 1
        lo = r + 1
        first = lo + ((m0 - lo) % q)
        m = np.arange(first, K // n + 1, q)
        ms.append(m)
        ns.append(np.full(m.shape, n))
    return np.concatenate(ms), np.concatenate(ns)


def _coefficients(K: int, q: int, x: complex, y: complex) -> np.ndarray:
    """sigma_{x-y}(m) m^{-1/2-x} for m <= K, zero when q | m."""
    m = np.arange(K + 1, dtype=float)
    m[0] = 1
    a = sigma_sieve(x - y, K) * np.exp(-(0.5 + x) * np.log(m))
    a[0] = 0
    a[::q] = 0
    return a


def divisor_sum_parts(table: CharacterTable, shifts: ShiftTuple, G: GWeight,
                      cutoff: float = DEFAULT_CUTOFF, parity: int = 0,
                      spec: ContourSpec = AFE_SPEC) -> DivisorSumParts:
    """The three sums behind A_{1,q}: over all (mn, q) = 1 and over n = +-m mod q."""
    q = table.q
    K = int(cutoff * q * q)
    a_, b_, c_, d_ = shifts.as_tuple()
    a = _coefficients(K, q, a_, b_)
    b = _coefficients(K, q, c_, d_)
    V = np.zeros(K + 1, dtype=complex)
    V[1:] = v_weight(np.arange(1, K + 1) / q**2, shifts, parity, G, spec)
    cv = dirichlet_convolution(a, b) * V
    s_all, s_all_half = complex(cv.sum()), complex(cv[:K // 2 + 1].sum())
    sums, halves = [], []
    for sign in (1, -1):
        m, n = _congruent_pairs(K, q, sign)
        terms = a[m] * b[n] * V[m * n]
        sums.append(complex(terms.sum()))
        halves.append(complex(terms[m * n <= K // 2].sum()))
    nd = np.arange(1, math.isqrt(K) + 1)
    diag = complex(np.sum(a[nd] * b[nd] * V[nd * nd]))

    def combine(sp, sm, sa):
        return ((q - 1) * (sp + sm) - 2 * sa) / (q - 2)

    return DivisorSumParts(s_all, sums[0], sums[1], diag,
                           combine(sums[0], sums[1], s_all), combine(halves[0], halves[1], s_all_half))


def moment_via_divisor_sum(table: CharacterTable, shifts: ShiftTuple, G: GWeight,
                           cutoff: float = DEFAULT_CUTOFF, spec: ContourSpec = AFE_SPEC,
                           tol: float | None = None) -> complex:
    """A_{1,q}(shifts) + X_{a,b,c,d} A_{1,q}(-shifts) for even characters.

    With ``tol`` set, the change from halving the range is used as a tail
    estimate and a cutoff that leaves more than ``tol`` behind is refused.
    """
    neg = shifts.negated()
    Gn = G.with_shifts(neg)
    p1 = divisor_sum_parts(table, shifts, G, cutoff, 0, spec)
    pm1 = divisor_sum_parts(table, neg, Gn, cutoff, 0, spec)
    X = np.prod([x_factor(0.5 + x, 0, table.q) for x in shifts.as_tuple()])
    total = complex(p1.a1 + X * pm1.a1)
    if tol is not None:
        tail = p1.tail_estimate + abs(X) * pm1.tail_estimate
        if tail > tol * max(abs(total), 1.0):
            raise ValueError(f"cutoff {cutoff} too small: tail estimate {tail:.2e}")
    return total
