"""An approximate functional equation for sigma_lambda(n) and some Dirichlet-series identities."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .arith import (dirichlet_convolution, divisor_sigma, divisors, is_prime, mobius, mobius_sieve, ramanujan_sum,
                    sigma_sieve, divisor_count_sieve)
from .special import ContourSpec, GWeight, gaussian_G, hurwitz_zeta, zeta

F_SPEC = ContourSpec(1.0, 6.0, 241)


# ---------------------------------------------------------------- f_lambda

def _kernel(lam: complex, G: GWeight, spec: ContourSpec):
    """Line nodes and the x-independent factor zeta(1 - lam + w) G(w) / w times weights."""
    if spec.re_line <= abs(complex(lam).real):
        raise ValueError(f"contour abscissa {spec.re_line} must exceed |Re lambda| = {abs(lam.real)}")
    w, h = spec.points()
    c = zeta(1 - lam + w) * G(w) / w
    wt = np.full(w.shape, h)
    wt[0] = wt[-1] = h / 2
    return w, h, c * wt / (2 * math.pi)


def f_lambda(x, lam: complex, G: GWeight | None = None, spec: ContourSpec = F_SPEC):
    """(1/2 pi i) int_(a) x^{-w} zeta(1 - lam + w) G(w)/w dw for an array of x > 0.

    On the line w = a + i t the nodes t_k are equally spaced, so x^{-w_k}
    is x^{-w_0} times the k-th power of x^{-i h}; the sum over nodes is
    then a Horner evaluation and costs O(nodes) per x.
    """
    G = gaussian_G() if G is None else G
    lam = complex(lam)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("x must be positive")
    w, h, c = _kernel(lam, G, spec)
    lx = np.log(x)
    z = np.exp(-1j * h * lx)
    acc = np.zeros(x.shape, dtype=complex)
    for ck in c[::-1]:
        acc = acc * z + ck
    return acc * np.exp(-w[0] * lx)


def f_lambda_direct(x: float, lam: complex, G: GWeight | None = None,
                    spec: ContourSpec = F_SPEC) -> complex:
    """Same integral summed node by node (reference for the Horner route)."""
    G = gaussian_G() if G is None else G
    w, _, c = _kernel(complex(lam), G, spec)
    return complex(np.sum(c * np.exp(-w * math.log(x))))


def f_envelope(x: float, lam: complex, G: GWeight | None = None,
               lines=np.arange(1.0, 14.0, 0.25), n_t: int = 801) -> float:
    """Upper bound for |f_lambda(x)| from |zeta(sigma + it)| <= zeta(sigma), minimized over lines."""
    G = gaussian_G() if G is None else G
    best = math.inf
    for a in lines:
        if a <= abs(lam.real) + 0.05:
            continue
        t = np.linspace(-12, 12, n_t)
        w = a + 1j * t
        C = np.trapezoid(np.abs(G(w)) / np.abs(w), t) / (2 * math.pi)
        zb = float(zeta(1 + a - lam.real).real)
        best = min(best, x ** (-a) * zb * C)
    return best


# ---------------------------------------------------------------- the expansion

class TailWarning(UserWarning):
    pass


def ramanujan_row(n: int, L: int) -> np.ndarray:
    """c_l(n) for 0 <= l <= L (entry 0 unused), from c_l(n) = sum_{e | (l,n)} e mu(l/e)."""
    mu = mobius_sieve(L)
    out = np.zeros(L + 1, dtype=np.int64)
    for e in divisors(n):
        if e > L:
            break
        out[e::e] += e * mu[1:L // e + 1]
    return out


def _series_tail(n: int, lam: complex, L: int, G: GWeight, lines=np.arange(1.0, 14.0, 0.25)) -> float:
    """Bound for sum_{l > L} |c_l(n)| l^{Re lam - 1} |f_lam(l / sqrt n)| with |c_l(n)| <= sigma(n)."""
    sig = float(divisor_sigma(1, n).real)
    best = math.inf
    t = np.linspace(-12, 12, 801)
    for a in lines:
        if a <= abs(lam.real) + 0.05:
            continue
        w = a + 1j * t
        C = np.trapezoid(np.abs(G(w)) / np.abs(w), t) / (2 * math.pi)
        zb = float(zeta(1 + a - lam.real).real)
        # sum_{l > L} l^{Re lam - 1 - a} <= L^{Re lam - a} / (a - Re lam)
        best = min(best, sig * zb * C * n ** (a / 2) * L ** (lam.real - a) / (a - lam.real))
    return best


def afe_tail(n: int, lam: complex, L: int, G: GWeight | None = None) -> float:
    G = gaussian_G() if G is None else G
    lam = complex(lam)
    return _series_tail(n, lam, L, G) + n ** lam.real * _series_tail(n, -lam, L, G)


def choose_l_max(n: int, lam: complex, G: GWeight | None = None, tail_tol: float = 1e-9) -> int:
    """Smallest L = 2^k * ceil(50 sqrt n) whose tail bound is below ``tail_tol``."""
    L = math.ceil(50 * math.sqrt(n))
    while afe_tail(n, lam, L, G) > tail_tol:
        L *= 2
        if L > 1 << 26:
            raise ValueError("no l_max below 2^26 meets the tail tolerance")
    return L


@dataclass(frozen=True)
class AfeResult:
    n: int
    lam: complex
    target: complex
    first: complex
    second: complex
    residual: float
    l_max: int
    tail: float


def verify_divisor_afe(n: int, lam: complex, G: GWeight | None = None,
                       spec: ContourSpec = F_SPEC, l_max: int | None = None) -> AfeResult:
    """sigma_lam(n) against sum_l c_l(n) l^{lam-1} f_lam(l/sqrt n) + n^lam sum_l c_l(n) l^{-lam-1} f_{-lam}(l/sqrt n)."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    G = gaussian_G() if G is None else G
    lam = complex(lam)
    if l_max is None:
        l_max = choose_l_max(n, lam, G)
    elif l_max < 50 * math.sqrt(n):
        raise ValueError(f"l_max must be at least 50 sqrt(n) = {50 * math.sqrt(n):.1f}")
    tail = afe_tail(n, lam, l_max, G)
    if tail > 1e-6:
        warnings.warn(f"tail bound {tail:.2e} at l_max={l_max}", TailWarning, stacklevel=2)
    c = ramanujan_row(n, l_max)[1:]
    l = np.arange(1, l_max + 1, dtype=float)
    keep = c != 0
    c, l = c[keep], l[keep]
    x = l / math.sqrt(n)
    ll = np.log(l)
    first = np.sum(c * np.exp((lam - 1) * ll) * f_lambda(x, lam, G, spec))
    second = np.exp(lam * math.log(n)) * np.sum(c * np.exp((-lam - 1) * ll) * f_lambda(x, -lam, G, spec))
    target = complex(divisor_sigma(lam, n))
    res = abs(target - first - second)
    return AfeResult(n, lam, target, complex(first), complex(second), float(res), l_max, tail)


# ---------------------------------------------------------------- identities

def divisor_tail(N: int, sigma: float, power: int = 1) -> float:
    """Bound for sum_{n > N} d_{power+1}(n) n^{-sigma}.

    Uses D_k(x) <= x (log x + 1)^{k-1} and partial summation:
    tail <= sigma int_N^inf (log x + 1)^m x^{-sigma} dx with m = power.
    """
    if sigma <= 1:
        raise ValueError("tail bound needs sigma > 1")
    k = sigma - 1
    A = math.log(N)
    acc = 0.0
    for j in range(power + 1):
        acc += math.factorial(power) / math.factorial(power - j) * (A + 1) ** (power - j) / k ** (j + 1)
    return sigma * math.exp(-k * A) * acc


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    lhs: complex
    rhs: complex
    residual: float
    tail: float

    def passed(self, tol: float = 1e-6) -> bool:
        return self.residual <= tol + self.tail


def _check_d(d: int):
    if d != 1 and not is_prime(d):
        raise ValueError(f"d={d} must be 1 or a prime")


def divisor_function_sum(s: complex, lam: complex, d: int, N: int = 1 << 21) -> IdentityCheck:
    """sum_{d | n} sigma_lam(n) n^{-s} against zeta(s) zeta(s-lam) d^{-s} sum_{bc=d} mu(b) b^{lam-s} sigma_lam(c)."""
    _check_d(d)
    s, lam = complex(s), complex(lam)
    if s.real <= 1 or (s - lam).real <= 1:
        raise ValueError("need Re s > 1 and Re(s - lambda) > 1")
    sig = sigma_sieve(lam, N)
    n = np.arange(d, N + 1, d)
    lhs = complex(np.sum(sig[n] * np.exp(-s * np.log(n))))
    inner = sum(mobius(b) * np.exp((lam - s) * math.log(b)) * divisor_sigma(lam, d // b) for b in divisors(d))
    rhs = complex(zeta(s) * zeta(s - lam) * np.exp(-s * math.log(d)) * inner)
    tail = divisor_tail(N, s.real - max(lam.real, 0.0), 1)
    return IdentityCheck("divisor_function_sum", lhs, rhs, abs(lhs - rhs), tail)


def _periodic_zeta_block(l: int, dd: int, s: complex, lam: complex) -> complex:
    """l^{-2-lam} sum*_h sum_{n = 0 (dd)} e(nh/l) n^{-s}, with the n-sum as Hurwitz values."""
    r = np.arange(1, l + 1)
    hz = hurwitz_zeta(s, r / l)
    h = np.array([x for x in range(1, l + 1) if math.gcd(x, l) == 1])
    # sum over n = dd m, m = r (l): e(dd r h / l) (l m')^{-s}
    ph = np.exp(2j * np.pi * ((np.outer(r, h) * dd) % l) / l).sum(axis=1)
    return complex(np.exp(-(2 + lam) * math.log(l) - s * math.log(dd * l)) * np.dot(ph, hz))


def h_and_l_sum(s: complex, lam: complex, d: int, L0: int = 300, L1: int = 1 << 20) -> IdentityCheck:
    """sum_l l^{-2-lam} sum*_h sum_{d|n} e(nh/l) n^{-s} against its closed form.

    l <= L0 is summed literally over h with Hurwitz zeta for the n-sum;
    L0 < l <= L1 uses the per-l value zeta(s) sum_{e|l} e mu(l/e) lcm(d,e)^{-s};
    beyond L1 a bound |per-l value| <= zeta(Re s) d(l) feeds the tail.
    """
    _check_d(d)
    s, lam = complex(s), complex(lam)
    if s.real <= 1 or lam.real <= -1:
        raise ValueError("need Re s > 1 and Re lambda > -1")
    head = sum(_periodic_zeta_block(l, d, s, lam) for l in range(1, L0 + 1))
    l = np.arange(L1 + 1, dtype=float)
    e = np.arange(1, L1 + 1)
    lcm = e * d // np.gcd(e, d)
    f = np.concatenate([[0], e * np.exp(-s * np.log(lcm.astype(float)))])
    block = dirichlet_convolution(f, mobius_sieve(L1).astype(float))
    lw = np.exp(-(2 + lam) * np.log(l[L0 + 1:]))
    mid = complex(zeta(s) * np.sum(block[L0 + 1:] * lw))
    lhs = head + mid
    rhs = complex(zeta(s) * zeta(1 + lam + s) / (np.exp(s * math.log(d)) * zeta(2 + lam))
                  * (1 + d ** (-1 - lam) - d ** (-1 - lam - s)))
    tail = float(zeta(s.real).real) * divisor_tail(L1, 2 + lam.real, 1)
    return IdentityCheck("h_and_l_sum", lhs, rhs, abs(lhs - rhs), tail)


def ramanujan_divisor(n: int, alpha: complex, L: int = 1 << 22) -> IdentityCheck:
    """sigma_alpha(n) against zeta(1 - alpha) sum_l c_l(n) l^{alpha - 1}, Re alpha < 0."""
    alpha = complex(alpha)
    if alpha.real >= 0:
        raise ValueError("need Re alpha < 0")
    c = ramanujan_row(n, L)[1:]
    l = np.arange(1, L + 1, dtype=float)
    keep = c != 0
    series = np.sum(c[keep] * np.exp((alpha - 1) * np.log(l[keep])))
    z = complex(zeta(1 - alpha))
    lhs = complex(divisor_sigma(alpha, n))
    rhs = z * complex(series)
    # l = e m with e | n: sum_{m > L/e} m^{Re alpha - 1} <= (L/e - 1)^{Re alpha} / |Re alpha|
    a = alpha.real
    tail = abs(z) * sum(e * e ** (a - 1) * max(L / e - 1, 1) ** a / -a for e in divisors(n))
    return IdentityCheck("ramanujan_divisor", lhs, rhs, abs(lhs - rhs), tail)


def ramanujan_identity(v: complex, lam: complex, nu: complex, N: int = 1 << 21) -> IdentityCheck:
    """sum sigma_lam(n) sigma_nu(n) n^{-v} against the four-zeta quotient."""
    v, lam, nu = complex(v), complex(lam), complex(nu)
    sigma_eff = v.real - max(lam.real, 0) - max(nu.real, 0)
    if sigma_eff <= 1:
        raise ValueError("series does not converge absolutely")
    n = np.arange(1, N + 1, dtype=float)
    a = sigma_sieve(lam, N)[1:]
    b = sigma_sieve(nu, N)[1:]
    lhs = complex(np.sum(a * b * np.exp(-v * np.log(n))))
    rhs = complex(zeta(v) * zeta(v - lam) * zeta(v - nu) * zeta(v - lam - nu) / zeta(2 * v - lam - nu))
    # d(n)^2 <= d_4(n)
    tail = divisor_tail(N, sigma_eff, 3)
    return IdentityCheck("ramanujan_identity", lhs, rhs, abs(lhs - rhs), tail)


def dirichlet_identities(s: complex, lam: complex, d: int, trunc: int = 1 << 21) -> list[IdentityCheck]:
    """The four identities at one parameter point (the Ramanujan-sum one uses alpha = -1 - lam)."""
    s, lam = complex(s), complex(lam)
    return [
        divisor_function_sum(s, lam, d, trunc),
        h_and_l_sum(s, lam, d),
        ramanujan_divisor(max(d, 1) * 6, -1 - lam),
        ramanujan_identity(s + 1, lam, lam.conjugate(), trunc),
    ]


__all__ = [
    "F_SPEC", "f_lambda", "f_lambda_direct", "f_envelope", "ramanujan_row", "afe_tail",
    "choose_l_max", "AfeResult", "verify_divisor_afe", "divisor_tail", "IdentityCheck",
    "divisor_function_sum", "h_and_l_sum", "ramanujan_divisor", "ramanujan_identity",
    "dirichlet_identities", "TailWarning", "divisor_count_sieve", "ramanujan_sum",
]
