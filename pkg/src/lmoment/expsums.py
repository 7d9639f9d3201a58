"""Exponential sums mod a prime: the T-sum, smooth Kloosterman scans, divisors in progressions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import divisor_count_sieve, euler_phi, inverse_table, is_prime, kloosterman, ramanujan_sum

BRUTE_T_MAX = 31


def _require_odd_prime(q: int):
    if q < 3 or not is_prime(q):
        raise ValueError(f"{q} is not an odd prime")


def _e(x: np.ndarray, q: int) -> np.ndarray:
    return np.exp(2j * np.pi * (x % q) / q)


def t_sum_brute(x: int, y: int, z: int, q: int) -> complex:
    """sum over units a, b, c of e(c(a^-1 - b^-1)/q) e((ax + by + cz)/q)."""
    _require_odd_prime(q)
    if q > BRUTE_T_MAX:
        raise ValueError(f"brute-force T-sum is capped at q <= {BRUTE_T_MAX}")
    u = np.arange(1, q)
    inv = inverse_table(q)[u]
    # sum over c first: for each (a, b) it is a complete sum over units
    diff = (inv[:, None] - inv[None, :] + z) % q
    c_sum = np.where(diff == 0, q - 1, -1)
    ab = _e(u[:, None] * x + u[None, :] * y, q)
    return complex(np.sum(ab * c_sum))


def t_sum_brute_table(q: int) -> np.ndarray:
    """T(x, y, z; q) for all residues, as a q x q x q array, by direct summation."""
    _require_odd_prime(q)
    if q > BRUTE_T_MAX:
        raise ValueError(f"brute-force T-sum is capped at q <= {BRUTE_T_MAX}")
    u = np.arange(1, q)
    r = np.arange(q)
    inv = inverse_table(q)[u]
    E = _e(np.outer(r, u), q)  # E[x, a] = e(ax/q)
    # P[z, a, b] = sum over units c of e(c(a^-1 - b^-1 + z)/q)
    diff = (inv[None, :, None] - inv[None, None, :] + r[:, None, None]) % q
    P = np.where(diff == 0, q - 1, -1).astype(float)
    return np.einsum("xa,yb,zab->xyz", E, E, P)


def t_sum_closed(x: int, y: int, z: int, q: int) -> complex:
    """Exact Kloosterman / Ramanujan-sum expression of the T-sum."""
    _require_odd_prime(q)
    x, y, z = int(x) % q, int(y) % q, int(z) % q
    cx, cy = ramanujan_sum(q, x), ramanujan_sum(q, y)
    if z == 0:
        return complex(q * ramanujan_sum(q, x + y) - cx * cy)
    zb = pow(z, -1, q)
    phase = np.exp(2j * np.pi * ((-x * zb + y * zb) % q) / q)
    return complex(q * kloosterman(x * zb, -y * zb, q) * phase - q - cx * cy)


def t_sum(x: int, y: int, z: int, q: int, mode: str = "closed") -> complex:
    if mode == "closed":
        return t_sum_closed(x, y, z, q)
    if mode == "brute":
        return t_sum_brute(x, y, z, q)
    raise ValueError(f"unknown mode {mode!r}")


def t_bound(x: int, y: int, z: int, q: int) -> float:
    """Explicit constants for the four cases, read off the closed form with |S| <= 2 sqrt(q)."""
    x, y, z = int(x) % q, int(y) % q, int(z) % q
    if z == 0:
        return float(q * q) if (x + y) % q == 0 else float(q + 1)
    if x * y % q == 0:
        return float(2 * q + 1)
    return 2 * q**1.5 + q + 1


def t_bound_case(x: int, y: int, z: int, q: int) -> str:
    x, y, z = int(x) % q, int(y) % q, int(z) % q
    if z == 0:
        return "z=0;x=-y" if (x + y) % q == 0 else "z=0;x!=-y"
    return "z!=0;xy=0" if x * y % q == 0 else "xyz!=0"


# ---------------------------------------------------------------- smooth scans

@dataclass(frozen=True)
class SmoothBump:
    """W(x) = exp(1 - 1/(1 - t^2)) with t = 2x - 3, supported on (1, 2), peak 1 at 3/2."""

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        t = 2 * x - 3
        inside = np.abs(t) < 1
        out = np.zeros_like(x)
        ti = t[inside]
        out[inside] = np.exp(1 - 1 / (1 - ti * ti))
        return out


@dataclass(frozen=True)
class ScanResult:
    value: float
    trivial: float
    ratio_sqrt: float  # value / (L q^{1/2})
    ratio_mixed: float  # value / (L^{1/2} q^{3/4} + K^{1/2} L)


def s_kl_scan(K: float, L: float, q: int, W: SmoothBump = SmoothBump()) -> ScanResult:
    """S(K, L; q) = sum over units l <= L of |sum over units k of e(l k^-1 / q) W(k/K)|."""
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    if K > q**1.1 or L > q**1.1:
        raise ValueError("K and L must stay below q^1.1")
    k = np.arange(max(1, math.floor(K)), math.ceil(2 * K) + 1)
    k = k[k % q != 0]
    w = W(k / K)
    keep = w > 0
    k, w = k[keep], w[keep]
    l = np.arange(1, math.floor(L) + 1)
    l = l[l % q != 0]
    kinv = inverse_table(q)[k % q]
    inner = _e(np.outer(l, kinv), q) @ w
    value = float(np.sum(np.abs(inner)))
    return ScanResult(value, float(len(l) * w.sum()), value / (L * math.sqrt(q)),
                      value / (math.sqrt(L) * q**0.75 + math.sqrt(K) * L))


def s_kl_partial(K: float, L: float, q: int, W: SmoothBump = SmoothBump()) -> np.ndarray:
    """Running values of S(K, l; q) for l = 1..L (nondecreasing)."""
    k = np.arange(max(1, math.floor(K)), math.ceil(2 * K) + 1)
    k = k[k % q != 0]
    w = W(k / K)
    l = np.arange(1, math.floor(L) + 1)
    kinv = inverse_table(q)[k % q]
    inner = np.abs(_e(np.outer(l, kinv), q) @ w)
    inner[l % q == 0] = 0
    return np.cumsum(inner)


# ---------------------------------------------------------------- divisors in APs

def divisor_ap_residual(x: float, q: int, m: int, exact: bool = False):
    """sum_{n <= x, n = m (q)} d(n) - (1/phi(q)) sum_{n <= x, (n,q)=1} d(n)."""
    if math.gcd(m, q) != 1:
        raise ValueError("m must be a unit mod q")
    N = int(math.floor(x))
    d = divisor_count_sieve(N)
    n = np.arange(N + 1)
    cls = int(d[(n % q == m % q) & (n > 0)].sum())
    units = int(d[(np.gcd(n, q) == 1) & (n > 0)].sum())
    phi = euler_phi(q)
    if exact:
        return Fraction(cls) - Fraction(units, phi)
    return cls - units / phi


def divisor_ap_residuals(x: float, q: int) -> dict[int, Fraction]:
    """Exact residuals for every unit class m mod q."""
    N = int(math.floor(x))
    d = divisor_count_sieve(N)[1:]
    n = np.arange(1, N + 1)
    unit = np.gcd(n, q) == 1
    per_class = np.bincount(n[unit] % q, weights=None, minlength=q)
    sums = np.zeros(q, dtype=np.int64)
    np.add.at(sums, n[unit] % q, d[unit])
    total = int(sums.sum())
    phi = euler_phi(q)
    del per_class
    return {m: Fraction(int(sums[m])) - Fraction(total, phi) for m in range(q) if math.gcd(m, q) == 1}
