"""Integer kernel: factorization, multiplicative functions, exponential sums."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError("factors must have increasing primes and positive exponents")
            prod *= p**e
            last = p
        if prod != self.n:
            raise ValueError("factors do not multiply to n")

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def euler_phi(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= (p - 1) * p ** (e - 1)
        return out

    def mobius(self) -> int:
        if any(e > 1 for _, e in self.factors):
            return 0
        return -1 if len(self.factors) % 2 else 1

    def num_divisors(self) -> int:
        return math.prod(e + 1 for _, e in self.factors)

    def divisors(self) -> list[int]:
        divs = [1]
        for p, e in self.factors:
            divs = [d * p**k for d in divs for k in range(e + 1)]
        return sorted(divs)


@lru_cache(maxsize=4096)
def factorize(n: int) -> Factorization:
    """Trial division; fine up to about 1e9."""
    n = int(n)
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        out.append((m, 1))
    return Factorization(n, tuple(out))


def euler_phi(n: int) -> int:
    return factorize(n).euler_phi()


def mobius(n: int) -> int:
    return factorize(n).mobius()


def num_divisors(n: int) -> int:
    return factorize(n).num_divisors()


def divisors(n: int) -> list[int]:
    return factorize(n).divisors()


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n).factors == ((n, 1),)


def primes_between(lo: int, hi: int) -> list[int]:
    return [p for p in range(max(lo, 2), hi + 1) if is_prime(p)]


def divisor_sigma(lam: complex, n: int) -> complex:
    """sigma_lambda(n) = sum over d | n of d^lambda."""
    return complex(sum(cmath.exp(lam * math.log(d)) for d in divisors(n)))


def ramanujan_sum(l: int, n: int) -> int:
    """c_l(n) = sum over d | (l, n) of d mu(l/d)."""
    if l < 1:
        raise ValueError("l must be positive")
    g = math.gcd(l, n)
    return sum(d * mobius(l // d) for d in divisors(g))


def ramanujan_sum_direct(l: int, n: int) -> complex:
    h = np.array([k for k in range(1, l + 1) if math.gcd(k, l) == 1])
    return complex(np.exp(2j * np.pi * ((n * h) % l) / l).sum())


@lru_cache(maxsize=256)
def inverse_table(c: int) -> np.ndarray:
    """inv[x] = x^{-1} mod c for units x, and -1 elsewhere."""
    inv = np.full(c, -1, dtype=np.int64)
    for x in range(c):
        if math.gcd(x, c) == 1:
            inv[x] = pow(x, -1, c) if c > 1 else 0
    inv.setflags(write=False)
    return inv


def kloosterman(m: int, n: int, c: int) -> float:
    """S(m, n; c) by direct summation over units mod c."""
    if c < 1:
        raise ValueError("c must be positive")
    if c == 1:
        return 1.0
    inv = inverse_table(c)
    x = np.nonzero(inv >= 0)[0]
    phase = (m * x + n * inv[x]) % c
    return float(np.cos(2 * np.pi * phase / c).sum())


def primitive_root(q: int) -> int:
    """Smallest generator of (Z/qZ)^* for an odd prime q."""
    if q < 3 or not is_prime(q):
        raise ValueError(f"{q} is not an odd prime")
    ps = factorize(q - 1).primes
    for g in range(2, q):
        if all(pow(g, (q - 1) // p, q) != 1 for p in ps):
            return g
    raise AssertionError("no primitive root found")


def mobius_sieve(N: int) -> np.ndarray:
    """mu(n) for 0 <= n <= N (mu(0) set to 0)."""
    mu = np.ones(N + 1, dtype=np.int64)
    mu[0] = 0
    rem = np.arange(N + 1)
    r = math.isqrt(N)
    small = np.ones(r + 1, dtype=bool)
    small[:2] = False
    for p in range(2, r + 1):
        if not small[p]:
            continue
        small[p * p::p] = False
        mu[p::p] *= -1
        mu[p * p::p * p] = 0
        rem[p::p] //= p
    # a squarefree n has at most one prime factor above sqrt(N), and rem holds it
    mu[rem > 1] *= -1
    return mu


def divisor_count_sieve(N: int) -> np.ndarray:
    """d(n) for 0 <= n <= N."""
    d = np.zeros(N + 1, dtype=np.int64)
    # pair each divisor k <= sqrt(n) with n/k >= k
    for k in range(1, math.isqrt(N) + 1):
        d[k * k::k] += 2
        d[k * k] -= 1
    return d


def sigma_sieve(lam: complex, N: int) -> np.ndarray:
    """sigma_lambda(n) for 0 <= n <= N (entry 0 is 0)."""
    out = np.zeros(N + 1, dtype=complex)
    pw = np.exp(lam * np.log(np.arange(1, N + 1, dtype=float)))
    pw = np.concatenate([[0], pw])
    for k in range(1, math.isqrt(N) + 1):
        m = np.arange(k, N // k + 1)
        out[k * k::k] += pw[k] + pw[m]
        out[k * k] -= pw[k]
    return out


def dirichlet_convolution(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(a * b)(n) = sum_{km = n} a(k) b(m) for 0 <= n <= N; index 0 is ignored.

    Every factorization n = km has min(k, m) <= sqrt(N), so looping over the
    smaller factor costs O(sqrt N) vector operations.
    """
    N = len(a) - 1
    if len(b) != N + 1:
        raise ValueError("arrays must have equal length")
    dtype = np.result_type(a, b)
    c = np.zeros(N + 1, dtype=dtype)
    for k in range(1, math.isqrt(N) + 1):
        m = np.arange(k, N // k + 1)
        c[k * k::k] += a[k] * b[m] + b[k] * a[m]
        c[k * k] -= a[k] * b[k]
    return c
