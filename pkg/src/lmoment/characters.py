"""Dirichlet characters mod a prime and L-values for all of them at once.

chi_j(n) = e(j ind(n) / (q-1)) against a fixed primitive root g, so the
character group is cyclic in j and every L-value grid is one DFT.
"""

from __future__ import annotations

import cmath
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arith import euler_phi, is_prime, mobius, divisors, primitive_root
from .special import hurwitz_zeta, log_gamma, zeta_q
from .store import get_store

NAIVE_DFT_MAX = 512


def _powers(g: int, q: int) -> np.ndarray:
    powers = np.empty(q - 1, dtype=np.int64)
    x = 1
    for k in range(q - 1):
        powers[k] = x
        x = x * g % q
    return powers


@dataclass(frozen=True)
class CharacterTable:
    q: int
    g: int = field(init=False)
    powers: np.ndarray = field(init=False, repr=False)  # g^k mod q, k = 0..q-2
    ind: np.ndarray = field(init=False, repr=False)  # ind[g^k] = k, ind[0] = -1

    def __post_init__(self):
        q = self.q
        if q <= 3 or not is_prime(q):
            raise ValueError(f"modulus must be a prime > 3, got {q}")
        g = primitive_root(q)
        store = get_store()
        if store is None:
            powers = _powers(g, q)
        else:
            powers = store.get_or_compute(("powers", q, g), lambda: _powers(g, q))
        ind = np.full(q, -1, dtype=np.int64)
        ind[powers] = np.arange(q - 1)
        powers.setflags(write=False)
        ind.setflags(write=False)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "ind", ind)

    @property
    def order(self) -> int:
        return self.q - 1

    def parity(self, j: int) -> int:
        """0 if chi_j(-1) = 1, else 1."""
        return j % 2

    def conj_index(self, j: int) -> int:
        return (-j) % (self.q - 1)

    def indices(self, parity: int | None = None) -> np.ndarray:
        """Non-principal character indices, optionally of one parity."""
        j = np.arange(1, self.q - 1)
        return j if parity is None else j[j % 2 == parity]

    def chi(self, j, n) -> np.ndarray:
        """chi_j(n), zero when q | n; broadcasts over j and n."""
        n = np.asarray(n) % self.q
        j = np.asarray(j)
        k = self.ind[n]
        val = np.exp(2j * np.pi * ((j * k) % (self.q - 1)) / (self.q - 1))
        return np.where(k >= 0, val, 0)


@lru_cache(maxsize=64)
def character_table(q: int) -> CharacterTable:
    return CharacterTable(q)


def count_primitive(q: int) -> tuple[int, int]:
    """(number of primitive characters, number of even ones) mod a prime."""
    if q <= 3 or not is_prime(q):
        raise ValueError(f"modulus must be a prime > 3, got {q}")
    return q - 2, (q - 3) // 2


# ---------------------------------------------------------------- DFTs

def dft_naive(x: np.ndarray) -> np.ndarray:
    """X_j = sum_k x_k e(jk/n) by a dense phase matrix."""
    n = len(x)
    jk = np.outer(np.arange(n), np.arange(n)) % n
    return np.exp(2j * np.pi * jk / n) @ x


def dft_bluestein(x: np.ndarray) -> np.ndarray:
    """Same transform for any n via a chirp convolution on a power-of-2 grid."""
    n = len(x)
    k = np.arange(n)
    chirp = np.exp(1j * np.pi * ((k * k) % (2 * n)) / n)  # w^{k^2/2}
    m = 1 << (2 * n - 1).bit_length()
    a = np.zeros(m, dtype=complex)
    a[:n] = x * chirp
    b = np.zeros(m, dtype=complex)
    b[:n] = np.conj(chirp)
    b[m - n + 1:] = np.conj(chirp[1:])[::-1]
    conv = np.fft.ifft(np.fft.fft(a) * np.fft.fft(b))[:n]
    return chirp * conv


def character_dft(x: np.ndarray) -> np.ndarray:
    return dft_naive(x) if len(x) < NAIVE_DFT_MAX else dft_bluestein(x)


# ---------------------------------------------------------------- Gauss sums, X

def gauss_sums(table: CharacterTable) -> np.ndarray:
    """tau(chi_j) for every j (entry 0 is the principal sum, -1)."""
    return character_dft(np.exp(2j * np.pi * table.powers / table.q))


def gauss_sum(table: CharacterTable, j: int) -> complex:
    if j % (table.q - 1) == 0:
        raise ValueError("Gauss sum of the principal character is not used")
    x = np.arange(1, table.q)
    return complex(np.sum(table.chi(j, x) * np.exp(2j * np.pi * x / table.q)))


def root_number(table: CharacterTable, j: int, tau: complex | None = None) -> complex:
    """epsilon(chi) = i^{-a} q^{-1/2} tau(chi)."""
    tau = gauss_sum(table, j) if tau is None else tau
    return (1j) ** (-table.parity(j)) * tau / math.sqrt(table.q)


def x_factor(s, parity: int, q: int):
    """X(s) with X(1/2 + u) = (q/pi)^{-u} Gamma((1/2-u+a)/2) / Gamma((1/2+u+a)/2)."""
    u = np.asarray(s, dtype=complex) - 0.5
    return np.exp(-u * math.log(q / math.pi)
                  + log_gamma((0.5 - u + parity) / 2) - log_gamma((0.5 + u + parity) / 2))


# ---------------------------------------------------------------- L-values

class _HurwitzCache:
    """Small LRU of zeta(s, g^k/q) arrays keyed by q and the exact bits of s."""

    def __init__(self, size: int = 32):
        self.size = size
        self.data: OrderedDict = OrderedDict()
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()

    def get(self, table: CharacterTable, s: complex) -> np.ndarray:
        key = (table.q, s.real.hex(), s.imag.hex())
        with self._lock:
            if key in self.data:
                self.hits += 1
                self.data.move_to_end(key)
                return self.data[key]
            self.misses += 1
        store = get_store()
        if store is None:
            val = hurwitz_zeta(s, table.powers / table.q)
        else:
            val = store.get_or_compute(("hurwitz",) + key, lambda: hurwitz_zeta(s, table.powers / table.q))
        val.setflags(write=False)
        with self._lock:
            self.data[key] = val
            if len(self.data) > self.size:
                self.data.popitem(last=False)
        return val


HURWITZ_CACHE = _HurwitzCache()


def l_value_grid(table: CharacterTable, s: complex) -> np.ndarray:
    """L(s, chi_j) for j = 0..q-2.

    L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q); with a = g^k the sum over a
    is a DFT in k.
    """
    s = complex(s)
    if s == 1:
        raise ValueError("L-value grid requested at s = 1")
    if table.q > 10_000:
        raise ValueError("moduli above 1e4 are out of range")
    b = HURWITZ_CACHE.get(table, s)
    return cmath.exp(-s * math.log(table.q)) * character_dft(b)


def l_value_naive(table: CharacterTable, j: int, s: complex) -> complex:
    a = np.arange(1, table.q)
    return complex(table.q ** (-s) * np.sum(table.chi(j, a) * hurwitz_zeta(s, a / table.q)))


def completed_l(table: CharacterTable, s: complex, L: np.ndarray | None = None) -> np.ndarray:
    """Lambda(s, chi_j) = (q/pi)^{s/2} Gamma((s+a)/2) L(s, chi_j) for every j."""
    L = l_value_grid(table, s) if L is None else L
    par = np.arange(table.q - 1) % 2
    return np.exp(s / 2 * math.log(table.q / math.pi) + log_gamma((s + par) / 2)) * L


def functional_equation_residuals(table: CharacterTable, s: complex) -> np.ndarray:
    """|Lambda(s, chi) - eps(chi) Lambda(1-s, chi-bar)| over primitive chi."""
    lam_s = completed_l(table, s)
    lam_1s = completed_l(table, 1 - s)
    taus = gauss_sums(table)
    j = table.indices()
    eps = (1j) ** (-(j % 2)) * taus[j] / math.sqrt(table.q)
    jbar = (-j) % (table.q - 1)
    return np.abs(lam_s[j] - eps * lam_1s[jbar])


# ---------------------------------------------------------------- orthogonality

def even_orthogonality_matrix(table: CharacterTable) -> np.ndarray:
    """O[a, b] = sum over even primitive chi of chi(a) chi-bar(b), a, b mod q."""
    j = table.indices(parity=0)
    C = table.chi(j[:, None], np.arange(table.q)[None, :])
    return C.T @ np.conj(C)


def orthogonality_closed(q: int, a: int, b: int) -> float:
    """1/2 sum over d | (q, a -+ b) of phi(d) mu(q/d), both signs counted."""
    if math.gcd(a * b, q) != 1:
        return 0.0
    total = 0
    for c in (a - b, a + b):
        for d in divisors(q):
            if c % d == 0:
                total += euler_phi(d) * mobius(q // d)
    return total / 2


def orthogonality_even(table: CharacterTable, a: int, b: int) -> tuple[complex, float]:
    j = table.indices(parity=0)
    brute = complex(np.sum(table.chi(j, a) * np.conj(table.chi(j, b))))
    return brute, orthogonality_closed(table.q, a, b)


def principal_check(table: CharacterTable, s: complex) -> complex:
    """Principal entry of the grid minus zeta_q(s)."""
    return complex(l_value_grid(table, s)[0] - zeta_q(s, table.q))
