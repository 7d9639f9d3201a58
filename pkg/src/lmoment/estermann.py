"""The Estermann function D(s, lambda, h/l) and its functional equation."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .arith import sigma_sieve
from .special import PoleError, hurwitz_zeta, log_gamma, zeta


@dataclass(frozen=True)
class EstermannPoint:
    s: complex
    lam: complex
    h: int
    l: int

    def __post_init__(self):
        if self.l < 1:
            raise ValueError("l must be positive")
        if math.gcd(self.h, self.l) != 1:
            raise ValueError(f"gcd({self.h}, {self.l}) != 1")
        object.__setattr__(self, "h", self.h % self.l)
        object.__setattr__(self, "s", complex(self.s))
        object.__setattr__(self, "lam", complex(self.lam))

    def h_bar(self) -> int:
        return pow(self.h, -1, self.l) if self.l > 1 else 0


def estermann_D(p: EstermannPoint, pole_gap: float = 1e-6) -> complex:
    """D(s, lambda, h/l) = l^{lambda-2s} sum_{j,r} e(jrh/l) zeta(s-lambda, j/l) zeta(s, r/l)."""
    s, lam, h, l = p.s, p.lam, p.h, p.l
    for where, v in (("s=1", s - 1), ("s=1+lambda", s - 1 - lam)):
        if abs(v) < pole_gap:
            raise PoleError(f"D evaluated within {pole_gap} of the pole {where}")
    idx = np.arange(1, l + 1)
    z1 = hurwitz_zeta(s - lam, idx / l)
    z2 = hurwitz_zeta(s, idx / l)
    phase = np.exp(2j * np.pi * ((np.outer(idx, idx) * h) % l) / l)
    return complex(cmath.exp((lam - 2 * s) * math.log(l)) * (z1 @ phase @ z2))


def estermann_series(p: EstermannPoint, N: int) -> complex:
    """Truncated Dirichlet series sum_{n <= N} sigma_lambda(n) e(nh/l) n^{-s}."""
    n = np.arange(1, N + 1)
    sig = sigma_sieve(p.lam, N)[1:]
    return complex(np.sum(sig * np.exp(2j * np.pi * ((n * p.h) % p.l) / p.l - p.s * np.log(n))))


def estermann_fe_sides(p: EstermannPoint) -> tuple[complex, complex]:
    """LHS D(1/2+s', ...) and the right-hand side of the functional equation at s' = p.s."""
    s, lam, l = p.s, p.lam, p.l
    hb = p.h_bar()
    lhs = estermann_D(EstermannPoint(0.5 + s, lam, p.h, l))
    d_plus = estermann_D(EstermannPoint(0.5 - s, -lam, hb, l))
    d_minus = estermann_D(EstermannPoint(0.5 - s, -lam, -hb, l))
    pref = 2 * cmath.exp((-1 - lam + 2 * s) * math.log(2 * math.pi)
                         + log_gamma(0.5 - s) + log_gamma(0.5 + lam - s)
                         + (lam - 2 * s) * math.log(l))
    rhs = pref * (d_plus * cmath.cos(math.pi * lam / 2) + d_minus * cmath.sin(math.pi * (s - lam / 2)))
    return lhs, complex(rhs)


def verify_estermann_fe(p: EstermannPoint) -> float:
    """Relative residual |LHS - RHS| / |LHS| of the functional equation."""
    lhs, rhs = estermann_fe_sides(p)
    return abs(lhs - rhs) / abs(lhs)


def residue_by_circle(lam: complex, h: int, l: int, centre: complex,
                      radius: float = 1e-2, nodes: int = 64) -> complex:
    """(1/2 pi i) times the integral of D around a small circle about ``centre``."""
    th = 2 * np.pi * np.arange(nodes) / nodes
    pts = centre + radius * np.exp(1j * th)
    vals = np.array([estermann_D(EstermannPoint(z, lam, h, l)) for z in pts])
    # dz = i r e^{i th} d th, so (1/2 pi i) int f dz = mean of f * r e^{i th}
    return complex(np.mean(vals * radius * np.exp(1j * th)))


def expected_residues(lam: complex, l: int) -> tuple[complex, complex]:
    """Residues at s = 1 and s = 1 + lambda."""
    return (complex(l ** (-1 + lam) * zeta(1 - lam)), complex(l ** (-1 - lam) * zeta(1 + lam)))
