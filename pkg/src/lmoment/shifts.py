"""The four complex shifts attached to a shifted fourth moment."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

MAX_SHIFT = 0.2


@dataclass(frozen=True)
class ShiftTuple:
    """Shifts (alpha, beta, gamma, delta).

    alpha, beta ride on chi and gamma, delta on chi-bar.  The holomorphy scale
    ``1/log q`` is kept as metadata only.
    """

    alpha: complex
    beta: complex
    gamma: complex
    delta: complex
    scale: float | None = None

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            v = complex(getattr(self, name))
            if abs(v) > MAX_SHIFT + 1e-12:
                raise ValueError(f"|{name}| = {abs(v):.4g} exceeds {MAX_SHIFT}")
            object.__setattr__(self, name, v)

    @classmethod
    def zero(cls) -> ShiftTuple:
        return cls(0j, 0j, 0j, 0j)

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (self.alpha, self.beta, self.gamma, self.delta)

    def __iter__(self):
        return iter(self.as_tuple())

    def negated(self) -> ShiftTuple:
        return ShiftTuple(-self.alpha, -self.beta, -self.gamma, -self.delta, self.scale)

    def permuted(self, order: tuple[int, int, int, int]) -> ShiftTuple:
        v = self.as_tuple()
        return ShiftTuple(*(v[i] for i in order), scale=self.scale)

    def pair_sums(self) -> tuple[complex, complex, complex, complex]:
        """alpha+gamma, alpha+delta, beta+gamma, beta+delta."""
        a, b, c, d = self.as_tuple()
        return (a + c, a + d, b + c, b + d)

    def min_separation(self) -> float:
        """Smallest |e1 a + e2 b + e3 c + e4 d| over e in {-1,0,1}^4 \\ {0}."""
        v = self.as_tuple()
        best = float("inf")
        for eps in itertools.product((-1, 0, 1), repeat=4):
            if any(eps):
                best = min(best, abs(sum(e * x for e, x in zip(eps, v))))
        return best


def random_admissible(rng, radius: float = 0.1, min_sep: float = 0.01, tries: int = 1000) -> ShiftTuple:
    """Shifts drawn uniformly from the disc of the given radius, rejecting near-coincidences."""
    for _ in range(tries):
        r = radius * rng.random(4) ** 0.5
        th = 2 * math.pi * rng.random(4)
        v = [complex(x * math.cos(t), x * math.sin(t)) for x, t in zip(r, th)]
        sh = ShiftTuple(*v)
        if sh.min_separation() >= min_sep:
            return sh
    raise ValueError(f"no admissible tuple with separation {min_sep} after {tries} draws")


def spread_tuple(rng, radius: float = 0.19) -> ShiftTuple:
    """Four shifts on a circle at fixed, unequal angular offsets under a random rotation.

    Keeps every pair sum and difference well away from zero, which the
    quadrature of the main-term assembly needs.
    """
    th = rng.uniform(0, 2 * math.pi)
    return ShiftTuple(*(radius * complex(math.cos(a), math.sin(a))
                        for a in (th + k * math.pi / 2 + 0.3 * k * k for k in range(4))))
