"""Sato-Tate statistics for Kloosterman angles.

Closed forms are used for cosine powers, cosine multiples and interval
indicators; anything else is integrated numerically against the density
(2/pi) sin^2.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from math import comb
from typing import Callable

import numpy as np
from scipy import integrate, stats

from .charsums import kloosterman_angles, moments
from .gf import field_for_q
from .walks import catalan

QUAD_TOL = 1e-10


@dataclass(frozen=True)
class CosPower:
    n: int

    def __call__(self, theta):
        return np.cos(theta) ** self.n


@dataclass(frozen=True)
class CosMultiple:
    n: int

    def __call__(self, theta):
        return np.cos(self.n * np.asarray(theta))


@dataclass(frozen=True)
class Indicator:
    a: float
    b: float

    def __call__(self, theta):
        theta = np.asarray(theta)
        return ((theta >= self.a) & (theta <= self.b)).astype(float)


@dataclass(frozen=True)
class Tabulated:
    func: Callable
    name: str = "custom"

    def __call__(self, theta):
        return self.func(theta)


FunctionSpec = CosPower | CosMultiple | Indicator | Tabulated


def sato_tate_density(theta):
    return 2 / np.pi * np.sin(theta) ** 2


def sato_tate_cdf(theta):
    theta = np.asarray(theta, dtype=float)
    return theta / np.pi - np.sin(2 * theta) / (2 * np.pi)


def _quad(func) -> float:
    val, _ = integrate.quad(lambda th: float(func(th)) * 2 / math.pi * math.sin(th) ** 2, 0, math.pi, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
    return val


def sato_tate_expectation(f: FunctionSpec) -> float:
    if isinstance(f, CosPower):
        if f.n < 0:
            raise ValueError("negative powers are not supported")
        if f.n % 2:
            return 0.0
        m = f.n // 2
        return comb(2 * m, m) / (2 ** (2 * m) * (m + 1))
    if isinstance(f, CosMultiple):
        n = abs(f.n)
        return {0: 1.0, 2: -0.5}.get(n, 0.0)
    if isinstance(f, Indicator):
        a, b = max(0.0, f.a), min(math.pi, f.b)
        return float(sato_tate_cdf(b) - sato_tate_cdf(a)) if b > a else 0.0
    if isinstance(f, Tabulated):
        return _quad(f)
    raise TypeError(f"unsupported function spec {f!r}")


@dataclass(frozen=True)
class AngleSample:
    q: int
    angles: np.ndarray  # sorted, length q - 1

    def fraction_in(self, a: float, b: float) -> float:
        lo = np.searchsorted(self.angles, a, side="left")
        hi = np.searchsorted(self.angles, b, side="right")
        return (hi - lo) / len(self.angles)


@functools.lru_cache(maxsize=32)
def angle_sample(q: int) -> AngleSample:
    angles = np.sort(kloosterman_angles(field_for_q(q)))
    angles.setflags(write=False)
    return AngleSample(q, angles)


def empirical_expectation(q: int, f: FunctionSpec) -> float:
    sample = angle_sample(q)
    if isinstance(f, Indicator):
        return sample.fraction_in(f.a, f.b)
    return float(np.mean(f(sample.angles)))


def ks_distance(q: int) -> float:
    """Kolmogorov-Smirnov distance between the angle sample and the Sato-Tate CDF."""
    return float(stats.kstest(angle_sample(q).angles, sato_tate_cdf).statistic)


@dataclass(frozen=True)
class MomentRatioRow:
    m: int
    catalan: int
    even_moment: int
    even_ratio: float  # M_{q,2m} / (q^(m+1) C_m)
    odd_moment: int
    odd_normalized: float  # M_{q,2m+1} / q^(m+1.5)


def moment_asymptotics_report(q: int, max_m: int) -> list[MomentRatioRow]:
    table = moments(field_for_q(q), 2 * max_m + 1)
    rows = []
    for m in range(1, max_m + 1):
        c = catalan(m)
        even = table.entry(2 * m)
        odd = table.entry(2 * m + 1)
        rows.append(
            MomentRatioRow(
                m=m,
                catalan=c,
                even_moment=even.value,
                even_ratio=even.raw / (q ** (m + 1) * c),
                odd_moment=odd.value,
                odd_normalized=odd.raw / q ** (m + 1.5),
            )
        )
    return rows


def trig_identity_check(ell: int, theta_grid=None) -> float:
    """Max residual of the cosine power-reduction and orthogonality identities."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    theta = np.linspace(0, np.pi, 1001) if theta_grid is None else np.asarray(theta_grid, dtype=float)
    c = np.cos(theta)
    worst = 0.0
    # even power
    rhs = sum(comb(2 * ell, k) * np.cos((2 * ell - 2 * k) * theta) for k in range(ell)) + comb(2 * ell, ell) / 2
    worst = max(worst, float(np.abs(2 ** (2 * ell - 1) * c ** (2 * ell) - rhs).max()))
    # odd power
    rhs = sum(comb(2 * ell + 1, k) * np.cos((2 * ell + 1 - 2 * k) * theta) for k in range(ell + 1))
    worst = max(worst, float(np.abs(2 ** (2 * ell) * c ** (2 * ell + 1) - rhs).max()))
    # orthogonality and the Sato-Tate expectations of cos(n theta), by quadrature
    top = 2 * ell + 1
    for m in range(top + 1):
        for n in range(m, top + 1):
            val, _ = integrate.quad(lambda th: math.cos(m * th) * math.cos(n * th), 0, math.pi, epsabs=QUAD_TOL, limit=200)
            expected = (m == n) + (m == n == 0)
            worst = max(worst, abs(2 / math.pi * val - expected))
    for n in range(top + 1):
        worst = max(worst, abs(_quad(CosMultiple(n)) - sato_tate_expectation(CosMultiple(n))))
    return worst
