"""Additive characters, Gauss sums and (twisted) Kloosterman sums.

All sums are evaluated in double precision.  The tolerance used for the
realness and Weil-bound assertions scales with the number of summands::

    tol_sum(q) = 1e-9 * (q - 1)
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass

import numpy as np

from .gf import FieldElement, FieldSpec, epsilon, legendre, tables, trace

# rows per chunk in the vectorised sums; bounds peak memory at ~ CHUNK * q
CHUNK_ELEMENTS = 1 << 22


def tol_sum(q: int) -> float:
    return 1e-9 * (q - 1)


class WeilBoundViolation(ArithmeticError):
    """A Kloosterman sum exceeded 2*sqrt(q); this means an arithmetic bug."""


def _enc(x) -> int:
    return x.enc if isinstance(x, FieldElement) else int(x)


@dataclass(frozen=True)
class KloostermanValue:
    value: complex
    d_parity: str
    q_mod_4: int

    @property
    def realness(self) -> str:
        if self.d_parity == "odd" and self.q_mod_4 == 3:
            return "imaginary"
        return "real"

    def check(self, q: int) -> None:
        tol = tol_sum(q)
        if self.realness == "real" and abs(self.value.imag) > tol:
            raise ArithmeticError(f"expected a real sum, got {self.value}")
        if self.realness == "imaginary" and abs(self.value.real) > tol:
            raise ArithmeticError(f"expected a purely imaginary sum, got {self.value}")

    @property
    def real(self) -> float:
        return self.value.real

    def __complex__(self):
        return complex(self.value)


def chi(x: FieldElement) -> complex:
    """Canonical additive character exp(2 pi i Tr(x) / p)."""
    return cmath.exp(2j * math.pi * trace(x) / x.field.p)


def gauss_sum(s: FieldElement) -> complex:
    """sum over y of chi(s y^2), by direct summation."""
    if s.enc == 0:
        raise ValueError("gauss_sum needs s != 0")
    t = tables(s.field)
    idx = t.trace[t.mul(s.enc, t.sq)]
    return complex(t.chi_table[idx].sum())


def gauss_sum_closed(s: FieldElement) -> complex:
    q = s.field.q
    return legendre(s) * epsilon(q) * math.sqrt(q)


def _twisted_many(f: FieldSpec, d: int, a: int, b: np.ndarray, character_scale: int = 1) -> np.ndarray:
    """sum_{x != 0} leg(x)^d chi_c(a x + b / x) for one a and an array of b.

    ``character_scale`` = c replaces chi by x -> exp(2 pi i c Tr(x) / p).
    """
    t = tables(f)
    q, p = t.q, t.p
    xs = np.arange(1, q, dtype=np.int64)
    tr_ax = t.trace[t.mul(a, xs)]
    log_xinv = (-t.log[xs]) % (q - 1)
    weights = t.leg[xs] ** (d % 2)
    b = np.asarray(b, dtype=np.int64).ravel()
    out = np.empty(len(b), dtype=np.complex128)
    rows = max(1, CHUNK_ELEMENTS // (q - 1))
    for start in range(0, len(b), rows):
        bb = b[start : start + rows]
        lb = t.log[bb]
        prod = t.exp[(lb[:, None] + log_xinv[None, :]) % (q - 1)]
        tr_b = np.where(lb[:, None] < 0, 0, t.trace[prod])
        phase = (character_scale * (tr_ax[None, :] + tr_b)) % p
        out[start : start + rows] = (t.chi_table[phase] * weights[None, :]).sum(axis=1)
    return out


def kloosterman(a, b, f: FieldSpec) -> KloostermanValue:
    """K(a, b) = sum_{x != 0} chi(a x + b / x)."""
    return twisted_kloosterman(2, a, b, f)


def twisted_kloosterman(d: int, a, b, f: FieldSpec) -> KloostermanValue:
    """Legendre-twisted sum; depends on d only through its parity."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    val = complex(_twisted_many(f, d, _enc(a), np.array([_enc(b)]))[0])
    kv = KloostermanValue(val, "even" if d % 2 == 0 else "odd", f.q % 4)
    kv.check(f.q)
    return kv


def twisted_kloosterman_many(d: int, a, b_values, f: FieldSpec) -> np.ndarray:
    """Vector of K~_d(a, b) over an array of b encodings (complex)."""
    return _twisted_many(f, d, _enc(a), np.asarray(b_values))


@functools.lru_cache(maxsize=32)
def _kloosterman_vector(f: FieldSpec) -> np.ndarray:
    t = tables(f)
    q, p = t.q, t.p
    xs = np.arange(1, q, dtype=np.int64)
    tr_x = t.trace[xs]
    log_xinv = (-t.log[xs]) % (q - 1)
    out = np.empty(q, dtype=np.float64)
    out[0] = -1.0
    rows = max(1, CHUNK_ELEMENTS // (q - 1))
    for start in range(1, q, rows):
        a = np.arange(start, min(start + rows, q), dtype=np.int64)
        prod = t.exp[(t.log[a][:, None] + log_xinv[None, :]) % (q - 1)]
        phase = (tr_x[None, :] + t.trace[prod]) % p
        # imaginary parts cancel in pairs (x, a/x); only the cosine survives
        out[start : start + len(a)] = t.cos_table[phase].sum(axis=1)
    bound = 2 * math.sqrt(q) + tol_sum(q)
    worst = np.abs(out[1:]).max()
    if worst > bound:
        raise WeilBoundViolation(f"max |K(1,a)| = {worst} > 2 sqrt({q})")
    out.setflags(write=False)
    return out


def kloosterman_vector(f: FieldSpec) -> np.ndarray:
    """K(1, a) for every encoding a in [0, q); entry 0 holds K(1, 0) = -1.

    Memoised per field and read-only.
    """
    return _kloosterman_vector(f)


@dataclass(frozen=True)
class KloostermanAngle:
    a: int
    theta: float


def angle_from_value(k: float, q: int) -> float:
    ratio = k / (2 * math.sqrt(q))
    if abs(ratio) > 1 + tol_sum(q):
        raise WeilBoundViolation(f"|K|/(2 sqrt q) = {abs(ratio)} > 1 for q={q}")
    return math.acos(min(1.0, max(-1.0, ratio)))


def kloosterman_angle(a, f: FieldSpec) -> KloostermanAngle:
    a = _enc(a)
    if a == 0:
        raise ValueError("Kloosterman angle needs a != 0")
    return KloostermanAngle(a, angle_from_value(float(kloosterman_vector(f)[a]), f.q))


def kloosterman_angles(f: FieldSpec) -> np.ndarray:
    """Angles theta_{q,a} for a = 1 .. q-1 in encoding order."""
    q = f.q
    ratio = kloosterman_vector(f)[1:] / (2 * math.sqrt(q))
    if np.abs(ratio).max() > 1 + tol_sum(q):
        raise WeilBoundViolation(f"Weil bound fails for q={q}")
    return np.arccos(np.clip(ratio, -1.0, 1.0))


@dataclass(frozen=True)
class MomentEntry:
    ell: int
    value: int
    raw: float
    residual: float

    @property
    def exact(self) -> bool:
        """True when the float is an unambiguous integer (well inside 2**53)."""
        return self.residual < 0.05 and abs(self.raw) < 2.0**50


@dataclass(frozen=True)
class MomentTable:
    q: int
    max_ell: int
    entries: tuple[MomentEntry, ...]

    def __getitem__(self, ell: int) -> int:
        return self.entries[ell - 1].value

    def entry(self, ell: int) -> MomentEntry:
        return self.entries[ell - 1]

    def threshold(self, ell: int) -> float:
        return 1e-3 * self.q ** (ell / 2)


@functools.lru_cache(maxsize=256)
def moments(f: FieldSpec, max_ell: int) -> MomentTable:
    """M_{q,l} = sum_{a != 0} K(1, a)^l for l = 1 .. max_ell."""
    if max_ell < 1:
        raise ValueError("max_ell must be >= 1")
    k = kloosterman_vector(f)[1:]
    entries = []
    power = np.ones_like(k)
    for ell in range(1, max_ell + 1):
        power = power * k
        raw = math.fsum(power)
        value = round(raw)
        entries.append(MomentEntry(ell, int(value), raw, abs(raw - value)))
    table = MomentTable(f.q, max_ell, tuple(entries))
    for e in entries:
        if e.residual >= table.threshold(e.ell):
            raise ArithmeticError(f"moment M_{{{f.q},{e.ell}}} = {e.raw} is not near an integer")
    return table


def galois_action_check(c: int, d: int, a, b, f: FieldSpec) -> bool:
    """Compare the sum under chi -> chi^c with K~_d(c a, c b)."""
    c = int(c) % f.p
    if c == 0:
        raise ValueError("c must be a unit of Z_p")
    t = tables(f)
    a, b = _enc(a), _enc(b)
    conj = complex(_twisted_many(f, d, a, np.array([b]), character_scale=c)[0])
    target = twisted_kloosterman(d, int(t.mul(c, a)), int(t.mul(c, b)), f).value
    return abs(conj - target) <= tol_sum(f.q)
