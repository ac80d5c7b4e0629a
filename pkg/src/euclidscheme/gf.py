"""Arithmetic in odd-characteristic finite fields F_q, q = p**ell.

Elements are encoded as integers ``enc = sum(c_i * p**i)`` where ``c_i`` are the
coefficients of the polynomial representative (constant term first).  For
``ell == 1`` this is plain arithmetic mod p.

Two layers live here:

* :class:`FieldSpec` / :class:`FieldElement` -- exact scalar arithmetic done
  with polynomial operations over Z_p.  Slow, but straightforward.
* :class:`FieldTables` -- log/antilog, trace and Legendre tables built once per
  field, used by the vectorised sums elsewhere in the package.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field as dc_field
from typing import Iterator, Sequence

import numpy as np
import sympy

Q_MAX = 1 << 20


class FieldError(ValueError):
    """Invalid field parameters or an element from the wrong field."""


# ---------------------------------------------------------------------------
# polynomials over Z_p, coefficient lists with constant term first
# ---------------------------------------------------------------------------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], m: Sequence[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    while len(a) - 1 >= dm:
        coef = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * mc) % p
        _trim(a)
    return a


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _poly_sub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _poly_divmod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [0] * max(len(a) - len(b) + 1, 0)
    inv_lead = pow(b[-1], -1, p)
    while len(a) >= len(b):
        coef = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        quot[shift] = coef
        for i, bc in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * bc) % p
        _trim(a)
    return _trim(quot), a


def _poly_gcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def _poly_powmod(a: Sequence[int], e: int, m: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(list(a), m, p)
    while e:
        if e & 1:
            result = _poly_mod(_poly_mul(result, base, p), m, p)
        base = _poly_mod(_poly_mul(base, base, p), m, p)
        e >>= 1
    return result


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Ben-Or test: f of degree n is irreducible iff gcd(f, x^(p^k) - x) = 1 for k <= n/2."""
    f = _trim([c % p for c in modulus])
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    power = x
    for _ in range(1, n // 2 + 1):
        power = _poly_powmod(power, p, f, p)
        if len(_poly_gcd(f, _poly_sub(power, x, p), p)) > 1:
            return False
    return True


def _digits(enc: int, p: int, ell: int) -> list[int]:
    out = []
    for _ in range(ell):
        enc, r = divmod(enc, p)
        out.append(r)
    return out


def _undigits(coeffs: Sequence[int], p: int) -> int:
    enc = 0
    for c in reversed(coeffs):
        enc = enc * p + c
    return enc


# ---------------------------------------------------------------------------
# field specification and scalar elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    p: int
    ext_degree: int
    modulus: tuple[int, ...]
    q: int = dc_field(init=False, compare=False)

    def __post_init__(self):
        if self.p % 2 == 0 or not sympy.isprime(self.p):
            raise FieldError(f"p={self.p} is not an odd prime")
        if self.ext_degree < 1:
            raise FieldError(f"extension degree must be >= 1, got {self.ext_degree}")
        if len(self.modulus) != self.ext_degree + 1 or self.modulus[-1] != 1:
            raise FieldError("modulus must be monic of degree ext_degree")
        if not is_irreducible(self.modulus, self.p):
            raise FieldError(f"modulus {self.modulus} is reducible over Z_{self.p}")
        object.__setattr__(self, "q", self.p**self.ext_degree)

    def __call__(self, value: int | Sequence[int]) -> "FieldElement":
        """Build an element from an encoding or a coefficient list."""
        if isinstance(value, (int, np.integer)):
            value = int(value)
            if self.ext_degree == 1:
                value %= self.p
            elif not 0 <= value < self.q:
                raise FieldError(f"encoding {value} out of range for q={self.q}")
            return FieldElement(self, value)
        coeffs = list(value)
        if len(coeffs) > self.ext_degree:
            raise FieldError("too many coefficients")
        return FieldElement(self, _undigits([c % self.p for c in coeffs], self.p))

    def elements(self) -> Iterator["FieldElement"]:
        for enc in range(self.q):
            yield FieldElement(self, enc)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    @property
    def q_mod_4(self) -> int:
        return self.q % 4

    def __repr__(self):
        return f"FieldSpec(p={self.p}, ext_degree={self.ext_degree}, modulus={self.modulus})"


@dataclass(frozen=True)
class FieldElement:
    field: FieldSpec
    enc: int

    @property
    def coeffs(self) -> list[int]:
        return _digits(self.enc, self.field.p, self.field.ext_degree)

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("elements of different fields")
            return other
        if isinstance(other, (int, np.integer)):
            # integers embed through the prime subfield
            return FieldElement(self.field, int(other) % self.field.p)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.field.p
        if self.field.ext_degree == 1:
            return FieldElement(self.field, (self.enc + other.enc) % p)
        c = [(a + b) % p for a, b in zip(self.coeffs, other.coeffs)]
        return FieldElement(self.field, _undigits(c, p))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FieldElement(self.field, _undigits([(-c) % p for c in self.coeffs], p))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        f = self.field
        if f.ext_degree == 1:
            return FieldElement(f, self.enc * other.enc % f.p)
        prod = _poly_mod(_poly_mul(self.coeffs, other.coeffs, f.p), f.modulus, f.p)
        return FieldElement(f, _undigits(prod, f.p))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        """Inverse via the extended Euclidean algorithm on polynomials."""
        if self.enc == 0:
            raise ZeroDivisionError("inverse of zero")
        f = self.field
        p = f.p
        r0, r1 = list(f.modulus), _trim(self.coeffs)
        s0, s1 = [], [1]
        while r1:
            quot, rem = _poly_divmod(r0, r1, p)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul(quot, s1, p), p)
        # r0 is a nonzero constant since the modulus is irreducible
        inv_c = pow(r0[0], -1, p)
        res = _poly_mod([c * inv_c for c in s0], f.modulus, p)
        return FieldElement(f, _undigits(res, p))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int):
        f = self.field
        if e < 0:
            return self.inverse() ** (-e)
        if f.ext_degree == 1:
            return FieldElement(f, pow(self.enc, e, f.p))
        res = _poly_powmod(self.coeffs, e, f.modulus, f.p)
        return FieldElement(f, _undigits(res, f.p))

    def __bool__(self):
        return self.enc != 0

    def __int__(self):
        return self.enc

    def __repr__(self):
        return f"F{self.field.q}({self.enc})"


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def _modulus_candidates(p: int, ell: int) -> Iterator[tuple[int, ...]]:
    # monic polynomials of degree ell ordered by the integer encoding of their
    # lower coefficients, the same ordering used for elements
    for low in range(p**ell):
        yield tuple(_digits(low, p, ell)) + (1,)


@functools.lru_cache(maxsize=None)
def make_field(p: int, ell: int, q_max: int = Q_MAX) -> FieldSpec:
    """Field of order p**ell with the smallest irreducible monic modulus.

    For ell == 1 the modulus is ``x`` and arithmetic is ordinary mod-p.
    """
    if not isinstance(p, (int, np.integer)) or p < 3 or p % 2 == 0 or not sympy.isprime(p):
        raise FieldError(f"p={p} must be an odd prime")
    if ell < 1:
        raise FieldError(f"extension degree must be >= 1, got {ell}")
    if p**ell > q_max:
        raise FieldError(f"q={p}**{ell} exceeds the configured cap {q_max}")
    for modulus in _modulus_candidates(p, ell):
        if is_irreducible(modulus, p):
            return FieldSpec(p, ell, modulus)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, ell) with q = p**ell for an odd prime p."""
    if q < 3:
        raise FieldError(f"q={q} is not an odd prime power")
    if q % 2 == 0:
        raise FieldError(f"q={q} has even characteristic")
    factors = sympy.factorint(q)
    if len(factors) != 1:
        raise FieldError(f"q={q} is not a prime power")
    ((p, ell),) = factors.items()
    return int(p), int(ell)


def field_for_q(q: int, q_max: int = Q_MAX) -> FieldSpec:
    p, ell = prime_power(q)
    return make_field(p, ell, q_max)


def odd_prime_powers(upper: int, lower: int = 3) -> list[int]:
    """All odd prime powers q with lower <= q <= upper."""
    out = []
    for q in range(max(lower, 3), upper + 1):
        if q % 2 and len(sympy.factorint(q)) == 1:
            out.append(q)
    return out


# ---------------------------------------------------------------------------
# trace, Legendre symbol, generator (scalar)
# ---------------------------------------------------------------------------


def trace(x: FieldElement) -> int:
    """Galois trace sum_k x^(p^k), returned as an integer in [0, p)."""
    f = x.field
    total = f.zero
    y = x
    for _ in range(f.ext_degree):
        total = total + y
        y = y**f.p
    if total.enc >= f.p:
        raise ArithmeticError("trace left the prime subfield")  # pragma: no cover
    return total.enc


def legendre(x: FieldElement) -> int:
    if x.enc == 0:
        return 0
    r = x ** ((x.field.q - 1) // 2)
    if r.enc == 1:
        return 1
    if r == -x.field.one:
        return -1
    raise ArithmeticError("x^((q-1)/2) is not +-1")  # pragma: no cover


def multiplicative_order(x: FieldElement) -> int:
    if x.enc == 0:
        raise ZeroDivisionError("zero has no multiplicative order")
    n = x.field.q - 1
    order = n
    for r in sympy.primefactors(n):
        while order % r == 0 and (x ** (order // r)).enc == 1:
            order //= r
    return order


@functools.lru_cache(maxsize=None)
def _primitive_enc(f: FieldSpec) -> int:
    for enc in range(1, f.q):
        if multiplicative_order(FieldElement(f, enc)) == f.q - 1:
            return enc
    raise AssertionError("multiplicative group is not cyclic?")  # pragma: no cover


def primitive_generator(f: FieldSpec) -> FieldElement:
    """Smallest-encoding element of multiplicative order q - 1."""
    return FieldElement(f, _primitive_enc(f))


def epsilon_mod4(q: int) -> complex:
    """1 if q = 1 mod 4, i if q = 3 mod 4."""
    return 1 + 0j if q % 4 == 1 else 1j


def epsilon(q: int) -> complex:
    """G(1) / sqrt(q) for the canonical character of F_q, q = p**ell.

    By Davenport-Hasse this is -(-epsilon_mod4(p))**ell.  It agrees with
    epsilon_mod4(q) for prime q and odd ell but not always otherwise (q = 25
    gives -1, q = 27 gives -i).
    """
    p, ell = prime_power(q)
    return -((-epsilon_mod4(p)) ** ell)


# ---------------------------------------------------------------------------
# vectorised tables
# ---------------------------------------------------------------------------


class FieldTables:
    """Lookup tables for vectorised arithmetic over one field.

    ``exp[j]`` is the encoding of theta**j for the deterministic primitive
    generator theta, ``log`` is its inverse (``log[0] == -1``).
    """

    def __init__(self, f: FieldSpec):
        self.field = f
        self.p, self.ell, self.q = f.p, f.ext_degree, f.q
        q, p = self.q, self.p
        self.theta = _primitive_enc(f)

        exp = np.empty(q - 1, dtype=np.int64)
        if self.ell == 1:
            acc = 1
            for j in range(q - 1):
                exp[j] = acc
                acc = acc * self.theta % p
        else:
            theta = FieldElement(f, self.theta)
            acc = f.one
            for j in range(q - 1):
                exp[j] = acc.enc
                acc = acc * theta
        log = np.full(q, -1, dtype=np.int64)
        log[exp] = np.arange(q - 1)
        if (log[1:] < 0).any():
            raise AssertionError("generator does not enumerate the unit group")  # pragma: no cover
        self.exp = exp
        self.log = log

        encs = np.arange(q, dtype=np.int64)
        self.digits = np.stack([(encs // p**i) % p for i in range(self.ell)], axis=1)
        self.powers = p ** np.arange(self.ell, dtype=np.int64)
        # trace is Z_p-linear: only the basis monomials need the slow route
        basis_tr = np.array([trace(FieldElement(f, p**i)) for i in range(self.ell)], dtype=np.int64)
        self.trace = (self.digits @ basis_tr) % p
        self.neg = ((-self.digits) % p) @ self.powers
        self.leg = np.zeros(q, dtype=np.int64)
        self.leg[1:] = np.where(log[1:] % 2 == 0, 1, -1)
        self.inv = np.zeros(q, dtype=np.int64)
        self.inv[1:] = exp[(-log[1:]) % (q - 1)]
        self.sq = self.mul(encs, encs)
        self.chi_table = np.exp(2j * np.pi * np.arange(p) / p)
        self.cos_table = np.cos(2 * np.pi * np.arange(p) / p)

    def add(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.ell == 1:
            return (a + b) % self.p
        return ((self.digits[a] + self.digits[b]) % self.p) @ self.powers

    def sub(self, a, b):
        return self.add(a, self.neg[np.asarray(b, dtype=np.int64)])

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.ell == 1:
            return a * b % self.p
        la, lb = self.log[a], self.log[b]
        out = self.exp[(la + lb) % (self.q - 1)]
        return np.where((la < 0) | (lb < 0), 0, out)

    def scalar(self, x: int | FieldElement) -> int:
        return x.enc if isinstance(x, FieldElement) else int(x)

    def norm_squared(self, vectors) -> np.ndarray:
        """Q(v) = sum of squared coordinates for an (n, d) array of encodings."""
        vectors = np.asarray(vectors, dtype=np.int64)
        acc = self.sq[vectors[..., 0]]
        for i in range(1, vectors.shape[-1]):
            acc = self.add(acc, self.sq[vectors[..., i]])
        return acc

    def all_vectors(self, d: int) -> np.ndarray:
        """Every vector of F_q^d as encodings, lexicographic with the first coordinate slowest."""
        grids = np.indices((self.q,) * d).reshape(d, -1).T
        return grids.astype(np.int64)


@functools.lru_cache(maxsize=64)
def tables(f: FieldSpec) -> FieldTables:
    return FieldTables(f)
