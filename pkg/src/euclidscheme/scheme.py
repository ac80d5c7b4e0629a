"""The Euclidean association scheme on V = F_q^d.

Distances are ``Q(x - y) = sum (x_i - y_i)^2`` with a formal zero (``ZBAR``)
reserved for ``x == y``.  The distance set is ordered

    zbar, 0 (when it occurs), theta^0, theta^1, ..., theta^(q-2)

for the deterministic primitive generator theta of F_q^x.

The spectral projectors E_k are never built: the coefficients of E_k on the
adjacency basis are column k of Q divided by q^d.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .charsums import tol_sum, twisted_kloosterman, twisted_kloosterman_many
from .gf import FieldElement, FieldSpec, epsilon, field_for_q, tables

D_MAX = 4
BRUTE_FORCE_MAX = 10**6


def tol_mat(q: int, d: int) -> float:
    return 1e-6 * q**d


class SchemeError(ValueError):
    pass


@dataclass(frozen=True)
class Distance:
    """Element of the distance set: a field encoding, or the formal zero (enc None)."""

    enc: int | None

    @property
    def is_zbar(self) -> bool:
        return self.enc is None

    @classmethod
    def of(cls, value) -> "Distance":
        if isinstance(value, Distance):
            return value
        if value is None or value == "zbar":
            return ZBAR
        if isinstance(value, FieldElement):
            return cls(value.enc)
        return cls(int(value))

    def __str__(self):
        return "zbar" if self.enc is None else str(self.enc)


ZBAR = Distance(None)


def has_zero_distance(q: int, d: int) -> bool:
    return d >= 3 or q % 4 == 1


def _check_params(q: int, d: int) -> FieldSpec:
    if not 2 <= d <= D_MAX:
        raise SchemeError(f"dimension d={d} outside [2, {D_MAX}]")
    return field_for_q(q)


@dataclass(frozen=True)
class DistanceSet:
    q: int
    d: int
    members: tuple[Distance, ...]
    s: int  # 4 = theta**s

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    def index(self, t) -> int:
        t = Distance.of(t)
        try:
            return self._positions[t]
        except KeyError:
            raise SchemeError(f"{t} is not a distance for q={self.q}, d={self.d}") from None

    def __contains__(self, t) -> bool:
        return Distance.of(t) in self._positions

    @functools.cached_property
    def _positions(self) -> dict[Distance, int]:
        return {t: i for i, t in enumerate(self.members)}

    @property
    def labels(self) -> list[str]:
        return [str(t) for t in self.members]

    def field_encs(self) -> np.ndarray:
        """Encodings of the non-zbar members, in order."""
        return np.array([t.enc for t in self.members[1:]], dtype=np.int64)


@functools.lru_cache(maxsize=None)
def distance_set(q: int, d: int) -> DistanceSet:
    f = _check_params(q, d)
    t = tables(f)
    members = [ZBAR]
    if has_zero_distance(q, d):
        members.append(Distance(0))
    members.extend(Distance(int(e)) for e in t.exp)
    s = int(t.log[t.add(t.add(1, 1), t.add(1, 1))])
    return DistanceSet(q, d, tuple(members), s)


def distance(x: Sequence, y: Sequence, f: FieldSpec) -> Distance:
    """0bar if x == y, else Q(x - y)."""
    if len(x) != len(y):
        raise SchemeError(f"dimension mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise SchemeError("vectors must have dimension >= 2")
    xs = [f(int(v)) if not isinstance(v, FieldElement) else v for v in x]
    ys = [f(int(v)) if not isinstance(v, FieldElement) else v for v in y]
    if all(a == b for a, b in zip(xs, ys)):
        return ZBAR
    total = f.zero
    for a, b in zip(xs, ys):
        total = total + (a - b) * (a - b)
    return Distance(total.enc)


def distance_classes(vectors: np.ndarray, f: FieldSpec) -> np.ndarray:
    """Q(v) for each row of an (n, d) encoding array, with -1 for the zero vector."""
    t = tables(f)
    qv = t.norm_squared(vectors)
    return np.where((np.asarray(vectors) == 0).all(axis=1), -1, qv)


@functools.lru_cache(maxsize=None)
def _twisted_at_zero(q: int, d: int) -> np.ndarray:
    """K~_d(-t, 0) for every encoding t (complex)."""
    f = field_for_q(q)
    t = tables(f)
    out = np.empty(q, dtype=np.complex128)
    for a in range(q):
        out[a] = twisted_kloosterman_many(d, int(t.neg[a]), [0], f)[0]
    return out


def _real_or_raise(z: complex, q: int) -> float:
    if abs(z.imag) > tol_sum(q) * max(1.0, abs(z)):
        raise ArithmeticError(f"eigenvalue has imaginary part {z.imag}")
    return z.real


def sphere_size(t, q: int, d: int) -> int:
    """|S_t| from the closed form; 1 for the formal zero."""
    t = Distance.of(t)
    ds = distance_set(q, d)
    if t not in ds:
        raise SchemeError(f"{t} is not a distance for q={q}, d={d}")
    if t.is_zbar:
        return 1
    k = _twisted_at_zero(q, d)[t.enc]
    val = q ** (d - 1) - (1 if t.enc == 0 else 0) + q ** (d / 2 - 1) * epsilon(q) ** d * k
    real = _real_or_raise(complex(val), q)
    n = round(real)
    if abs(real - n) > 1e-6:
        raise ArithmeticError(f"sphere size {real} is not an integer")
    return int(n)


@functools.lru_cache(maxsize=None)
def sphere_counts_bruteforce(q: int, d: int) -> dict[Distance, int]:
    """Count every vector of F_q^d by its length (oracle; q^d <= 10^6)."""
    if q**d > BRUTE_FORCE_MAX:
        raise SchemeError(f"q^d = {q**d} exceeds the brute-force cap")
    f = field_for_q(q)
    classes = distance_classes(tables(f).all_vectors(d), f)
    counts = np.bincount(classes[classes >= 0], minlength=q)
    out = {ZBAR: 1}
    for enc in range(q):
        if counts[enc]:
            out[Distance(enc)] = int(counts[enc])
    return out


def sphere_size_bruteforce(t, q: int, d: int) -> int:
    return sphere_counts_bruteforce(q, d).get(Distance.of(t), 0)


def eigenvalue(k, t, q: int, d: int) -> float:
    """Eigenvalue of A_t on the weight space W_k, straight from the Kloosterman formula.

    Scalar and slow; :func:`scheme_matrices` evaluates the same formula in bulk.
    """
    k, t = Distance.of(k), Distance.of(t)
    ds = distance_set(q, d)
    for x in (k, t):
        if x not in ds:
            raise SchemeError(f"{x} is not a distance for q={q}, d={d}")
    if t.is_zbar:
        return 1.0
    f = field_for_q(q)
    tb = tables(f)
    qm = 0 if k.is_zbar else k.enc
    inv4 = int(tb.inv[tb.add(tb.add(1, 1), tb.add(1, 1))])
    b = int(tb.neg[tb.mul(qm, inv4)])
    kt = twisted_kloosterman(d, int(tb.neg[t.enc]), b, f).value
    val = (q ** (d - 1) if k.is_zbar else 0) - (1 if t.enc == 0 else 0)
    val = val + q ** (d / 2 - 1) * epsilon(q) ** d * kt
    return _real_or_raise(complex(val), q)


@dataclass(frozen=True)
class PBlocks:
    """Block form of P for d >= 3 in the theta ordering."""

    alpha: float
    beta: float
    eta: np.ndarray  # alternating |S_Sq|, |S_Sq^c|
    mu: np.ndarray  # (-1)^(i d)
    kmat: np.ndarray  # real (q-1) x (q-1) twisted-Kloosterman matrix
    size_square: int
    size_nonsquare: int
    size_zero: int

    def assemble(self, q: int, d: int) -> np.ndarray:
        n = q - 1
        P = np.empty((q + 1, q + 1))
        P[0, 0] = 1
        P[0, 1] = self.size_zero
        P[0, 2:] = self.eta
        P[1, 0] = 1
        P[1, 1] = self.alpha
        P[1, 2:] = self.beta * self.mu
        P[2:, 0] = np.ones(n)
        P[2:, 1] = self.beta * self.mu - 1
        P[2:, 2:] = q ** (d / 2 - 1) * self.kmat
        return P


@dataclass(frozen=True)
class SchemeMatrices:
    q: int
    d: int
    delta: DistanceSet
    D: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    weight_dims: dict[Distance, int]
    blocks: PBlocks | None = dc_field(default=None)

    def pq_residual(self) -> float:
        n = len(self.delta)
        target = self.q**self.d * np.eye(n)
        return float(max(np.abs(self.P @ self.Q - target).max(), np.abs(self.Q @ self.P - target).max()))

    def p_squared_residual(self) -> float:
        n = len(self.delta)
        return float(np.abs(self.P @ self.P - self.q**2 * np.eye(n)).max())


def p_matrix_blocks(q: int, d: int) -> PBlocks:
    """Constants and the twisted-Kloosterman block for d >= 3, from the identities."""
    if d < 3:
        raise SchemeError("block form is defined for d >= 3")
    f = _check_params(q, d)
    t = tables(f)
    ds = distance_set(q, d)
    eps_d = epsilon(q) ** d
    scale = q ** (d / 2 - 1)
    leg_m1 = int(t.leg[t.neg[1]])
    even = d % 2 == 0
    alpha = -1 + scale * eps_d * (q - 1) * ((-1) ** d + 1) / 2
    if even:
        beta = -scale * eps_d
    else:
        beta = leg_m1 * q ** ((d - 1) / 2) * epsilon(q) ** (d + 1)
    n = q - 1
    idx = np.arange(n)
    mu = (-1.0) ** (idx * d)
    sizes = {t_: sphere_size(t_, q, d) for t_ in (Distance(0), Distance(int(t.exp[0])), Distance(int(t.exp[1 % n])))}
    size_sq = sizes[Distance(int(t.exp[0]))]
    size_nsq = sizes[Distance(int(t.exp[1 % n]))]
    eta = np.where(idx % 2 == 0, size_sq, size_nsq).astype(float)
    # K~_d(1, theta^(i + j - s)) depends only on i + j
    kvec = twisted_kloosterman_many(d, 1, t.exp, f)
    exps = (idx[:, None] + idx[None, :] - ds.s) % n
    kmat = eps_d * leg_m1**d * ((-1.0) ** (idx[None, :] * d)) * kvec[exps]
    if np.abs(np.imag(kmat)).max() > tol_sum(q):
        raise ArithmeticError("twisted Kloosterman block is not real")
    return PBlocks(
        alpha=_real_or_raise(complex(alpha), q),
        beta=_real_or_raise(complex(beta), q),
        eta=eta,
        mu=mu,
        kmat=np.real(kmat),
        size_square=size_sq,
        size_nonsquare=size_nsq,
        size_zero=sizes[Distance(0)],
    )


def _p_matrix(q: int, d: int) -> np.ndarray:
    """Every entry of P evaluated from the eigenvalue formula."""
    f = field_for_q(q)
    t = tables(f)
    ds = distance_set(q, d)
    n = len(ds)
    inv4 = int(t.inv[t.add(t.add(1, 1), t.add(1, 1))])
    # weight-space length Q(m): 0 for the zero vector
    qm = np.array([0 if k.is_zbar else k.enc for k in ds], dtype=np.int64)
    b = t.neg[t.mul(qm, inv4)]
    eps_d = epsilon(q) ** d
    P = np.empty((n, n), dtype=np.complex128)
    P[:, 0] = 1
    for col in range(1, n):
        tt = ds[col].enc
        kt = twisted_kloosterman_many(d, int(t.neg[tt]), b, f)
        P[:, col] = -(1 if tt == 0 else 0) + q ** (d / 2 - 1) * eps_d * kt
        P[0, col] += q ** (d - 1)
    if np.abs(P.imag).max() > tol_sum(q) * max(1.0, np.abs(P).max()):
        raise ArithmeticError("P has a non-negligible imaginary part")
    return np.real(P)


def weight_dims(q: int, d: int) -> dict[Distance, int]:
    """dim W_k = #{m : Q(m) = k} (k = zbar for m = 0), by enumeration when feasible."""
    ds = distance_set(q, d)
    if q**d <= BRUTE_FORCE_MAX:
        counts = sphere_counts_bruteforce(q, d)
        return {k: counts.get(k, 0) for k in ds}
    return {k: sphere_size(k, q, d) for k in ds}


@functools.lru_cache(maxsize=64)
def scheme_matrices(q: int, d: int) -> SchemeMatrices:
    _check_params(q, d)
    ds = distance_set(q, d)
    P = _p_matrix(q, d)
    sizes = P[0].copy()
    rounded = np.rint(sizes)
    if np.abs(sizes - rounded).max() > 1e-6:
        raise ArithmeticError("sphere sizes are not integers")
    D = rounded.astype(np.int64)
    P[0] = rounded  # sphere sizes are integers; drop the float noise
    Q = (P.T * D[None, :]) / D[:, None]
    blocks = p_matrix_blocks(q, d) if d >= 3 else None
    dims = {k: int(D[i]) for i, k in enumerate(ds)}
    if q**d <= BRUTE_FORCE_MAX and dims != weight_dims(q, d):
        raise ArithmeticError(f"sphere sizes from P disagree with enumeration for q={q}, d={d}")
    for M in (P, Q, D):
        M.setflags(write=False)
    return SchemeMatrices(q, d, ds, D, P, Q, dims, blocks)


def orthogonality_check(q: int, d: int, i, j) -> float:
    """|sum_t |S_t| P[t,i] P[t,j] - q^d |S_i| delta_ij|."""
    sm = scheme_matrices(q, d)
    a, b = sm.delta.index(i), sm.delta.index(j)
    total = float(np.sum(sm.D * sm.P[:, a] * sm.P[:, b]))
    target = q**d * sm.D[a] if a == b else 0
    return abs(total - target)


def _vector_array(Y: Iterable, d: int, f: FieldSpec) -> np.ndarray:
    rows = []
    for y in Y:
        row = [v.enc if isinstance(v, FieldElement) else int(v) % f.q for v in y]
        if len(row) != d:
            raise SchemeError(f"vector {y} does not have dimension {d}")
        rows.append(row)
    if not rows:
        raise SchemeError("Y must be nonempty")
    return np.array(rows, dtype=np.int64)


def inner_distribution(Y: Iterable, q: int, d: int) -> dict[Distance, Fraction]:
    """a_j = #{(y1, y2) in Y^2 : d(y1, y2) = j} / |Y|."""
    f = _check_params(q, d)
    t = tables(f)
    ds = distance_set(q, d)
    arr = np.unique(_vector_array(Y, d, f), axis=0)
    n = len(arr)
    diffs = t.sub(arr[:, None, :], arr[None, :, :]).reshape(-1, d)
    classes = distance_classes(diffs, f)
    counts = np.bincount(classes + 1, minlength=q + 1)
    out = {}
    for k in ds:
        c = counts[0] if k.is_zbar else counts[k.enc + 1]
        out[k] = Fraction(int(c), n)
    return out


def delsarte_check(Y: Iterable, q: int, d: int) -> tuple[np.ndarray, bool]:
    """Return a . Q for the inner distribution a, and whether it is entrywise >= -tol."""
    sm = scheme_matrices(q, d)
    dist = inner_distribution(Y, q, d)
    a = np.array([float(dist[k]) for k in sm.delta])
    aq = a @ sm.Q
    return aq, bool((aq >= -tol_mat(q, d)).all())


def isotropic_line(q: int, point=(0, 0), direction=None) -> list[tuple[int, int]]:
    """Points of an affine line in F_q^2 whose direction has length 0 (q = 1 mod 4)."""
    if q % 4 != 1:
        raise SchemeError("isotropic lines need q = 1 mod 4")
    f = field_for_q(q)
    t = tables(f)
    if direction is None:
        # i with i^2 = -1
        i_enc = int(np.flatnonzero(t.sq == t.neg[1])[0])
        direction = (1, i_enc)
    pts = []
    for s in range(q):
        pts.append(tuple(int(t.add(point[c], t.mul(s, direction[c]))) for c in range(2)))
    return pts
