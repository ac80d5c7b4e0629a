"""Intersection numbers p_{i,j}^k and intersection matrices L_i.

For the plane the numbers come from the Legendre-symbol closed form; in any
dimension they can be counted directly (``q**d <= BRUTE_FORCE_MAX``).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .charsums import kloosterman_vector, moments
from .gf import FieldElement, field_for_q, legendre, tables
from .scheme import (
    BRUTE_FORCE_MAX,
    ZBAR,
    Distance,
    SchemeError,
    distance_classes,
    distance_set,
    scheme_matrices,
)


def tol_eig(q: int) -> float:
    return 1e-6 * q


def _field_value(x, q: int) -> int:
    x = Distance.of(x)
    if x.is_zbar:
        raise SchemeError("the formal zero is handled by table assembly, not the closed form")
    return x.enc


def planar_intersection(i, j, k, q: int, exclude_endpoints: bool = True) -> int:
    """p_{i,j}^k for the plane, i, j, k field distances (never zbar).

    For k != 0 the count is 1 + legendre(4 sigma_2 - sigma_1^2).  When i = 0 and
    j = k (or j = 0 and i = k) the discriminant vanishes and its double root is
    z = x (or z = y), which is not a third point; ``exclude_endpoints`` drops it.
    Those cases only occur for q = 1 mod 4.
    """
    f = field_for_q(q)
    i, j, k = (_field_value(x, q) for x in (i, j, k))
    if k == 0:
        if q % 4 != 1:
            raise SchemeError("distance 0 does not occur in the plane when q = 3 mod 4")
        dij = 1 if i == j else 0
        di0 = 1 if i == 0 else 0
        return 1 + (q - 2) * dij * di0 - dij
    I, J, K = f(i), f(j), f(k)
    s1 = I + J + K
    s2 = I * J + J * K + K * I
    count = legendre(4 * s2 - s1 * s1) + 1
    if exclude_endpoints:
        count -= (i == 0 and j == k) + (j == 0 and i == k)
    return count


def _first_vector_at(k: Distance, q: int, d: int) -> np.ndarray:
    """x = 0 and the first enumerated y with d(0, y) = k, preferring y_0 != 0."""
    f = field_for_q(q)
    vecs = tables(f).all_vectors(d)
    classes = distance_classes(vecs, f)
    target = -1 if k.is_zbar else k.enc
    hits = np.flatnonzero(classes == target)
    if len(hits) == 0:
        raise SchemeError(f"no pair of points realises distance {k} for q={q}, d={d}")
    preferred = hits[vecs[hits, 0] != 0]
    pick = preferred[0] if len(preferred) else hits[0]
    return vecs[pick]


def _counts_from(y: np.ndarray, q: int, d: int) -> np.ndarray:
    """(q+1) x (q+1) histogram of (d(0, z), d(z, y)) over all z; index 0 = zbar, enc+1 otherwise."""
    f = field_for_q(q)
    t = tables(f)
    vecs = t.all_vectors(d)
    cx = distance_classes(vecs, f) + 1
    cy = distance_classes(t.sub(vecs, y[None, :]), f) + 1
    return np.bincount(cx * (q + 1) + cy, minlength=(q + 1) ** 2).reshape(q + 1, q + 1)


def _check_cap(q: int, d: int) -> None:
    if q**d > BRUTE_FORCE_MAX:
        raise SchemeError(f"q^d = {q**d} exceeds the brute-force cap {BRUTE_FORCE_MAX}")


def brute_force_intersection(i, j, k, q: int, d: int, alternatives: int = 0, seed: int = 0) -> int:
    """Count z with d(x,z) = i and d(z,y) = j for a fixed pair with d(x,y) = k.

    With ``alternatives > 0`` the count is repeated for that many random y at
    distance k and a mismatch raises (the scheme axiom).
    """
    _check_cap(q, d)
    i, j, k = Distance.of(i), Distance.of(j), Distance.of(k)
    y = _first_vector_at(k, q, d)

    def slot(x: Distance) -> int:
        return 0 if x.is_zbar else x.enc + 1

    value = int(_counts_from(y, q, d)[slot(i), slot(j)])
    if alternatives:
        f = field_for_q(q)
        vecs = tables(f).all_vectors(d)
        classes = distance_classes(vecs, f)
        hits = np.flatnonzero(classes == (-1 if k.is_zbar else k.enc))
        rng = np.random.default_rng(seed)
        for pick in rng.choice(hits, size=min(alternatives, len(hits)), replace=False):
            other = int(_counts_from(vecs[pick], q, d)[slot(i), slot(j)])
            if other != value:
                raise AssertionError(f"p^{k}_{{{i},{j}}} depends on the base pair: {value} vs {other}")
    return value


@dataclass(frozen=True)
class IntersectionTable:
    """values[k, i, j] = p_{i,j}^k, indices following the ordered distance set."""

    q: int
    d: int
    values: np.ndarray

    def __call__(self, i, j, k) -> int:
        ds = distance_set(self.q, self.d)
        return int(self.values[ds.index(k), ds.index(i), ds.index(j)])

    def matrix(self, i) -> np.ndarray:
        """(L_i)_{k,j} = p_{i,j}^k."""
        ds = distance_set(self.q, self.d)
        return self.values[:, ds.index(i), :]


@functools.lru_cache(maxsize=64)
def brute_force_table(q: int, d: int) -> IntersectionTable:
    _check_cap(q, d)
    ds = distance_set(q, d)
    slots = np.array([0 if x.is_zbar else x.enc + 1 for x in ds])
    n = len(ds)
    values = np.empty((n, n, n), dtype=np.int64)
    for kk, k in enumerate(ds):
        counts = _counts_from(_first_vector_at(k, q, d), q, d)
        values[kk] = counts[np.ix_(slots, slots)]
    values.setflags(write=False)
    return IntersectionTable(q, d, values)


@functools.lru_cache(maxsize=64)
def planar_table(q: int, exclude_endpoints: bool = True) -> IntersectionTable:
    """Closed-form planar table including the zbar rows and columns."""
    f = field_for_q(q)
    t = tables(f)
    ds = distance_set(q, 2)
    if q % 4 == 1:
        sizes = np.array([1, 2 * q - 2] + [q - 1] * (q - 1), dtype=np.int64)
    else:
        sizes = np.array([1] + [q + 1] * (q - 1), dtype=np.int64)
    n = len(ds)
    enc = np.array([-1 if x.is_zbar else x.enc for x in ds], dtype=np.int64)
    e = np.where(enc < 0, 0, enc)
    K, I, J = np.meshgrid(e, e, e, indexing="ij")
    s1 = t.add(t.add(I, J), K)
    s2 = t.add(t.add(t.mul(I, J), t.mul(J, K)), t.mul(K, I))
    four = t.add(t.add(1, 1), t.add(1, 1))
    disc = t.sub(t.mul(four, s2), t.mul(s1, s1))
    values = t.leg[disc] + 1
    if exclude_endpoints:
        values = values - ((I == 0) & (J == K)) - ((J == 0) & (I == K))
    if q % 4 == 1:
        k0 = 1  # position of distance 0
        ii, jj = np.meshgrid(enc, enc, indexing="ij")
        dij = (ii == jj).astype(np.int64)
        values[k0] = 1 + (q - 2) * dij * (ii == 0) - dij
    eye = np.eye(n, dtype=np.int64)
    values[0] = eye * sizes[:, None]  # p_{i,j}^zbar = delta_ij |S_i|
    values[:, 0, :] = eye  # p_{zbar,j}^k = delta_jk
    values[:, :, 0] = eye  # p_{i,zbar}^k = delta_ik
    values.setflags(write=False)
    return IntersectionTable(q, 2, values)


def intersection_table(q: int, d: int = 2, oracle: bool = False) -> IntersectionTable:
    if d == 2 and not oracle:
        return planar_table(q)
    return brute_force_table(q, d)


@dataclass(frozen=True)
class IntersectionMatrix:
    i: Distance
    q: int
    d: int
    matrix: np.ndarray

    def spectrum(self) -> np.ndarray:
        """Eigenvalues (ascending) via the symmetrised conjugate D^(1/2) L D^(-1/2)."""
        sizes = scheme_matrices(self.q, self.d).D.astype(float)
        root = np.sqrt(sizes)
        sym = root[:, None] * self.matrix * (1.0 / root)[None, :]
        sym = (sym + sym.T) / 2
        return np.linalg.eigvalsh(sym)

    def power_trace(self, ell: int) -> int:
        """Exact trace of L_i^ell with integer arithmetic."""
        n = len(self.matrix)
        # entries of L^ell are bounded by (max row sum)^ell
        if n * int(np.abs(self.matrix).sum(axis=1).max()) ** ell < 2**62:
            return int(np.trace(np.linalg.matrix_power(self.matrix.astype(np.int64), ell)))
        m = self.matrix.astype(object)
        acc = np.eye(len(m), dtype=np.int64).astype(object)
        for _ in range(ell):
            acc = acc.dot(m)
        return int(np.trace(acc))


def intersection_matrix(i, q: int, d: int = 2, oracle: bool = False) -> IntersectionMatrix:
    table = intersection_table(q, d, oracle=oracle)
    i = Distance.of(i)
    return IntersectionMatrix(i, q, d, np.array(table.matrix(i)))


def predicted_spectrum(q: int) -> np.ndarray:
    """Planar L_i spectrum for i != 0 (sorted): from the K(1,a) values."""
    k = np.asarray(kloosterman_vector(field_for_q(q))[1:])
    if q % 4 == 3:
        vals = np.concatenate([[q + 1.0], -k])
    else:
        vals = np.concatenate([[q - 1.0, -1.0], k])
    return np.sort(vals)


def predicted_trace(q: int, ell: int) -> int:
    m = moments(field_for_q(q), max(ell, 1))[ell]
    if q % 4 == 3:
        return (q + 1) ** ell + (-1) ** ell * m
    return (q - 1) ** ell + (-1) ** ell + m


def collinear_test(i, j, k) -> bool:
    """True iff 4 sigma_2 == sigma_1^2 for the distances i, j, k."""
    if not all(isinstance(x, FieldElement) for x in (i, j, k)):
        raise TypeError("collinear_test takes three FieldElements")
    s1 = i + j + k
    s2 = i * j + j * k + k * i
    return 4 * s2 == s1 * s1


def points_collinear(a, b, c, q: int) -> bool:
    """Determinant test: rank [b - a, c - a] < 2."""
    f = field_for_q(q)
    u = [f(int(b[n])) - f(int(a[n])) for n in range(2)]
    v = [f(int(c[n])) - f(int(a[n])) for n in range(2)]
    return (u[0] * v[1] - u[1] * v[0]).enc == 0


@dataclass(frozen=True)
class DistanceBoundReport:
    size: int
    nonzero_distances: int  # distances in F_q^x achieved by distinct points
    field_distances: int  # also counting distance 0 between distinct points
    bound: int  # q + n (n - 1) with n = nonzero_distances
    holds: bool
    bound_with_zero: int
    holds_with_zero: bool


def distance_bound_check(E: Iterable, q: int) -> DistanceBoundReport:
    """Check |E| <= q + n(n - 1) for a planar set E with |E| > q, q = 1 mod 4.

    ``n`` is reported under both readings of "nonzero distance": values in
    F_q^x, and field values (0 included) between distinct points.
    """
    if q % 4 != 1:
        raise SchemeError("the distance-set bound needs q = 1 mod 4")
    f = field_for_q(q)
    t = tables(f)
    pts = np.unique(np.array([[int(c) % q if not isinstance(c, FieldElement) else c.enc for c in p] for p in E], dtype=np.int64), axis=0)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise SchemeError("E must be a set of planar points")
    if len(pts) <= q:
        raise SchemeError(f"|E| = {len(pts)} must exceed q = {q}")
    diffs = t.sub(pts[:, None, :], pts[None, :, :]).reshape(-1, 2)
    classes = distance_classes(diffs, f)
    achieved = set(np.unique(classes[classes >= 0]).tolist())
    n_nonzero = len(achieved - {0})
    n_all = len(achieved)
    bound = q + n_nonzero * (n_nonzero - 1)
    bound0 = q + n_all * (n_all - 1)
    return DistanceBoundReport(len(pts), n_nonzero, n_all, bound, len(pts) <= bound, bound0, len(pts) <= bound0)

