"""The distance-t random walk on the plane F_q^2.

Exact return probabilities are carried as :class:`fractions.Fraction`.  Two
exact routes are always computed and compared: the Kloosterman-moment formula
and the closed-walk count divided by q^2 |S_t|^l.  The Monte-Carlo simulator
and the dense adjacency matrix are independent checks on both.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb, sqrt

import numpy as np
import sympy

from .charsums import moments
from .gf import field_for_q, tables
from .scheme import Distance, SchemeError, distance_classes, scheme_matrices

DENSE_ORACLE_MAX = 31
BLOCK_TRIALS = 1 << 16


def _walk_step(t, q: int) -> Distance:
    t = Distance.of(t)
    if t.is_zbar or t.enc == 0:
        raise SchemeError("the walk needs a distance t in F_q^x")
    if not 0 < t.enc < q:
        raise SchemeError(f"t={t.enc} is not an element of F_{q}")
    return t


def _sphere(q: int) -> int:
    return q + 1 if q % 4 == 3 else q - 1


def _moment(q: int, ell: int):
    return moments(field_for_q(q), ell).entry(ell)


def trace_power(q: int, t, ell: int) -> int:
    """Number of closed walks of length ell in the planar distance-t graph."""
    _walk_step(t, q)
    if ell < 1:
        raise ValueError("ell must be >= 1")
    m = _moment(q, ell).value
    if q % 4 == 3:
        return (q + 1) ** ell + (q + 1) * (-1) ** ell * m
    return (q - 1) ** ell + (2 * q - 2) * (-1) ** ell + (q - 1) * m


def trace_power_spectral(q: int, t, ell: int, d: int = 2) -> int:
    """Trace(A_t^ell) = sum_k dim W_k * P[k, t]^ell from the eigenvalue matrix."""
    t = Distance.of(t)
    sm = scheme_matrices(q, d)
    col = sm.P[:, sm.delta.index(t)]
    dims = np.array([sm.weight_dims[k] for k in sm.delta], dtype=float)
    raw = float(np.sum(dims * col**ell))
    value = round(raw)
    if abs(raw - value) > 1e-6 * max(1.0, abs(raw)):
        raise ArithmeticError(f"spectral trace {raw} is not an integer")
    return int(value)


@dataclass(frozen=True)
class WalkReport:
    q: int
    t: int
    ell: int
    exact_return: Fraction
    float_return: float
    asymptotic_prediction: float
    trace_value: int
    moment_exact: bool
    q_is_prime: bool


def return_probability(q: int, t, ell: int) -> WalkReport:
    t = _walk_step(t, q)
    if ell < 1:
        raise ValueError("ell must be >= 1")
    entry = _moment(q, ell)
    m = entry.value
    sign = (-1) ** ell
    if q % 4 == 3:
        by_moment = Fraction(1, q * q) * (1 + Fraction(sign * m, (q + 1) ** (ell - 1)))
    else:
        by_moment = Fraction(1, q * q) * (1 + Fraction(2 * sign + m, (q - 1) ** (ell - 1)))
    tr = trace_power(q, t, ell)
    by_trace = Fraction(tr, q * q * _sphere(q) ** ell)
    if by_moment != by_trace:
        raise ArithmeticError(f"moment route {by_moment} != trace route {by_trace}")
    if not 0 <= by_trace <= 1:
        raise ArithmeticError(f"return probability {by_trace} outside [0, 1]")
    return WalkReport(
        q=q,
        t=t.enc,
        ell=ell,
        exact_return=by_trace,
        float_return=float(by_trace),
        asymptotic_prediction=asymptotic_return(q, ell),
        trace_value=tr,
        moment_exact=entry.exact,
        q_is_prime=bool(sympy.isprime(q)),
    )


def catalan(m: int) -> int:
    return comb(2 * m, m) // (m + 1)


def asymptotic_return(q: int, ell: int) -> float:
    """1/q^2 + C_m / q^m for ell = 2m; 1/q^2 for odd ell."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    base = 1.0 / q**2
    if ell % 2:
        return base
    m = ell // 2
    return base + catalan(m) / q**m


@dataclass(frozen=True)
class MonteCarloResult:
    trials: int
    successes: int
    seed: int

    @property
    def estimate(self) -> float:
        return self.successes / self.trials

    @property
    def stderr(self) -> float:
        p = self.estimate
        return sqrt(p * (1 - p) / self.trials)


def sphere_vectors(q: int, t) -> np.ndarray:
    """All v in F_q^2 with Q(v) = t (t != 0), as an (n, 2) encoding array."""
    t = _walk_step(t, q)
    f = field_for_q(q)
    vecs = tables(f).all_vectors(2)
    return vecs[distance_classes(vecs, f) == t.enc]


def _num_workers() -> int:
    n = int(os.environ.get("SCHEME_NUM_THREADS", "0") or 0)
    return n if n > 0 else (os.cpu_count() or 1)


def simulate_walk(q: int, t, ell: int, trials: int, seed: int, workers: int | None = None) -> MonteCarloResult:
    """Run ``trials`` walks of ``ell`` uniform distance-t steps from the origin.

    Trials are split into blocks of BLOCK_TRIALS, block b drawing from a PCG64
    stream seeded by the b-th child of ``SeedSequence(seed)``.  The result is
    independent of the worker count.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if ell < 1:
        raise ValueError("ell must be >= 1")
    steps = sphere_vectors(q, t)
    if len(steps) == 0:
        raise SchemeError(f"empty sphere for t={t}")
    tb = tables(field_for_q(q))
    n_blocks = -(-trials // BLOCK_TRIALS)
    children = np.random.SeedSequence(seed).spawn(n_blocks)

    def run_block(b: int) -> int:
        size = min(BLOCK_TRIALS, trials - b * BLOCK_TRIALS)
        rng = np.random.Generator(np.random.PCG64(children[b]))
        pos = np.zeros((size, 2), dtype=np.int64)
        for _ in range(ell):
            pos = tb.add(pos, steps[rng.integers(0, len(steps), size)])
        return int(np.count_nonzero((pos == 0).all(axis=1)))

    workers = workers or _num_workers()
    if workers == 1 or n_blocks == 1:
        counts = [run_block(b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(run_block, range(n_blocks)))
    return MonteCarloResult(trials, sum(counts), seed)


def dense_adjacency_oracle(q: int, t, d: int = 2) -> np.ndarray:
    """Literal q^d x q^d adjacency matrix of the distance-t graph (validation only)."""
    t = Distance.of(t)
    if q > DENSE_ORACLE_MAX or q**d > DENSE_ORACLE_MAX**2:
        raise SchemeError(f"dense oracle is capped at {DENSE_ORACLE_MAX**2} vertices")
    if t.is_zbar:
        return np.eye(q**d, dtype=np.int64)
    f = field_for_q(q)
    tb = tables(f)
    vecs = tb.all_vectors(d)
    diffs = tb.sub(vecs[:, None, :], vecs[None, :, :]).reshape(-1, d)
    classes = distance_classes(diffs, f).reshape(q**d, q**d)
    return (classes == t.enc).astype(np.int64)
