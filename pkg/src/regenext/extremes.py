"""Compound approximation for the q-th largest value of a regenerative process.

The distribution of the q-th maximum over n steps is approximated by

    G(x)^n * sum_{k=0}^{q-1} (-log G(x)^n)^k / k! * gamma_{q,k}

where ``gamma_{q,k}`` mixes multinomially over the ways k high-level cycles
can carry at most q-1 threshold exceedances in total, weighted by the
cluster-size probabilities ``beta_1, ..., beta_{q-1}``.  For q = 1 the sum
collapses and the approximation is just ``G(x)^n``.

Everything here is exact, pure arithmetic; the Monte Carlo side lives in
:mod:`regenext.montecarlo`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

#: Cap on k for the ordered-enumeration oracle (factorial blowup beyond).
BRUTEFORCE_K_CAP = 12


def as_cluster_vector(beta: Sequence[float], q: int) -> np.ndarray:
    """Validate and zero-pad a cluster-size probability vector to length q-1.

    Entries must be nonnegative with sum <= 1 (up to rounding).  Vectors
    longer than q-1 are rejected: the approximation for the q-th maximum
    never consults beta_i with i >= q.
    """
    b = np.asarray(beta, dtype=np.float64)
    if b.ndim != 1:
        raise ValueError("beta must be a 1-d vector")
    if len(b) > q - 1:
        raise ValueError(f"beta has {len(b)} entries; at most q-1={q - 1} allowed")
    if np.any(b < 0):
        raise ValueError(f"beta entries must be >= 0, got {b}")
    if b.sum() > 1.0 + 1e-9:
        raise ValueError(f"beta entries must sum to <= 1, got sum {b.sum()}")
    out = np.zeros(q - 1, dtype=np.float64)
    out[: len(b)] = b
    return out


@dataclass(frozen=True)
class CompositionSet:
    """The index set J_{q,k}: vectors (j_1,...,j_{q-1}) of cluster counts.

    Each member satisfies sum j_i = k (k cycles exceed the threshold) and
    sum i*j_i <= q-1 (at most q-1 exceedances in total).
    """

    q: int
    k: int
    members: tuple

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def enumerate_J(q: int, k: int) -> CompositionSet:
    """Enumerate J_{q,k} exactly, duplicate-free.

    Empty whenever k > q-1, since sum i*j_i >= sum j_i = k.
    """
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    members: list[tuple[int, ...]] = []
    vec = [0] * (q - 1)

    def rec(i: int, count_left: int, weight_left: int) -> None:
        if i == q - 1:
            if count_left == 0:
                members.append(tuple(vec))
            return
        # j_i is bounded both by the remaining count and the remaining weight
        cap = min(count_left, weight_left // (i + 1))
        for j in range(cap + 1):
            vec[i] = j
            rec(i + 1, count_left - j, weight_left - (i + 1) * j)
        vec[i] = 0

    rec(0, k, q - 1)
    return CompositionSet(q, k, tuple(members))


def gamma(q: int, k: int, beta: Sequence[float]) -> float:
    """The multinomial mixture weight gamma_{q,k} in [0, 1].

    gamma_{q,k} = sum over J_{q,k} of k!/(j_1!...j_{q-1}!) *
    beta_1^{j_1} ... beta_{q-1}^{j_{q-1}}.  gamma_{q,0} = 1 always.
    """
    b = as_cluster_vector(beta, q)
    fact_k = math.factorial(k)
    total = 0.0
    for member in enumerate_J(q, k):
        coeff = fact_k
        prod = 1.0
        for i, j in enumerate(member):
            if j:
                coeff //= math.factorial(j)
                prod *= b[i] ** j
        total += coeff * prod
    return total


def gamma_bruteforce(q: int, k: int, beta: Sequence[float]) -> float:
    """Independent oracle for :func:`gamma` by ordered enumeration.

    Sums Prod beta_{c_m} over all ordered assignments (c_1,...,c_k) in
    {1,...,q-1}^k of cluster sizes to the k exceeding cycles with total
    weight sum c_m <= q-1; grouping equal multisets yields the multinomial
    formula, so the two routes must agree.
    """
    if k > BRUTEFORCE_K_CAP:
        raise ValueError(f"bruteforce oracle capped at k <= {BRUTEFORCE_K_CAP}")
    b = as_cluster_vector(beta, q)
    if k == 0:
        return 1.0
    total = 0.0
    for combo in itertools.product(range(1, q), repeat=k):
        if sum(combo) <= q - 1:
            prod = 1.0
            for c in combo:
                prod *= b[c - 1]
            total += prod
    return total


def approx_cdf(q: int, Gn: float, beta: Sequence[float]) -> float:
    """Approximate P(M_n^{(q)} <= x) from Gn := G(x)^n and the beta vector.

    q = 1 returns Gn exactly (first-maximum reduction).  Gn = 0 maps to 0 and
    Gn = 1 maps to 1: at the right endpoint all k >= 1 terms vanish and
    gamma_{q,0} = 1.
    """
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if not 0.0 <= Gn <= 1.0:
        raise ValueError(f"Gn must lie in [0, 1], got {Gn}")
    if q == 1:
        return Gn
    if Gn == 0.0 or Gn < 1e-300:
        # the approximation tends to 0 as Gn -> 0 regardless of beta
        return 0.0
    if Gn == 1.0:
        return 1.0
    lam = -math.log(Gn)
    total = 0.0
    term = 1.0  # lam^k / k!
    for k in range(q):
        if k > 0:
            term *= lam / k
        total += term * gamma(q, k, beta)
    return Gn * total


def binomial_oracle(q: int, n: int, Fx: float) -> float:
    """Exact P(M_n^{(q)} <= x) for an i.i.d. sequence with marginal CDF F.

    For one-point cycles the q-th maximum is below x iff fewer than q of the
    n draws exceed x, i.e. the binomial tail
    sum_{k<q} C(n,k) (1-F)^k F^{n-k}, accumulated in log space.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if not 0.0 <= Fx <= 1.0:
        raise ValueError(f"Fx must lie in [0, 1], got {Fx}")
    if Fx == 1.0:
        return 1.0
    if Fx == 0.0:
        return 0.0 if q <= n else 1.0
    p = 1.0 - Fx
    log_p, log_f = math.log(p), math.log(Fx)
    lgn = math.lgamma(n + 1)
    total = 0.0
    for k in range(min(q, n + 1)):
        log_term = (
            lgn - math.lgamma(k + 1) - math.lgamma(n - k + 1)
            + k * log_p + (n - k) * log_f
        )
        total += math.exp(log_term)
    return min(total, 1.0)
