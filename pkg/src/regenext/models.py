"""Concrete regenerative processes and their analytical profiles.

Five models are implemented, all nondelayed, all regenerating at state 0
(except the i.i.d.-block construction, whose cycles are i.i.d. by design):

* ``GeometricJump(p)`` -- from 0 jump to k with probability p(1-p)^k, then
  descend one step at a time back to 0.
* ``ReflectedWalk(p)`` -- simple +-1 random walk reflected at 0, p < 1/2.
* ``Lindley(step)`` -- X_n = max(X_{n-1} + Z_{n-1}, 0) with i.i.d. steps of
  negative mean; with long-tailed steps the cluster-size probabilities all
  vanish in the limit.
* ``PrescribedBeta`` -- a chain engineered so the limiting cluster-size
  probabilities equal a prescribed vector (built by
  :func:`prescribed_beta_model`).
* ``IidBlock`` -- i.i.d. blocks of constant value V repeated Y steps, with
  P(V=m) = 2^-m and Y | V=m drawn from a given row-stochastic table.

A :class:`PhantomProfile` collects what is known analytically about a model:
the mean cycle length mu, the phantom distribution function G, and the
cluster-size probabilities beta_i (limiting, and at finite thresholds where a
closed form exists).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from . import _kernels
from .core import DEFAULT_CYCLE_CAP, CycleCapExceeded, make_stream

#: Infinite series over jump targets / block sizes are truncated once the
#: remaining tail mass drops below this bound.
SERIES_TAIL_MASS = 1e-12


def _vectorized(fn: Callable[[np.ndarray], np.ndarray]):
    """Wrap an array function so scalars in give scalars out."""

    def wrapped(x):
        arr = np.asarray(x, dtype=np.float64)
        out = fn(arr)
        if arr.ndim == 0:
            return float(out)
        return out

    return wrapped


# ---------------------------------------------------------------------------
# Distribution descriptors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParetoTail:
    """Pareto distribution on [1, inf): P(X > x) = x^-alpha.

    Subexponential, hence long-tailed; the default reference tail for the
    prescribed-cluster-size construction.
    """

    alpha: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        out = np.where(x >= 1.0, 1.0 - np.abs(x) ** -self.alpha, 0.0)
        return float(out) if out.ndim == 0 else out

    def sf(self, x):
        x = np.asarray(x, dtype=np.float64)
        out = np.where(x >= 1.0, np.abs(x) ** -self.alpha, 1.0)
        return float(out) if out.ndim == 0 else out

    def quantile(self, u: float) -> float:
        if not 0.0 <= u < 1.0:
            raise ValueError(f"u must lie in [0, 1), got {u}")
        return (1.0 - u) ** (-1.0 / self.alpha)


@dataclass(frozen=True)
class ConstantStep:
    """Degenerate step distribution Z = value (value < 0 regenerates at once)."""

    value: float

    @property
    def mean(self) -> float:
        return self.value

    @property
    def long_tailed(self) -> bool:
        return False

    def sample(self, rng: np.random.Generator) -> float:
        return self.value


@dataclass(frozen=True)
class ParetoStep:
    """Shifted Pareto step: Z = scale * U^(-1/alpha) + shift, U uniform.

    Long-tailed (subexponential) upper tail; negative mean requires
    shift < -scale * alpha / (alpha - 1).
    """

    alpha: float
    scale: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if self.alpha <= 0 or self.scale <= 0:
            raise ValueError(
                f"need alpha > 0 and scale > 0, got {self.alpha}, {self.scale}"
            )

    @property
    def mean(self) -> float:
        if self.alpha <= 1.0:
            return math.inf
        return self.scale * self.alpha / (self.alpha - 1.0) + self.shift

    @property
    def long_tailed(self) -> bool:
        return True

    def sample(self, rng: np.random.Generator) -> float:
        u = 1.0 - rng.random()
        return self.scale * u ** (-1.0 / self.alpha) + self.shift

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        z = (x - self.shift) / self.scale
        out = np.where(z >= 1.0, 1.0 - np.abs(z) ** -self.alpha, 0.0)
        return float(out) if out.ndim == 0 else out

    def sf(self, x):
        x = np.asarray(x, dtype=np.float64)
        z = (x - self.shift) / self.scale
        out = np.where(z >= 1.0, np.abs(z) ** -self.alpha, 1.0)
        return float(out) if out.ndim == 0 else out


StepDist = "ConstantStep | ParetoStep"


# ---------------------------------------------------------------------------
# Phantom profile
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhantomProfile:
    """Analytical profile of a model: mu, G, and cluster-size probabilities.

    ``beta_at(x, i)`` is the probability that a cycle exceeding threshold x
    does so exactly i times; it returns NaN where no closed form is published
    (the Monte Carlo estimator takes over there).  ``beta_limit`` holds the
    limiting probabilities as x approaches the right endpoint of G, with NaN
    entries where the limit is unknown.
    """

    mu: float
    G: Callable
    right_endpoint: float
    beta_at: Optional[Callable] = None
    beta_limit: Optional[np.ndarray] = None

    def beta_limit_vector(self, count: int) -> np.ndarray:
        """First ``count`` limiting cluster probabilities, zero-padded."""
        out = np.zeros(count, dtype=np.float64)
        if self.beta_limit is not None:
            k = min(count, len(self.beta_limit))
            out[:k] = self.beta_limit[:k]
        return out

    def beta_at_vector(self, x: float, count: int) -> np.ndarray:
        if self.beta_at is None:
            return np.full(count, np.nan)
        return np.array([self.beta_at(x, i) for i in range(1, count + 1)])


# ---------------------------------------------------------------------------
# Geometric jump
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeometricJump:
    """From 0 jump to k w.p. p(1-p)^k, then walk down one step per tick."""

    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"need 0 < p < 1, got p={self.p}")

    def cycle_steps(self, rng: np.random.Generator) -> Iterator[float]:
        yield 0.0
        u = 1.0 - rng.random()
        k = int(math.log(u) / math.log1p(-self.p))
        for s in range(k, 0, -1):
            yield float(s)


def geometric_jump_profile(p: float, rmax: int = 9) -> PhantomProfile:
    """Closed-form profile: mu = 1/p, explicit G, geometric cluster sizes.

    The jump law is memoryless, so beta_i(x) = p(1-p)^(i-1) at every
    threshold, already equal to its limit.
    """
    model = GeometricJump(p)  # validates p
    mu = 1.0 / p

    @_vectorized
    def G(x):
        return np.where(
            x > 0.0,
            (1.0 - (1.0 - p) ** (np.floor(np.maximum(x, 0.0)) + 1.0)) ** p,
            0.0,
        )

    beta_limit = p * (1.0 - p) ** np.arange(rmax - 1, dtype=np.float64)

    def beta_at(x: float, i: int) -> float:
        if i < 1:
            raise ValueError(f"i must be >= 1, got {i}")
        return p * (1.0 - p) ** (i - 1)

    return PhantomProfile(mu, G, math.inf, beta_at, beta_limit)


# ---------------------------------------------------------------------------
# Reflected simple random walk
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReflectedWalk:
    """+-1 random walk reflected at 0; up-probability p < 1/2."""

    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 0.5:
            raise ValueError(
                f"need 0 < p < 1/2 (positive recurrence), got p={self.p}"
            )

    def cycle_steps(self, rng: np.random.Generator) -> Iterator[float]:
        yield 0.0
        s = 0
        while True:
            s += 1 if rng.random() < self.p else -1
            if s <= 0:
                return
            yield float(s)


def reflected_walk_profile(p: float, rmax: int = 9) -> PhantomProfile:
    """Profile from the gambler's-ruin identity: mu = q/(q-p), beta_1 = q-p.

    No closed form is published for beta_i with i >= 2; those entries are NaN
    and the Monte Carlo estimator is the route for them.
    """
    model = ReflectedWalk(p)  # validates p
    q = 1.0 - p
    mu = q / (q - p)
    rho = q / p  # > 1

    @_vectorized
    def G(x):
        fl = np.floor(np.maximum(x, 0.0))
        num = rho ** (fl + 1.0) - rho
        den = rho ** (fl + 1.0) - 1.0
        return np.where(x > 0.0, (q + p * num / den) ** (1.0 - p / q), 0.0)

    beta_limit = np.full(rmax - 1, np.nan)
    beta_limit[0] = q - p

    def beta_at(x: float, i: int) -> float:
        if i < 1:
            raise ValueError(f"i must be >= 1, got {i}")
        if i >= 2:
            return math.nan
        # one exceedance: step down from floor(x)+1 and never climb back
        # before hitting 0 (ruin probability from floor(x) against floor(x)+1)
        a = math.floor(max(x, 0.0))
        return q * (rho ** (a + 1) - rho**a) / (rho ** (a + 1) - 1.0)

    return PhantomProfile(mu, G, math.inf, beta_at, beta_limit)


# ---------------------------------------------------------------------------
# Lindley process
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lindley:
    """X_n = max(X_{n-1} + Z_{n-1}, 0), steps Z i.i.d. with negative mean."""

    step: object

    def __post_init__(self):
        if not self.step.mean < 0:
            raise ValueError(
                f"step distribution must have strictly negative mean, "
                f"got mean {self.step.mean}"
            )

    def cycle_steps(self, rng: np.random.Generator) -> Iterator[float]:
        yield 0.0
        s = 0.0
        while True:
            s = max(s + self.step.sample(rng), 0.0)
            if s == 0.0:
                return
            yield s


def lindley_profile(
    step,
    num_cycles: int = 200_000,
    seed: int = 0,
    rmax: int = 9,
    cap: int = DEFAULT_CYCLE_CAP,
) -> PhantomProfile:
    """Profile of the Lindley process.

    There is no closed form for mu or G in general: mu is estimated by Monte
    Carlo and G is the empirical cycle-maximum CDF raised to 1/mu (strictly
    tail-equivalent to F^(1/mu) for long-tailed steps).  All limiting
    cluster-size probabilities are zero; finite-threshold values have no
    closed form and are left to estimation.

    A constant negative step is handled exactly: every cycle is {0}.
    """
    model = Lindley(step)  # validates negative mean
    if isinstance(step, ConstantStep):
        @_vectorized
        def G0(x):
            return np.where(x >= 0.0, 1.0, 0.0)

        return PhantomProfile(1.0, G0, 0.0, None, np.zeros(rmax - 1))

    rng = make_stream(seed, 0)
    lengths, maxima = sample_cycle_batch(model, rng, num_cycles, 1, cap)
    mu_hat = float(lengths.mean())
    zeta_sorted = np.sort(maxima[:, 0])

    @_vectorized
    def G(x):
        idx = np.searchsorted(zeta_sorted, x, side="right")
        return (idx / num_cycles) ** (1.0 / mu_hat)

    return PhantomProfile(mu_hat, G, math.inf, None, np.zeros(rmax - 1))


# ---------------------------------------------------------------------------
# Prescribed cluster sizes (engineered chain)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogMRule:
    """Default block-width rule m_n = i0 + floor(log2(1 + n)).

    Nondecreasing, >= i0, and o(n), which makes the Pareto tail ratio
    (1-F(n+m_n))/(1-F(n)) converge to 1.
    """

    i0: int

    def __call__(self, n: int) -> int:
        return self.i0 + int(math.floor(math.log2(1.0 + n)))


@dataclass(frozen=True)
class ConstMRule:
    """Constant block-width rule m_n = value."""

    value: int

    def __call__(self, n: int) -> int:
        return self.value


@dataclass(frozen=True, eq=False)
class VSequence:
    """The ladder states v_1 < v_2 < ... with their block widths m_{v_n}.

    Built by the recursion v_1 = 1, v_{n+1} = v_n + m_{v_n}.  ``m[i]`` stores
    m at state v[i].  ``i0`` is the smallest cluster size with positive
    prescribed probability; every m value must be >= i0.
    """

    v: np.ndarray
    m: np.ndarray
    i0: int

    def __post_init__(self):
        v, m = self.v, self.m
        if v[0] != 1:
            raise ValueError(f"v[0] must be 1, got {v[0]}")
        if np.any(v[1:] != v[:-1] + m[:-1]):
            raise ValueError("v must satisfy v[n] = v[n-1] + m[v[n-1]]")
        if np.any(m < self.i0):
            raise ValueError(f"all m values must be >= i0={self.i0}")
        if np.any(np.diff(m) < 0):
            raise ValueError("m values must be nondecreasing along v")

    def __len__(self):
        return len(self.v)

    def tail_ratio(self, F: ParetoTail) -> float:
        """(1-F(v+m_v))/(1-F(v)) at the largest built v: should be near 1."""
        v_last = float(self.v[-1])
        return F.sf(v_last + float(self.m[-1])) / F.sf(v_last)

    def renorm_factor(self, idx: int, beta: np.ndarray) -> float:
        """Finite-threshold truncation factor 1 / sum_{j<=m_{v_idx}} beta_j.

        Equals 1 once m_{v_idx} covers the support of beta; surfaced as a
        diagnostic because no rate is available for how fast it settles.
        """
        lim = min(int(self.m[idx]), len(beta))
        return 1.0 / float(beta[:lim].sum())


def build_vsequence(m_rule, i0: int, upper: float) -> VSequence:
    """Unroll the v-recursion until the ladder passes ``upper``."""
    v = [1]
    m = [int(m_rule(1))]
    # two extra rungs so v[idx+1] is always defined for lookups below upper
    while v[-1] <= upper or len(v) < 3:
        v.append(v[-1] + m[-1])
        m.append(int(m_rule(v[-1])))
    return VSequence(
        np.asarray(v, dtype=np.int64), np.asarray(m, dtype=np.int64), i0
    )


@dataclass(frozen=True, eq=False)
class PrescribedBeta:
    """Markov chain whose limiting cluster-size probabilities are prescribed.

    From 0 the chain jumps onto the ladder state v_n with probability
    F(v_{n+1}) - F(v_n); from v_n it selects a cluster size i (renormalized
    prescribed weights up to m_{v_n}), climbs to v_n + i - 1 in one step and
    walks back down to v_n + 1 before regenerating at 0.
    Build instances with :func:`prescribed_beta_model`.
    """

    beta: tuple
    F: ParetoTail
    m_rule: object
    vseq: VSequence

    def _cluster_size(self, u: float, m_here: int) -> int:
        # sequential accumulation mirrors the jitted kernel bit-for-bit
        b = self.beta
        lim = min(m_here, len(b))
        cum = np.cumsum(b[:lim])
        target = u * cum[-1]
        for i in range(lim):
            if target < cum[i]:
                return i + 1
        return lim

    def cycle_steps(self, rng: np.random.Generator) -> Iterator[float]:
        yield 0.0
        x = (1.0 - rng.random()) ** (-1.0 / self.F.alpha)
        v = self.vseq.v
        if x < v[0]:
            return
        idx = min(int(np.searchsorted(v, x, side="right")) - 1, len(v) - 1)
        peak = int(v[idx])
        yield float(peak)
        c = self._cluster_size(rng.random(), int(self.vseq.m[idx]))
        for s in range(peak + c - 1, peak, -1):
            yield float(s)


def _pb_exact_mu(beta: np.ndarray, F: ParetoTail, vseq: VSequence) -> float:
    """Exact mean cycle length: E(Y | jump to v_n) = 1 + sum (i+1) beta_i / B_n."""
    v, m = vseq.v, vseq.m
    delta = np.empty(len(v))
    delta[:-1] = F.cdf(v[1:].astype(float)) - F.cdf(v[:-1].astype(float))
    delta[-1] = F.sf(float(v[-1]))  # fold the (< SERIES_TAIL_MASS) tail in
    idx = np.arange(1, len(beta) + 1, dtype=np.float64)
    mu = F.cdf(1.0) * 1.0
    for n in range(len(v)):
        lim = min(int(m[n]), len(beta))
        b = beta[:lim]
        mu += delta[n] * (1.0 + ((idx[:lim] + 1.0) * b).sum() / b.sum())
    return float(mu)


def _pb_zeta_sf(x: float, beta: np.ndarray, F: ParetoTail, vseq: VSequence) -> float:
    """Exact P(zeta > x) for the prescribed-beta chain."""
    v, m = vseq.v, vseq.m
    if x < 0.0:
        return 1.0
    if x < v[0]:
        return F.sf(float(v[0]))
    jj = min(int(np.searchsorted(v, x, side="right")) - 1, len(v) - 1)
    out = F.sf(float(v[jj + 1])) if jj + 1 < len(v) else 0.0
    # straddling rung: jump to v_jj with a cluster tall enough to clear x
    c_min = int(math.floor(x - v[jj])) + 2
    lim = min(int(m[jj]), len(beta))
    if c_min <= lim:
        tail = beta[c_min - 1 : lim].sum() / beta[:lim].sum()
        dF = (F.cdf(float(v[jj + 1])) if jj + 1 < len(v) else 1.0) - F.cdf(float(v[jj]))
        out += dF * tail
    return float(out)


def _pb_beta_at(
    x: float, i: int, beta: np.ndarray, F: ParetoTail, vseq: VSequence
) -> float:
    """Exact beta_i(x) = P(exactly i values above x | cycle exceeds x)."""
    if i < 1:
        raise ValueError(f"i must be >= 1, got {i}")
    v, m = vseq.v, vseq.m
    denom = _pb_zeta_sf(x, beta, F, vseq)
    if denom == 0.0:
        return math.nan
    x_eff = max(x, 0.0)
    jj = (
        min(int(np.searchsorted(v, x_eff, side="right")) - 1, len(v) - 1)
        if x_eff >= v[0]
        else -1
    )
    num = 0.0
    # rungs fully above x: every cluster value exceeds x, count == cluster size
    vf = v.astype(np.float64)
    delta = np.empty(len(v))
    delta[:-1] = F.cdf(vf[1:]) - F.cdf(vf[:-1])
    delta[-1] = F.sf(vf[-1])
    for k in range(jj + 1, len(v)):
        lim = min(int(m[k]), len(beta))
        if i <= lim:
            num += delta[k] * beta[i - 1] / beta[:lim].sum()
    # straddling rung v_jj <= x: count = v_jj + c - 1 - floor(x)
    if jj >= 0:
        c_star = i + int(math.floor(x_eff)) + 1 - int(v[jj])
        lim = min(int(m[jj]), len(beta))
        if 1 <= c_star <= lim:
            num += delta[jj] * beta[c_star - 1] / beta[:lim].sum()
    return num / denom


def prescribed_beta_model(
    beta: Sequence[float],
    F: ParetoTail = ParetoTail(2.0),
    m_rule="default",
    tail_tol: float = 0.01,
    tail_mass: float = SERIES_TAIL_MASS,
):
    """Build the prescribed-cluster-size chain plus its exact profile.

    ``beta`` must be a finite probability vector (sum 1); ``m_rule`` is
    either the string ``"default"`` (i0 + floor(log2(1+n))) or a positive
    integer for a constant rule.  The ladder is unrolled until the reference
    tail mass beyond it is below ``tail_mass``, and the numerical witness of
    the tail-ratio condition is checked against ``tail_tol``.

    Returns ``(model, profile, vseq)``.
    """
    b = np.asarray(beta, dtype=np.float64)
    if b.ndim != 1 or len(b) == 0:
        raise ValueError("beta must be a nonempty 1-d vector")
    if np.any(b < 0):
        raise ValueError(f"beta entries must be >= 0, got {b}")
    if abs(b.sum() - 1.0) > 1e-9:
        raise ValueError(f"beta must sum to 1, got sum {b.sum()}")
    if not np.isfinite((np.arange(1, len(b) + 1) * b).sum()):
        raise ValueError("beta must have finite mean cluster size")
    i0 = int(np.nonzero(b > 0)[0][0]) + 1

    if m_rule == "default":
        rule = LogMRule(i0)
    elif isinstance(m_rule, int):
        rule = ConstMRule(m_rule)
    else:
        rule = m_rule
    if rule(1) < i0:
        raise ValueError(f"m_rule values must be >= i0={i0}, got m_1={rule(1)}")

    upper = F.quantile(1.0 - tail_mass)
    vseq = build_vsequence(rule, i0, upper)
    ratio = vseq.tail_ratio(F)
    if abs(ratio - 1.0) > tail_tol:
        raise ValueError(
            f"m_rule fails the tail-ratio witness: (1-F(v+m))/(1-F(v)) = "
            f"{ratio:.6f} at v={vseq.v[-1]} (tolerance {tail_tol})"
        )

    model = PrescribedBeta(tuple(float(x) for x in b), F, rule, vseq)
    mu = _pb_exact_mu(b, F, vseq)

    @_vectorized
    def G(x):
        flat = np.atleast_1d(x)
        sf = np.array([_pb_zeta_sf(float(t), b, F, vseq) for t in flat])
        out = (1.0 - sf) ** (1.0 / mu)
        return out.reshape(np.shape(x))

    def beta_at(x: float, i: int) -> float:
        return _pb_beta_at(x, i, b, F, vseq)

    profile = PhantomProfile(mu, G, math.inf, beta_at, b.copy())
    return model, profile, vseq


# ---------------------------------------------------------------------------
# I.i.d. blocks with prescribed per-block cluster law
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class IidBlock:
    """Cycles of constant value V repeated Y times, P(V=m) = 2^-m.

    ``cluster_law`` row m-1 gives P(Y = i | V = m) for i = 1..L; rows beyond
    the table reuse the last row, so the limiting cluster law is exactly that
    row.  Build with :func:`iid_block_model` (validates stochastic rows).
    """

    cluster_law: np.ndarray

    def _draw_block(self, rng: np.random.Generator) -> tuple[int, int]:
        u = 1.0 - rng.random()
        m = int(math.floor(-math.log2(u))) + 1
        row = self.cluster_law[min(m, len(self.cluster_law)) - 1]
        u2 = rng.random()
        y = int(np.searchsorted(np.cumsum(row), u2, side="right")) + 1
        return m, min(y, len(row))

    def cycle_steps(self, rng: np.random.Generator) -> Iterator[float]:
        m, y = self._draw_block(rng)
        for _ in range(y):
            yield float(m)


def iid_block_model(cluster_law) -> IidBlock:
    """Validate a p(m, i) table and build the i.i.d.-block model.

    ``cluster_law`` is a sequence of rows (possibly ragged); row m-1 holds
    P(Y = i | V = m).  Each row must be a probability vector.
    """
    rows = [np.asarray(r, dtype=np.float64) for r in cluster_law]
    if not rows:
        raise ValueError("cluster_law must have at least one row")
    width = max(len(r) for r in rows)
    table = np.zeros((len(rows), width))
    for m, r in enumerate(rows):
        if np.any(r < 0) or abs(r.sum() - 1.0) > 1e-9:
            raise ValueError(
                f"cluster_law row {m + 1} is not a probability vector: {r}"
            )
        table[m, : len(r)] = r
    return IidBlock(table)


def iid_block_beta(cluster_law, m: int, i: int) -> float:
    """Exact beta_i(m) = 2^m * sum_{v>m} 2^-v p(v, i) for the block model.

    The geometric tail is summed in closed form (rows beyond the table equal
    the last row), so there is no truncation error.
    """
    table = cluster_law if isinstance(cluster_law, np.ndarray) else iid_block_model(cluster_law).cluster_law
    M, L = table.shape
    if not 1 <= i <= L:
        return 0.0
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if m >= M - 1:
        # all rows beyond m equal the last row; the weights sum to 1 exactly
        return float(table[M - 1, i - 1])
    total = 0.0
    for v in range(m + 1, M):
        total += 2.0 ** (-v) * table[v - 1, i - 1]
    total += 2.0 ** (-(M - 1)) * table[M - 1, i - 1]  # sum_{v>=M} 2^-v = 2^-(M-1)
    return float(2.0**m * total)


def iid_block_profile(model: IidBlock) -> PhantomProfile:
    """Exact profile: mu from the table, G(x) = P(V <= x)^(1/mu), exact betas."""
    table = model.cluster_law
    M, L = table.shape
    ybar = table @ np.arange(1, L + 1, dtype=np.float64)
    mu = 0.0
    for m in range(1, M):
        mu += 2.0 ** (-m) * ybar[m - 1]
    mu += 2.0 ** (-(M - 1)) * ybar[M - 1]

    @_vectorized
    def G(x):
        fl = np.floor(np.maximum(x, 0.0))
        return np.where(x >= 1.0, (1.0 - 2.0**-fl) ** (1.0 / mu), 0.0)

    def beta_at(x: float, i: int) -> float:
        return iid_block_beta(table, max(int(math.floor(x)), 0), i)

    beta_limit = table[M - 1].copy()
    return PhantomProfile(float(mu), G, math.inf, beta_at, beta_limit)


# ---------------------------------------------------------------------------
# Closed-form profile dispatch and config round-trip
# ---------------------------------------------------------------------------

def closed_form_profile(model) -> Optional[PhantomProfile]:
    """The analytical profile of a model, or None if estimation is required."""
    if isinstance(model, GeometricJump):
        return geometric_jump_profile(model.p)
    if isinstance(model, ReflectedWalk):
        return reflected_walk_profile(model.p)
    if isinstance(model, PrescribedBeta):
        _, profile, _ = prescribed_beta_model(
            model.beta, model.F, model.m_rule
        )
        return profile
    if isinstance(model, IidBlock):
        return iid_block_profile(model)
    if isinstance(model, Lindley) and isinstance(model.step, ConstantStep):
        return lindley_profile(model.step)
    return None


def _step_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "const":
        return ConstantStep(float(d["value"]))
    if kind == "pareto":
        return ParetoStep(
            float(d["alpha"]), float(d.get("scale", 1.0)), float(d.get("shift", 0.0))
        )
    raise ValueError(f"unknown step kind {kind!r}")


def _step_to_dict(step) -> dict:
    if isinstance(step, ConstantStep):
        return {"kind": "const", "value": step.value}
    return {
        "kind": "pareto", "alpha": step.alpha,
        "scale": step.scale, "shift": step.shift,
    }


def model_from_dict(d: dict):
    """Build a model from its configuration dictionary (see README schema)."""
    try:
        variant = d["variant"]
    except KeyError:
        raise ValueError("model config needs a 'variant' key") from None
    if variant == "geometric_jump":
        return GeometricJump(float(d["p"]))
    if variant == "reflected_walk":
        return ReflectedWalk(float(d["p"]))
    if variant == "lindley":
        return Lindley(_step_from_dict(d["step"]))
    if variant == "prescribed_beta":
        m_rule = d.get("m_rule", "default")
        if isinstance(m_rule, dict):
            m_rule = int(m_rule["value"])
        model, _, _ = prescribed_beta_model(
            d["beta"], ParetoTail(float(d.get("f_alpha", 2.0))), m_rule
        )
        return model
    if variant == "iid_block":
        return iid_block_model(d["cluster_law"])
    raise ValueError(f"unknown model variant {variant!r}")


def model_to_dict(model) -> dict:
    if isinstance(model, GeometricJump):
        return {"variant": "geometric_jump", "p": model.p}
    if isinstance(model, ReflectedWalk):
        return {"variant": "reflected_walk", "p": model.p}
    if isinstance(model, Lindley):
        return {"variant": "lindley", "step": _step_to_dict(model.step)}
    if isinstance(model, PrescribedBeta):
        rule = model.m_rule
        m_rule = "default" if isinstance(rule, LogMRule) else {"kind": "const", "value": rule.value}
        return {
            "variant": "prescribed_beta",
            "beta": list(model.beta),
            "f_alpha": model.F.alpha,
            "m_rule": m_rule,
        }
    if isinstance(model, IidBlock):
        return {
            "variant": "iid_block",
            "cluster_law": [list(map(float, row)) for row in model.cluster_law],
        }
    raise TypeError(f"not a model: {model!r}")


# ---------------------------------------------------------------------------
# Bulk simulation wrappers around the jitted kernels
# ---------------------------------------------------------------------------

def _lindley_kind(step) -> tuple[int, float, float, float, float]:
    if isinstance(step, ConstantStep):
        return 0, 1.0, 1.0, 0.0, step.value
    return 1, step.alpha, step.scale, step.shift, 0.0


def sample_cycle_batch(
    model,
    rng: np.random.Generator,
    size: int,
    r: int,
    cap: int = DEFAULT_CYCLE_CAP,
) -> tuple[np.ndarray, np.ndarray]:
    """Simulate ``size`` i.i.d. cycles; returns (lengths, top-r maxima matrix).

    Sentinel entries of the maxima matrix are -inf.  Draws per cycle match
    the scalar ``cycle_steps`` iterators exactly, so both routes reproduce
    the same cycles from the same stream.
    """
    lengths = np.empty(size, dtype=np.int64)
    maxima = np.empty((size, r), dtype=np.float64)
    if isinstance(model, GeometricJump):
        status = _kernels.geo_cycle_batch(model.p, size, r, cap, lengths, maxima, rng)
    elif isinstance(model, ReflectedWalk):
        status = _kernels.rw_cycle_batch(model.p, size, r, cap, lengths, maxima, rng)
    elif isinstance(model, Lindley):
        kind, a, sc, sh, cv = _lindley_kind(model.step)
        status = _kernels.lindley_cycle_batch(
            kind, a, sc, sh, cv, size, r, cap, lengths, maxima, rng
        )
    elif isinstance(model, PrescribedBeta):
        vseq = model.vseq
        status = _kernels.pb_cycle_batch(
            vseq.v.astype(np.float64), vseq.m,
            np.cumsum(np.asarray(model.beta)), model.F.alpha,
            size, r, lengths, maxima, rng,
        )
    elif isinstance(model, IidBlock):
        row_cum = np.cumsum(model.cluster_law, axis=1)
        status = _kernels.iid_cycle_batch(row_cum, size, r, lengths, maxima, rng)
    else:
        raise TypeError(f"unknown model type {type(model).__name__}")
    if status != 0:
        raise CycleCapExceeded(cap, model)
    return lengths, maxima


def path_top_q(model, rng: np.random.Generator, n: int, q: int) -> np.ndarray:
    """Top-q values of one n-step trajectory X_1..X_n (nondelayed start)."""
    top = np.full(q, -np.inf)
    if isinstance(model, GeometricJump):
        _kernels.geo_path_topq(model.p, n, q, top, rng)
    elif isinstance(model, ReflectedWalk):
        _kernels.rw_path_topq(model.p, n, q, top, rng)
    elif isinstance(model, Lindley):
        kind, a, sc, sh, cv = _lindley_kind(model.step)
        _kernels.lindley_path_topq(kind, a, sc, sh, cv, n, q, top, rng)
    elif isinstance(model, PrescribedBeta):
        vseq = model.vseq
        _kernels.pb_path_topq(
            vseq.v.astype(np.float64), vseq.m,
            np.cumsum(np.asarray(model.beta)), model.F.alpha, n, q, top, rng,
        )
    elif isinstance(model, IidBlock):
        row_cum = np.cumsum(model.cluster_law, axis=1)
        _kernels.iid_path_topq(row_cum, n, q, top, rng)
    else:
        raise TypeError(f"unknown model type {type(model).__name__}")
    return top
