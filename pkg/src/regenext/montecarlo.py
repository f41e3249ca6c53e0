"""Empirical side of the approximation: simulation, estimation, comparison.

Builds length-n trajectories from concatenated cycles, extracts the running
top-q order statistics, estimates mu / G / beta_i(x) from cycle samples, and
measures the sup-distance between the empirical CDF of the q-th maximum and
the compound approximation.

Replica j of a run draws from stream index j of the master seed; auxiliary
estimation passes use stream indices at ``core.AUX_STREAM_OFFSET`` and above.
Aggregation is order-independent, so results are identical for any worker
count.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .core import AUX_STREAM_OFFSET, DEFAULT_CYCLE_CAP, make_stream
from .extremes import approx_cdf
from .models import (
    ConstantStep,
    GeometricJump,
    IidBlock,
    Lindley,
    ParetoStep,
    PhantomProfile,
    PrescribedBeta,
    ReflectedWalk,
    closed_form_profile,
    model_to_dict,
    path_top_q,
    sample_cycle_batch,
)

_ESTIMATE_CHUNK = 1_000_000


def _is_integer_state(model) -> bool:
    return isinstance(model, (GeometricJump, ReflectedWalk, PrescribedBeta, IidBlock))


# ---------------------------------------------------------------------------
# Order-statistic samples
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OrderStatSample:
    """N replicas of the top q_max values over an n-step trajectory.

    ``values[j, q-1]`` is the q-th largest of X_1..X_n in replica j; rows are
    nonincreasing, and -inf appears only when n < q (never for the
    implemented models with n >= q_max).
    """

    n: int
    q_max: int
    replicas: int
    values: np.ndarray

    def empirical_cdf(self, q: int, grid: np.ndarray) -> np.ndarray:
        """P_hat(M_n^(q) <= x) along the grid, via a sort + searchsorted."""
        col = np.sort(self.values[:, q - 1])
        return np.searchsorted(col, grid, side="right") / self.replicas

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["replica"] + [f"M{q}" for q in range(1, self.q_max + 1)])
            for j in range(self.replicas):
                w.writerow([j] + [format(v, ".17g") for v in self.values[j]])


def simulate_order_stats(
    model,
    n: int,
    q_max: int,
    N: int,
    seed: int,
    workers: int = 1,
) -> OrderStatSample:
    """N independent replicas of the top-q_max order statistics over n steps.

    Replica j uses stream index j, so the result is bit-identical for any
    worker count and reproducible across runs.
    """
    if not n >= q_max >= 1:
        raise ValueError(f"need n >= q_max >= 1, got n={n}, q_max={q_max}")
    if N < 1:
        raise ValueError(f"need N >= 1, got {N}")
    values = np.empty((N, q_max), dtype=np.float64)

    def run_block(lo: int, hi: int) -> None:
        for j in range(lo, hi):
            rng = make_stream(seed, j)
            values[j] = path_top_q(model, rng, n, q_max)

    if workers <= 1:
        run_block(0, N)
    else:
        block = -(-N // workers)
        bounds = [(i, min(i + block, N)) for i in range(0, N, block)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda b: run_block(*b), bounds))
    return OrderStatSample(n, q_max, N, values)


# ---------------------------------------------------------------------------
# Profile estimation from cycle samples
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EstimatedProfile:
    """Monte Carlo counterpart of a PhantomProfile, with error bars.

    ``beta_hat[t, i-1]`` estimates beta_i at ``thresholds[t]``; it is 0 with
    ``vacuous[t]`` set when no simulated cycle exceeded the threshold.
    """

    mu_hat: float
    mu_stderr: float
    num_cycles: int
    r: int
    thresholds: np.ndarray
    exceed_counts: np.ndarray
    beta_hat: np.ndarray
    beta_stderr: np.ndarray
    vacuous: np.ndarray
    zeta_sorted: np.ndarray

    def zeta_quantile(self, level: float) -> float:
        return float(np.quantile(self.zeta_sorted, level))

    def zeta_sf(self, x: float) -> float:
        """P_hat(zeta > x) from the stored cycle maxima."""
        idx = np.searchsorted(self.zeta_sorted, x, side="right")
        return 1.0 - idx / len(self.zeta_sorted)

    def beta_at(self, x: float, i: int) -> float:
        t = int(np.searchsorted(self.thresholds, x, side="right")) - 1
        if t < 0 or not 1 <= i <= self.r - 1:
            return math.nan
        return float(self.beta_hat[t, i - 1])

    def profile(self, min_exceed: int = 100) -> PhantomProfile:
        """Wrap the estimates as a PhantomProfile.

        G is the empirical cycle-maximum CDF raised to 1/mu_hat; the limiting
        betas are read off at the highest threshold that still has at least
        ``min_exceed`` exceedances.
        """
        zs, nc, mu = self.zeta_sorted, self.num_cycles, self.mu_hat

        def G(x):
            arr = np.asarray(x, dtype=np.float64)
            out = (np.searchsorted(zs, arr, side="right") / nc) ** (1.0 / mu)
            return float(out) if arr.ndim == 0 else out

        ok = np.nonzero(self.exceed_counts >= min_exceed)[0]
        beta_limit = self.beta_hat[ok[-1]].copy() if len(ok) else None
        right = float(zs[-1])
        return PhantomProfile(mu, G, right, self.beta_at, beta_limit)


def estimate_profile(
    model,
    num_cycles: int,
    r: int,
    thresholds: Sequence[float],
    seed: int,
    cap: int = DEFAULT_CYCLE_CAP,
    stream_index: int = AUX_STREAM_OFFSET,
) -> EstimatedProfile:
    """Estimate mu, G and beta_i(x) from ``num_cycles`` simulated cycles.

    beta_i(x) is the fraction of threshold-exceeding cycles whose (i+1)-th
    maximum is <= x < i-th maximum; thresholds never exceeded give vacuous
    (flagged) zero estimates rather than errors.
    """
    if num_cycles < 1:
        raise ValueError(f"need num_cycles >= 1, got {num_cycles}")
    thresholds = np.asarray(thresholds, dtype=np.float64)
    if np.any(np.diff(thresholds) < 0):
        raise ValueError("thresholds must be sorted ascending")
    rng = make_stream(seed, stream_index)

    T = len(thresholds)
    # #{zeta^(i) > x} per threshold, i = 1..r; differences give the beta counts
    above = np.zeros((T, r), dtype=np.int64)
    length_sum = 0.0
    length_sumsq = 0.0
    zeta_parts = []
    done = 0
    while done < num_cycles:
        size = min(_ESTIMATE_CHUNK, num_cycles - done)
        lengths, maxima = sample_cycle_batch(model, rng, size, r, cap)
        length_sum += lengths.sum()
        length_sumsq += (lengths.astype(np.float64) ** 2).sum()
        zeta_parts.append(maxima[:, 0].copy())
        for i in range(r):
            col = np.sort(maxima[:, i])
            above[:, i] += size - np.searchsorted(col, thresholds, side="right")
        done += size

    mu_hat = length_sum / num_cycles
    var = max(length_sumsq / num_cycles - mu_hat**2, 0.0)
    mu_stderr = math.sqrt(var / num_cycles)
    zeta_sorted = np.sort(np.concatenate(zeta_parts))

    exceed = above[:, 0]
    vacuous = exceed == 0
    denom = np.where(vacuous, 1, exceed)
    # exactly-i-exceedances count: #{zeta^(i) > x} - #{zeta^(i+1) > x}
    beta_counts = above[:, :-1] - above[:, 1:]
    beta_hat = beta_counts / denom[:, None]
    beta_hat[vacuous] = 0.0
    beta_stderr = np.sqrt(beta_hat * (1.0 - beta_hat) / denom[:, None])
    beta_stderr[vacuous] = np.nan

    return EstimatedProfile(
        mu_hat=float(mu_hat),
        mu_stderr=float(mu_stderr),
        num_cycles=num_cycles,
        r=r,
        thresholds=thresholds,
        exceed_counts=exceed,
        beta_hat=beta_hat,
        beta_stderr=beta_stderr,
        vacuous=vacuous,
        zeta_sorted=zeta_sorted,
    )


# ---------------------------------------------------------------------------
# Conditional cluster-size estimation for the reflected walk
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ClusterSizeEstimate:
    """beta_i(x) estimates from cycles conditioned to exceed the threshold."""

    threshold: int
    num_cycles: int
    counts: np.ndarray
    beta_hat: np.ndarray
    beta_stderr: np.ndarray


def reflected_walk_cluster_estimate(
    p: float,
    threshold: float,
    num_cycles: int,
    seed: int,
    max_count: int = 64,
    stream_index: int = AUX_STREAM_OFFSET + 2,
) -> ClusterSizeEstimate:
    """Unbiased beta_i(x) for the reflected walk by first-passage conditioning.

    High thresholds are essentially never crossed by unconditioned cycles
    (the crossing probability decays like (p/q)^x), so plain cycle sampling
    is hopeless there.  The +-1 walk first passes above x exactly at
    floor(x)+1, hence the post-passage segment of a conditioned cycle is an
    *unconditioned* walk started at floor(x)+1; counting its visits above x
    before it hits 0 samples the cluster-size law exactly.
    """
    ReflectedWalk(p)  # parameter validation
    x0 = int(math.floor(threshold))
    counts = np.zeros(max_count, dtype=np.int64)
    rng = make_stream(seed, stream_index)
    _kernels.rw_exceedance_counts(p, x0, num_cycles, counts, rng)
    beta_hat = counts / num_cycles
    beta_stderr = np.sqrt(beta_hat * (1.0 - beta_hat) / num_cycles)
    return ClusterSizeEstimate(x0, num_cycles, counts, beta_hat, beta_stderr)


# ---------------------------------------------------------------------------
# Comparison harness
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ComparisonReport:
    """Empirical vs approximate CDFs of M_n^(q) on a threshold grid.

    ``sup_gap[q-1]`` is the grid sup-distance for the q-th maximum, the
    finite-sample witness of the vanishing sup in the limit theorem.
    """

    grid: np.ndarray
    empirical: np.ndarray   # (q_max, G)
    approx: np.ndarray      # (q_max, G)
    gap: np.ndarray         # signed, empirical - approx
    sup_gap: np.ndarray     # (q_max,)
    mc_stderr: np.ndarray   # (q_max, G)
    n: int
    replicas: int
    seed: int
    beta_source: str
    model: dict
    runtime_s: float

    @property
    def q_max(self) -> int:
        return self.empirical.shape[0]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["q", "x", "empirical", "approx", "gap", "stderr"])
            for qi in range(self.q_max):
                for g, x in enumerate(self.grid):
                    w.writerow([
                        qi + 1, format(x, ".17g"),
                        format(self.empirical[qi, g], ".10g"),
                        format(self.approx[qi, g], ".10g"),
                        format(self.gap[qi, g], ".10g"),
                        format(self.mc_stderr[qi, g], ".10g"),
                    ])

    def summary(self) -> dict:
        return {
            "sup_gap": {str(q + 1): float(self.sup_gap[q]) for q in range(self.q_max)},
            "n": self.n,
            "replicas": self.replicas,
            "seed": self.seed,
            "beta_source": self.beta_source,
            "model": self.model,
            "grid_points": len(self.grid),
            "runtime_s": self.runtime_s,
        }

    def save_summary(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2)
            fh.write("\n")


def sup_distance(empirical: Sequence[float], approx: Sequence[float]) -> float:
    """Maximum absolute gap between two equal-length CDF columns."""
    e = np.asarray(empirical, dtype=np.float64)
    a = np.asarray(approx, dtype=np.float64)
    if e.shape != a.shape:
        raise ValueError(f"column shapes differ: {e.shape} vs {a.shape}")
    return float(np.max(np.abs(e - a)))


def _auto_grid(sample: OrderStatSample, integer_state: bool, points: int = 512) -> np.ndarray:
    """Grid bracketing the rise of all empirical CDFs (0.5%..99.5%).

    Integer grid for integer-state models (their CDFs are step functions with
    jumps on the integers, so nothing is lost); quantile-spaced otherwise.
    """
    finite = sample.values[np.isfinite(sample.values)]
    lo = float(np.quantile(sample.values[:, -1], 0.005))
    hi = float(np.quantile(sample.values[:, 0], 0.995))
    if integer_state:
        return np.arange(math.floor(lo) - 1, math.ceil(hi) + 2, dtype=np.float64)
    qs = np.linspace(0.002, 0.998, points)
    grid = np.quantile(finite, qs)
    return np.unique(grid)


def compare(
    model,
    n: int,
    q_max: int,
    N: int,
    grid=None,
    beta_source: str = "closed_form",
    seed: int = 0,
    workers: int = 1,
    profile: Optional[PhantomProfile] = None,
    estimate_cycles: int = 1_000_000,
    cap: int = DEFAULT_CYCLE_CAP,
) -> ComparisonReport:
    """Empirical vs approximate CDF of M_n^(q) for q = 1..q_max.

    ``beta_source`` selects the cluster probabilities entering the compound
    formula: ``closed_form`` uses the limiting betas (corollary form),
    ``threshold_dependent`` the exact finite-threshold betas (theorem form),
    ``estimated`` Monte Carlo estimates from an auxiliary cycle run.  G comes
    from the analytical profile when one exists, otherwise from estimation.
    """
    if beta_source not in ("closed_form", "estimated", "threshold_dependent"):
        raise ValueError(f"unknown beta_source {beta_source!r}")
    t0 = time.monotonic()
    sample = simulate_order_stats(model, n, q_max, N, seed, workers)
    if grid is None:
        grid = _auto_grid(sample, _is_integer_state(model))
    grid = np.asarray(grid, dtype=np.float64)
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")

    if profile is None:
        profile = closed_form_profile(model)
    est = None
    if profile is None or beta_source == "estimated":
        est = estimate_profile(
            model, estimate_cycles, max(q_max, 2), grid, seed, cap
        )
        if profile is None:
            profile = est.profile()

    Gn = np.array([profile.G(float(x)) for x in grid]) ** n

    def beta_for(x: float) -> np.ndarray:
        if q_max == 1:
            return np.zeros(0)
        if beta_source == "closed_form":
            b = profile.beta_limit_vector(q_max - 1)
        elif beta_source == "threshold_dependent":
            b = profile.beta_at_vector(x, q_max - 1)
        else:
            b = np.array([est.beta_at(x, i) for i in range(1, q_max)])
        if np.any(np.isnan(b)):
            raise ValueError(
                f"beta_source={beta_source!r} has no value for some beta_i at "
                f"x={x}; use beta_source='estimated' for this model/q"
            )
        return np.clip(b, 0.0, 1.0)

    empirical = np.empty((q_max, len(grid)))
    approx = np.empty_like(empirical)
    for q in range(1, q_max + 1):
        empirical[q - 1] = sample.empirical_cdf(q, grid)
    for g, x in enumerate(grid):
        b = beta_for(float(x))
        for q in range(1, q_max + 1):
            approx[q - 1, g] = approx_cdf(q, float(Gn[g]), b[: q - 1])

    gap = empirical - approx
    sup_gap = np.max(np.abs(gap), axis=1)
    mc_stderr = np.sqrt(empirical * (1.0 - empirical) / N)
    return ComparisonReport(
        grid=grid,
        empirical=empirical,
        approx=approx,
        gap=gap,
        sup_gap=sup_gap,
        mc_stderr=mc_stderr,
        n=n,
        replicas=N,
        seed=seed,
        beta_source=beta_source,
        model=model_to_dict(model),
        runtime_s=time.monotonic() - t0,
    )


# ---------------------------------------------------------------------------
# Tail-equivalence diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TailEquivalenceTable:
    """Per-threshold ratio of the empirical cycle-maximum tail to a reference.

    For the Lindley process the reference is mu * (1 - F(x)) with F the step
    CDF; for the prescribed-cluster-size chain it is 1 - F(x) with F the
    ladder reference tail.  The approach of the ratio toward 1 is reported,
    not asserted.
    """

    thresholds: np.ndarray
    exceed_counts: np.ndarray
    p_hat: np.ndarray
    ratio: np.ndarray
    ratio_stderr: np.ndarray
    vacuous: np.ndarray
    mu_hat: float
    num_cycles: int

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "exceed_count", "p_hat", "ratio", "stderr", "vacuous"])
            for t in range(len(self.thresholds)):
                w.writerow([
                    format(self.thresholds[t], ".17g"),
                    int(self.exceed_counts[t]),
                    format(self.p_hat[t], ".10g"),
                    format(self.ratio[t], ".10g"),
                    format(self.ratio_stderr[t], ".10g"),
                    bool(self.vacuous[t]),
                ])


def tail_equivalence_check(
    model,
    num_cycles: int,
    thresholds: Sequence[float],
    seed: int,
    cap: int = DEFAULT_CYCLE_CAP,
    stream_index: int = AUX_STREAM_OFFSET + 1,
) -> TailEquivalenceTable:
    """Numerical witness that the cycle-maximum tail tracks the reference tail.

    Only models with a nondegenerate reference tail qualify: Lindley with
    long-tailed steps, or the prescribed-cluster-size chain.
    """
    if isinstance(model, Lindley):
        if isinstance(model.step, ConstantStep):
            raise TypeError("tail equivalence is vacuous for deterministic steps")
        ref_sf = model.step.sf
        scale_by_mu = True
    elif isinstance(model, PrescribedBeta):
        # evaluate the reference tail at the next ladder rung above x, where
        # the sandwich 1-F(v_{n(x)+1}) <= P(zeta > x) <= 1-F(v_{n(x)}) is
        # sharp; same limit as 1-F(x) since m_v = o(v)
        v = model.vseq.v.astype(np.float64)

        def ref_sf(x):
            x = np.asarray(x, dtype=np.float64)
            idx = np.minimum(np.searchsorted(v, x, side="right"), len(v) - 1)
            return model.F.sf(v[idx])

        scale_by_mu = False
    else:
        raise TypeError(
            f"tail equivalence applies to Lindley or PrescribedBeta models, "
            f"not {type(model).__name__}"
        )

    est = estimate_profile(
        model, num_cycles, 1, thresholds, seed, cap, stream_index
    )
    thresholds = est.thresholds
    p_hat = est.exceed_counts / num_cycles
    denom = np.asarray(ref_sf(thresholds), dtype=np.float64)
    if scale_by_mu:
        denom = est.mu_hat * denom
    ratio = p_hat / denom
    stderr = np.sqrt(p_hat * (1.0 - p_hat) / num_cycles) / denom
    return TailEquivalenceTable(
        thresholds=thresholds,
        exceed_counts=est.exceed_counts,
        p_hat=p_hat,
        ratio=ratio,
        ratio_stderr=stderr,
        vacuous=est.vacuous,
        mu_hat=est.mu_hat,
        num_cycles=num_cycles,
    )
