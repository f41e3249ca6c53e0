"""Cycle-level primitives for regenerative processes.

A regenerative process restarts afresh at regeneration times, so its law is
determined by the i.i.d. sequence of cycles.  This module holds the cycle
record type, the sentinel used when a cycle is shorter than the requested
order-statistic index, the deterministic random-stream contract, and the
generic single-cycle simulator every model plugs into.

Random streams
--------------
``make_stream(master_seed, stream_index)`` builds a ``numpy.random.Generator``
backed by PCG64 seeded with ``SeedSequence(entropy=master_seed,
spawn_key=(stream_index,))``.  Identical pairs give identical value sequences
on every platform; distinct stream indices share no state.  Replica ``j`` of a
Monte Carlo run uses stream index ``j``; auxiliary estimation passes use
indices at offset ``AUX_STREAM_OFFSET`` and above so they never collide with
replica streams.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Iterator, Protocol

import numpy as np

#: Default hard cap on the number of steps in a single cycle.  Heavy-tailed
#: models can produce very long cycles; the cap turns a silent hang caused by
#: bad parameters (e.g. nonnegative drift) into a diagnosable error.
DEFAULT_CYCLE_CAP = 100_000_000

#: Stream indices >= this offset are reserved for auxiliary estimation passes
#: so that they never collide with per-replica streams 0..N-1.
AUX_STREAM_OFFSET = 2**32


class CycleCapExceeded(RuntimeError):
    """A simulated cycle ran longer than the configured hard cap."""

    def __init__(self, cap: int, model: object = None):
        self.cap = cap
        self.model = model
        detail = f" for model {model!r}" if model is not None else ""
        super().__init__(
            f"cycle exceeded {cap} steps{detail}; this usually signals bad "
            "parameters (e.g. nonnegative drift or p >= 1/2)"
        )


class _NegInf:
    """Sentinel for 'the cycle has no q-th largest value' (q > cycle length).

    A dedicated singleton rather than ``float('-inf')`` so the sentinel is
    unambiguous in comparisons and file round-trips.  It compares strictly
    below every number and equal only to itself.
    """

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return not isinstance(other, _NegInf)

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return isinstance(other, _NegInf)

    def __eq__(self, other):
        return isinstance(other, _NegInf)

    def __hash__(self):
        return hash("regenext.NEG_INF")

    def __float__(self):
        return float("-inf")

    def __repr__(self):
        return "-inf"

    def __reduce__(self):
        return (_NegInf, ())


NEG_INF = _NegInf()

#: A within-cycle order statistic: a real value, or NEG_INF when absent.
Extended = "float | _NegInf"


def _as_float(v) -> float:
    return float("-inf") if isinstance(v, _NegInf) else float(v)


@dataclass(frozen=True)
class CycleRecord:
    """One regeneration cycle: its length and its top-r order statistics.

    ``maxima[q-1]`` is the q-th largest value observed within the cycle and is
    ``NEG_INF`` whenever ``q > length``.
    """

    length: int
    maxima: tuple

    def __post_init__(self):
        if self.length < 1:
            raise ValueError(f"cycle length must be >= 1, got {self.length}")
        m = self.maxima
        for i in range(len(m) - 1):
            if _as_float(m[i]) < _as_float(m[i + 1]):
                raise ValueError(f"maxima must be nonincreasing, got {m}")
        for q, v in enumerate(m, start=1):
            if q > self.length and not isinstance(v, _NegInf):
                raise ValueError(
                    f"maxima[{q - 1}] must be NEG_INF for q > length={self.length}"
                )

    @property
    def r(self) -> int:
        return len(self.maxima)

    def maxima_array(self) -> np.ndarray:
        """Maxima as a float array, with the sentinel mapped to -inf."""
        return np.array([_as_float(v) for v in self.maxima], dtype=np.float64)

    @staticmethod
    def from_floats(length: int, maxima: Iterable[float]) -> "CycleRecord":
        """Build a record from floats, converting -inf back to the sentinel."""
        vals = tuple(
            NEG_INF if v == float("-inf") else float(v) for v in maxima
        )
        return CycleRecord(int(length), vals)


class CycleModel(Protocol):
    """Contract every simulated model implements: a per-step cycle iterator.

    ``cycle_steps(rng)`` yields the process values of one full cycle of a
    nondelayed copy, in trajectory order, starting with the value at the
    regeneration time.
    """

    def cycle_steps(self, rng: np.random.Generator) -> Iterator[float]: ...


def make_stream(master_seed: int, stream_index: int = 0) -> np.random.Generator:
    """Deterministic random stream for (master_seed, stream_index).

    PCG64 seeded via ``SeedSequence(entropy=master_seed,
    spawn_key=(stream_index,))``.  See the module docstring for the contract.
    """
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(stream_index,))
    return np.random.Generator(np.random.PCG64(ss))


def simulate_cycle(
    model: CycleModel,
    r: int,
    rng: np.random.Generator,
    cap: int = DEFAULT_CYCLE_CAP,
) -> CycleRecord:
    """Simulate one full cycle and return its length and top-r maxima.

    Raises ``CycleCapExceeded`` if the cycle runs past ``cap`` steps.
    """
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    top: list[float] = []
    length = 0
    for v in model.cycle_steps(rng):
        length += 1
        if length > cap:
            raise CycleCapExceeded(cap, model)
        if len(top) < r or v > top[-1]:
            # insertion into the small descending top-r buffer
            i = len(top)
            top.append(v)
            while i > 0 and top[i - 1] < v:
                top[i] = top[i - 1]
                i -= 1
            top[i] = v
            if len(top) > r:
                top.pop()
    maxima = tuple(top) + (NEG_INF,) * (r - len(top))
    return CycleRecord(length, maxima)


# ---------------------------------------------------------------------------
# CSV serialization: one row per cycle, `length,zeta1,...,zetar`, with the
# sentinel spelled `-inf`.
# ---------------------------------------------------------------------------

def write_cycles_csv(records: Iterable[CycleRecord], path) -> None:
    records = list(records)
    if not records:
        raise ValueError("no cycle records to write")
    r = records[0].r
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["length"] + [f"zeta{q}" for q in range(1, r + 1)])
        for rec in records:
            w.writerow([rec.length] + [repr(v) if isinstance(v, _NegInf)
                                       else format(float(v), ".17g")
                                       for v in rec.maxima])


def read_cycles_csv(path) -> list[CycleRecord]:
    out = []
    with open(path, newline="") as fh:
        rows = csv.reader(fh)
        header = next(rows)
        if not header or header[0] != "length":
            raise ValueError(f"not a cycle CSV: header {header}")
        for row in rows:
            length = int(row[0])
            maxima = tuple(
                NEG_INF if cell.strip() == "-inf" else float(cell)
                for cell in row[1:]
            )
            out.append(CycleRecord(length, maxima))
    return out
