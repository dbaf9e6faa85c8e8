"""Slot-by-slot simulation of the multi-queue multi-server system.

Queues evolve by
    X[n](t) = max(X[n](t-1) - served[n](t), 0) + A[n](t),
with service determined by a per-slot allocation matrix: each server picks
exactly one queue.  The max-weight policy gives server k to the queue
maximizing X[n](t-1) * C[n, k](t); for ON-OFF channels the equivalent
longest-connected-queue rule is provided as well.  Runs are reproducible:
replication i draws everything from ``default_rng(seed + i)``, sampling
the whole channel block first and then the arrival block.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

import numpy as np

from .channel_models import DiscreteChannelModel, ValidationError, sample_states, validate


# -- arrival processes -----------------------------------------------------


@dataclass(frozen=True)
class QueueArrivals:
    """Arrival law of one queue; realizations are bounded integers.

    kind "deterministic" releases floor(rate*t) - floor(rate*(t-1)) packets
    in slot t (a fluid-rounded token scheme); "bernoulli_batch" releases a
    batch of ``batch`` packets with probability ``prob``; "bounded_pmf"
    draws from an explicit pmf on {0, ..., len(pmf)-1}.
    """

    kind: str
    rate_num: int = 0   # deterministic rate as exact rational num/den
    rate_den: int = 1
    batch: int = 0
    prob: float = 0.0
    pmf: tuple = ()

    @property
    def mean(self) -> float:
        if self.kind == "deterministic":
            return self.rate_num / self.rate_den
        if self.kind == "bernoulli_batch":
            return self.batch * self.prob
        return float(sum(a * q for a, q in enumerate(self.pmf)))

    @property
    def mean_square(self) -> float:
        """Largest E[A^2(t)] over slots; the second-moment input to occupancy bounds."""
        if self.kind == "deterministic":
            lo = self.rate_num // self.rate_den
            peak = lo if self.rate_num % self.rate_den == 0 else lo + 1
            return float(peak * peak)
        if self.kind == "bernoulli_batch":
            return self.prob * self.batch**2
        return float(sum(a * a * q for a, q in enumerate(self.pmf)))

    @property
    def cap(self) -> int:
        """Hard upper bound on a single slot's arrivals."""
        if self.kind == "deterministic":
            return -((-self.rate_num) // self.rate_den)  # ceil
        if self.kind == "bernoulli_batch":
            return self.batch
        return len(self.pmf) - 1


def _exact_rate(rate) -> tuple[int, int]:
    # str round-trip keeps decimal inputs exact: 0.3 -> 3/10, not the binary float
    frac = Fraction(Decimal(str(rate))) if not isinstance(rate, Fraction) else rate
    if frac < 0:
        raise ValidationError(f"negative arrival rate {rate}")
    return frac.numerator, frac.denominator


@dataclass(frozen=True)
class ArrivalModel:
    """Per-queue arrival descriptors plus the derived moment fields."""

    queues: tuple

    @classmethod
    def deterministic(cls, rates) -> "ArrivalModel":
        qs = []
        for r in rates:
            num, den = _exact_rate(r)
            qs.append(QueueArrivals(kind="deterministic", rate_num=num, rate_den=den))
        return cls(queues=tuple(qs))

    @classmethod
    def bernoulli_batch(cls, batches, probs) -> "ArrivalModel":
        if len(batches) != len(probs):
            raise ValidationError("dimension mismatch: batches vs probs")
        qs = []
        for b, q in zip(batches, probs):
            b = int(b)
            q = float(q)
            if b < 0 or not 0.0 <= q <= 1.0:
                raise ValidationError(f"bad bernoulli_batch parameters ({b}, {q})")
            qs.append(QueueArrivals(kind="bernoulli_batch", batch=b, prob=q))
        return cls(queues=tuple(qs))

    @classmethod
    def bounded_pmf(cls, pmfs) -> "ArrivalModel":
        qs = []
        for pmf in pmfs:
            pmf = tuple(float(x) for x in pmf)
            if any(x < 0 for x in pmf):
                raise ValidationError("negative probability in arrival pmf")
            if abs(sum(pmf) - 1.0) > 1e-12:
                raise ValidationError(f"pmf not normalized: sums to {sum(pmf)}")
            qs.append(QueueArrivals(kind="bounded_pmf", pmf=pmf))
        return cls(queues=tuple(qs))

    @property
    def N(self) -> int:
        return len(self.queues)

    def mean_rates(self) -> np.ndarray:
        return np.array([q.mean for q in self.queues])

    @property
    def a_max_sq(self) -> float:
        return max(q.mean_square for q in self.queues)

    def sample(self, rng: np.random.Generator, T: int) -> np.ndarray:
        """(T, N) integer arrivals for slots 1..T, one queue at a time."""
        out = np.empty((T, self.N), dtype=np.int64)
        for n, q in enumerate(self.queues):
            if q.kind == "deterministic":
                p, d = q.rate_num, q.rate_den
                out[:, n] = [(p * t) // d - (p * (t - 1)) // d for t in range(1, T + 1)]
            elif q.kind == "bernoulli_batch":
                out[:, n] = (rng.random(T) < q.prob) * q.batch
            else:
                pmf = np.asarray(q.pmf)
                out[:, n] = rng.choice(len(pmf), size=T, p=pmf / pmf.sum())
        return out

    def to_descriptor(self) -> dict:
        qs = []
        for q in self.queues:
            if q.kind == "deterministic":
                qs.append({"kind": "deterministic", "rate": q.rate_num / q.rate_den})
            elif q.kind == "bernoulli_batch":
                qs.append({"kind": "bernoulli_batch", "batch": q.batch, "prob": q.prob})
            else:
                qs.append({"kind": "bounded_pmf", "pmf": list(q.pmf)})
        return {"queues": qs}


def arrivals_from_descriptor(d: dict) -> ArrivalModel:
    qs = []
    for spec in d["queues"]:
        kind = spec["kind"]
        if kind == "deterministic":
            num, den = _exact_rate(spec["rate"])
            qs.append(QueueArrivals(kind=kind, rate_num=num, rate_den=den))
        elif kind == "bernoulli_batch":
            qs.append(QueueArrivals(kind=kind, batch=int(spec["batch"]), prob=float(spec["prob"])))
        elif kind == "bounded_pmf":
            qs.append(QueueArrivals(kind=kind, pmf=tuple(float(x) for x in spec["pmf"])))
        else:
            raise ValidationError(f"unknown arrival kind {kind!r}")
    return ArrivalModel(queues=tuple(qs))


# -- per-slot operations ---------------------------------------------------


def mw_allocate(X, C, tie_rule: str = "lowest_index") -> np.ndarray:
    """Max-weight allocation: server k to argmax_n X[n] * C[n, k].

    Every column sums to 1 -- servers are always assigned, even when all
    weights are zero (then the tie rule sends them to a fixed queue and
    the queue update wastes the capacity harmlessly).
    """
    X = np.asarray(X)
    C = np.asarray(C)
    if (X < 0).any():
        raise ValueError("queue lengths must be nonnegative")
    N, K = C.shape
    take_later = tie_rule == "highest_index"
    I = np.zeros((N, K), dtype=np.int64)
    for k in range(K):
        best, best_w = 0, X[0] * C[0, k]
        for n in range(1, N):
            w = X[n] * C[n, k]
            if w > best_w or (take_later and w == best_w):
                best, best_w = n, w
        I[best, k] = 1
    return I


def as_lcq_allocate(X, C, server_order=None) -> np.ndarray:
    """Longest-connected-queue allocation for ON-OFF channels.

    Servers are visited in ``server_order`` (default 0..K-1) and each goes
    to the connected queue (C[n, k] = 1) with the largest backlog at the
    start of the slot, ties to the lowest index; a server with no connected
    queue parks on queue 0 with zero effect.  For binary channels the
    delivered service per queue coincides with mw_allocate.
    """
    X = np.asarray(X)
    C = np.asarray(C)
    if not np.isin(C, (0, 1)).all():
        raise ValueError("longest-connected-queue requires a binary channel matrix")
    N, K = C.shape
    order = range(K) if server_order is None else server_order
    I = np.zeros((N, K), dtype=np.int64)
    for k in order:
        best, best_x = -1, -1
        for n in range(N):
            if C[n, k] and X[n] > best_x:
                best, best_x = n, X[n]
        I[max(best, 0), k] = 1
    return I


def step(X, C, I, A) -> tuple[np.ndarray, np.ndarray]:
    """One queue update; returns (next queue vector, departures).

    Offered service is summed per queue from the allocation, clipped at the
    backlog (the positive-part projection applies before arrivals), and
    arrivals are added at the end of the slot.
    """
    X = np.asarray(X, dtype=np.int64)
    A = np.asarray(A, dtype=np.int64)
    if (A < 0).any():
        raise ValueError("arrivals must be nonnegative")
    offered = (np.asarray(C) * np.asarray(I)).sum(axis=1)
    departures = np.minimum(X, offered)
    return X - departures + A, departures


def delay_bound(N: int, a_max_sq: float, M: int, K: int, delta: float) -> float:
    """Occupancy bound (N * a_max_sq + (M*K)^2) / (2 * delta) for interior rates."""
    if delta <= 0:
        raise ValueError("rate not strictly interior; bound undefined")
    return (N * a_max_sq + (M * K) ** 2) / (2.0 * delta)


# -- full runs --------------------------------------------------------------


@dataclass(frozen=True)
class SimStats:
    """Per-replication summary; every field is recomputable from the trace."""

    replication: int
    seed: int
    horizon: int
    avg_aggregate_occupancy: float
    per_queue_avg: tuple
    throughput: tuple
    final_queue: tuple
    total_arrivals: tuple
    total_departures: tuple


@dataclass(frozen=True)
class RunResult:
    replications: tuple
    trace: np.ndarray | None = None  # replication 0: columns t, X.., served.., arrived..

    def aggregate(self) -> dict:
        reps = self.replications
        R = len(reps)
        return {
            "avg_aggregate_occupancy": sum(s.avg_aggregate_occupancy for s in reps) / R,
            "per_queue_avgs": [
                sum(s.per_queue_avg[n] for s in reps) / R for n in range(len(reps[0].per_queue_avg))
            ],
            "throughput": [
                sum(s.throughput[n] for s in reps) / R for n in range(len(reps[0].throughput))
            ],
        }


def _simulate_one(model, arrivals, policy, T, seed, rep, tie_rule, server_order, record_trace):
    rng = np.random.default_rng(seed + rep)
    C_all = sample_states(model, rng, T)
    A_all = arrivals.sample(rng, T)
    N, K = model.N, model.K
    take_later = tie_rule == "highest_index"
    order = list(range(K)) if server_order is None else list(server_order)
    mw = policy == "mw"

    C_list = C_all.tolist()
    A_list = A_all.tolist()
    X = [0] * N
    occupancy_sum = 0
    per_queue_sum = [0] * N
    dep_total = [0] * N
    arr_total = [0] * N
    trace = np.empty((T, 1 + 3 * N), dtype=np.int64) if record_trace else None

    for t in range(T):
        C = C_list[t]
        A = A_list[t]
        served = [0] * N
        if mw:
            for k in range(K):
                best, best_w = 0, X[0] * C[0][k]
                for n in range(1, N):
                    w = X[n] * C[n][k]
                    if w > best_w or (take_later and w == best_w):
                        best, best_w = n, w
                served[best] += C[best][k]
        else:
            for k in order:
                best, best_x = -1, -1
                for n in range(N):
                    if C[n][k] and X[n] > best_x:
                        best, best_x = n, X[n]
                if best < 0:
                    best = 0
                served[best] += C[best][k]
        agg = 0
        for n in range(N):
            dep = served[n] if served[n] < X[n] else X[n]
            x = X[n] - dep + A[n]
            X[n] = x
            dep_total[n] += dep
            arr_total[n] += A[n]
            per_queue_sum[n] += x
            agg += x
            if record_trace:
                trace[t, 1 + n] = x
                trace[t, 1 + N + n] = dep
                trace[t, 1 + 2 * N + n] = A[n]
        occupancy_sum += agg
        if record_trace:
            trace[t, 0] = t + 1

    stats = SimStats(
        replication=rep,
        seed=seed,
        horizon=T,
        avg_aggregate_occupancy=occupancy_sum / T,
        per_queue_avg=tuple(s / T for s in per_queue_sum),
        throughput=tuple(d / T for d in dep_total),
        final_queue=tuple(X),
        total_arrivals=tuple(arr_total),
        total_departures=tuple(dep_total),
    )
    return stats, trace


def run(
    model: DiscreteChannelModel,
    arrivals: ArrivalModel,
    policy: str = "mw",
    T: int = 10_000,
    seed: int = 0,
    replications: int = 1,
    tie_rule: str = "lowest_index",
    server_order=None,
    threads: int = 1,
    record_trace: bool = False,
) -> RunResult:
    """Simulate T slots from empty queues, one rng stream per replication.

    Replication i uses ``default_rng(seed + i)`` and samples its whole
    channel block before its arrival block, so results are reproducible
    and independent of how replications are scheduled across threads.
    The trace (slot, queue lengths, departures, arrivals) is recorded for
    replication 0 only.
    """
    validate(model)
    if arrivals.N != model.N:
        raise ValidationError(f"dimension mismatch: {arrivals.N} arrival queues vs N={model.N}")
    if policy not in ("mw", "as_lcq"):
        raise ValueError(f"unknown policy {policy!r}")
    if policy == "as_lcq" and model.M > 1:
        raise ValidationError("as_lcq requires ON-OFF channels (M = 1)")
    if T < 1:
        raise ValueError("horizon must be at least one slot")

    def job(rep):
        return _simulate_one(
            model, arrivals, policy, T, seed, rep,
            tie_rule, server_order, record_trace and rep == 0,
        )

    if threads > 1 and replications > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, range(replications)))
    else:
        results = [job(rep) for rep in range(replications)]
    stats = tuple(s for s, _ in results)
    trace = results[0][1] if record_trace else None
    return RunResult(replications=stats, trace=trace)
