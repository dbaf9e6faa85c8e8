"""The stability-region polytope of a discrete channel model.

For a direction ``alpha >= 0`` the region's support value is

    h(alpha) = sum_s pi_s sum_k max_n alpha[n] * C_s[n, k],

because the best server allocation for a fixed state assigns every server
independently to the queue maximizing its weighted capacity.  One
inequality ``alpha . rate <= h(alpha)`` per canonical direction describes
the full region.  This module computes support values and the rate points
attaining them, assembles the inequality list, and evaluates membership
margins used both for verdicts and for occupancy bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .alpha_sets import build_vhat
from .channel_models import (
    DiscreteChannelModel,
    ValidationError,
    DEFAULT_STATE_CAP,
    descriptor_hash,
    enumerate_states,
    per_server_column_distribution,
    validate,
)

BRUTE_FORCE_CAP = 4096


@dataclass(frozen=True)
class StabilityRegion:
    """Finite inequality description {rate >= 0 : alpha . rate <= beta}.

    ``inequalities`` holds (alpha, beta) pairs with alpha an integer tuple
    and beta in packets/slot; ``provenance`` is the descriptor hash of the
    generating model.
    """

    N: int
    inequalities: tuple
    provenance: str = ""

    def margin(self, rates) -> float:
        return membership_margin(self, rates)

    def verdict(self, rates, tol: float = 1e-9) -> str:
        delta = self.margin(rates)
        if delta > tol:
            return "interior"
        if delta < -tol:
            return "outside"
        return "boundary"

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "inequalities": [
                {"alpha": list(alpha), "beta": beta} for alpha, beta in self.inequalities
            ],
            "provenance": self.provenance,
        }


def _check_direction(alpha, N: int) -> np.ndarray:
    a = np.asarray(alpha, dtype=float)
    if a.shape != (N,):
        raise ValueError(f"direction must have length {N}, got shape {a.shape}")
    if (a < 0).any():
        raise ValueError("direction coordinates must be nonnegative")
    if not a.any():
        raise ValueError("zero vector is not a direction")
    return a


def support_function(model: DiscreteChannelModel, alpha, cap: int = DEFAULT_STATE_CAP) -> float:
    """Largest value of alpha . rate over the region.

    Factored and bernoulli models are evaluated per server against the
    exact column law (cost K * (M+1)^N); explicit models sum over their
    joint states.
    """
    validate(model)
    a = _check_direction(alpha, model.N)
    if model.kind == "explicit_joint":
        total = 0.0
        for mat, prob in model.states:
            C = np.asarray(mat, dtype=float)
            total += prob * float((a[:, None] * C).max(axis=0).sum())
        return total
    total = 0.0
    for k in range(model.K):
        for col, prob in per_server_column_distribution(model, k, cap=cap):
            best = 0.0
            for n in range(model.N):
                w = a[n] * col[n]
                if w > best:
                    best = w
            total += prob * best
    return total


def _winner(weights, tie_rule: str) -> int:
    take_later = tie_rule == "highest_index"
    best, best_w = 0, weights[0]
    for n in range(1, len(weights)):
        w = weights[n]
        if w > best_w or (take_later and w == best_w):
            best, best_w = n, w
    return best


def support_vertex(
    model: DiscreteChannelModel,
    alpha,
    tie_rule: str = "lowest_index",
    cap: int = DEFAULT_STATE_CAP,
) -> np.ndarray:
    """Expected per-queue service under the allocation maximizing alpha-weight.

    Every server in every state goes to the queue with the largest
    alpha[n] * capacity, ties broken deterministically by ``tie_rule``.
    The returned rate point r satisfies alpha . r = support_function(alpha)
    and lies in the region.
    """
    validate(model)
    a = _check_direction(alpha, model.N)
    if tie_rule not in ("lowest_index", "highest_index"):
        raise ValueError(f"unknown tie rule {tie_rule!r}")
    r = np.zeros(model.N)
    if model.kind == "explicit_joint":
        for mat, prob in model.states:
            for k in range(model.K):
                col = [mat[n][k] for n in range(model.N)]
                n_star = _winner([a[n] * col[n] for n in range(model.N)], tie_rule)
                r[n_star] += prob * col[n_star]
        return r
    for k in range(model.K):
        for col, prob in per_server_column_distribution(model, k, cap=cap):
            n_star = _winner([a[n] * col[n] for n in range(model.N)], tie_rule)
            r[n_star] += prob * col[n_star]
    return r


def onoff_support(p, queue_subset) -> float:
    """Closed-form support of an ON-OFF model in an indicator direction.

    For independent 0/1 links with success matrix p and a nonempty queue
    set Q, the support equals K - sum_k prod_{n in Q} (1 - p[n, k]): each
    server contributes the probability that at least one queue in Q sees
    an ON link.
    """
    p = np.asarray(p, dtype=float)
    Q = sorted(set(int(n) for n in queue_subset))
    if not Q:
        raise ValueError("queue subset must be nonempty")
    N, K = p.shape
    if Q[0] < 0 or Q[-1] >= N:
        raise ValueError("queue subset out of range")
    off = np.prod(1.0 - p[Q, :], axis=0)
    return float(K - off.sum())


def onoff_region(p) -> StabilityRegion:
    """Exact region of an ON-OFF model: 2^N - 1 subset-sum inequalities.

    For every nonempty queue set Q:  sum_{n in Q} rate_n <= onoff_support(p, Q),
    encoded with the 0/1 indicator of Q as the direction.
    """
    p = np.asarray(p, dtype=float)
    if (p < 0).any() or (p > 1).any():
        raise ValidationError("negative probability or >1 in ON-OFF matrix")
    N = p.shape[0]
    ineqs = []
    for mask in range(1, 2**N):
        alpha = tuple((mask >> n) & 1 for n in range(N))
        Q = [n for n in range(N) if alpha[n]]
        ineqs.append((alpha, onoff_support(p, Q)))
    ineqs.sort(key=lambda ab: ab[0])
    model = DiscreteChannelModel.bernoulli(p.tolist())
    return StabilityRegion(N=N, inequalities=tuple(ineqs), provenance=descriptor_hash(model))


def build_region(
    model: DiscreteChannelModel,
    method: str = "auto",
    cap: int = DEFAULT_STATE_CAP,
) -> StabilityRegion:
    """Assemble the full inequality list for a discrete model.

    method "vhat" evaluates the support function over every canonical
    direction; "onoff" uses the bernoulli closed form (2^N - 1 subset
    inequalities, identical direction set since M = 1); "auto" picks
    "onoff" for bernoulli models and "vhat" otherwise.
    """
    validate(model)
    if method == "auto":
        method = "onoff" if model.kind == "bernoulli" else "vhat"
    if method == "onoff":
        if model.kind != "bernoulli":
            raise ValidationError("onoff fast path requires a bernoulli model")
        return onoff_region(np.array(model.p))
    if method != "vhat":
        raise ValueError(f"unknown region method {method!r}")
    directions = build_vhat(model.M, model.N, cap=cap)
    ineqs = tuple((alpha, support_function(model, alpha, cap=cap)) for alpha in directions)
    return StabilityRegion(N=model.N, inequalities=ineqs, provenance=descriptor_hash(model))


def membership_margin(region: StabilityRegion, rates) -> float:
    """Largest uniform increase keeping rates + delta * 1 inside the region.

    delta = min over inequalities of (beta - alpha . rates) / sum(alpha);
    positive means strictly interior, zero on the boundary, negative
    outside.  This is the slack that drives the occupancy bound.
    """
    lam = np.asarray(rates, dtype=float)
    if lam.shape != (region.N,):
        raise ValueError(f"rate point must have length {region.N}")
    if (lam < 0).any():
        raise ValueError("rates must be nonnegative")
    if not region.inequalities:
        raise ValueError("region has no inequalities")
    delta = np.inf
    for alpha, beta in region.inequalities:
        a = np.asarray(alpha, dtype=float)
        delta = min(delta, (beta - float(a @ lam)) / float(a.sum()))
    return float(delta)


def brute_force_support(
    model: DiscreteChannelModel,
    alpha,
    state_cap: int = BRUTE_FORCE_CAP,
    alloc_cap: int = BRUTE_FORCE_CAP,
) -> float:
    """Independent oracle for support_function: try every allocation matrix.

    Enumerates all joint channel states and, per state, the value of all
    N^K allocation matrices (every server-to-queue assignment), then takes
    the literal maximum.  No per-server decomposition is used, so this
    cross-checks the fast path.  Only for small instances.
    """
    validate(model)
    a = _check_direction(alpha, model.N)
    n_alloc = model.N ** model.K
    if n_alloc > alloc_cap:
        raise ValidationError(f"allocation cap exceeded: N^K = {n_alloc} > {alloc_cap}")
    states = enumerate_states(model, cap=state_cap)
    total = 0.0
    for mat, prob in states:
        weighted = a[:, None] * np.asarray(mat, dtype=float)  # (N, K)
        # cartesian sums over one column choice per server = all allocations
        sums = reduce(np.add.outer, [weighted[:, k] for k in range(model.K)])
        total += prob * float(sums.max())
    return total
