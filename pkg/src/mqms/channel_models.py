"""Stationary channel-state models for an N-queue, K-server link system.

A channel state is an N x K matrix of per-link capacities in packets/slot.
Discrete models carry integer capacities in {0, ..., M} and support exact
enumeration of the joint state space; continuous models carry nonnegative
real capacities sampled per link.  Models are immutable after construction
and safe to share across threads; all sampling goes through a caller-owned
``numpy.random.Generator`` so runs are reproducible.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass

import numpy as np

PMF_TOL = 1e-12
DEFAULT_STATE_CAP = 10_000_000


class ValidationError(ValueError):
    """A model violates one of its structural invariants."""


def _as_tuple2(rows) -> tuple:
    return tuple(tuple(float(x) for x in row) for row in rows)


@dataclass(frozen=True)
class DiscreteChannelModel:
    """Joint distribution of the N x K integer capacity matrix.

    kind is one of:
      * ``"explicit_joint"`` -- an explicit list of (matrix, probability)
        pairs; ``states`` holds them with matrices as nested int tuples.
      * ``"factored"`` -- every link (n, k) has its own pmf over
        {0, ..., M} and links are mutually independent; ``pmfs[n][k]`` is
        the pmf as a length-(M+1) tuple.
      * ``"bernoulli"`` -- ON-OFF links: capacity 1 with probability
        ``p[n][k]``, else 0, links independent, M = 1.  A dedicated kind
        (rather than factored with M = 1) so closed-form region formulas
        can be dispatched on it.
    """

    N: int
    K: int
    M: int
    kind: str
    states: tuple = ()   # explicit_joint only
    pmfs: tuple = ()     # factored only
    p: tuple = ()        # bernoulli only

    # -- constructors ----------------------------------------------------

    @classmethod
    def bernoulli(cls, p) -> "DiscreteChannelModel":
        """ON-OFF model from an N x K matrix of success probabilities."""
        p = _as_tuple2(p)
        model = cls(N=len(p), K=len(p[0]) if p else 0, M=1, kind="bernoulli", p=p)
        validate(model)
        return model

    @classmethod
    def factored(cls, pmfs) -> "DiscreteChannelModel":
        """Independent-link model; ``pmfs[n][k]`` is a pmf over {0..M}."""
        pmfs = tuple(tuple(tuple(float(q) for q in link) for link in row) for row in pmfs)
        N = len(pmfs)
        K = len(pmfs[0]) if N else 0
        lengths = {len(link) for row in pmfs for link in row}
        if len(lengths) != 1:
            raise ValidationError("dimension mismatch: link pmfs have unequal lengths")
        M = lengths.pop() - 1
        model = cls(N=N, K=K, M=M, kind="factored", pmfs=pmfs)
        validate(model)
        return model

    @classmethod
    def explicit_joint(cls, states, M: int | None = None) -> "DiscreteChannelModel":
        """Explicit joint model from (matrix, probability) pairs.

        Zero-probability states are dropped here so downstream enumeration
        never carries them.  M defaults to the largest entry seen.
        """
        cleaned = []
        for C, prob in states:
            prob = float(prob)
            if prob < 0:
                raise ValidationError(f"negative probability {prob}")
            if prob == 0.0:
                continue
            mat = tuple(tuple(int(x) for x in row) for row in C)
            cleaned.append((mat, prob))
        if not cleaned:
            raise ValidationError("explicit_joint model has no positive-probability states")
        N = len(cleaned[0][0])
        K = len(cleaned[0][0][0])
        if M is None:
            M = max(x for mat, _ in cleaned for row in mat for x in row)
            M = max(M, 1)
        model = cls(N=N, K=K, M=int(M), kind="explicit_joint", states=tuple(cleaned))
        validate(model)
        return model


@dataclass(frozen=True)
class LinkDistribution:
    """Distribution of one continuous link capacity.

    kind: "exponential" (scale = mean), "uniform" (on [0, high]), or
    "empirical" (resampled uniformly from a table of observed values).
    """

    kind: str
    mean: float = 0.0
    high: float = 0.0
    values: tuple = ()

    def expected_value(self) -> float:
        if self.kind == "exponential":
            return self.mean
        if self.kind == "uniform":
            return self.high / 2.0
        if self.kind == "empirical":
            return float(np.mean(self.values))
        raise ValidationError(f"unknown link distribution kind {self.kind!r}")


@dataclass(frozen=True)
class ContinuousChannelModel:
    """Independent continuous capacities per link, for the fluid model."""

    N: int
    K: int
    kind: str = "continuous"
    links: tuple = ()  # links[n][k] is a LinkDistribution

    @classmethod
    def of(cls, links) -> "ContinuousChannelModel":
        links = tuple(tuple(row) for row in links)
        model = cls(N=len(links), K=len(links[0]) if links else 0, links=links)
        validate(model)
        return model

    def link_means(self) -> np.ndarray:
        return np.array(
            [[self.links[n][k].expected_value() for k in range(self.K)] for n in range(self.N)]
        )


# -- validation ----------------------------------------------------------


def validate(model) -> None:
    """Check every structural invariant; raise ValidationError on the first violation."""
    if model.N < 1 or model.K < 1:
        raise ValidationError(f"dimension mismatch: need N >= 1 and K >= 1, got ({model.N}, {model.K})")

    if isinstance(model, ContinuousChannelModel):
        _validate_continuous(model)
        return
    if model.kind == "bernoulli":
        _check_grid_shape(model.p, model.N, model.K)
        for row in model.p:
            for q in row:
                if not 0.0 <= q <= 1.0:
                    raise ValidationError(f"negative probability or >1: p={q}")
    elif model.kind == "factored":
        _check_grid_shape(model.pmfs, model.N, model.K)
        for n, row in enumerate(model.pmfs):
            for k, pmf in enumerate(row):
                if len(pmf) != model.M + 1:
                    raise ValidationError(f"dimension mismatch: link ({n},{k}) pmf length {len(pmf)}")
                if any(q < 0 for q in pmf):
                    raise ValidationError(f"negative probability in link ({n},{k}) pmf")
                if abs(sum(pmf) - 1.0) > PMF_TOL:
                    raise ValidationError(f"pmf not normalized: link ({n},{k}) sums to {sum(pmf)}")
    elif model.kind == "explicit_joint":
        total = 0.0
        seen = set()
        for mat, prob in model.states:
            if prob < 0:
                raise ValidationError(f"negative probability {prob}")
            if len(mat) != model.N or any(len(row) != model.K for row in mat):
                raise ValidationError("dimension mismatch: state matrix shape differs from (N, K)")
            for row in mat:
                for x in row:
                    if x < 0 or x > model.M:
                        raise ValidationError(f"capacity {x} outside {{0..{model.M}}}")
            if mat in seen:
                raise ValidationError("duplicate state matrix in explicit_joint model")
            seen.add(mat)
            total += prob
        if abs(total - 1.0) > PMF_TOL:
            raise ValidationError(f"pmf not normalized: state probabilities sum to {total}")
    else:
        raise ValidationError(f"unknown model kind {model.kind!r}")
    if model.M < 1:
        raise ValidationError(f"max capacity M must be >= 1, got {model.M}")


def _check_grid_shape(grid, N, K) -> None:
    if len(grid) != N or any(len(row) != K for row in grid):
        raise ValidationError("dimension mismatch: grid shape differs from (N, K)")


def _validate_continuous(model: ContinuousChannelModel) -> None:
    _check_grid_shape(model.links, model.N, model.K)
    for n, row in enumerate(model.links):
        for k, d in enumerate(row):
            if d.kind == "exponential":
                if d.mean <= 0:
                    raise ValidationError(f"link ({n},{k}) exponential mean must be > 0")
            elif d.kind == "uniform":
                if d.high <= 0:
                    raise ValidationError(f"link ({n},{k}) uniform upper bound must be > 0")
            elif d.kind == "empirical":
                if len(d.values) == 0:
                    raise ValidationError(f"link ({n},{k}) empirical table is empty")
                if any(v < 0 for v in d.values):
                    raise ValidationError(f"link ({n},{k}) empirical table has negative values")
            else:
                raise ValidationError(f"unknown link distribution kind {d.kind!r}")


# -- enumeration ---------------------------------------------------------


def _link_supports(model: DiscreteChannelModel):
    """Per-link (values, probs) with zero-probability atoms removed, row-major."""
    supports = []
    for n in range(model.N):
        for k in range(model.K):
            if model.kind == "bernoulli":
                q = model.p[n][k]
                pmf = [1.0 - q, q]
            else:
                pmf = model.pmfs[n][k]
            pairs = [(v, pr) for v, pr in enumerate(pmf) if pr > 0.0]
            supports.append(pairs)
    return supports


def enumerate_states(model: DiscreteChannelModel, cap: int = DEFAULT_STATE_CAP):
    """Exact joint pmf of the channel matrix as a list of (matrix, probability).

    Factored and bernoulli models are expanded as products of their link
    pmfs; zero-probability states are omitted.  Matrices are returned as
    int arrays of shape (N, K).  Raises ValidationError when the joint
    state space exceeds ``cap``.
    """
    validate(model)
    if model.kind == "explicit_joint":
        if len(model.states) > cap:
            raise ValidationError(f"state-space cap exceeded: {len(model.states)} > {cap}")
        return [(np.array(mat, dtype=np.int64), prob) for mat, prob in model.states]

    supports = _link_supports(model)
    count = 1
    for pairs in supports:
        count *= len(pairs)
        if count > cap:
            raise ValidationError(f"state-space cap exceeded: > {cap} joint states")
    out = []
    N, K = model.N, model.K
    for combo in itertools.product(*supports):
        prob = 1.0
        for _, pr in combo:
            prob *= pr
        mat = np.fromiter((v for v, _ in combo), dtype=np.int64, count=N * K).reshape(N, K)
        out.append((mat, prob))
    return out


def per_server_column_distribution(model: DiscreteChannelModel, k: int, cap: int = DEFAULT_STATE_CAP):
    """Exact joint pmf of the capacity column (C[0,k], ..., C[N-1,k]).

    Only defined for factored and bernoulli models, whose links are
    independent, so any per-server expectation can be taken against this
    column law alone.  Returns a list of (tuple of length N, probability).
    """
    validate(model)
    if model.kind == "explicit_joint":
        raise ValidationError("per-server column law undefined for explicit_joint; use enumerate_states")
    if not 0 <= k < model.K:
        raise ValidationError(f"server index {k} out of range for K={model.K}")
    supports = _link_supports(model)
    col_supports = [supports[n * model.K + k] for n in range(model.N)]
    count = 1
    for pairs in col_supports:
        count *= len(pairs)
        if count > cap:
            raise ValidationError(f"state-space cap exceeded: > {cap} column states")
    out = []
    for combo in itertools.product(*col_supports):
        prob = 1.0
        for _, pr in combo:
            prob *= pr
        out.append((tuple(v for v, _ in combo), prob))
    return out


def link_means(model) -> np.ndarray:
    """E[C[n,k]] for every link, as an (N, K) array."""
    if isinstance(model, ContinuousChannelModel):
        return model.link_means()
    validate(model)
    if model.kind == "bernoulli":
        return np.array(model.p, dtype=float)
    if model.kind == "factored":
        vals = np.arange(model.M + 1)
        return np.array(
            [[float(np.dot(model.pmfs[n][k], vals)) for k in range(model.K)] for n in range(model.N)]
        )
    means = np.zeros((model.N, model.K))
    for mat, prob in model.states:
        means += prob * np.array(mat, dtype=float)
    return means


# -- sampling ------------------------------------------------------------


def sample_states(model, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` i.i.d. channel matrices; shape (size, N, K).

    Slots are sampled independently from the stationary law (the models
    carry no temporal correlation).  Links are filled in fixed row-major
    order so a given generator state always produces the same block.
    """
    N, K = model.N, model.K
    if isinstance(model, ContinuousChannelModel):
        out = np.empty((size, N, K), dtype=float)
        for n in range(N):
            for k in range(K):
                d = model.links[n][k]
                if d.kind == "exponential":
                    out[:, n, k] = rng.exponential(d.mean, size)
                elif d.kind == "uniform":
                    out[:, n, k] = rng.uniform(0.0, d.high, size)
                else:
                    out[:, n, k] = rng.choice(np.asarray(d.values, dtype=float), size=size)
        return out

    if model.kind == "bernoulli":
        p = np.array(model.p, dtype=float)
        return (rng.random((size, N, K)) < p).astype(np.int64)
    if model.kind == "factored":
        out = np.empty((size, N, K), dtype=np.int64)
        for n in range(N):
            for k in range(K):
                pmf = np.asarray(model.pmfs[n][k], dtype=float)
                out[:, n, k] = rng.choice(model.M + 1, size=size, p=pmf / pmf.sum())
        return out
    probs = np.array([pr for _, pr in model.states])
    mats = np.array([mat for mat, _ in model.states], dtype=np.int64)
    idx = rng.choice(len(probs), size=size, p=probs / probs.sum())
    return mats[idx]


def sample_state(model, rng: np.random.Generator) -> np.ndarray:
    """Draw one channel matrix; shape (N, K)."""
    return sample_states(model, rng, 1)[0]


# -- JSON descriptors ----------------------------------------------------


def to_descriptor(model) -> dict:
    """JSON-ready description: {"N", "K", "kind", ...kind-specific fields}."""
    if isinstance(model, ContinuousChannelModel):
        links = [
            [_link_descriptor(model.links[n][k]) for k in range(model.K)]
            for n in range(model.N)
        ]
        return {"N": model.N, "K": model.K, "kind": "continuous", "links": links}
    d = {"N": model.N, "K": model.K, "kind": model.kind}
    if model.kind == "bernoulli":
        d["p"] = [list(row) for row in model.p]
    elif model.kind == "factored":
        d["pmfs"] = [[list(link) for link in row] for row in model.pmfs]
    else:
        d["M"] = model.M
        d["states"] = [{"C": [list(r) for r in mat], "prob": prob} for mat, prob in model.states]
    return d


def _link_descriptor(d: LinkDistribution) -> dict:
    if d.kind == "exponential":
        return {"dist": "exponential", "mean": d.mean}
    if d.kind == "uniform":
        return {"dist": "uniform", "high": d.high}
    return {"dist": "empirical", "values": list(d.values)}


def from_descriptor(d: dict):
    """Build and validate a model from its JSON descriptor."""
    try:
        kind = d["kind"]
    except (KeyError, TypeError):
        raise ValidationError("descriptor missing 'kind'") from None
    if kind == "bernoulli":
        return DiscreteChannelModel.bernoulli(d["p"])
    if kind == "factored":
        return DiscreteChannelModel.factored(d["pmfs"])
    if kind == "explicit_joint":
        states = [(s["C"], s["prob"]) for s in d["states"]]
        return DiscreteChannelModel.explicit_joint(states, M=d.get("M"))
    if kind == "continuous":
        links = []
        for row in d["links"]:
            built = []
            for spec in row:
                dist = spec["dist"]
                if dist == "exponential":
                    built.append(LinkDistribution("exponential", mean=float(spec["mean"])))
                elif dist == "uniform":
                    built.append(LinkDistribution("uniform", high=float(spec["high"])))
                elif dist == "empirical":
                    built.append(LinkDistribution("empirical", values=tuple(float(v) for v in spec["values"])))
                else:
                    raise ValidationError(f"unknown link distribution kind {dist!r}")
            links.append(built)
        return ContinuousChannelModel.of(links)
    raise ValidationError(f"unknown model kind {kind!r}")


def load_model(path):
    with open(path) as fh:
        return from_descriptor(json.load(fh))


def descriptor_hash(model) -> str:
    """Stable 16-hex-digit digest of the model descriptor."""
    blob = json.dumps(to_descriptor(model), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
