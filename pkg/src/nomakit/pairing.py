"""User pairing strategies and cluster-level rate evaluation.

Built-in strategies form clusters of two (odd K leaves one singleton). Users
inside a cluster share its band non-orthogonally; clusters get orthogonal
fractions of the bandwidth.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import DomainError
from .rates import SIMPLEX_TOL, RateVector, SnrLike, _as_snrs, noma_k_user, sic_order

StrategyKind = Literal["max_disparity", "adjacent", "random"]


@dataclass(frozen=True)
class PairingStrategy:
    kind: StrategyKind
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("max_disparity", "adjacent", "random"):
            raise DomainError(f"unknown pairing strategy {self.kind!r}")
        if self.kind == "random" and self.seed is None:
            raise DomainError("random pairing needs an explicit seed")

    @classmethod
    def random(cls, seed: int) -> "PairingStrategy":
        return cls("random", seed)


MAX_DISPARITY = PairingStrategy("max_disparity")
ADJACENT = PairingStrategy("adjacent")


@dataclass(frozen=True)
class Pairing:
    """Disjoint clusters covering users 0..K-1, each ordered strongest first."""

    clusters: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        members = [u for c in self.clusters for u in c]
        if any(len(c) == 0 for c in self.clusters):
            raise DomainError("clusters must be non-empty")
        if sorted(members) != list(range(len(members))):
            raise DomainError(f"clusters {self.clusters} do not partition the users")

    @property
    def n_users(self) -> int:
        return sum(len(c) for c in self.clusters)


def pair_users(snrs: SnrLike, strategy: PairingStrategy) -> Pairing:
    snrs = _as_snrs(snrs)
    ranked = list(sic_order(snrs))
    k = len(ranked)
    if strategy.kind == "max_disparity":
        clusters = [(ranked[i], ranked[k - 1 - i]) for i in range(k // 2)]
        if k % 2:
            clusters.append((ranked[k // 2],))
    elif strategy.kind == "adjacent":
        clusters = [(ranked[i], ranked[i + 1]) for i in range(0, k - 1, 2)]
        if k % 2:
            clusters.append((ranked[-1],))
    else:
        perm = [int(u) for u in np.random.default_rng(strategy.seed).permutation(k)]
        clusters = [tuple(perm[i:i + 2]) for i in range(0, k, 2)]
    # strongest first inside each cluster
    rank = {u: r for r, u in enumerate(ranked)}
    return Pairing(tuple(tuple(sorted(c, key=rank.__getitem__)) for c in clusters))


def jain_index(rates: Sequence[float]) -> float:
    """(sum r)^2 / (K * sum r^2); 1.0 for an all-zero vector."""
    r = np.asarray(rates, dtype=float)
    if r.size == 0:
        raise DomainError("Jain index of an empty rate vector")
    sq = float(np.sum(r * r))
    if sq == 0.0:
        return 1.0
    return float(np.sum(r)) ** 2 / (r.size * sq)


@dataclass(frozen=True)
class PairingEvaluation:
    rates: RateVector
    sum_rate: float
    jain_index: float


def evaluate_pairing(
    snrs: SnrLike,
    pairing: Pairing,
    splits: Sequence[Sequence[float]],
    band_fractions: Sequence[float],
) -> PairingEvaluation:
    """Per-user rates when each cluster runs SC-SIC on its own bandwidth fraction.

    ``splits[c]`` lists power fractions aligned with ``pairing.clusters[c]``.
    """
    snrs = _as_snrs(snrs)
    if pairing.n_users != len(snrs):
        raise DomainError(f"pairing covers {pairing.n_users} users but {len(snrs)} SNRs given")
    if len(splits) != len(pairing.clusters) or len(band_fractions) != len(pairing.clusters):
        raise DomainError("need one power split and one band fraction per cluster")
    fracs = [float(f) for f in band_fractions]
    if any(not (0.0 <= f <= 1.0) for f in fracs) or abs(math.fsum(fracs) - 1.0) > SIMPLEX_TOL:
        raise DomainError(f"band fractions must lie on the simplex, got {fracs}")

    rates = [0.0] * len(snrs)
    for cluster, split, frac in zip(pairing.clusters, splits, fracs):
        sub = noma_k_user([snrs[u] for u in cluster], split)
        for u, r in zip(cluster, sub):
            rates[u] = frac * r
    total = math.fsum(rates)
    return PairingEvaluation(RateVector(tuple(rates)), total, jain_index(rates))
