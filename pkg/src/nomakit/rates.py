"""Closed-form OMA and NOMA (SC-SIC) rates.

All SNRs are linear with the noise power normalized to one. Rates are in
bps/Hz and use the real-valued Gaussian capacity convention

    C(x) = RATE_SCALE * log2(1 + x),   RATE_SCALE = 1/2

throughout the package. The factor is a module constant on purpose: mixing
conventions between calls silently corrupts OMA vs NOMA comparisons.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import DomainError, OrderingError

RATE_SCALE = 0.5

# Largest weak-user rate loss when alpha * gamma2 <= NEGLIGIBLE_INTERFERENCE.
NEGLIGIBLE_INTERFERENCE = 0.1
WEAK_USER_LOSS_BOUND = RATE_SCALE * math.log2(1.0 + NEGLIGIBLE_INTERFERENCE)

SIMPLEX_TOL = 1e-12


def _check_real(name: str, x: float, lo: float | None = None, hi: float | None = None) -> float:
    try:
        x = float(x)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a real number, got {x!r}") from None
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x}")
    if lo is not None and x < lo:
        raise DomainError(f"{name} must be >= {lo}, got {x}")
    if hi is not None and x > hi:
        raise DomainError(f"{name} must be <= {hi}, got {x}")
    return x


@dataclass(frozen=True)
class ChannelGain:
    magnitude: float

    def __post_init__(self):
        object.__setattr__(self, "magnitude", _check_real("magnitude", self.magnitude, lo=0.0))

    def snr(self, power: float) -> float:
        return self.magnitude**2 * _check_real("power", power, lo=0.0)


@dataclass(frozen=True)
class SnrVector:
    """Received SNRs gamma_k = |h_k|^2 P, indexed by stable user ids."""

    gammas: tuple[float, ...]

    def __post_init__(self):
        gammas = tuple(_check_real(f"gamma[{i}]", g, lo=0.0) for i, g in enumerate(self.gammas))
        if not gammas:
            raise DomainError("SnrVector needs at least one user")
        object.__setattr__(self, "gammas", gammas)

    @classmethod
    def from_gains(cls, gains: Iterable[float], power: float) -> "SnrVector":
        return cls(tuple(ChannelGain(h).snr(power) for h in gains))

    def __len__(self):
        return len(self.gammas)

    def __iter__(self):
        return iter(self.gammas)

    def __getitem__(self, i):
        return self.gammas[i]


@dataclass(frozen=True)
class PowerSplit:
    """Power fractions on the unit simplex, one per user of a cluster."""

    alphas: tuple[float, ...]

    def __post_init__(self):
        alphas = tuple(_check_real(f"alpha[{i}]", a, 0.0, 1.0) for i, a in enumerate(self.alphas))
        if not alphas:
            raise DomainError("PowerSplit needs at least one entry")
        if abs(math.fsum(alphas) - 1.0) > SIMPLEX_TOL:
            raise DomainError(f"power fractions must sum to 1, got {math.fsum(alphas)!r}")
        object.__setattr__(self, "alphas", alphas)

    @classmethod
    def two_user(cls, alpha: float) -> "PowerSplit":
        alpha = _check_real("alpha", alpha, 0.0, 1.0)
        return cls((alpha, 1.0 - alpha))

    def __len__(self):
        return len(self.alphas)

    def __iter__(self):
        return iter(self.alphas)

    def __getitem__(self, i):
        return self.alphas[i]


@dataclass(frozen=True)
class TimeShare:
    """Time (or bandwidth) fractions for orthogonal access."""

    taus: tuple[float, ...]

    def __post_init__(self):
        taus = tuple(_check_real(f"tau[{i}]", t, 0.0, 1.0) for i, t in enumerate(self.taus))
        if not taus:
            raise DomainError("TimeShare needs at least one entry")
        if abs(math.fsum(taus) - 1.0) > SIMPLEX_TOL:
            raise DomainError(f"time shares must sum to 1, got {math.fsum(taus)!r}")
        object.__setattr__(self, "taus", taus)

    @classmethod
    def equal(cls, k: int) -> "TimeShare":
        return cls(tuple([1.0 / k] * k))

    def __len__(self):
        return len(self.taus)

    def __iter__(self):
        return iter(self.taus)


@dataclass(frozen=True)
class RateVector:
    rates: tuple[float, ...]

    def __post_init__(self):
        rates = tuple(_check_real(f"rate[{i}]", r, lo=0.0) for i, r in enumerate(self.rates))
        object.__setattr__(self, "rates", rates)

    @property
    def total(self) -> float:
        return math.fsum(self.rates)

    def __len__(self):
        return len(self.rates)

    def __iter__(self):
        return iter(self.rates)

    def __getitem__(self, i):
        return self.rates[i]


@dataclass(frozen=True)
class SicOrder:
    """Decoding order, decode-first to decode-last."""

    order: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.order) != list(range(len(self.order))):
            raise DomainError(f"SIC order must be a permutation, got {self.order}")

    def __iter__(self):
        return iter(self.order)

    def __len__(self):
        return len(self.order)

    def __getitem__(self, i):
        return self.order[i]


@dataclass(frozen=True)
class SicQuality:
    """Fraction epsilon of a cancelled signal's power left behind as interference."""

    epsilon: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "epsilon", _check_real("epsilon", self.epsilon, 0.0, 1.0))


SnrLike = Union[SnrVector, Sequence[float]]
SplitLike = Union[PowerSplit, Sequence[float]]
ShareLike = Union[TimeShare, Sequence[float]]


def _as_snrs(snrs: SnrLike) -> SnrVector:
    return snrs if isinstance(snrs, SnrVector) else SnrVector(tuple(snrs))


def _as_split(split: SplitLike) -> PowerSplit:
    return split if isinstance(split, PowerSplit) else PowerSplit(tuple(split))


def _as_shares(shares: ShareLike) -> TimeShare:
    return shares if isinstance(shares, TimeShare) else TimeShare(tuple(shares))


def _c(x: float) -> float:
    # unchecked C(x); every rate in the package goes through this
    return RATE_SCALE * math.log2(1.0 + x)


def shannon_rate(x: float) -> float:
    """C(x) = 1/2 log2(1 + x) for a linear SNR ``x >= 0``."""
    return _c(_check_real("snr", x, lo=0.0))


def _check_pair(g1: float, g2: float) -> tuple[float, float]:
    g1 = _check_real("gamma1", g1, lo=0.0)
    g2 = _check_real("gamma2", g2, lo=0.0)
    if g1 < g2:
        raise OrderingError(f"gamma1 must be >= gamma2 (got {g1} < {g2}); sort users or use noma_k_user")
    return g1, g2


def noma_two_user(g1: float, g2: float, alpha: float) -> tuple[float, float]:
    """Two-user SC-SIC rates with power fraction ``alpha`` on the strong user.

    User 1 (strong) cancels user 2's signal first; user 2 treats user 1's
    signal as noise.
    """
    g1, g2 = _check_pair(g1, g2)
    alpha = _check_real("alpha", alpha, 0.0, 1.0)
    r1 = _c(alpha * g1)
    r2 = _c((1.0 - alpha) * g2 / (alpha * g2 + 1.0))
    return r1, r2


def noma_two_user_imperfect(g1: float, g2: float, alpha: float, quality: SicQuality | float) -> tuple[float, float]:
    """Two-user rates when a fraction epsilon of user 2's power survives SIC at user 1."""
    g1, g2 = _check_pair(g1, g2)
    alpha = _check_real("alpha", alpha, 0.0, 1.0)
    eps = quality.epsilon if isinstance(quality, SicQuality) else SicQuality(quality).epsilon
    r1 = _c(alpha * g1 / (eps * (1.0 - alpha) * g1 + 1.0))
    r2 = _c((1.0 - alpha) * g2 / (alpha * g2 + 1.0))
    return r1, r2


def oma_two_user(g1: float, g2: float, tau: float) -> tuple[float, float]:
    """TDMA rates with a fraction ``tau`` of time given to user 1."""
    g1 = _check_real("gamma1", g1, lo=0.0)
    g2 = _check_real("gamma2", g2, lo=0.0)
    tau = _check_real("tau", tau, 0.0, 1.0)
    return tau * _c(g1), (1.0 - tau) * _c(g2)


def sic_order(snrs: SnrLike) -> SicOrder:
    """Decoding order by descending SNR, ties broken by ascending user index.

    Takes no power split: the order is a function of the SNRs alone.
    """
    snrs = _as_snrs(snrs)
    return SicOrder(tuple(sorted(range(len(snrs)), key=lambda k: (-snrs[k], k))))


def noma_k_user(snrs: SnrLike, split: SplitLike) -> RateVector:
    """K-user SC-SIC rates on a degraded broadcast channel.

    Sorted by descending SNR, user k sees the users ranked above it
    (stronger ones, already holding power fractions alpha_j) as noise and
    cancels everyone ranked below:

        R_k = C(alpha_k g_k / (1 + g_k * sum_{j ranked before k} alpha_j))

    Results come back in the caller's index order.
    """
    snrs = _as_snrs(snrs)
    split = _as_split(split)
    if len(snrs) != len(split):
        raise DomainError(f"got {len(snrs)} SNRs but {len(split)} power fractions")
    rates = [0.0] * len(snrs)
    stronger = 0.0
    for k in sic_order(snrs):
        g = snrs[k]
        rates[k] = _c(split[k] * g / (g * stronger + 1.0))
        stronger += split[k]
    return RateVector(tuple(rates))


def oma_k_user(snrs: SnrLike, shares: ShareLike) -> RateVector:
    snrs = _as_snrs(snrs)
    shares = _as_shares(shares)
    if len(snrs) != len(shares):
        raise DomainError(f"got {len(snrs)} SNRs but {len(shares)} time shares")
    return RateVector(tuple(t * _c(g) for g, t in zip(snrs, shares)))


def negligibility_threshold(g2: float) -> float:
    """Largest alpha with alpha * g2 <= 0.1, clipped to [0, 1].

    Below it the weak user loses at most WEAK_USER_LOSS_BOUND bps/Hz relative
    to decoding without interference. ``g2 == 0`` returns 1.
    """
    g2 = _check_real("gamma2", g2, lo=0.0)
    if g2 == 0.0:
        return 1.0
    return min(1.0, NEGLIGIBLE_INTERFERENCE / g2)


def weak_user_loss(g2: float, alpha: float) -> float:
    """Rate the weak user gives up to inter-user interference at split ``alpha``."""
    g2 = _check_real("gamma2", g2, lo=0.0)
    alpha = _check_real("alpha", alpha, 0.0, 1.0)
    clean = _c((1.0 - alpha) * g2)
    return clean - _c((1.0 - alpha) * g2 / (alpha * g2 + 1.0))
