"""Two-user power allocation: sum rate, weighted sum rate and QoS intervals.

Weighted sum rate R1 + mu*R2 is concave in alpha for mu > 1 and its
derivative is proportional to

    g1 / (1 + alpha*g1) - mu * g2 / (1 + alpha*g2)

so the optimum is the clipped root of that expression. For mu <= 1 and
g1 > g2 the derivative is positive on [0, 1] and alpha* = 1.

QoS intervals are two-user only; with three or more users the feasible set
of splits is not an interval.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError
from .rates import _check_pair, _check_real, noma_two_user, shannon_rate

# Slack for re-checking interval endpoints against the rate formulas.
_VERIFY_SLACK = 1e-9


@dataclass(frozen=True)
class Allocation:
    alpha: float
    rates: tuple[float, float]
    degenerate: bool = False

    @property
    def sum_rate(self) -> float:
        return self.rates[0] + self.rates[1]


@dataclass(frozen=True)
class QosRequirement:
    min_rates: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "min_rates",
            tuple(_check_real(f"r[{i}]", r, lo=0.0) for i, r in enumerate(self.min_rates)),
        )


@dataclass(frozen=True)
class FeasibleInterval:
    lo: float | None
    hi: float | None

    def __post_init__(self):
        if (self.lo is None) != (self.hi is None):
            raise DomainError("an interval is either empty (both None) or has both endpoints")
        if self.lo is not None and not (0.0 <= self.lo <= self.hi <= 1.0):
            raise DomainError(f"need 0 <= lo <= hi <= 1, got [{self.lo}, {self.hi}]")

    @classmethod
    def empty(cls) -> "FeasibleInterval":
        return cls(None, None)

    @property
    def is_empty(self) -> bool:
        return self.lo is None

    def __contains__(self, alpha: float) -> bool:
        return not self.is_empty and self.lo <= alpha <= self.hi

    def to_dict(self) -> dict:
        return {"empty": self.is_empty, "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class FairnessWeight:
    mu: float

    def __post_init__(self):
        mu = _check_real("mu", self.mu)
        if mu <= 0.0:
            raise DomainError(f"mu must be positive, got {mu}")
        object.__setattr__(self, "mu", mu)


def max_sum_rate(g1: float, g2: float) -> Allocation:
    """Sum-rate optimum: all power to the strong user.

    With equal gains every alpha gives the same sum; alpha = 1 is returned
    with ``degenerate`` set.
    """
    g1, g2 = _check_pair(g1, g2)
    return Allocation(1.0, noma_two_user(g1, g2, 1.0), degenerate=(g1 == g2))


def wsr_alpha(g1: float, g2: float, mu: float) -> float:
    """Closed-form maximizer of R1 + mu*R2 over alpha in [0, 1]."""
    if mu <= 1.0 or g2 == 0.0:
        return 1.0
    if g1 == g2:
        return 0.0
    a = (mu * g2 - g1) / (g1 * g2 * (1.0 - mu))
    return min(1.0, max(0.0, a))


def max_weighted_sum_rate(g1: float, g2: float, mu: FairnessWeight | float) -> Allocation:
    """Maximize R1 + mu*R2.

    Equal gains flag the result as degenerate: every alpha is optimal for
    mu = 1, otherwise the optimum sits on a boundary alpha.
    """
    g1, g2 = _check_pair(g1, g2)
    mu = mu.mu if isinstance(mu, FairnessWeight) else FairnessWeight(mu).mu
    alpha = wsr_alpha(g1, g2, mu)
    return Allocation(alpha, noma_two_user(g1, g2, alpha), degenerate=(g1 == g2))


def mu_for_alpha(g1: float, g2: float, alpha: float) -> float:
    """Weight whose weighted-sum-rate optimum is the interior split ``alpha``."""
    g1, g2 = _check_pair(g1, g2)
    alpha = _check_real("alpha", alpha, 0.0, 1.0)
    if alpha in (0.0, 1.0):
        raise DomainError("boundary alpha has no unique finite weight")
    if g2 == 0.0:
        raise DomainError("gamma2 must be positive")
    return (g1 / (1.0 + alpha * g1)) / (g2 / (1.0 + alpha * g2))


def qos_interval(g1: float, g2: float, req: QosRequirement | Sequence[float]) -> FeasibleInterval:
    """Range of alpha meeting R1 >= r1 and R2 >= r2 for two users.

    R1 is increasing and R2 decreasing in alpha, so the constraints give a
    lower and an upper endpoint respectively.
    """
    g1, g2 = _check_pair(g1, g2)
    if not isinstance(req, QosRequirement):
        req = QosRequirement(tuple(req))
    if len(req.min_rates) != 2:
        raise DomainError("qos_interval handles exactly two users")
    r1, r2 = req.min_rates

    # each requirement alone is met by some alpha iff it is within that user's capacity
    if r1 > shannon_rate(g1) or r2 > shannon_rate(g2):
        return FeasibleInterval.empty()
    lo = 0.0 if g1 == 0.0 else (2.0 ** (2.0 * r1) - 1.0) / g1
    hi = 1.0 if g2 == 0.0 else ((1.0 + g2) / 2.0 ** (2.0 * r2) - 1.0) / g2
    lo, hi = min(1.0, max(0.0, lo)), min(1.0, max(0.0, hi))
    if lo > hi:
        return FeasibleInterval.empty()
    interval = FeasibleInterval(lo, hi)
    for a in (interval.lo, interval.hi):
        got = noma_two_user(g1, g2, a)
        if got[0] < r1 - _VERIFY_SLACK or got[1] < r2 - _VERIFY_SLACK:
            raise ArithmeticError(f"alpha={a} fails QoS {req.min_rates}: rates {got}")
    return interval
