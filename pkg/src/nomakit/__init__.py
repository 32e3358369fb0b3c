"""Downlink power-domain NOMA analysis: rates, regions, allocation, multi-cell simulation."""
from .errors import ConfigError, DomainError, InfeasibleError, NomaError, OrderingError
from .rates import (
    RATE_SCALE,
    WEAK_USER_LOSS_BOUND,
    ChannelGain,
    PowerSplit,
    RateVector,
    SicOrder,
    SicQuality,
    SnrVector,
    TimeShare,
    negligibility_threshold,
    noma_k_user,
    noma_two_user,
    noma_two_user_imperfect,
    oma_k_user,
    oma_two_user,
    shannon_rate,
    sic_order,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DomainError",
    "InfeasibleError",
    "NomaError",
    "OrderingError",
    "RATE_SCALE",
    "WEAK_USER_LOSS_BOUND",
    "ChannelGain",
    "PowerSplit",
    "RateVector",
    "SicOrder",
    "SicQuality",
    "SnrVector",
    "TimeShare",
    "negligibility_threshold",
    "noma_k_user",
    "noma_two_user",
    "noma_two_user_imperfect",
    "oma_k_user",
    "oma_two_user",
    "shannon_rate",
    "sic_order",
]
