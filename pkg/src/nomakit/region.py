"""Two-user rate-region boundaries for NOMA and OMA."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Literal

import numpy as np

from .errors import DomainError, InfeasibleError
from .rates import _check_pair, _check_real, noma_two_user, oma_two_user, shannon_rate

Scheme = Literal["NOMA", "OMA"]
CSV_HEADER = ("scheme", "param", "r1", "r2")
ENDPOINT_TOL = 1e-9


@dataclass(frozen=True)
class RegionBoundary:
    """Sampled Pareto boundary, ordered by increasing R1.

    ``params`` holds the generating alpha (NOMA) or tau (OMA) of each point.
    """

    scheme: Scheme
    gamma1: float
    gamma2: float
    params: tuple[float, ...]
    points: tuple[tuple[float, float], ...]
    _r1: np.ndarray = field(init=False, repr=False, compare=False)
    _r2: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.scheme not in ("NOMA", "OMA"):
            raise DomainError(f"unknown scheme {self.scheme!r}")
        if len(self.params) != len(self.points) or len(self.points) < 2:
            raise DomainError("a boundary needs >= 2 points, one parameter per point")
        r1 = np.array([p[0] for p in self.points])
        r2 = np.array([p[1] for p in self.points])
        if np.any(np.diff(r1) < 0) or np.any(np.diff(r2) > 0):
            raise DomainError("boundary must have R1 nondecreasing and R2 nonincreasing")
        c1, c2 = shannon_rate(self.gamma1), shannon_rate(self.gamma2)
        if (abs(r1[0]) > ENDPOINT_TOL or abs(r2[0] - c2) > ENDPOINT_TOL
                or abs(r1[-1] - c1) > ENDPOINT_TOL or abs(r2[-1]) > ENDPOINT_TOL):
            raise DomainError("boundary endpoints must be (0, C(gamma2)) and (C(gamma1), 0)")
        object.__setattr__(self, "_r1", r1)
        object.__setattr__(self, "_r2", r2)

    @property
    def r1(self) -> np.ndarray:
        return self._r1.copy()

    @property
    def r2(self) -> np.ndarray:
        return self._r2.copy()

    def __len__(self):
        return len(self.points)

    def r2_at(self, r1: float) -> float:
        """Linear interpolation of the sampled boundary at ``r1``; -inf beyond its reach."""
        xs, ys = self._r1, self._r2
        if r1 > xs[-1] or r1 < xs[0]:
            return -math.inf
        # np.interp wants strictly increasing abscissae; keep the top point of each vertical run
        keep = np.insert(np.diff(xs) > 0, 0, True)
        xs_u, ys_u = xs[keep], ys[keep]
        if len(xs_u) == 1:
            return float(ys.max())
        return float(np.interp(r1, xs_u, ys_u))


def _alpha_grid(n_points: int) -> np.ndarray:
    if int(n_points) != n_points or n_points < 2:
        raise DomainError(f"n_points must be an integer >= 2, got {n_points!r}")
    return np.linspace(0.0, 1.0, int(n_points))


def noma_boundary(g1: float, g2: float, n_points: int) -> RegionBoundary:
    g1, g2 = _check_pair(g1, g2)
    alphas = _alpha_grid(n_points)
    pts = tuple(noma_two_user(g1, g2, float(a)) for a in alphas)
    return RegionBoundary("NOMA", g1, g2, tuple(float(a) for a in alphas), pts)


def oma_boundary(g1: float, g2: float, n_points: int) -> RegionBoundary:
    g1, g2 = _check_pair(g1, g2)
    taus = _alpha_grid(n_points)
    pts = tuple(oma_two_user(g1, g2, float(t)) for t in taus)
    return RegionBoundary("OMA", g1, g2, tuple(float(t) for t in taus), pts)


def alpha_for_r1(g1: float, r1_target: float) -> float:
    """Power fraction that gives the strong user exactly ``r1_target``."""
    g1 = _check_real("gamma1", g1, lo=0.0)
    r1_target = _check_real("r1_target", r1_target, lo=0.0)
    if r1_target > shannon_rate(g1):
        raise InfeasibleError(f"R1 = {r1_target} exceeds C(gamma1) = {shannon_rate(g1)}")
    if g1 == 0.0:
        return 0.0
    return min(1.0, (2.0 ** (2.0 * r1_target) - 1.0) / g1)


def r2_on_noma_boundary(g1: float, g2: float, r1_target: float) -> float:
    """Weak-user rate on the NOMA boundary where the strong user gets ``r1_target``."""
    g1, g2 = _check_pair(g1, g2)
    return noma_two_user(g1, g2, alpha_for_r1(g1, r1_target))[1]


def oma_r2_at(g1: float, g2: float, r1_target: float) -> float:
    g1, g2 = _check_pair(g1, g2)
    c1 = shannon_rate(g1)
    r1_target = _check_real("r1_target", r1_target, lo=0.0)
    if r1_target > c1:
        raise InfeasibleError(f"R1 = {r1_target} exceeds C(gamma1) = {c1}")
    if c1 == 0.0:
        return shannon_rate(g2)
    return max(0.0, (1.0 - r1_target / c1) * shannon_rate(g2))


@dataclass(frozen=True)
class Dominance:
    holds: bool
    witness: tuple[float, float] | None = None
    shortfall: float = 0.0

    def __bool__(self):
        return self.holds


def dominates(outer: RegionBoundary, inner: RegionBoundary, tol: float = 1e-9) -> Dominance:
    """Whether every sampled point of ``inner`` lies under ``outer`` (within ``tol``).

    ``outer`` is linearly interpolated between its samples, so denser grids
    are needed for tighter tolerances on curved boundaries. On failure the
    first violating inner point is returned as the witness.
    """
    if (outer.gamma1, outer.gamma2) != (inner.gamma1, inner.gamma2):
        raise DomainError("boundaries were generated for different channel parameters")
    tol = _check_real("tol", tol, lo=0.0)
    reach = outer._r1[-1]
    for r1, r2 in inner.points:
        height = outer.r2_at(min(r1, reach)) if r1 <= reach + tol else -math.inf
        if height < r2 - tol:
            return Dominance(False, (r1, r2), r2 - height)
    return Dominance(True)


def max_gap(g1: float, g2: float, n_samples: int = 1001) -> float:
    """Largest NOMA-minus-OMA weak-user rate over evenly spaced R1 in [0, C(g1)]."""
    g1, g2 = _check_pair(g1, g2)
    c1 = shannon_rate(g1)
    gaps = []
    for r1 in np.linspace(0.0, c1, n_samples):
        r1 = min(float(r1), c1)
        gaps.append(r2_on_noma_boundary(g1, g2, r1) - oma_r2_at(g1, g2, r1))
    return max(gaps)


def max_abs_gap(g1: float, g2: float, n_samples: int = 1001) -> float:
    g1, g2 = _check_pair(g1, g2)
    c1 = shannon_rate(g1)
    return max(
        abs(r2_on_noma_boundary(g1, g2, min(float(r1), c1)) - oma_r2_at(g1, g2, min(float(r1), c1)))
        for r1 in np.linspace(0.0, c1, n_samples)
    )


def to_csv(boundaries: Iterable[RegionBoundary], fh=None) -> str:
    """Write boundaries as ``scheme,param,r1,r2`` rows with 12 significant digits."""
    buf = io.StringIO() if fh is None else fh
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for b in boundaries:
        for p, (r1, r2) in zip(b.params, b.points):
            w.writerow((b.scheme, f"{p:.12g}", f"{r1:.12g}", f"{r2:.12g}"))
    return buf.getvalue() if fh is None else ""


def read_csv(text: str) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return [{"scheme": r["scheme"], "param": float(r["param"]), "r1": float(r["r1"]), "r2": float(r["r2"])}
            for r in rows]
