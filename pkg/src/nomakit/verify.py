"""Executable checks for the NOMA myths the library can decide numerically.

Each ``check_mythN(seed)`` returns a :class:`MythReport` carrying every
number it compared, so a verdict can be recomputed from the evidence alone.
Myth 6 is covered by the NOMA-FFR scheme in :mod:`nomakit.multicell`;
myths 7, 8 and 10 are qualitative and have no check.
"""
from __future__ import annotations

import inspect
import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .allocation import max_sum_rate
from .multicell import ReusePlan, SimConfig, hexagonal_layout, ici_power, simulate
from .rates import (
    WEAK_USER_LOSS_BOUND,
    negligibility_threshold,
    noma_two_user,
    shannon_rate,
    sic_order,
    weak_user_loss,
)
from .region import max_abs_gap, max_gap, noma_boundary, oma_boundary, dominates, r2_on_noma_boundary

CONFIRMED = "paper-claim-confirmed"
COUNTEREXAMPLE = "counterexample-found"

# reference rate table at gamma1 = 200, gamma2 = 2
TABLE1_GAMMAS = (200.0, 2.0)
TABLE1 = (
    ("A", 0.0, 0.0, 0.79, 0.79),
    ("B", 0.025, 1.29, 0.76, 2.05),
    ("C", 0.5, 3.33, 0.29, 3.62),
    ("D", 0.8, 3.67, 0.10, 3.77),
    ("E", 1.0, 3.83, 0.0, 3.83),
)
TABLE_TOL = 0.01


@dataclass
class MythReport:
    myth: int
    seed: int
    evidence: list[dict] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return CONFIRMED if all(e["ok"] for e in self.evidence) else COUNTEREXAMPLE

    @property
    def confirmed(self) -> bool:
        return self.verdict == CONFIRMED

    def add(self, name: str, ok: bool, **values: Any) -> bool:
        self.evidence.append({"name": name, "ok": bool(ok), **{k: _jsonable(v) for k, v in values.items()}})
        return bool(ok)

    def to_dict(self) -> dict:
        return {"myth": self.myth, "verdict": self.verdict, "seed": self.seed, "evidence": self.evidence}


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        return float(f"{float(v):.12g}")
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    return v


def _pairs(rng: np.random.Generator, n: int, lo: float = 1e-2, hi: float = 1e3) -> np.ndarray:
    """``n`` rows of (g1, g2) with g1 > g2, log-uniform over [lo, hi]."""
    g = np.exp(rng.uniform(np.log(lo), np.log(hi), size=(n, 2)))
    g.sort(axis=1)
    return g[:, ::-1]


def check_myth1(seed: int = 0) -> MythReport:
    """More power to the strong user can still be a Pareto point; sum rate peaks at alpha = 1."""
    rep = MythReport(1, seed)
    g1, g2 = TABLE1_GAMMAS
    r = noma_two_user(g1, g2, 0.8)
    rep.add("table1_point_D", abs(r[0] - 3.67) <= TABLE_TOL and abs(r[1] - 0.10) <= TABLE_TOL,
            alpha=0.8, rates=r, expected=(3.67, 0.10))
    on_boundary = abs(r2_on_noma_boundary(g1, g2, r[0]) - r[1]) <= 1e-12
    rep.add("point_D_on_boundary", on_boundary, alpha=0.8)

    best = max_sum_rate(g1, g2)
    grid = np.linspace(0.0, 1.0, 201)
    sums = [sum(noma_two_user(g1, g2, a)) for a in grid]
    rep.add("sum_rate_max_at_alpha_1", best.alpha == 1.0 and abs(best.sum_rate - 3.83) <= TABLE_TOL
            and max(sums) <= best.sum_rate, alpha=best.alpha, sum_rate=best.sum_rate, expected=3.83)

    # Pareto points with alpha > 1/2 on random instances: nothing on a dense grid dominates them
    rng = np.random.default_rng(seed)
    worst = math.inf
    instances = []
    for h1, h2 in _pairs(rng, 50):
        a = float(rng.uniform(0.5, 1.0))
        p = noma_two_user(h1, h2, a)
        b = noma_boundary(h1, h2, 401)
        # margin by which the best competitor fails to dominate p
        margin = min(max(p[0] - x, p[1] - y) for x, y in b.points)
        worst = min(worst, margin)
        instances.append((h1, h2, a))
    rep.add("strong_user_majority_power_is_pareto", worst >= -1e-12, min_margin=worst, n=len(instances))

    g = float(rng.uniform(0.1, 100.0))
    sums_eq = [sum(noma_two_user(g, g, a)) for a in grid]
    spread = max(sums_eq) - min(sums_eq)
    rep.add("equal_gains_constant_sum", spread <= 1e-12 and abs(sums_eq[0] - shannon_rate(g)) <= 1e-12,
            gamma=g, spread=spread)
    return rep


def _decodability_margin(g1: float, g2: float, alpha: float) -> float:
    strong = shannon_rate((1.0 - alpha) * g1 / (alpha * g1 + 1.0))
    weak = shannon_rate((1.0 - alpha) * g2 / (alpha * g2 + 1.0))
    return strong - weak


def check_myth2(seed: int = 0) -> MythReport:
    """The SIC order depends on SNRs only, and the strong user can always decode the weak user's message."""
    rep = MythReport(2, seed)
    params = list(inspect.signature(sic_order).parameters)
    rep.add("sic_order_takes_no_power_split", params == ["snrs"], parameters=params)

    order = list(sic_order(TABLE1_GAMMAS))
    rep.add("order_200_2", order == [0, 1], order=order)

    rng = np.random.default_rng(seed)
    worst = math.inf
    for g1, g2 in _pairs(rng, 200):
        for a in np.append(rng.uniform(0.0, 1.0, 5), [0.0, 1.0]):
            worst = min(worst, _decodability_margin(g1, g2, float(a)))
    rep.add("strong_decodes_weak_all_alpha", worst >= 0.0, min_margin=worst, n=200 * 7)
    m = _decodability_margin(*TABLE1_GAMMAS, 0.99)
    rep.add("decodability_at_alpha_0.99", m >= 0.0, margin=m)

    # K-user: every stronger user decodes every weaker message at least as well as its owner
    worst_k = math.inf
    for _ in range(100):
        k = int(rng.integers(3, 6))
        g = rng.exponential(50.0, size=k)
        split = rng.dirichlet(np.ones(k))
        order = list(sic_order(g))
        sorted_g = sorted(range(k), key=lambda i: (-g[i], i))
        if order != sorted_g:
            worst_k = -math.inf
            break
        above = 0.0
        for pos, j in enumerate(order):
            own = split[j] * g[j] / (1.0 + g[j] * above)
            for i in order[:pos]:
                worst_k = min(worst_k, split[j] * g[i] / (1.0 + g[i] * above) - own)
            above += split[j]
    rep.add("k_user_order_and_decodability", worst_k >= 0.0, min_margin=worst_k)
    return rep


def check_myth3(seed: int = 0) -> MythReport:
    """Interference at the weak user is negligible only when alpha * gamma2 <~ 0.1."""
    rep = MythReport(3, seed)
    loss = weak_user_loss(10.0, 0.01)
    rep.add("gamma2_10_alpha_0.01", loss <= WEAK_USER_LOSS_BOUND, loss=loss, bound=WEAK_USER_LOSS_BOUND)
    rep.add("threshold_at_10dB", abs(negligibility_threshold(10.0) - 0.01) <= 1e-15,
            threshold=negligibility_threshold(10.0))
    loss = weak_user_loss(10.0, 0.5)
    rep.add("gamma2_10_alpha_0.5_not_negligible", loss > 0.5, loss=loss)

    rng = np.random.default_rng(seed)
    worst = -math.inf
    for _ in range(1000):
        g2 = float(np.exp(rng.uniform(np.log(1e-3), np.log(1e3))))
        a = float(rng.uniform(0.0, negligibility_threshold(g2)))
        worst = max(worst, weak_user_loss(g2, a))
    rep.add("bound_holds_random", worst <= WEAK_USER_LOSS_BOUND, max_loss=worst, n=1000)

    err = max(weak_user_loss(0.05, float(a)) for a in np.linspace(0.0, 1.0, 1001))
    rep.add("tiny_gamma2_any_alpha", err < 0.02, gamma2=0.05, max_error=err)
    return rep


def check_myth4(seed: int = 0) -> MythReport:
    """OMA (alpha = 1) has the highest sum rate; NOMA trades sum rate for serving both users."""
    rep = MythReport(4, seed)
    g1, g2 = TABLE1_GAMMAS
    for name, a, _, _, rsum in TABLE1:
        s = sum(noma_two_user(g1, g2, a))
        rep.add(f"table1_sum_{name}", abs(s - rsum) <= TABLE_TOL, alpha=a, sum_rate=s, expected=rsum)
    c1 = shannon_rate(g1)
    interior = [sum(noma_two_user(g1, g2, float(a))) for a in np.linspace(0.0, 1.0, 101)[1:-1]]
    rep.add("interior_below_oma", max(interior) < c1, max_interior=max(interior), oma=c1)

    rng = np.random.default_rng(seed)
    g = float(rng.uniform(0.1, 100.0))
    sums = [sum(noma_two_user(g, g, float(a))) for a in np.linspace(0.0, 1.0, 101)]
    rep.add("equal_gains_no_tradeoff", max(sums) - min(sums) <= 1e-12, gamma=g, spread=max(sums) - min(sums))
    return rep


class _Untouchable:
    """Stand-in power split that fails loudly if anything reads it."""

    def _fail(self, *a, **k):
        raise AssertionError("power split was read")

    __getitem__ = __iter__ = __len__ = __float__ = __index__ = _fail

    def __getattr__(self, name):
        self._fail()


def check_myth5(seed: int = 0, trials: int = 20) -> MythReport:
    """Inter-cell interference does not depend on how a BS splits its power."""
    rep = MythReport(5, seed)
    gains = np.array([[1.0, 0.01], [0.01, 1.0]])
    vals = {ici_power(0, gains, [0, 1], [40.0, 40.0], power_splits=a) for a in np.linspace(0.0, 1.0, 11)}
    rep.add("two_bs_grid", vals == {0.4} or (len(vals) == 1 and abs(next(iter(vals)) - 0.4) <= 1e-15),
            values=sorted(vals), expected=0.4)
    try:
        ici_power(0, gains, [0, 1], [40.0, 40.0], power_splits=_Untouchable())
        rep.add("split_never_read", True)
    except AssertionError:
        rep.add("split_never_read", False)
    single = ici_power(0, np.array([[1.0]]), [0], [40.0])
    rep.add("single_cell_zero", single == 0.0, value=single)

    layout = hexagonal_layout(3)
    for scheme in ("universal", "noma_ffr"):
        plan = ReusePlan.from_scheme(scheme)
        ref = None
        same = True
        for a in np.round(np.linspace(0.0, 1.0, 11), 10):
            cfg = SimConfig(trials=trials, seed=seed, alpha=float(a))
            report, results = simulate(layout, plan, cfg, return_trials=True)
            icis = np.concatenate([r.ici for r in results])
            key = (report.mean_ici_center, report.mean_ici_edge, icis.tobytes())
            if ref is None:
                ref = key
            same &= key == ref
        rep.add(f"simulator_ici_invariant_{scheme}", same, alphas=11, trials=trials,
                mean_ici_edge=ref[1], mean_ici_center=ref[0])
    return rep


def check_myth9(seed: int = 0) -> MythReport:
    """Equal gains make the NOMA and OMA regions coincide; the gap opens as gains separate."""
    rep = MythReport(9, seed)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for g in np.exp(rng.uniform(np.log(1e-2), np.log(1e3), 20)):
        g = float(g)
        worst = max(worst, max_abs_gap(g, g, 201))
        nb, ob = noma_boundary(g, g, 101), oma_boundary(g, g, 101)
        if not (dominates(nb, ob, 1e-9) and dominates(ob, nb, 1e-9)):
            worst = math.inf
    rep.add("equal_gain_gap", worst <= 1e-9, max_gap=worst)

    g1, g2 = TABLE1_GAMMAS
    half = shannon_rate(g1) / 2.0
    noma_r2 = r2_on_noma_boundary(g1, g2, half)
    oma_r2 = shannon_rate(g2) / 2.0
    rep.add("gap_at_half_c1", noma_r2 - oma_r2 > 0.0, noma_r2=noma_r2, oma_r2=oma_r2, gap=noma_r2 - oma_r2)

    ratios = [1.0, 1.5, 2.0, 5.0, 10.0, 30.0, 100.0, 300.0, 1000.0]
    gaps = [max_gap(g2 * q, g2, 401) for q in ratios]
    mono = all(b >= a - 1e-12 for a, b in zip(gaps, gaps[1:]))
    rep.add("gap_monotone_in_ratio", mono and gaps[0] <= 1e-9, ratios=ratios, gaps=gaps)
    return rep


CHECKS: dict[int, Callable[[int], MythReport]] = {
    1: check_myth1,
    2: check_myth2,
    3: check_myth3,
    4: check_myth4,
    5: check_myth5,
    9: check_myth9,
}


def run_checks(seed: int = 0, only: list[int] | None = None) -> list[MythReport]:
    ids = sorted(CHECKS) if not only else list(only)
    unknown = [m for m in ids if m not in CHECKS]
    if unknown:
        raise KeyError(f"no check for myth(s) {unknown}; available: {sorted(CHECKS)}")
    return [CHECKS[m](seed) for m in ids]


def reports_json(reports: list[MythReport]) -> str:
    return json.dumps(
        {"all_confirmed": all(r.confirmed for r in reports), "reports": [r.to_dict() for r in reports]},
        indent=2,
    )
