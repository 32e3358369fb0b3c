"""Seeded Monte Carlo multi-cell simulator for universal reuse, FFR and NOMA-FFR.

Model summary:

* Hexagonal cells of circumradius R; users dropped uniformly inside their
  home hexagon and served by the nearest BS (ties to the lower index).
* Deterministic power-law path loss, gain = max(d, 1 m) ** -eta, no fading.
* A BS transmits on every band its plan gives it (full buffer) with power
  proportional to the band's share of W. Noise PSD is flat too, so the
  noise on a band of fraction w is ``noise_power * w``.
* Users sharing a (cell, band) split it into equal orthogonal units. A
  NOMA-FFR pair occupies one unit and shares it by superposition.
* Trial t draws from a Philox stream keyed on (seed, t), so results do not
  depend on how trials are scheduled over threads.

Powers are in units of the (unit) noise power over the full band W.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
import yaml

from .errors import ConfigError, DomainError
from .rates import SIMPLEX_TOL, _c, noma_two_user

SCHEMES = ("universal", "ffr", "noma_ffr")
FFR_BANDS = ("f", "f1", "f2", "f3")
EDGE_BANDS = ("f1", "f2", "f3")
D_MIN = 1.0
REQUIRED_KEYS = (
    "trials", "seed", "path_loss_exponent", "edge_threshold",
    "users_per_cell", "scheme", "band_fractions",
)
OPTIONAL_KEYS = ("alpha", "noise_power", "n_cells", "cell_radius", "tx_power")

_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class CellLayout:
    bs_positions: np.ndarray
    cell_radius: float
    tx_power: float
    # index into EDGE_BANDS per cell; adjacent cells get different values
    edge_colors: tuple[int, ...] = ()

    def __post_init__(self):
        pos = np.asarray(self.bs_positions, dtype=float).reshape(-1, 2)
        if len(pos) < 1:
            raise DomainError("a layout needs at least one cell")
        if not (self.cell_radius > 0 and math.isfinite(self.cell_radius)):
            raise DomainError(f"cell_radius must be positive, got {self.cell_radius}")
        if not (self.tx_power > 0 and math.isfinite(self.tx_power)):
            raise DomainError(f"tx_power must be positive, got {self.tx_power}")
        colors = tuple(self.edge_colors) or tuple(i % 3 for i in range(len(pos)))
        if len(colors) != len(pos) or any(c not in (0, 1, 2) for c in colors):
            raise DomainError("edge_colors must give one of 0, 1, 2 per cell")
        pos.setflags(write=False)
        object.__setattr__(self, "bs_positions", pos)
        object.__setattr__(self, "edge_colors", colors)

    @property
    def n_cells(self) -> int:
        return len(self.bs_positions)

    @property
    def site_distance(self) -> float:
        return _SQRT3 * self.cell_radius


def hexagonal_layout(n_cells: int = 3, cell_radius: float = 100.0, tx_power: float = 1e8) -> CellLayout:
    """Three mutually adjacent cells, or a centre cell with its six neighbours.

    ``n_cells=1`` gives a single isolated cell.
    """
    isd = _SQRT3 * cell_radius
    if n_cells == 1:
        return CellLayout(np.zeros((1, 2)), cell_radius, tx_power, (0,))
    if n_cells == 3:
        angles = np.deg2rad([90.0, 210.0, 330.0])
        pos = cell_radius * np.column_stack([np.cos(angles), np.sin(angles)])
        return CellLayout(pos, cell_radius, tx_power, (0, 1, 2))
    if n_cells == 7:
        angles = np.deg2rad(60.0 * np.arange(6))
        ring = isd * np.column_stack([np.cos(angles), np.sin(angles)])
        pos = np.vstack([np.zeros((1, 2)), ring])
        return CellLayout(pos, cell_radius, tx_power, (0,) + tuple(1 + k % 2 for k in range(6)))
    raise DomainError(f"hexagonal_layout supports 1, 3 or 7 cells, got {n_cells}")


@dataclass(frozen=True)
class ReusePlan:
    scheme: str
    band_fractions: Mapping[str, float]

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise DomainError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        fr = {str(k): float(v) for k, v in dict(self.band_fractions).items()}
        expected = ("f",) if self.scheme == "universal" else FFR_BANDS
        if set(fr) != set(expected):
            raise DomainError(f"{self.scheme} needs bands {expected}, got {sorted(fr)}")
        if any(not (0.0 <= v <= 1.0) for v in fr.values()) or abs(math.fsum(fr.values()) - 1.0) > SIMPLEX_TOL:
            raise DomainError(f"band fractions must lie on the simplex, got {fr}")
        object.__setattr__(self, "band_fractions", {b: fr[b] for b in expected})

    @classmethod
    def universal(cls) -> "ReusePlan":
        return cls("universal", {"f": 1.0})

    @classmethod
    def ffr(cls, fractions: Mapping[str, float] | None = None) -> "ReusePlan":
        return cls("ffr", fractions or dict.fromkeys(FFR_BANDS, 0.25))

    @classmethod
    def noma_ffr(cls, fractions: Mapping[str, float] | None = None) -> "ReusePlan":
        return cls("noma_ffr", fractions or dict.fromkeys(FFR_BANDS, 0.25))

    @classmethod
    def from_scheme(cls, scheme: str, fractions: Mapping[str, float] | None = None) -> "ReusePlan":
        if scheme == "universal":
            return cls.universal()
        if scheme in ("ffr", "noma_ffr"):
            return cls(scheme, fractions or dict.fromkeys(FFR_BANDS, 0.25))
        raise DomainError(f"scheme must be one of {SCHEMES}, got {scheme!r}")

    def edge_band(self, color: int) -> str:
        return "f" if self.scheme == "universal" else EDGE_BANDS[color]

    def transmits(self, layout: CellLayout, cell: int, band: str) -> bool:
        if band == "f":
            return True
        return EDGE_BANDS[layout.edge_colors[cell]] == band

    def band_powers(self, layout: CellLayout, band: str) -> np.ndarray:
        """Per-BS transmit power on ``band`` (zero for BSs that do not use it)."""
        p = layout.tx_power * self.band_fractions[band]
        return np.array([p if self.transmits(layout, b, band) else 0.0 for b in range(layout.n_cells)])


@dataclass(frozen=True)
class UserDrop:
    positions: np.ndarray
    home_cell: np.ndarray
    serving_cell: np.ndarray
    distance: np.ndarray
    edge_flag: np.ndarray

    def __len__(self):
        return len(self.positions)


def _inside_hex(p: np.ndarray, radius: float) -> np.ndarray:
    apothem = _SQRT3 * radius / 2.0
    normals = np.column_stack([np.cos(np.deg2rad(60.0 * np.arange(3))), np.sin(np.deg2rad(60.0 * np.arange(3)))])
    return np.all(np.abs(p @ normals.T) <= apothem, axis=1)


def _sample_hex(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    out = np.empty((0, 2))
    while len(out) < n:
        m = 2 * (n - len(out)) + 4
        r = radius * np.sqrt(rng.random(m))
        th = 2.0 * math.pi * rng.random(m)
        cand = np.column_stack([r * np.cos(th), r * np.sin(th)])
        out = np.vstack([out, cand[_inside_hex(cand, radius)]])
    return out[:n]


def locate_users(layout: CellLayout, positions: np.ndarray, edge_threshold: float,
                 home_cell: np.ndarray | None = None) -> UserDrop:
    """Attach positions to their nearest BS and flag cell-edge users."""
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    d = np.linalg.norm(positions[:, None, :] - layout.bs_positions[None, :, :], axis=2)
    serving = np.argmin(d, axis=1)
    dist = d[np.arange(len(positions)), serving]
    home = serving.copy() if home_cell is None else np.asarray(home_cell)
    return UserDrop(positions, home, serving, dist, dist / layout.cell_radius > edge_threshold)


def drop_users(layout: CellLayout, users_per_cell: int, edge_threshold: float, rng: np.random.Generator) -> UserDrop:
    pos, home = [], []
    for c in range(layout.n_cells):
        pos.append(layout.bs_positions[c] + _sample_hex(rng, users_per_cell, layout.cell_radius))
        home.append(np.full(users_per_cell, c))
    return locate_users(layout, np.vstack(pos), edge_threshold, np.concatenate(home))


def channel_gains(layout: CellLayout, drop: UserDrop, eta: float) -> np.ndarray:
    """Users x BSs power gain matrix, ``max(d, 1 m) ** -eta``."""
    if not eta > 0:
        raise DomainError(f"path-loss exponent must be positive, got {eta}")
    d = np.linalg.norm(drop.positions[:, None, :] - layout.bs_positions[None, :, :], axis=2)
    return np.maximum(d, D_MIN) ** (-float(eta))


def ici_power(user: int, gains: np.ndarray, serving_cell: Sequence[int], band_powers: Sequence[float],
              power_splits: Any = None) -> float:
    """Inter-cell interference power at ``user`` on its band.

    ``band_powers[b]`` is BS b's total power on that band. How each
    interferer divides that power among its own users (``power_splits``)
    does not change the superposed signal's power, so it is not consulted.
    """
    del power_splits
    s = int(serving_cell[user])
    row = gains[user]
    return math.fsum(float(row[b]) * float(band_powers[b]) for b in range(len(band_powers)) if b != s)


@dataclass(frozen=True)
class BandAssignment:
    band: tuple[str, ...]
    band_fraction: np.ndarray
    share: np.ndarray
    unit: np.ndarray
    partner: np.ndarray
    role: tuple[str, ...]
    degenerate_cells: tuple[int, ...] = ()


def apply_reuse_plan(plan: ReusePlan, layout: CellLayout, drop: UserDrop) -> BandAssignment:
    """Map each user to a band and an orthogonal share of it.

    NOMA-FFR pairs the nearest centre users with the farthest edge users of
    a cell on that cell's edge band; leftovers are served OMA on their own
    region's band. A populated cell lacking centre or edge users is reported
    in ``degenerate_cells``.
    """
    n = len(drop)
    band = ["f"] * n
    share = np.zeros(n)
    unit = np.full(n, -1)
    partner = np.full(n, -1)
    role = ["oma"] * n
    degenerate = []
    fr = plan.band_fractions
    next_unit = 0

    def allocate(groups: list[tuple[int, ...]], b: str):
        nonlocal next_unit
        if not groups:
            return
        w = fr[b] / len(groups)
        for g in groups:
            for u in g:
                band[u] = b
                share[u] = w
                unit[u] = next_unit
            next_unit += 1

    for c in range(layout.n_cells):
        users = np.flatnonzero(drop.serving_cell == c)
        if plan.scheme == "universal":
            allocate([(int(u),) for u in users], "f")
            continue
        eb = plan.edge_band(layout.edge_colors[c])
        center = [int(u) for u in users if not drop.edge_flag[u]]
        edge = [int(u) for u in users if drop.edge_flag[u]]
        if plan.scheme == "ffr":
            allocate([(u,) for u in center], "f")
            allocate([(u,) for u in edge], eb)
            continue
        if len(users) and (not center or not edge):
            degenerate.append(c)
        center.sort(key=lambda u: (drop.distance[u], u))
        edge.sort(key=lambda u: (-drop.distance[u], u))
        npairs = min(len(center), len(edge))
        pairs = [(center[i], edge[i]) for i in range(npairs)]
        for s, w in pairs:
            partner[s], partner[w] = w, s
            role[s], role[w] = "strong", "weak"
        allocate(pairs + [(u,) for u in edge[npairs:]], eb)
        allocate([(u,) for u in center[npairs:]], "f")

    band_fraction = np.array([fr[b] for b in band]) if n else np.zeros(0)
    return BandAssignment(tuple(band), band_fraction, share, unit, partner, tuple(role), tuple(degenerate))


@dataclass(frozen=True)
class SimConfig:
    trials: int = 100
    seed: int = 0
    path_loss_exponent: float = 3.5
    noise_power: float = 1.0
    users_per_cell: int = 4
    edge_threshold: float = 0.6
    # power fraction for the stronger member of each NOMA pair
    alpha: float = 0.2

    def __post_init__(self):
        if not isinstance(self.trials, (int, np.integer)) or isinstance(self.trials, bool) or self.trials < 1:
            raise ConfigError(f"trials must be an integer >= 1, got {self.trials!r}")
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")
        if not -(2**63) <= self.seed < 2**64:
            raise ConfigError(f"seed must fit in 64 bits, got {self.seed}")
        if not (math.isfinite(self.path_loss_exponent) and self.path_loss_exponent > 2.0):
            raise ConfigError(f"path_loss_exponent must exceed 2, got {self.path_loss_exponent}")
        if not (math.isfinite(self.noise_power) and self.noise_power > 0):
            raise ConfigError(f"noise_power must be positive, got {self.noise_power}")
        if not isinstance(self.users_per_cell, (int, np.integer)) or self.users_per_cell < 1:
            raise ConfigError(f"users_per_cell must be an integer >= 1, got {self.users_per_cell!r}")
        if not 0.0 < self.edge_threshold < 1.0:
            raise ConfigError(f"edge_threshold must lie in (0, 1), got {self.edge_threshold}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based stream for one trial, keyed on (seed, trial index)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed % 2**64, trial])))


@dataclass(frozen=True)
class TrialResult:
    drop: UserDrop
    assignment: BandAssignment
    ici: np.ndarray
    sinr: np.ndarray
    rates: np.ndarray


def run_trial(layout: CellLayout, plan: ReusePlan, config: SimConfig, trial: int) -> TrialResult:
    rng = trial_rng(config.seed, trial)
    drop = drop_users(layout, config.users_per_cell, config.edge_threshold, rng)
    gains = channel_gains(layout, drop, config.path_loss_exponent)
    asg = apply_reuse_plan(plan, layout, drop)
    powers = {b: plan.band_powers(layout, b) for b in plan.band_fractions}

    n = len(drop)
    ici = np.zeros(n)
    sinr = np.zeros(n)
    for u in range(n):
        p = powers[asg.band[u]]
        s = drop.serving_cell[u]
        ici[u] = ici_power(u, gains, drop.serving_cell, p, power_splits=config.alpha)
        sinr[u] = gains[u, s] * p[s] / (ici[u] + config.noise_power * asg.band_fraction[u])

    rates = np.zeros(n)
    for u in range(n):
        v = asg.partner[u]
        if v < 0:
            rates[u] = asg.share[u] * _c(sinr[u])
        elif asg.role[u] == "strong":
            # the pair is re-ranked on effective in-band SNR before SIC
            hi, lo = (u, v) if sinr[u] >= sinr[v] else (v, u)
            r_hi, r_lo = noma_two_user(sinr[hi], sinr[lo], config.alpha)
            rates[hi] = asg.share[hi] * r_hi
            rates[lo] = asg.share[lo] * r_lo
    return TrialResult(drop, asg, ici, sinr, rates)


def _round12(x: float) -> float:
    return float(f"{x:.12g}")


@dataclass(frozen=True)
class SimReport:
    scheme: str
    trials: int
    seed: int
    alpha: float
    n_users: int
    mean_rate: float
    median_rate: float
    p5_rate: float
    center_mean_rate: float
    edge_mean_rate: float
    mean_ici_center: float
    mean_ici_edge: float
    n_edge_users: int
    degenerate_cells: int

    def to_dict(self) -> dict:
        d = asdict(self)
        out = {k: (_round12(v) if isinstance(v, float) else v) for k, v in d.items()
               if k not in ("mean_ici_center", "mean_ici_edge")}
        out["mean_ici"] = {"center": _round12(self.mean_ici_center), "edge": _round12(self.mean_ici_edge)}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _mean(x: np.ndarray) -> float:
    return float(np.mean(x)) if x.size else 0.0


def simulate(layout: CellLayout, plan: ReusePlan, config: SimConfig, threads: int = 1,
             return_trials: bool = False):
    """Run ``config.trials`` independent drops and aggregate user statistics.

    Trials are assembled in index order whatever the thread count, so the
    report is bit-identical for a given seed. With ``return_trials`` the
    per-trial results are returned alongside the report.
    """
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")

    def work(t: int) -> TrialResult:
        return run_trial(layout, plan, config, t)

    if threads == 1:
        results = [work(t) for t in range(config.trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, range(config.trials)))

    rates = np.concatenate([r.rates for r in results])
    ici = np.concatenate([r.ici for r in results])
    edge = np.concatenate([r.drop.edge_flag for r in results]).astype(bool)
    report = SimReport(
        scheme=plan.scheme,
        trials=config.trials,
        seed=int(config.seed),
        alpha=float(config.alpha),
        n_users=int(rates.size),
        mean_rate=_mean(rates),
        median_rate=float(np.median(rates)),
        p5_rate=float(np.percentile(rates, 5)),
        center_mean_rate=_mean(rates[~edge]),
        edge_mean_rate=_mean(rates[edge]),
        mean_ici_center=_mean(ici[~edge]),
        mean_ici_edge=_mean(ici[edge]),
        n_edge_users=int(edge.sum()),
        degenerate_cells=sum(len(r.assignment.degenerate_cells) for r in results),
    )
    return (report, results) if return_trials else report


def load_config(source: str | Path | Mapping) -> tuple[CellLayout, ReusePlan, SimConfig]:
    """Parse a YAML (or JSON) simulation config.

    Required keys: trials, seed, path_loss_exponent, edge_threshold,
    users_per_cell, scheme, band_fractions. Optional: alpha, noise_power,
    n_cells, cell_radius, tx_power. ``band_fractions`` is a map over the
    bands f, f1, f2, f3; the universal scheme uses the whole band and
    ignores it.
    """
    if isinstance(source, Mapping):
        raw = dict(source)
    else:
        try:
            raw = yaml.safe_load(Path(source).read_text())
        except yaml.YAMLError as e:
            raise ConfigError(f"cannot parse config: {e}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping of keys to values")
    for key in REQUIRED_KEYS:
        if key not in raw:
            raise ConfigError(f"missing config key: {key}")
    unknown = set(raw) - set(REQUIRED_KEYS) - set(OPTIONAL_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")

    scheme = raw["scheme"]
    fracs = raw["band_fractions"]
    if not isinstance(fracs, Mapping):
        raise ConfigError("band_fractions must be a mapping of band name to fraction")
    try:
        plan = ReusePlan.from_scheme(scheme, None if scheme == "universal" else fracs)
        layout = hexagonal_layout(int(raw.get("n_cells", 3)), float(raw.get("cell_radius", 100.0)),
                                  float(raw.get("tx_power", 1e8)))
    except DomainError as e:
        raise ConfigError(str(e)) from None
    try:
        config = SimConfig(
            trials=raw["trials"],
            seed=raw["seed"],
            path_loss_exponent=float(raw["path_loss_exponent"]),
            noise_power=float(raw.get("noise_power", 1.0)),
            users_per_cell=raw["users_per_cell"],
            edge_threshold=float(raw["edge_threshold"]),
            alpha=float(raw.get("alpha", 0.2)),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from None
    return layout, plan, config
