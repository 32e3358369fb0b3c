import itertools
import json
import math

import numpy as np
import pytest

from nomakit.errors import ConfigError, DomainError
from nomakit.multicell import (
    REQUIRED_KEYS,
    CellLayout,
    ReusePlan,
    SimConfig,
    apply_reuse_plan,
    channel_gains,
    drop_users,
    hexagonal_layout,
    ici_power,
    load_config,
    locate_users,
    run_trial,
    simulate,
    trial_rng,
)

ALPHAS = [round(0.1 * i, 10) for i in range(11)]


class Untouchable:
    def _fail(self, *a, **k):
        raise AssertionError("power split was read")

    __getitem__ = __iter__ = __len__ = __float__ = __index__ = __bool__ = _fail

    def __getattr__(self, name):
        self._fail()


@pytest.fixture
def layout3():
    return hexagonal_layout(3)


def single_user_drop(layout, points, beta=0.6):
    return locate_users(layout, np.asarray(points, dtype=float), beta)


class TestGeometry:
    def test_three_cells_mutually_adjacent(self, layout3):
        d = [np.linalg.norm(a - b) for a, b in itertools.combinations(layout3.bs_positions, 2)]
        assert d == pytest.approx([math.sqrt(3) * 100.0] * 3)
        assert sorted(layout3.edge_colors) == [0, 1, 2]

    def test_seven_cell_coloring(self):
        lay = hexagonal_layout(7)
        isd = lay.site_distance
        for i, j in itertools.combinations(range(7), 2):
            if abs(np.linalg.norm(lay.bs_positions[i] - lay.bs_positions[j]) - isd) < 1e-9:
                assert lay.edge_colors[i] != lay.edge_colors[j]

    def test_layout_invariants(self):
        with pytest.raises(DomainError):
            CellLayout(np.zeros((1, 2)), -1.0, 1.0)
        with pytest.raises(DomainError):
            CellLayout(np.zeros((1, 2)), 1.0, 0.0)
        with pytest.raises(DomainError):
            hexagonal_layout(4)

    def test_drop_inside_home_hexagon(self, layout3):
        drop = drop_users(layout3, 200, 0.6, trial_rng(1, 0))
        assert len(drop) == 600
        np.testing.assert_array_equal(drop.home_cell, drop.serving_cell)
        assert np.all(drop.distance <= layout3.cell_radius + 1e-9)
        np.testing.assert_array_equal(drop.edge_flag, drop.distance / layout3.cell_radius > 0.6)

    def test_serving_tie_goes_to_lower_index(self):
        lay = CellLayout(np.array([[0.0, 0.0], [10.0, 0.0]]), 10.0, 1.0)
        drop = single_user_drop(lay, [[5.0, 0.0]])
        assert drop.serving_cell[0] == 0


class TestChannelGains:
    def make(self, d, eta):
        lay = CellLayout(np.zeros((1, 2)), 1000.0, 1.0)
        return channel_gains(lay, single_user_drop(lay, [[d, 0.0]]), eta)[0, 0]

    def test_clamp(self):
        assert self.make(1.0, 3.5) == 1.0
        assert self.make(0.2, 3.5) == 1.0

    def test_power_law(self):
        assert self.make(100.0, 2.0) == pytest.approx(1e-4, rel=1e-15)

    @pytest.mark.parametrize("eta", [2.0, 3.0, 3.5, 4.0])
    def test_homogeneity(self, eta):
        assert self.make(60.0, eta) / self.make(30.0, eta) == pytest.approx(2.0 ** -eta, rel=1e-12)


class TestIci:
    def test_two_bs_split_invariant(self):
        gains = np.array([[1.0, 0.01]])
        for a in ALPHAS:
            assert ici_power(0, gains, [0], [40.0, 40.0], power_splits=(a, 1 - a)) == pytest.approx(0.4, abs=1e-15)
        assert ici_power(0, gains, [0], [40.0, 40.0], power_splits=Untouchable()) == pytest.approx(0.4, abs=1e-15)

    def test_single_cell(self):
        assert ici_power(0, np.array([[1.0]]), [0], [40.0]) == 0.0

    def test_ffr_adjacent_edge_users_no_mutual_ici(self, layout3):
        plan = ReusePlan.ffr()
        # one edge user in each of cell 0 and cell 1, near their shared border
        mid = layout3.bs_positions[:2].mean(axis=0)
        pts = [mid + 0.1 * (layout3.bs_positions[0] - mid), mid + 0.1 * (layout3.bs_positions[1] - mid)]
        drop = single_user_drop(layout3, pts)
        asg = apply_reuse_plan(plan, layout3, drop)
        assert asg.band[0] != asg.band[1] and set(asg.band) <= {"f1", "f2", "f3"}
        gains = channel_gains(layout3, drop, 3.5)
        for u in range(2):
            assert ici_power(u, gains, drop.serving_cell, plan.band_powers(layout3, asg.band[u])) == 0.0


class TestReusePlan:
    def test_invariants(self):
        with pytest.raises(DomainError):
            ReusePlan("ffr", {"f": 0.5, "f1": 0.5})
        with pytest.raises(DomainError):
            ReusePlan("ffr", {"f": 0.5, "f1": 0.5, "f2": 0.1, "f3": 0.1})
        with pytest.raises(DomainError):
            ReusePlan("hybrid", {"f": 1.0})

    def test_center_user_on_f(self, layout3):
        drop = single_user_drop(layout3, [layout3.bs_positions[0] + [5.0, 0.0]])
        asg = apply_reuse_plan(ReusePlan.ffr(), layout3, drop)
        assert asg.band == ("f",) and asg.band_fraction[0] == 0.25

    def test_universal_full_band(self, layout3):
        drop = drop_users(layout3, 5, 0.6, trial_rng(0, 0))
        asg = apply_reuse_plan(ReusePlan.universal(), layout3, drop)
        assert set(asg.band) == {"f"} and np.all(asg.band_fraction == 1.0)
        assert asg.share == pytest.approx(np.full(15, 0.2))

    def test_noma_ffr_one_pair(self, layout3):
        bs = layout3.bs_positions[1]
        drop = single_user_drop(layout3, [bs + [10.0, 0.0], bs + [0.0, -80.0]])
        assert list(drop.edge_flag) == [False, True]
        asg = apply_reuse_plan(ReusePlan.noma_ffr(), layout3, drop)
        edge_band = ("f1", "f2", "f3")[layout3.edge_colors[1]]
        assert asg.band == (edge_band, edge_band)
        assert list(asg.partner) == [1, 0] and asg.role == ("strong", "weak")
        assert asg.unit[0] == asg.unit[1] and asg.share[0] == 0.25
        assert asg.degenerate_cells == ()

    def test_noma_ffr_degenerate(self, layout3):
        bs = layout3.bs_positions[2]
        drop = single_user_drop(layout3, [bs + [5.0, 0.0], bs + [0.0, 10.0]])
        asg = apply_reuse_plan(ReusePlan.noma_ffr(), layout3, drop)
        assert asg.degenerate_cells == (2,)
        assert asg.role == ("oma", "oma") and asg.band == ("f", "f")

    @pytest.mark.parametrize("scheme", ["universal", "ffr", "noma_ffr"])
    def test_band_accounting(self, layout3, scheme):
        plan = ReusePlan.from_scheme(scheme, {"f": 0.4, "f1": 0.2, "f2": 0.2, "f3": 0.2})
        for t in range(30):
            drop = drop_users(layout3, 7, 0.6, trial_rng(5, t))
            asg = apply_reuse_plan(plan, layout3, drop)
            used = {}
            for u in range(len(drop)):
                key = (int(drop.serving_cell[u]), asg.band[u])
                used.setdefault(key, {})[int(asg.unit[u])] = asg.share[u]
            for (cell, band), units in used.items():
                assert math.fsum(units.values()) <= plan.band_fractions[band] + 1e-12


class TestSimulate:
    def test_determinism(self, layout3):
        cfg = SimConfig(trials=1, seed=42)
        plan = ReusePlan.noma_ffr()
        assert simulate(layout3, plan, cfg).to_json() == simulate(layout3, plan, cfg).to_json()

    @pytest.mark.parametrize("threads", [2, 5])
    def test_thread_count_irrelevant(self, layout3, threads):
        cfg = SimConfig(trials=40, seed=2**63 + 5)
        plan = ReusePlan.ffr()
        assert simulate(layout3, plan, cfg, threads=threads).to_json() == simulate(layout3, plan, cfg).to_json()

    def test_different_seeds_differ(self, layout3):
        plan = ReusePlan.universal()
        a = simulate(layout3, plan, SimConfig(trials=5, seed=1)).to_json()
        b = simulate(layout3, plan, SimConfig(trials=5, seed=2)).to_json()
        assert a != b

    def test_ffr_lowers_edge_ici(self, layout3):
        cfg = SimConfig(trials=1000, seed=3, path_loss_exponent=3.5)
        uni = simulate(layout3, ReusePlan.universal(), cfg)
        ffr = simulate(layout3, ReusePlan.ffr(), cfg)
        assert ffr.mean_ici_edge < uni.mean_ici_edge
        assert ffr.mean_ici_edge == 0.0 and uni.mean_ici_edge > 0

    @pytest.mark.parametrize("scheme", ["ffr", "noma_ffr"])
    def test_edge_band_orthogonal(self, layout3, scheme):
        cfg = SimConfig(trials=50, seed=4)
        _, trials = simulate(layout3, ReusePlan.from_scheme(scheme), cfg, return_trials=True)
        for tr in trials:
            on_edge_band = np.array([b != "f" for b in tr.assignment.band])
            assert np.all(tr.ici[on_edge_band] == 0.0)

    @pytest.mark.parametrize("scheme", ["universal", "noma_ffr"])
    def test_ici_invariant_to_alpha(self, layout3, scheme):
        plan = ReusePlan.from_scheme(scheme)
        ref = None
        for a in [0.1, 0.5, 0.9]:
            rep, trials = simulate(layout3, plan, SimConfig(trials=30, seed=8, alpha=a), return_trials=True)
            key = (rep.mean_ici_center, rep.mean_ici_edge, b"".join(t.ici.tobytes() for t in trials))
            ref = ref or key
            assert key == ref

    def test_alpha_changes_noma_rates(self, layout3):
        plan = ReusePlan.noma_ffr()
        r1 = simulate(layout3, plan, SimConfig(trials=30, seed=8, alpha=0.1))
        r2 = simulate(layout3, plan, SimConfig(trials=30, seed=8, alpha=0.9))
        assert r1.mean_rate != r2.mean_rate

    def test_noma_pair_rates_match_core(self, layout3):
        from nomakit.rates import noma_two_user
        cfg = SimConfig(trials=3, seed=10, alpha=0.3)
        tr = run_trial(layout3, ReusePlan.noma_ffr(), cfg, 0)
        asg = tr.assignment
        for u in np.flatnonzero(asg.partner >= 0):
            v = asg.partner[u]
            if tr.sinr[u] >= tr.sinr[v]:
                r = noma_two_user(tr.sinr[u], tr.sinr[v], 0.3)
                assert tr.rates[u] == asg.share[u] * r[0] and tr.rates[v] == asg.share[v] * r[1]

    def test_report_fields_and_stats(self, layout3):
        rep = simulate(layout3, ReusePlan.ffr(), SimConfig(trials=10, seed=1))
        d = json.loads(rep.to_json())
        assert set(d) == {"scheme", "trials", "seed", "alpha", "n_users", "mean_rate", "median_rate", "p5_rate",
                          "center_mean_rate", "edge_mean_rate", "mean_ici", "n_edge_users", "degenerate_cells"}
        assert set(d["mean_ici"]) == {"center", "edge"}
        vals = [v for k, v in d.items() if isinstance(v, float)] + list(d["mean_ici"].values())
        assert all(math.isfinite(v) and v >= 0 for v in vals)
        assert d["trials"] == 10 and d["seed"] == 1


class TestConfig:
    BASE = {
        "trials": 5, "seed": 1, "path_loss_exponent": 3.5, "edge_threshold": 0.6,
        "users_per_cell": 3, "scheme": "ffr", "band_fractions": {"f": 0.4, "f1": 0.2, "f2": 0.2, "f3": 0.2},
    }

    def test_yaml_and_json(self, tmp_path):
        y = tmp_path / "c.yaml"
        y.write_text("\n".join(f"{k}: {json.dumps(v)}" for k, v in self.BASE.items()))
        j = tmp_path / "c.json"
        j.write_text(json.dumps(self.BASE))
        ly, py, cy = load_config(y)
        lj, pj, cj = load_config(j)
        assert cy == cj and py == pj and py.band_fractions["f"] == 0.4
        assert ly.n_cells == 3

    @pytest.mark.parametrize("key", REQUIRED_KEYS)
    def test_missing_key_named(self, key):
        cfg = dict(self.BASE)
        del cfg[key]
        with pytest.raises(ConfigError, match=key):
            load_config(cfg)

    @pytest.mark.parametrize("key, value", [("trials", 0), ("path_loss_exponent", 2.0), ("edge_threshold", 1.0),
                                            ("scheme", "nope"), ("users_per_cell", 0)])
    def test_invariants(self, key, value):
        with pytest.raises(ConfigError):
            load_config({**self.BASE, key: value})

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="bogus"):
            load_config({**self.BASE, "bogus": 1})
