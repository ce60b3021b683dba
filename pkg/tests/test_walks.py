"""Walk engines: Monte Carlo, inverted orbits, exact series, drift, entropy."""

import numpy as np
import pytest

from grigwalk import (
    FiniteMeasure,
    GroupAction,
    MixtureMeasure,
    WalkConfig,
    WreathProduct,
    consistency_report,
    cyclic_group,
    dirac,
    drift_series,
    exact_entropy_series,
    exact_induced_series,
    expected_delta_series,
    fit_power_law,
    inverted_orbit_literal,
    inverted_orbit_size,
    mixture_return_series,
    nu_gamma,
    ops_for_group,
    ops_for_wreath,
    phi_sigma_trace,
    product_measure,
    product_switch_measure,
    rho1,
    rho2,
    rho_pair,
    simulate,
    torsion_product_measure,
    uniform_generator_measure,
)
from grigwalk.boundary import ProductPoint, Ray
from grigwalk.core import random_reduced_word
from grigwalk.measures import kaimanovich_measure


class TestInvertedOrbit:
    def test_single_a_step(self, G, diag_action):
        assert inverted_orbit_size(diag_action, [(G.element("a"),)]) == 2

    def test_identity_measure_stays_one(self, G, diag_action):
        seq = [(G.identity,)] * 10
        assert inverted_orbit_size(diag_action, seq) == 1

    def test_incremental_equals_literal(self, G, diag_action, rng):
        for _ in range(1000):
            length = int(rng.integers(0, 50))
            word = random_reduced_word(rng, length)
            seq = [(G.element(ch),) for ch in word]
            inc = inverted_orbit_size(diag_action, seq)
            lit = inverted_orbit_literal(diag_action, seq)
            assert inc == lit
            assert inc <= len(seq) + 1

    def test_survival_identity_on_nonsymmetric_walk(self, G, pair_action):
        """E[delta(n)] from the first-return profile of the inverse-law walk
        matches the direct per-trajectory set statistic."""
        tor = torsion_product_measure(G, G)
        horizon, trials = 40, 3000
        rng = np.random.default_rng(99)
        bases = [e for e, _ in tor.atoms.values()]
        weights = np.array([w for _, w in tor.atoms.values()])
        cdf = np.cumsum(weights / weights.sum())
        means = np.zeros(horizon + 1)
        for _ in range(trials):
            draws = np.searchsorted(cdf, rng.random(horizon))
            seq = [bases[d] for d in draws]
            cur = {rho_pair().key}
            pts = {rho_pair().key: rho_pair()}
            sizes = [1]
            current = [rho_pair()]
            for b in seq:
                nxt = {}
                for p in current:
                    img = pair_action.apply(p, b)
                    nxt[img.key] = img
                nxt[rho_pair().key] = rho_pair()
                current = list(nxt.values())
                sizes.append(len(nxt))
            means += np.array(sizes)
        means /= trials
        cfg = WalkConfig(
            action=pair_action, measure_kind="finite", measure=tor,
            horizon=horizon, trials=20_000, seed=5,
        )
        bundle = simulate(cfg)
        est = bundle["delta_mean"]
        idx = np.searchsorted(est.ns, horizon)
        direct = means[horizon]
        est_val = est.mean[idx]
        assert abs(direct - est_val) < 0.12 * direct


class TestSimulate:
    def test_deterministic(self, G, pair_action):
        tor = torsion_product_measure(G, G)
        cfg = WalkConfig(action=pair_action, measure_kind="finite", measure=tor,
                         horizon=300, trials=100, seed=17)
        b1 = simulate(cfg)
        b2 = simulate(WalkConfig(action=pair_action, measure_kind="finite",
                                 measure=tor, horizon=300, trials=100, seed=17))
        assert np.array_equal(b1["survival"].mean, b2["survival"].mean)
        assert np.array_equal(b1["return_freq"].mean, b2["return_freq"].mean)

    def test_csv_format(self, G, pair_action):
        tor = torsion_product_measure(G, G)
        cfg = WalkConfig(action=pair_action, measure_kind="finite", measure=tor,
                         horizon=50, trials=20, seed=1)
        csv = simulate(cfg)["survival"].to_csv()
        lines = csv.strip().split("\n")
        assert lines[0] == "n,mean,stderr,trials,exact"
        assert all(len(line.split(",")) == 5 for line in lines[1:])

    def test_mc_matches_exact_returns(self, G, pair_action):
        tor = torsion_product_measure(G, G)
        cfg = WalkConfig(action=pair_action, measure_kind="finite", measure=tor,
                         horizon=32, trials=20_000, seed=23)
        bundle = simulate(cfg)
        exact = exact_induced_series(tor, pair_action, 32)
        mc = bundle["raw"]["forward"]["returns"]
        for n in (4, 8, 16, 32):
            p = exact["return_probs"][n]
            sigma = np.sqrt(p * (1 - p) / 20_000) + 1e-9
            assert abs(mc[n] - p) < 5 * sigma

    def test_bad_config(self, G, pair_action):
        tor = torsion_product_measure(G, G)
        with pytest.raises(ValueError):
            WalkConfig(action=pair_action, measure_kind="finite", measure=tor,
                       horizon=0, trials=1, seed=0)
        with pytest.raises(ValueError):
            WalkConfig(action=pair_action, measure_kind="sts", measure=tor,
                       horizon=10, trials=1, seed=0)


class TestExactInduced:
    def test_step_zero_is_dirac(self, G, ray_action):
        mu = uniform_generator_measure(G)
        res = exact_induced_series(mu, ray_action, 0)
        assert res["return_probs"][0] == 1.0

    def test_lazy_stays(self, G, ray_action):
        mu = FiniteMeasure(ops_for_group(G), [(G.identity, 1.0)])
        res = exact_induced_series(mu, ray_action, 10)
        assert np.all(res["return_probs"] == 1.0)

    def test_ray_walk_decay_half(self, G, ray_action):
        mu = uniform_generator_measure(G)
        res = exact_induced_series(mu, ray_action, 4096, state_budget=20_000)
        ns = np.array([256, 512, 1024, 2048, 4096])
        fit = fit_power_law(ns, res["return_probs"][ns])
        assert abs(fit + 0.5) < 0.1
        assert res["escaped"][-1] < 1e-12

    def test_product_return_multiplicativity(self, G, ray_action, pair_action):
        lazy = FiniteMeasure(
            ops_for_group(G), [(G.identity, 0.5)] + [(g, 0.125) for g in G.generators()]
        )
        joint = product_measure(lazy, lazy, G, G)
        res2 = exact_induced_series(joint, pair_action, 40, state_budget=100_000)
        r1 = exact_induced_series(lazy, ray_action, 40)
        r2 = exact_induced_series(lazy, GroupAction("single", [G], rho2()), 40)
        prod = r1["return_probs"] * r2["return_probs"]
        assert np.max(np.abs(res2["return_probs"] - prod)) < 1e-12

    def test_escaped_mass_bounds(self, G, ray_action):
        mu = uniform_generator_measure(G)
        res = exact_induced_series(mu, ray_action, 200, state_budget=20, window_radius=5)
        # tight window: lower bounds plus escaped mass stay <= 1
        assert np.all(res["return_probs"] <= 1.0)
        assert np.all(res["return_probs"] + res["escaped"] <= 1.0 + 1e-12)
        assert res["escaped"][-1] > 0


class TestMixtureSeries:
    def test_identity_blocks(self, G, ray_action):
        # nu concentrated at 1 makes lambda^{*n} = mu^{*n}
        nu = nu_gamma(1.99, i_max=1)
        mu = uniform_generator_measure(G)
        base = exact_induced_series(mu, ray_action, 64)["return_probs"]
        lam = mixture_return_series(nu, base, [1, 2, 4, 8, 16])
        for n, lo, up in lam:
            assert lo <= base[n] + 1e-12 <= up + 1e-9

    def test_transient_decay_exponent(self, G, ray_action):
        lazy = FiniteMeasure(
            ops_for_group(G), [(G.identity, 0.5)] + [(g, 0.125) for g in G.generators()]
        )
        r1 = exact_induced_series(lazy, ray_action, 30_000, state_budget=20_000,
                                  window_radius=1500)
        r2 = exact_induced_series(lazy, GroupAction("single", [G], rho2()), 30_000,
                                  state_budget=20_000, window_radius=1500)
        p2d = r1["return_probs"] * r2["return_probs"]
        nu = nu_gamma(1.5, i_max=1000)
        lam = mixture_return_series(nu, p2d, [4, 8, 16, 32], window=30_000)
        fit = -fit_power_law([n for n, _, _ in lam], [lo for _, lo, _ in lam])
        assert fit > 1.5  # summable: certifies transience of the mixture


class TestEntropySeries:
    def test_dirac(self, G):
        mu = dirac(ops_for_group(G))
        res = exact_entropy_series(mu, 5)
        assert np.all(res["H"] == 0.0)

    def test_collision_free_regime(self, G, diag_action):
        # two wreath generators that collide nowhere up to length 5:
        # support sizes 2^n, hence H(n) = n log 2
        W = WreathProduct(cyclic_group(2), diag_action)
        u = W.lamp(1) * W.base((G.element("ab"),))
        v = W.lamp(1) * W.base((G.element("ad"),))
        mu = FiniteMeasure(ops_for_wreath(W), [(u, 0.5), (v, 0.5)])
        res = exact_entropy_series(mu, 5)
        assert res["support_sizes"].tolist() == [1, 2, 4, 8, 16, 32]
        assert np.allclose(res["H"], np.arange(6) * np.log(2), atol=1e-12)

    def test_kaimanovich_series(self, kai):
        res = exact_entropy_series(kai, 8)
        H = res["H"]
        assert H[1] == pytest.approx(1.352209, abs=1e-6)
        ratios = H[1:] / np.arange(1, len(H))
        assert np.all(np.diff(ratios) < 0)
        assert np.all(np.diff(res["increments"]) <= 1e-12)


class TestDrift:
    def test_dirac_atom_alternates(self, G):
        mu = FiniteMeasure(ops_for_group(G), [(G.element("a"), 1.0)])
        res = drift_series(mu, 6, radius_cap=3)
        assert res["series"].mean.tolist() == [1.0, 0.0, 1.0, 0.0, 1.0, 0.0]

    def test_kaimanovich_exponent(self, kai):
        res = drift_series(kai, 10, radius_cap=10)
        s = res["series"]
        assert bool(np.all(s.exact))
        fit = fit_power_law(s.ns[1:], s.mean[1:])
        assert fit <= 0.85
        # L subadditive on the exact range
        L = s.mean
        for i in range(len(L)):
            for j in range(len(L)):
                if i + j + 1 < len(L):
                    assert L[i + j + 1] <= L[i] + L[j] + 1e-9


class TestConsistency:
    def test_trivial_walk(self):
        rep = consistency_report([1, 2], [0.0, 0.0], [0.0, 0.0], [1, 1], [0, 0], 1)
        assert rep["entropy_vs_support_ok"] and rep["support_in_ball_ok"]

    def test_two_point_equality_case(self, G):
        # uniform on {1, a}: mu^{*n} uniform on {1, a}, H = log 2 = log|supp|
        mu = FiniteMeasure(ops_for_group(G), [(G.identity, 0.5), (G.element("a"), 0.5)])
        res = exact_entropy_series(mu, 5)
        assert np.allclose(res["H"][1:], np.log(2))
        assert np.all(res["support_sizes"][1:] == 2)

    def test_kaimanovich_sandwich(self, kai):
        e = exact_entropy_series(kai, 8)
        d = drift_series(kai, 8, radius_cap=8)
        rep = consistency_report(
            d["series"].ns, e["H"][1:], d["series"].mean,
            e["support_sizes"][1:], d["max_dists"], 1,
        )
        assert rep["entropy_vs_support_ok"]
        assert rep["support_in_ball_ok"]
        assert 0 < rep["C_fit"] < np.inf
        assert rep["D_fit"] < np.inf


class TestPhiSigma:
    def test_requires_sts(self, G, pair_action):
        tor = torsion_product_measure(G, G)
        cfg = WalkConfig(action=pair_action, measure_kind="finite", measure=tor,
                         horizon=10, trials=5, seed=0)
        with pytest.raises(ValueError):
            phi_sigma_trace(cfg, rho_pair())

    def test_identity_translation(self, G, pair_action):
        """With delta_1 translations the tracked point never moves, so the
        change count is the number of steps whose two switches do not cancel:
        Binomial(horizon, 1/2) for uniform C2 switches."""
        from grigwalk import BUILTIN_GROUPS

        ops = ops_for_group(G)
        from grigwalk.measures import ops_for_tuple

        ident = FiniteMeasure(
            ops_for_tuple((G, G)), [((G.identity, G.identity), 1.0)]
        )
        horizon, trials = 200, 400
        cfg = WalkConfig(action=pair_action, measure_kind="sts", measure=ident,
                         horizon=horizon, trials=trials, seed=3,
                         switch_A=BUILTIN_GROUPS["C2"])
        res = phi_sigma_trace(cfg, rho_pair())
        mean = res["counts"].mean()
        sigma = np.sqrt(horizon * 0.25 / trials)
        assert abs(mean - horizon / 2) < 5 * sigma

    def test_sigma_outside_orbit(self, G, pair_action):
        from grigwalk import BUILTIN_GROUPS

        tor = torsion_product_measure(G, G)
        sigma = ProductPoint(Ray("", "1"), Ray("", "10"))  # different orbit
        cfg = WalkConfig(action=pair_action, measure_kind="sts", measure=tor,
                         horizon=200, trials=100, seed=4,
                         switch_A=BUILTIN_GROUPS["C2"])
        res = phi_sigma_trace(cfg, sigma)
        assert res["counts"].max() == 0
