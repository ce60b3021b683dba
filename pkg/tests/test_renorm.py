"""Renormalization of self-similar measures and the entropy-bound experiment."""

import math

import numpy as np
import pytest

from grigwalk import (
    FiniteMeasure,
    beta_exponent,
    coordinate_flip_mass,
    dirac,
    entropy_bound_experiment,
    exact_entropy_series,
    kaimanovich_measure,
    laziness_split,
    make_group,
    ops_for_group,
    renormalize,
    stopping_law_two_state,
    verify_self_similar,
)


class TestRenormalize:
    def test_dirac(self, G):
        res = renormalize(dirac(ops_for_group(G)), G, cutoff=10)
        assert res.mu_prime.weight("e") == pytest.approx(1.0)
        assert res.stopping == {1: 1.0}
        assert res.tail == 0.0

    def test_mass_conservation(self, G, kai):
        res = renormalize(kai, G, cutoff=40)
        assert res.mu_prime.total_mass() + res.tail == pytest.approx(1.0, abs=1e-12)

    def test_kaimanovich_identity(self, G, kai):
        res = renormalize(kai, G, cutoff=40)
        assert res.tail <= 1e-4
        split = laziness_split(res, kaimanovich_measure(G.shift()))
        assert split["gap_half"] <= res.tail + 1e-9
        assert split["alpha_best"] == pytest.approx(0.5, abs=0.01)

    def test_stopping_time_one_probability(self, G, kai):
        res = renormalize(kai, G, cutoff=40)
        # the walk leaves coordinate 1 only on the 'a' atom (mass 1/3)
        assert res.stopping[1] == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_stopping_matches_two_state_chain(self, G, kai):
        res = renormalize(kai, G, cutoff=40)
        pf = coordinate_flip_mass(kai)
        law = stopping_law_two_state(pf, 40)
        for k in range(1, 41):
            assert res.stopping.get(k, 0.0) == pytest.approx(law[k], abs=1e-12)

    def test_perturbed_negative_control(self, G):
        ops = ops_for_group(G)
        bad = FiniteMeasure(
            ops,
            [
                (G.identity, 0.45),
                (G.element("a"), 0.3),
                (G.element("b"), 0.25 / 3),
                (G.element("c"), 0.25 / 3),
                (G.element("d"), 0.25 / 3),
            ],
        )
        res = renormalize(bad, G, cutoff=40)
        split = laziness_split(res, kaimanovich_measure(G.shift()))
        assert split["gap_half"] > 1e-3

    def test_cutoff_validation(self, G, kai):
        with pytest.raises(ValueError):
            renormalize(kai, G, cutoff=0)


class TestSelfSimilarSequence:
    def test_kaimanovich_chain(self, G):
        rows = verify_self_similar(kaimanovich_measure, [0.5, 0.5, 0.5], G, depth=3)
        assert all(r["ok"] for r in rows)
        assert all(r["tv_gap"] <= 1e-7 for r in rows)

    def test_dirac_fully_lazy(self, G):
        def factory(spec):
            return dirac(ops_for_group(spec))

        rows = verify_self_similar(factory, [1.0], G, depth=2)
        assert all(r["ok"] for r in rows)

    def test_tv_metric_properties(self, G, rng):
        ops = ops_for_group(G)
        gens = [G.identity] + G.generators()

        def rand_measure():
            w = rng.random(5)
            w /= w.sum()
            return FiniteMeasure(ops, list(zip(gens, w.tolist())))

        for _ in range(50):
            m1, m2, m3 = rand_measure(), rand_measure(), rand_measure()
            assert m1.tv_distance(m2) == pytest.approx(m2.tv_distance(m1))
            assert m1.tv_distance(m1) == 0.0
            assert m1.tv_distance(m3) <= m1.tv_distance(m2) + m2.tv_distance(m3) + 1e-12


class TestEntropyBound:
    def test_beta_values(self):
        assert beta_exponent(2, 0.5) == pytest.approx(0.5)
        assert beta_exponent(2, 0.25) == pytest.approx(1.0 / 3.0)

    def test_dirac_series(self):
        rep = entropy_bound_experiment(np.zeros(10))
        assert rep["K"] == 0.0
        assert rep["trend_ok"]

    def test_synthetic_sqrt(self):
        ns = np.arange(16)
        rep = entropy_bound_experiment(np.sqrt(ns))
        assert rep["K"] == pytest.approx(1.0)
        assert rep["trend_ok"]

    def test_synthetic_linear_fails_trend(self):
        ns = np.arange(16, dtype=float)
        rep = entropy_bound_experiment(ns)
        assert not rep["trend_ok"]

    def test_kaimanovich_walk(self, kai):
        res = exact_entropy_series(kai, 9)
        rep = entropy_bound_experiment(res["H"])
        assert rep["beta"] == pytest.approx(0.5)
        assert math.isfinite(rep["K"])
        assert rep["trend_ok"]
