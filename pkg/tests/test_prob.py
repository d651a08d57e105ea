import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import random_dmc
from pasbounds.channel import make_bsc
from pasbounds.prob import (AlphabetMismatch, JointPmf, Pmf, arimoto_cond_renyi,
                            conditional_entropy, entropy, kl_divergence, mutual_information,
                            renyi_entropy)


def pmfs(k_min=1, k_max=5):
    return st.integers(k_min, k_max).flatmap(
        lambda k: st.lists(st.floats(0.0, 1.0), min_size=k, max_size=k)
        .filter(lambda v: sum(v) > 1e-3)
        .map(lambda v: Pmf.from_probs(np.array(v) / sum(v))))


class TestPmf:
    def test_renormalizes_within_tolerance(self):
        p = Pmf((0, 1), [0.5, 0.5 + 5e-13])
        assert p.probs.sum() == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("probs", [[0.5, 0.6], [-0.1, 1.1], [np.nan, 1.0]])
    def test_rejects_invalid(self, probs):
        with pytest.raises(ValueError):
            Pmf((0, 1), probs)

    def test_rejects_duplicate_labels(self):
        with pytest.raises(ValueError):
            Pmf(("a", "a"), [0.5, 0.5])

    def test_immutable(self):
        p = Pmf.uniform("ab")
        with pytest.raises(ValueError):
            p.probs[0] = 1.0

    def test_support_and_lookup(self):
        p = Pmf(("x", "y", "z"), [0.25, 0.0, 0.75])
        assert p.support == ("x", "z")
        assert p["z"] == 0.75
        assert Pmf.point_mass("xyz", "y").support == ("y",)


class TestEntropy:
    def test_uniform(self):
        assert entropy(Pmf.uniform(range(8))) == pytest.approx(3.0, abs=1e-15)

    def test_point_mass_is_zero(self):
        assert entropy(Pmf.point_mass(range(4), 2)) == 0.0

    def test_binary(self):
        assert entropy(Pmf.from_probs([0.11, 0.89])) == pytest.approx(oracles.h2(0.11), abs=1e-14)

    def test_renyi_uniform_any_order(self):
        for a in (0.2, 0.5, 2.0, 5.0):
            assert renyi_entropy(a, Pmf.uniform(range(6))) == pytest.approx(math.log2(6), abs=1e-12)

    def test_renyi_rejects_order_one(self):
        with pytest.raises(ValueError):
            renyi_entropy(1.0, Pmf.uniform("ab"))
        with pytest.raises(ValueError):
            renyi_entropy(0.0, Pmf.uniform("ab"))

    def test_renyi_tends_to_shannon(self):
        p = Pmf.from_probs([0.1, 0.2, 0.7])
        assert renyi_entropy(1 - 1e-7, p) == pytest.approx(entropy(p), abs=1e-5)
        assert renyi_entropy(1 + 1e-7, p) == pytest.approx(entropy(p), abs=1e-5)

    @settings(max_examples=60, deadline=None)
    @given(pmfs(), st.floats(0.05, 0.95), st.floats(0.05, 0.95))
    def test_renyi_nonincreasing_in_order(self, p, a1, a2):
        lo, hi = sorted((a1, a2))
        assert renyi_entropy(lo, p) >= renyi_entropy(hi, p) - 1e-10

    @settings(max_examples=60, deadline=None)
    @given(pmfs())
    def test_entropy_bounds(self, p):
        h = entropy(p)
        assert -1e-12 <= h <= math.log2(len(p)) + 1e-12
        assert h == pytest.approx(oracles.entropy(p.probs), abs=1e-12)


class TestDivergence:
    def test_support_violation_is_infinite(self):
        assert kl_divergence(Pmf.from_probs([0.5, 0.5]), Pmf.from_probs([1.0, 0.0])) == math.inf

    def test_reverse_direction_finite(self):
        d = kl_divergence(Pmf.from_probs([1.0, 0.0]), Pmf.from_probs([0.5, 0.5]))
        assert d == pytest.approx(1.0)

    def test_alphabet_mismatch(self):
        with pytest.raises(AlphabetMismatch):
            kl_divergence(Pmf.uniform("ab"), Pmf.uniform("xy"))

    @settings(max_examples=80, deadline=None)
    @given(pmfs(2, 4).flatmap(lambda p: st.tuples(st.just(p), pmfs(len(p), len(p)))))
    def test_gibbs_inequality(self, pq):
        p, q = pq
        d = kl_divergence(p, q)
        assert d >= 0.0
        assert d == pytest.approx(oracles.kl(p.probs, q.probs), abs=1e-10) or math.isinf(d)

    def test_self_divergence_zero(self):
        p = Pmf.from_probs([0.3, 0.3, 0.4])
        assert kl_divergence(p, p) == 0.0


class TestMutualInformation:
    def test_bsc_uniform(self):
        mi = mutual_information(Pmf.uniform((0, 1)), make_bsc(0.11))
        assert mi == pytest.approx(oracles.bsc_capacity(0.11), abs=1e-14)

    def test_matches_loops(self, rng):
        for _ in range(10):
            w = random_dmc(rng, 3, 4)
            px = Pmf.from_probs(rng.dirichlet(np.ones(3)))
            assert mutual_information(px, w) == pytest.approx(
                oracles.mutual_information(px.probs, w.w), abs=1e-12)

    def test_chain_rule(self, rng):
        w = random_dmc(rng, 4, 3)
        px = Pmf.from_probs(rng.dirichlet(np.ones(4)))
        assert conditional_entropy(px, w) + mutual_information(px, w) == pytest.approx(entropy(px))

    def test_input_alphabet_checked(self):
        with pytest.raises(AlphabetMismatch):
            mutual_information(Pmf.uniform("ab"), make_bsc(0.1))


class TestArimoto:
    def test_matches_loops(self, rng):
        for _ in range(10):
            joint = JointPmf(range(4), range(3), rng.dirichlet(np.ones(12)).reshape(4, 3))
            for a in (0.2, 0.5, 0.9):
                assert arimoto_cond_renyi(a, joint) == pytest.approx(
                    oracles.arimoto(a, joint.probs), abs=1e-12)

    def test_independent_reduces_to_renyi(self):
        px = Pmf.from_probs([0.6, 0.3, 0.1])
        joint = JointPmf(range(3), range(2), np.outer(px.probs, [0.4, 0.6]))
        assert arimoto_cond_renyi(0.5, joint) == pytest.approx(renyi_entropy(0.5, px), abs=1e-12)

    def test_between_conditional_and_marginal(self, rng):
        w = random_dmc(rng, 3, 3)
        px = Pmf.from_probs(rng.dirichlet(np.ones(3)))
        joint = JointPmf.from_input_and_channel(px, w)
        assert conditional_entropy(px, w) - 1e-12 <= arimoto_cond_renyi(0.5, joint)
        assert arimoto_cond_renyi(0.5, joint) <= renyi_entropy(0.5, px) + 1e-12

    def test_order_range(self):
        joint = JointPmf((0,), (0,), [[1.0]])
        with pytest.raises(ValueError):
            arimoto_cond_renyi(1.5, joint)

    def test_marginals(self):
        joint = JointPmf.from_input_and_channel(Pmf.from_probs([0.2, 0.8]), make_bsc(0.1))
        np.testing.assert_allclose(joint.row_marginal().probs, [0.2, 0.8])
        np.testing.assert_allclose(joint.col_marginal().probs, [0.26, 0.74])
