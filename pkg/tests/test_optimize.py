import math

import numpy as np
import pytest

import oracles
from conftest import random_factored
from pasbounds.channel import Dmc, make_bsc, make_identity, make_parallel
from pasbounds.optimize import blahut_arimoto, maximize_product_mi, project_to_ntype_design
from pasbounds.prob import Pmf


def z_channel_capacity(p):
    # input 1 flips to 0 with probability p
    return math.log2(1 + (1 - p) * p ** (p / (1 - p)))


class TestBlahutArimoto:
    @pytest.mark.parametrize("p", [0.0, 0.02, 0.11, 0.3, 0.5])
    def test_bsc(self, p):
        res = blahut_arimoto(make_bsc(p))
        assert res.capacity == pytest.approx(oracles.bsc_capacity(p), abs=1e-9)
        assert res.converged

    def test_z_channel(self):
        p = 0.2
        w = Dmc((0, 1), (0, 1), [[1.0, 0.0], [p, 1 - p]])
        res = blahut_arimoto(w, tol=1e-12)
        assert res.capacity == pytest.approx(z_channel_capacity(p), abs=1e-10)
        assert res.px_star.probs[1] < 0.5

    def test_noiseless(self):
        assert blahut_arimoto(make_identity(5)).capacity == pytest.approx(math.log2(5), abs=1e-12)

    def test_gap_is_upper_minus_lower(self):
        res = blahut_arimoto(Dmc((0, 1, 2), (0, 1), [[0.9, 0.1], [0.5, 0.5], [0.2, 0.8]]), tol=1e-10)
        assert 0 <= res.gap < 1e-10
        assert list(res.history) == sorted(res.history)

    def test_to_dict(self):
        d = blahut_arimoto(make_bsc(0.11)).to_dict()
        assert set(d) == {"capacity_bits", "px", "gap", "iterations", "converged"}

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            blahut_arimoto(make_bsc(0.1), tol=0)


class TestProductMi:
    def test_symmetric_channel_uniform_optimum(self):
        res = maximize_product_mi(make_parallel(make_bsc(0.05), make_bsc(0.05)))
        np.testing.assert_allclose(res.pa_star.probs, 0.5, atol=1e-6)
        np.testing.assert_allclose(res.ps_star.probs, 0.5, atol=1e-6)
        assert res.mi == pytest.approx(2 * oracles.bsc_capacity(0.05), abs=1e-9)

    def test_matches_grid(self):
        rng = np.random.default_rng(7)
        for _ in range(3):
            f = random_factored(rng, 2, 2, 3)
            res = maximize_product_mi(f)
            grid = oracles.product_mi_grid(f.w_as, step=1e-2)
            assert res.mi >= grid - 1e-9

    def test_deterministic(self):
        f = random_factored(np.random.default_rng(3), 2, 2, 4)
        a, b = maximize_product_mi(f, seed=5), maximize_product_mi(f, seed=5)
        assert a.mi == b.mi
        np.testing.assert_array_equal(a.pa_star.probs, b.pa_star.probs)

    def test_never_exceeds_capacity(self):
        f = random_factored(np.random.default_rng(11), 2, 2, 3)
        assert maximize_product_mi(f).mi <= blahut_arimoto(f.base, tol=1e-12).capacity + 1e-9


class TestProjection:
    def test_uniform_stays_uniform(self):
        for n in (2, 4, 8, 16):
            assert project_to_ntype_design(Pmf.uniform("ab"), n).counts == (n // 2, n // 2)

    def test_n1_single_support(self):
        t = project_to_ntype_design(Pmf.from_probs([0.4, 0.6]), 1)
        assert t.counts == (0, 1)
