import json
import math

import numpy as np
import pytest

import oracles
from pasbounds.channel import make_bsc, make_identity, make_parallel
from pasbounds.prob import Pmf
from pasbounds.simulate import (Z_99, InfeasibleConfig, SimConfig, SimReport,
                                affine_code_table, codewords, decoder_prior, dms_source,
                                exact_error_probability, map_decode, mmap_decode,
                                monte_carlo_errors, run_ensemble_experiment, sample_code,
                                sample_code_iid, sample_code_permuter, sample_permuter,
                                source_for, type_class_codes, type_source, wilson_interval)
from pasbounds.typeclass import NType, enumerate_type_class


@pytest.fixture
def fd():
    return make_parallel(make_bsc(0.05), make_bsc(0.05))


def config(fd, setup, n, **kw):
    half = Pmf.from_probs([0.5, 0.5])
    base = {
        "classical": dict(px=Pmf.uniform(fd.base.input_labels), channel=fd.base,
                          pa=Pmf((0, 1, 2, 3), [0.4, 0.3, 0.2, 0.1])),
        "systematic": dict(ps=Pmf.uniform(fd.s_labels), pa=Pmf.from_probs([0.75, 0.25])),
        "mismatched": dict(px=Pmf.uniform(fd.base.input_labels), channel=fd.base,
                           pa=Pmf((0, 1, 2, 3), [0.4, 0.3, 0.2, 0.1]),
                           pbar=Pmf((0, 1, 2, 3), [0.5, 0.0, 0.5, 0.0])),
        "pas": dict(ps=Pmf.uniform(fd.s_labels), pa=half, pbar=half),
    }[setup]
    base.setdefault("channel", fd)
    base.update(kw)
    return SimConfig(setup=setup, n=n, **base)


class TestWilson:
    def test_zero_successes(self):
        lo, hi = wilson_interval(0, 200)
        assert lo == 0.0
        assert hi == pytest.approx(Z_99 ** 2 / (200 + Z_99 ** 2))

    def test_symmetry(self):
        lo, hi = wilson_interval(30, 100)
        lo2, hi2 = wilson_interval(70, 100)
        assert lo == pytest.approx(1 - hi2)
        assert hi == pytest.approx(1 - lo2)

    def test_contains_estimate(self):
        lo, hi = wilson_interval(12.5, 200)
        assert lo < 12.5 / 200 < hi

    def test_z_value(self):
        from scipy.stats import norm
        assert Z_99 == pytest.approx(norm.ppf(0.995), abs=1e-12)


class TestCodes:
    def test_iid_table_shape(self):
        code = sample_code_iid(3, (0, 1), Pmf.from_probs([0.5, 0.5]), np.random.default_rng(0))
        assert code.table.shape == (8, 3)
        assert code.lookup((1, 0, 1)) == tuple(code.table[5])

    def test_affine_table(self):
        G = np.eye(2, dtype=int)
        b = np.array([1, 0])
        code = affine_code_table(2, 2, 1, G, b)
        # parity = bits(a) + (1, 0)
        assert code.lookup((0, 0)) == (1, 0)
        assert code.lookup((1, 1)) == (0, 1)

    def test_affine_ensemble_via_config(self, fd):
        cfg = config(fd, "systematic", 2, ensemble="affine-binary", num_codes=5)
        code = sample_code(cfg, 0)
        assert code.affine is not None
        assert code.table.shape == (4, 2)

    def test_systematic_codewords_carry_message(self, fd):
        code = sample_code_iid(2, fd.a_labels, Pmf.uniform(fd.s_labels), np.random.default_rng(1))
        cw = codewords(code, fd)
        for m in range(4):
            a = [(m >> 1) & 1, m & 1]
            for i in range(2):
                x = fd.base.input_labels[cw[m, i]]
                assert x[0] == a[i]


class TestPermuter:
    def test_permutes_only_type_class(self):
        t = NType((0, 1), (2, 2))
        perm = sample_permuter(t, np.random.default_rng(3))
        members = set(enumerate_type_class(t))
        images = set()
        for code in range(16):
            seq = tuple((code >> (3 - i)) & 1 for i in range(4))
            out = perm(seq)
            if seq in members:
                assert out in members
                images.add(out)
            else:
                assert out == seq
        assert images == members

    def test_inverse(self):
        t = NType((0, 1, 2), (1, 1, 1))
        perm = sample_permuter(t, np.random.default_rng(4))
        inv = perm.inverse()
        for seq in enumerate_type_class(t):
            assert inv(perm(seq)) == seq

    def test_type_class_codes_sorted(self):
        codes = type_class_codes(NType((0, 1), (1, 2)))
        assert codes.tolist() == [3, 5, 6]


class TestSources:
    def test_type_source_prefix(self):
        t = NType((0, 1), (2, 2))
        src = type_source(t, 0.5)
        assert src.support.tolist() == [3, 5, 6]
        np.testing.assert_allclose(src.probs, 1 / 3)

    def test_dms_source(self):
        src = dms_source(Pmf.from_probs([0.75, 0.25]), 2)
        np.testing.assert_allclose(src.probs, [0.5625, 0.1875, 0.1875, 0.0625])

    def test_systematic_uses_dms(self, fd):
        assert source_for(config(fd, "systematic", 2)).support.size == 4

    def test_pas_uses_type_class(self, fd):
        assert source_for(config(fd, "pas", 4)).support.size == 6


class TestDecoders:
    def test_noiseless_map_decodes_correctly(self):
        fd = make_parallel(make_identity(2), make_identity(2))
        code = sample_code_iid(3, fd.a_labels, Pmf.uniform(fd.s_labels), np.random.default_rng(0))
        cw = codewords(code, fd)
        msg = 5
        y = [fd.base.output_labels[x] for x in cw[msg]]
        assert map_decode(y, code, Pmf.uniform(fd.a_labels), fd) == (1, 0, 1)

    def test_mmap_prior_dominates(self):
        # useless channel: the decision is the prior mode
        from pasbounds.channel import Dmc, factor
        useless = factor(Dmc(range(4), (0,), np.ones((4, 1))), (0, 1), (0, 1))
        code = sample_code_iid(2, (0, 1), Pmf.uniform((0, 1)), np.random.default_rng(0))
        assert mmap_decode([0, 0], code, Pmf.from_probs([0.3, 0.7]), useless) == (1, 1)

    def test_ties_go_to_smallest_message(self):
        from pasbounds.channel import Dmc, factor
        useless = factor(Dmc(range(4), (0,), np.ones((4, 1))), (0, 1), (0, 1))
        code = sample_code_iid(2, (0, 1), Pmf.uniform((0, 1)), np.random.default_rng(0))
        assert map_decode([0, 0], code, Pmf.uniform((0, 1)), useless) == (0, 0)


class TestExactError:
    @pytest.mark.parametrize("setup,n", [("systematic", 2), ("mismatched", 2), ("pas", 2),
                                         ("classical", 2), ("systematic", 3)])
    def test_matches_loop_enumeration(self, fd, setup, n):
        cfg = config(fd, setup, n, seed=9)
        src = source_for(cfg)
        prior = decoder_prior(cfg, src)
        for c in range(3):
            code, perm = sample_code(cfg, c), sample_code_permuter(cfg, c)
            cw = codewords(code, cfg.channel, perm)
            want = oracles.exact_error(cw.tolist(), cfg.dmc.w, prior.tolist(),
                                       src.support.tolist(), src.probs.tolist())
            assert exact_error_probability(code, cfg, perm) == pytest.approx(want, abs=1e-12)

    @pytest.mark.parametrize("setup", ["systematic", "pas", "mismatched"])
    def test_asymmetric_channel(self, setup):
        from pasbounds.channel import Dmc, factor
        rng = np.random.default_rng(21)
        base = Dmc(range(4), range(3), rng.dirichlet(np.ones(3), size=4))
        fd = factor(base, (0, 1), (0, 1))
        half = Pmf.from_probs([0.5, 0.5])
        if setup == "mismatched":
            cfg = SimConfig(setup, 2, base, Pmf((0, 1, 2, 3), [0.4, 0.3, 0.2, 0.1]),
                            px=Pmf.uniform(range(4)), pbar=Pmf((0, 1, 2, 3), [0.5, 0, 0, 0.5]))
        else:
            cfg = SimConfig(setup, 4, fd, Pmf.from_probs([0.7, 0.3]) if setup == "systematic" else half,
                            ps=Pmf.from_probs([0.4, 0.6]), pbar=half)
        src = source_for(cfg)
        prior = decoder_prior(cfg, src)
        for c in range(2):
            code, perm = sample_code(cfg, c), sample_code_permuter(cfg, c)
            cw = codewords(code, cfg.channel, perm)
            want = oracles.exact_error(cw.tolist(), base.w, prior.tolist(),
                                       src.support.tolist(), src.probs.tolist())
            assert exact_error_probability(code, cfg, perm) == pytest.approx(want, abs=1e-12)

    def test_noiseless_channel_no_errors(self):
        fd = make_parallel(make_identity(2), make_identity(2))
        cfg = SimConfig("systematic", 3, fd, Pmf.from_probs([0.6, 0.4]), ps=Pmf.uniform((0, 1)), num_codes=3)
        assert run_ensemble_experiment(cfg).errors == 0.0

    def test_monte_carlo_agrees(self, fd):
        cfg = config(fd, "systematic", 2, seed=2, trials_per_code=4000)
        code = sample_code(cfg, 0)
        exact = exact_error_probability(code, cfg)
        errs = monte_carlo_errors(code, cfg, None, cfg.trials_per_code)
        lo, hi = wilson_interval(errs, cfg.trials_per_code)
        assert lo <= exact <= hi

    def test_infeasible(self, fd):
        with pytest.raises(InfeasibleConfig, match="exceeds"):
            run_ensemble_experiment(config(fd, "systematic", 13, mode="exact"))


class TestExperiment:
    def test_report_fields(self, fd):
        rep = run_ensemble_experiment(config(fd, "systematic", 2, num_codes=20, seed=1))
        assert rep.mode == "exact"
        assert rep.trials == 20
        assert rep.ci_99_upper >= rep.p_hat
        assert rep.verdict == (rep.ci_99_upper <= rep.analytic_bound)
        assert rep.analytic_bound == pytest.approx(2 ** (-2 * rep.analytic_exponent))

    def test_vacuous_bound_still_reports(self, fd):
        rep = run_ensemble_experiment(config(fd, "pas", 4, num_codes=5))
        assert rep.vacuous and rep.verdict
        assert rep.extra["alpha_n"] == pytest.approx(2 * math.log2(5) / 4)

    def test_seed_determinism(self, fd):
        a = run_ensemble_experiment(config(fd, "mismatched", 2, num_codes=10, seed=4)).to_json()
        b = run_ensemble_experiment(config(fd, "mismatched", 2, num_codes=10, seed=4)).to_json()
        assert a == b

    def test_threads_give_same_result(self, fd):
        cfg = config(fd, "pas", 4, num_codes=8, seed=3)
        assert run_ensemble_experiment(cfg, jobs=3).to_json() == run_ensemble_experiment(cfg).to_json()

    def test_monte_carlo_mode(self, fd):
        rep = run_ensemble_experiment(config(fd, "systematic", 2, num_codes=4, trials_per_code=50,
                                             mode="montecarlo"))
        assert rep.trials == 200
        assert float(rep.errors).is_integer()

    def test_permuter_off(self, fd):
        rep = run_ensemble_experiment(config(fd, "pas", 4, num_codes=4, permuter_enabled=False))
        assert rep.extra["permuter_enabled"] is False

    def test_csv_and_json(self, fd):
        rep = run_ensemble_experiment(config(fd, "systematic", 2, num_codes=3))
        lines = rep.to_csv().splitlines()
        assert lines[0] == ",".join(SimReport.CSV_HEADER)
        assert lines[1].startswith("systematic,2,")
        assert json.loads(rep.to_json())["setup"] == "systematic"

    @pytest.mark.parametrize("kw", [dict(ensemble="ldpc"), dict(mode="fast"), dict(q_support_fraction=0.0)])
    def test_invalid_config(self, fd, kw):
        with pytest.raises(ValueError):
            config(fd, "pas", 4, **kw)

    def test_unknown_setup(self, fd):
        with pytest.raises(ValueError, match="setup"):
            SimConfig("bogus", 4, fd, Pmf.uniform(fd.a_labels))

    def test_pas_needs_pbar(self, fd):
        with pytest.raises(ValueError, match="pbar"):
            SimConfig("pas", 4, fd, Pmf.uniform(fd.a_labels), ps=Pmf.uniform(fd.s_labels))
