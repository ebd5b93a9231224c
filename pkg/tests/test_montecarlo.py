"""Simulation oracle: determinism, agreement, splitting, conditioning."""

import numpy as np
import pytest

from quarterwalk.montecarlo import (
    SimConfig,
    estimate_conditional_next,
    estimate_splitting,
    run_manifest,
    simulate_contacts,
)

CFG = SimConfig(paths=120_000, seed=11)


@pytest.fixture(scope="module")
def fib_est(fib_ref):
    return simulate_contacts(fib_ref.model, (1, 1), CFG)


@pytest.fixture(scope="module")
def fgs_est(fgs_ref):
    return simulate_contacts(fgs_ref.model, (1, 1), CFG)


class TestDeterminism:
    def test_bit_identical_rerun(self, fib_ref, fib_est):
        again = simulate_contacts(fib_ref.model, (1, 1), CFG)
        assert again.pmf_hat == fib_est.pmf_hat
        assert np.array_equal(again.hist, fib_est.hist)

    def test_thread_invariance(self, fib_ref, fib_est):
        cfg4 = SimConfig(paths=CFG.paths, seed=CFG.seed, threads=4)
        est4 = simulate_contacts(fib_ref.model, (1, 1), cfg4)
        assert est4.pmf_hat == fib_est.pmf_hat

    def test_seed_changes_result(self, fib_ref, fib_est):
        other = simulate_contacts(fib_ref.model, (1, 1),
                                  SimConfig(paths=CFG.paths, seed=12))
        assert other.pmf_hat != fib_est.pmf_hat


class TestAgreement:
    def test_fibonacci_within_3_sigma(self, fib_ref, fib_est):
        for n in range(11):
            p_hat, se = fib_est.pmf_hat[n]
            exact = fib_ref.known_fn(1, 1, n)
            assert abs(p_hat - exact) <= 4.0 * se, (n, p_hat, exact)

    def test_finite_group_survival(self, fgs_est):
        p_hat, se = fgs_est.pmf_hat[0]
        assert abs(p_hat - 4 / 9) <= 4.0 * se

    def test_total_mass(self, fib_est):
        total = sum(p for p, _ in fib_est.pmf_hat.values())
        frac_trunc = fib_est.truncated_paths / fib_est.paths
        assert total == pytest.approx(1.0 - frac_trunc, abs=1e-12)

    def test_escape_bias_certificate(self, fgs_ref, fgs_est):
        # TV(analytic, simulated) <= escape_epsilon + 3 * combined stderr
        tv, se_sum = 0.0, 0.0
        for n in range(60):
            p = fgs_ref.known_fn(1, 1, n)
            p_hat, se = fgs_est.pmf_hat.get(n, (0.0, 0.0))
            tv += abs(p_hat - p)
            se_sum += se
        assert 0.5 * tv <= fgs_est.escape_epsilon + 3.0 * se_sum

    def test_empirical_recurrence(self, fib_ref):
        # pmf_hat_{n+1}(x) ~ E pmf_hat_n(x + eta) with eta = atom(1,1)
        cfg = SimConfig(paths=150_000, seed=5)
        at11 = simulate_contacts(fib_ref.model, (1, 1), cfg)
        at22 = simulate_contacts(fib_ref.model, (2, 2),
                                 SimConfig(paths=150_000, seed=6))
        for n in range(1, 6):
            lhs, se_l = at11.pmf_hat[n + 1]
            rhs, se_r = at22.pmf_hat[n]
            assert abs(lhs - rhs) <= 4.0 * (se_l + se_r)


class TestBoundaryStart:
    def test_axis_start_always_contacts(self, fib_ref):
        est = simulate_contacts(fib_ref.model, (3, 0),
                                SimConfig(paths=20_000, seed=1))
        assert 0 not in est.pmf_hat
        assert est.hist[0] == 0

    def test_vertical_axis_splitting(self, fib_ref):
        est = simulate_contacts(fib_ref.model, (0, 4),
                                SimConfig(paths=10_000, seed=2))
        spl = estimate_splitting(fib_ref.model, (0, 4),
                                 SimConfig(paths=10_000, seed=2), est)
        assert spl.f_v_hat[0] == 1.0
        assert spl.f_0_hat[0] == 0.0


class TestSplitting:
    def test_symmetric_start(self, fib_ref, fib_est):
        spl = estimate_splitting(fib_ref.model, (1, 1), CFG, fib_est)
        fv, se_v = spl.f_v_hat
        fh, se_h = spl.f_h_hat
        assert abs(fv - fh) <= 4.0 * (se_v + se_h)
        f0, _ = spl.f_0_hat
        assert fv + fh + f0 == pytest.approx(1.0, abs=1e-12)

    def test_far_start_low_information(self, fib_ref):
        cfg = SimConfig(paths=30_000, seed=3)
        spl = estimate_splitting(fib_ref.model, (25, 25), cfg)
        assert spl.low_information
        # alpha_1^25 = 2^-25 ~ 3e-8: essentially no contact observed
        assert spl.f_v_hat[0] <= 1e-4

    def test_splitting_matches_first_contact_lemma(self, fib_ref):
        # moderately far start: f_v ~ alpha_1^i within 4 sigma
        cfg = SimConfig(paths=400_000, seed=4)
        spl = estimate_splitting(fib_ref.model, (8, 8), cfg)
        fv, se = spl.f_v_hat
        assert se > 0
        assert abs(fv - 0.5 ** 8) <= 4.0 * se + 2e-4


class TestConditionalNext:
    def test_far_start_matches_vtilde(self, fib_ref):
        cfg = SimConfig(paths=250_000, seed=9)
        cond = estimate_conditional_next(fib_ref.model, (8, 8), cfg)
        p, se = cond.next_given_v
        assert cond.events_v > 500
        # o(1) in the conditioning lemma at this distance stays well
        # inside the extra 0.02 slack
        assert abs(p - 0.5) <= 4.0 * se + 0.02

    def test_cross_axis_vanishes_with_distance(self, fib_ref):
        crosses = []
        for d, seed in ((2, 21), (4, 22), (8, 23)):
            cfg = SimConfig(paths=150_000, seed=seed)
            cond = estimate_conditional_next(fib_ref.model, (d, d), cfg)
            crosses.append(cond.cross_axis_given_v[0])
        assert crosses[0] > crosses[1] > crosses[2]
        assert crosses[2] <= 0.02

    def test_low_sample_flag(self, fib_ref):
        cond = estimate_conditional_next(fib_ref.model, (22, 22),
                                         SimConfig(paths=5_000, seed=13))
        assert cond.low_sample_count


class TestTruncation:
    def test_max_steps_reported(self, fib_ref):
        cfg = SimConfig(paths=5_000, seed=8, max_steps=5)
        est = simulate_contacts(fib_ref.model, (1, 1), cfg)
        assert est.truncated_paths > 0
        total = sum(p for p, _ in est.pmf_hat.values())
        assert total == pytest.approx(1.0 - est.truncated_paths / est.paths,
                                      abs=1e-12)


class TestManifest:
    def test_fields(self, fib_ref, fib_est):
        man = run_manifest(fib_ref.model, (1, 1), CFG, fib_est)
        assert man["seed"] == CFG.seed
        assert man["paths"] == CFG.paths
        assert man["escape_epsilon"] == CFG.escape_epsilon
        assert len(man["model_hash"]) == 16
        assert man["truncated_paths"] == fib_est.truncated_paths

    def test_csv_schema(self, fib_est):
        lines = fib_est.to_csv().strip().splitlines()
        assert lines[0] == "n,p_hat,stderr"
        n, p, se = lines[1].split(",")
        assert int(n) == 0 and 0.0 < float(p) < 1.0 and float(se) > 0.0
