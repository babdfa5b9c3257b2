import math

import numpy as np
import pytest
import scipy.integrate as si
import scipy.special as sps
import scipy.stats as st

from busemann_lab.igamma_process import (
    batch_increment_sums,
    batch_jump_counts,
    expected_jump_count,
    jump_count,
    marginal_check,
    pos_temp_keep_prob,
    reparam_bound,
    sample_ppp,
    scaled_log_invgamma_cdf,
    small_jump_compensator,
    trajectory,
    zero_temp_couple,
    zero_temp_initials,
    zero_temp_keep_prob,
)
from busemann_lab.special_functions import Rng


def intensity(s, y, alpha):
    return math.exp(-y * (alpha - s)) / (1.0 - math.exp(-y))


class TestQuadratures:
    def test_compensator_matches_dblquad(self):
        alpha, rho, y_min = 2.0, 1.2, 1e-3
        ours = small_jump_compensator(alpha, rho, y_min)
        ref, _ = si.dblquad(
            lambda y, s: y * intensity(s, y, alpha), 0.0, rho, 0.0, y_min
        )
        assert ours == pytest.approx(ref, rel=1e-10)

    def test_compensator_with_thinning(self):
        alpha, rho, y_min = 1.0, 0.8, 1e-3
        ours = small_jump_compensator(
            alpha, rho, y_min, thinning=zero_temp_keep_prob
        )
        ref, _ = si.dblquad(
            lambda y, s: y * intensity(s, y, alpha) * (1.0 - math.exp(-y)),
            0.0,
            rho,
            0.0,
            y_min,
        )
        assert ours == pytest.approx(ref, rel=1e-10)

    def test_compensator_trivial_cases(self):
        assert small_jump_compensator(2.0, 0.0, 1e-6) == 0.0
        assert small_jump_compensator(2.0, 1.0, 0.0) == 0.0

    def test_expected_count_matches_quad(self):
        alpha, delta = 2.0, 1.0
        ours = expected_jump_count(alpha, delta, (0.0, 1.0))
        ref, _ = si.quad(
            lambda y: (math.exp(-y * (alpha - 1.0)) - math.exp(-y * alpha))
            / (y * (1.0 - math.exp(-y))),
            delta,
            80.0,
        )
        assert ours == pytest.approx(ref, rel=1e-9)

    def test_expected_count_empty_interval(self):
        assert expected_jump_count(2.0, 1.0, (0.5, 0.5)) == 0.0


class TestSampler:
    def test_deterministic(self):
        a = sample_ppp(2.0, 1.2, rng=Rng(master_seed=5))
        b = sample_ppp(2.0, 1.2, rng=Rng(master_seed=5))
        assert a.z0 == b.z0
        assert np.array_equal(a.s, b.s) and np.array_equal(a.y, b.y)

    def test_points_sorted_and_in_range(self):
        smp = sample_ppp(2.0, 1.5, rng=Rng(master_seed=6))
        assert np.all(np.diff(smp.s) >= 0)
        assert np.all((smp.s > 0) & (smp.s <= 1.5))
        assert np.all(smp.y >= smp.y_min)
        assert np.all((smp.u > 0) & (smp.u < 1))

    def test_validation(self):
        with pytest.raises(ValueError):
            sample_ppp(2.0, 2.5, rng=Rng(master_seed=0))
        with pytest.raises(ValueError, match="infinite mass"):
            sample_ppp(2.0, 1.0, y_min=0.0, rng=Rng(master_seed=0))
        with pytest.raises(ValueError):
            sample_ppp(2.0, 1.0)

    def test_trajectory_monotone(self):
        smp = sample_ppp(2.0, 1.5, rng=Rng(master_seed=7))
        vals = [trajectory(smp, r) for r in np.linspace(0.0, 1.5, 30)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        assert vals[0] == smp.z0
        with pytest.raises(ValueError):
            trajectory(smp, 1.6)

    def test_jump_count_of_sample(self):
        smp = sample_ppp(2.0, 1.0, rng=Rng(master_seed=8))
        n = jump_count(smp, 0.5, (0.0, 1.0))
        assert n == int(np.sum(smp.y >= 0.5))
        with pytest.raises(ValueError):
            jump_count(smp, 0.0, (0.0, 1.0))


class TestBatchStatistics:
    def test_marginal_law(self):
        res = marginal_check(2.0, 1.2, 20000, Rng(master_seed=9))
        assert res.p_value > 1e-3

    def test_increment_beta_law(self):
        # e^{-(Z(rho) - Z(lam))} ~ Beta(alpha - rho, rho - lam).
        inc = batch_increment_sums(2.0, [0.4, 1.2], 20000, Rng(master_seed=10))
        ratio = np.exp(-inc[:, 1])
        assert st.kstest(ratio, st.beta(0.8, 0.8).cdf).pvalue > 1e-3

    def test_increments_independent(self):
        inc = batch_increment_sums(2.0, [0.4, 1.2], 20000, Rng(master_seed=11))
        corr = np.corrcoef(inc[:, 0], inc[:, 1])[0, 1]
        assert abs(corr) < 3.0 / math.sqrt(20000)

    def test_breaks_validation(self):
        with pytest.raises(ValueError):
            batch_increment_sums(2.0, [1.2, 0.4], 10, Rng(master_seed=0))
        with pytest.raises(ValueError):
            batch_increment_sums(2.0, [2.5], 10, Rng(master_seed=0))

    def test_jump_counts_poisson(self):
        counts = batch_jump_counts(2.0, 1.0, (0.0, 1.0), 20000, Rng(master_seed=12))
        mu = expected_jump_count(2.0, 1.0, (0.0, 1.0))
        assert abs(counts.mean() - mu) < 3 * counts.std() / math.sqrt(20000)
        var_ratio = counts.var() / mu
        assert abs(var_ratio - 1.0) < 0.05

    def test_jump_counts_cutoff_check(self):
        with pytest.raises(ValueError):
            batch_jump_counts(2.0, 1e-7, (0.0, 1.0), 10, Rng(master_seed=0))


class TestScaledCdf:
    def test_matches_scipy_invgamma(self):
        alpha = 0.7
        z = np.linspace(-3.0, 8.0, 25)
        ours = scaled_log_invgamma_cdf(alpha, z)
        ref = st.invgamma(alpha).cdf(np.exp(z / alpha))
        assert np.max(np.abs(ours - ref)) < 1e-12

    def test_small_alpha_approaches_exponential(self):
        z = np.linspace(0.05, 5.0, 20)
        ours = scaled_log_invgamma_cdf(0.01, z)
        ref = 1.0 - np.exp(-z)
        assert np.max(np.abs(ours - ref)) < 0.05


class TestZeroTemperature:
    def test_keep_probs(self):
        y = np.linspace(1e-4, 10.0, 200)
        p0 = zero_temp_keep_prob(y)
        pa = pos_temp_keep_prob(y, 0.5)
        assert np.all((p0 > 0) & (p0 < 1))
        assert np.all(pa <= 1.0 + 1e-12)
        # The positive-temperature profile keeps every zero-temperature jump.
        assert np.all(pa >= p0 - 1e-12)

    def test_initials_comonotone(self):
        lo = zero_temp_initials(0.5, 0.2)
        hi = zero_temp_initials(0.5, 0.8)
        assert lo[0] < hi[0] and lo[1] < hi[1]
        assert lo[1] == pytest.approx(-math.log1p(-0.2), abs=1e-12)
        # The first component inverts the scaled CDF.
        assert float(scaled_log_invgamma_cdf(0.5, lo[0])) == pytest.approx(
            0.2, abs=1e-9
        )

    def test_couple_gap_nonnegative(self):
        smp = sample_ppp(1.0, 0.9, rng=Rng(master_seed=13))
        grid, prof_a, prof_0 = zero_temp_couple(smp, 0.3)
        assert np.all(prof_a - prof_0 >= -1e-12)
        assert prof_a[0] == 0.0 and prof_0[0] == 0.0
        assert np.all(np.diff(prof_a) >= 0) and np.all(np.diff(prof_0) >= 0)

    def test_couple_gap_shrinks_with_alpha(self):
        alphas = (0.5, 0.2, 0.1)
        totals = {a: 0.0 for a in alphas}
        for r in range(60):
            smp = sample_ppp(1.0, 0.5, rng=Rng(master_seed=14, stream_id=r))
            for a in alphas:
                _, pa, p0 = zero_temp_couple(smp, a)
                totals[a] += float(np.max(pa - p0))
        gaps = [totals[a] / 60 for a in alphas]
        assert gaps[0] > gaps[1] > gaps[2] >= 0.0

    def test_couple_validation(self):
        smp = sample_ppp(1.0, 0.9, rng=Rng(master_seed=15))
        with pytest.raises(ValueError):
            zero_temp_couple(smp, 1.5)
        other = sample_ppp(2.0, 0.9, rng=Rng(master_seed=15))
        with pytest.raises(ValueError):
            zero_temp_couple(other, 0.5)

    def test_zero_profile_marginal(self):
        # Z0(rho) - Z0(0) has jump sums whose total with an Exp(1) initial
        # value is Exp(1 - rho).
        rho = 0.5
        rng = Rng(master_seed=16)
        inc = batch_increment_sums(
            1.0, [rho], 10000, rng.spawn(1), thinning=zero_temp_keep_prob
        )[:, 0]
        z0 = -np.log1p(-rng.spawn(2).uniforms(10000)) + inc
        assert st.kstest(z0, st.expon(scale=1 / (1 - rho)).cdf).pvalue > 1e-3


class TestReparamBound:
    @pytest.mark.parametrize("alpha", [1.0, 0.5, 0.1])
    def test_bound_holds(self, alpha):
        assert reparam_bound(alpha) <= (math.pi ** 2 / 3.0) * alpha ** 2

    def test_matches_direct_computation(self):
        alpha = 0.5
        xi1 = np.linspace(0.0, 1.0, 1002)[1:-1]
        r1 = np.sqrt(1 - xi1)
        s0 = r1 / (r1 + np.sqrt(xi1))
        rho = alpha * s0
        u1 = sps.polygamma(1, rho) / (
            sps.polygamma(1, rho) + sps.polygamma(1, alpha - rho)
        )
        direct = float(np.max(2 * np.abs(u1 - xi1)))
        assert reparam_bound(alpha, grid_size=1000) == pytest.approx(
            direct, rel=1e-10
        )

    def test_validation(self):
        with pytest.raises(ValueError):
            reparam_bound(0.0)
