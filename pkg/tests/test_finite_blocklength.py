import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from urpayload.finite_blocklength import (
    channel_dispersion,
    fb_error_average,
    fb_error_conditional,
    fb_kstar,
    shannon_capacity,
)
from urpayload.numerics import QuadratureSpec
from urpayload.rate_control import (
    LinkConfig,
    Scheme,
    combined_sir_pdf,
    mrc_kstar,
    sc_kstar_approx,
)
from urpayload.sir_model import SirDistribution

LOG2E_SQ = 2.0813689810056078  # (log2 e)^2, 50-digit frozen
# Frozen 50-digit arithmetic oracle for Q((1 - 0.5)/sqrt(V(1)/200)).
FB_COND_REFERENCE = 7.589713965684782e-9
V_AT_ONE = 1.5610267357542058


class TestShannonCapacity:
    @pytest.mark.parametrize("sir,expected", [(0.0, 0.0), (1.0, 1.0), (3.0, 2.0)])
    def test_exact_points(self, sir, expected):
        assert shannon_capacity(sir) == pytest.approx(expected, rel=1e-14)

    def test_array_input(self):
        out = shannon_capacity(np.array([0.0, 1.0, 3.0]))
        assert np.allclose(out, [0.0, 1.0, 2.0])


class TestChannelDispersion:
    def test_zero_sir(self):
        assert channel_dispersion(0.0) == 0.0

    def test_high_sir_limit(self):
        assert channel_dispersion(1e12) == pytest.approx(LOG2E_SQ, rel=1e-9)

    def test_reference_point(self):
        assert channel_dispersion(1.0) == pytest.approx(V_AT_ONE, rel=1e-12)
        assert channel_dispersion(1.0) == pytest.approx(0.75 * LOG2E_SQ, rel=1e-12)


class TestFbErrorConditional:
    def test_rate_at_capacity_is_half(self):
        sir = 1.5
        k = shannon_capacity(sir) * 200
        assert fb_error_conditional(sir, k, 200) == pytest.approx(0.5, rel=1e-12)

    def test_deep_margin_vanishes(self):
        assert fb_error_conditional(1e6, 10, 200) < 1e-300

    def test_zero_sir_fails_certainly(self):
        assert fb_error_conditional(0.0, 10, 200) == 1.0

    def test_arithmetic_reference(self):
        assert fb_error_conditional(1.0, 100, 200) == pytest.approx(
            FB_COND_REFERENCE, rel=1e-12
        )

    def test_array_matches_scalar(self):
        sirs = np.array([0.0, 0.5, 1.0, 4.0])
        vec = fb_error_conditional(sirs, 50, 200)
        for s, v in zip(sirs, vec):
            assert v == pytest.approx(fb_error_conditional(float(s), 50, 200), rel=1e-12)

    @given(st.floats(min_value=0.01, max_value=100.0), st.integers(min_value=1, max_value=400))
    @settings(max_examples=50)
    def test_monotone_in_payload(self, sir, k):
        assert fb_error_conditional(sir, k + 1, 200) >= fb_error_conditional(sir, k, 200)


class TestFbErrorAverage:
    def test_concentrated_density_recovers_conditional(self):
        # near-delta triangular density at sir0
        sir0, width = 1.4, 1e-4

        def spike(x):
            d = abs(x - sir0)
            return max(0.0, (width - d) / width / width)

        result = fb_error_average(spike, 100, 200)
        assert result.epsilon_fb == pytest.approx(
            fb_error_conditional(sir0, 100, 200), rel=1e-4
        )

    def test_headline_four_bits_at_target(self, main_dist):
        # with two antennas over 200 uses, four bits meet a 7e-5 target and
        # five do not
        density = combined_sir_pdf(main_dist, 2, Scheme.SC)
        at_four = fb_error_average(density, 4, 200).epsilon_fb
        at_five = fb_error_average(density, 5, 200).epsilon_fb
        assert at_four <= 7e-5 < at_five

    def test_against_sampled_expectation(self, main_dist, rng):
        # independent oracle: average the conditional error over 1e7 draws of
        # the model's own combined SIR (selection combining of scaled Lomax,
        # drawn in chunks to bound memory)
        antennas, k, n, size, chunk = 4, 60, 200, 10**7, 10**6
        eta, beta = main_dist.eta, main_dist.beta
        total, total_sq, done = 0.0, 0.0, 0
        while done < size:
            m = min(chunk, size - done)
            per_antenna = (eta / beta) * (
                np.power(1.0 - rng.random((m, antennas)), -1.0 / eta) - 1.0
            )
            values = fb_error_conditional(per_antenna.max(axis=1), k, n)
            total += float(values.sum())
            total_sq += float(np.square(values).sum())
            done += m
        mc_mean = total / size
        mc_sigma = math.sqrt(max(total_sq / size - mc_mean**2, 0.0) / size)
        density = combined_sir_pdf(main_dist, antennas, Scheme.SC)
        result = fb_error_average(density, k, n)
        assert abs(result.epsilon_fb - mc_mean) < 3.0 * mc_sigma

    def test_quadrature_estimate_is_tight(self, main_dist):
        density = combined_sir_pdf(main_dist, 2, Scheme.SC)
        result = fb_error_average(density, 4, 200)
        assert result.quadrature_error_estimate < 1e-10
        assert 0.0 <= result.epsilon_fb <= 1.0

    def test_short_blocklength_warns(self, main_dist):
        density = combined_sir_pdf(main_dist, 1, Scheme.SC)
        with pytest.warns(UserWarning, match="n >= 100"):
            fb_error_average(density, 4, 50)


class TestFbKstar:
    def test_headline_payload(self, main_dist):
        cfg = LinkConfig(2, 200, 7e-5, Scheme.SC)
        sol = fb_kstar(main_dist, cfg)
        assert abs(sol.k_star - 4) <= 1
        assert sol.predicted_epsilon <= 7e-5

    def test_close_to_asymptotic_for_large_payloads(self):
        # when the asymptotic payload is far above ~100 bits the two
        # formulations agree to within a couple of bits
        dist = SirDistribution.from_beta(0.05, 8)
        cfg = LinkConfig(2, 200, 1e-3, Scheme.SC)
        asym = sc_kstar_approx(dist, cfg)
        fb = fb_kstar(dist, cfg)
        assert asym.k_star > 100
        assert abs(fb.k_star - asym.k_star) <= 2

    def test_relative_gap_small_for_large_payloads(self):
        # at many antennas the absolute gap drifts to a few bits; relative
        # agreement stays below 2% (measured: 4/547 ~ 0.7%)
        dist = SirDistribution.from_beta(0.1, 8)
        cfg = LinkConfig(8, 200, 1e-3, Scheme.SC)
        asym = sc_kstar_approx(dist, cfg)
        fb = fb_kstar(dist, cfg)
        assert asym.k_star > 100
        assert abs(fb.k_star - asym.k_star) / asym.k_star < 0.02

    def test_small_payload_gap_is_wider(self, main_dist):
        cfg = LinkConfig(2, 200, 7e-5, Scheme.SC)
        asym = sc_kstar_approx(main_dist, cfg)
        fb = fb_kstar(main_dist, cfg)
        assert asym.k_star <= 30
        assert fb.k_star < asym.k_star

    @pytest.mark.parametrize("eps", [1e-6, 1e-4])
    def test_equals_exhaustive_grid_search(self, eps):
        # eps=1e-6 is infeasible here (not even one bit fits): the search and
        # the exhaustive grid must agree on that too
        dist = SirDistribution.from_beta(0.8, 8)
        cfg = LinkConfig(2, 400, eps, Scheme.SC)
        sol = fb_kstar(dist, cfg)
        density = combined_sir_pdf(dist, 2, Scheme.SC)
        feasible = [
            k
            for k in range(1, 801)
            if fb_error_average(density, k, 400).epsilon_fb <= eps
        ]
        if feasible:
            assert sol.k_star == max(feasible)
            assert not sol.infeasible
        else:
            assert sol.k_star == 0
            assert sol.infeasible

    def test_never_far_above_asymptotic(self, main_dist):
        for antennas, eps in ((1, 1e-2), (2, 1e-4), (4, 1e-6)):
            cfg = LinkConfig(antennas, 200, eps, Scheme.SC)
            asym = sc_kstar_approx(main_dist, cfg)
            fb = fb_kstar(main_dist, cfg)
            assert fb.k_star <= asym.k_star + 2
            mrc_cfg = LinkConfig(antennas, 200, eps, Scheme.MRC)
            asym_mrc = mrc_kstar(main_dist, mrc_cfg)
            fb_mrc = fb_kstar(main_dist, mrc_cfg)
            assert fb_mrc.k_star <= asym_mrc.k_star + 2

    def test_error_strictly_increasing_in_payload(self, main_dist):
        density = combined_sir_pdf(main_dist, 2, Scheme.SC)
        values = [fb_error_average(density, k, 200).epsilon_fb for k in range(1, 40, 4)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_rate_gap_shrinks_with_blocklength(self):
        dist = SirDistribution.from_beta(0.8, 8)
        gaps = []
        for n in (200, 400, 800, 1600):
            cfg = LinkConfig(2, n, 1e-6, Scheme.SC)
            asym = sc_kstar_approx(dist, cfg)
            fb = fb_kstar(dist, cfg)
            gaps.append(abs(fb.k_star / n - asym.k_real / n))
        assert all(b <= a for a, b in zip(gaps, gaps[1:]))

    def test_infeasible_flag(self):
        dist = SirDistribution.from_beta(50.0, 2)
        sol = fb_kstar(dist, LinkConfig(1, 200, 1e-9, Scheme.SC))
        assert sol.k_star == 0 and sol.infeasible

    def test_mrc_scheme_dispatch(self, main_dist):
        cfg = LinkConfig(4, 200, 1e-5, Scheme.MRC)
        sol = fb_kstar(main_dist, cfg)
        asym = mrc_kstar(main_dist, cfg)
        assert 0 < sol.k_star <= asym.k_star + 2
        assert sol.predicted_epsilon <= 1e-5

    def test_tight_quadrature_spec_accepted(self, main_dist):
        cfg = LinkConfig(2, 200, 7e-5, Scheme.SC)
        sol = fb_kstar(main_dist, cfg, spec=QuadratureSpec(rel_tol=1e-8, abs_tol=1e-13))
        assert abs(sol.k_star - 4) <= 1
