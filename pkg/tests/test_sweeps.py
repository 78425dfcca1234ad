import io
from collections import defaultdict

import pytest

from urpayload.rate_control import LinkConfig, Method, Scheme
from urpayload.sir_model import SirDistribution
from urpayload.sweeps import (
    Axis,
    PRESET_NAMES,
    SweepSpec,
    preset_rows,
    run_sweep,
    solve,
    write_csv,
)


@pytest.fixture(scope="module")
def dist():
    return SirDistribution.from_beta(0.8, 8)


class TestSweepSpec:
    def test_values_must_be_ordered(self, dist):
        cfg = LinkConfig(2, 200, 1e-3, Scheme.SC)
        with pytest.raises(ValueError, match="ordered"):
            SweepSpec(Axis.EPSILON_TH, (1e-3, 1e-5, 1e-4), cfg, dist, (Method.SC_APPROX,))

    def test_descending_axis_allowed(self, dist):
        cfg = LinkConfig(2, 200, 1e-3, Scheme.SC)
        spec = SweepSpec(
            Axis.EPSILON_TH, (1e-2, 1e-3, 1e-4), cfg, dist, (Method.SC_APPROX,)
        )
        rows = run_sweep(spec)
        assert [r.axis_value for r in rows] == [1e-2, 1e-3, 1e-4]

    def test_method_scheme_consistency(self, dist):
        cfg = LinkConfig(2, 200, 1e-3, Scheme.SC)
        with pytest.raises(ValueError, match="MRC"):
            SweepSpec(Axis.EPSILON_TH, (1e-3,), cfg, dist, (Method.MRC_NUMERIC,))

    def test_empty_values_rejected(self, dist):
        cfg = LinkConfig(2, 200, 1e-3, Scheme.SC)
        with pytest.raises(ValueError):
            SweepSpec(Axis.EPSILON_TH, (), cfg, dist, (Method.SC_APPROX,))


class TestRunSweep:
    def test_single_value_sweep_equals_direct_solve(self, dist):
        cfg = LinkConfig(2, 200, 1e-4, Scheme.SC)
        spec = SweepSpec(Axis.EPSILON_TH, (1e-4,), cfg, dist, (Method.SC_APPROX,))
        (row,) = run_sweep(spec)
        sol = solve(Method.SC_APPROX, dist, cfg)
        assert row.k_star == sol.k_star
        assert row.k_real == sol.k_real
        assert row.predicted_epsilon == sol.predicted_epsilon

    def test_axis_overrides_fixed_field(self, dist):
        cfg = LinkConfig(2, 200, 1e-3, Scheme.SC)
        spec = SweepSpec(Axis.ANTENNAS, (1.0, 4.0), cfg, dist, (Method.SC_APPROX,))
        rows = run_sweep(spec)
        assert [r.antennas for r in rows] == [1, 4]

    def test_worker_count_does_not_change_rows(self, dist):
        cfg = LinkConfig(2, 200, 1e-3, Scheme.SC)
        spec = SweepSpec(
            Axis.EPSILON_TH,
            tuple(10.0**e for e in range(-8, -2)),
            cfg,
            dist,
            (Method.SC_APPROX, Method.FB),
        )
        assert run_sweep(spec, workers=1) == run_sweep(spec, workers=4)

    def test_beta_axis_rebuilds_distribution(self, dist):
        cfg = LinkConfig(2, 200, 1e-3, Scheme.SC)
        spec = SweepSpec(Axis.BETA, (0.2, 2.0), cfg, dist, (Method.SC_APPROX,))
        rows = run_sweep(spec)
        assert [r.beta for r in rows] == [0.2, 2.0]
        assert rows[0].k_star >= rows[1].k_star


class TestCsvWriter:
    def test_byte_stable_output(self, dist):
        cfg = LinkConfig(2, 200, 1e-3, Scheme.SC)
        spec = SweepSpec(Axis.EPSILON_TH, (1e-4, 1e-3), cfg, dist, (Method.SC_APPROX,))
        rows = run_sweep(spec)
        first, second = io.StringIO(), io.StringIO()
        write_csv(rows, first, comments=["fixed header"])
        write_csv(rows, second, comments=["fixed header"])
        assert first.getvalue() == second.getvalue()

    def test_comments_prefixed(self, dist):
        cfg = LinkConfig(2, 200, 1e-3, Scheme.SC)
        spec = SweepSpec(Axis.EPSILON_TH, (1e-3,), cfg, dist, (Method.SC_APPROX,))
        buf = io.StringIO()
        write_csv(run_sweep(spec), buf, comments=["alpha", "beta"])
        lines = buf.getvalue().splitlines()
        assert lines[0] == "# alpha"
        assert lines[1] == "# beta"
        assert lines[2].startswith("axis,")

    def test_no_rows_rejected(self):
        with pytest.raises(ValueError):
            write_csv([], io.StringIO())


class TestPresets:
    def test_known_names(self):
        assert set(PRESET_NAMES) == {"fig2", "fig2pp", "fig3", "fig4", "fig5", "fig6"}
        with pytest.raises(KeyError):
            preset_rows("fig99")

    def test_antenna_preset_monotone_per_family(self):
        rows = preset_rows("fig5")
        families = defaultdict(list)
        for r in rows:
            families[(r.method, r.scheme, r.epsilon_th)].append((r.axis_value, r.k_star))
        assert len(families) == 15
        for pts in families.values():
            ks = [k for _, k in sorted(pts)]
            assert ks == sorted(ks)

    def test_blocklength_preset_asymptotic_rate_constant(self):
        # the asymptotic payload is exactly proportional to n, so its rate
        # column is flat along the axis
        rows = [r for r in preset_rows("fig6") if r.method == "sc_approx"]
        families = defaultdict(list)
        for r in rows:
            families[(r.antennas, r.epsilon_th)].append(r.k_real / r.blocklength)
        for rates in families.values():
            assert max(rates) - min(rates) < 1e-12

    def test_cdf_curve_preset_covers_setups(self):
        rows = preset_rows("fig2pp")
        setups = {r.setup for r in rows}
        assert setups == {"A", "B", "C"}
        for r in rows:
            assert r.cdf_approx >= r.cdf_exact - 1e-15

    def test_bound_curve_preset_ordering(self):
        rows = preset_rows("fig3")
        for r in rows:
            assert r.lower_bound_exact_log <= r.cdf + 1e-15
