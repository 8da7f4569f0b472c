"""
Tests for the core model equations.
"""
import math

import pytest
from hypothesis import assume, given, settings, strategies as st

from errors import (
    AtBifurcationError,
    DomainOverflowError,
    ExponentOverflowError,
    InvalidParamsError,
    InvalidRateError,
    RateUnderflowError,
)
from model import (
    LegacyMweParams,
    LegacyVariant,
    MarketState,
    Params,
    bifurcation_constant,
    bifurcation_rate_at,
    composite_exponent,
    defaults_from_rate,
    expected_return,
    fixed_point,
    iterate,
    legacy_mwe_fixed_point,
    legacy_mwe_path,
    legacy_mwe_step,
    loans_from_rate,
    log_fixed_point,
    next_rate,
    rate_at,
    step,
)
from regime import classify


def _run_until_divergence(i0, p, max_steps=500):
    """Rates from i0 until step raises; returns (rates, error)."""
    state = MarketState.at_rate(i0, p)
    rates = [state.i]
    for _ in range(max_steps):
        try:
            state = step(state, p)
        except (DomainOverflowError, RateUnderflowError) as e:
            return rates, e
        rates.append(state.i)
    return rates, None


class TestParams:
    """Tests for parameter validation and helpers."""

    def test_composite_exponent(self, cycle_params):
        """a is alpha*mu + beta*nu."""
        assert composite_exponent(cycle_params) == pytest.approx(0.998, rel=1e-15)

    def test_rejects_every_bad_field(self):
        """All violations are reported, not just the first."""
        with pytest.raises(InvalidParamsError) as exc:
            Params(alpha=-1.0, beta=0.0, mu=0.5, nu=0.5, k=1.0, l=float('nan'))
        assert len(exc.value.violations) == 3

    def test_rejects_infinite_scale(self):
        """Scales must be finite."""
        with pytest.raises(InvalidParamsError):
            Params(alpha=1.0, beta=1.0, mu=0.5, nu=0.5, k=float('inf'), l=1.0)

    def test_scaled_multiplies_exponents_only(self, cycle_params):
        """Delta scaling leaves k and l alone and multiplies a by Delta squared."""
        scaled = cycle_params.scaled(1.1)
        assert (scaled.k, scaled.l) == (cycle_params.k, cycle_params.l)
        assert scaled.a == pytest.approx(cycle_params.a * 1.21, rel=1e-14)

    def test_with_composite_places_fixed_point(self, params_with):
        """with_composite yields the requested a and fixed point."""
        p = params_with(0.9, 0.04)
        assert p.a == pytest.approx(0.9, rel=1e-15)
        assert fixed_point(p) == pytest.approx(0.04, rel=1e-12)


class TestFixedPoint:
    """Tests for the fixed point of the recurrence."""

    def test_cycle_fixed_point(self, cycle_params):
        """The calm market settles close to 0.04186."""
        assert fixed_point(cycle_params) == pytest.approx(0.04186, abs=5e-5)

    def test_fixed_point_is_invariant(self, cycle_params):
        """One step from the fixed point returns the fixed point."""
        i_fix = fixed_point(cycle_params)
        state = step(MarketState.at_rate(i_fix, cycle_params), cycle_params)
        assert state.i == pytest.approx(i_fix, rel=1e-12)

    def test_no_fixed_point_at_bifurcation(self, bifurcation_params):
        """a = 1 has no fixed point."""
        with pytest.raises(AtBifurcationError):
            fixed_point(bifurcation_params)


class TestStep:
    """Tests for the one-period update."""

    def test_state_is_consistent(self, cycle_params):
        """N and D of the new state follow from its rate."""
        state = step(MarketState.at_rate(0.042, cycle_params), cycle_params)
        assert state.t == 1
        assert state.n_loans == pytest.approx(loans_from_rate(state.i, cycle_params), rel=1e-12)
        assert state.d_defaults == pytest.approx(defaults_from_rate(state.i, cycle_params), rel=1e-12)

    def test_next_rate_matches_step(self, cycle_params):
        """i(t+1) = D^beta / N^alpha."""
        start = MarketState.at_rate(0.042, cycle_params)
        expected = next_rate(start.n_loans, start.d_defaults, cycle_params)
        assert step(start, cycle_params).i == pytest.approx(expected, rel=1e-12)

    def test_loans_and_defaults_power_laws(self, cycle_params):
        """N = (i/k)^-mu and D = (i/l)^nu."""
        assert loans_from_rate(0.042, cycle_params) == pytest.approx((0.042 / 105.5) ** -0.499, rel=1e-12)
        assert defaults_from_rate(0.042, cycle_params) == pytest.approx((0.042 / 0.0096) ** 0.499, rel=1e-12)

    def test_update_depends_only_on_rate(self, cycle_params):
        """Time and stale volumes do not enter the next state."""
        stale = step(MarketState(t=7, i=0.042, n_loans=1.0, d_defaults=1.0), cycle_params)
        fresh = step(MarketState.at_rate(0.042, cycle_params), cycle_params)
        assert (stale.i, stale.n_loans, stale.d_defaults) == (fresh.i, fresh.n_loans, fresh.d_defaults)
        assert stale.t == 8

    @settings(max_examples=300, deadline=None)
    @given(
        alpha=st.floats(0.3, 1.5),
        beta=st.floats(0.3, 1.5),
        mu=st.floats(0.05, 0.8),
        nu=st.floats(0.05, 0.8),
        k=st.floats(0.5, 2.0),
        l=st.floats(0.5, 2.0),
        i=st.floats(0.001, 0.5),
    )
    def test_log_gap_scales_by_a(self, alpha, beta, mu, nu, k, l, i):
        """ln i(t+1) - ln i_fix = a (ln i(t) - ln i_fix)."""
        p = Params(alpha=alpha, beta=beta, mu=mu, nu=nu, k=k, l=l)
        assume(abs(p.a - 1) >= 0.05)
        log_fix = log_fixed_point(p)
        nxt = step(MarketState.at_rate(i, p), p)
        expected = p.a * (math.log(i) - log_fix)
        assert math.log(nxt.i) - log_fix == pytest.approx(expected, rel=1e-9, abs=1e-9)

    def test_rejects_non_positive_rate(self, cycle_params):
        """Rates must be strictly positive."""
        with pytest.raises(InvalidRateError):
            MarketState.at_rate(0.0, cycle_params)

    def test_expected_return(self):
        """A bare loan with zero recovery returns -i."""
        assert expected_return(0.05) == -0.05


class TestRegimesOfMotion:
    """Tests for the three textbook behaviours away from a = 1."""

    def test_stable_approach(self, params_with):
        """a = 0.9 converges monotonically onto the fixed point."""
        p = params_with(0.9, 0.04)
        rates = iterate(0.045, p, 200)
        assert all(b < a for a, b in zip(rates, rates[1:]) if abs(a - 0.04) > 1e-13)
        assert abs(rates[200] - 0.04) < 1e-6

    def test_stable_approach_from_below(self, params_with):
        """a = 0.9 below the fixed point rises monotonically without overshooting."""
        p = params_with(0.9, 0.04)
        i_fix = fixed_point(p)
        rates = iterate(0.035, p, 200)
        assert all(b > a for a, b in zip(rates, rates[1:]) if abs(a - 0.04) > 1e-13)
        assert all(r <= i_fix * (1 + 1e-12) for r in rates)
        assert abs(rates[200] - 0.04) < 1e-6

    def test_bubble_falls_until_underflow(self, params_with):
        """a = 1.1 below the fixed point falls strictly until the underflow guard."""
        rates, error = _run_until_divergence(0.035, params_with(1.1, 0.04))
        assert isinstance(error, RateUnderflowError)
        assert all(b < a for a, b in zip(rates, rates[1:]))

    def test_crash_rises_until_overflow(self, params_with):
        """a = 1.1 above the fixed point rises strictly until the overflow guard."""
        rates, error = _run_until_divergence(0.045, params_with(1.1, 0.04))
        assert isinstance(error, DomainOverflowError)
        assert all(b > a for a, b in zip(rates, rates[1:]))


class TestClosedForm:
    """Tests for the closed-form rate path."""

    def test_time_zero_is_initial_rate(self, cycle_params):
        """rate_at(0) returns i0 unchanged."""
        assert rate_at(0, 0.042, cycle_params) == 0.042

    def test_rejects_negative_time(self, cycle_params):
        """t must be a non-negative integer."""
        with pytest.raises(ValueError):
            rate_at(-1, 0.042, cycle_params)

    def test_at_fixed_point_stays(self, cycle_params):
        """Starting on the fixed point returns it for every t."""
        i_fix = fixed_point(cycle_params)
        assert rate_at(50, i_fix, cycle_params) == pytest.approx(i_fix, rel=1e-12)

    def test_exponent_overflow_is_typed(self, params_with):
        """a**t beyond the guard raises instead of returning inf."""
        with pytest.raises(ExponentOverflowError):
            rate_at(1000, 0.045, params_with(1.1, 0.04))

    def test_bifurcation_point_is_rejected(self, bifurcation_params):
        """The closed form needs a fixed point."""
        with pytest.raises(AtBifurcationError):
            rate_at(3, 0.05, bifurcation_params)

    @pytest.mark.slow
    @settings(max_examples=1000, deadline=None)
    @given(
        a=st.floats(0.5, 0.999),
        share=st.floats(0.1, 0.9),
        alpha=st.floats(0.5, 2.0),
        beta=st.floats(0.5, 2.0),
        k=st.floats(0.9, 1.1),
        l=st.floats(0.9, 1.1),
        i0=st.floats(0.001, 0.5),
    )
    def test_matches_iteration(self, a, share, alpha, beta, k, l, i0):
        """Closed form and t-fold stepping agree to 1e-9 relative over 200 steps."""
        p = Params(alpha=alpha, beta=beta, mu=a * share / alpha, nu=a * (1 - share) / beta, k=k, l=l)
        rates = iterate(i0, p, 200)
        worst = max(abs(rate_at(t, i0, p) - r) / r for t, r in enumerate(rates))
        assert worst < 1e-9


class TestBifurcation:
    """Tests for the a = 1 cases."""

    def test_constant_when_c_is_one(self, bifurcation_params):
        """k = l = 1 keeps i(t) = i0 exactly."""
        assert iterate(0.05, bifurcation_params, 100) == [0.05] * 101

    def test_falls_when_c_below_one(self):
        """c < 1 gives a strictly decreasing rate."""
        p = Params(alpha=1.0, beta=1.0, mu=0.5, nu=0.5, k=2.0, l=2.0)
        assert bifurcation_constant(p) < 1
        rates = iterate(0.05, p, 100)
        assert all(b < a for a, b in zip(rates, rates[1:]))

    def test_rises_when_c_above_one(self):
        """c > 1 gives a strictly increasing rate."""
        p = Params(alpha=1.0, beta=1.0, mu=0.5, nu=0.5, k=0.5, l=0.5)
        assert bifurcation_constant(p) > 1
        rates = iterate(0.05, p, 100)
        assert all(b > a for a, b in zip(rates, rates[1:]))

    def test_closed_form_matches_iteration(self):
        """i(t) = c^t i0 at the bifurcation point."""
        p = Params(alpha=1.0, beta=1.0, mu=0.5, nu=0.5, k=2.0, l=2.0)
        rates = iterate(0.05, p, 100)
        for t in (1, 10, 100):
            assert bifurcation_rate_at(t, 0.05, p) == pytest.approx(rates[t], rel=1e-12)

    def test_closed_form_rejects_other_exponents(self, cycle_params):
        """c^t i0 is only valid at a = 1."""
        with pytest.raises(InvalidParamsError):
            bifurcation_rate_at(5, 0.05, cycle_params)


class TestLegacyModel:
    """Tests for the i0-anchored legacy accelerators."""

    def test_loan_accelerator_fixed_point_is_invariant(self):
        """The legacy fixed point is invariant under its own step."""
        lp = LegacyMweParams(LegacyVariant.LOAN_ACCELERATOR, i0=0.04, alpha=0.8, k=2.0, mu=0.5)
        i_fix = legacy_mwe_fixed_point(lp)
        assert legacy_mwe_step(i_fix, lp) == pytest.approx(i_fix, rel=1e-12)

    def test_crisis_accelerator_uses_alpha_beta(self):
        """The crisis variant's exponent product is alpha*beta."""
        lp = LegacyMweParams(LegacyVariant.CRISIS_ACCELERATOR, i0=0.04, alpha=0.5, k=2.0, beta=0.6)
        assert lp.exponent_product == pytest.approx(0.3)
        assert legacy_mwe_step(0.1, lp) == pytest.approx(0.04 * (0.1 / 2.0) ** 0.3, rel=1e-12)

    def test_zero_exponent_pins_rate_to_anchor(self):
        """With alpha = 0 every step returns i0 exactly."""
        lp = LegacyMweParams(LegacyVariant.LOAN_ACCELERATOR, i0=0.04, alpha=0.0, k=2.0, mu=0.5)
        assert legacy_mwe_path(0.3, lp, 5) == [0.3] + [0.04] * 5

    def test_overflowing_step_raises(self):
        """A rate beyond the log guard is a domain overflow, not infinity."""
        lp = LegacyMweParams(LegacyVariant.LOAN_ACCELERATOR, i0=0.04, alpha=1.0, k=1e-300, mu=2.0)
        with pytest.raises(DomainOverflowError):
            legacy_mwe_step(1.0, lp)

    def test_small_anchor_absorbs_large_ratio(self):
        """A ratio too large for a float still gives the representable anchored rate."""
        lp = LegacyMweParams(LegacyVariant.LOAN_ACCELERATOR, i0=1e-300, alpha=1.0, k=1e-10, mu=1.0)
        assert legacy_mwe_step(1e300, lp) == pytest.approx(1e10, rel=1e-9)

    def test_fixed_point_depends_on_anchor_only_in_legacy_model(self, cycle_params):
        """Doubling i0 moves the legacy fixed point; the unified one takes no i0 at all."""
        lp = LegacyMweParams(LegacyVariant.LOAN_ACCELERATOR, i0=0.04, alpha=0.8, k=2.0, mu=0.5)
        doubled = LegacyMweParams(LegacyVariant.LOAN_ACCELERATOR, i0=0.08, alpha=0.8, k=2.0, mu=0.5)
        assert legacy_mwe_fixed_point(doubled) != pytest.approx(legacy_mwe_fixed_point(lp), rel=1e-6)
        assert classify(cycle_params, 0.042).i_fix == classify(cycle_params, 0.084).i_fix == fixed_point(cycle_params)

    def test_missing_exponent_is_rejected(self):
        """The loan accelerator needs mu."""
        with pytest.raises(InvalidParamsError):
            LegacyMweParams(LegacyVariant.LOAN_ACCELERATOR, i0=0.04, alpha=0.8, k=2.0)
