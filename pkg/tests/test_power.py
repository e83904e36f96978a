import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pass_ma.errors import UnreachableUserError
from pass_ma.power import (USER1_STRONG, USER2_STRONG, RateRequirements, dbm_to_watt, fdma_power,
                           fdma_rate, noma_power_alloc, noma_rate, noma_total_power,
                           power_coefficients, scheme_power, sic_order, tdma_power, tdma_rate,
                           watt_to_dbm)

gains = st.floats(1e-12, 1e-4)
rates = st.floats(0.0, 8.0)


def test_dbm_conversions():
    assert dbm_to_watt(-90) == pytest.approx(1e-12, rel=1e-12)
    assert watt_to_dbm(1e-3) == pytest.approx(0.0, abs=1e-12)
    assert watt_to_dbm(0.0) == float("-inf")


def test_sic_order_examples():
    assert sic_order(2e-8, 1e-8) == USER1_STRONG
    assert sic_order(1e-8, 2e-8) == USER2_STRONG
    assert sic_order(1e-8, 1e-8) == USER1_STRONG
    with pytest.raises(UnreachableUserError):
        sic_order(0.0, 1e-8)


def test_noma_hand_values():
    reqs = RateRequirements(1, 1, 1e-12, 1e-12)
    sol = noma_power_alloc(1e-7, 1e-7, USER1_STRONG, reqs, 6)
    assert sol.P1 == pytest.approx(6e-5, rel=1e-12)
    assert sol.P2 == pytest.approx(1.2e-4, rel=1e-12)


def test_noma_zero_rates():
    sol = noma_total_power(1e-8, 3e-8, RateRequirements(0, 0), 6)
    assert sol.P1 == 0.0 and sol.P2 == 0.0


@given(gains, gains, rates, rates)
def test_noma_total_matches_objective_identity(g1, g2, y1, y2):
    reqs = RateRequirements(y1, y2)
    n = 6 * 1e-12
    expected = (2 ** y1 - 1) * 2 ** y2 * n / g1 + (2 ** y2 - 1) * n / g2
    assert noma_power_alloc(g1, g2, USER1_STRONG, reqs, 6).total == pytest.approx(expected, rel=1e-9)


def test_noma_symmetric_tie_goes_to_user1_strong():
    sol = noma_total_power(2e-8, 2e-8, RateRequirements(3, 3), 6)
    assert sol.order == USER1_STRONG


def test_noma_strong_user1_picks_user1_strong():
    assert noma_total_power(1e-6, 1e-9, RateRequirements(3, 3), 6).order == USER1_STRONG


def test_noma_gamma1_zero_limit():
    reqs = RateRequirements(0, 2.5)
    sol = noma_total_power(3e-8, 1e-8, reqs, 6)
    assert sol.total == pytest.approx((2 ** 2.5 - 1) * 6e-12 / 1e-8, rel=1e-12)
    assert sol.P1 == 0.0


def test_fdma_hand_values():
    sol = fdma_power(1e-7, 1e-7, RateRequirements(0.5, 0.0), 6)
    assert sol.P1 == pytest.approx(3e-5, rel=1e-12)
    assert sol.P2 == 0.0
    g = 4.2e-9
    assert fdma_power(g, g, RateRequirements(), 6).P1 == pytest.approx(63 * 6e-12 / (2 * g), rel=1e-12)


def test_tdma_same_shape_as_fdma():
    reqs = RateRequirements(2.0, 1.5, 1e-12, 2e-12)
    a, b = fdma_power(3e-8, 5e-9, reqs, 4), tdma_power(3e-8, 5e-9, reqs, 4)
    assert (a.P1, a.P2) == (b.P1, b.P2)
    sym = tdma_power(1e-8, 1e-8, RateRequirements(3, 3), 6)
    assert sym.P1 == sym.P2


def test_noma_rate_reduces_without_interference():
    assert noma_rate(1, 2e-3, 5e-3, 1e-8, USER1_STRONG, 1e-12, 6) == pytest.approx(
        math.log2(1 + 2e-3 * 1e-8 / 6e-12), rel=1e-14)
    assert noma_rate(1, 0.0, 5e-3, 1e-8, USER2_STRONG, 1e-12, 6) == 0.0


@given(gains, gains, rates, rates, st.sampled_from([USER1_STRONG, USER2_STRONG]))
def test_noma_round_trip(g1, g2, y1, y2, order):
    reqs = RateRequirements(y1, y2)
    sol = noma_power_alloc(g1, g2, order, reqs, 6)
    r1 = noma_rate(1, sol.P1, sol.P2, g1, order, 1e-12, 6)
    r2 = noma_rate(2, sol.P1, sol.P2, g2, order, 1e-12, 6)
    assert r1 == pytest.approx(y1, rel=1e-9, abs=1e-12)
    assert r2 == pytest.approx(y2, rel=1e-9, abs=1e-12)


@given(gains, gains, rates, rates)
def test_oma_round_trip(g1, g2, y1, y2):
    reqs = RateRequirements(y1, y2)
    f = fdma_power(g1, g2, reqs, 6)
    t = tdma_power(g1, g2, reqs, 6)
    assert fdma_rate(f.P1, g1, 1e-12, 6) == pytest.approx(y1, rel=1e-9, abs=1e-12)
    assert tdma_rate(t.P2, g2, 1e-12, 6) == pytest.approx(y2, rel=1e-9, abs=1e-12)


@given(gains, st.floats(0.0, 1.0), rates, rates)
def test_sic_feasible_when_user1_strong(g1, frac, y1, y2):
    g2 = g1 * frac if frac > 0 else g1 * 1e-3
    reqs = RateRequirements(y1, y2)
    sol = noma_power_alloc(g1, g2, USER1_STRONG, reqs, 6)
    decoded = math.log2(1 + sol.P2 * g1 / (sol.P1 * g1 + 6e-12))
    assert decoded >= y2 - 1e-9
    assert not sol.sic_warning


def test_sic_warning_flag_raised_when_order_mismatches_gains():
    # user 2 decodes first although it is the weaker user
    sol = noma_power_alloc(1e-6, 1e-9, USER2_STRONG, RateRequirements(3, 3), 6)
    assert sol.sic_warning


@given(gains, gains, st.floats(0.1, 6.0), st.floats(0.1, 6.0), st.sampled_from(["noma", "fdma", "tdma"]))
def test_monotone_in_gain_and_rate(g1, g2, y1, y2, scheme):
    base = scheme_power(scheme, g1, g2, RateRequirements(y1, y2), 6).total
    assert scheme_power(scheme, g1 * 1.01, g2, RateRequirements(y1, y2), 6).total < base
    assert scheme_power(scheme, g1, g2 * 1.01, RateRequirements(y1, y2), 6).total < base
    assert scheme_power(scheme, g1, g2, RateRequirements(y1 + 0.01, y2), 6).total > base
    assert scheme_power(scheme, g1, g2, RateRequirements(y1, y2 + 0.01), 6).total > base


@given(gains, gains, rates, rates)
def test_noma_total_is_min_over_orders(g1, g2, y1, y2):
    reqs = RateRequirements(y1, y2)
    best = noma_total_power(g1, g2, reqs, 6).total
    assert best <= noma_power_alloc(g1, g2, USER1_STRONG, reqs, 6).total
    assert best <= noma_power_alloc(g1, g2, USER2_STRONG, reqs, 6).total


@given(gains, gains, rates, rates, st.sampled_from(["noma", "fdma", "tdma"]))
def test_coefficient_form_matches_closed_form(g1, g2, y1, y2, scheme):
    reqs = RateRequirements(y1, y2)
    C = power_coefficients(scheme, reqs, 6)
    unified = min(C[r, 0] / g1 + C[r, 1] / g2 for r in range(C.shape[0]))
    assert unified == pytest.approx(scheme_power(scheme, g1, g2, reqs, 6).total, rel=1e-12)


def test_bad_inputs():
    with pytest.raises(ValueError):
        RateRequirements(-1, 3)
    with pytest.raises(ValueError):
        RateRequirements(3, 3, 0.0, 1e-12)
    with pytest.raises(UnreachableUserError):
        fdma_power(-1.0, 1e-8, RateRequirements(), 6)
    with pytest.raises(ValueError):
        scheme_power("ofdma", 1e-8, 1e-8, RateRequirements(), 6)


def test_round_trip_vectorized_sample():
    # the acceptance count: 1000 tuples, fixed seed
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(1000):
        g1, g2 = 10 ** rng.uniform(-11, -5, 2)
        y1, y2 = rng.uniform(0, 8, 2)
        sol = noma_total_power(g1, g2, RateRequirements(y1, y2), 6)
        r1 = noma_rate(1, sol.P1, sol.P2, g1, sol.order, 1e-12, 6)
        worst = max(worst, abs(r1 - y1) / max(y1, 1e-300))
    assert worst <= 1e-9
