import numpy as np
import pytest

from pass_ma.baselines import CON2_SWEEP, con1_gain, con1_power, con2_elements, con2_gain, con2_power
from pass_ma.channel import Geometry, UserPos, coherent_upper_bound
from pass_ma.power import RateRequirements, noma_total_power, scheme_power
from pass_ma.solver import solve

from conftest import random_users


def test_con1_gain_under_feed(cfg, geo):
    assert con1_gain(UserPos(0, 0), cfg, geo) == pytest.approx(cfg.eta ** 2 / 9, rel=1e-14)


def test_con1_zero_rates(cfg, geo):
    assert con1_power("noma", (UserPos(3, 1), UserPos(9, 2)), RateRequirements(0, 0), cfg, geo).total == 0.0


def test_con1_noma_tie(cfg, geo):
    users = (UserPos(4, 2), UserPos(4, -2))
    g = con1_gain(users[0], cfg, geo)
    sol = con1_power("noma", users, RateRequirements(), cfg, geo)
    assert sol.total == pytest.approx(7 * 8 * 1e-12 / g + 7 * 1e-12 / g, rel=1e-12)
    assert sol.total == noma_total_power(g, g, RateRequirements(), 1).total


@pytest.mark.parametrize("scheme", ["noma", "fdma", "tdma"])
def test_con2_single_element_is_con1(cfg, geo, scheme):
    users = (UserPos(5, 2), UserPos(11, -3))
    a = con2_power(scheme, users, RateRequirements(), 1, cfg, geo).total
    b = con1_power(scheme, users, RateRequirements(), cfg, geo).total
    assert a == pytest.approx(b, rel=1e-12)


def test_con2_tdma_gain_is_coherent_bound_over_n(cfg, geo):
    u = UserPos(7.0, 2.0)
    xs = con2_elements(6, cfg)
    r = np.hypot(u.x - xs, u.lateral(geo.d))
    w = np.exp(1j * cfg.k0 * r) / np.sqrt(6)
    bound = (np.sum(cfg.eta / r)) ** 2 / 6
    assert con2_gain(u, w, cfg, geo) == pytest.approx(bound, rel=1e-12)
    # same thing through the reference helper (no waveguide phase in Con2)
    assert bound * 6 == pytest.approx(
        (cfg.eta * np.sum(1 / r)) ** 2, rel=1e-12)


def test_con2_sweep_includes_endpoints(cfg, geo):
    assert CON2_SWEEP[0] == 0.0 and CON2_SWEEP[-1] == 1.0
    users = (UserPos(3, 2), UserPos(12, -5))
    xs = con2_elements(6, cfg)
    ph = [cfg.k0 * np.hypot(u.x - xs, u.lateral(geo.d)) for u in users]
    ends = []
    for p in ph:
        w = np.exp(1j * p) / np.sqrt(6)
        ends.append(scheme_power("noma", con2_gain(users[0], w, cfg, geo), con2_gain(users[1], w, cfg, geo),
                                 RateRequirements(), 1).total)
    assert con2_power("noma", users, RateRequirements(), 6, cfg, geo).total <= min(ends)


def test_pass_beats_baselines_for_far_users(cfg, geo, rng):
    checked = 0
    while checked < 6:
        users = random_users(rng)
        if min(np.hypot(u.x, u.lateral(geo.d)) for u in users) <= 5.0:
            continue
        checked += 1
        for ma in ("noma", "fdma", "tdma"):
            p = solve(ma, users, RateRequirements(), cfg, geo).total_power
            assert p < solve(f"con1_{ma}", users, RateRequirements(), cfg, geo).total_power
            assert p < solve(f"con2_{ma}", users, RateRequirements(), cfg, geo).total_power


def test_coherent_bound_helper_consistent(cfg):
    geo = Geometry(N=1)
    u = UserPos(2.0, 1.0)
    assert coherent_upper_bound(u, [0.0], cfg, geo) == pytest.approx(con1_gain(u, cfg, geo), rel=1e-12)
