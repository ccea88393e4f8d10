import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from usdsilo import pricing
from usdsilo.bootstrap import UsdDomesticCurves
from usdsilo.errors import EmptyAnnuity, MissingCurve, NonPositiveForward
from usdsilo.synthetic import flat_curve, simple_forwards
from usdsilo.termstructure import DiscountCurve, ForwardCurve, ForwardKind, TenorStructure
from usdsilo.trades import Trade, price_trade


def curve_set(tenor, dfs, libor=None, ois=None, usd=None, **kw):
    dbar = DiscountCurve(tuple(tenor.pillars), tuple(dfs))
    lib = ForwardCurve.on_tenor(tenor, libor, ForwardKind.LIBOR_FORWARD) if libor is not None else None
    oi = ForwardCurve.on_tenor(tenor, ois, ForwardKind.COMPOUNDED_OIS_FORWARD) if ois is not None else None
    return pricing.CurveSet("J", dbar, libor=lib, ois=oi, usd=usd, **kw)


def zero_lois_usd(tenor, rate=0.03):
    return UsdDomesticCurves(flat_curve(rate, tenor.times),
                             ForwardCurve.on_tenor(tenor, [0.0] * tenor.size, ForwardKind.LIBOR_OIS_SPREAD))


class TestIrs:
    def test_constant_forwards(self):
        tenor = TenorStructure.regular(6, 2)
        cs = curve_set(tenor, np.exp(-0.04 * np.array(tenor.pillars)), libor=[0.03] * 6)
        assert pricing.irs_par_rate(cs, tenor, 6) == pytest.approx(0.03, abs=1e-16)

    def test_day_count_ratio_scales_par(self):
        tenor = TenorStructure(0.0, (0.5, 1.0), (0.5 * 360 / 365,) * 2, (0.5, 0.5))
        cs = curve_set(tenor, [0.99, 0.97], libor=[0.025, 0.025])
        assert pricing.irs_par_rate(cs, tenor, 2) == pytest.approx(365 / 360 * 0.025, rel=1e-15)

    def test_two_period_hand_case(self):
        tenor = TenorStructure.regular(2, 2)
        cs = curve_set(tenor, [0.99, 0.97], libor=[0.02, 0.04])
        expected = (0.5 * 0.99 * 0.02 + 0.5 * 0.97 * 0.04) / (0.5 * 0.99 + 0.5 * 0.97)
        assert pricing.irs_par_rate(cs, tenor, 2) == pytest.approx(expected, rel=1e-15)
        assert pricing.irs_par_rate(cs, tenor, 2) == pytest.approx(0.029898, abs=5e-7)

    def test_missing_libor(self):
        tenor = TenorStructure.regular(2, 2)
        with pytest.raises(MissingCurve):
            pricing.irs_par_rate(curve_set(tenor, [0.99, 0.97]), tenor, 2)


class TestEffectiveSwapRate:
    def test_flat_discounting(self):
        tenor = TenorStructure.regular(2, 1)
        assert pricing.effective_swap_rate(DiscountCurve((1.0, 2.0), (1.0, 1.0)), tenor, 0, 2) == 0.0

    def test_simple_yield(self):
        tenor = TenorStructure.regular(1, 1)
        s = pricing.effective_swap_rate(DiscountCurve((1.0,), (0.95,)), tenor, 0, 1)
        assert s == pytest.approx(0.05 / 0.95, rel=1e-15)
        assert s == pytest.approx(0.052632, abs=5e-7)

    def test_small_step_limit(self):
        r = 0.05
        tenor = TenorStructure.regular(252, 252)
        s = pricing.effective_swap_rate(flat_curve(r, tenor.times), tenor, 0, 252)
        # simple-compounded daily rate of a continuous rate r
        assert s == pytest.approx(math.expm1(r / 252) * 252, rel=1e-12)
        assert abs(s - r) < r * r / 252

    def test_empty_annuity(self):
        tenor = TenorStructure(0.0, (1.0,), (1.0,), (1.0,))
        # a zero annuity cannot occur with positive dfs; the guard is exercised directly
        with pytest.raises(EmptyAnnuity):
            pricing._ratio(1.0, 0.0)
        assert pricing.annuity(DiscountCurve((1.0,), (0.9,)), tenor, 0, 1) == 0.9


class TestMtmccs:
    def test_zero_lois_kills_usd_leg(self, world):
        cs = world.curves
        flat = pricing.CurveSet("J", cs.dbar, libor=cs.libor, usd=zero_lois_usd(world.tenor))
        _, pv_usd = pricing.mtmccs_leg_pvs(flat, world.tenor, 20, 0.001)
        assert pv_usd == 0.0

    def test_par_spread_prices_to_zero(self, world):
        for m in (1, 7, 40):
            b = pricing.mtmccs_par_spread(world.curves, world.tenor, m)
            pv_j, pv_usd = pricing.mtmccs_leg_pvs(world.curves, world.tenor, m, b)
            assert abs(pv_j - pv_usd) < 1e-14

    def test_one_period_hand_case(self):
        tenor = TenorStructure.regular(1, 1)
        usd = UsdDomesticCurves(DiscountCurve((1.0,), (0.97,)),
                                ForwardCurve.on_tenor(tenor, [0.002], ForwardKind.LIBOR_OIS_SPREAD))
        dbar1 = (1 + 0.97 * 0.002) / 1.06
        cs = curve_set(tenor, [dbar1], libor=[0.05], usd=usd)
        pv_j, pv_usd = pricing.mtmccs_leg_pvs(cs, tenor, 1, 0.01)
        assert pv_j == pytest.approx(-1 + dbar1 * 1.06, abs=1e-16)
        assert pv_usd == pytest.approx(0.97 * 0.002, abs=1e-16)
        assert pv_j == pytest.approx(pv_usd, abs=1e-15)

    def test_degenerate_swap_difference(self, world):
        cs = world.curves
        flat = pricing.CurveSet("J", cs.dbar, libor=cs.libor, usd=zero_lois_usd(world.tenor))
        for m in range(1, 41):
            b = pricing.mtmccs_par_spread(flat, world.tenor, m)
            s = pricing.effective_swap_rate(cs.dbar, world.tenor, 0, m) - pricing.irs_par_rate(cs, world.tenor, m)
            assert abs(b - s) <= 1e-14

    def test_zero_when_effective_equals_scaled_irs(self):
        tenor = TenorStructure.regular(8, 4)
        dbar = flat_curve(0.04, tenor.times)
        cs = pricing.CurveSet("J", dbar, libor=ForwardCurve.on_tenor(
            tenor, simple_forwards(dbar, tenor), ForwardKind.LIBOR_FORWARD), usd=zero_lois_usd(tenor))
        assert abs(pricing.mtmccs_par_spread(cs, tenor, 8)) < 1e-15

    def test_reproduces_quotes(self, world):
        q = world.libor_quotes()
        from usdsilo import bootstrap
        dbar = bootstrap.bootstrap_effective_discount_libor(q, world.curves.usd)
        libor = bootstrap.extract_libor_forwards(q, dbar)
        cs = pricing.CurveSet("J", dbar, libor=libor, usd=world.curves.usd)
        for m in range(1, 41):
            assert abs(pricing.mtmccs_par_spread(cs, world.tenor, m) - q.ccs_basis[m - 1]) < 1e-12


class TestFx:
    def test_spot_at_anchor_and_equal_funding(self, world):
        cs = world.curves
        assert pricing.fx_forward_usd(cs, 0.0) == cs.fx_spot_usd_per_j
        same = pricing.CurveSet("J", cs.usd.ois_discount, usd=cs.usd, fx_spot_usd_per_j=0.0125)
        assert pricing.fx_forward_usd(same, 3.0) == 0.0125

    def test_hand_ratio(self):
        tenor = TenorStructure.regular(1, 1)
        usd = UsdDomesticCurves(DiscountCurve((1.0,), (0.97,)),
                                ForwardCurve.on_tenor(tenor, [0.0], ForwardKind.LIBOR_OIS_SPREAD))
        cs = pricing.CurveSet("J", DiscountCurve((1.0,), (0.95,)), usd=usd, fx_spot_usd_per_j=0.0125)
        assert pricing.fx_forward_usd(cs, 1.0) == pytest.approx(0.0125 * 0.95 / 0.97, rel=1e-15)
        assert pricing.fx_forward_usd(cs, 1.0) == pytest.approx(0.012242, abs=5e-7)
        assert pricing.fx_forward_j_per_usd(cs, 1.0) == pytest.approx(0.97 / (0.0125 * 0.95), rel=1e-15)

    def test_cross(self, world):
        cs = world.curves
        spot = cs.fx_spot_usd_per_k / cs.fx_spot_usd_per_j
        assert pricing.fx_forward_cross(cs, 0.0) == spot
        same = pricing.CurveSet("J", cs.dbar, usd=cs.usd, fx_spot_usd_per_j=0.0125, currency_k="K",
                                dbar_k=cs.dbar, fx_spot_usd_per_k=0.75)
        assert pricing.fx_forward_cross(same, 5.0) == pytest.approx(0.75 / 0.0125, rel=1e-15)
        with pytest.raises(MissingCurve):
            pricing.fx_forward_cross(pricing.CurveSet("J", cs.dbar), 1.0)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-0.02, 0.1), min_size=3, max_size=3), st.floats(0.001, 1000),
           st.floats(0.001, 1000))
    def test_triangle(self, rates, spot_j, spot_k):
        tenor = TenorStructure.regular(20, 2)
        usd = UsdDomesticCurves(flat_curve(rates[0], tenor.times),
                                ForwardCurve.on_tenor(tenor, [0.0] * 20, ForwardKind.LIBOR_OIS_SPREAD))
        cs = pricing.CurveSet("J", flat_curve(rates[1], tenor.times), usd=usd, fx_spot_usd_per_j=spot_j,
                              currency_k="K", dbar_k=flat_curve(rates[2], tenor.times), fx_spot_usd_per_k=spot_k)
        for t in tenor.pillars:
            lhs = pricing.fx_forward_usd(cs, t) * pricing.fx_forward_cross(cs, t)
            assert lhs == pytest.approx(pricing.fx_forward_usd_per_k(cs, t), rel=1e-14)


class TestOis:
    def test_constant_forwards(self):
        tenor = TenorStructure.regular(8, 4)
        cs = curve_set(tenor, np.exp(-0.03 * np.array(tenor.pillars)), ois=[0.021] * 8)
        assert pricing.forward_ois_rate(cs, tenor, 2, 8) == pytest.approx(0.021, abs=1e-16)
        assert pricing.forward_ois_rate(cs, tenor, 7, 8) == 0.021

    def test_single_period(self, world):
        f = pricing.forward_ois_rate(world.curves, world.tenor, 11, 12)
        assert f == world.curves.ois.values[11]

    def test_mtmccois(self, world):
        cs, tenor = world.curves, world.tenor
        ident = pricing.CurveSet("J", cs.dbar, ois=ForwardCurve.on_tenor(
            tenor, simple_forwards(cs.dbar, tenor), ForwardKind.COMPOUNDED_OIS_FORWARD))
        assert abs(pricing.mtmccois_par_spread(ident, tenor, 4, 30)) < 1e-15
        sbar = pricing.effective_swap_rate(cs.dbar, tenor, 0, 20)
        assert pricing.mtmccois_par_spread(cs, tenor, 0, 20) == sbar - pricing.ois_par_rate(cs, tenor, 20)
        assert pricing.usd_leg_pv_mtmccois() == 0.0

    def test_difference_arithmetic(self):
        tenor = TenorStructure.regular(1, 1)
        dbar = DiscountCurve((1.0,), (1 / 1.05,))
        cs = pricing.CurveSet("J", dbar, ois=ForwardCurve.on_tenor(tenor, [0.045], ForwardKind.COMPOUNDED_OIS_FORWARD))
        assert pricing.mtmccois_par_spread(cs, tenor, 0, 1) == pytest.approx(0.005, abs=1e-15)


class TestOverlay:
    def test_trivial_cases(self):
        assert pricing.overlay_rate_domestic(0.0125, 0.0, 0.0, 1 / 360) == 0.0
        assert pricing.overlay_rate_domestic(0.0125, 0.0, 0.0015, 1 / 360) == pytest.approx(0.0015, rel=1e-12)

    def test_hand_inversion(self):
        c = pricing.overlay_rate_domestic(0.0125, 0.012495 - 0.0125, 0.0015, 1 / 360)
        expected = ((1 + 0.0015 / 360) * 0.0125 / 0.012495 - 1) * 360
        assert c == pytest.approx(expected, rel=1e-9)
        assert c == pytest.approx(0.145558, abs=5e-7)

    def test_non_positive_forward(self):
        with pytest.raises(NonPositiveForward):
            pricing.overlay_rate_domestic(0.0125, -0.0125, 0.0, 1 / 360)

    def test_third_currency_mirrors_domestic(self, world):
        cs = world.curves
        k_only = pricing.CurveSet("J", cs.dbar_k, usd=cs.usd, fx_spot_usd_per_j=cs.fx_spot_usd_per_k,
                                  currency_k="K", dbar_k=cs.dbar_k, fx_spot_usd_per_k=cs.fx_spot_usd_per_k)
        direct = pricing.overlay_rate_domestic(*pricing.implied_overlay_inputs(
            k_only.dbar, cs.usd.ois_discount, cs.fx_spot_usd_per_k, 0.0, 1 / 360))
        assert pricing.overlay_rate_third_currency(cs, 1 / 360) == direct
        # the overlay equals the effective rate of k: 2% continuous
        assert pricing.overlay_rate_third_currency(cs, 1 / 360) == pytest.approx(math.expm1(0.02 / 360) * 360, rel=1e-9)

    def test_third_currency_trivial(self):
        tenor = TenorStructure.regular(4, 4)
        usd = UsdDomesticCurves(flat_curve(0.0, tenor.times),
                                ForwardCurve.on_tenor(tenor, [0.0] * 4, ForwardKind.LIBOR_OIS_SPREAD))
        cs = pricing.CurveSet("J", flat_curve(0.01, tenor.times), usd=usd, fx_spot_usd_per_j=1.0,
                              currency_k="K", dbar_k=flat_curve(0.0, tenor.times), fx_spot_usd_per_k=2.0)
        assert pricing.overlay_rate_third_currency(cs, 1 / 360) == 0.0

    def test_compounding_reproduces_curve(self, world):
        cs = world.curves
        days = 360
        rates = [pricing.overlay_rate_domestic(*pricing.implied_overlay_inputs(
            cs.dbar, cs.usd.ois_discount, cs.fx_spot_usd_per_j, n / days, (n + 1) / days)) for n in range(days)]
        growth = pricing.compound_overlay_rates(rates, [1 / days] * days)
        assert abs(growth * cs.dbar.df(1.0) - 1.0) < 1e-6
        for r in rates:
            assert abs(r - 0.05) < 0.05**2 / days + 1e-12


class TestTradeInvariants:
    @pytest.mark.parametrize("kind", ["IRS", "OIS", "MTMCCS", "MTMCCOIS"])
    def test_par_consistency(self, world, kind):
        for end in (1, 13, 40):
            tr = Trade(id="t", type=kind, start=0, end=end)
            row = price_trade(world.curves, world.tenor, tr, 1.0)
            assert abs(row["pv"]) < 1e-13

    def test_linear_in_notional(self, world):
        a = price_trade(world.curves, world.tenor, Trade(id="a", type="IRS", end=20, rate=0.04), 1.0)
        b = price_trade(world.curves, world.tenor, Trade(id="b", type="IRS", end=20, rate=0.04, notional=1e6), 1.0)
        assert b["pv"] == pytest.approx(1e6 * a["pv"], rel=1e-14)
        assert b["par"] == a["par"]

    def test_fx_forward_at_zero_is_spot_exchange(self, world):
        row = price_trade(world.curves, world.tenor,
                          Trade(id="f", type="FXFORWARD", maturity=0.0, strike=0.012, notional=1000.0), 1.0)
        assert row["pv"] == pytest.approx(1000.0 * (0.0125 - 0.012), abs=1e-15)
