import math

import numpy as np
import pytest
from scipy import integrate

from usdsilo.errors import StateExplosion
from usdsilo.hjm import (
    Factor,
    HjmEngine,
    HjmModelSpec,
    SimGrid,
    SwaptionKind,
    SwaptionSpec,
    diagnose,
    hjm_drift,
    intrinsic_value,
    parity_check,
    price_basis_swaption,
    price_ois_swaption,
    price_swaption,
    simulate,
    swap_rate_volatilities,
)
from usdsilo.hjm import rng
from usdsilo.hjm.swaption import deterministic_underlying
from usdsilo.synthetic import simple_forwards
from usdsilo.termstructure import ForwardCurve, ForwardKind


def model(world, factors=((0.01, 0.1), (0.005, 1.0)), **kw):
    cs = world.curves
    args = dict(
        factors=tuple(Factor(a, lam) for a, lam in factors),
        initial_curve=cs.dbar,
        usd_curve=cs.usd.ois_discount,
        fx_spot_j_per_usd=1.0 / cs.fx_spot_usd_per_j,
        sigma_fx=(0.08, 0.03)[: len(factors)],
        tenor=world.tenor,
        ois_forwards=cs.ois,
        ois_vols=(0.004, 0.002)[: len(factors)],
    )
    args.update(kw)
    return HjmModelSpec(**args)


class TestDrift:
    def test_zero_interval(self, world):
        assert hjm_drift(model(world), 1.0, 1.0) == 0.0

    def test_no_decay(self, world):
        spec = model(world, factors=((0.01, 0.0),))
        assert hjm_drift(spec, 0.5, 2.5) == pytest.approx(1e-4 * 2.0, rel=1e-14)

    def test_exponential_closed_form(self, world):
        spec = model(world, factors=((0.01, 1.0),))
        expected = 0.01 * math.exp(-1.0) * 0.01 * (1 - math.exp(-1.0))
        assert hjm_drift(spec, 0.0, 1.0) == pytest.approx(expected, rel=1e-14)
        assert hjm_drift(spec, 0.0, 1.0) == pytest.approx(2.3254e-5, rel=1e-4)

    def test_against_quadrature(self, world):
        spec = model(world)
        t, s = 0.7, 4.2
        inner = [integrate.quad(lambda u, k=k: f.a * math.exp(-f.decay * (u - t)), t, s)[0]
                 for k, f in enumerate(spec.factors)]
        expected = float(np.dot(spec.sigma(t, s), inner))
        assert hjm_drift(spec, t, s) == pytest.approx(expected, rel=1e-12)

    def test_engine_drift_converges(self, world):
        spec = model(world)
        tau = 2.0
        errors = []
        for steps in (40, 80, 160):
            eng = HjmEngine(spec, SimGrid(10.0, steps, 2))
            h = eng.grid.dt
            o = int(round(tau / h))
            mid = (o + 0.5) * h
            # one-step mean increment against the continuous drift times h
            errors.append(abs(eng.mu[o] * h - hjm_drift(spec, 0.0, mid) * h))
        assert errors[1] < 0.3 * errors[0] and errors[2] < 0.3 * errors[1]

    def test_single_step_pure_drift(self, world):
        spec = model(world, factors=((0.01, 0.5),))
        eng = HjmEngine(spec, SimGrid(10.0, 400, 2))
        h = eng.grid.dt
        s0 = eng.initial_state(1)
        s1 = eng.evolve_step(s0, np.zeros((1, 1)))
        inc = s1.fbar[0, 1:] - s0.fbar[0, 1:]
        mids = (np.arange(1, 400) + 0.5) * h
        ref = np.array([hjm_drift(spec, 0.0, m) for m in mids]) * h
        assert np.max(np.abs(inc - ref)) < 10 * h * h * 1e-4


class TestEvolution:
    def test_zero_vol_frozen_curve(self, world):
        spec = model(world).zero_volatility()
        eng = HjmEngine(spec, SimGrid(10.0, 40, 2))
        state = eng.initial_state(2)
        for n in range(40):
            new = eng.evolve_step(state, np.ones((2, 2)))
            assert np.array_equal(new.fbar, state.fbar)
            state = new
        assert np.allclose(np.exp(-state.log_beta), world.curves.dbar.df(10.0), rtol=1e-13)

    def test_zero_vol_fx_follows_forward(self, world):
        spec = model(world).zero_volatility()
        ens = simulate(spec, SimGrid(10.0, 40, 2))
        cs = world.curves
        for k, t in enumerate(ens.grid.times):
            expected = spec.fx_spot_j_per_usd * cs.usd.ois_discount.df(t) / cs.dbar.df(t)
            assert ens.fx[0, k] == pytest.approx(expected, rel=1e-13)

    def test_state_explosion(self, world):
        spec = model(world, factors=((3.0, 0.0),), fmax=0.5)
        with pytest.raises(StateExplosion) as info:
            simulate(spec, SimGrid(10.0, 40, 100))
        assert info.value.step >= 1 and 0 <= info.value.path < 100

    def test_smoke_two_paths_one_step(self, world):
        ens = simulate(model(world), SimGrid(0.25, 1, 2))
        est, se = ens.stat(ens.deflator[:, 1])
        assert math.isfinite(est) and math.isfinite(se)

    def test_negative_spread_monitor(self, world, caplog):
        cs = world.curves
        libor = ForwardCurve.on_tenor(world.tenor, cs.ois.array() - 0.0005, ForwardKind.LIBOR_FORWARD)
        spec = model(world, libor_forwards=libor, libor_vols=(0.01, 0.0))
        ens = simulate(spec, SimGrid(10.0, 40, 200))
        assert ens.negative_spread_fraction > 0
        assert "negative" in caplog.text


class TestRng:
    def test_uniform_range_and_keying(self):
        u = rng.uniforms(7, 0, 100, 5, 3)
        assert u.shape == (100, 5, 3)
        assert np.all((u > 0) & (u < 1))
        part = rng.uniforms(7, 37, 20, 5, 3)
        assert np.array_equal(part, u[37:57])
        assert not np.array_equal(rng.uniforms(8, 0, 100, 5, 3), u)

    def test_gaussian_moments(self):
        z = rng.gaussians(1, 0, 50_000, 4, 2).ravel()
        assert abs(z.mean()) < 4 / math.sqrt(z.size)
        assert abs(z.var() - 1) < 4 * math.sqrt(2 / z.size)


class TestDeterminism:
    def test_same_seed_identical(self, world):
        a = simulate(model(world), SimGrid(10.0, 40, 500, seed=3))
        b = simulate(model(world), SimGrid(10.0, 40, 500, seed=3))
        assert np.array_equal(a.deflator, b.deflator) and np.array_equal(a.fx, b.fx)

    def test_chunking_and_workers_irrelevant(self, world):
        spec = model(world)
        ref = simulate(spec, SimGrid(10.0, 40, 3000, seed=5, chunk_size=4096))
        for chunk, workers in ((500, 1), (700, 3), (1000, 4)):
            other = simulate(spec, SimGrid(10.0, 40, 3000, seed=5, chunk_size=chunk), workers=workers)
            assert np.array_equal(ref.deflator, other.deflator)
            assert np.array_equal(ref.horizon_bond, other.horizon_bond)


class TestDiagnostics:
    def test_zero_vol_all_z_zero(self, world):
        spec = model(world).zero_volatility()
        sw = SwaptionSpec(8, 28, 0.04, SwaptionKind.OIS_PAYER)
        rep = diagnose(simulate(spec, SimGrid(10.0, 40, 50), record_times=[2.0]), (sw,))
        assert rep.checks and all(c["z"] == 0.0 for c in rep.checks)

    def test_martingale_20k(self, world):
        sw = SwaptionSpec(8, 28, 0.04, SwaptionKind.OIS_PAYER)
        rep = diagnose(simulate(model(world, factors=((0.01, 0.5),)), SimGrid(10.0, 40, 20_000, seed=11),
                                record_times=[2.0]), (sw,))
        assert rep.max_abs_z < 4.0

    def test_forward_bond_functional(self, world):
        ens = simulate(model(world), SimGrid(10.0, 40, 20_000, seed=2), record_times=[1.0])
        vals = ens.discount(4, 8) * ens.deflator[:, 4]
        est, se = ens.stat(vals)
        assert abs(est - world.curves.dbar.df(2.0)) < 3 * se

    def test_negative_control_grows_with_maturity(self, world):
        spec = model(world, drift="none")
        rep = diagnose(simulate(spec, SimGrid(10.0, 40, 20_000, seed=4)))
        z = [abs(c["z"]) for c in rep.of("deflatedBond")]
        assert z[-1] > 5 and z[-1] > z[3]
        assert rep.overall == "fail"


class TestSwaptions:
    @pytest.mark.parametrize("kind", list(SwaptionKind))
    def test_zero_vol_intrinsic(self, world, kind):
        spec = model(world).zero_volatility()
        _, fwd = deterministic_underlying(spec, SwaptionSpec(4, 20, 0.0, kind))
        for k in (fwd - 0.01, fwd, fwd + 0.01):
            sw = SwaptionSpec(4, 20, k, kind)
            pricer = price_basis_swaption if kind.is_basis else price_ois_swaption
            price, se = pricer(spec, SimGrid(10.0, 40, 4), sw)
            assert price == pytest.approx(intrinsic_value(spec, sw), abs=1e-15)
            assert se == pytest.approx(0.0, abs=1e-15)

    def test_wrong_pricer_rejected(self, world):
        spec = model(world)
        with pytest.raises(ValueError):
            price_ois_swaption(spec, SimGrid(10.0, 40, 4), SwaptionSpec(4, 20, 0.0, SwaptionKind.BASIS_PAYER))

    def test_deep_itm_linear(self, world):
        spec = model(world)
        sw = SwaptionSpec(8, 28, -0.5, SwaptionKind.OIS_PAYER)
        price, se = price_ois_swaption(spec, SimGrid(10.0, 40, 20_000, seed=9), sw)
        a0, fwd = deterministic_underlying(spec, sw)
        assert abs(price - a0 * (fwd + 0.5)) < 3 * se

    def test_equal_legs_zero_strike(self, world):
        cs = world.curves
        implied = ForwardCurve.on_tenor(world.tenor, simple_forwards(cs.dbar, world.tenor),
                                        ForwardKind.COMPOUNDED_OIS_FORWARD)
        spec = model(world, ois_forwards=implied).zero_volatility()
        sw = SwaptionSpec(4, 20, 0.0, SwaptionKind.BASIS_PAYER)
        assert abs(price_basis_swaption(spec, SimGrid(10.0, 40, 4), sw)[0]) < 1e-15

    @pytest.mark.parametrize("kind", [SwaptionKind.OIS_PAYER, SwaptionKind.BASIS_RECEIVER])
    def test_parity_20k(self, world, kind):
        ens = simulate(model(world), SimGrid(10.0, 40, 20_000, seed=6), record_times=[2.0])
        _, fwd = deterministic_underlying(ens.spec, SwaptionSpec(8, 28, 0.0, kind))
        res = parity_check(ens, SwaptionSpec(8, 28, fwd + 0.002, kind))
        assert abs(res["z"]) < 3

    def test_price_monotone_in_strike(self, world):
        ens = simulate(model(world), SimGrid(10.0, 40, 5000, seed=1), record_times=[2.0])
        prices = [price_swaption(ens, SwaptionSpec(8, 28, k, SwaptionKind.OIS_PAYER))[0]
                  for k in (0.03, 0.04, 0.05)]
        assert prices[0] > prices[1] > prices[2] > 0


def test_swap_rate_vols_match_regression(world):
    """Instantaneous vol of the simulated effective swap rate against the closed formula."""
    spec = model(world, factors=((0.01, 0.3), (0.008, 1.5)))
    eng = HjmEngine(spec, SimGrid(10.0, 2000, 2))
    h = eng.grid.dt
    start, end = 8, 28
    n = 20_000
    z = rng.gaussians(3, 0, n, 1, 2)[:, 0, :]
    s0 = eng.initial_state(n)
    s1 = eng.evolve_step(s0, z)

    def effective(state):
        node = state.step
        cum = np.cumsum(state.fbar[:, node:], axis=1) * h
        ends = eng.period_ends[start:end] - node
        d = np.exp(-cum[:, ends - 1])
        ds = np.exp(-cum[:, eng.period_starts[start] - node - 1])
        a = (d * eng.accruals[start:end]).sum(axis=1)
        return (ds - d[:, -1]) / a

    def ois_rate(state):
        node = state.step
        cum = np.cumsum(state.fbar[:, node:], axis=1) * h
        w = np.exp(-cum[:, eng.period_ends[start:end] - node - 1]) * eng.accruals[start:end]
        return (w * state.ois[:, start:end]).sum(axis=1) / w.sum(axis=1)

    ds = effective(s1) - effective(s0)
    dw = z * math.sqrt(h)
    beta, *_ = np.linalg.lstsq(np.column_stack([np.ones(n), dw]), ds, rcond=None)
    sigma1, sigma2 = swap_rate_volatilities(eng, s0, start, end)
    assert np.allclose(beta[1:], sigma1[0], rtol=2e-3, atol=1e-7)
    beta2, *_ = np.linalg.lstsq(np.column_stack([np.ones(n), dw]), ois_rate(s1) - ois_rate(s0), rcond=None)
    assert np.allclose(beta2[1:], sigma2[0], rtol=2e-3, atol=1e-7)
