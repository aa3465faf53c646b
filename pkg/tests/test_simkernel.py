import math
import warnings

import numpy as np
import pytest

from hetnet_hotspot.evaluator import (ABSENT, Placement, absorption_mu, eval_scenario1,
                                      eval_scenario2, wedge_radii)
from hetnet_hotspot.hexnet import HexLattice
from hetnet_hotspot.simkernel import (McResult, McSpec, associate, lattice_interference_power,
                                      mc_absorption_ci, mc_evaluate)
from hetnet_hotspot.traffic import Hotspot, sample_hotspot

from conftest import R_UNIT

PI3 = math.pi / 3


def _fake(mu, n):
    return McResult(0, 0, 0, mu, 0, 0, 0, math.sqrt(mu * (1 - mu) / n), n, n)


def test_spec_validation():
    with pytest.raises(ValueError):
        McSpec(n_samples=999)
    with pytest.raises(ValueError):
        McSpec(ring_count=5)
    with pytest.raises(ValueError):
        McSpec(workers=0)


def test_lattice_table_matches_exact_sum(model):
    rng = np.random.default_rng(4)
    r = rng.uniform(0, R_UNIT, 2000)
    t = rng.uniform(-math.pi, math.pi, 2000)
    x, y = r * np.cos(t), r * np.sin(t)
    fast = lattice_interference_power(x, y, model)
    exact = lattice_interference_power(x, y, model, exact=True)
    np.testing.assert_allclose(fast, exact, rtol=1e-6)
    # independent direct sum
    m = x[:50] + 1j * y[:50]
    direct = np.sum(np.abs(m[:, None] - HexLattice(1.0, 30).sites[None]) ** (-2 * model.b), axis=1)
    np.testing.assert_allclose(exact[:50], direct, rtol=1e-12)


def test_lattice_table_rejects_outside(model):
    with pytest.raises(ValueError):
        lattice_interference_power(np.array([0.6]), np.array([0.0]), model)


def test_absent_has_zero_mu(model, curve):
    res = mc_evaluate(Hotspot(0.3, 0.0), ABSENT, model, curve, McSpec(n_samples=20_000))
    assert res.mu == 0.0 and res.eta_s == 0.0 and res.mu_se == 0.0
    assert res.eta == pytest.approx(res.eta_m, rel=1e-15)


def test_determinism_and_workers(model, curve):
    hs = Hotspot(0.44, PI3)
    pl = Placement.on_hotspot(hs)
    spec = McSpec(n_samples=150_000, seed=3, chunk_size=20_000)
    a = mc_evaluate(hs, pl, model, curve, spec)
    b = mc_evaluate(hs, pl, model, curve, spec)
    c = mc_evaluate(hs, pl, model, curve, McSpec(n_samples=150_000, seed=3, chunk_size=20_000, workers=3))
    assert a == b == c
    d = mc_evaluate(hs, pl, model, curve, McSpec(n_samples=150_000, seed=4, chunk_size=20_000))
    assert d.eta != a.eta


def test_split_is_exclusive(model, curve):
    hs = Hotspot(0.44, PI3)
    res = mc_evaluate(hs, Placement.at(0.38, PI3), model, curve, McSpec(n_samples=50_000))
    assert res.eta == pytest.approx(res.eta_m + res.eta_s, rel=1e-12)
    assert 0 < res.mu < 1
    assert res.n_samples == 50_000 and res.n_drawn > res.n_samples


def test_std_error_scaling(model, curve):
    hs = Hotspot(0.44, PI3)
    pl = Placement.on_hotspot(hs)
    ratios = []
    for seed in range(10):
        a = mc_evaluate(hs, pl, model, curve, McSpec(n_samples=20_000, seed=seed))
        b = mc_evaluate(hs, pl, model, curve, McSpec(n_samples=40_000, seed=seed + 100))
        ratios.append(a.eta_se / b.eta_se)
    assert np.mean(ratios) == pytest.approx(math.sqrt(2), rel=0.2)


@pytest.mark.parametrize("rh,rs,ths", [(0.44, 0.44, PI3), (0.2, 0.12, 0.0), (0.52, 0.36, 2.0)])
def test_wedge_agreement(model, rh, rs, ths):
    hs = Hotspot(rh, ths)
    s = sample_hotspot(hs, R_UNIT, 200_000, seed=1)
    small = associate(s.x, s.y, Placement.at(rs, ths), model)
    r1, r2 = wedge_radii(rs, model)
    assert small.any()
    assert np.all((s.r[small] >= r1) & (s.r[small] <= r2))


def test_per_tier_mode_changes_result(model, curve):
    hs = Hotspot(0.44, PI3)
    pl = Placement.on_hotspot(hs)
    common = mc_evaluate(hs, pl, model, curve, McSpec(n_samples=20_000))
    tiered = mc_evaluate(hs, pl, model, curve, McSpec(n_samples=20_000, per_tier_exponents=True))
    assert tiered.mu != common.mu


def test_exact_mode_agrees_with_table(model, curve):
    hs = Hotspot(0.35, 0.2)
    pl = Placement.at(0.3, 0.2)
    fast = mc_evaluate(hs, pl, model, curve, McSpec(n_samples=5000, seed=2))
    exact = mc_evaluate(hs, pl, model, curve, McSpec(n_samples=5000, seed=2, exact_interference=True))
    assert exact.eta == pytest.approx(fast.eta, rel=1e-6)
    assert exact.mu == fast.mu


def test_matches_analytic_small_run(model, curve):
    hs = Hotspot(0.44, 2 * PI3)
    mc = mc_evaluate(hs, ABSENT, model, curve, McSpec(n_samples=200_000, seed=8))
    an = eval_scenario1(hs, model, curve)
    assert abs(an.eta_mbps - mc.eta) <= max(0.02 * mc.eta, 3 * mc.eta_se)
    mc2 = mc_evaluate(hs, Placement.on_hotspot(hs), model, curve, McSpec(n_samples=200_000, seed=8))
    an2 = eval_scenario2(hs, model, curve)
    assert abs(an2.mu - mc2.mu) <= max(0.01, 3 * mc2.mu_se)


def test_ci_zero_count():
    with pytest.warns(RuntimeWarning):
        lo, hi = mc_absorption_ci(_fake(0.0, 1_000_000))
    assert lo == 0.0 and hi == pytest.approx(3 / 1e6, rel=0.01)


def test_ci_half_width():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        lo, hi = mc_absorption_ci(_fake(0.5, 10_000))
    assert (hi - lo) / 2 == pytest.approx(0.0098, abs=1e-4)
    with pytest.raises(ValueError):
        mc_absorption_ci(_fake(0.5, 10_000), confidence=1.0)


def test_ci_calibration(model, curve):
    hs = Hotspot(0.44, PI3)
    pl = Placement.on_hotspot(hs)
    mu = absorption_mu(hs, pl, model)
    hits = 0
    for seed in range(20):
        lo, hi = mc_absorption_ci(mc_evaluate(hs, pl, model, curve, McSpec(n_samples=10_000, seed=seed)))
        hits += lo <= mu <= hi
    assert hits >= 19
