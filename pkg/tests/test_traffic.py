import math

import numpy as np
import pytest
from scipy import integrate, stats

from hetnet_hotspot.numerics import QuadratureSpec
from hetnet_hotspot.traffic import (Hotspot, HotspotOutsideRegion, acceptance_fraction,
                                    normalization_s0, radial_density, sample_hotspot,
                                    traffic_density)

from conftest import R_UNIT

# raw double integral of the density over the disk (scipy.dblquad, epsrel 1e-12)
S0_DBLQUAD = {0.0: 0.9681209299683111, 0.2: 0.9043477763457773, 0.44: 0.5835076780208861,
              R_UNIT: 0.4225030301642596}


def test_density_peak_and_symmetry():
    hs = Hotspot(0.44, 1.0, 0.2)
    assert traffic_density(0.44, 1.0, hs) == pytest.approx(1 / (2 * math.pi * 0.04))
    assert traffic_density(0.3, 1.0 + 0.7, hs) == pytest.approx(traffic_density(0.3, 1.0 - 0.7, hs))
    grid = traffic_density(np.linspace(0, 1, 50)[:, None], np.linspace(0, 2 * math.pi, 50)[None], hs)
    assert grid.max() <= traffic_density(0.44, 1.0, hs)


def test_density_opposite_point():
    hs = Hotspot(0.44, 2.0, 0.2)
    want = 1 / (2 * math.pi * 0.04) * math.exp(-2 * 0.44 ** 2 / 0.08 * 2)
    # |m - c|^2 = (2 * 0.44)^2 at the antipodal point
    assert traffic_density(0.44, 2.0 + math.pi, hs) == pytest.approx(want, rel=1e-12)


def test_density_integrates_to_one():
    hs = Hotspot(0.44, 0.3, 0.2)
    total = integrate.quad(lambda r: radial_density(r, hs), 0, 0.44 + 8 * 0.2, epsabs=1e-13,
                           points=[0.44])[0]
    assert total == pytest.approx(1.0, abs=1e-6)


def test_radial_density_is_angular_integral():
    hs = Hotspot(0.3, 0.9, 0.2)
    for r in (0.05, 0.3, 0.6):
        raw = integrate.quad(lambda t: traffic_density(r, t, hs) * r, 0, 2 * math.pi, epsabs=1e-14)[0]
        assert radial_density(r, hs) == pytest.approx(raw, rel=1e-10)


@pytest.mark.parametrize("rh", sorted(S0_DBLQUAD))
def test_s0_matches_double_integral(rh):
    hs = Hotspot(rh, 1.3, 0.2)
    assert normalization_s0(hs, R_UNIT) == pytest.approx(S0_DBLQUAD[rh], rel=1e-6)


def test_s0_centered_closed_form():
    hs = Hotspot(0.0, 0.0, 0.2)
    assert normalization_s0(hs, R_UNIT) == pytest.approx(-math.expm1(-R_UNIT ** 2 / 0.08), rel=1e-10)
    assert normalization_s0(Hotspot(0.0, 0.0, 0.01), R_UNIT) == pytest.approx(1.0, abs=1e-12)


def test_s0_edge_leaks_mass():
    assert normalization_s0(Hotspot(R_UNIT, 0.0, 0.2), R_UNIT) < 0.5


def test_s0_rejects_bad_region():
    with pytest.raises(ValueError):
        normalization_s0(Hotspot(0.1, 0.0), 0.0)


def test_hotspot_validation():
    with pytest.raises(ValueError):
        Hotspot(0.1, 0.0, 0.0)
    with pytest.raises(ValueError):
        Hotspot(-0.1, 0.0)


def test_sampler_deterministic():
    hs = Hotspot(0.44, 2.0, 0.2)
    a = sample_hotspot(hs, R_UNIT, 1000, seed=5)
    b = sample_hotspot(hs, R_UNIT, 1000, seed=5)
    c = sample_hotspot(hs, R_UNIT, 1000, seed=6)
    assert np.array_equal(a.r, b.r) and np.array_equal(a.theta, b.theta) and a.n_drawn == b.n_drawn
    assert not np.array_equal(a.r, c.r)


def test_sampler_prefix_stable():
    hs = Hotspot(0.44, 2.0, 0.2)
    a = sample_hotspot(hs, R_UNIT, 200_000, seed=1)
    b = sample_hotspot(hs, R_UNIT, 100_000, seed=1)
    assert np.array_equal(a.r[:100_000], b.r)


def test_sampler_exact_count_and_region():
    hs = Hotspot(R_UNIT, 0.0, 0.2)
    s = sample_hotspot(hs, R_UNIT, 12345, seed=0)
    assert s.r.size == 12345 and np.all(s.r <= R_UNIT)
    assert s.n_drawn > 12345


def test_sampler_mean_clt():
    # untruncated region: mean lands within 4 sigma / sqrt(n) of the centre
    hs = Hotspot(0.44, 2.0, 0.2)
    n = 100_000
    s = sample_hotspot(hs, 100.0, n, seed=2)
    bound = 4 * 0.2 / math.sqrt(n)
    assert abs(s.x.mean() - hs.center.real) < bound
    assert abs(s.y.mean() - hs.center.imag) < bound


def test_sampler_radial_histogram_chi2():
    hs = Hotspot(0.44, 2.0, 0.2)
    n = 100_000
    s = sample_hotspot(hs, R_UNIT, n, seed=3)
    edges = np.linspace(0, R_UNIT, 21)
    s0 = normalization_s0(hs, R_UNIT)
    probs = np.array([integrate.quad(lambda r: radial_density(r, hs), a, b)[0]
                      for a, b in zip(edges[:-1], edges[1:])]) / s0
    observed = np.histogram(s.r, edges)[0]
    assert stats.chisquare(observed, probs * n).pvalue > 1e-3


def test_sampler_rejects_far_hotspot():
    with pytest.raises(HotspotOutsideRegion):
        sample_hotspot(Hotspot(3.0, 0.0, 0.2), R_UNIT, 1000, seed=0)
    with pytest.raises(ValueError):
        sample_hotspot(Hotspot(0.1, 0.0), R_UNIT, 0, seed=0)


def test_acceptance_converges_to_s0():
    hs = Hotspot(0.44, 0.0, 0.2)
    n = 200_000
    s0 = normalization_s0(hs, R_UNIT)
    frac = acceptance_fraction(hs, R_UNIT, n, seed=9)
    assert abs(frac - s0) <= 3 * math.sqrt(s0 * (1 - s0) / n)
