import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hetnet_hotspot.linkbudget import (LinkCurve, NetworkModel, RadioParams, build_network_model,
                                       cell_radius, db_to_linear, link_throughput,
                                       throughput_from_inverse_sinr)


def test_table1_powers(model):
    # 46 + 18 + 0 - 2 - 151 = -89 dB ; 30 + 6 + 0 - 2 - 148 = -114 dB
    assert model.p_macro_lin == pytest.approx(10 ** -8.9, rel=1e-13)
    assert model.p_small_lin == pytest.approx(10 ** -11.4, rel=1e-13)
    assert model.alpha == pytest.approx(10 ** -2.5, rel=1e-12)
    assert model.alpha == pytest.approx(3.162e-3, rel=1e-3)


def test_table1_noise(model):
    # -174 + 10 log10(20e6) + 8 dBm
    assert model.p_noise_lin == pytest.approx(5.023772863019165e-10, rel=1e-12)
    assert math.log10(model.p_noise_lin) == pytest.approx(-9.299, abs=5e-4)


def test_exponents(model):
    assert model.b == pytest.approx(1.88)
    assert model.b_small == pytest.approx(1.835)


def test_bandwidth_doubling_adds_3db():
    base = build_network_model(RadioParams())
    wide = build_network_model(dataclasses.replace(RadioParams(), bandwidth_hz=40e6))
    assert 10 * math.log10(wide.p_noise_lin / base.p_noise_lin) == pytest.approx(3.0103, abs=1e-4)


def test_cell_radius():
    assert cell_radius(1.0) == pytest.approx(0.525038, abs=1e-6)
    assert cell_radius(2.0) == pytest.approx(2 * cell_radius(1.0), rel=1e-15)
    assert cell_radius(1.0) == math.sqrt(math.sqrt(3) / (2 * math.pi))
    with pytest.raises(ValueError):
        cell_radius(0.0)


def test_model_cell_radius_is_exact(model):
    assert model.cell_radius_km == model.delta_km * math.sqrt(math.sqrt(3) / (2 * math.pi))


def test_reject_alpha_ge_one():
    with pytest.raises(ValueError):
        build_network_model(dataclasses.replace(RadioParams(), small_power_dbm=70.0))
    with pytest.raises(ValueError):
        NetworkModel(1.0, 1.88, 1.0, 1.0, 1e-3)


def test_reject_small_b():
    with pytest.raises(ValueError):
        RadioParams(macro_pathloss_slope=20.0)
    with pytest.raises(ValueError):
        NetworkModel(1.0, 1.0, 1.0, 0.1, 1e-3)


def test_reject_bad_bandwidth():
    with pytest.raises(ValueError):
        RadioParams(bandwidth_hz=0.0)
    with pytest.raises(ValueError):
        RadioParams(inter_site_distance_km=-1.0)


def test_with_alpha(model):
    m = model.with_alpha(1e-8)
    assert m.alpha == pytest.approx(1e-8)
    assert m.p_macro_lin == model.p_macro_lin and m.b == model.b


def test_db_to_linear():
    assert db_to_linear(0) == 1.0
    assert db_to_linear(30) == pytest.approx(1000.0)


def test_rho_cap(curve):
    assert curve.rho_cap == pytest.approx(5.977751709920751e-3, rel=1e-13)
    assert curve.rho_cap == pytest.approx(1.9 / (math.exp(98 / 17) - 1), rel=1e-12)
    lhs = curve.k1 * curve.w_mbps * math.log(1 + curve.k2 / curve.rho_cap)
    assert abs(lhs - curve.eta0_mbps) <= 1e-12 * curve.eta0_mbps


def test_link_throughput_examples(curve):
    assert link_throughput(curve, 0.0) == 0.0
    assert link_throughput(curve, 1 / curve.rho_cap) == pytest.approx(98.0, rel=1e-9)
    assert link_throughput(curve, 10 / curve.rho_cap) == 98.0
    assert link_throughput(curve, math.inf) == 98.0
    assert link_throughput(curve, 1.0) == pytest.approx(17 * math.log(2.9), rel=1e-14)


def test_link_throughput_rejects_negative(curve):
    with pytest.raises(ValueError):
        link_throughput(curve, -0.1)


def test_inverse_form_matches(curve):
    s = np.logspace(-4, 6, 200)
    np.testing.assert_allclose(throughput_from_inverse_sinr(curve, 1 / s), link_throughput(curve, s),
                               rtol=1e-12)
    assert throughput_from_inverse_sinr(curve, 0.0) == 98.0
    assert throughput_from_inverse_sinr(curve, math.inf) == 0.0


@given(st.floats(0, 1e12), st.floats(0, 1e12))
def test_link_throughput_monotone_and_bounded(a, b):
    c = LinkCurve()
    lo, hi = sorted((a, b))
    assert link_throughput(c, lo) <= link_throughput(c, hi) <= c.eta0_mbps
