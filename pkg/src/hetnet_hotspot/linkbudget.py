"""Link budget: dB-domain radio parameters to the linear model, and the
modified Shannon link curve.

Distances are in km throughout, so the effective powers below are the
received powers (mW) at 1 km once the path-loss intercept is folded in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def cell_radius(delta_km: float) -> float:
    """Radius of the disk whose area equals the hexagonal cell of inter-site distance ``delta_km``."""
    if not delta_km > 0:
        raise ValueError(f"inter-site distance must be positive, got {delta_km}")
    return delta_km * math.sqrt(math.sqrt(3.0) / (2.0 * math.pi))


@dataclass(frozen=True)
class RadioParams:
    """Physical-layer parameters in dB units. Defaults reproduce the reference deployment."""

    macro_power_dbm: float = 46.0
    small_power_dbm: float = 30.0
    macro_antenna_gain_dbi: float = 18.0   # includes cable loss
    small_antenna_gain_dbi: float = 6.0
    ue_antenna_gain_db: float = 0.0
    body_loss_db: float = 2.0
    macro_pathloss_intercept_db: float = 151.0   # at 1 km
    small_pathloss_intercept_db: float = 148.0
    macro_pathloss_slope: float = 37.6           # dB/decade
    small_pathloss_slope: float = 36.7
    noise_density_dbm_hz: float = -174.0
    noise_figure_db: float = 8.0
    bandwidth_hz: float = 20e6
    inter_site_distance_km: float = 1.0

    def __post_init__(self):
        if not self.bandwidth_hz > 0:
            raise ValueError("bandwidth_hz must be positive")
        if not self.inter_site_distance_km > 0:
            raise ValueError("inter_site_distance_km must be positive")
        if not (self.macro_pathloss_slope > 20 and self.small_pathloss_slope > 20):
            raise ValueError("path-loss slopes must exceed 20 dB/decade (exponent > 2)")


@dataclass(frozen=True)
class NetworkModel:
    """Linear-scale network model consumed by the analytic and Monte Carlo paths.

    ``b`` is half the path-loss exponent shared by both tiers in the analytic
    formulas; ``b_small`` is only used by the Monte Carlo kernel when it is
    asked to apply per-tier exponents.
    """

    delta_km: float
    b: float
    p_macro_lin: float
    p_small_lin: float
    p_noise_lin: float
    b_small: float | None = None
    alpha: float = field(init=False)
    cell_radius_km: float = field(init=False)

    def __post_init__(self):
        if not self.b > 1:
            raise ValueError(f"half path-loss exponent b must exceed 1, got {self.b}")
        if not (self.p_macro_lin > 0 and self.p_small_lin > 0 and self.p_noise_lin >= 0):
            raise ValueError("powers must be positive")
        alpha = self.p_small_lin / self.p_macro_lin
        if not 0 < alpha < 1:
            raise ValueError(f"small cell must be the weaker tier (alpha < 1), got alpha={alpha}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "cell_radius_km", cell_radius(self.delta_km))
        if self.b_small is None:
            object.__setattr__(self, "b_small", self.b)

    @property
    def noise_to_macro(self) -> float:
        """P_N / P, the noise term coefficient of r^{2b}."""
        return self.p_noise_lin / self.p_macro_lin

    def with_alpha(self, alpha: float) -> "NetworkModel":
        """Same model with the small-cell power rescaled to the given ratio."""
        return NetworkModel(self.delta_km, self.b, self.p_macro_lin,
                            alpha * self.p_macro_lin, self.p_noise_lin, self.b_small)


def build_network_model(params: RadioParams) -> NetworkModel:
    p_macro = float(db_to_linear(params.macro_power_dbm + params.macro_antenna_gain_dbi
                                 + params.ue_antenna_gain_db - params.body_loss_db
                                 - params.macro_pathloss_intercept_db))
    p_small = float(db_to_linear(params.small_power_dbm + params.small_antenna_gain_dbi
                                 + params.ue_antenna_gain_db - params.body_loss_db
                                 - params.small_pathloss_intercept_db))
    p_noise = float(db_to_linear(params.noise_density_dbm_hz
                                 + 10.0 * math.log10(params.bandwidth_hz)
                                 + params.noise_figure_db))
    return NetworkModel(
        delta_km=params.inter_site_distance_km,
        b=params.macro_pathloss_slope / 20.0,
        p_macro_lin=p_macro,
        p_small_lin=p_small,
        p_noise_lin=p_noise,
        b_small=params.small_pathloss_slope / 20.0,
    )


@dataclass(frozen=True)
class LinkCurve:
    """Modified Shannon curve ``min(k1 * W * ln(1 + k2 * sinr), eta0)``, W in MHz so rates are Mbps."""

    k1: float = 0.85
    k2: float = 1.9
    w_mbps: float = 20.0
    eta0_mbps: float = 98.0

    def __post_init__(self):
        if not (self.k1 > 0 and self.k2 > 0 and self.w_mbps > 0 and self.eta0_mbps > 0):
            raise ValueError("link curve parameters must be positive")

    @property
    def scale(self) -> float:
        return self.k1 * self.w_mbps

    @property
    def rho_cap(self) -> float:
        """Inverse-SINR level at and below which the rate saturates at eta0."""
        return self.k2 / math.expm1(self.eta0_mbps / self.scale)


def link_throughput(curve: LinkCurve, sinr_linear):
    """Throughput in Mbps for a linear SINR (scalar or array)."""
    s = np.asarray(sinr_linear, dtype=float)
    if np.any(s < 0):
        raise ValueError("SINR must be non-negative")
    with np.errstate(over="ignore"):
        rate = np.minimum(curve.scale * np.log1p(curve.k2 * s), curve.eta0_mbps)
    return rate if rate.ndim else float(rate)


def throughput_from_inverse_sinr(curve: LinkCurve, inv_sinr):
    """Same curve written on the inverse SINR, ``K1 W ln(1 + K2 / max(rho, 1/sinr))``.

    This is the form the closed-form integrands use; it is finite for
    ``inv_sinr = 0`` (rate = eta0) and ``inv_sinr = inf`` (rate = 0).
    """
    inv = np.maximum(np.asarray(inv_sinr, dtype=float), curve.rho_cap)
    rate = np.minimum(curve.scale * np.log1p(curve.k2 / inv), curve.eta0_mbps)
    return rate if rate.ndim else float(rate)
