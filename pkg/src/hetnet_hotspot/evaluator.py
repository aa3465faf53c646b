"""Closed-form mean user throughput and absorption for the three deployment
scenarios: macro only, small cell on the hotspot, small cell off the hotspot.

Angles inside the two-dimensional integrals are measured from the small
cell's direction and folded onto [0, pi]; the hotspot kernel is then the
sum of the two mirror images of the Gaussian. Radial panels are split at
the association annulus edges and at the radius where the macro link
leaves the rate cap.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .hexnet import g, g_inverse, interference_factor
from .linkbudget import LinkCurve, NetworkModel, throughput_from_inverse_sinr
from .numerics import QuadratureSpec, integrate_1d, integrate_1d_many
from .traffic import Hotspot, normalization_s0, radial_density

_SLACK = 1e-12


@dataclass(frozen=True)
class Placement:
    """Small-cell position; ``r_s_km=None`` means no small cell (macro only)."""

    r_s_km: float | None = None
    theta_s_rad: float = 0.0

    def __post_init__(self):
        if self.r_s_km is not None and not self.r_s_km >= 0:
            raise ValueError("small-cell radius must be non-negative")

    @classmethod
    def absent(cls) -> "Placement":
        return cls()

    @classmethod
    def at(cls, r_s_km: float, theta_s_rad: float) -> "Placement":
        return cls(float(r_s_km), float(theta_s_rad))

    @classmethod
    def on_hotspot(cls, hs: Hotspot) -> "Placement":
        return cls(float(hs.r_h_km), float(hs.theta_h_rad))

    @property
    def is_absent(self) -> bool:
        return self.r_s_km is None

    @property
    def position(self) -> complex:
        if self.r_s_km is None:
            raise ValueError("absent placement has no position")
        return self.r_s_km * complex(math.cos(self.theta_s_rad), math.sin(self.theta_s_rad))


ABSENT = Placement()


@dataclass(frozen=True)
class EvalResult:
    scenario: int
    eta_m_mbps: float
    eta_s_mbps: float
    mu: float
    gain: float = 0.0
    eta_mbps: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "eta_mbps", self.eta_m_mbps + self.eta_s_mbps)

    def as_dict(self) -> dict:
        return {"scenario": self.scenario, "eta_m": self.eta_m_mbps, "eta_s": self.eta_s_mbps,
                "eta": self.eta_mbps, "mu": self.mu, "gain": self.gain}


# ---------------------------------------------------------------------------
# association geometry

def association_boundary_h(r_km, r_s_km: float, model: NetworkModel):
    """Cosine threshold h(r) clamped to [-1, 1]: the small cell wins where cos(theta - theta_s) > h."""
    r = np.asarray(r_km, dtype=float)
    if not r_s_km > 0:
        raise ValueError("association_boundary_h requires r_s > 0")
    k = model.alpha ** (1.0 / model.b)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = (r_s_km ** 2 + r * r * (1.0 - k)) / (2.0 * r * r_s_km)
    h = np.where(r > 0, np.clip(h, -1.0, 1.0), 1.0)
    return h if h.ndim else float(h)


def wedge_radii(r_s_km: float, model: NetworkModel) -> tuple[float, float]:
    """Annulus [r1, r2] outside which the small cell never wins the RSRP comparison."""
    a = model.alpha ** (1.0 / (2.0 * model.b))
    return r_s_km / (1.0 + a), r_s_km / (1.0 - a)


def _wedge_half_angle(r, r_s_km: float, model: NetworkModel):
    r = np.asarray(r, dtype=float)
    if r_s_km <= 0:
        return np.zeros_like(r)
    r1, r2 = wedge_radii(r_s_km, model)
    inside = (r > r1) & (r < r2)
    out = np.zeros_like(r)
    if np.any(inside):
        out[inside] = np.arccos(association_boundary_h(r[inside], r_s_km, model))
    return out


# ---------------------------------------------------------------------------
# point SINRs

def _dist2(r, theta, placement: Placement):
    rs = placement.r_s_km
    half = 0.5 * (np.asarray(theta) - placement.theta_s_rad)
    # (r - rs)^2 + 4 r rs sin^2(dtheta/2): no cancellation near the small cell
    return (r - rs) ** 2 + 4.0 * r * rs * np.sin(half) ** 2


def sinr_macro(r_km, theta, placement: Placement, model: NetworkModel):
    """SINR of a UE served by the central macro (closed-form interference factor)."""
    r = np.asarray(r_km, dtype=float)
    b = model.b
    inv = np.asarray(g(r, model))
    if not placement.is_absent:
        with np.errstate(divide="ignore"):
            inv = inv + model.alpha * (r * r / _dist2(r, theta, placement)) ** b
    with np.errstate(divide="ignore"):
        out = 1.0 / inv
    return out if out.ndim else float(out)


def sinr_small(r_km, theta, placement: Placement, model: NetworkModel):
    """SINR of a UE served by the small cell."""
    if placement.is_absent:
        raise ValueError("sinr_small needs a small cell")
    r = np.asarray(r_km, dtype=float)
    b = model.b
    f = np.asarray(interference_factor(r, model))
    d2 = _dist2(r, theta, placement)
    with np.errstate(divide="ignore"):
        out = model.alpha * d2 ** -b / ((f + 1.0) * r ** (-2 * b) + model.noise_to_macro)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# evaluators

def _check_inputs(hs: Hotspot, placement: Placement, model: NetworkModel):
    R = model.cell_radius_km
    if hs.r_h_km > R * (1 + _SLACK):
        raise ValueError(f"hotspot radius {hs.r_h_km} km lies outside the cell radius {R:.6f} km")
    if not placement.is_absent and placement.r_s_km > R * (1 + _SLACK):
        raise ValueError(f"small-cell radius {placement.r_s_km} km lies outside the cell radius {R:.6f} km")


def _cap_radius(model: NetworkModel, curve: LinkCurve) -> float:
    return g_inverse(curve.rho_cap, model)


def eval_scenario1(hs: Hotspot, model: NetworkModel, curve: LinkCurve,
                   quad: QuadratureSpec | None = None) -> EvalResult:
    """Macro-only network: throughput integral split at the cap radius."""
    return _scenario1(hs, model, curve, quad or QuadratureSpec())


@functools.lru_cache(maxsize=256)
def _scenario1(hs, model, curve, quad) -> EvalResult:
    _check_inputs(hs, ABSENT, model)
    R = model.cell_radius_km
    s0 = normalization_s0(hs, R, quad)
    r_cap = min(R, _cap_radius(model, curve))
    pts = [hs.r_h_km]
    capped = integrate_1d(lambda r: radial_density(r, hs), 0.0, r_cap, quad,
                          points=pts) * curve.eta0_mbps
    uncapped = integrate_1d(
        lambda r: radial_density(r, hs) * curve.scale * np.log1p(curve.k2 / np.asarray(g(r, model))),
        r_cap, R, quad, points=pts)
    return EvalResult(1, (capped + uncapped) / s0, 0.0, 0.0, 0.0)


class _Integrands:
    """Inner angular integrals at a fixed radius for a given hotspot/small-cell pair."""

    def __init__(self, hs: Hotspot, placement: Placement, model: NetworkModel,
                 curve: LinkCurve, quad: QuadratureSpec):
        self.hs = hs
        self.model = model
        self.curve = curve
        self.inner = quad.tighter(10.0)
        self.rs = placement.r_s_km
        self.offset = hs.theta_h_rad - placement.theta_s_rad
        self.s2 = hs.sigma_km ** 2
        self.c0 = 1.0 / (2.0 * math.pi * self.s2)

    def kernel(self, r, phi):
        rh = self.hs.r_h_km
        base = r * r + rh * rh
        e1 = np.exp(-(base - 2.0 * r * rh * np.cos(phi - self.offset)) / (2.0 * self.s2))
        e2 = np.exp(-(base - 2.0 * r * rh * np.cos(phi + self.offset)) / (2.0 * self.s2))
        return self.c0 * (e1 + e2)

    def dist2(self, r, phi):
        return (r - self.rs) ** 2 + 4.0 * r * self.rs * np.sin(0.5 * phi) ** 2

    def _angular(self, fn, r_values, lo, hi):
        r = np.ravel(np.asarray(r_values, dtype=float))
        lo = np.broadcast_to(lo(r), r.shape)
        hi = np.broadcast_to(hi(r), r.shape)
        out = integrate_1d_many(lambda idx, phi: fn(r[idx], phi), lo, hi, self.inner)
        return out.reshape(np.shape(r_values))

    def half_angle(self, r):
        return _wedge_half_angle(r, self.rs, self.model)

    @staticmethod
    def zero(r):
        return 0.0

    @staticmethod
    def pi(r):
        return math.pi

    def macro_rate(self, r, phi):
        b = self.model.b
        with np.errstate(divide="ignore"):
            inv = g(r, self.model) + self.model.alpha * (r * r / self.dist2(r, phi)) ** b
        return throughput_from_inverse_sinr(self.curve, inv)

    def small_rate(self, r, phi):
        b = self.model.b
        inv = (g(r, self.model) + 1.0) * (self.dist2(r, phi) / (r * r)) ** b / self.model.alpha
        return throughput_from_inverse_sinr(self.curve, inv)

    def macro(self, r_values):
        return r_values * self._angular(lambda r, p: self.kernel(r, p) * self.macro_rate(r, p),
                                        r_values, self.half_angle, self.pi)

    def small(self, r_values):
        return r_values * self._angular(lambda r, p: self.kernel(r, p) * self.small_rate(r, p),
                                        r_values, self.zero, self.half_angle)

    def small_mass(self, r_values):
        return r_values * self._angular(self.kernel, r_values, self.zero, self.half_angle)

    def macro_mass(self, r_values):
        return r_values * self._angular(self.kernel, r_values, self.half_angle, self.pi)


def _breakpoints(rs: float, model: NetworkModel, curve: LinkCurve, hs: Hotspot):
    pts = [_cap_radius(model, curve), hs.r_h_km]
    if rs > 0:
        pts += list(wedge_radii(rs, model))
    return pts


def _with_small_cell(hs, placement, model, curve, quad, scenario) -> EvalResult:
    _check_inputs(hs, placement, model)
    R = model.cell_radius_km
    s0 = normalization_s0(hs, R, quad)
    it = _Integrands(hs, placement, model, curve, quad)
    rs = placement.r_s_km
    pts = _breakpoints(rs, model, curve, hs)
    eta_m = integrate_1d(it.macro, 0.0, R, quad, points=pts) / s0
    eta_s = 0.0
    mass = 0.0
    if rs > 0:
        r1, r2 = wedge_radii(rs, model)
        lo, hi = r1, min(r2, R)
        if hi > lo:
            eta_s = integrate_1d(it.small, lo, hi, quad, points=pts) / s0
            mass = integrate_1d(it.small_mass, lo, hi, quad, points=[hs.r_h_km]) / s0
    base = _scenario1(hs, model, curve, quad)
    res = EvalResult(scenario, eta_m, eta_s, min(max(mass, 0.0), 1.0))
    return EvalResult(scenario, eta_m, eta_s, res.mu, offloading_gain(res, base))


def eval_scenario2(hs: Hotspot, model: NetworkModel, curve: LinkCurve,
                   quad: QuadratureSpec | None = None) -> EvalResult:
    """Small cell placed exactly on the hotspot centre."""
    return _with_small_cell(hs, Placement.on_hotspot(hs), model, curve,
                            quad or QuadratureSpec(), 2)


def eval_scenario3(hs: Hotspot, placement: Placement, model: NetworkModel, curve: LinkCurve,
                   quad: QuadratureSpec | None = None) -> EvalResult:
    """Small cell at an arbitrary position inside the cell; no small cell reduces to scenario 1."""
    quad = quad or QuadratureSpec()
    if placement.is_absent:
        return _scenario1(hs, model, curve, quad)
    return _with_small_cell(hs, placement, model, curve, quad, 3)


def absorption_mu(hs: Hotspot, placement: Placement, model: NetworkModel,
                  quad: QuadratureSpec | None = None) -> float:
    """Share of hotspot traffic (within the cell disk) that the small cell wins."""
    if placement.is_absent or placement.r_s_km == 0:
        return 0.0
    quad = quad or QuadratureSpec()
    _check_inputs(hs, placement, model)
    R = model.cell_radius_km
    r1, r2 = wedge_radii(placement.r_s_km, model)
    hi = min(r2, R)
    if hi <= r1:
        return 0.0
    it = _Integrands(hs, placement, model, LinkCurve(), quad)
    mass = integrate_1d(it.small_mass, r1, hi, quad, points=[hs.r_h_km])
    return min(max(mass / normalization_s0(hs, R, quad), 0.0), 1.0)


def served_fractions(hs: Hotspot, placement: Placement, model: NetworkModel,
                     quad: QuadratureSpec | None = None) -> tuple[float, float]:
    """(macro-served, small-served) shares of the normalised hotspot mass."""
    quad = quad or QuadratureSpec()
    R = model.cell_radius_km
    s0 = normalization_s0(hs, R, quad)
    if placement.is_absent:
        return 1.0, 0.0
    it = _Integrands(hs, placement, model, LinkCurve(), quad)
    pts = [hs.r_h_km] + (list(wedge_radii(placement.r_s_km, model)) if placement.r_s_km > 0 else [])
    macro = integrate_1d(it.macro_mass, 0.0, R, quad, points=pts) / s0
    return macro, absorption_mu(hs, placement, model, quad)


def offloading_gain(result: EvalResult, baseline: EvalResult) -> float:
    """Relative throughput change against the macro-only baseline."""
    if baseline.eta_mbps == 0:
        raise ValueError("baseline throughput is zero")
    return (result.eta_mbps - baseline.eta_mbps) / baseline.eta_mbps
