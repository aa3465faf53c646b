"""Gaussian traffic hotspot: density, its mass on the serving disk, and sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import QuadratureSpec, bessel_i0e, integrate_1d

SAMPLE_BATCH = 1 << 16
_MIN_ACCEPTANCE = 0.01


@dataclass(frozen=True)
class Hotspot:
    r_h_km: float
    theta_h_rad: float
    sigma_km: float = 0.2

    def __post_init__(self):
        if not self.sigma_km > 0:
            raise ValueError("hotspot sigma must be positive")
        if not self.r_h_km >= 0:
            raise ValueError("hotspot radius must be non-negative")

    @property
    def center(self) -> complex:
        return self.r_h_km * complex(math.cos(self.theta_h_rad), math.sin(self.theta_h_rad))


class HotspotOutsideRegion(ValueError):
    pass


def traffic_density(r, theta, hs: Hotspot):
    """Density per km^2 of the isotropic Gaussian hotspot at polar point (r, theta)."""
    r = np.asarray(r, dtype=float)
    s2 = hs.sigma_km ** 2
    q = r * r + hs.r_h_km ** 2 - 2.0 * r * hs.r_h_km * np.cos(np.asarray(theta) - hs.theta_h_rad)
    out = np.exp(-q / (2.0 * s2)) / (2.0 * math.pi * s2)
    return out if out.ndim else float(out)


def radial_density(r, hs: Hotspot):
    """Hotspot measure integrated over angle, per unit radius (includes the r Jacobian).

    Uses 2 pi I0 folding of the angular integral; written with the scaled
    Bessel function so it never overflows.
    """
    r = np.asarray(r, dtype=float)
    s2 = hs.sigma_km ** 2
    out = r / s2 * np.exp(-(r - hs.r_h_km) ** 2 / (2.0 * s2)) * bessel_i0e(r * hs.r_h_km / s2)
    return out if np.ndim(out) else float(out)


def normalization_s0(hs: Hotspot, region_radius_km: float,
                     spec: QuadratureSpec | None = None) -> float:
    """Mass of the hotspot measure inside the disk of the given radius."""
    if not region_radius_km > 0:
        raise ValueError("region radius must be positive")
    spec = spec or QuadratureSpec()
    pts = [hs.r_h_km] if 0 < hs.r_h_km < region_radius_km else None
    return integrate_1d(lambda r: radial_density(r, hs), 0.0, region_radius_km, spec, points=pts)


@dataclass(frozen=True)
class HotspotSample:
    r: np.ndarray
    theta: np.ndarray
    n_drawn: int

    @property
    def x(self) -> np.ndarray:
        return self.r * np.cos(self.theta)

    @property
    def y(self) -> np.ndarray:
        return self.r * np.sin(self.theta)


def _raw_batch(hs: Hotspot, seed: int, index: int):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    xy = rng.standard_normal((2, SAMPLE_BATCH)) * hs.sigma_km
    c = hs.center
    return xy[0] + c.real, xy[1] + c.imag


def sample_hotspot(hs: Hotspot, region_radius_km: float, n: int, seed: int) -> HotspotSample:
    """Draw ``n`` hotspot locations truncated to the disk of the given radius.

    Raw Gaussian draws come in fixed-size batches, batch ``i`` from its own
    stream derived from ``(seed, i)``, so the output depends only on
    ``(seed, n)``. ``n_drawn`` counts raw draws up to the n-th accepted one.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    r2max = region_radius_km ** 2
    xs, ys = [], []
    accepted = 0
    drawn = 0
    index = 0
    while accepted < n:
        x, y = _raw_batch(hs, seed, index)
        index += 1
        inside = np.flatnonzero(x * x + y * y <= r2max)
        need = n - accepted
        if inside.size >= need:
            inside = inside[:need]
            drawn += int(inside[-1]) + 1
        else:
            drawn += SAMPLE_BATCH
        xs.append(x[inside])
        ys.append(y[inside])
        accepted += inside.size
        if accepted < n and drawn >= 4 * SAMPLE_BATCH and accepted < _MIN_ACCEPTANCE * drawn:
            raise HotspotOutsideRegion(
                f"acceptance {accepted / drawn:.2%} below {_MIN_ACCEPTANCE:.0%}: "
                "hotspot mass is essentially outside the region")
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    return HotspotSample(np.hypot(x, y), np.arctan2(y, x), drawn)


def acceptance_fraction(hs: Hotspot, region_radius_km: float, n_draws: int, seed: int) -> float:
    """Fraction of ``n_draws`` untruncated hotspot draws that land in the disk (an S0 estimate)."""
    r2max = region_radius_km ** 2
    hits = 0
    total = 0
    index = 0
    while total < n_draws:
        take = min(SAMPLE_BATCH, n_draws - total)
        x, y = _raw_batch(hs, seed, index)
        hits += int(np.count_nonzero(x[:take] ** 2 + y[:take] ** 2 <= r2max))
        total += take
        index += 1
    return hits / total
